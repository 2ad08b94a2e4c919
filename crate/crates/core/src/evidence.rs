//! E-process and supermartingale constructions, evaluated in log-domain.
//!
//! Values of the mixture processes overflow `f64` quickly on drifting paths,
//! so every process here reports `log E_t`; sums of processes go through
//! log-sum-exp. A log-value of `-inf` encodes the value 0, so nonnegativity
//! is structural. Process values are indexed `t = 0..=T` with `E_0` the
//! value before any data.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::normal::log_normal_cdf;
use crate::paths::{hit_time, SamplePath, StoppingRule};

pub use crate::normal::{log_normal_cdf as log_phi, normal_cdf};

/// Numerically stable `log(sum(exp(terms)))`; empty or all `-inf` gives `-inf`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

type EvalFn = Arc<dyn Fn(&SamplePath) -> Vec<f64> + Send + Sync>;

/// An adapted nonnegative process evaluated in log-domain along a path.
///
/// `log_values` returns `log E_0 .. log E_T` (length `T + 1`); entry `t`
/// depends only on `x_1..x_t`.
#[derive(Clone)]
pub struct EvidenceProcess {
    label: String,
    eval: EvalFn,
}

impl std::fmt::Debug for EvidenceProcess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvidenceProcess")
            .field("label", &self.label)
            .finish()
    }
}

impl EvidenceProcess {
    /// Wraps a whole-path log-value evaluator. The closure must return a
    /// vector of length `horizon + 1` whose entry `t` is adapted to `x_1..x_t`.
    pub fn from_log_values_fn(
        label: impl Into<String>,
        eval: impl Fn(&SamplePath) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        EvidenceProcess {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `log E_0 .. log E_T` along the path.
    pub fn log_values(&self, path: &SamplePath) -> Vec<f64> {
        let v = (self.eval)(path);
        debug_assert_eq!(v.len(), path.horizon() + 1);
        v
    }

    /// `E_0 .. E_T` (exponentiated; may overflow to `inf` for display only).
    pub fn values(&self, path: &SamplePath) -> Vec<f64> {
        self.log_values(path).into_iter().map(f64::exp).collect()
    }

    /// The process constant at `value >= 0`.
    pub fn constant(value: f64) -> Self {
        let lv = value.ln(); // ln(0) = -inf encodes the zero process
        Self::from_log_values_fn(format!("constant({value})"), move |p| {
            vec![lv; p.horizon() + 1]
        })
    }

    /// Indicator-sum witness `E_t = sum_n 1{tau_n <= t}`.
    ///
    /// The e-process guarantee requires `sup_P P(tau_n < infinity) <= 2^-n`
    /// for the n-th rule; that is an analytic fact the caller asserts, not
    /// something checked here.
    pub fn indicator_witness(rules: Vec<StoppingRule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::invalid("indicator_witness needs at least one rule"));
        }
        let label = format!("witness[{} rules]", rules.len());
        Ok(Self::from_log_values_fn(label, move |path| {
            let hits: Vec<_> = rules.iter().map(|r| hit_time(r, path)).collect();
            (0..=path.horizon())
                .map(|t| {
                    let count = hits.iter().filter(|h| h.hit_by(t)).count();
                    (count as f64).ln()
                })
                .collect()
        }))
    }

    /// One-jump process `E_t = (1/c) 1{tau <= t}`, `0 < c <= 1`.
    pub fn one_jump(rule: StoppingRule, c: f64) -> Result<Self> {
        if !(crate::error::positive_finite(c) && c <= 1.0) {
            return Err(Error::invalid(format!(
                "one_jump needs c in (0, 1], got {c}"
            )));
        }
        let log_jump = -c.ln();
        let label = format!("one-jump(1/{c} on {})", rule.description());
        Ok(Self::from_log_values_fn(label, move |path| {
            let hit = hit_time(&rule, path);
            (0..=path.horizon())
                .map(|t| if hit.hit_by(t) { log_jump } else { f64::NEG_INFINITY })
                .collect()
        }))
    }
}

/// Positive mixture weights with partial sums at most one.
#[derive(Debug, Clone)]
pub struct MixtureWeights {
    weights: Vec<f64>,
}

impl MixtureWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("mixture weights must be nonempty"));
        }
        let mut partial = 0.0;
        for &w in &weights {
            if !crate::error::positive_finite(w) {
                return Err(Error::invalid(format!("mixture weight must be > 0, got {w}")));
            }
            partial += w;
            if partial > 1.0 + 1e-12 {
                return Err(Error::invalid(format!(
                    "mixture weights partial sum {partial} exceeds 1"
                )));
            }
        }
        Ok(MixtureWeights { weights })
    }

    /// First `n` terms of `w_k = 6 / (pi^2 k^2)`, which sum to one over all k.
    pub fn basel(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("basel weights need n >= 1"));
        }
        let c = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        Self::new((1..=n).map(|k| c / ((k * k) as f64)).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Likelihood-ratio supermartingale `log L_t = lambda S_t - lambda^2 t / 2`.
pub fn likelihood_process(lambda: f64) -> EvidenceProcess {
    EvidenceProcess::from_log_values_fn(format!("L(lambda={lambda})"), move |path| {
        (0..=path.horizon())
            .map(|t| lambda * path.sum_at(t) - lambda * lambda * t as f64 / 2.0)
            .collect()
    })
}

/// Normal mixture `log M_t = S_t^2 / (2(t+1)) - ln(t+1)/2`; `M_0 = 1`.
pub fn normal_mixture() -> EvidenceProcess {
    EvidenceProcess::from_log_values_fn("normal-mixture", |path| {
        (0..=path.horizon())
            .map(|t| {
                let s = path.sum_at(t);
                let tp1 = (t + 1) as f64;
                s * s / (2.0 * tp1) - 0.5 * tp1.ln()
            })
            .collect()
    })
}

/// One-sided normal mixture, exact closed form of `2 int_0^inf L_t(l) phi(l) dl`:
/// `log = ln 2 + S_t^2/(2(t+1)) - ln(t+1)/2 + ln Phi(S_t / sqrt(t+1))`.
pub fn one_sided_mixture_exact() -> EvidenceProcess {
    EvidenceProcess::from_log_values_fn("one-sided-exact", |path| {
        (0..=path.horizon())
            .map(|t| {
                let s = path.sum_at(t);
                let tp1 = (t + 1) as f64;
                std::f64::consts::LN_2 + s * s / (2.0 * tp1) - 0.5 * tp1.ln()
                    + log_normal_cdf(s / tp1.sqrt())
            })
            .collect()
    })
}

/// The one-sided bound process exactly as printed:
/// `log N_t = ln 2 + 2 t^2 Xbar_t^2/(t+1) - ln(t+1)/2 + ln Phi(2 t Xbar_t / sqrt(t+1))`.
///
/// Note this equals [`one_sided_mixture_exact`] with `S_t` replaced by
/// `2 S_t`; it dominates the exact mixture and already has infinite
/// expectation at `t = 1` under a standard normal, so only the exact variant
/// goes through the Monte Carlo e-process verification. See the README.
pub fn one_sided_mixture_paper() -> EvidenceProcess {
    EvidenceProcess::from_log_values_fn("one-sided-paper", |path| {
        (0..=path.horizon())
            .map(|t| {
                let s = path.sum_at(t); // t * Xbar_t
                let tp1 = (t + 1) as f64;
                std::f64::consts::LN_2 + 2.0 * s * s / tp1 - 0.5 * tp1.ln()
                    + log_normal_cdf(2.0 * s / tp1.sqrt())
            })
            .collect()
    })
}

/// Weighted mixture `sum_n w_n E^n_t`, computed pointwise by log-sum-exp.
pub fn mix(processes: Vec<EvidenceProcess>, weights: MixtureWeights) -> Result<EvidenceProcess> {
    if processes.len() != weights.len() {
        return Err(Error::invalid(format!(
            "mix got {} processes but {} weights",
            processes.len(),
            weights.len()
        )));
    }
    let log_weights: Vec<f64> = weights.weights().iter().map(|w| w.ln()).collect();
    let label = format!("mix[{}]", processes.len());
    Ok(EvidenceProcess::from_log_values_fn(label, move |path| {
        let logs: Vec<Vec<f64>> = processes.iter().map(|p| p.log_values(path)).collect();
        let mut terms = vec![0.0; processes.len()];
        (0..=path.horizon())
            .map(|t| {
                for (k, lv) in logs.iter().enumerate() {
                    terms[k] = log_weights[k] + lv[t];
                }
                log_sum_exp(&terms)
            })
            .collect()
    }))
}

/// The process stopped at its first crossing of `level`: `E'_t = E_{tau ^ t}`
/// with `tau` the first `t >= 1` where `E_t >= level`.
pub fn stop_at_level(process: EvidenceProcess, level: f64) -> Result<EvidenceProcess> {
    if !crate::error::positive_finite(level) {
        return Err(Error::invalid(format!(
            "stop_at_level needs a positive finite level, got {level}"
        )));
    }
    let log_level = level.ln();
    let label = format!("stopped({} at {level})", process.label());
    Ok(EvidenceProcess::from_log_values_fn(label, move |path| {
        let mut logs = process.log_values(path);
        freeze_after_crossing(&mut logs, log_level);
        logs
    }))
}

fn freeze_after_crossing(logs: &mut [f64], log_level: f64) {
    for t in 1..logs.len() {
        if logs[t] >= log_level {
            let frozen = logs[t];
            for entry in logs.iter_mut().skip(t + 1) {
                *entry = frozen;
            }
            break;
        }
    }
}

/// Turns a process with unbounded sup into one with a divergent limit:
/// `sum_{n<=n_terms} 6/(pi^2 n^2) * (process stopped at level 2^n)`.
///
/// The infinite sum is truncated at `n_terms`; dropping nonnegative terms of
/// total weight at most one preserves the e-process property.
pub fn lift_sup_to_lim(process: EvidenceProcess, n_terms: usize) -> Result<EvidenceProcess> {
    if n_terms < 1 {
        return Err(Error::invalid("lift_sup_to_lim needs n_terms >= 1"));
    }
    let weights = MixtureWeights::basel(n_terms)?;
    let log_weights: Vec<f64> = weights.weights().iter().map(|w| w.ln()).collect();
    let label = format!("lift({}, {n_terms} terms)", process.label());
    Ok(EvidenceProcess::from_log_values_fn(label, move |path| {
        let base = process.log_values(path);
        let stopped: Vec<Vec<f64>> = (1..=n_terms)
            .map(|n| {
                let mut logs = base.clone();
                freeze_after_crossing(&mut logs, n as f64 * std::f64::consts::LN_2);
                logs
            })
            .collect();
        let mut terms = vec![0.0; n_terms];
        (0..base.len())
            .map(|t| {
                for (k, lv) in stopped.iter().enumerate() {
                    terms[k] = log_weights[k] + lv[t];
                }
                log_sum_exp(&terms)
            })
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::StoppingRule;

    fn path(vals: &[f64]) -> SamplePath {
        SamplePath::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn likelihood_identities() {
        let p = path(&[0.3, -1.2, 4.0]);
        let l0 = likelihood_process(0.0);
        assert!(l0.log_values(&p).iter().all(|&v| v == 0.0));

        // lambda=1 on (1,-1): log E_2 = 0 - 1 = -1
        let l1 = likelihood_process(1.0);
        let v = l1.log_values(&path(&[1.0, -1.0]));
        assert_eq!(v[0], 0.0);
        assert!((v[2] - (-1.0)).abs() < 1e-15);

        // lambda=0.5 on (2): log E_1 = 1 - 0.125 = 0.875
        let l = likelihood_process(0.5);
        assert!((l.log_values(&path(&[2.0]))[1] - 0.875).abs() < 1e-15);
    }

    #[test]
    fn normal_mixture_values() {
        let m = normal_mixture();
        assert_eq!(m.log_values(&path(&[]))[0], 0.0); // M_0 = 1
        let v = m.log_values(&path(&[0.0, 0.0, 0.0]));
        assert!((v[3].exp() - 0.5).abs() < 1e-15); // 1/sqrt(4)
        assert!((v[1].exp() - 0.5_f64.sqrt()).abs() < 1e-15); // 1/sqrt(2)
    }

    #[test]
    fn one_sided_exact_values() {
        let e = one_sided_mixture_exact();
        assert_eq!(e.log_values(&path(&[]))[0], 0.0); // 2*Phi(0) = 1
        // mpmath: 2*exp(1/4)/sqrt(2)*Phi(1/sqrt(2))
        let v = e.log_values(&path(&[1.0]));
        assert!(
            (v[1] - 1.380527341221671_f64.ln()).abs() < 1e-12,
            "got {}",
            v[1]
        );
    }

    #[test]
    fn one_sided_paper_values() {
        let n = one_sided_mixture_paper();
        assert_eq!(n.log_values(&path(&[]))[0], 0.0); // 2*Phi(0) = 1
        // sqrt(2)*e*Phi(sqrt(2)), hand evaluation of the printed formula
        let v = n.log_values(&path(&[1.0]));
        assert!(
            (v[1] - 3.541883781935351_f64.ln()).abs() < 1e-12,
            "got {}",
            v[1]
        );
        // deep negative argument: finite log, positive value, no underflow
        let v = n.log_values(&path(&[-10.0]));
        assert!((v[1] - (-3.226462615124861)).abs() < 1e-9, "got {}", v[1]);
        assert!(v[1].exp() > 0.0);
    }

    #[test]
    fn paper_variant_dominates_exact_at_its_own_inputs() {
        // the printed N_t equals the exact mixture evaluated at 2*S_t, so it
        // exceeds the exact mixture whenever S_t > 0
        let p = path(&[1.0]);
        let paper = one_sided_mixture_paper().log_values(&p)[1];
        let exact = one_sided_mixture_exact().log_values(&p)[1];
        assert!(paper > exact);
    }

    #[test]
    fn one_jump_examples() {
        let p = path(&[0.0; 5]);
        let jump = EvidenceProcess::one_jump(StoppingRule::fixed_time(3).unwrap(), 0.5).unwrap();
        let v = jump.values(&p);
        assert_eq!(v, vec![0.0, 0.0, 0.0, 2.0, 2.0, 2.0]);

        let never = EvidenceProcess::one_jump(StoppingRule::never(), 0.5).unwrap();
        assert!(never.values(&p).iter().all(|&x| x == 0.0));

        let ind = EvidenceProcess::one_jump(StoppingRule::always(), 1.0).unwrap();
        let v = ind.values(&p);
        assert!(v.iter().all(|&x| x <= 1.0));
        assert_eq!(v[1], 1.0);

        assert!(EvidenceProcess::one_jump(StoppingRule::always(), 0.0).is_err());
        assert!(EvidenceProcess::one_jump(StoppingRule::always(), 1.5).is_err());
    }

    #[test]
    fn indicator_witness_examples() {
        let p = path(&[0.0; 5]);
        let rules = vec![
            StoppingRule::fixed_time(2).unwrap(),
            StoppingRule::fixed_time(5).unwrap(),
            StoppingRule::never(),
        ];
        let w = EvidenceProcess::indicator_witness(rules).unwrap();
        assert_eq!(w.values(&p), vec![0.0, 0.0, 1.0, 1.0, 1.0, 2.0]);

        let all_hit =
            EvidenceProcess::indicator_witness(vec![StoppingRule::always(); 4]).unwrap();
        assert_eq!(all_hit.values(&p)[1], 4.0);

        let none = EvidenceProcess::indicator_witness(vec![StoppingRule::never()]).unwrap();
        assert!(none.values(&p).iter().all(|&x| x == 0.0));

        assert!(EvidenceProcess::indicator_witness(vec![]).is_err());
    }

    #[test]
    fn witness_is_nondecreasing() {
        let p = path(&[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let rules = vec![
            StoppingRule::first_one(),
            StoppingRule::count_ones(3),
            StoppingRule::fixed_time(4).unwrap(),
        ];
        let w = EvidenceProcess::indicator_witness(rules).unwrap();
        let v = w.values(&p);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
        assert!((v.last().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mix_examples() {
        let p = path(&[0.0; 3]);
        let single = mix(
            vec![normal_mixture()],
            MixtureWeights::new(vec![1.0]).unwrap(),
        )
        .unwrap();
        let direct = normal_mixture().log_values(&p);
        for (a, b) in single.log_values(&p).iter().zip(&direct) {
            assert!((a - b).abs() < 1e-14);
        }

        let two = mix(
            vec![
                EvidenceProcess::constant(1.0),
                EvidenceProcess::constant(3.0),
            ],
            MixtureWeights::new(vec![0.5, 0.5]).unwrap(),
        )
        .unwrap();
        for &v in &two.values(&p) {
            assert!((v - 2.0).abs() < 1e-14);
        }

        assert!(MixtureWeights::new(vec![0.5, 0.25, 0.125]).is_ok());
        assert!(MixtureWeights::new(vec![0.6, 0.6]).is_err());
        assert!(MixtureWeights::new(vec![0.0]).is_err());
        assert!(mix(
            vec![EvidenceProcess::constant(1.0)],
            MixtureWeights::new(vec![0.5, 0.5]).unwrap()
        )
        .is_err());
    }

    #[test]
    fn stop_at_level_examples() {
        let step = EvidenceProcess::from_log_values_fn("step", |p| {
            let vals = [0.5_f64, 3.0, 0.1];
            (0..=p.horizon())
                .map(|t| if t == 0 { 0.0 } else { vals[t - 1].ln() })
                .collect()
        });
        let p = path(&[0.0; 3]);

        let stopped = stop_at_level(step.clone(), 2.0).unwrap();
        let v = stopped.values(&p);
        assert!((v[1] - 0.5).abs() < 1e-14);
        assert!((v[2] - 3.0).abs() < 1e-14);
        assert!((v[3] - 3.0).abs() < 1e-14);

        // level above the sup: unchanged
        let unchanged = stop_at_level(step.clone(), 10.0).unwrap();
        for (a, b) in unchanged.log_values(&p).iter().zip(step.log_values(&p)) {
            assert_eq!(*a, b);
        }

        // level at or below E_1: frozen at E_1 from t=1 on
        let frozen = stop_at_level(step, 0.5).unwrap();
        let v = frozen.values(&p);
        assert!((v[1] - 0.5).abs() < 1e-14);
        assert!((v[2] - 0.5).abs() < 1e-14);
        assert!((v[3] - 0.5).abs() < 1e-14);

        assert!(stop_at_level(EvidenceProcess::constant(1.0), 0.0).is_err());
    }

    #[test]
    fn lift_sup_to_lim_examples() {
        let p = path(&[0.0; 3]);

        let zero = lift_sup_to_lim(EvidenceProcess::constant(0.0), 1).unwrap();
        assert!(zero.values(&p).iter().all(|&v| v == 0.0));

        // process stepping to 4 at t=1: with 2 terms both freeze at 4,
        // value = (6/pi^2)(4/1 + 4/4) = 30/pi^2
        let step4 = EvidenceProcess::from_log_values_fn("step4", |p| {
            (0..=p.horizon())
                .map(|t| if t == 0 { 0.0 } else { 4.0_f64.ln() })
                .collect()
        });
        let lifted = lift_sup_to_lim(step4, 2).unwrap();
        let v = lifted.values(&p);
        for &x in &v[1..] {
            assert!((x - 3.039635509270133).abs() < 1e-12, "got {x}");
        }

        assert!(lift_sup_to_lim(EvidenceProcess::constant(0.0), 0).is_err());

        // basel weights stay under one for any truncation length
        for n in [1, 2, 5, 50] {
            let w = MixtureWeights::basel(n).unwrap();
            assert!(w.weights().iter().sum::<f64>() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rademacher_one_step_supermartingale_ratio() {
        // E[L_{t+1}(l) | prefix] / L_t(l) = cosh(l) exp(-l^2/2) <= 1
        let mut l = -3.0_f64;
        while l <= 3.0 {
            let ratio = l.cosh() * (-l * l / 2.0).exp();
            assert!(ratio <= 1.0 + 1e-15, "lambda={l}: ratio {ratio}");
            l += 0.125;
        }
    }

    #[test]
    fn normal_mixture_diverges_on_constant_drift() {
        // x_t = 0.5 constant: log M_t ~ t/8, must exceed 10 within t <= 10^4
        let p = path(&vec![0.5; 200]);
        let v = normal_mixture().log_values(&p);
        assert!(v.iter().any(|&x| x > 10.0));
    }

    #[test]
    fn log_sum_exp_handles_neg_infinity() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            f64::NEG_INFINITY
        );
        let v = log_sum_exp(&[0.0, f64::NEG_INFINITY]);
        assert!((v - 0.0).abs() < 1e-15);
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
    }
}
