//! Samplers for the distribution families used throughout, with exact
//! metadata (means, subGaussian parameter, tail function) where known.
//!
//! A [`DistributionFamily`] is a finite grid of members standing in for a
//! possibly infinite family; every "sup over the family" reported anywhere is
//! a *grid* supremum and is labeled as such by the consumers.
//!
//! Sampling is deterministic given the RNG substream handed in: one fixed
//! splittable generator (ChaCha8), one substream per replicate index.
//! Reproducibility is promised within this implementation, not across
//! languages or library versions.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::normal::normal_pdf;
use crate::paths::SamplePath;

/// How a tail function was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailForm {
    ClosedForm,
    MonteCarlo,
}

/// The tail function `r(K) = E[|X| 1{|X| > K}]` of a centered increment.
///
/// `r` is nonincreasing in `K`, `r(0) = E|X|` when finite, and vanishes for
/// `K` at or beyond the support bound when one exists.
#[derive(Clone)]
pub struct TailFunction {
    form: TailForm,
    support_bound: Option<f64>,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for TailFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TailFunction")
            .field("form", &self.form)
            .field("support_bound", &self.support_bound)
            .finish()
    }
}

impl TailFunction {
    pub fn closed_form(
        support_bound: Option<f64>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TailFunction {
            form: TailForm::ClosedForm,
            support_bound,
            eval: Arc::new(eval),
        }
    }

    /// Evaluates `r(K)`, `K >= 0`.
    pub fn r(&self, k: f64) -> f64 {
        assert!(k >= 0.0, "tail function argument must be nonnegative");
        (self.eval)(k)
    }

    pub fn form(&self) -> TailForm {
        self.form
    }

    pub fn is_closed_form(&self) -> bool {
        self.form == TailForm::ClosedForm
    }

    /// `|X| <= b` almost surely, when such a bound exists.
    pub fn support_bound(&self) -> Option<f64> {
        self.support_bound
    }
}

type StreamFn = Arc<dyn Fn(ChaCha8Rng) -> Box<dyn Iterator<Item = f64> + Send> + Send + Sync>;

/// A single member of a family: a sampler plus documented metadata.
#[derive(Clone)]
pub struct FamilyMember {
    label: String,
    mean: Option<f64>,
    sigma_sub_gaussian: Option<f64>,
    tail: Option<TailFunction>,
    make_stream: StreamFn,
}

impl std::fmt::Debug for FamilyMember {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyMember")
            .field("label", &self.label)
            .field("mean", &self.mean)
            .field("sigma_sub_gaussian", &self.sigma_sub_gaussian)
            .finish()
    }
}

impl FamilyMember {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// `E_P[X_1]` when the member is i.i.d. with a declared mean.
    pub fn mean(&self) -> Option<f64> {
        self.mean
    }

    pub fn sigma_sub_gaussian(&self) -> Option<f64> {
        self.sigma_sub_gaussian
    }

    /// Tail function of the centered increment `X_1 - E[X_1]`, when known.
    pub fn tail(&self) -> Option<&TailFunction> {
        self.tail.as_ref()
    }

    /// Infinite increment stream driven by the given RNG substream.
    pub fn stream(&self, rng: ChaCha8Rng) -> Box<dyn Iterator<Item = f64> + Send> {
        (self.make_stream)(rng)
    }

    /// Samples `x_1..x_T`. Deterministic given the substream.
    pub fn sample_path(&self, horizon: usize, rng: ChaCha8Rng) -> SamplePath {
        let values: Vec<f64> = self.stream(rng).take(horizon).collect();
        SamplePath::new(values).expect("samplers only emit finite values")
    }
}

/// I.i.d. `N(mu, sigma^2)` increments.
pub fn gaussian_iid(mu: f64, sigma: f64) -> Result<FamilyMember> {
    if !crate::error::positive_finite(sigma) {
        return Err(Error::invalid(format!("gaussian needs sigma > 0, got {sigma}")));
    }
    if !mu.is_finite() {
        return Err(Error::invalid("gaussian needs a finite mu"));
    }
    // centered tail: E[|X - mu| 1{|X - mu| > K}] = 2 sigma phi(K / sigma)
    let tail = TailFunction::closed_form(None, move |k| 2.0 * sigma * normal_pdf(k / sigma));
    Ok(FamilyMember {
        label: format!("gaussian(mu={mu},sigma={sigma})"),
        mean: Some(mu),
        sigma_sub_gaussian: Some(sigma),
        tail: Some(tail),
        make_stream: Arc::new(move |mut rng| {
            let dist = Normal::new(mu, sigma).expect("validated");
            Box::new(std::iter::from_fn(move || Some(dist.sample(&mut rng))))
        }),
    })
}

/// I.i.d. fair signs in `{-1, +1}`.
pub fn rademacher_iid() -> FamilyMember {
    let tail = TailFunction::closed_form(Some(1.0), |k| if k < 1.0 { 1.0 } else { 0.0 });
    FamilyMember {
        label: "rademacher".to_owned(),
        mean: Some(0.0),
        sigma_sub_gaussian: Some(1.0),
        tail: Some(tail),
        make_stream: Arc::new(|mut rng| {
            Box::new(std::iter::from_fn(move || {
                Some(if rng.random::<bool>() { 1.0 } else { -1.0 })
            }))
        }),
    }
}

/// Independent `N(drift_t, sigma^2)` increments with a cyclic drift schedule
/// whose running sums stay nonpositive, so the centered increments are
/// conditionally `sigma`-subGaussian and all running means are `<= 0`.
///
/// A representative of the nonpositive-running-mean class; individual drifts
/// may be positive (e.g. `-1, -1, 2, 0, -2, 2`) as long as every prefix sum
/// of the cycle, and the full cycle sum, is `<= 0`.
pub fn gaussian_drift_schedule(drifts: Vec<f64>, sigma: f64) -> Result<FamilyMember> {
    if !crate::error::positive_finite(sigma) {
        return Err(Error::invalid(format!("drift schedule needs sigma > 0, got {sigma}")));
    }
    if drifts.is_empty() {
        return Err(Error::invalid("drift schedule must be nonempty"));
    }
    let mut running = 0.0;
    for (idx, &d) in drifts.iter().enumerate() {
        if !d.is_finite() {
            return Err(Error::invalid("drift schedule values must be finite"));
        }
        running += d;
        if running > 1e-12 {
            return Err(Error::invalid(format!(
                "drift prefix sum {running} > 0 at index {idx}; running means must stay <= 0"
            )));
        }
    }
    let label = format!("gaussian-drift(len={},sigma={sigma})", drifts.len());
    Ok(FamilyMember {
        label,
        mean: None,
        sigma_sub_gaussian: Some(sigma),
        tail: None,
        make_stream: Arc::new(move |mut rng| {
            let noise = Normal::new(0.0, sigma).expect("validated");
            let drifts = drifts.clone();
            let mut t = 0usize;
            Box::new(std::iter::from_fn(move || {
                let d = drifts[t % drifts.len()];
                t += 1;
                Some(d + noise.sample(&mut rng))
            }))
        }),
    })
}

fn cauchy_inverse_cdf(u: f64) -> f64 {
    (std::f64::consts::PI * (u - 0.5)).tan()
}

/// Standard Cauchy via the inverse CDF `tan(pi (U - 1/2))`.
///
/// No finite mean, so no mean or tail metadata; used for the clamp-coupling
/// relation with its truncations.
pub fn standard_cauchy() -> FamilyMember {
    FamilyMember {
        label: "cauchy".to_owned(),
        mean: None,
        sigma_sub_gaussian: None,
        tail: None,
        make_stream: Arc::new(|mut rng| {
            Box::new(std::iter::from_fn(move || {
                Some(cauchy_inverse_cdf(rng.random::<f64>()))
            }))
        }),
    }
}

/// Standard Cauchy truncated at magnitude `a`: the Cauchy density on
/// `(-a, a)` with the remaining mass collected symmetrically as atoms at
/// `+/-a`. Sampling clamps the inverse-CDF draw, so a truncated path equals
/// the untruncated path under the same substream whenever every raw draw
/// lies in `(-a, a)`.
pub fn truncated_cauchy(a: f64) -> Result<FamilyMember> {
    if !crate::error::positive_finite(a) {
        return Err(Error::invalid(format!(
            "truncated cauchy needs a > 0, got {a}"
        )));
    }
    let tail = TailFunction::closed_form(Some(a), move |k| trunc_cauchy_tail(a, k));
    Ok(FamilyMember {
        label: format!("truncated-cauchy(a={a})"),
        mean: Some(0.0),
        sigma_sub_gaussian: None,
        tail: Some(tail),
        make_stream: Arc::new(move |mut rng| {
            Box::new(std::iter::from_fn(move || {
                Some(cauchy_inverse_cdf(rng.random::<f64>()).clamp(-a, a))
            }))
        }),
    })
}

// r(K) = (1/pi) ln((1+a^2)/(1+K^2)) + a (1 - (2/pi) atan a)  for K < a, else 0.
// First term: interior mass 2 int_K^a x/(pi(1+x^2)) dx; second: the atoms.
fn trunc_cauchy_tail(a: f64, k: f64) -> f64 {
    use std::f64::consts::PI;
    if k >= a {
        return 0.0;
    }
    (1.0 / PI) * ((1.0 + a * a) / (1.0 + k * k)).ln() + a * (1.0 - (2.0 / PI) * a.atan())
}

/// Two-atom binary law: with probability 1/2 the all-zeros sequence, with
/// probability 1/2 the sequence with a single one at position `n + 1`.
pub fn binary_pn(n: u32) -> FamilyMember {
    FamilyMember {
        label: format!("binary-pn(n={n})"),
        mean: None,
        sigma_sub_gaussian: None,
        tail: None,
        make_stream: Arc::new(move |mut rng| {
            let has_one = rng.random::<bool>();
            let one_at = n as usize + 1;
            let mut t = 0usize;
            Box::new(std::iter::from_fn(move || {
                t += 1;
                Some(if has_one && t == one_at { 1.0 } else { 0.0 })
            }))
        }),
    }
}

/// The two-coin construction: `X_1 ~ Bernoulli(1/2)`; conditionally on `X_1`
/// the later flips are independent with success probability 1/2 on one
/// branch and `2^-t` on the other, the branch assignment being symmetric
/// between `i = 1` and `i = 2`.
pub fn two_coin(i: u8) -> Result<FamilyMember> {
    if i != 1 && i != 2 {
        return Err(Error::invalid(format!("two_coin needs i in {{1, 2}}, got {i}")));
    }
    Ok(FamilyMember {
        label: format!("two-coin(i={i})"),
        mean: None,
        sigma_sub_gaussian: None,
        tail: None,
        make_stream: Arc::new(move |mut rng| {
            let mut t = 0usize;
            let mut fair_branch = false;
            let mut decay_p = 0.5;
            Box::new(std::iter::from_fn(move || {
                t += 1;
                if t == 1 {
                    let x1 = rng.random::<bool>();
                    // P_1: fair after X_1 = 1; P_2: fair after X_1 = 0.
                    fair_branch = if i == 1 { x1 } else { !x1 };
                    return Some(if x1 { 1.0 } else { 0.0 });
                }
                decay_p *= 0.5; // 2^-t at time t
                let p = if fair_branch { 0.5 } else { decay_p };
                Some(if rng.random::<f64>() < p { 1.0 } else { 0.0 })
            }))
        }),
    })
}

/// A finite ordered grid of members standing in for a family `P`.
#[derive(Debug, Clone)]
pub struct DistributionFamily {
    label: String,
    members: Vec<FamilyMember>,
}

impl DistributionFamily {
    pub fn new(label: impl Into<String>, members: Vec<FamilyMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("a family needs at least one member"));
        }
        for (i, m) in members.iter().enumerate() {
            if members[..i].iter().any(|o| o.label() == m.label()) {
                return Err(Error::invalid(format!(
                    "duplicate member label: {}",
                    m.label()
                )));
            }
        }
        Ok(DistributionFamily {
            label: label.into(),
            members,
        })
    }

    pub fn singleton(member: FamilyMember) -> Self {
        let label = member.label().to_owned();
        DistributionFamily {
            label,
            members: vec![member],
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    /// Grid supremum of `r(K)` over members with known tails; `None` if any
    /// member lacks one.
    pub fn sup_tail(&self, k: f64) -> Option<f64> {
        self.members
            .iter()
            .map(|m| m.tail().map(|t| t.r(k)))
            .try_fold(0.0_f64, |acc, r| r.map(|r| acc.max(r)))
    }
}

/// One truncated-Cauchy member per grid point.
pub fn truncated_cauchy_family(a_grid: &[f64]) -> Result<DistributionFamily> {
    if a_grid.is_empty() {
        return Err(Error::invalid("truncation grid must be nonempty"));
    }
    let members = a_grid
        .iter()
        .map(|&a| truncated_cauchy(a))
        .collect::<Result<Vec<_>>>()?;
    DistributionFamily::new("truncated-cauchy-grid", members)
}

/// One `binary_pn` member per `n`.
pub fn binary_pn_family(ns: &[u32]) -> Result<DistributionFamily> {
    if ns.is_empty() {
        return Err(Error::invalid("binary-pn grid must be nonempty"));
    }
    DistributionFamily::new(
        "binary-pn-grid",
        ns.iter().map(|&n| binary_pn(n)).collect(),
    )
}

/// A tail-function value together with how it was computed.
#[derive(Debug, Clone)]
pub struct TailEstimate {
    pub value: f64,
    /// Standard error of the Monte Carlo route; `None` for closed forms.
    pub stderr: Option<f64>,
    pub form: TailForm,
}

/// `r(K)` for a member: the closed form when available, otherwise a Monte
/// Carlo estimate of `E[|X_1| 1{|X_1| > K}]` from `n_mc` substreams.
pub fn tail_r(member: &FamilyMember, k: f64, n_mc: u64, seed: u64) -> Result<TailEstimate> {
    if !crate::error::nonnegative_finite(k) {
        return Err(Error::invalid(format!("tail_r needs K >= 0, got {k}")));
    }
    if let Some(tail) = member.tail() {
        return Ok(TailEstimate {
            value: tail.r(k),
            stderr: None,
            form: TailForm::ClosedForm,
        });
    }
    if n_mc == 0 {
        return Err(Error::invalid("tail_r Monte Carlo route needs n_mc >= 1"));
    }
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for rep in 0..n_mc {
        let x = member
            .stream(crate::mc::substream_rng(seed, rep))
            .next()
            .expect("streams are infinite");
        let v = if x.abs() > k { x.abs() } else { 0.0 };
        sum += v;
        sumsq += v * v;
    }
    let n = n_mc as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    Ok(TailEstimate {
        value: mean,
        stderr: Some((var / n).sqrt()),
        form: TailForm::MonteCarlo,
    })
}
