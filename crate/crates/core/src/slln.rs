//! Composite strong-law detector: running-mean drift rules, certified
//! `k_n` schedules, and the indicator witness built from them.
//!
//! Certified schedules satisfy, for every entry,
//!
//! ```text
//! (4352 n^2 + 4) * ( k_n^(-1/3) + sup_over_grid r_P(k_n^(1/3)) ) <= 2^-n
//! ```
//!
//! with the left side evaluated under directed (upward) rounding, so a
//! `certified = true` flag is a machine-checked fact about the grid. The
//! certified `k_n` are astronomically large (`k_1 = 661_231_600_128` already
//! for the fair-sign family), so certified witnesses never fire at desk
//! horizons; uncertified schedules exist so the detector can be exercised,
//! and the flag travels with every consumer.

use crate::error::{Error, Result};
use crate::evidence::EvidenceProcess;
use crate::families::DistributionFamily;
use crate::paths::{SamplePath, StoppingRule};

/// Largest `n` for which `((4352 n^2 + 4) 2^n)^3` stays exactly representable
/// in `u128`.
pub const MAX_SCHEDULE_N: u32 = 21;

/// The constant `c = 4352 n^2 + 4` multiplying the drift-rule tail bound.
pub fn certification_constant(n: u32) -> u64 {
    4352 * u64::from(n) * u64::from(n) + 4
}

/// Drift rule: stops at the first global time `u > k` with
/// `|Xbar_u - Xbar_k| > 1/n`; never stops at or before time `k`.
///
/// The scan starts at `u = k + 1`: the `u = k` term is identically zero and
/// can never exceed `1/n`, so this matches the `inf {t >= 0: ...}` form.
pub fn tau_kn(k: u128, n: u32) -> Result<StoppingRule> {
    if k == 0 {
        return Err(Error::invalid("tau_kn needs k >= 1"));
    }
    if n == 0 {
        return Err(Error::invalid("tau_kn needs n >= 1"));
    }
    let threshold = 1.0 / f64::from(n);
    Ok(StoppingRule::from_fn(
        format!("tau(k={k},n={n})"),
        move |v| {
            let t = v.t() as u128;
            if t <= k {
                return false;
            }
            // t > k, so k fits in usize here
            let anchor = v.mean_at(k as usize);
            (v.mean() - anchor).abs() > threshold
        },
    ))
}

/// One `(n, k_n)` pair of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KScheduleEntry {
    pub n: u32,
    pub k_n: u128,
}

/// A `k_n` schedule, certified or not, for a named family grid.
#[derive(Debug, Clone)]
pub struct KSchedule {
    entries: Vec<KScheduleEntry>,
    certified: bool,
    family_label: String,
}

impl KSchedule {
    /// An explicitly uncertified schedule for simulation and demonstration.
    pub fn uncertified(
        entries: Vec<(u32, u128)>,
        family_label: impl Into<String>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("a schedule needs at least one entry"));
        }
        for &(n, k) in &entries {
            if n == 0 || k == 0 {
                return Err(Error::invalid("schedule entries need n >= 1 and k >= 1"));
            }
        }
        Ok(KSchedule {
            entries: entries
                .into_iter()
                .map(|(n, k_n)| KScheduleEntry { n, k_n })
                .collect(),
            certified: false,
            family_label: family_label.into(),
        })
    }

    /// Builds a schedule from explicit entries and re-derives the certified
    /// flag by checking each one against the family's closed-form tails
    /// (entries loaded from a file carry no certification of their own).
    pub fn with_certification(
        entries: Vec<(u32, u128)>,
        family: &DistributionFamily,
    ) -> Result<Self> {
        let schedule = Self::uncertified(entries, family.label())?;
        let certified = schedule
            .entries
            .iter()
            .all(|e| certification_holds(family, e.n, e.k_n) == Some(true));
        Ok(KSchedule {
            certified,
            ..schedule
        })
    }

    pub fn entries(&self) -> &[KScheduleEntry] {
        &self.entries
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    /// The grid the certification supremum ran over.
    pub fn family_label(&self) -> &str {
        &self.family_label
    }
}

/// Whether `(4352 n^2 + 4)(k^(-1/3) + sup r(k^(1/3))) <= 2^-n` provably
/// holds, evaluating the left side with upward-directed rounding. Exact
/// integer arithmetic handles the support-bounded case where the tail term
/// vanishes identically.
pub fn certification_holds(family: &DistributionFamily, n: u32, k: u128) -> Option<bool> {
    let c = certification_constant(n);
    let all_closed = family
        .members()
        .iter()
        .all(|m| m.tail().is_some_and(|t| t.is_closed_form()));
    if !all_closed {
        return None;
    }
    let cbrt_exact = u128::from(c) << n; // c * 2^n = cube root of the algebraic k
    if family_support_bound(family).is_some_and(|b| b <= cbrt_exact as f64) {
        // supports are inside (k0)^(1/3) <= k^(1/3) whenever k >= k0, so the
        // tail term is exactly zero and the condition is the integer
        // inequality k >= (c 2^n)^3
        if k >= cbrt_exact.pow(3) {
            return Some(true);
        }
        // the tail may still be nonzero below k0; fall through to the float route
    }
    // conservative float evaluation: every factor rounded up
    const UP: f64 = 1.0 + 1e-13;
    let kf = k as f64;
    let cbrt = kf.cbrt();
    let inv_cbrt_up = (1.0 / cbrt) * UP * UP;
    let r_up = family.sup_tail(cbrt * (1.0 - 1e-13))? * UP;
    let lhs_up = c as f64 * (inv_cbrt_up + r_up) * UP;
    Some(lhs_up <= 0.5_f64.powi(n as i32))
}

fn family_support_bound(family: &DistributionFamily) -> Option<f64> {
    family
        .members()
        .iter()
        .map(|m| m.tail().and_then(|t| t.support_bound()))
        .try_fold(0.0_f64, |acc, b| b.map(|b| acc.max(b)))
}

/// For each `n <= n_max`, the smallest integer `k_n` provably satisfying the
/// certification display, found from the algebraic root `((4352 n^2 + 4) 2^n)^3`
/// by monotone search; requires closed-form tails for every member.
pub fn k_schedule(family: &DistributionFamily, n_max: u32) -> Result<KSchedule> {
    if n_max == 0 {
        return Err(Error::invalid("k_schedule needs n_max >= 1"));
    }
    if n_max > MAX_SCHEDULE_N {
        return Err(Error::invalid(format!(
            "n_max = {n_max} exceeds the exact-arithmetic cap {MAX_SCHEDULE_N}"
        )));
    }
    for member in family.members() {
        match member.tail() {
            Some(t) if t.is_closed_form() => {}
            _ => {
                return Err(Error::Uncertifiable(format!(
                    "member {} has no closed-form tail function",
                    member.label()
                )))
            }
        }
    }
    let mut entries = Vec::with_capacity(n_max as usize);
    let mut prev_k = 0u128;
    for n in 1..=n_max {
        let c = certification_constant(n);
        // any k below the algebraic root fails on the k^(-1/3) term alone
        let k0 = (u128::from(c) << n).pow(3);
        let holds = |k: u128| certification_holds(family, n, k).expect("tails checked above");
        let mut hi = k0;
        let mut doublings = 0u32;
        while !holds(hi) {
            hi = hi.checked_mul(2).ok_or_else(|| {
                Error::Uncertifiable(format!(
                    "tail of {} does not decay fast enough near n = {n}",
                    family.label()
                ))
            })?;
            doublings += 1;
            if doublings > 120 {
                return Err(Error::Uncertifiable(format!(
                    "tail of {} does not decay fast enough near n = {n}",
                    family.label()
                )));
            }
        }
        let mut lo = k0; // holds(k0 - 1) is false a fortiori
        let mut hi_ok = hi;
        while lo < hi_ok {
            let mid = lo + (hi_ok - lo) / 2;
            if holds(mid) {
                hi_ok = mid;
            } else {
                lo = mid + 1;
            }
        }
        let k_n = hi_ok;
        debug_assert!(holds(k_n) && (k_n == k0 || !holds(k_n - 1)));
        if k_n <= prev_k {
            return Err(Error::Uncertifiable(format!(
                "schedule not strictly increasing at n = {n}"
            )));
        }
        prev_k = k_n;
        entries.push(KScheduleEntry { n, k_n });
    }
    Ok(KSchedule {
        entries,
        certified: true,
        family_label: family.label().to_owned(),
    })
}

/// The witness `E_t = sum_n 1{tau_{k_n, n} <= t}` over the schedule's rules.
///
/// The e-process guarantee `E_P[E_tau] <= 1` holds only for certified
/// schedules; the label carries the flag so reports can propagate it.
pub fn slln_witness(schedule: &KSchedule) -> Result<EvidenceProcess> {
    let rules = schedule
        .entries()
        .iter()
        .map(|e| tau_kn(e.k_n, e.n))
        .collect::<Result<Vec<_>>>()?;
    let witness = EvidenceProcess::indicator_witness(rules)?;
    let label = format!(
        "slln-witness[{} entries, certified={}]",
        schedule.entries().len(),
        schedule.certified()
    );
    Ok(EvidenceProcess::from_log_values_fn(label, move |path| {
        witness.log_values(path)
    }))
}

/// Finite-horizon divergence diagnostic:
/// `max_{t >= t_burnin} Xbar_t - min_{t >= t_burnin} Xbar_t`.
///
/// `t_burnin` defaults to `T/10` (at least 1). Diagnostic only; no
/// probabilistic claim attaches to the number.
pub fn divergence_gap(path: &SamplePath, t_burnin: Option<usize>) -> Result<f64> {
    let horizon = path.horizon();
    let burnin = t_burnin.unwrap_or(horizon / 10).max(1);
    if horizon < 2 * burnin {
        return Err(Error::invalid(format!(
            "divergence_gap needs horizon >= 2 * t_burnin, got T = {horizon}, t_burnin = {burnin}"
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in burnin..=horizon {
        let m = path.mean_at(t);
        lo = lo.min(m);
        hi = hi.max(m);
    }
    Ok(hi - lo)
}

/// Deterministic path `x_t = (-1)^(t+1) 2^(t-1)`: alternating signs with
/// doubling magnitudes, so the running mean oscillates beyond `+-1/3`
/// forever. Horizon capped at 1000 to keep the values finite.
pub fn doubling_path(horizon: usize) -> Result<SamplePath> {
    if horizon > 1000 {
        return Err(Error::invalid("doubling_path supports horizons up to 1000"));
    }
    let values = (0..horizon)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * 2.0_f64.powi(i as i32)
        })
        .collect();
    SamplePath::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        gaussian_iid, rademacher_iid, standard_cauchy, truncated_cauchy_family,
        DistributionFamily,
    };
    use crate::paths::{hit_time, HitTime};

    fn path(vals: &[f64]) -> SamplePath {
        SamplePath::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn tau_kn_never_fires_on_constant_paths() {
        let rule = tau_kn(3, 2).unwrap();
        let p = path(&[0.7; 50]);
        assert_eq!(hit_time(&rule, &p), HitTime::NotHitByHorizon);
    }

    #[test]
    fn tau_kn_hand_table() {
        // k=2, n=1 on (1, 1, -1, -1, -1, ...): anchor Xbar_2 = 1. The rule
        // needs |Xbar_u - 1| > 1, i.e. Xbar_u < 0; running means are
        // 1, 1, 1/3, 0, -1/5, ... so the first firing is u = 5.
        let p = path(&[1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0]);
        let mut table = Vec::new();
        let mut s = 0.0;
        for (i, &x) in p.values().iter().enumerate() {
            s += x;
            table.push(s / (i + 1) as f64);
        }
        let anchor = table[1];
        let expect = table
            .iter()
            .enumerate()
            .position(|(i, &m)| i + 1 > 2 && (m - anchor).abs() > 1.0)
            .map(|i| i + 1)
            .unwrap();
        assert_eq!(expect, 5);
        let rule = tau_kn(2, 1).unwrap();
        assert_eq!(hit_time(&rule, &p), HitTime::Hit(expect));
    }

    #[test]
    fn tau_kn_small_example() {
        // k=1, n=10 on (0, 1): |Xbar_2 - Xbar_1| = 0.5 > 0.1, stop at 2
        let rule = tau_kn(1, 10).unwrap();
        assert_eq!(hit_time(&rule, &path(&[0.0, 1.0])), HitTime::Hit(2));
        assert!(tau_kn(0, 1).is_err());
        assert!(tau_kn(1, 0).is_err());
    }

    #[test]
    fn schedule_certification_rademacher() {
        let fam = DistributionFamily::singleton(rademacher_iid());
        let sched = k_schedule(&fam, 3).unwrap();
        assert!(sched.certified());
        let ks: Vec<u128> = sched.entries().iter().map(|e| e.k_n).collect();
        assert_eq!(ks[0], 661_231_600_128); // (4356 * 2)^3
        assert_eq!(ks[1], 69_648_u128.pow(3)); // 69648 = 4 * 17412
        assert_eq!(ks[2], (u128::from(certification_constant(3)) << 3).pow(3));
        // k_n >> n^6 2^(3n)
        for e in sched.entries() {
            let crude = u128::from(e.n).pow(6) << (3 * e.n);
            assert!(e.k_n > 1000 * crude, "n={}: {} vs {crude}", e.n, e.k_n);
        }
        // strictly increasing
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        // independent re-verification of the display
        for e in sched.entries() {
            assert_eq!(certification_holds(&fam, e.n, e.k_n), Some(true));
            assert_eq!(certification_holds(&fam, e.n, e.k_n - 1), Some(false));
        }
    }

    #[test]
    fn schedule_certification_gaussian() {
        // unbounded support: the tail term is positive but vanishing, so k_n
        // lands within a hair above the algebraic root
        let fam = DistributionFamily::singleton(gaussian_iid(0.0, 1.0).unwrap());
        let sched = k_schedule(&fam, 2).unwrap();
        assert!(sched.certified());
        for e in sched.entries() {
            let k0 = (u128::from(certification_constant(e.n)) << e.n).pow(3);
            assert!(e.k_n >= k0);
            assert!(e.k_n <= k0 + k0 / 1_000_000_000);
            assert_eq!(certification_holds(&fam, e.n, e.k_n), Some(true));
        }
    }

    #[test]
    fn schedule_certification_truncated_cauchy_grid() {
        let fam = truncated_cauchy_family(&[10.0, 100.0]).unwrap();
        let sched = k_schedule(&fam, 2).unwrap();
        assert!(sched.certified());
        for e in sched.entries() {
            assert_eq!(certification_holds(&fam, e.n, e.k_n), Some(true));
        }
    }

    #[test]
    fn schedule_needs_closed_form_tails() {
        let fam = DistributionFamily::singleton(standard_cauchy());
        match k_schedule(&fam, 1) {
            Err(Error::Uncertifiable(_)) => {}
            other => panic!("expected Uncertifiable, got {other:?}"),
        }
        let fam = DistributionFamily::singleton(rademacher_iid());
        assert!(k_schedule(&fam, 0).is_err());
        assert!(k_schedule(&fam, MAX_SCHEDULE_N + 1).is_err());
    }

    #[test]
    fn uncertified_schedules_validate() {
        assert!(KSchedule::uncertified(vec![], "x").is_err());
        assert!(KSchedule::uncertified(vec![(0, 5)], "x").is_err());
        assert!(KSchedule::uncertified(vec![(1, 0)], "x").is_err());
        let s = KSchedule::uncertified(vec![(1, 1), (2, 2), (3, 4)], "toy").unwrap();
        assert!(!s.certified());
        assert_eq!(s.entries().len(), 3);
    }

    #[test]
    fn witness_on_doubling_path_fires_all_toy_rules() {
        // x = +1, -2, +4, -8, ...: running means 1, -1/2, 1, -5/4, 11/5, ...
        // oscillate beyond +-1/3, so every toy rule fires.
        let sched = KSchedule::uncertified(vec![(1, 1), (2, 2), (3, 4)], "toy").unwrap();
        let witness = slln_witness(&sched).unwrap();
        let p = doubling_path(16).unwrap();
        let v = witness.values(&p);
        assert!((v.last().unwrap() - 3.0).abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));

        // independent replay of the three drift rules
        let mut fired = 0;
        for (n, k) in [(1u32, 1usize), (2, 2), (3, 4)] {
            let mut hit = false;
            for u in (k + 1)..=p.horizon() {
                if (p.mean_at(u) - p.mean_at(k)).abs() > 1.0 / f64::from(n) {
                    hit = true;
                    break;
                }
            }
            fired += i32::from(hit);
        }
        assert_eq!(fired, 3);
    }

    #[test]
    fn witness_is_zero_on_constant_paths_and_binary_on_singletons() {
        let sched = KSchedule::uncertified(vec![(1, 1), (2, 2)], "toy").unwrap();
        let witness = slln_witness(&sched).unwrap();
        let p = path(&[0.25; 30]);
        assert!(witness.values(&p).iter().all(|&x| x == 0.0));

        let single = KSchedule::uncertified(vec![(2, 3)], "toy").unwrap();
        let w = slln_witness(&single).unwrap();
        let p = doubling_path(12).unwrap();
        assert!(w.values(&p).iter().all(|&x| x == 0.0 || x == 1.0));
    }

    #[test]
    fn witness_stabilizes_on_cesaro_convergent_path() {
        // x_t = c + 1/t converges in Cesaro mean; the toy witness must stop
        // firing after some finite time within the horizon
        let c = 0.4;
        let values: Vec<f64> = (1..=400).map(|t| c + 1.0 / t as f64).collect();
        let p = SamplePath::new(values).unwrap();
        let sched = KSchedule::uncertified(vec![(1, 1), (2, 2), (3, 4)], "toy").unwrap();
        let v = slln_witness(&sched).unwrap().values(&p);
        let settle = v.len() / 2;
        assert_eq!(v[settle..], vec![v[settle]; v.len() - settle]);
    }

    #[test]
    fn coverage_logic_no_fire_implies_small_range() {
        // whenever tau_kn(k, n) does not fire by T, the post-k running-mean
        // range is at most 2/n, deterministically
        let member = gaussian_iid(0.0, 1.0).unwrap();
        let mut checked = 0;
        for rep in 0..300u64 {
            let p = member.sample_path(150, crate::mc::substream_rng(23, rep));
            for (k, n) in [(10u128, 1u32), (25, 2), (50, 1)] {
                let rule = tau_kn(k, n).unwrap();
                if hit_time(&rule, &p) == HitTime::NotHitByHorizon {
                    checked += 1;
                    let k = k as usize;
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for t in k..=p.horizon() {
                        let m = p.mean_at(t);
                        lo = lo.min(m);
                        hi = hi.max(m);
                    }
                    assert!(hi - lo <= 2.0 / f64::from(n) + 1e-15);
                }
            }
        }
        assert!(checked > 50, "want enough non-firing cases, got {checked}");
    }

    #[test]
    fn divergence_gap_examples() {
        assert_eq!(divergence_gap(&path(&[1.5; 40]), None).unwrap(), 0.0);

        // running means sweep from 1 down through -1 after burn-in
        let mut vals = vec![1.0];
        vals.extend(std::iter::repeat_n(-1.0, 59));
        let p = path(&vals);
        let gap = divergence_gap(&p, Some(1)).unwrap();
        assert!((gap - 2.0).abs() < 0.05, "gap {gap}");

        assert!(divergence_gap(&path(&[1.0; 10]), Some(6)).is_err());
    }

    #[test]
    fn doubling_path_is_what_it_says() {
        let p = doubling_path(5).unwrap();
        assert_eq!(p.values(), &[1.0, -2.0, 4.0, -8.0, 16.0]);
        assert!(doubling_path(1001).is_err());
    }
}
