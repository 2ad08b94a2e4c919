//! Sample paths, adapted evaluation, stopping rules and rule combinators.
//!
//! Observations are indexed from 1 (`x_1..x_T`); derived process values are
//! indexed from 0. Infinite time is replaced by the finite horizon `T`
//! everywhere: a rule that has not fired by `T` reports
//! [`HitTime::NotHitByHorizon`], which means "not yet", so any frequency of
//! finite hits computed from it *under*-estimates the infinite-horizon
//! probability.
//!
//! Adaptedness is structural: a rule's decision procedure only ever receives
//! a [`PathView`], which exposes the prefix `x_1..x_t` and nothing beyond it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evidence::EvidenceProcess;

/// A finite observation prefix `x_1..x_T` with precomputed running sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    values: Vec<f64>,
    cumsum: Vec<f64>,
}

impl SamplePath {
    /// Builds a path from raw observations. Every value must be finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "sample path contains a non-finite value: {bad}"
            )));
        }
        let mut cumsum = Vec::with_capacity(values.len());
        let mut s = 0.0;
        for &x in &values {
            s += x;
            cumsum.push(s);
        }
        Ok(SamplePath { values, cumsum })
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Running sum `S_t = x_1 + ... + x_t`; `S_0 = 0`.
    pub fn sum_at(&self, t: usize) -> f64 {
        assert!(t <= self.horizon(), "t={t} beyond horizon");
        if t == 0 {
            0.0
        } else {
            self.cumsum[t - 1]
        }
    }

    /// Running mean `S_t / t` for `1 <= t <= T`.
    pub fn mean_at(&self, t: usize) -> f64 {
        assert!(t >= 1 && t <= self.horizon(), "t={t} out of range");
        self.cumsum[t - 1] / t as f64
    }

    /// The adapted view of the prefix `x_1..x_t`.
    pub fn view_at(&self, t: usize) -> PathView<'_> {
        assert!(t >= 1 && t <= self.horizon(), "t={t} out of range");
        PathView {
            values: &self.values[..t],
            cumsum: &self.cumsum[..t],
        }
    }
}

/// Incrementally grown path used by streaming evaluators.
#[derive(Debug, Default)]
pub(crate) struct PathAccumulator {
    values: Vec<f64>,
    cumsum: Vec<f64>,
}

impl PathAccumulator {
    pub(crate) fn with_capacity(n: usize) -> Self {
        PathAccumulator {
            values: Vec::with_capacity(n),
            cumsum: Vec::with_capacity(n),
        }
    }

    pub(crate) fn push(&mut self, x: f64) {
        let s = self.cumsum.last().copied().unwrap_or(0.0) + x;
        self.values.push(x);
        self.cumsum.push(s);
    }

    pub(crate) fn view(&self) -> PathView<'_> {
        PathView {
            values: &self.values,
            cumsum: &self.cumsum,
        }
    }
}

/// Read-only window onto a path prefix `x_1..x_t`.
///
/// Decision procedures receive exactly this; there is no way to look at
/// `x_{t+1}..x_T` through it.
#[derive(Debug, Clone, Copy)]
pub struct PathView<'a> {
    values: &'a [f64],
    cumsum: &'a [f64],
}

impl<'a> PathView<'a> {
    /// Current time `t` (number of observations seen).
    pub fn t(&self) -> usize {
        self.values.len()
    }

    /// Latest observation `x_t`.
    pub fn last(&self) -> f64 {
        *self.values.last().expect("view over empty prefix")
    }

    /// `S_t`.
    pub fn sum(&self) -> f64 {
        self.cumsum.last().copied().unwrap_or(0.0)
    }

    /// `S_t / t`.
    pub fn mean(&self) -> f64 {
        self.sum() / self.t() as f64
    }

    /// `S_s` for `0 <= s <= t`.
    pub fn sum_at(&self, s: usize) -> f64 {
        assert!(s <= self.t(), "s={s} beyond prefix");
        if s == 0 {
            0.0
        } else {
            self.cumsum[s - 1]
        }
    }

    /// `S_s / s` for `1 <= s <= t`.
    pub fn mean_at(&self, s: usize) -> f64 {
        assert!(s >= 1 && s <= self.t(), "s={s} out of range");
        self.cumsum[s - 1] / s as f64
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }
}

/// The outcome of one adapted decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Stop,
    Continue,
}

/// Hit time of a stopping rule on a finite path.
///
/// `NotHitByHorizon` means "tau > T": it only certifies that the rule has not
/// fired *yet*, so `P(tau <= T)` computed from hit times lower-bounds
/// `P(tau < infinity)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HitTime {
    /// Fired at time `t`, `1 <= t <= T`.
    Hit(usize),
    /// Did not fire within the horizon.
    NotHitByHorizon,
}

impl HitTime {
    pub fn is_hit(self) -> bool {
        matches!(self, HitTime::Hit(_))
    }

    pub fn time(self) -> Option<usize> {
        match self {
            HitTime::Hit(t) => Some(t),
            HitTime::NotHitByHorizon => None,
        }
    }

    /// True when the rule has fired at or before `t`.
    pub fn hit_by(self, t: usize) -> bool {
        matches!(self, HitTime::Hit(h) if h <= t)
    }
}

type DecideFn = Arc<dyn Fn(&PathView<'_>) -> bool + Send + Sync>;

#[derive(Clone)]
enum RuleKind {
    /// Decision from the current prefix's summary statistics.
    Pointwise(DecideFn),
    /// First crossing of an evidence process over a level (log-domain compare).
    LevelCrossing {
        process: EvidenceProcess,
        log_level: f64,
    },
    /// Fires as soon as any constituent fires.
    MinOf(Vec<StoppingRule>),
}

/// An adapted stop/continue decision procedure with first-hit semantics.
#[derive(Clone)]
pub struct StoppingRule {
    description: String,
    kind: RuleKind,
}

impl std::fmt::Debug for StoppingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StoppingRule")
            .field("description", &self.description)
            .finish()
    }
}

impl StoppingRule {
    /// Wraps an arbitrary adapted decision procedure.
    pub fn from_fn(
        description: impl Into<String>,
        decide: impl Fn(&PathView<'_>) -> bool + Send + Sync + 'static,
    ) -> Self {
        StoppingRule {
            description: description.into(),
            kind: RuleKind::Pointwise(Arc::new(decide)),
        }
    }

    /// Stops at `t = 1` unconditionally.
    pub fn always() -> Self {
        Self::from_fn("always", |_| true)
    }

    /// Never stops.
    pub fn never() -> Self {
        Self::from_fn("never", |_| false)
    }

    /// Stops the first time `x_t == 1`.
    pub fn first_one() -> Self {
        Self::from_fn("first-one", |v| v.last() == 1.0)
    }

    /// Stops the first time `n` ones have been observed (binary paths).
    pub fn count_ones(n: u32) -> Self {
        Self::from_fn(format!("ones-count(n={n})"), move |v| {
            v.sum() >= f64::from(n)
        })
    }

    /// One-shot rule: stops at time `m` iff the first `m` symbols are all zero.
    pub fn leading_zeros(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("leading-zeros rule needs m >= 1"));
        }
        Ok(Self::from_fn(format!("leading-zeros(m={m})"), move |v| {
            v.t() == m && v.values().iter().all(|&x| x == 0.0)
        }))
    }

    /// Stops at the fixed time `t0`.
    pub fn fixed_time(t0: usize) -> Result<Self> {
        if t0 == 0 {
            return Err(Error::invalid("fixed-time rule needs t >= 1"));
        }
        Ok(Self::from_fn(format!("fixed(t={t0})"), move |v| {
            v.t() == t0
        }))
    }

    /// Stops at the first `t >= start` with `|running mean| > threshold`.
    pub fn abs_mean_above(threshold: f64, start: usize) -> Result<Self> {
        if !crate::error::nonnegative_finite(threshold) {
            return Err(Error::invalid("abs-mean threshold must be finite and >= 0"));
        }
        let start = start.max(1);
        Ok(Self::from_fn(
            format!("abs-mean-above(threshold={threshold},start={start})"),
            move |v| v.t() >= start && v.mean().abs() > threshold,
        ))
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// The adapted decision on a prefix: would this rule declare STOP at
    /// time `t = prefix.len()`?
    pub fn decide(&self, prefix: &[f64]) -> Result<Decision> {
        let path = SamplePath::new(prefix.to_vec())?;
        if path.horizon() == 0 {
            return Err(Error::invalid("decide needs a nonempty prefix"));
        }
        let stop = self.decide_at(&path, path.horizon());
        Ok(if stop { Decision::Stop } else { Decision::Continue })
    }

    fn decide_at(&self, path: &SamplePath, t: usize) -> bool {
        match &self.kind {
            RuleKind::Pointwise(f) => f(&path.view_at(t)),
            RuleKind::LevelCrossing { process, log_level } => {
                let prefix = SamplePath::new(path.values()[..t].to_vec())
                    .expect("prefix of a valid path is valid");
                process.log_values(&prefix)[t] >= *log_level
            }
            RuleKind::MinOf(rules) => rules.iter().any(|r| r.decide_at(path, t)),
        }
    }

    /// Streaming decision; `None` when this rule cannot be evaluated from a
    /// growing prefix alone (level-crossing rules need the whole-path pass).
    pub(crate) fn decide_view(&self, view: &PathView<'_>) -> Option<bool> {
        match &self.kind {
            RuleKind::Pointwise(f) => Some(f(view)),
            RuleKind::LevelCrossing { .. } => None,
            RuleKind::MinOf(rules) => {
                let mut any = false;
                for r in rules {
                    any = any || r.decide_view(view)?;
                }
                Some(any)
            }
        }
    }

    pub(crate) fn supports_streaming(&self) -> bool {
        match &self.kind {
            RuleKind::Pointwise(_) => true,
            RuleKind::LevelCrossing { .. } => false,
            RuleKind::MinOf(rules) => rules.iter().all(StoppingRule::supports_streaming),
        }
    }
}

/// First `t` with STOP, else [`HitTime::NotHitByHorizon`]. Pure and
/// idempotent: the same rule and path always yield the same hit time.
pub fn hit_time(rule: &StoppingRule, path: &SamplePath) -> HitTime {
    match &rule.kind {
        RuleKind::Pointwise(f) => {
            for t in 1..=path.horizon() {
                if f(&path.view_at(t)) {
                    return HitTime::Hit(t);
                }
            }
            HitTime::NotHitByHorizon
        }
        RuleKind::LevelCrossing { process, log_level } => {
            let logs = process.log_values(path);
            logs.iter()
                .enumerate()
                .skip(1)
                .find(|(_, lv)| **lv >= *log_level)
                .map_or(HitTime::NotHitByHorizon, |(t, _)| HitTime::Hit(t))
        }
        RuleKind::MinOf(rules) => rules
            .iter()
            .map(|r| hit_time(r, path))
            .min()
            .unwrap_or(HitTime::NotHitByHorizon),
    }
}

/// Pointwise minimum of the constituent hit times, as a rule.
pub fn min_rule(rules: Vec<StoppingRule>) -> Result<StoppingRule> {
    if rules.is_empty() {
        return Err(Error::invalid("min_rule needs a nonempty rule list"));
    }
    let description = format!(
        "min({})",
        rules
            .iter()
            .map(StoppingRule::description)
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(StoppingRule {
        description,
        kind: RuleKind::MinOf(rules),
    })
}

/// Stops at the first `t >= 1` with `E_t >= level`; the comparison happens in
/// log-domain (`log E_t >= log level`), with exact `>=` and no tolerance.
pub fn level_rule(process: EvidenceProcess, level: f64) -> Result<StoppingRule> {
    if !crate::error::positive_finite(level) {
        return Err(Error::invalid(format!(
            "level_rule needs a positive finite level, got {level}"
        )));
    }
    Ok(StoppingRule {
        description: format!("level({} >= {level})", process.label()),
        kind: RuleKind::LevelCrossing {
            process,
            log_level: level.ln(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::EvidenceProcess;

    fn path(vals: &[f64]) -> SamplePath {
        SamplePath::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_finite_values() {
        assert!(SamplePath::new(vec![0.0, f64::NAN]).is_err());
        assert!(SamplePath::new(vec![f64::INFINITY]).is_err());
        assert!(SamplePath::new(vec![]).is_ok());
    }

    #[test]
    fn running_sums_and_means() {
        let p = path(&[1.0, 2.0, -3.0]);
        assert_eq!(p.sum_at(0), 0.0);
        assert_eq!(p.sum_at(2), 3.0);
        assert_eq!(p.sum_at(3), 0.0);
        assert_eq!(p.mean_at(2), 1.5);
    }

    #[test]
    fn hit_time_first_hit_semantics() {
        let rule = StoppingRule::first_one();
        assert_eq!(
            hit_time(&rule, &path(&[0.0, 0.0, 1.0, 0.0])),
            HitTime::Hit(3)
        );
        assert_eq!(
            hit_time(&rule, &path(&[0.0, 0.0, 0.0, 0.0])),
            HitTime::NotHitByHorizon
        );
        // first hit even with later ones present
        assert_eq!(
            hit_time(&rule, &path(&[0.0, 1.0, 1.0])),
            HitTime::Hit(2)
        );
    }

    #[test]
    fn leading_zeros_matches_spec_example() {
        let rule = StoppingRule::leading_zeros(2).unwrap();
        assert_eq!(hit_time(&rule, &path(&[0.0, 0.0, 1.0])), HitTime::Hit(2));
        assert_eq!(
            hit_time(&rule, &path(&[0.0, 1.0, 0.0])),
            HitTime::NotHitByHorizon
        );
        assert!(StoppingRule::leading_zeros(0).is_err());
    }

    #[test]
    fn min_rule_takes_minimum_hit_time() {
        let hit5 = StoppingRule::fixed_time(5).unwrap();
        let hit3 = StoppingRule::fixed_time(3).unwrap();
        let never = StoppingRule::never();
        let p = path(&[0.0; 8]);

        let m = min_rule(vec![hit5.clone(), hit3.clone(), never.clone()]).unwrap();
        assert_eq!(hit_time(&m, &p), HitTime::Hit(3));

        let single = min_rule(vec![hit5.clone()]).unwrap();
        assert_eq!(hit_time(&single, &p), hit_time(&hit5, &p));

        let none = min_rule(vec![never.clone(), StoppingRule::never()]).unwrap();
        assert_eq!(hit_time(&none, &p), HitTime::NotHitByHorizon);

        assert!(min_rule(vec![]).is_err());
    }

    #[test]
    fn hit_time_ordering_treats_not_hit_as_infinity() {
        assert!(HitTime::Hit(999) < HitTime::NotHitByHorizon);
        assert!(HitTime::Hit(2) < HitTime::Hit(3));
    }

    #[test]
    fn level_rule_examples() {
        // process with values (0.5, 1.2, 3.0) at t=1..3
        let proc = EvidenceProcess::from_log_values_fn("step", |p| {
            let vals = [0.5_f64, 1.2, 3.0];
            (0..=p.horizon())
                .map(|t| if t == 0 { 0.0 } else { vals[t - 1].ln() })
                .collect()
        });
        let p = path(&[0.0, 0.0, 0.0]);
        let r2 = level_rule(proc.clone(), 2.0).unwrap();
        assert_eq!(hit_time(&r2, &p), HitTime::Hit(3));
        let r01 = level_rule(proc, 0.1).unwrap();
        assert_eq!(hit_time(&r01, &p), HitTime::Hit(1));
        assert!(level_rule(EvidenceProcess::constant(1.0), 0.0).is_err());
        assert!(level_rule(EvidenceProcess::constant(1.0), -1.0).is_err());
    }

    #[test]
    fn level_rule_on_indicator_witness_jumps() {
        // witness with jumps at {2, 5}: step function 0,0,1,1,1,2 -> level 2 hit at 5
        let rules = vec![
            StoppingRule::fixed_time(2).unwrap(),
            StoppingRule::fixed_time(5).unwrap(),
        ];
        let witness = EvidenceProcess::indicator_witness(rules).unwrap();
        let p = path(&[0.0; 6]);
        let r = level_rule(witness, 2.0).unwrap();
        assert_eq!(hit_time(&r, &p), HitTime::Hit(5));
    }

    #[test]
    fn decide_is_prefix_only() {
        let rule = StoppingRule::abs_mean_above(0.5, 1).unwrap();
        assert_eq!(rule.decide(&[0.9]).unwrap(), Decision::Stop);
        assert_eq!(rule.decide(&[0.2, 0.2]).unwrap(), Decision::Continue);
        assert!(rule.decide(&[]).is_err());
    }

    #[test]
    fn count_ones_hits_when_nth_one_arrives() {
        let rule = StoppingRule::count_ones(2);
        assert_eq!(
            hit_time(&rule, &path(&[1.0, 0.0, 1.0, 1.0])),
            HitTime::Hit(3)
        );
        assert_eq!(
            hit_time(&rule, &path(&[1.0, 0.0, 0.0])),
            HitTime::NotHitByHorizon
        );
    }
}
