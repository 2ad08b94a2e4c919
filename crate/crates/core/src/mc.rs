//! Replicated Monte Carlo harness: crossing probabilities, stopped
//! expectations, Ville and e-process verification, grid bounds.
//!
//! Determinism contract: every estimate is a pure function of the job
//! parameters and the seed. Replicate `i` draws from substream `i` of a
//! ChaCha8 generator seeded with the job seed, replicates are collected in
//! index order, and reduction is sequential compensated summation — so the
//! result is bitwise identical for any rayon worker count.
//!
//! Horizon truncation: every `P(tau < infinity)` is reported as
//! `P(tau <= T)`, an *underestimate* of the infinite-horizon probability;
//! reports carry `T` so consumers can account for it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evidence::EvidenceProcess;
use crate::families::{DistributionFamily, FamilyMember};
use crate::paths::{hit_time, HitTime, PathAccumulator, StoppingRule};

/// Documented default seed for reproducible runs (never time-based).
pub const DEFAULT_SEED: u64 = 1939;

/// The RNG substream for one replicate: stream `replicate` of a ChaCha8
/// generator seeded with `seed`.
pub fn substream_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// What an [`McEstimate`] estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    /// Frequency of an event, with binomial standard error.
    CrossingFreq,
    /// Mean of a stopped value, with standard error `sd / sqrt(n)`.
    StoppedMean,
}

impl EstimateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateKind::CrossingFreq => "CROSSING-FREQ",
            EstimateKind::StoppedMean => "STOPPED-MEAN",
        }
    }
}

/// A Monte Carlo point estimate with its provenance.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_paths: u64,
    pub horizon: u64,
    pub seed: u64,
    pub kind: EstimateKind,
}

/// One verification row: an estimate against an optional bound.
#[derive(Debug, Clone)]
pub struct ReportRow {
    /// Family member label.
    pub member: String,
    /// Rule or process label.
    pub subject: String,
    pub estimate: McEstimate,
    pub bound: Option<f64>,
    /// `value > bound + 3 * stderr` (always false when there is no bound).
    pub violated: bool,
}

/// A batch of verification rows plus an echo of the job configuration.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub rows: Vec<ReportRow>,
    pub config_echo: String,
}

impl VerificationReport {
    pub fn any_violation(&self) -> bool {
        self.rows.iter().any(|r| r.violated)
    }
}

/// Runs `n_paths` independent replicates in parallel and returns their
/// results in replicate order.
pub fn run_replicates<T, F>(n_paths: u64, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, ChaCha8Rng) -> T + Sync,
{
    if n_paths == 0 {
        return Err(Error::invalid("n_paths must be at least 1"));
    }
    Ok((0..n_paths)
        .into_par_iter()
        .map(|rep| f(rep, substream_rng(seed, rep)))
        .collect())
}

/// Kahan-Neumaier compensated sum; order-sensitive inputs are always fed in
/// replicate order, so the result does not depend on the worker count.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn crossing_freq_estimate(hits: u64, n_paths: u64, horizon: u64, seed: u64) -> McEstimate {
    let n = n_paths as f64;
    let p = hits as f64 / n;
    McEstimate {
        value: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        n_paths,
        horizon,
        seed,
        kind: EstimateKind::CrossingFreq,
    }
}

fn stopped_mean_estimate(values: &[f64], horizon: u64, seed: u64) -> McEstimate {
    let n = values.len() as f64;
    let mean = neumaier_sum(values.iter().copied()) / n;
    let var = if values.len() > 1 {
        neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0)
    } else {
        0.0
    };
    McEstimate {
        value: mean,
        stderr: (var.max(0.0) / n).sqrt(),
        n_paths: values.len() as u64,
        horizon,
        seed,
        kind: EstimateKind::StoppedMean,
    }
}

fn hit_within_horizon(
    member: &FamilyMember,
    rule: &StoppingRule,
    horizon: usize,
    rng: ChaCha8Rng,
) -> bool {
    if rule.supports_streaming() {
        // single pass with early exit at the first STOP
        let mut acc = PathAccumulator::with_capacity(horizon.min(1 << 20));
        let mut stream = member.stream(rng);
        for _ in 0..horizon {
            acc.push(stream.next().expect("streams are infinite"));
            if rule
                .decide_view(&acc.view())
                .expect("streaming support was checked")
            {
                return true;
            }
        }
        false
    } else {
        let path = member.sample_path(horizon, rng);
        hit_time(rule, &path).is_hit()
    }
}

/// Frequency of `hit_time <= horizon` for one member, with binomial SE.
///
/// This estimates `P(tau <= T)`, a lower bound on `P(tau < infinity)`.
pub fn estimate_stop_prob(
    member: &FamilyMember,
    rule: &StoppingRule,
    horizon: usize,
    n_paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n_paths < 100 {
        return Err(Error::invalid("estimate_stop_prob needs n_paths >= 100"));
    }
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let hits = run_replicates(n_paths, seed, |_, rng| {
        hit_within_horizon(member, rule, horizon, rng)
    })?;
    let count = hits.iter().filter(|&&h| h).count() as u64;
    Ok(crossing_freq_estimate(count, n_paths, horizon as u64, seed))
}

/// Per-member stop probabilities plus their maximum over the grid.
///
/// The final `grid-max` row is (a) a lower bound on
/// `sup_P P(tau < infinity)` over the grid and (b) by itself neither an
/// upper nor a lower bound on the inverse-capital measure of the covered
/// event; coverage `A` within `{tau < infinity}` is the caller's analytic
/// assertion.
pub fn mu_star_grid_bound(
    family: &DistributionFamily,
    rule: &StoppingRule,
    horizon: usize,
    n_paths: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rows = Vec::with_capacity(family.members().len() + 1);
    for member in family.members() {
        let estimate = estimate_stop_prob(member, rule, horizon, n_paths, seed)?;
        rows.push(ReportRow {
            member: member.label().to_owned(),
            subject: rule.description().to_owned(),
            estimate,
            bound: None,
            violated: false,
        });
    }
    let best = rows
        .iter()
        .max_by(|a, b| a.estimate.value.total_cmp(&b.estimate.value))
        .expect("family is nonempty");
    rows.push(ReportRow {
        member: "grid-max".to_owned(),
        subject: rule.description().to_owned(),
        estimate: best.estimate.clone(),
        bound: None,
        violated: false,
    });
    Ok(VerificationReport {
        rows,
        config_echo: format!(
            "mu-star family={} rule={} horizon={horizon} n_paths={n_paths} seed={seed}",
            family.label(),
            rule.description()
        ),
    })
}

/// Frequency of `sup_{t <= T} E_t >= 1/alpha` under one member, checked
/// against the bound `alpha`.
///
/// The caller asserts that `process` is an e-process for a class containing
/// `member`; a frequency exceeding `alpha + 3 SE` flags the row as violated.
pub fn ville_check(
    process: &EvidenceProcess,
    member: &FamilyMember,
    alpha: f64,
    horizon: usize,
    n_paths: u64,
    seed: u64,
) -> Result<VerificationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must be in (0,1), got {alpha}")));
    }
    if n_paths == 0 {
        return Err(Error::invalid("n_paths must be at least 1"));
    }
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let log_threshold = -alpha.ln(); // log(1/alpha)
    let crossings = run_replicates(n_paths, seed, |_, rng| {
        let path = member.sample_path(horizon, rng);
        process
            .log_values(&path)
            .iter()
            .any(|&lv| lv >= log_threshold)
    })?;
    let count = crossings.iter().filter(|&&c| c).count() as u64;
    let estimate = crossing_freq_estimate(count, n_paths, horizon as u64, seed);
    let violated = estimate.value > alpha + 3.0 * estimate.stderr;
    Ok(VerificationReport {
        rows: vec![ReportRow {
            member: member.label().to_owned(),
            subject: process.label().to_owned(),
            estimate,
            bound: Some(alpha),
            violated,
        }],
        config_echo: format!(
            "ville process={} member={} alpha={alpha} horizon={horizon} n_paths={n_paths} seed={seed}",
            process.label(),
            member.label()
        ),
    })
}

/// Stopped-mean check of the e-process property: for each member and rule,
/// estimates `E[E_{tau ^ T}]` and flags rows with mean above `1 + 3 SE`.
///
/// `E_infinity` is replaced by `E_T`; for a nondecreasing process the stopped
/// mean at `T` lower-bounds the limit, so include the fixed rule `t = T`
/// (the default CLI rule set does) and read its row as the terminal-value
/// mean rather than a proof of the `<= 1` property at infinity.
pub fn eprocess_check(
    process: &EvidenceProcess,
    rules: &[StoppingRule],
    family: &DistributionFamily,
    horizon: usize,
    n_paths: u64,
    seed: u64,
) -> Result<VerificationReport> {
    if rules.is_empty() {
        return Err(Error::invalid("eprocess_check needs at least one rule"));
    }
    if n_paths == 0 {
        return Err(Error::invalid("n_paths must be at least 1"));
    }
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let mut rows = Vec::with_capacity(family.members().len() * rules.len());
    for member in family.members() {
        // one sampling pass per member; every rule is evaluated on the same path
        let per_replicate: Vec<Vec<f64>> = run_replicates(n_paths, seed, |_, rng| {
            let path = member.sample_path(horizon, rng);
            let logs = process.log_values(&path);
            rules
                .iter()
                .map(|rule| {
                    let stopped_t = match hit_time(rule, &path) {
                        HitTime::Hit(t) => t,
                        HitTime::NotHitByHorizon => horizon,
                    };
                    logs[stopped_t].exp()
                })
                .collect()
        })?;
        for (j, rule) in rules.iter().enumerate() {
            let values: Vec<f64> = per_replicate.iter().map(|reps| reps[j]).collect();
            let estimate = stopped_mean_estimate(&values, horizon as u64, seed);
            let violated = estimate.value > 1.0 + 3.0 * estimate.stderr;
            rows.push(ReportRow {
                member: member.label().to_owned(),
                subject: format!("{} @ {}", process.label(), rule.description()),
                estimate,
                bound: Some(1.0),
                violated,
            });
        }
    }
    Ok(VerificationReport {
        rows,
        config_echo: format!(
            "eprocess process={} family={} horizon={horizon} n_paths={n_paths} seed={seed}",
            process.label(),
            family.label()
        ),
    })
}

/// Frequency of a `+/-1` random walk ever crossing the line
/// `beta + slope * t` up to the horizon:
/// `P(exists t <= T: S_t > beta + slope t)` (or `|S_t| > ...` two-sided).
///
/// Specialized estimator: increments come 64 per ChaCha word, and blocks
/// that provably cannot reach the line (|S| can move by at most 64 while the
/// line is nondecreasing) are skipped via popcount. Used for the line-cross
/// validation grids where `T = 10 gamma` makes the generic path sampler too
/// slow.
pub fn rademacher_line_crossing_freq(
    intercept: f64,
    slope: f64,
    two_sided: bool,
    horizon: u64,
    n_paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !crate::error::positive_finite(intercept) {
        return Err(Error::invalid("line intercept must be positive"));
    }
    if !crate::error::nonnegative_finite(slope) {
        return Err(Error::invalid("line slope must be nonnegative"));
    }
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let crossings = run_replicates(n_paths, seed, |_, mut rng| {
        walk_crosses_line(&mut rng, intercept, slope, two_sided, horizon)
    })?;
    let count = crossings.iter().filter(|&&c| c).count() as u64;
    Ok(crossing_freq_estimate(count, n_paths, horizon, seed))
}

fn walk_crosses_line(
    rng: &mut ChaCha8Rng,
    intercept: f64,
    slope: f64,
    two_sided: bool,
    horizon: u64,
) -> bool {
    let mut s: i64 = 0;
    let mut t: u64 = 0;
    while t < horizon {
        let steps = (horizon - t).min(64) as u32;
        let word = rng.next_u64();
        let mask = if steps == 64 {
            u64::MAX
        } else {
            (1u64 << steps) - 1
        };
        // The line is nondecreasing in t and |S| moves by at most `steps`
        // within the block, so the block cannot cross if even the extreme
        // excursion stays at or below the line's minimum over the block.
        let extreme = if two_sided { s.abs() } else { s } as f64 + f64::from(steps);
        if extreme <= intercept + slope * (t + 1) as f64 {
            let ones = i64::from((word & mask).count_ones());
            s += 2 * ones - i64::from(steps);
            t += u64::from(steps);
            continue;
        }
        for b in 0..steps {
            s += if (word >> b) & 1 == 1 { 1 } else { -1 };
            t += 1;
            let level = if two_sided { s.abs() } else { s } as f64;
            if level > intercept + slope * t as f64 {
                return true;
            }
        }
    }
    false
}
