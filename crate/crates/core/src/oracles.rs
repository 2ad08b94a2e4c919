//! Exact and extended-precision oracles for the quantities that admit
//! non-Monte-Carlo computation, plus the exact-vs-MC cross-check.

use crate::error::{Error, Result};
use crate::mc::McEstimate;

/// An exactly computed probability with an explicit truncation bound.
#[derive(Debug, Clone)]
pub struct ExactProbability {
    pub value: f64,
    /// Rigorous bound on the truncation error; zero for fully exact values.
    pub error_bound: f64,
    pub method: String,
}

/// Probability that the one-shot rule "stop at time `m` iff the first `m`
/// symbols are all zero" stops under the two-atom law `P_n`:
/// `1` when `n >= m` (both atoms have `m` leading zeros), else `1/2`.
pub fn binary_pn_stop_prob(m: u32, n: u32) -> Result<ExactProbability> {
    if m == 0 {
        return Err(Error::invalid("binary_pn_stop_prob needs m >= 1"));
    }
    Ok(ExactProbability {
        value: if n >= m { 1.0 } else { 0.5 },
        error_bound: 0.0,
        method: "two-atom case analysis".to_owned(),
    })
}

/// Probability that the first-one rule ever stops under `P_n`: exactly `1/2`
/// for every `n` (only the single-one atom contains a one, at time `n + 1`).
pub fn binary_first_one_prob(_n: u32) -> ExactProbability {
    ExactProbability {
        value: 0.5,
        error_bound: 0.0,
        method: "two-atom case analysis".to_owned(),
    }
}

/// `P_i(tau_n < infinity)` for the two-coin construction, where `tau_n` is
/// the first time `n` ones have been observed, with flips truncated at
/// `t_trunc`.
///
/// The fair branch fires almost surely; the decaying branch contributes the
/// Poisson-binomial probability of at least `n` successes among independent
/// `Bernoulli(2^-t)`, `t = 2..=t_trunc`:
///
/// ```text
/// value = 1/2 + 1/2 P(count >= n),
/// ```
///
/// with truncation error at most `sum_{t > t_trunc} 2^-t = 2^-t_trunc` (the
/// union bound on any success beyond the truncation).
pub fn two_coin_tau_n_prob(i: u8, n: u32, t_trunc: u32) -> Result<ExactProbability> {
    if i != 1 && i != 2 {
        return Err(Error::invalid(format!("i must be 1 or 2, got {i}")));
    }
    if n == 0 {
        return Err(Error::invalid("two_coin_tau_n_prob needs n >= 1"));
    }
    if t_trunc < n + 1 {
        return Err(Error::invalid(format!(
            "t_trunc = {t_trunc} too small, need at least n + 1 = {}",
            n + 1
        )));
    }
    let p_at_least_n = poisson_binomial_tail_decay(n, t_trunc);
    Ok(ExactProbability {
        value: 0.5 + 0.5 * p_at_least_n,
        error_bound: 0.5_f64.powi(t_trunc as i32),
        method: "poisson-binomial dp".to_owned(),
    })
}

/// `P(count >= n)` for independent `Bernoulli(2^-t)`, `t = 2..=t_trunc`,
/// by dynamic programming over the count with an absorbing `>= n` bucket.
fn poisson_binomial_tail_decay(n: u32, t_trunc: u32) -> f64 {
    let cap = n as usize;
    let mut probs = vec![0.0_f64; cap + 1];
    probs[0] = 1.0;
    let mut p = 0.5;
    for _t in 2..=t_trunc {
        p *= 0.5; // 2^-t
        probs[cap] += probs[cap - 1] * p;
        for j in (1..cap).rev() {
            probs[j] = probs[j] * (1.0 - p) + probs[j - 1] * p;
        }
        probs[0] *= 1.0 - p;
    }
    probs[cap]
}

/// Outcome of comparing an exact value against a Monte Carlo estimate.
#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub pass: bool,
    /// `|exact - estimate|`.
    pub discrepancy: f64,
    /// `error_bound + 3 * stderr`.
    pub tolerance: f64,
}

/// Pass iff `|exact.value - estimate.value| <= exact.error_bound + 3 stderr`.
/// Both inputs must refer to the same event; that is the caller's contract.
pub fn mc_crosscheck(exact: &ExactProbability, estimate: &McEstimate) -> CrossCheck {
    let discrepancy = (exact.value - estimate.value).abs();
    let tolerance = exact.error_bound + 3.0 * estimate.stderr;
    CrossCheck {
        pass: discrepancy <= tolerance,
        discrepancy,
        tolerance,
    }
}
