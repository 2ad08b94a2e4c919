//! Closed-form line-crossing bounds for centered i.i.d. sums with a finite
//! first moment, driven by the tail function `r(K) = E[|X| 1{|X| > K}]`.

use crate::error::{Error, Result};
use crate::families::TailFunction;

/// A computed bound together with the inputs that produced it.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub bound_value: f64,
    pub epsilon: f64,
    /// `gamma` for the `sup_t |S_t|/(gamma+t)` bounds; for the fixed-`k`
    /// mean bound this records `k` (the bound is the auto bound at
    /// `gamma = k`).
    pub gamma: f64,
    /// Truncation level `K` entering `r(K)`.
    pub k_truncation: f64,
    pub r_of_k: f64,
    /// The event threshold the bound applies to: `eps + r(K)` for the raw
    /// bound, `2 eps` for the auto bound, `eps` for the fixed-`k` bound.
    pub event_threshold: f64,
    /// True when the bound is at or above one and therefore says nothing.
    pub vacuous: bool,
}

impl BoundReport {
    fn new(bound_value: f64, epsilon: f64, gamma: f64, k: f64, r: f64, threshold: f64) -> Self {
        BoundReport {
            bound_value,
            epsilon,
            gamma,
            k_truncation: k,
            r_of_k: r,
            event_threshold: threshold,
            vacuous: bound_value >= 1.0,
        }
    }
}

/// Classical line-crossing bound `1 / (1 + alpha beta)` on
/// `P(exists t: sum Y_s > beta + alpha K^2 t)` for centered i.i.d. `Y` with
/// variance at most `K^2`.
pub fn dubins_savage_bound(alpha: f64, beta: f64) -> Result<f64> {
    if !crate::error::positive_finite(alpha) || !crate::error::positive_finite(beta) {
        return Err(Error::invalid(format!(
            "dubins_savage_bound needs alpha, beta > 0, got ({alpha}, {beta})"
        )));
    }
    Ok(1.0 / (1.0 + alpha * beta))
}

/// First-moment line-crossing bound: for centered i.i.d. `X` and `K >= 1`,
///
/// ```text
/// P( sup_t |S_t| / (gamma + t) > eps + r(K) ) <= 8 K^2 / (gamma eps^2) + (16/eps^2 + 2) r(K).
/// ```
pub fn l1_bound(epsilon: f64, gamma: f64, k: f64, r_of_k: f64) -> Result<BoundReport> {
    if !crate::error::positive_finite(epsilon) {
        return Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !crate::error::positive_finite(gamma) {
        return Err(Error::invalid(format!("gamma must be > 0, got {gamma}")));
    }
    if k < 1.0 || k.is_nan() {
        return Err(Error::invalid(format!(
            "the bound requires K >= 1, got {k}"
        )));
    }
    if !crate::error::nonnegative_finite(r_of_k) {
        return Err(Error::invalid(format!("r(K) must be >= 0, got {r_of_k}")));
    }
    let e2 = epsilon * epsilon;
    let bound = 8.0 * k * k / (gamma * e2) + (16.0 / e2 + 2.0) * r_of_k;
    Ok(BoundReport::new(
        bound,
        epsilon,
        gamma,
        k,
        r_of_k,
        epsilon + r_of_k,
    ))
}

/// The bound specialized at `K = gamma^(1/3)`, against the `2 eps` threshold:
///
/// ```text
/// P( sup_t |S_t| / (gamma + t) > 2 eps ) <= 8/eps^2 gamma^(-1/3) + (16/eps^2 + 2) r(gamma^(1/3)),
/// ```
///
/// valid when `gamma^(1/3) >= 1` and `r(gamma^(1/3)) <= eps`.
pub fn l1_bound_auto(epsilon: f64, gamma: f64, tail: &TailFunction) -> Result<BoundReport> {
    if !crate::error::positive_finite(epsilon) {
        return Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !crate::error::positive_finite(gamma) {
        return Err(Error::invalid(format!("gamma must be > 0, got {gamma}")));
    }
    let k = gamma.cbrt();
    if k < 1.0 {
        return Err(Error::RequiresLargerGamma {
            condition: "gamma^(1/3) >= 1",
            k_cut: k,
            r_at_cut: f64::NAN,
            epsilon,
        });
    }
    let r = tail.r(k);
    if r > epsilon {
        return Err(Error::RequiresLargerGamma {
            condition: "r(gamma^(1/3)) <= eps",
            k_cut: k,
            r_at_cut: r,
            epsilon,
        });
    }
    let e2 = epsilon * epsilon;
    let bound = 8.0 / e2 / k + (16.0 / e2 + 2.0) * r;
    Ok(BoundReport::new(bound, epsilon, gamma, k, r, 2.0 * epsilon))
}

/// Fixed-sample mean bound: for `r(k^(1/3)) <= eps`,
///
/// ```text
/// P( |S_k| / k > eps ) <= 128/eps^2 k^(-1/3) + (256/eps^2 + 2) r(k^(1/3)).
/// ```
pub fn fixed_k_mean_bound(epsilon: f64, k: u64, tail: &TailFunction) -> Result<BoundReport> {
    if !crate::error::positive_finite(epsilon) {
        return Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let cut = (k as f64).cbrt();
    let r = tail.r(cut);
    if r > epsilon {
        return Err(Error::RequiresLargerK {
            k,
            r_at_cut: r,
            epsilon,
        });
    }
    let e2 = epsilon * epsilon;
    let bound = 128.0 / e2 / cut + (256.0 / e2 + 2.0) * r;
    Ok(BoundReport::new(bound, epsilon, k as f64, cut, r, epsilon))
}
