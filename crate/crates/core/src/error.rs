use thiserror::Error;

/// Errors surfaced by the library.
///
/// Every constructor validates its inputs before any sampling or arithmetic
/// begins; `InvalidInput` names the offending argument in its message.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The corollary's condition `r(gamma^(1/3)) <= eps` (with `gamma^(1/3) >= 1`)
    /// failed; the bound is only stated for larger `gamma`.
    #[error(
        "requires larger gamma: {condition} (gamma^(1/3) = {k_cut}, r(gamma^(1/3)) = {r_at_cut}, eps = {epsilon})"
    )]
    RequiresLargerGamma {
        condition: &'static str,
        k_cut: f64,
        r_at_cut: f64,
        epsilon: f64,
    },

    /// The fixed-`k` mean bound's condition `r(k^(1/3)) <= eps` failed.
    #[error("requires larger k: r(k^(1/3)) = {r_at_cut} > eps = {epsilon} at k = {k}")]
    RequiresLargerK { k: u64, r_at_cut: f64, epsilon: f64 },

    /// Schedule certification needs a closed-form tail function for every
    /// family member; Monte Carlo tails cannot certify a supremum.
    #[error("uncertifiable: {0}")]
    Uncertifiable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

/// `x > 0` and finite (rejects NaN and infinities).
pub(crate) fn positive_finite(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

/// `x >= 0` and finite.
pub(crate) fn nonnegative_finite(x: f64) -> bool {
    x >= 0.0 && x.is_finite()
}
