//! Constructive toolkit for anytime-valid sequential testing: stopping
//! rules, evidence (e-)processes and supermartingale mixtures in log-domain,
//! first-moment line-crossing bounds, a composite law-of-large-numbers
//! detector, exact oracles for the analytically tractable examples, and a
//! deterministic replicated Monte Carlo harness that checks every claim the
//! harness can reach at desk scale.
//!
//! Conventions used throughout:
//!
//! - observations are `x_1..x_T`, process values `E_0..E_T`;
//! - all evidence values live in log-domain, `-inf` encoding zero;
//! - infinite time is truncated at the horizon `T`, and every reported
//!   `P(tau < infinity)` is really `P(tau <= T)`, an underestimate;
//! - family suprema are grid suprema over finitely many members;
//! - Monte Carlo results are pure functions of `(job, seed)` for any worker
//!   count.

pub mod error;
pub mod evidence;
pub mod families;
pub mod linecross;
pub mod mc;
pub mod normal;
pub mod oracles;
pub mod paths;
pub mod slln;

pub use error::{Error, Result};
