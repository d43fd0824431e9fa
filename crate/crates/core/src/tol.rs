//! Numerical tolerances shared across the crate.
//!
//! All values are absolute unless the name says otherwise; the relative ones
//! are scaled by the largest coefficient or entry magnitude at the call site.

/// Margin keeping points and strictly contractive parameters inside the disc.
pub const DISC: f64 = 1e-9;
/// Allowed deviation of a unimodular constant from the unit circle.
pub const UNIT: f64 = 1e-9;
/// Smallest admissible denominator / pivot modulus.
pub const POLE: f64 = 1e-12;
/// Sampled inner-function check.
pub const INNER: f64 = 1e-9;
/// Round-trip comparisons of Schur parameters and Markov parameters.
pub const ROUND: f64 = 1e-8;
/// Relative coefficient trimming threshold for polynomials.
pub const TRIM: f64 = 1e-11;
/// Unitarity residual `max(|U*U - I|, |UU* - I|)`.
pub const UNITARY: f64 = 1e-10;
/// Energy balance in time-domain simulation.
pub const ENERGY: f64 = 1e-10;
/// Intertwining residual accepted from the equivalence finder.
pub const EQUIV: f64 = 1e-9;
/// Structural zeros of Hessenberg forms, relative to the largest entry.
pub const STRUCT: f64 = 1e-12;
/// Equal-norm condition for row matching.
pub const NORM: f64 = 1e-9;
/// Minimal pairwise distance between Blaschke zeros for the kernel model.
pub const SEPARATION: f64 = 1e-4;
/// Feedback loop `1 - a22 * alpha` must stay away from zero by this much.
pub const FEEDBACK: f64 = 1e-12;
/// Relative factor of the singular-value rank threshold.
pub const RANK: f64 = 1e-10;
/// Smallest admissible eigenvalue of a Pick matrix.
pub const POSITIVE_DEFINITE: f64 = 1e-14;

/// Rank threshold for an `n`-dimensional state space:
/// `sigma > max(n + 1, 8) * 1e-10 * sigma_max`.
pub fn rank_threshold(n: usize, sigma_max: f64) -> f64 {
    ((n + 1).max(8) as f64) * RANK * sigma_max
}
