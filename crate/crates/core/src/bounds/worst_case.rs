use crate::dist::{binary_entropy_clamped, JointDistribution};
use crate::error::{Error, Result};

/// `m − 1` symbols of mass `1/(3(m − 1))` and one of mass `2/3`, with
/// `m = 2^d`. The heavy symbol is the last one.
pub fn worst_case_distribution(d: u32) -> Result<JointDistribution> {
    if d == 0 || d > 30 {
        return Err(Error::InvalidArgument(format!("unsupported dimension {d}")));
    }
    let m = 1usize << d;
    let mut probs = vec![1.0 / (3.0 * (m - 1) as f64); m];
    probs[m - 1] = 2.0 / 3.0;
    JointDistribution::from_weights(probs)
}

/// Closed-form total correlation of [`worst_case_distribution`] under the
/// optimal (order) permutation.
pub fn worst_case_correlation(d: u32) -> f64 {
    let m = (1u64 << d) as f64;
    d as f64 * binary_entropy_clamped(m / (6.0 * (m - 1.0))) - (m - 1.0).log2() / 3.0
        + (1.0f64 / 3.0).log2() / 3.0
        + 2.0 * (2.0f64 / 3.0).log2() / 3.0
}

/// Growth of [`worst_case_correlation`] per bit of `d` as `d → ∞`.
pub fn worst_case_slope() -> f64 {
    binary_entropy_clamped(1.0 / 6.0) - 1.0 / 3.0
}

/// Intercept of the affine large-`d` form of [`worst_case_correlation`].
pub fn worst_case_intercept() -> f64 {
    -binary_entropy_clamped(1.0 / 3.0)
}
