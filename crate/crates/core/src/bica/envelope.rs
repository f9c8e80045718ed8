use crate::dist::binary_entropy_clamped;
use crate::error::{Error, Result};

/// Upper bound of `h_b` on `[0, 1/2]` made of `k` tangent lines, mirrored
/// onto `(1/2, 1]`.
///
/// Line `r` touches `h_b` at the midpoint `(2r + 1) / (4k)` of the `r`-th of
/// `k` equal subintervals. Line `r` is the active (lowest) piece on
/// `[breaks[r], breaks[r + 1]]`, where the inner breakpoints are the
/// intersections of consecutive lines.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearEnvelope {
    k: usize,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
    breaks: Vec<f64>,
}

/// Tangent construction with `k` pieces.
pub fn build_envelope(k: usize) -> Result<PiecewiseLinearEnvelope> {
    if k < 1 {
        return Err(Error::InvalidArgument(
            "the envelope needs at least one piece".into(),
        ));
    }
    let mut slopes = Vec::with_capacity(k);
    let mut intercepts = Vec::with_capacity(k);
    for r in 0..k {
        let t = (2 * r + 1) as f64 / (4 * k) as f64;
        let a = ((1.0 - t) / t).log2();
        slopes.push(a);
        intercepts.push(binary_entropy_clamped(t) - a * t);
    }
    let mut breaks = Vec::with_capacity(k + 1);
    breaks.push(0.0);
    for r in 0..k - 1 {
        breaks.push((intercepts[r + 1] - intercepts[r]) / (slopes[r] - slopes[r + 1]));
    }
    breaks.push(0.5);
    Ok(PiecewiseLinearEnvelope {
        k,
        slopes,
        intercepts,
        breaks,
    })
}

impl PiecewiseLinearEnvelope {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `(slope, intercept)` of each piece on `[0, 1/2]`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.slopes
            .iter()
            .copied()
            .zip(self.intercepts.iter().copied())
    }

    pub fn slope(&self, r: usize) -> f64 {
        self.slopes[r]
    }

    /// Interval `[lo, hi] ⊂ [0, 1/2]` on which piece `r` is active.
    pub fn region(&self, r: usize) -> (f64, f64) {
        (self.breaks[r], self.breaks[r + 1])
    }

    /// Value of the envelope at `q ∈ [0, 1]`.
    pub fn eval(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        let q = q.min(1.0 - q);
        self.segments()
            .map(|(a, b)| a * q + b)
            .fold(f64::INFINITY, f64::min)
    }
}
