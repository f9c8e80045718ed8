//! Compensated summation and Monte Carlo summaries.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated sum of a sequence.
pub fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = NeumaierSum::new();
    s.extend(xs);
    s.value()
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanEstimate {
    /// Summarizes `xs` in the given order. The standard error uses the
    /// unbiased variance and is zero for fewer than two values.
    pub fn from_slice(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                n,
            };
        }
        let mean = sum(xs.iter().copied()) / n as f64;
        let stderr = if n > 1 {
            let ss = sum(xs.iter().map(|&x| (x - mean) * (x - mean)));
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, n }
    }
}

/// `log2` of a count ratio with the convention that `0 log 0 = 0`.
#[inline]
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Number of bits needed to index `m` values, at least 1.
pub fn index_bits(m: u64) -> u32 {
    if m <= 2 {
        1
    } else {
        64 - (m - 1).leading_zeros()
    }
}

/// `n` values log-spaced between `lo` and `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(xs), 2.0);
        let naive: f64 = xs.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn mean_and_stderr() {
        let est = MeanEstimate::from_slice(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(est.mean, 2.5);
        // sample variance 5/3, divided by n = 4
        assert!((est.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(MeanEstimate::from_slice(&[7.0]).stderr, 0.0);
    }

    #[test]
    fn index_bits_matches_ceil_log2() {
        assert_eq!(index_bits(1), 1);
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(3), 2);
        assert_eq!(index_bits(4), 2);
        assert_eq!(index_bits(5), 3);
        assert_eq!(index_bits(1 << 20), 20);
        assert_eq!(index_bits((1 << 20) + 1), 21);
    }

    #[test]
    fn logspace_endpoints() {
        let v = logspace(0.25, 4.0, 5);
        assert!((v[0] - 0.25).abs() < 1e-15);
        assert!((v[2] - 1.0).abs() < 1e-12);
        assert!((v[4] - 4.0).abs() < 1e-12);
    }
}
