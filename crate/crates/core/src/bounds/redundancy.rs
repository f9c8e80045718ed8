use std::f64::consts::{E, LOG2_E};

use crate::error::{Error, Result};

/// Alphabet size `m` versus sample count `n`, selecting which leading-term
/// redundancy formula applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RedundancyRegime {
    /// `m = o(n)`.
    SmallAlphabet { m: f64, n: f64 },
    /// `n = o(m)`.
    LargeAlphabet { m: f64, n: f64 },
    /// `m = αn + l(n)`.
    Linear { n: f64, alpha: f64, l: f64 },
}

impl RedundancyRegime {
    /// Picks a regime from the ratio `m / n`: below 0.1 the small-alphabet
    /// formula, above 10 the large-alphabet one, otherwise the linear regime
    /// with `α = m / n` and `l = 0`.
    pub fn auto(m: u64, n: u64) -> Self {
        let (m, n) = (m as f64, n as f64);
        let ratio = m / n;
        if ratio < 0.1 {
            RedundancyRegime::SmallAlphabet { m, n }
        } else if ratio > 10.0 {
            RedundancyRegime::LargeAlphabet { m, n }
        } else {
            RedundancyRegime::Linear {
                n,
                alpha: ratio,
                l: 0.0,
            }
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainViolation(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

/// Leading terms of the worst-case minimax redundancy, in bits.
pub fn minimax_redundancy(regime: RedundancyRegime) -> Result<f64> {
    match regime {
        RedundancyRegime::SmallAlphabet { m, n } => {
            positive("m", m)?;
            positive("n", n)?;
            Ok((m - 1.0) / 2.0 * (n / m).log2()
                + m / 2.0 * LOG2_E
                + m * LOG2_E / 3.0 * (m / n).sqrt())
        }
        RedundancyRegime::LargeAlphabet { m, n } => {
            positive("m", m)?;
            positive("n", n)?;
            Ok(n * (m / n).log2() + 1.5 * n * n / m * LOG2_E - 1.5 * n / m * LOG2_E)
        }
        RedundancyRegime::Linear { n, alpha, l } => {
            positive("n", n)?;
            positive("alpha", alpha)?;
            let c = 0.5 + 0.5 * (1.0 + 4.0 / alpha).sqrt();
            let a = c + 2.0 / alpha;
            let b = alpha * c.powf(alpha + 2.0) * E.powf(-1.0 / c);
            Ok(n * b.log2() + l * c.log2() - a.sqrt().log2())
        }
    }
}

/// Pattern plus dictionary cost: `data_bits + n0·log2 m + (3/2)·log2(e)·n^(1/3)`.
pub fn pattern_dictionary_cost(n: u64, n0: u64, m: u64, data_bits: f64) -> Result<f64> {
    if n0 > n {
        return Err(Error::InvalidArgument(format!(
            "{n0} distinct symbols cannot occur in {n} samples"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument(
            "alphabet size must be positive".into(),
        ));
    }
    Ok(data_bits + n0 as f64 * (m as f64).log2() + 1.5 * LOG2_E * (n as f64).cbrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_alphabet_run_matches_reported_redundancy() {
        let r = minimax_redundancy(RedundancyRegime::auto(1 << 20, 1_000_000)).unwrap();
        assert!((r - 1.22e6).abs() / 1.22e6 < 0.01, "{r}");
    }

    #[test]
    fn auto_selects_by_ratio() {
        assert!(matches!(
            RedundancyRegime::auto(2, 1_000_000),
            RedundancyRegime::SmallAlphabet { .. }
        ));
        assert!(matches!(
            RedundancyRegime::auto(1 << 20, 1000),
            RedundancyRegime::LargeAlphabet { .. }
        ));
        assert!(matches!(
            RedundancyRegime::auto(1000, 1000),
            RedundancyRegime::Linear { alpha, .. } if alpha == 1.0
        ));
    }

    #[test]
    fn large_alphabet_at_n_equal_m() {
        let n = 4096.0;
        let r = minimax_redundancy(RedundancyRegime::LargeAlphabet { m: n, n }).unwrap();
        assert!((r - (1.5 * n * LOG2_E - 1.5 * LOG2_E)).abs() < 1e-9);
        // The linear regime at α = 1 is a different leading term of the
        // same order of magnitude.
        let lin = minimax_redundancy(RedundancyRegime::Linear {
            n,
            alpha: 1.0,
            l: 0.0,
        })
        .unwrap();
        assert!(lin > 0.0 && lin < r && lin > r / 4.0);
    }

    #[test]
    fn binary_alphabet() {
        let n = 1e6;
        let r = minimax_redundancy(RedundancyRegime::SmallAlphabet { m: 2.0, n }).unwrap();
        let expected = 0.5 * (n / 2.0).log2() + LOG2_E + 2.0 * LOG2_E / 3.0 * (2.0 / n).sqrt();
        assert!((r - expected).abs() < 1e-9);
        assert!((r - 0.5 * n.log2()).abs() < 2.0);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(minimax_redundancy(RedundancyRegime::SmallAlphabet { m: 0.0, n: 5.0 }).is_err());
        assert!(minimax_redundancy(RedundancyRegime::Linear {
            n: 5.0,
            alpha: -1.0,
            l: 0.0
        })
        .is_err());
    }

    #[test]
    fn pattern_cost() {
        let total = pattern_dictionary_cost(1_000_000, 80_071, 1 << 20, 8.38e6).unwrap();
        assert!((total - 9.982e6).abs() / 9.982e6 < 1e-3, "{total}");
        let empty = pattern_dictionary_cost(1000, 0, 4, 10.0).unwrap();
        assert!((empty - (10.0 + 15.0 * LOG2_E)).abs() < 1e-9);
        let small = pattern_dictionary_cost(1000, 100, 1 << 12, 0.0).unwrap();
        assert!((small - (1200.0 + 15.0 * LOG2_E)).abs() < 1e-9);
        assert!(pattern_dictionary_cost(10, 11, 4, 0.0).is_err());
    }
}
