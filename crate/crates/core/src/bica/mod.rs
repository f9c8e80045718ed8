//! Searches for a symbol permutation `g` minimizing `Σ_j h_b(P(Y_j = 0))`
//! for `Y = g(X)`.
//!
//! Three searches are offered: the greedy [`order_permutation`], the
//! [`piecewise_relaxation`] built on a tangent-line envelope of `h_b`, and an
//! exhaustive [`brute_force_optimum`] for `d ≤ 3`. [`block_bica`] applies
//! any of them to a single block of bits.

mod brute;
mod envelope;
mod order;
mod piecewise;

use std::fmt;
use std::str::FromStr;

pub use brute::{brute_force_optimum, MAX_BRUTE_FORCE_BITS};
pub use envelope::{build_envelope, PiecewiseLinearEnvelope};
pub use order::{order_permutation, sorted_ascending};
pub use piecewise::{
    piecewise_relaxation, region_assignments, solve_linear_allocation, RegionAssignment,
    MAX_PIECEWISE_BITS,
};

use crate::dist::{marginals, JointDistribution, SymbolPermutation};
use crate::error::{Error, Result};

/// Default number of envelope pieces.
pub const DEFAULT_PIECES: usize = 8;

/// Default cap on the bit width handled by [`block_bica`].
pub const DEFAULT_MAX_BLOCK_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMethod {
    Order,
    Piecewise { k: usize },
    BruteForce,
}

impl fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchMethod::Order => f.write_str("order"),
            SearchMethod::Piecewise { k } => write!(f, "piecewise:{k}"),
            SearchMethod::BruteForce => f.write_str("brute"),
        }
    }
}

impl FromStr for SearchMethod {
    type Err = Error;

    /// Accepts `order`, `brute`, `piecewise` (default pieces) or
    /// `piecewise:K`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "order" => Ok(SearchMethod::Order),
            "brute" => Ok(SearchMethod::BruteForce),
            "piecewise" => Ok(SearchMethod::Piecewise { k: DEFAULT_PIECES }),
            _ => {
                let k = s
                    .strip_prefix("piecewise:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "unknown search method {s:?} (expected order, brute or piecewise:K)"
                        ))
                    })?;
                Ok(SearchMethod::Piecewise { k })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub permutation: SymbolPermutation,
    /// `Σ_j h_b(π_j)` in bits.
    pub objective: f64,
    pub method: SearchMethod,
    /// Set when the requested method could not run and the order
    /// permutation was returned instead.
    pub fallback: bool,
}

/// `Σ_j h_b(π_j)` for `Y = g(X)`.
pub fn objective(p: &JointDistribution, g: &SymbolPermutation) -> Result<f64> {
    Ok(marginals(p, g)?.entropy_sum())
}

/// Runs the requested search on a full distribution.
pub fn search(p: &JointDistribution, method: SearchMethod) -> Result<SearchResult> {
    match method {
        SearchMethod::Order => Ok(order_permutation(p)),
        SearchMethod::Piecewise { k } => piecewise_relaxation(p, k),
        SearchMethod::BruteForce => brute_force_optimum(p),
    }
}

/// Runs a search on the distribution of one block of bits, with the default
/// width cap.
pub fn block_bica(p_block: &JointDistribution, method: SearchMethod) -> Result<SearchResult> {
    block_bica_with_limit(p_block, method, DEFAULT_MAX_BLOCK_BITS)
}

/// As [`block_bica`] with an explicit cap on the block width. Piecewise
/// search on blocks wider than [`MAX_PIECEWISE_BITS`] falls back to the order
/// permutation.
pub fn block_bica_with_limit(
    p_block: &JointDistribution,
    method: SearchMethod,
    max_bits: u32,
) -> Result<SearchResult> {
    let b = p_block.d();
    if b > max_bits {
        return Err(Error::TooLarge {
            what: "block width",
            value: b as u64,
            limit: max_bits as u64,
        });
    }
    search(p_block, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::joint_entropy;

    #[test]
    fn method_parsing() {
        assert_eq!(
            "order".parse::<SearchMethod>().unwrap(),
            SearchMethod::Order
        );
        assert_eq!(
            "piecewise:4".parse::<SearchMethod>().unwrap(),
            SearchMethod::Piecewise { k: 4 }
        );
        assert_eq!(
            "piecewise".parse::<SearchMethod>().unwrap(),
            SearchMethod::Piecewise { k: DEFAULT_PIECES }
        );
        assert!("piecewise:0".parse::<SearchMethod>().is_err());
        assert!("greedy".parse::<SearchMethod>().is_err());
        for m in [
            SearchMethod::Order,
            SearchMethod::BruteForce,
            SearchMethod::Piecewise { k: 3 },
        ] {
            assert_eq!(m.to_string().parse::<SearchMethod>().unwrap(), m);
        }
    }

    #[test]
    fn single_bit_block_is_identity_or_flip() {
        for q in [0.1, 0.5, 0.8] {
            let p = JointDistribution::new(vec![q, 1.0 - q]).unwrap();
            for method in [SearchMethod::Order, SearchMethod::Piecewise { k: 4 }] {
                let r = block_bica(&p, method).unwrap();
                let map = r.permutation.map();
                assert!(map == [0, 1] || map == [1, 0]);
                assert!((r.objective - joint_entropy(&p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_width_cap() {
        let p = JointDistribution::uniform(5).unwrap();
        assert!(matches!(
            block_bica_with_limit(&p, SearchMethod::Order, 4),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn wide_piecewise_block_falls_back_to_order() {
        let w: Vec<f64> = (1..=1 << 11).map(|k| 1.0 / k as f64).collect();
        let p = JointDistribution::from_weights(w).unwrap();
        let r = block_bica(&p, SearchMethod::Piecewise { k: 8 }).unwrap();
        assert!(r.fallback);
        assert_eq!(r.permutation, order_permutation(&p).permutation);
    }
}
