//! Finite distributions over `d`-bit symbols, invertible symbol maps and the
//! entropy functionals built on them.
//!
//! Bit `j` of symbol `s` is `(s >> j) & 1`, so bit 0 is the least significant
//! and bit `d - 1` the most significant. All entropies are in bits.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numeric::{self, xlog2x, NeumaierSum};

/// Tolerance on the probability sum accepted by [`JointDistribution::new`].
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Tolerance on the weight sum accepted by the text literal parser.
const LITERAL_SUM_TOLERANCE: f64 = 1e-6;

/// Largest supported bit dimension.
pub const MAX_BITS: u32 = 30;

/// Probability vector over `m = 2^d` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    d: u32,
    probs: Vec<f64>,
}

impl JointDistribution {
    /// Builds a distribution from probabilities that already sum to one
    /// within [`SUM_TOLERANCE`]. The vector is renormalized exactly and
    /// zero-padded to the next power of two (at least 2).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let total = checked_total(&probs)?;
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self::normalized(probs, total))
    }

    /// Builds a distribution from arbitrary non-negative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total = checked_total(&weights)?;
        Ok(Self::normalized(weights, total))
    }

    fn normalized(mut probs: Vec<f64>, total: f64) -> Self {
        let m = probs.len().max(2).next_power_of_two();
        probs.resize(m, 0.0);
        for p in &mut probs {
            *p /= total;
        }
        Self {
            d: m.trailing_zeros(),
            probs,
        }
    }

    pub fn uniform(d: u32) -> Result<Self> {
        check_bits(d)?;
        let m = 1usize << d;
        Ok(Self {
            d,
            probs: vec![1.0 / m as f64; m],
        })
    }

    pub fn point_mass(d: u32, symbol: usize) -> Result<Self> {
        check_bits(d)?;
        let m = 1usize << d;
        if symbol >= m {
            return Err(Error::SymbolOutOfRange {
                symbol: symbol as u64,
                size: m as u64,
            });
        }
        let mut probs = vec![0.0; m];
        probs[symbol] = 1.0;
        Ok(Self { d, probs })
    }

    /// Product of independent bits with `pis[j] = P(bit j = 0)`.
    pub fn product(pis: &[f64]) -> Result<Self> {
        let d = pis.len() as u32;
        check_bits(d)?;
        if let Some(&q) = pis.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::DomainViolation(format!(
                "bit probability {q} outside [0, 1]"
            )));
        }
        let probs = (0..1usize << d)
            .map(|s| {
                pis.iter()
                    .enumerate()
                    .map(|(j, &q)| if (s >> j) & 1 == 0 { q } else { 1.0 - q })
                    .product()
            })
            .collect();
        Self::from_weights(probs)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Distribution of `g(X)`.
    pub fn apply(&self, g: &SymbolPermutation) -> Result<Self> {
        check_dims(self.d, g.d)?;
        let mut probs = vec![0.0; self.m()];
        for (s, &p) in self.probs.iter().enumerate() {
            probs[g.map[s] as usize] = p;
        }
        Ok(Self { d: self.d, probs })
    }
}

fn checked_total(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution(
            "empty probability vector".into(),
        ));
    }
    if probs.len() > 1usize << MAX_BITS {
        return Err(Error::TooLarge {
            what: "alphabet size",
            value: probs.len() as u64,
            limit: 1 << MAX_BITS,
        });
    }
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} is {p}, expected a finite non-negative value"
        )));
    }
    let total = numeric::sum(probs.iter().copied());
    if total <= 0.0 {
        return Err(Error::InvalidDistribution("all weights are zero".into()));
    }
    Ok(total)
}

fn check_bits(d: u32) -> Result<()> {
    if d == 0 || d > MAX_BITS {
        return Err(Error::InvalidArgument(format!(
            "bit dimension {d} outside 1..={MAX_BITS}"
        )));
    }
    Ok(())
}

fn check_dims(expected: u32, got: u32) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            expected: expected as usize,
            got: got as usize,
        });
    }
    Ok(())
}

/// Bijection on `{0, .., 2^d - 1}`; `map[s]` is the image of symbol `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolPermutation {
    d: u32,
    map: Vec<u32>,
}

impl SymbolPermutation {
    pub fn identity(d: u32) -> Result<Self> {
        check_bits(d)?;
        Ok(Self {
            d,
            map: (0..1u32 << d).collect(),
        })
    }

    pub fn from_map(map: Vec<u32>) -> Result<Self> {
        let m = map.len();
        if m < 2 || !m.is_power_of_two() || m > 1usize << MAX_BITS {
            return Err(Error::InvalidPermutation(format!(
                "length {m} is not a power of two in 2..=2^{MAX_BITS}"
            )));
        }
        let mut seen = vec![false; m];
        for (s, &t) in map.iter().enumerate() {
            let t = t as usize;
            if t >= m {
                return Err(Error::InvalidPermutation(format!(
                    "image {t} of symbol {s} is out of range"
                )));
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::InvalidPermutation(format!(
                    "image {t} appears twice"
                )));
            }
        }
        Ok(Self {
            d: m.trailing_zeros(),
            map,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn m(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, s: u32) -> u32 {
        self.map[s as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.map.len()];
        for (s, &t) in self.map.iter().enumerate() {
            inv[t as usize] = s as u32;
        }
        Self {
            d: self.d,
            map: inv,
        }
    }

    /// The map `s -> next(self(s))`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        check_dims(self.d, next.d)?;
        Ok(Self {
            d: self.d,
            map: self.map.iter().map(|&t| next.map[t as usize]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(s, &t)| s as u32 == t)
    }

    /// Follows this map with a fixed XOR of the output bits in `mask`.
    pub fn flip_output_bits(&self, mask: u32) -> Self {
        let mask = mask & (self.map.len() as u32 - 1);
        Self {
            d: self.d,
            map: self.map.iter().map(|&t| t ^ mask).collect(),
        }
    }

    /// Follows this map with a relabelling of output bit positions: bit `j`
    /// of the new output is bit `order[j]` of the old one.
    pub fn permute_output_bits(&self, order: &[u32]) -> Result<Self> {
        check_dims(self.d, order.len() as u32)?;
        let mut seen = vec![false; order.len()];
        for &j in order {
            if j >= self.d || std::mem::replace(&mut seen[j as usize], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{order:?} is not an ordering of {} bit positions",
                    self.d
                )));
            }
        }
        let map = self
            .map
            .iter()
            .map(|&t| {
                order
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, &src)| acc | (((t >> src) & 1) << j))
            })
            .collect();
        Ok(Self { d: self.d, map })
    }
}

/// `pis[j] = P(Y_j = 0)` for each output bit.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalProfile {
    pub pis: Vec<f64>,
}

impl MarginalProfile {
    /// Marginals of a probability vector indexed by codeword.
    pub fn of_codewords(q: &[f64]) -> Self {
        let d = q.len().max(1).trailing_zeros() as usize;
        let mut acc = vec![NeumaierSum::new(); d];
        for (c, &p) in q.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, a) in acc.iter_mut().enumerate() {
                if (c >> j) & 1 == 0 {
                    a.add(p);
                }
            }
        }
        Self {
            pis: acc.iter().map(|a| a.value().clamp(0.0, 1.0)).collect(),
        }
    }

    /// `Σ_j h_b(π_j)`.
    pub fn entropy_sum(&self) -> f64 {
        numeric::sum(self.pis.iter().map(|&q| binary_entropy_clamped(q)))
    }
}

/// `H(X) = −Σ p log2 p`.
pub fn joint_entropy(p: &JointDistribution) -> f64 {
    entropy_of(p.probs())
}

/// Entropy of an arbitrary probability slice (no validation).
pub fn entropy_of(probs: &[f64]) -> f64 {
    -numeric::sum(probs.iter().map(|&q| xlog2x(q)))
}

/// Marginal bit probabilities of `g(X)`.
pub fn marginals(p: &JointDistribution, g: &SymbolPermutation) -> Result<MarginalProfile> {
    Ok(MarginalProfile::of_codewords(p.apply(g)?.probs()))
}

/// `Σ_j h_b(π_j) − H(X)` for `Y = g(X)`.
pub fn total_correlation(p: &JointDistribution, g: &SymbolPermutation) -> Result<f64> {
    Ok(marginals(p, g)?.entropy_sum() - joint_entropy(p))
}

/// Binary entropy function.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::DomainViolation(format!(
            "binary entropy argument {q} outside [0, 1]"
        )));
    }
    Ok(binary_entropy_clamped(q))
}

/// Binary entropy with the argument clamped into `[0, 1]`.
#[inline]
pub fn binary_entropy_clamped(q: f64) -> f64 {
    let q = q.clamp(0.0, 1.0);
    -(xlog2x(q) + xlog2x(1.0 - q))
}

/// Parses the text literal format: a first line holding `d`, then one
/// `symbol probability` pair per line. Unlisted symbols have probability
/// zero; blank lines and `#` comments are ignored. Weights summing to one
/// within 1e-6 are renormalized.
pub fn parse_distribution(text: &str) -> Result<JointDistribution> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, head) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let d: u32 = head.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected the bit dimension, found {head:?}"),
    })?;
    if d == 0 || d > MAX_BITS {
        return Err(Error::Parse {
            line,
            msg: format!("bit dimension {d} outside 1..={MAX_BITS}"),
        });
    }
    let m = 1usize << d;
    let mut probs = vec![0.0; m];
    let mut seen = vec![false; m];
    for (line, l) in lines {
        let mut it = l.split_whitespace();
        let (Some(s), Some(p), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse {
                line,
                msg: "expected `symbol probability`".into(),
            });
        };
        let s: usize = s.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad symbol {s:?}"),
        })?;
        let p: f64 = p.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad probability {p:?}"),
        })?;
        if s >= m {
            return Err(Error::Parse {
                line,
                msg: format!("symbol {s} outside an alphabet of size {m}"),
            });
        }
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::Parse {
                line,
                msg: format!("probability {p} is not a non-negative number"),
            });
        }
        if std::mem::replace(&mut seen[s], true) {
            return Err(Error::Parse {
                line,
                msg: format!("symbol {s} listed twice"),
            });
        }
        probs[s] = p;
    }
    let total = numeric::sum(probs.iter().copied());
    if (total - 1.0).abs() > LITERAL_SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    JointDistribution::from_weights(probs)
}

/// Inverse of [`parse_distribution`]; only non-zero symbols are listed.
pub fn format_distribution(p: &JointDistribution) -> String {
    let mut out = format!("{}\n", p.d());
    for (s, &q) in p.probs().iter().enumerate() {
        if q > 0.0 {
            let _ = writeln!(out, "{s} {q}");
        }
    }
    out
}
