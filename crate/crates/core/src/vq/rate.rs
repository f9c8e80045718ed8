use std::fmt;
use std::str::FromStr;

use crate::bica::order_permutation;
use crate::bounds::{minimax_redundancy, RedundancyRegime};
use crate::dist::{marginals, JointDistribution, MAX_BITS};
use crate::error::{Error, Result};
use crate::numeric::{index_bits, MeanEstimate};
use crate::universal::redundancy_term;

use super::lattice::{lattice_quantize, Lattice, LatticeQuantization};
use super::Points;

/// Rate-distortion function of a unit-variance Gaussian in `dim`
/// dimensions at total squared-error distortion `d`, in bits per vector.
pub fn gaussian_rd(dim: usize, d: f64) -> Result<f64> {
    if d.is_nan() || d <= 0.0 {
        return Err(Error::DomainViolation(format!(
            "distortion must be positive, got {d}"
        )));
    }
    let dim = dim as f64;
    Ok((dim / 2.0 * (dim / d).log2()).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coder {
    /// Cell indices coded over their whole alphabet.
    Joint,
    /// Cell indices mapped by the order permutation, bits coded separately.
    BicaMarginal,
}

impl fmt::Display for Coder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coder::Joint => "joint",
            Coder::BicaMarginal => "bica-marginal",
        })
    }
}

impl FromStr for Coder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joint" => Ok(Coder::Joint),
            "bica-marginal" | "marginal" => Ok(Coder::BicaMarginal),
            _ => Err(Error::InvalidArgument(format!("unknown coder {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub coder: Coder,
    pub n: usize,
    /// Mean squared error per dimension.
    pub distortion: f64,
    /// Occupied cells.
    pub cells: usize,
    /// Width of a compacted cell index.
    pub index_bits: u32,
    /// Empirical code length per sample: the joint entropy of the cell
    /// indices, or the sum of marginal bit entropies after ordering.
    pub bits_per_sample: f64,
    /// Standard error of `bits_per_sample` as a mean of per-sample lengths.
    pub stderr: f64,
    /// Universal model cost.
    pub model_bits: f64,
    /// Bits to describe the symbol permutation; reported, not added to
    /// `total_bits`.
    pub transform_bits: f64,
    /// `n · bits_per_sample + model_bits`.
    pub total_bits: f64,
}

/// Quantizes `points` and reports the rate of coding the cell indices.
pub fn lattice_rate_report(points: &Points, lattice: &Lattice, coder: Coder) -> Result<RateReport> {
    let q = lattice_quantize(points, lattice)?;
    rate_of(&q, coder)
}

/// Rate of coding already quantized cell indices.
pub fn rate_of(q: &LatticeQuantization, coder: Coder) -> Result<RateReport> {
    let n = q.len();
    if n == 0 {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let cells = q.cells.len();
    let d = index_bits(cells as u64);
    if d > MAX_BITS {
        return Err(Error::TooLarge {
            what: "cell index width",
            value: d as u64,
            limit: MAX_BITS as u64,
        });
    }
    let mut counts = vec![0u64; 1 << d];
    for &i in &q.indices {
        counts[i as usize] += 1;
    }
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let p = JointDistribution::new(probs)?;
    let (lengths, model_bits, transform_bits): (Vec<f64>, f64, f64) = match coder {
        Coder::Joint => {
            let l: Vec<f64> = p
                .probs()
                .iter()
                .map(|&x| if x > 0.0 { -x.log2() } else { 0.0 })
                .collect();
            let m = 1u64 << d;
            let model = minimax_redundancy(RedundancyRegime::auto(m, n as u64))?;
            (l, model, 0.0)
        }
        Coder::BicaMarginal => {
            let g = order_permutation(&p).permutation;
            let pis = marginals(&p, &g)?.pis;
            let l = (0..1u32 << d)
                .map(|s| {
                    let y = g.apply(s);
                    pis.iter()
                        .enumerate()
                        .filter(|_| counts[s as usize] > 0)
                        .map(|(j, &pi0)| -(if (y >> j) & 1 == 0 { pi0 } else { 1.0 - pi0 }).log2())
                        .sum()
                })
                .collect();
            let model = redundancy_term(n as u64, &vec![1; d as usize]);
            (l, model, d as f64 * (1u64 << d) as f64)
        }
    };
    let per_sample: Vec<f64> = q.indices.iter().map(|&i| lengths[i as usize]).collect();
    let est = MeanEstimate::from_slice(&per_sample);
    Ok(RateReport {
        coder,
        n,
        distortion: q.distortion,
        cells,
        index_bits: d,
        bits_per_sample: est.mean,
        stderr: est.stderr,
        model_bits,
        transform_bits,
        total_bits: n as f64 * est.mean + model_bits,
    })
}
