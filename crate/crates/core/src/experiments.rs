//! Experiment drivers shared by the command line tool and the acceptance
//! tests. Each returns plain rows; formatting is left to the caller.

use crate::bica::order_permutation;
use crate::bounds::{
    expected_joint_entropy, mc_total_correlation, theorem3_bound, McTransform, THEOREM3_SPLIT,
};
use crate::coding::marginal::PermutationTransform;
use crate::coding::{huffman_build, marginal_encode};
use crate::corpus::{zipf_distribution, CategoricalSampler};
use crate::dist::{entropy_of, MarginalProfile};
use crate::error::{Error, Result};
use crate::numeric::MeanEstimate;
use crate::partition::BlockPartition;
use crate::universal::{
    baseline_costs, descend, total_cost_curve, Baselines, CostReport, DescendConfig, Descent,
};
use crate::vq::{
    bica_ecvq_fit, ecvq_fit, gaussian_rd, lattice_quantize, rate_of, Coder, Lattice, LatticeKind,
    Points,
};

/// Rates in bits per symbol for one Zipf exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicZipfRow {
    pub s: f64,
    pub entropy: f64,
    /// Huffman average codeword length.
    pub huffman_avg: f64,
    /// Sum of marginal bit entropies after the order permutation.
    pub perbit_avg: f64,
    /// Sum of the two half-width block entropies after the order permutation.
    pub twoblock_avg: f64,
    /// Measured rates on a sample, when one was requested.
    pub coded: Option<CodedRates>,
}

/// Bits per symbol actually produced on `n` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodedRates {
    pub n: usize,
    pub huffman: f64,
    /// Arithmetic coded, one stream per bit.
    pub perbit: f64,
    /// Arithmetic coded, two streams.
    pub twoblock: f64,
}

fn block_entropy_sum(q: &[f64], partition: &BlockPartition) -> f64 {
    (0..partition.num_blocks())
        .map(|v| {
            let mut p = vec![0.0; 1 << partition.blocks()[v].len()];
            for (y, &x) in q.iter().enumerate() {
                p[partition.extract(y as u32, v) as usize] += x;
            }
            entropy_of(&p)
        })
        .sum()
}

/// Classic coding of a Zipf source over `m` symbols. With `n > 0` the three
/// codes are also run on `n` samples drawn with `seed`.
pub fn classic_zipf_row(m: usize, s: f64, n: usize, seed: u64) -> Result<ClassicZipfRow> {
    let p = zipf_distribution(m, s)?;
    let d = p.d();
    let code = huffman_build(p.probs())?;
    let g = order_permutation(&p).permutation;
    let q = p.apply(&g)?;
    let halves = BlockPartition::contiguous(d, d.div_ceil(2))?;
    let bits = BlockPartition::contiguous(d, 1)?;
    let coded = if n > 0 {
        let xs = CategoricalSampler::new(&p)?.sample_n(n, seed);
        let huffman: u64 = xs.iter().map(|&x| code.lengths[x as usize] as u64).sum();
        let t = PermutationTransform::from(g.clone());
        let perbit = marginal_encode(&xs, &t, &bits)?.cost.data_bits;
        let twoblock = marginal_encode(&xs, &t, &halves)?.cost.data_bits;
        Some(CodedRates {
            n,
            huffman: huffman as f64 / n as f64,
            perbit: perbit / n as f64,
            twoblock: twoblock / n as f64,
        })
    } else {
        None
    };
    Ok(ClassicZipfRow {
        s,
        entropy: entropy_of(p.probs()),
        huffman_avg: code.average_length(p.probs()),
        perbit_avg: MarginalProfile::of_codewords(q.probs()).entropy_sum(),
        twoblock_avg: block_entropy_sum(q.probs(), &halves),
        coded,
    })
}

/// Parses `lo:hi:step` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("bad grid {spec:?}: {e}")))?;
    match parts[..] {
        [x] => Ok(vec![x]),
        [lo, hi, step] if step > 0.0 && hi >= lo => {
            let k = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=k).map(|i| lo + step * i as f64).collect())
        }
        _ => Err(Error::InvalidArgument(format!(
            "grid {spec:?} is not lo:hi:step with step > 0"
        ))),
    }
}

/// Average-case total correlation at `m = 2^d` against its bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryRow {
    pub d: u32,
    /// Finite-`m` bound for the order permutation; defined for `d ≥ 10`.
    pub bound: Option<f64>,
    pub ordered: MeanEstimate,
    pub identity: MeanEstimate,
    /// `log2 m − E[H]`.
    pub entropy_gap: f64,
}

pub fn theory_bounds_row(d: u32, draws: usize, seed: u64) -> Result<TheoryRow> {
    let m = 1usize << d;
    let bound = if d >= THEOREM3_SPLIT {
        Some(theorem3_bound(m)?.proof_faithful)
    } else {
        None
    };
    Ok(TheoryRow {
        d,
        bound,
        ordered: mc_total_correlation(d, draws, seed, McTransform::Order)?,
        identity: mc_total_correlation(d, draws, seed, McTransform::Identity)?,
        entropy_gap: d as f64 - expected_joint_entropy(m)?,
    })
}

/// A descent with its cost curve and whole-alphabet references.
#[derive(Debug, Clone)]
pub struct UniversalRun {
    pub descent: Descent,
    pub report: CostReport,
    pub baselines: Baselines,
}

pub fn universal_run(samples: &[u32], d: u32, cfg: &DescendConfig) -> Result<UniversalRun> {
    let descent = descend(samples, d, cfg)?;
    let report = total_cost_curve(&descent.history, samples.len() as u64, &descent.widths, d)?;
    let baselines = baseline_costs(samples, 1u64 << d)?;
    Ok(UniversalRun {
        descent,
        report,
        baselines,
    })
}

/// One point of a λ sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcvqRow {
    pub lambda: f64,
    /// Mean squared error per dimension of the joint-coded quantizer.
    pub distortion: f64,
    pub rate_joint: f64,
    pub clusters_joint: usize,
    /// Mean squared error per dimension of the marginal-coded quantizer.
    pub distortion_marginal: f64,
    pub rate_marginal: f64,
    pub clusters_marginal: usize,
    /// Gaussian reference at the joint quantizer's distortion, bits per vector.
    pub rd_bound: f64,
}

pub fn ecvq_sweep(
    points: &Points,
    m_init: usize,
    lambdas: &[f64],
    seed: u64,
) -> Result<Vec<EcvqRow>> {
    let dim = points.dim();
    lambdas
        .iter()
        .map(|&lambda| {
            let joint = ecvq_fit(points, m_init, lambda, seed)?;
            let marg = bica_ecvq_fit(points, m_init, lambda, seed)?.state;
            Ok(EcvqRow {
                lambda,
                distortion: joint.distortion_per_dim(),
                rate_joint: joint.rate,
                clusters_joint: joint.clusters(),
                distortion_marginal: marg.distortion_per_dim(),
                rate_marginal: marg.rate,
                clusters_marginal: marg.clusters(),
                rd_bound: gaussian_rd(dim, joint.distortion.max(f64::MIN_POSITIVE))?,
            })
        })
        .collect()
}

/// One scale of a lattice sweep; rates are bits per vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeRow {
    pub scale: f64,
    /// Mean squared error per dimension.
    pub distortion: f64,
    pub cells: usize,
    pub rate_joint: f64,
    pub stderr_joint: f64,
    pub rate_marginal: f64,
    pub stderr_marginal: f64,
    pub rd_bound: f64,
    pub total_joint: f64,
    pub total_marginal: f64,
}

pub fn lattice_sweep(
    points: &Points,
    kind: LatticeKind,
    scales: &[f64],
) -> Result<Vec<LatticeRow>> {
    scales
        .iter()
        .map(|&scale| {
            let lattice = Lattice::new(kind, scale)?;
            let q = lattice_quantize(points, &lattice)?;
            let joint = rate_of(&q, Coder::Joint)?;
            let marg = rate_of(&q, Coder::BicaMarginal)?;
            let total_d = q.total_distortion();
            let rd = if total_d > 0.0 {
                gaussian_rd(q.dim, total_d)?
            } else {
                f64::INFINITY
            };
            Ok(LatticeRow {
                scale,
                distortion: q.distortion,
                cells: q.cells.len(),
                rate_joint: joint.bits_per_sample,
                stderr_joint: joint.stderr,
                rate_marginal: marg.bits_per_sample,
                stderr_marginal: marg.stderr,
                rd_bound: rd,
                total_joint: joint.total_bits,
                total_marginal: marg.total_bits,
            })
        })
        .collect()
}
