use rayon::prelude::*;

use crate::dist::{JointDistribution, MarginalProfile, SymbolPermutation};
use crate::error::{Error, Result};

use super::envelope::{build_envelope, PiecewiseLinearEnvelope};
use super::order::order_permutation;
use super::{SearchMethod, SearchResult};

/// Widest distribution accepted by [`piecewise_relaxation`]; wider inputs
/// fall back to the order permutation.
pub const MAX_PIECEWISE_BITS: u32 = 10;

/// Slack when testing whether a marginal lies in its assigned region.
const REGION_TOLERANCE: f64 = 1e-12;

/// Number of marginals placed in each envelope region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionAssignment {
    pub counts: Vec<usize>,
}

impl RegionAssignment {
    /// Region of each bit position: the first `counts[0]` bits go to region
    /// 0, the next `counts[1]` to region 1, and so on. Bit labels are
    /// interchangeable, so this loses nothing.
    pub fn regions(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| std::iter::repeat_n(r, c))
            .collect()
    }
}

/// All ways to place `d` marginals in `k` regions, in lexicographic order of
/// the count vector. There are `C(d + k − 1, d)` of them.
pub fn region_assignments(d: usize, k: usize) -> Vec<RegionAssignment> {
    fn rec(left: usize, slot: usize, cur: &mut Vec<usize>, out: &mut Vec<RegionAssignment>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(RegionAssignment {
                counts: cur.clone(),
            });
            return;
        }
        for c in 0..=left {
            cur[slot] = c;
            rec(left - c, slot + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(d, 0, &mut vec![0; k], &mut out);
    }
    out
}

/// Minimizes `Σ_s p_s c_{g(s)}` by pairing probabilities in descending order
/// with coefficients in ascending order. Ties keep index order on both
/// sides.
pub fn solve_linear_allocation(p: &JointDistribution, coeffs: &[f64]) -> Result<SymbolPermutation> {
    if coeffs.len() != p.m() {
        return Err(Error::DimensionMismatch {
            expected: p.m(),
            got: coeffs.len(),
        });
    }
    let by_prob = descending(p.probs());
    Ok(pair(&by_prob, &ascending(coeffs)))
}

fn descending(probs: &[f64]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..probs.len() as u32).collect();
    idx.sort_by(|&a, &b| probs[b as usize].total_cmp(&probs[a as usize]));
    idx
}

fn ascending(coeffs: &[f64]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..coeffs.len() as u32).collect();
    idx.sort_by(|&a, &b| coeffs[a as usize].total_cmp(&coeffs[b as usize]));
    idx
}

fn pair(by_prob: &[u32], by_coeff: &[u32]) -> SymbolPermutation {
    let mut map = vec![0u32; by_prob.len()];
    for (&s, &c) in by_prob.iter().zip(by_coeff) {
        map[s as usize] = c;
    }
    SymbolPermutation::from_map(map).expect("pairing two orderings yields a bijection")
}

/// `c_i = Σ_{j : bit j of i is 0} slopes[j]`.
fn coefficients(slopes: &[f64]) -> Vec<f64> {
    let m = 1usize << slopes.len();
    let total: f64 = slopes.iter().sum();
    let mut ones = vec![0.0; m];
    for i in 1..m {
        ones[i] = ones[i & (i - 1)] + slopes[i.trailing_zeros() as usize];
    }
    ones.iter().map(|o| total - o).collect()
}

struct Candidate {
    objective: f64,
    index: usize,
}

fn evaluate(
    env: &PiecewiseLinearEnvelope,
    ra: &RegionAssignment,
    probs: &[f64],
    by_prob: &[u32],
) -> (Vec<u32>, Option<f64>) {
    let regions = ra.regions();
    let slopes: Vec<f64> = regions.iter().map(|&r| env.slope(r)).collect();
    let by_coeff = ascending(&coefficients(&slopes));
    let mut q = vec![0.0; probs.len()];
    for (&s, &c) in by_prob.iter().zip(&by_coeff) {
        q[c as usize] = probs[s as usize];
    }
    let profile = MarginalProfile::of_codewords(&q);
    let feasible = profile.pis.iter().zip(&regions).all(|(&pi, &r)| {
        let x = pi.min(1.0 - pi);
        let (lo, hi) = env.region(r);
        x >= lo - REGION_TOLERANCE && x <= hi + REGION_TOLERANCE
    });
    (by_coeff, feasible.then(|| profile.entropy_sum()))
}

/// Piecewise-linear relaxation with `k` envelope pieces.
///
/// Every placement of the `d` marginals into the `k` envelope regions turns
/// the objective into a linear one, solved by [`solve_linear_allocation`].
/// Among the placements whose solution actually lands in the assumed
/// regions, the one with the lowest true objective is compared with the
/// order permutation and the better of the two is returned. If no placement
/// is consistent, or `d` exceeds [`MAX_PIECEWISE_BITS`], the order
/// permutation is returned with `fallback` set.
pub fn piecewise_relaxation(p: &JointDistribution, k: usize) -> Result<SearchResult> {
    let env = build_envelope(k)?;
    let method = SearchMethod::Piecewise { k };
    let order = order_permutation(p);
    if p.d() > MAX_PIECEWISE_BITS {
        log::warn!(
            "piecewise search limited to {MAX_PIECEWISE_BITS} bits, got {}; using the order permutation",
            p.d()
        );
        return Ok(SearchResult {
            method,
            fallback: true,
            ..order
        });
    }

    let probs = p.probs();
    let by_prob = descending(probs);
    let assignments = region_assignments(p.d() as usize, k);
    let best = assignments
        .par_iter()
        .enumerate()
        .filter_map(|(index, ra)| {
            let (_, obj) = evaluate(&env, ra, probs, &by_prob);
            obj.map(|objective| Candidate { objective, index })
        })
        .reduce_with(|a, b| {
            match a
                .objective
                .total_cmp(&b.objective)
                .then(a.index.cmp(&b.index))
            {
                std::cmp::Ordering::Greater => b,
                _ => a,
            }
        });

    let Some(best) = best else {
        log::warn!("no region-consistent placement for k = {k}; using the order permutation");
        return Ok(SearchResult {
            method,
            fallback: true,
            ..order
        });
    };
    if best.objective >= order.objective {
        return Ok(SearchResult { method, ..order });
    }
    let (by_coeff, _) = evaluate(&env, &assignments[best.index], probs, &by_prob);
    Ok(SearchResult {
        permutation: pair(&by_prob, &by_coeff),
        objective: best.objective,
        method,
        fallback: false,
    })
}
