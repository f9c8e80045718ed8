use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::bica::{block_bica, SearchMethod, MAX_PIECEWISE_BITS};
use crate::corpus::{rng_for, stream};
use crate::dist::{JointDistribution, MarginalProfile};
use crate::error::{Error, Result};
use crate::numeric;

use super::empirical::{block_counts, empirical_marginal_sum};
use super::transform::{Stage, TransformChain};

/// Block BICA method used when none is configured: piecewise with 8 pieces
/// up to [`MAX_PIECEWISE_BITS`], the order permutation above.
pub fn default_block_method(width: u32) -> SearchMethod {
    if width <= MAX_PIECEWISE_BITS {
        SearchMethod::Piecewise { k: 8 }
    } else {
        SearchMethod::Order
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescendConfig {
    /// Bits per block; the last block is narrower if `b` does not divide `d`.
    pub b: u32,
    /// Block BICA method; `None` picks [`default_block_method`] per block.
    pub method: Option<SearchMethod>,
    /// Iterations after the initial shuffle search.
    pub max_iters: usize,
    pub seed: u64,
    /// Random shuffles tried at iteration 0, besides the input layout.
    pub init_shuffles: usize,
    /// Consecutive iterations improving the bound by less than `tol` before
    /// stopping.
    pub patience: usize,
    /// Bits per symbol.
    pub tol: f64,
    /// When false, iterations only shuffle, for comparison runs.
    pub apply_bica: bool,
}

impl Default for DescendConfig {
    fn default() -> Self {
        Self {
            b: 8,
            method: None,
            max_iters: 50,
            seed: 0,
            init_shuffles: 16,
            patience: 3,
            tol: 1e-6,
            apply_bica: true,
        }
    }
}

/// Snapshot after one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineState {
    pub iteration: usize,
    /// `Σ_j Ĥ_b(Y_j)`, bits per symbol.
    pub bound: f64,
    /// `Σ_v Ĥ(Y^(v))`, bits per symbol.
    pub block_sum: f64,
    pub block_entropies: Vec<f64>,
    /// Shuffle and block maps applied in this iteration.
    pub stage: Stage,
}

#[derive(Debug, Clone)]
pub struct Descent {
    pub history: Vec<PipelineState>,
    pub chain: TransformChain,
    pub widths: Vec<u32>,
    /// Samples after the full chain.
    pub transformed: Vec<u32>,
}

fn block_widths(d: u32, b: u32) -> Vec<u32> {
    (0..d).step_by(b as usize).map(|lo| b.min(d - lo)).collect()
}

fn offsets(widths: &[u32]) -> Vec<u32> {
    widths
        .iter()
        .scan(0, |off, &w| {
            let o = *off;
            *off += w;
            Some(o)
        })
        .collect()
}

fn counts_entropy(counts: &[u64]) -> (f64, f64) {
    let n: u64 = counts.iter().sum();
    let q: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    (
        crate::dist::entropy_of(&q),
        MarginalProfile::of_codewords(&q).entropy_sum(),
    )
}

fn random_shuffle(d: u32, seed: u64, iteration: u64, candidate: u64) -> Vec<u32> {
    let mut rng = rng_for(seed, stream::SHUFFLE, (iteration << 32) | candidate);
    let mut s: Vec<u32> = (0..d).collect();
    s.shuffle(&mut rng);
    s
}

/// Iteratively shuffles bit positions and applies block BICA, recording
/// the bound and the block entropy sum after every iteration.
///
/// Iteration 0 keeps the best of the input layout and `init_shuffles`
/// random shuffles, judged by the block entropy sum, without any block maps. Each later iteration
/// shuffles at random, runs block BICA on every block, and keeps a block's
/// map only when it lowers that block's marginal entropy sum, so the bound
/// never increases.
pub fn descend(samples: &[u32], d: u32, cfg: &DescendConfig) -> Result<Descent> {
    if d == 0 || d > 32 {
        return Err(Error::InvalidArgument(format!("d = {d} outside 1..=32")));
    }
    if cfg.b == 0 || cfg.b > d.min(16) {
        return Err(Error::InvalidPartition(format!(
            "block width {} outside 1..={}",
            cfg.b,
            d.min(16)
        )));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if let Some(&x) = samples.iter().find(|&&x| d < 32 && x >> d != 0) {
        return Err(Error::SymbolOutOfRange {
            symbol: x as u64,
            size: 1 << d,
        });
    }
    if d % cfg.b != 0 {
        log::info!("{} bits do not split evenly into {}-bit blocks", d, cfg.b);
    }
    let widths = block_widths(d, cfg.b);
    let offs = offsets(&widths);
    let mut chain = TransformChain::identity(d);
    let mut history = Vec::new();

    // Iteration 0: naive shuffle search, with the input layout as the
    // first candidate.
    let mut best: Option<(f64, Stage, Vec<u32>, Vec<f64>)> = None;
    for c in 0..=cfg.init_shuffles {
        let shuffle = if c == 0 {
            (0..d).collect()
        } else {
            random_shuffle(d, cfg.seed, 0, c as u64)
        };
        let stage = Stage::shuffle_only(shuffle, widths.clone())?;
        let ys: Vec<u32> = samples.par_iter().map(|&x| stage.forward(x)).collect();
        let ents: Vec<f64> = offs
            .par_iter()
            .zip(&widths)
            .map(|(&o, &w)| counts_entropy(&block_counts(&ys, o, w)).0)
            .collect();
        let sum = numeric::sum(ents.iter().copied());
        if best.as_ref().is_none_or(|b| sum < b.0) {
            best = Some((sum, stage, ys, ents));
        }
    }
    let (block_sum, stage, mut ys, ents) = best.expect("at least one candidate");
    let mut bound = empirical_marginal_sum(&ys, d);
    chain.push(stage.clone())?;
    history.push(PipelineState {
        iteration: 0,
        bound,
        block_sum,
        block_entropies: ents,
        stage,
    });

    let mut stalled = 0;
    for it in 1..=cfg.max_iters {
        let shuffle = random_shuffle(d, cfg.seed, it as u64, 0);
        let shuffled = Stage::shuffle_only(shuffle.clone(), widths.clone())?;
        let zs: Vec<u32> = ys.par_iter().map(|&y| shuffled.forward(y)).collect();
        let per_block: Vec<(f64, f64, Option<_>)> = offs
            .par_iter()
            .zip(&widths)
            .map(|(&o, &w)| {
                let counts = block_counts(&zs, o, w);
                let (h, marg) = counts_entropy(&counts);
                if !cfg.apply_bica {
                    return Ok((h, marg, None));
                }
                let p =
                    JointDistribution::from_weights(counts.iter().map(|&c| c as f64).collect())?;
                let method = cfg.method.unwrap_or_else(|| default_block_method(w));
                let r = block_bica(&p, method)?;
                if r.objective < marg - 1e-12 && !r.permutation.is_identity() {
                    Ok((h, r.objective, Some(r.permutation)))
                } else {
                    Ok((h, marg, None))
                }
            })
            .collect::<Result<_>>()?;
        let ents: Vec<f64> = per_block.iter().map(|b| b.0).collect();
        let maps = per_block.into_iter().map(|b| b.2).collect();
        let stage = Stage::new(shuffle, widths.clone(), maps)?;
        ys = ys.par_iter().map(|&y| stage.forward(y)).collect();
        let new_bound = empirical_marginal_sum(&ys, d);
        chain.push(stage.clone())?;
        history.push(PipelineState {
            iteration: it,
            bound: new_bound,
            block_sum: numeric::sum(ents.iter().copied()),
            block_entropies: ents,
            stage,
        });
        if bound - new_bound < cfg.tol {
            stalled += 1;
        } else {
            stalled = 0;
        }
        bound = new_bound;
        if stalled >= cfg.patience {
            break;
        }
    }
    Ok(Descent {
        history,
        chain,
        widths,
        transformed: ys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::SymbolTransform;
    use crate::corpus::{zipf_distribution, CategoricalSampler};
    use crate::universal::block_entropies;

    fn zipf_samples(m: usize, n: usize, seed: u64) -> Vec<u32> {
        let p = zipf_distribution(m, 1.2).unwrap();
        CategoricalSampler::new(&p).unwrap().sample_n(n, seed)
    }

    #[test]
    fn independent_source_has_nothing_to_gain() {
        let p = JointDistribution::product(&[0.2, 0.4, 0.6, 0.9, 0.7, 0.3, 0.55, 0.15]).unwrap();
        let xs = CategoricalSampler::new(&p).unwrap().sample_n(50_000, 1);
        let cfg = DescendConfig {
            b: 4,
            max_iters: 5,
            seed: 2,
            ..Default::default()
        };
        let run = descend(&xs, 8, &cfg).unwrap();
        let first = &run.history[0];
        assert!(first.bound - first.block_sum < 0.01);
        let last = run.history.last().unwrap();
        assert!(first.bound - last.bound < 0.01);
    }

    #[test]
    fn zipf_descent_is_monotone_and_respects_block_bound() {
        let xs = zipf_samples(1 << 12, 100_000, 3);
        let cfg = DescendConfig {
            b: 6,
            max_iters: 30,
            seed: 4,
            ..Default::default()
        };
        let run = descend(&xs, 12, &cfg).unwrap();
        for w in run.history.windows(2) {
            assert!(w[1].bound <= w[0].bound + 1e-9);
        }
        for st in &run.history {
            assert!(st.block_sum <= st.bound + 1e-9);
        }
        let strict = run
            .history
            .windows(2)
            .take_while(|w| w[1].bound < w[0].bound - 1e-6)
            .count();
        assert!(strict >= 3, "only {strict} strictly decreasing iterations");
    }

    #[test]
    fn shuffling_alone_descends_less() {
        let xs = zipf_samples(1 << 12, 50_000, 5);
        let base = DescendConfig {
            b: 6,
            max_iters: 6,
            seed: 6,
            patience: usize::MAX,
            ..Default::default()
        };
        let with = descend(&xs, 12, &base).unwrap();
        let without = descend(
            &xs,
            12,
            &DescendConfig {
                apply_bica: false,
                ..base
            },
        )
        .unwrap();
        assert_eq!(with.history.len(), without.history.len());
        assert!(with.history.last().unwrap().bound < without.history.last().unwrap().bound);
    }

    #[test]
    fn stored_chain_reproduces_history() {
        let xs = zipf_samples(1 << 10, 20_000, 7);
        let cfg = DescendConfig {
            b: 4,
            max_iters: 8,
            seed: 8,
            ..Default::default()
        };
        let run = descend(&xs, 10, &cfg).unwrap();
        let bytes = run.chain.to_bytes();
        let stored = TransformChain::from_bytes(10, &bytes).unwrap();
        // Replay stage by stage from the decoded descriptor.
        let mut ys = xs.clone();
        for (st, rec) in stored.stages().iter().zip(&run.history) {
            let shuffled =
                Stage::shuffle_only(st.shuffle().to_vec(), st.widths().to_vec()).unwrap();
            let zs: Vec<u32> = ys.iter().map(|&y| shuffled.forward(y)).collect();
            let ents = block_entropies(&zs, st.widths());
            let sum: f64 = ents.iter().sum();
            assert!((sum - rec.block_sum).abs() < 1e-9);
            ys = ys.iter().map(|&y| st.forward(y)).collect();
            assert!((empirical_marginal_sum(&ys, 10) - rec.bound).abs() < 1e-9);
        }
        assert_eq!(ys, run.transformed);
        for (&x, &y) in xs.iter().zip(&run.transformed) {
            assert_eq!(stored.inverse(y), x);
        }
    }

    #[test]
    fn uneven_blocks_and_bad_configs() {
        let xs = zipf_samples(1 << 10, 5000, 9);
        let run = descend(
            &xs,
            10,
            &DescendConfig {
                b: 4,
                max_iters: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(run.widths, vec![4, 4, 2]);
        let bad = DescendConfig {
            b: 0,
            ..Default::default()
        };
        assert!(descend(&xs, 10, &bad).is_err());
        assert!(descend(&[], 10, &DescendConfig::default()).is_err());
        assert!(descend(&[1 << 10], 10, &DescendConfig::default()).is_err());
    }
}
