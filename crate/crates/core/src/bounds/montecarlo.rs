use rayon::prelude::*;

use crate::bica::sorted_ascending;
use crate::corpus::{rng_for, stream, uniform_simplex};
use crate::dist::{binary_entropy_clamped, entropy_of, MarginalProfile};
use crate::error::{Error, Result};
use crate::numeric::MeanEstimate;

/// Transform applied to each simplex draw before measuring its marginals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McTransform {
    Identity,
    Order,
}

fn check_dims(d: u32, draws: usize) -> Result<()> {
    if d == 0 || d > 24 {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo dimension {d} outside 1..=24"
        )));
    }
    if draws == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    Ok(())
}

/// Marginals of draw `i`, after the transform, together with its entropy.
fn draw(d: u32, seed: u64, i: usize, transform: McTransform) -> (MarginalProfile, f64) {
    let p = uniform_simplex(1 << d, &mut rng_for(seed, stream::SIMPLEX, i as u64));
    let h = entropy_of(&p);
    let profile = match transform {
        McTransform::Identity => MarginalProfile::of_codewords(&p),
        McTransform::Order => {
            let q: Vec<f64> = sorted_ascending(&p)
                .iter()
                .map(|&s| p[s as usize])
                .collect();
            MarginalProfile::of_codewords(&q)
        }
    };
    (profile, h)
}

/// Runs `f` on every draw index in parallel and summarizes the results in
/// index order, so the estimate does not depend on the worker count.
fn estimate<F>(draws: usize, f: F) -> MeanEstimate
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let values: Vec<f64> = (0..draws).into_par_iter().map(f).collect();
    MeanEstimate::from_slice(&values)
}

/// Mean of `Σ_j h_b(π_j) − H` over uniform-simplex draws at `m = 2^d`.
pub fn mc_total_correlation(
    d: u32,
    draws: usize,
    seed: u64,
    transform: McTransform,
) -> Result<MeanEstimate> {
    check_dims(d, draws)?;
    Ok(estimate(draws, |i| {
        let (profile, h) = draw(d, seed, i, transform);
        profile.entropy_sum() - h
    }))
}

/// Mean entropy of a uniform-simplex draw over `m` symbols.
pub fn mc_joint_entropy(m: usize, draws: usize, seed: u64) -> Result<MeanEstimate> {
    if m < 2 || draws == 0 {
        return Err(Error::InvalidArgument(
            "need m ≥ 2 and at least one draw".into(),
        ));
    }
    Ok(estimate(draws, |i| {
        entropy_of(&uniform_simplex(
            m,
            &mut rng_for(seed, stream::SIMPLEX, i as u64),
        ))
    }))
}

/// Mean of `h_b(P(Y_bit = 0))` over uniform-simplex draws at `m = 2^d`.
pub fn mc_marginal_entropy(
    d: u32,
    bit: u32,
    draws: usize,
    seed: u64,
    transform: McTransform,
) -> Result<MeanEstimate> {
    check_dims(d, draws)?;
    if bit >= d {
        return Err(Error::InvalidArgument(format!("bit {bit} outside 0..{d}")));
    }
    Ok(estimate(draws, |i| {
        binary_entropy_clamped(draw(d, seed, i, transform).0.pis[bit as usize])
    }))
}
