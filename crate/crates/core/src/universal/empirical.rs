//! Empirical entropies of symbol streams.

use rayon::prelude::*;

use crate::dist::{binary_entropy_clamped, entropy_of};
use crate::numeric;

/// Counts of each distinct symbol, in increasing symbol order.
pub fn symbol_counts(samples: &[u32]) -> Vec<(u32, u64)> {
    let mut sorted = samples.to_vec();
    sorted.par_sort_unstable();
    let mut out: Vec<(u32, u64)> = Vec::new();
    for x in sorted {
        match out.last_mut() {
            Some((s, c)) if *s == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Entropy in bits per symbol of the empirical distribution.
pub fn empirical_entropy(samples: &[u32]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let n = samples.len() as f64;
    let freqs: Vec<f64> = symbol_counts(samples)
        .into_iter()
        .map(|(_, c)| c as f64 / n)
        .collect();
    entropy_of(&freqs)
}

/// Number of samples with bit `j` equal to zero, for each `j < d`.
pub fn bit_zero_counts(samples: &[u32], d: u32) -> Vec<u64> {
    let mut ones = vec![0u64; d as usize];
    for &x in samples {
        for (j, o) in ones.iter_mut().enumerate() {
            *o += ((x >> j) & 1) as u64;
        }
    }
    ones.iter().map(|&o| samples.len() as u64 - o).collect()
}

/// `Σ_j Ĥ_b(Y_j)` in bits per symbol.
pub fn empirical_marginal_sum(samples: &[u32], d: u32) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let n = samples.len() as f64;
    numeric::sum(
        bit_zero_counts(samples, d)
            .into_iter()
            .map(|z| binary_entropy_clamped(z as f64 / n)),
    )
}

/// Value counts of the block of `width` bits starting at bit `offset`.
pub fn block_counts(samples: &[u32], offset: u32, width: u32) -> Vec<u64> {
    let mask = ((1u64 << width) - 1) as u32;
    let mut counts = vec![0u64; 1 << width];
    for &x in samples {
        counts[((x >> offset) & mask) as usize] += 1;
    }
    counts
}

fn entropy_of_counts(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    entropy_of(&freqs)
}

/// Empirical entropy of each contiguous block, in bits per symbol.
pub fn block_entropies(samples: &[u32], widths: &[u32]) -> Vec<f64> {
    let offsets: Vec<u32> = widths
        .iter()
        .scan(0, |off, &w| {
            let o = *off;
            *off += w;
            Some(o)
        })
        .collect();
    offsets
        .par_iter()
        .zip(widths)
        .map(|(&off, &w)| entropy_of_counts(&block_counts(samples, off, w)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_stream() {
        let xs = [0b00, 0b01, 0b11, 0b11];
        assert_eq!(symbol_counts(&xs), vec![(0, 1), (1, 1), (3, 2)]);
        assert!((empirical_entropy(&xs) - 1.5).abs() < 1e-15);
        assert_eq!(bit_zero_counts(&xs, 2), vec![1, 2]);
        let marg = empirical_marginal_sum(&xs, 2);
        assert!((marg - (binary_entropy_clamped(0.25) + 1.0)).abs() < 1e-15);
        let blocks = block_entropies(&xs, &[1, 1]);
        assert!((blocks.iter().sum::<f64>() - marg).abs() < 1e-15);
        assert_eq!(block_entropies(&xs, &[2]), vec![1.5]);
        assert_eq!(empirical_entropy(&[]), 0.0);
    }
}
