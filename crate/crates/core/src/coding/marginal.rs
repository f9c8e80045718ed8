//! Block-wise coding of a transformed source.
//!
//! Each sample is mapped through an invertible transform, its bits are
//! split into blocks by a [`BlockPartition`], and every block stream is
//! arithmetic coded against its own empirical distribution.

use rayon::prelude::*;

use crate::dist::SymbolPermutation;
use crate::error::{Error, Result};
use crate::partition::BlockPartition;

use super::arith::{ArithmeticDecoder, ArithmeticEncoder, FrequencyTable, DEFAULT_MAX_ALPHABET};
use super::bitio::BitBuf;
use super::BitCost;

/// An invertible map on `d`-bit symbols.
pub trait SymbolTransform: Sync {
    fn d(&self) -> u32;
    fn forward(&self, x: u32) -> u32;
    fn inverse(&self, y: u32) -> u32;
}

/// A [`SymbolPermutation`] with its inverse precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationTransform {
    forward: SymbolPermutation,
    inverse: SymbolPermutation,
}

impl From<SymbolPermutation> for PermutationTransform {
    fn from(g: SymbolPermutation) -> Self {
        let inverse = g.inverse();
        Self {
            forward: g,
            inverse,
        }
    }
}

impl SymbolTransform for PermutationTransform {
    fn d(&self) -> u32 {
        self.forward.d()
    }

    fn forward(&self, x: u32) -> u32 {
        self.forward.apply(x)
    }

    fn inverse(&self, y: u32) -> u32 {
        self.inverse.apply(y)
    }
}

/// Container bits spent describing one block: width, positions, table size,
/// `(symbol, frequency)` pairs and stream length.
pub fn block_header_bits(width: u32, nonzero: usize) -> u64 {
    8 + 8 * width as u64 + 32 + 64 * nonzero as u64 + 64
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalEncoding {
    pub streams: Vec<BitBuf>,
    pub tables: Vec<FrequencyTable>,
    /// Data bits are the stream lengths; overhead bits are the block
    /// headers of the container.
    pub cost: BitCost,
    /// Bits each stream spent on termination, included in `data_bits`.
    pub termination_bits: Vec<u64>,
}

fn check(d: u32, partition: &BlockPartition) -> Result<()> {
    if partition.d() != d {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} bits, transform has {d}",
            partition.d()
        )));
    }
    let limit = DEFAULT_MAX_ALPHABET.trailing_zeros();
    if partition.b() > limit {
        return Err(Error::TooLarge {
            what: "block width",
            value: partition.b() as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}

/// Transforms, splits and codes `samples`.
pub fn marginal_encode<T: SymbolTransform + ?Sized>(
    samples: &[u32],
    g: &T,
    partition: &BlockPartition,
) -> Result<MarginalEncoding> {
    let d = g.d();
    check(d, partition)?;
    if let Some(&x) = samples.iter().find(|&&x| d < 32 && x >> d != 0) {
        return Err(Error::SymbolOutOfRange {
            symbol: x as u64,
            size: 1 << d,
        });
    }
    let ys: Vec<u32> = samples.par_iter().map(|&x| g.forward(x)).collect();
    let coded: Vec<(BitBuf, FrequencyTable, u64)> = (0..partition.num_blocks())
        .into_par_iter()
        .map(|v| {
            let w = partition.blocks()[v].len();
            let mut counts = vec![0u64; 1 << w];
            let values: Vec<u32> = ys.iter().map(|&y| partition.extract(y, v)).collect();
            for &val in &values {
                counts[val as usize] += 1;
            }
            if samples.is_empty() {
                counts[0] = 1;
            }
            let table = FrequencyTable::from_counts(&counts)?;
            let mut enc = ArithmeticEncoder::new();
            for &val in &values {
                enc.encode(&table, val)?;
            }
            let (buf, term) = enc.finish_with_stats();
            Ok((buf, table, term))
        })
        .collect::<Result<_>>()?;

    let mut streams = Vec::with_capacity(coded.len());
    let mut tables = Vec::with_capacity(coded.len());
    let mut termination_bits = Vec::with_capacity(coded.len());
    let (mut data, mut overhead) = (0u64, 0u64);
    for ((buf, table, term), block) in coded.into_iter().zip(partition.blocks()) {
        data += buf.len_bits;
        overhead += block_header_bits(block.len() as u32, table.nonzero().count());
        streams.push(buf);
        tables.push(table);
        termination_bits.push(term);
    }
    Ok(MarginalEncoding {
        streams,
        tables,
        cost: BitCost::new(data as f64, overhead as f64),
        termination_bits,
    })
}

/// Inverse of [`marginal_encode`] for `n` samples.
pub fn marginal_decode<T: SymbolTransform + ?Sized>(
    streams: &[BitBuf],
    tables: &[FrequencyTable],
    g: &T,
    partition: &BlockPartition,
    n: usize,
) -> Result<Vec<u32>> {
    check(g.d(), partition)?;
    let nb = partition.num_blocks();
    if streams.len() != nb || tables.len() != nb {
        return Err(Error::Format(format!(
            "{} streams and {} tables for {nb} blocks",
            streams.len(),
            tables.len()
        )));
    }
    let columns: Vec<Vec<u32>> = (0..nb)
        .into_par_iter()
        .map(|v| {
            if tables[v].len() != 1 << partition.blocks()[v].len() {
                return Err(Error::Format(format!("table {v} has the wrong alphabet")));
            }
            let mut dec = ArithmeticDecoder::new(streams[v].reader());
            (0..n).map(|_| dec.decode(&tables[v])).collect()
        })
        .collect::<Result<_>>()?;
    let mut vals = vec![0u32; nb];
    Ok((0..n)
        .map(|i| {
            for (v, col) in columns.iter().enumerate() {
                vals[v] = col[i];
            }
            g.inverse(partition.assemble(&vals))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bica::order_permutation;
    use crate::coding::arith::ideal_code_length;
    use crate::corpus::{zipf_distribution, CategoricalSampler};
    use crate::dist::{binary_entropy_clamped, JointDistribution};

    fn round_trip(
        samples: &[u32],
        g: &PermutationTransform,
        part: &BlockPartition,
    ) -> MarginalEncoding {
        let enc = marginal_encode(samples, g, part).unwrap();
        let back = marginal_decode(&enc.streams, &enc.tables, g, part, samples.len()).unwrap();
        assert_eq!(back, samples);
        enc
    }

    fn empirical_marginal_sum(ys: &[u32], d: u32) -> f64 {
        (0..d)
            .map(|j| {
                let zeros = ys.iter().filter(|&&y| (y >> j) & 1 == 0).count();
                binary_entropy_clamped(zeros as f64 / ys.len() as f64)
            })
            .sum()
    }

    #[test]
    fn independent_bits_per_bit_coding() {
        let d = 6;
        let p = JointDistribution::product(&[0.1, 0.3, 0.5, 0.7, 0.85, 0.6]).unwrap();
        let xs = CategoricalSampler::new(&p).unwrap().sample_n(20_000, 1);
        let g = PermutationTransform::from(crate::dist::SymbolPermutation::identity(d).unwrap());
        let part = BlockPartition::contiguous(d, 1).unwrap();
        let enc = round_trip(&xs, &g, &part);
        let ideal = xs.len() as f64 * empirical_marginal_sum(&xs, d);
        assert!(enc.cost.data_bits >= ideal - 1.0);
        assert!(
            enc.cost.data_bits <= ideal + 2.0 * d as f64,
            "{} vs {ideal}",
            enc.cost.data_bits
        );
    }

    #[test]
    fn single_block_is_whole_alphabet_coding() {
        let p = zipf_distribution(256, 1.0).unwrap();
        let xs = CategoricalSampler::new(&p).unwrap().sample_n(5000, 2);
        let g = PermutationTransform::from(crate::dist::SymbolPermutation::identity(8).unwrap());
        let part = BlockPartition::contiguous(8, 8).unwrap();
        let enc = round_trip(&xs, &g, &part);
        let mut counts = vec![0u64; 256];
        for &x in &xs {
            counts[x as usize] += 1;
        }
        let table = FrequencyTable::from_counts(&counts).unwrap();
        let mut whole = ArithmeticEncoder::new();
        for &x in &xs {
            whole.encode(&table, x).unwrap();
        }
        assert_eq!(enc.streams[0], whole.finish());
    }

    #[test]
    fn two_blocks_between_joint_and_marginal_rates() {
        let p = zipf_distribution(1 << 16, 1.2).unwrap();
        let xs = CategoricalSampler::new(&p).unwrap().sample_n(100_000, 3);
        let g = PermutationTransform::from(order_permutation(&p).permutation);
        let part = BlockPartition::contiguous(16, 8).unwrap();
        let enc = round_trip(&xs, &g, &part);
        let n = xs.len() as f64;
        let mut counts = std::collections::HashMap::new();
        for &x in &xs {
            *counts.entry(x).or_insert(0u64) += 1;
        }
        let joint = ideal_code_length(&counts.into_values().collect::<Vec<_>>()) / n;
        let ys: Vec<u32> = xs.iter().map(|&x| g.forward(x)).collect();
        let marginal = empirical_marginal_sum(&ys, 16);
        let rate = enc.cost.data_bits / n;
        assert!(
            joint <= rate && rate <= marginal,
            "{joint} {rate} {marginal}"
        );
    }

    #[test]
    fn merging_blocks_never_costs_more() {
        let p = zipf_distribution(1 << 12, 1.0).unwrap();
        let xs = CategoricalSampler::new(&p).unwrap().sample_n(30_000, 4);
        let g = PermutationTransform::from(order_permutation(&p).permutation);
        for chain in [[1, 2, 4, 12], [1, 3, 6, 12]] {
            let mut prev = f64::INFINITY;
            let mut prev_blocks = 0;
            for b in chain {
                let part = BlockPartition::contiguous(12, b).unwrap();
                let enc = round_trip(&xs, &g, &part);
                assert!(
                    enc.cost.data_bits <= prev + 2.0 * prev_blocks as f64,
                    "b={b}"
                );
                prev = enc.cost.data_bits;
                prev_blocks = part.num_blocks();
            }
        }
    }

    #[test]
    fn empty_and_invalid_inputs() {
        let g = PermutationTransform::from(crate::dist::SymbolPermutation::identity(4).unwrap());
        let part = BlockPartition::contiguous(4, 2).unwrap();
        let enc = round_trip(&[], &g, &part);
        assert_eq!(enc.streams.len(), 2);
        assert!(marginal_encode(&[16], &g, &part).is_err());
        let wrong = BlockPartition::contiguous(5, 2).unwrap();
        assert!(matches!(
            marginal_encode(&[1], &g, &wrong),
            Err(Error::InvalidPartition(_))
        ));
    }
}
