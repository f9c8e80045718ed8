//! Assignment of the `d` bit positions of a symbol to blocks.

use crate::error::{Error, Result};

/// Blocks of bit positions covering `0..d` exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    d: u32,
    blocks: Vec<Vec<u32>>,
}

impl BlockPartition {
    /// `blocks[v]` lists the positions of block `v`; bit `t` of the block
    /// value is bit `blocks[v][t]` of the symbol.
    pub fn new(d: u32, blocks: Vec<Vec<u32>>) -> Result<Self> {
        if d == 0 || d > 32 {
            return Err(Error::InvalidPartition(format!("d = {d} outside 1..=32")));
        }
        let mut seen = vec![false; d as usize];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &j in block {
                if j >= d {
                    return Err(Error::InvalidPartition(format!(
                        "position {j} outside 0..{d}"
                    )));
                }
                if std::mem::replace(&mut seen[j as usize], true) {
                    return Err(Error::InvalidPartition(format!(
                        "position {j} appears twice"
                    )));
                }
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("position {j} not covered")));
        }
        Ok(Self { d, blocks })
    }

    /// Consecutive groups of `b` positions starting at bit 0; the last
    /// group is narrower when `b` does not divide `d`.
    pub fn contiguous(d: u32, b: u32) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidPartition(
                "block width must be positive".into(),
            ));
        }
        let blocks = (0..d)
            .step_by(b as usize)
            .map(|lo| (lo..(lo + b).min(d)).collect())
            .collect();
        Self::new(d, blocks)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn widths(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.len() as u32).collect()
    }

    /// Width of the widest block.
    pub fn b(&self) -> u32 {
        self.widths().into_iter().max().unwrap_or(0)
    }

    /// All positions, block by block.
    pub fn assignment(&self) -> Vec<u32> {
        self.blocks.concat()
    }

    pub fn is_contiguous(&self) -> bool {
        self.assignment()
            .iter()
            .enumerate()
            .all(|(i, &j)| i as u32 == j)
    }

    /// Value of block `v` in symbol `y`.
    #[inline]
    pub fn extract(&self, y: u32, v: usize) -> u32 {
        self.blocks[v]
            .iter()
            .enumerate()
            .fold(0, |acc, (t, &j)| acc | (((y >> j) & 1) << t))
    }

    /// Inverse of [`Self::extract`] over all blocks.
    pub fn assemble(&self, values: &[u32]) -> u32 {
        self.blocks
            .iter()
            .zip(values)
            .fold(0, |acc, (block, &val)| {
                block
                    .iter()
                    .enumerate()
                    .fold(acc, |acc, (t, &j)| acc | (((val >> t) & 1) << j))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_layout() {
        let p = BlockPartition::contiguous(10, 4).unwrap();
        assert_eq!(p.widths(), vec![4, 4, 2]);
        assert_eq!(p.b(), 4);
        assert!(p.is_contiguous());
        let y = 0b10_1101_0110;
        assert_eq!(p.extract(y, 0), 0b0110);
        assert_eq!(p.extract(y, 1), 0b1101);
        assert_eq!(p.extract(y, 2), 0b10);
        assert_eq!(p.assemble(&[0b0110, 0b1101, 0b10]), y);
    }

    #[test]
    fn scattered_round_trip() {
        let p = BlockPartition::new(5, vec![vec![4, 0], vec![2, 3, 1]]).unwrap();
        assert!(!p.is_contiguous());
        for y in 0..32 {
            let vals: Vec<u32> = (0..2).map(|v| p.extract(y, v)).collect();
            assert_eq!(p.assemble(&vals), y);
        }
    }

    #[test]
    fn validation() {
        assert!(BlockPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(BlockPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(BlockPartition::new(3, vec![vec![0, 1, 3]]).is_err());
        assert!(BlockPartition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(BlockPartition::contiguous(4, 0).is_err());
    }
}
