//! Invertible transforms built from bit shuffles and per-block symbol maps.
//!
//! Serialized layout (integers little-endian):
//!
//! ```text
//! u32 stage count
//! per stage:
//!   d × u8      shuffle: output bit j takes input bit shuffle[j]
//!   u16         block count
//!   per block:  u8 width w, u8 has_map, then (if has_map) 2^w entries of
//!               ⌈w/8⌉ bytes each
//! ```
//!
//! Blocks are consecutive bit ranges of the shuffled word, starting at bit 0.

use crate::coding::SymbolTransform;
use crate::dist::SymbolPermutation;
use crate::error::{Error, Result};

/// One shuffle followed by optional per-block maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    shuffle: Vec<u32>,
    unshuffle: Vec<u32>,
    widths: Vec<u32>,
    maps: Vec<Option<SymbolPermutation>>,
    inverse_maps: Vec<Option<SymbolPermutation>>,
}

impl Stage {
    pub fn new(
        shuffle: Vec<u32>,
        widths: Vec<u32>,
        maps: Vec<Option<SymbolPermutation>>,
    ) -> Result<Self> {
        let d = shuffle.len();
        let mut unshuffle = vec![u32::MAX; d];
        for (j, &src) in shuffle.iter().enumerate() {
            if src as usize >= d || unshuffle[src as usize] != u32::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "{shuffle:?} is not a shuffle of {d} positions"
                )));
            }
            unshuffle[src as usize] = j as u32;
        }
        if widths.iter().sum::<u32>() as usize != d || widths.contains(&0) {
            return Err(Error::InvalidPartition(format!(
                "block widths {widths:?} do not tile {d} bits"
            )));
        }
        if maps.len() != widths.len() {
            return Err(Error::DimensionMismatch {
                expected: widths.len(),
                got: maps.len(),
            });
        }
        for (map, &w) in maps.iter().zip(&widths) {
            if let Some(g) = map {
                if g.d() != w {
                    return Err(Error::DimensionMismatch {
                        expected: w as usize,
                        got: g.d() as usize,
                    });
                }
            }
        }
        let inverse_maps = maps
            .iter()
            .map(|g| g.as_ref().map(|g| g.inverse()))
            .collect();
        Ok(Self {
            shuffle,
            unshuffle,
            widths,
            maps,
            inverse_maps,
        })
    }

    /// A stage that only permutes bit positions.
    pub fn shuffle_only(shuffle: Vec<u32>, widths: Vec<u32>) -> Result<Self> {
        let maps = vec![None; widths.len()];
        Self::new(shuffle, widths, maps)
    }

    pub fn d(&self) -> u32 {
        self.shuffle.len() as u32
    }

    pub fn shuffle(&self) -> &[u32] {
        &self.shuffle
    }

    pub fn widths(&self) -> &[u32] {
        &self.widths
    }

    pub fn maps(&self) -> &[Option<SymbolPermutation>] {
        &self.maps
    }

    /// Number of blocks carrying a map.
    pub fn mapped_blocks(&self) -> usize {
        self.maps.iter().filter(|m| m.is_some()).count()
    }

    #[inline]
    fn permute_bits(x: u32, order: &[u32]) -> u32 {
        order
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &src)| acc | (((x >> src) & 1) << j))
    }

    fn map_blocks(&self, mut y: u32, maps: &[Option<SymbolPermutation>]) -> u32 {
        let mut off = 0;
        for (map, &w) in maps.iter().zip(&self.widths) {
            if let Some(g) = map {
                let mask = ((1u64 << w) - 1) as u32;
                let v = (y >> off) & mask;
                y = (y & !(mask << off)) | (g.apply(v) << off);
            }
            off += w;
        }
        y
    }

    #[inline]
    pub fn forward(&self, x: u32) -> u32 {
        self.map_blocks(Self::permute_bits(x, &self.shuffle), &self.maps)
    }

    #[inline]
    pub fn inverse(&self, y: u32) -> u32 {
        Self::permute_bits(self.map_blocks(y, &self.inverse_maps), &self.unshuffle)
    }
}

/// Composition of stages, applied in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformChain {
    d: u32,
    stages: Vec<Stage>,
}

impl TransformChain {
    pub fn identity(d: u32) -> Self {
        Self {
            d,
            stages: Vec::new(),
        }
    }

    pub fn push(&mut self, stage: Stage) -> Result<()> {
        if stage.d() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d as usize,
                got: stage.d() as usize,
            });
        }
        self.stages.push(stage);
        Ok(())
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Block widths of the last stage, or a single block when empty.
    pub fn final_widths(&self) -> Vec<u32> {
        self.stages
            .last()
            .map_or_else(|| vec![self.d], |s| s.widths().to_vec())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.stages.len() as u32).to_le_bytes());
        for st in &self.stages {
            out.extend(st.shuffle.iter().map(|&j| j as u8));
            out.extend_from_slice(&(st.widths.len() as u16).to_le_bytes());
            for (map, &w) in st.maps.iter().zip(&st.widths) {
                out.push(w as u8);
                match map {
                    None => out.push(0),
                    Some(g) => {
                        out.push(1);
                        let width = (w as usize).div_ceil(8);
                        for &t in g.map() {
                            out.extend_from_slice(&t.to_le_bytes()[..width]);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_bytes(d: u32, bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        let count = u32::from_le_bytes(cur.take(4)?.try_into().unwrap());
        let mut chain = Self::identity(d);
        for _ in 0..count {
            let shuffle: Vec<u32> = cur.take(d as usize)?.iter().map(|&b| b as u32).collect();
            let nblocks = u16::from_le_bytes(cur.take(2)?.try_into().unwrap());
            let mut widths = Vec::with_capacity(nblocks as usize);
            let mut maps = Vec::with_capacity(nblocks as usize);
            for _ in 0..nblocks {
                let w = cur.take(1)?[0] as u32;
                if w == 0 || w > d {
                    return Err(Error::Format(format!("block width {w}")));
                }
                widths.push(w);
                maps.push(match cur.take(1)?[0] {
                    0 => None,
                    1 => {
                        let width = (w as usize).div_ceil(8);
                        let raw = cur.take(width << w)?;
                        let map = raw
                            .chunks_exact(width)
                            .map(|c| {
                                let mut le = [0u8; 4];
                                le[..width].copy_from_slice(c);
                                u32::from_le_bytes(le)
                            })
                            .collect();
                        Some(
                            SymbolPermutation::from_map(map)
                                .map_err(|e| Error::Format(format!("block map: {e}")))?,
                        )
                    }
                    f => return Err(Error::Format(format!("map flag {f}"))),
                });
            }
            let stage =
                Stage::new(shuffle, widths, maps).map_err(|e| Error::Format(e.to_string()))?;
            chain.push(stage)?;
        }
        if cur.pos != bytes.len() {
            return Err(Error::Format("trailing bytes after transform".into()));
        }
        Ok(chain)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("transform descriptor truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
}

impl SymbolTransform for TransformChain {
    fn d(&self) -> u32 {
        self.d
    }

    fn forward(&self, x: u32) -> u32 {
        self.stages.iter().fold(x, |y, st| st.forward(y))
    }

    fn inverse(&self, y: u32) -> u32 {
        self.stages.iter().rev().fold(y, |x, st| st.inverse(x))
    }
}
