//! Canonical Huffman codebooks.
//!
//! Wire format, MSB-first:
//!
//! 1. the longest length `L` in unary (`L` ones, then a zero);
//! 2. for each length `1..=L`, the number of symbols of that length in unary;
//! 3. the coded symbols sorted by `(length, index)`, each in `⌈log2 m⌉` bits.

use crate::error::{Error, Result};
use crate::numeric::index_bits;

use super::bitio::{BitReader, BitWriter};
use super::huffman::{PrefixCode, MAX_CODE_LEN};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalCodebook {
    m: usize,
    /// Non-empty length classes in increasing length order, each listing
    /// its symbols in increasing index order.
    pub symbols_by_length: Vec<(u32, Vec<u32>)>,
}

/// Renumbers a prefix code canonically, keeping every length.
pub fn canonicalize(code: &PrefixCode) -> CanonicalCodebook {
    let max = code.max_len() as usize;
    let mut classes: Vec<Vec<u32>> = vec![Vec::new(); max + 1];
    for (s, &l) in code.lengths.iter().enumerate() {
        if l > 0 {
            classes[l as usize].push(s as u32);
        }
    }
    CanonicalCodebook {
        m: code.len(),
        symbols_by_length: classes
            .into_iter()
            .enumerate()
            .filter(|(_, syms)| !syms.is_empty())
            .map(|(l, syms)| (l as u32, syms))
            .collect(),
    }
}

impl CanonicalCodebook {
    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn max_len(&self) -> u32 {
        self.symbols_by_length.last().map_or(0, |(l, _)| *l)
    }

    pub fn coded_symbols(&self) -> usize {
        self.symbols_by_length.iter().map(|(_, s)| s.len()).sum()
    }

    /// Consecutive codewords within each length class, starting from zero.
    pub fn to_prefix_code(&self) -> PrefixCode {
        let mut lengths = vec![0u32; self.m];
        let mut codewords = vec![0u64; self.m];
        let mut next = 0u64;
        let mut prev_len = 0u32;
        for (l, syms) in &self.symbols_by_length {
            next = if *l - prev_len >= 64 {
                0
            } else {
                next << (l - prev_len)
            };
            prev_len = *l;
            for &s in syms {
                lengths[s as usize] = *l;
                codewords[s as usize] = next;
                next = next.wrapping_add(1);
            }
        }
        PrefixCode { lengths, codewords }
    }

    /// Exact size of [`Self::serialize`] output.
    pub fn serialized_bits(&self) -> u64 {
        let l = self.max_len() as u64;
        let n = self.coded_symbols() as u64;
        (l + 1) + (n + l) + n * index_bits(self.m as u64) as u64
    }

    pub fn serialize(&self, w: &mut BitWriter) {
        let max = self.max_len();
        w.write_unary(max as u64);
        let mut classes = self.symbols_by_length.iter().peekable();
        for l in 1..=max {
            match classes.peek() {
                Some((cl, syms)) if *cl == l => {
                    w.write_unary(syms.len() as u64);
                    classes.next();
                }
                _ => w.write_unary(0),
            }
        }
        let width = index_bits(self.m as u64);
        for (_, syms) in &self.symbols_by_length {
            for &s in syms {
                w.write_bits(s as u64, width);
            }
        }
    }

    /// Reads a codebook for an alphabet of `m` symbols.
    pub fn deserialize(r: &mut BitReader<'_>, m: usize) -> Result<Self> {
        let max = r.read_unary()?;
        if max > MAX_CODE_LEN as u64 {
            return Err(Error::CodeTooLong(max as usize));
        }
        let mut counts = Vec::with_capacity(max as usize);
        for _ in 0..max {
            let c = r.read_unary()?;
            if c > m as u64 {
                return Err(Error::Format(format!("{c} codewords for {m} symbols")));
            }
            counts.push(c as usize);
        }
        let width = index_bits(m as u64);
        let mut seen = vec![false; m];
        let mut symbols_by_length = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut syms = Vec::with_capacity(c);
            for _ in 0..c {
                let s = r.read_bits(width)? as usize;
                if s >= m || std::mem::replace(&mut seen[s], true) {
                    return Err(Error::Format(format!("bad or repeated symbol {s}")));
                }
                if syms.last().is_some_and(|&prev| prev as usize > s) {
                    return Err(Error::Format("symbols out of canonical order".into()));
                }
                syms.push(s as u32);
            }
            symbols_by_length.push((i as u32 + 1, syms));
        }
        let book = Self {
            m,
            symbols_by_length,
        };
        if book.to_prefix_code().kraft_sum() > 1.0 {
            return Err(Error::Format(
                "codebook violates the Kraft inequality".into(),
            ));
        }
        Ok(book)
    }

    /// Size of a plain table listing every coded symbol with its length and
    /// codeword.
    pub fn naive_table_bits(&self) -> u64 {
        let len_field = index_bits(self.max_len() as u64 + 1) as u64;
        let sym_field = index_bits(self.m as u64) as u64;
        self.symbols_by_length
            .iter()
            .map(|(l, syms)| syms.len() as u64 * (sym_field + len_field + *l as u64))
            .sum()
    }
}
