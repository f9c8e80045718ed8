//! Static-model binary arithmetic coder with 32-bit code values held in
//! 64-bit registers.
//!
//! Frequency totals are kept at or below 2^24 so that `range · cumulative`
//! never overflows. Termination emits the pending bits plus two, and the
//! decoder reads zeros past the end of its input.

use crate::error::{Error, Result};

use super::bitio::{BitBuf, BitReader, BitWriter};

const CODE_BITS: u32 = 32;
const TOP: u64 = (1 << CODE_BITS) - 1;
const HALF: u64 = 1 << (CODE_BITS - 1);
const QUARTER: u64 = 1 << (CODE_BITS - 2);

/// Largest frequency total before counts are rescaled.
pub const MAX_TOTAL: u64 = 1 << 24;

/// Default cap on the coded alphabet size.
pub const DEFAULT_MAX_ALPHABET: usize = 1 << 16;

/// Cumulative frequency table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    cum: Vec<u64>,
}

impl FrequencyTable {
    /// Table from raw counts with the default alphabet cap.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        Self::from_counts_with_cap(counts, DEFAULT_MAX_ALPHABET)
    }

    /// Table from raw counts. Totals above [`MAX_TOTAL`] are scaled down,
    /// keeping every non-zero count at least 1. Tables with totals within
    /// the limit are taken as given.
    pub fn from_counts_with_cap(counts: &[u64], max_alphabet: usize) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if counts.len() > max_alphabet {
            return Err(Error::TooLarge {
                what: "arithmetic coder alphabet",
                value: counts.len() as u64,
                limit: max_alphabet as u64,
            });
        }
        let total: u128 = counts.iter().map(|&c| c as u128).sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("all counts are zero".into()));
        }
        let scaled: Vec<u64> = if total > MAX_TOTAL as u128 {
            // Leave room for the counts bumped up to 1, so the result stays
            // within MAX_TOTAL and rescaling it again is a no-op.
            let nonzero = counts.iter().filter(|&&c| c > 0).count() as u128;
            let target = MAX_TOTAL as u128 - nonzero;
            counts
                .iter()
                .map(|&c| {
                    if c == 0 {
                        0
                    } else {
                        ((c as u128 * target / total) as u64).max(1)
                    }
                })
                .collect()
        } else {
            counts.to_vec()
        };
        let mut cum = Vec::with_capacity(scaled.len() + 1);
        cum.push(0);
        let mut acc = 0u64;
        for f in scaled {
            acc += f;
            cum.push(acc);
        }
        Ok(Self { cum })
    }

    /// Table approximating a probability vector at resolution 2^-24.
    pub fn from_probs(p: &[f64]) -> Result<Self> {
        if let Some(q) = p.iter().find(|q| !q.is_finite() || **q < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weight {q} is not a finite non-negative number"
            )));
        }
        let total: f64 = p.iter().sum();
        let counts: Vec<u64> = p
            .iter()
            .map(|&q| {
                if q > 0.0 {
                    ((q / total * MAX_TOTAL as f64).round() as u64).max(1)
                } else {
                    0
                }
            })
            .collect();
        Self::from_counts_with_cap(&counts, usize::MAX)
    }

    pub fn len(&self) -> usize {
        self.cum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> u64 {
        *self.cum.last().unwrap()
    }

    pub fn freq(&self, s: usize) -> u64 {
        self.cum[s + 1] - self.cum[s]
    }

    /// Symbols with non-zero frequency as `(symbol, frequency)` pairs.
    pub fn nonzero(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        (0..self.len())
            .map(|s| (s as u32, self.freq(s)))
            .filter(|&(_, f)| f > 0)
    }

    /// `−log2(freq/total)` of each symbol (infinite for zero frequency).
    pub fn model_lengths(&self) -> Vec<f64> {
        let t = self.total() as f64;
        (0..self.len())
            .map(|s| -(self.freq(s) as f64 / t).log2())
            .collect()
    }

    fn interval(&self, s: u32) -> Result<(u64, u64)> {
        let s = s as usize;
        if s >= self.len() {
            return Err(Error::SymbolOutOfRange {
                symbol: s as u64,
                size: self.len() as u64,
            });
        }
        let (lo, hi) = (self.cum[s], self.cum[s + 1]);
        if lo == hi {
            return Err(Error::ZeroProbabilitySymbol(s as u64));
        }
        Ok((lo, hi))
    }
}

#[derive(Debug)]
pub struct ArithmeticEncoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitWriter,
}

impl Default for ArithmeticEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl ArithmeticEncoder {
    pub fn new() -> Self {
        Self {
            low: 0,
            high: TOP,
            pending: 0,
            out: BitWriter::new(),
        }
    }

    fn emit(&mut self, bit: bool) {
        self.out.write_bit(bit);
        for _ in 0..self.pending {
            self.out.write_bit(!bit);
        }
        self.pending = 0;
    }

    pub fn encode(&mut self, table: &FrequencyTable, s: u32) -> Result<()> {
        let (lo, hi) = table.interval(s)?;
        let total = table.total();
        let range = self.high - self.low + 1;
        self.high = self.low + range * hi / total - 1;
        self.low += range * lo / total;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
        Ok(())
    }

    /// Flushes the final interval and returns the stream.
    pub fn finish(mut self) -> BitBuf {
        self.pending += 1;
        self.emit(self.low >= QUARTER);
        self.out.finish()
    }

    /// As [`Self::finish`], also returning the number of termination bits.
    pub fn finish_with_stats(self) -> (BitBuf, u64) {
        let pending = self.pending;
        let buf = self.finish();
        (buf, pending + 2)
    }
}

#[derive(Debug)]
pub struct ArithmeticDecoder<'a> {
    low: u64,
    high: u64,
    value: u64,
    input: BitReader<'a>,
}

impl<'a> ArithmeticDecoder<'a> {
    pub fn new(mut input: BitReader<'a>) -> Self {
        let mut value = 0u64;
        for _ in 0..CODE_BITS {
            value = (value << 1) | input.read_bit_or_zero() as u64;
        }
        Self {
            low: 0,
            high: TOP,
            value,
            input,
        }
    }

    pub fn decode(&mut self, table: &FrequencyTable) -> Result<u32> {
        let total = table.total();
        let range = self.high - self.low + 1;
        let target = ((self.value - self.low + 1) * total - 1) / range;
        let s = table.cum.partition_point(|&c| c <= target) - 1;
        if s >= table.len() {
            return Err(Error::Format("arithmetic code value out of range".into()));
        }
        let (lo, hi) = (table.cum[s], table.cum[s + 1]);
        self.high = self.low + range * hi / total - 1;
        self.low += range * lo / total;
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.value -= HALF;
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.value -= QUARTER;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.input.read_bit_or_zero() as u64;
        }
        Ok(s as u32)
    }
}

/// Encodes `symbols` against a static model built from `p`.
pub fn arithmetic_encode(symbols: &[u32], p: &[f64]) -> Result<BitBuf> {
    if p.len() > DEFAULT_MAX_ALPHABET {
        return Err(Error::TooLarge {
            what: "arithmetic coder alphabet",
            value: p.len() as u64,
            limit: DEFAULT_MAX_ALPHABET as u64,
        });
    }
    let table = FrequencyTable::from_probs(p)?;
    let mut enc = ArithmeticEncoder::new();
    for &s in symbols {
        enc.encode(&table, s)?;
    }
    Ok(enc.finish())
}

/// Decodes `n` symbols written by [`arithmetic_encode`] with the same `p`.
pub fn arithmetic_decode(bits: &BitBuf, p: &[f64], n: usize) -> Result<Vec<u32>> {
    let table = FrequencyTable::from_probs(p)?;
    let mut dec = ArithmeticDecoder::new(bits.reader());
    (0..n).map(|_| dec.decode(&table)).collect()
}

/// Ideal (non-integer) code length in bits of a sample with the given
/// symbol counts under its own empirical distribution: `Σ −c log2(c/n)`.
pub fn ideal_code_length(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| -(c as f64) * (c as f64 / n).log2())
        .sum()
}
