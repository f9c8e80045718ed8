//! MSB-first bit streams.

use crate::error::{Error, Result};

/// A finished bit string: `len_bits` bits packed MSB-first into `bytes`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitBuf {
    pub bytes: Vec<u8>,
    pub len_bits: u64,
}

impl BitBuf {
    pub fn reader(&self) -> BitReader<'_> {
        BitReader::with_len(&self.bytes, self.len_bits)
    }
}

#[derive(Debug, Clone, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len_bits: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len_bits(&self) -> u64 {
        self.len_bits
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        let offset = (self.len_bits % 8) as u8;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.len_bits += 1;
    }

    /// Writes the low `n` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 64);
        for i in (0..n).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    /// `n` ones followed by a zero.
    pub fn write_unary(&mut self, n: u64) {
        for _ in 0..n {
            self.write_bit(true);
        }
        self.write_bit(false);
    }

    pub fn finish(self) -> BitBuf {
        BitBuf {
            bytes: self.bytes,
            len_bits: self.len_bits,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    len_bits: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self::with_len(bytes, bytes.len() as u64 * 8)
    }

    pub fn with_len(bytes: &'a [u8], len_bits: u64) -> Self {
        Self {
            bytes,
            pos: 0,
            len_bits: len_bits.min(bytes.len() as u64 * 8),
        }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.len_bits - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.len_bits {
            return Err(Error::Format("bit stream ended early".into()));
        }
        Ok(self.read_bit_or_zero())
    }

    /// Next bit, or zero once the stream is exhausted.
    #[inline]
    pub fn read_bit_or_zero(&mut self) -> bool {
        if self.pos >= self.len_bits {
            return false;
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = (byte >> (7 - self.pos % 8)) & 1 == 1;
        self.pos += 1;
        bit
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    /// Counts ones up to the terminating zero.
    pub fn read_unary(&mut self) -> Result<u64> {
        let mut n = 0;
        while self.read_bit()? {
            n += 1;
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_packing() {
        let mut w = BitWriter::new();
        w.write_bits(0b101, 3);
        w.write_unary(2);
        w.write_bits(0xABCD, 16);
        let buf = w.finish();
        assert_eq!(buf.len_bits, 22);
        assert_eq!(buf.bytes[0], 0b1011_1000 | 0b10);
        let mut r = buf.reader();
        assert_eq!(r.read_bits(3).unwrap(), 0b101);
        assert_eq!(r.read_unary().unwrap(), 2);
        assert_eq!(r.read_bits(16).unwrap(), 0xABCD);
        assert!(r.read_bit().is_err());
        assert!(!r.read_bit_or_zero());
    }
}
