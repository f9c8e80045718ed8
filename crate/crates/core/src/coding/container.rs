//! Self-describing compressed container.
//!
//! Layout (integers little-endian):
//!
//! ```text
//! "LABC"          magic
//! u8              version (1)
//! u8              kind: 0 = sample dump, 1 = raw bytes
//! u8              d
//! u16             block count B
//! u64             sample count n
//! u32 + bytes     transform descriptor (see `universal::TransformChain`)
//! B × block header:
//!   u8            width w
//!   w × u8        bit positions of the block, low bit first
//!   u32           number of non-zero frequencies
//!   (u32, u32)×   symbol and frequency
//!   u64           stream length in bits
//! B × stream      each padded to a whole byte
//! ```

use crate::bica::SearchMethod;
use crate::coding::arith::FrequencyTable;
use crate::coding::bitio::BitBuf;
use crate::coding::marginal::{marginal_decode, marginal_encode};
use crate::coding::BitCost;
use crate::corpus::{parse_dump, write_dump};
use crate::error::{Error, Result};
use crate::partition::BlockPartition;
use crate::universal::{descend, DescendConfig, TransformChain};

pub const MAGIC: &[u8; 4] = b"LABC";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum PayloadKind {
    Dump = 0,
    RawBytes = 1,
}

/// Transform search settings for [`compress`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompressOptions {
    /// Bits per block; capped at `d`.
    pub b: u32,
    /// Shuffle-and-transform iterations; 0 codes the samples as they are.
    pub iters: usize,
    /// Per-block search; `None` picks by block width.
    pub method: Option<SearchMethod>,
    pub seed: u64,
}

impl Default for CompressOptions {
    fn default() -> Self {
        Self {
            b: 8,
            iters: 8,
            method: None,
            seed: 0,
        }
    }
}

/// Result of [`compress_symbols`].
#[derive(Debug, Clone)]
pub struct Compressed {
    pub bytes: Vec<u8>,
    pub cost: BitCost,
}

/// Compresses a sample dump, or any other input as raw bytes.
pub fn compress(input: &[u8], opts: &CompressOptions) -> Result<Vec<u8>> {
    let (kind, d, symbols) = match parse_dump(input) {
        Ok((d, symbols)) => (PayloadKind::Dump, d, symbols),
        Err(_) => (
            PayloadKind::RawBytes,
            8,
            input.iter().map(|&b| b as u32).collect(),
        ),
    };
    Ok(compress_symbols(kind, d, &symbols, opts)?.bytes)
}

/// Chooses a transform for `symbols` and writes the container.
pub fn compress_symbols(
    kind: PayloadKind,
    d: u32,
    symbols: &[u32],
    opts: &CompressOptions,
) -> Result<Compressed> {
    if d == 0 || d > 32 {
        return Err(Error::InvalidArgument(format!("d = {d} outside 1..=32")));
    }
    let b = opts.b.clamp(1, d.min(16));
    let (chain, widths) = if opts.iters == 0 || symbols.is_empty() {
        let widths: Vec<u32> = (0..d).step_by(b as usize).map(|lo| b.min(d - lo)).collect();
        (TransformChain::identity(d), widths)
    } else {
        let cfg = DescendConfig {
            b,
            max_iters: opts.iters,
            method: opts.method,
            seed: opts.seed,
            ..Default::default()
        };
        let run = descend(symbols, d, &cfg)?;
        (run.chain, run.widths)
    };
    let blocks = widths
        .iter()
        .scan(0u32, |off, &w| {
            let lo = *off;
            *off += w;
            Some((lo..lo + w).collect())
        })
        .collect();
    let partition = BlockPartition::new(d, blocks)?;
    let enc = marginal_encode(symbols, &chain, &partition)?;

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(kind as u8);
    out.push(d as u8);
    out.extend_from_slice(&(partition.num_blocks() as u16).to_le_bytes());
    out.extend_from_slice(&(symbols.len() as u64).to_le_bytes());
    let descriptor = chain.to_bytes();
    out.extend_from_slice(&(descriptor.len() as u32).to_le_bytes());
    out.extend_from_slice(&descriptor);
    for ((block, table), stream) in partition.blocks().iter().zip(&enc.tables).zip(&enc.streams) {
        out.push(block.len() as u8);
        out.extend(block.iter().map(|&j| j as u8));
        let nz: Vec<(u32, u64)> = table.nonzero().collect();
        out.extend_from_slice(&(nz.len() as u32).to_le_bytes());
        for (s, f) in nz {
            out.extend_from_slice(&s.to_le_bytes());
            out.extend_from_slice(&(f as u32).to_le_bytes());
        }
        out.extend_from_slice(&stream.len_bits.to_le_bytes());
    }
    for stream in &enc.streams {
        out.extend_from_slice(&stream.bytes);
    }
    let cost = BitCost::new(
        enc.cost.data_bits,
        (out.len() * 8) as f64 - enc.cost.data_bits,
    );
    Ok(Compressed { bytes: out, cost })
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("container truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Decoded container contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Decompressed {
    pub kind: PayloadKind,
    pub d: u32,
    pub symbols: Vec<u32>,
}

impl Decompressed {
    /// The bytes originally passed to [`compress`].
    pub fn into_bytes(self) -> Result<Vec<u8>> {
        match self.kind {
            PayloadKind::RawBytes => Ok(self.symbols.iter().map(|&s| s as u8).collect()),
            PayloadKind::Dump => {
                let mut out = Vec::new();
                write_dump(&mut out, self.d, &self.symbols)?;
                Ok(out)
            }
        }
    }
}

/// Parses and decodes a container.
pub fn decompress_symbols(bytes: &[u8]) -> Result<Decompressed> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.u8()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = match r.u8()? {
        0 => PayloadKind::Dump,
        1 => PayloadKind::RawBytes,
        k => return Err(Error::Format(format!("unknown payload kind {k}"))),
    };
    let d = r.u8()? as u32;
    if d == 0 || d > 32 || (kind == PayloadKind::RawBytes && d != 8) {
        return Err(Error::Format(format!("bad symbol width {d}")));
    }
    let nblocks = r.u16()? as usize;
    let n = usize::try_from(r.u64()?).map_err(|_| Error::Format("sample count".into()))?;
    let tlen = r.u32()? as usize;
    let chain = TransformChain::from_bytes(d, r.take(tlen)?)?;

    let mut blocks = Vec::with_capacity(nblocks);
    let mut tables = Vec::with_capacity(nblocks);
    let mut lens = Vec::with_capacity(nblocks);
    for _ in 0..nblocks {
        let w = r.u8()? as u32;
        if w == 0 || w > 16 {
            return Err(Error::Format(format!("block width {w}")));
        }
        blocks.push(
            r.take(w as usize)?
                .iter()
                .map(|&j| j as u32)
                .collect::<Vec<_>>(),
        );
        let nnz = r.u32()? as usize;
        let mut freqs = vec![0u64; 1 << w];
        for _ in 0..nnz {
            let s = r.u32()? as usize;
            let f = r.u32()? as u64;
            if s >= freqs.len() {
                return Err(Error::Format(format!("table symbol {s} out of range")));
            }
            freqs[s] = f;
        }
        tables.push(FrequencyTable::from_counts(&freqs).map_err(|e| Error::Format(e.to_string()))?);
        lens.push(r.u64()?);
    }
    let partition = BlockPartition::new(d, blocks).map_err(|e| Error::Format(e.to_string()))?;
    let mut streams = Vec::with_capacity(nblocks);
    for &len in &lens {
        let nbytes =
            usize::try_from(len.div_ceil(8)).map_err(|_| Error::Format("stream length".into()))?;
        streams.push(BitBuf {
            bytes: r.take(nbytes)?.to_vec(),
            len_bits: len,
        });
    }
    if r.pos != bytes.len() {
        return Err(Error::Format("trailing bytes".into()));
    }
    let symbols = marginal_decode(&streams, &tables, &chain, &partition, n)?;
    if let Some(&s) = symbols.iter().find(|&&s| d < 32 && s >> d != 0) {
        return Err(Error::Format(format!(
            "decoded symbol {s} wider than {d} bits"
        )));
    }
    Ok(Decompressed { kind, d, symbols })
}

/// Inverse of [`compress`].
pub fn decompress(bytes: &[u8]) -> Result<Vec<u8>> {
    decompress_symbols(bytes)?.into_bytes()
}
