//! Huffman codes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

use super::bitio::{BitReader, BitWriter};

/// Longest codeword representable in a `u64`.
pub const MAX_CODE_LEN: u32 = 64;

/// Per-symbol codeword lengths and codewords; length 0 marks a symbol that
/// has no codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCode {
    pub lengths: Vec<u32>,
    pub codewords: Vec<u64>,
}

#[derive(PartialEq)]
struct Node {
    weight: f64,
    id: usize,
}

impl Eq for Node {}

impl Ord for Node {
    // Reversed so that `BinaryHeap` pops the lightest node, then the lowest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then(other.id.cmp(&self.id))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Builds a Huffman code. Zero-weight symbols get no codeword; a single
/// positive symbol gets the one-bit codeword `0`.
pub fn huffman_build(p: &[f64]) -> Result<PrefixCode> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(
            "empty probability vector".into(),
        ));
    }
    if let Some(q) = p.iter().find(|q| !q.is_finite() || **q < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "weight {q} is not a finite non-negative number"
        )));
    }
    let m = p.len();
    let mut lengths = vec![0u32; m];
    let mut codewords = vec![0u64; m];
    let live: Vec<usize> = (0..m).filter(|&s| p[s] > 0.0).collect();
    match live.len() {
        0 => {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        1 => {
            lengths[live[0]] = 1;
            return Ok(PrefixCode { lengths, codewords });
        }
        _ => {}
    }

    // Leaves are ids 0..m, internal nodes follow in creation order.
    let mut children: Vec<[usize; 2]> = Vec::with_capacity(live.len() - 1);
    let mut heap: BinaryHeap<Node> = live
        .iter()
        .map(|&s| Node {
            weight: p[s],
            id: s,
        })
        .collect();
    while heap.len() > 1 {
        let a = heap.pop().unwrap();
        let b = heap.pop().unwrap();
        children.push([a.id, b.id]);
        heap.push(Node {
            weight: a.weight + b.weight,
            id: m + children.len() - 1,
        });
    }

    let root = heap.pop().unwrap().id;
    let mut stack = vec![(root, 0u32, 0u64)];
    while let Some((id, depth, code)) = stack.pop() {
        if id < m {
            lengths[id] = depth;
            codewords[id] = code;
            continue;
        }
        if depth == MAX_CODE_LEN {
            return Err(Error::CodeTooLong(depth as usize + 1));
        }
        let [zero, one] = children[id - m];
        stack.push((one, depth + 1, (code << 1) | 1));
        stack.push((zero, depth + 1, code << 1));
    }
    Ok(PrefixCode { lengths, codewords })
}

impl PrefixCode {
    /// Checks that the codewords fit their lengths and are prefix-free.
    pub fn new(lengths: Vec<u32>, codewords: Vec<u64>) -> Result<Self> {
        if lengths.len() != codewords.len() {
            return Err(Error::DimensionMismatch {
                expected: lengths.len(),
                got: codewords.len(),
            });
        }
        if let Some(&l) = lengths.iter().find(|&&l| l > MAX_CODE_LEN) {
            return Err(Error::CodeTooLong(l as usize));
        }
        let code = Self { lengths, codewords };
        if code
            .lengths
            .iter()
            .zip(&code.codewords)
            .any(|(&l, &c)| l < 64 && c >> l != 0)
        {
            return Err(Error::InvalidArgument(
                "codeword longer than its length".into(),
            ));
        }
        if !code.is_prefix_free() {
            return Err(Error::InvalidArgument(
                "codewords are not prefix-free".into(),
            ));
        }
        Ok(code)
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn max_len(&self) -> u32 {
        self.lengths.iter().copied().max().unwrap_or(0)
    }

    /// Codeword of symbol `s` as a `0`/`1` string.
    pub fn codeword_string(&self, s: usize) -> String {
        let l = self.lengths[s];
        (0..l)
            .rev()
            .map(|i| {
                if (self.codewords[s] >> i) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    pub fn average_length(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(&self.lengths)
            .map(|(&q, &l)| q * l as f64)
            .sum()
    }

    /// `Σ 2^(−l)` over symbols that have a codeword.
    pub fn kraft_sum(&self) -> f64 {
        self.lengths
            .iter()
            .filter(|&&l| l > 0)
            .map(|&l| (-(l as f64)).exp2())
            .sum()
    }

    pub fn is_prefix_free(&self) -> bool {
        let mut words: Vec<(u32, u64)> = self
            .lengths
            .iter()
            .zip(&self.codewords)
            .filter(|(&l, _)| l > 0)
            .map(|(&l, &c)| (l, c))
            .collect();
        // Left-aligned, a prefix sorts immediately before some word it
        // prefixes, so checking neighbours suffices.
        words.sort_by_key(|&(l, c)| (if l == 64 { c } else { c << (64 - l) }, l));
        words.windows(2).all(|w| {
            let (la, ca) = w[0];
            let (lb, cb) = w[1];
            la > lb || cb >> (lb - la) != ca
        })
    }

    pub fn encode(&self, symbols: &[u32], w: &mut BitWriter) -> Result<()> {
        for &s in symbols {
            let l = *self
                .lengths
                .get(s as usize)
                .ok_or(Error::SymbolOutOfRange {
                    symbol: s as u64,
                    size: self.len() as u64,
                })?;
            if l == 0 {
                return Err(Error::ZeroProbabilitySymbol(s as u64));
            }
            w.write_bits(self.codewords[s as usize], l);
        }
        Ok(())
    }

    pub fn decoder(&self) -> PrefixDecoder {
        PrefixDecoder::new(self)
    }
}

const EMPTY: u32 = u32::MAX;
const LEAF: u32 = 1 << 31;

/// Binary trie over the codewords of a [`PrefixCode`].
#[derive(Debug, Clone)]
pub struct PrefixDecoder {
    nodes: Vec<[u32; 2]>,
}

impl PrefixDecoder {
    fn new(code: &PrefixCode) -> Self {
        let mut nodes = vec![[EMPTY; 2]];
        for (s, (&l, &c)) in code.lengths.iter().zip(&code.codewords).enumerate() {
            if l == 0 {
                continue;
            }
            let mut at = 0usize;
            for i in (0..l).rev() {
                let bit = ((c >> i) & 1) as usize;
                if i == 0 {
                    nodes[at][bit] = LEAF | s as u32;
                } else {
                    if nodes[at][bit] == EMPTY {
                        nodes.push([EMPTY; 2]);
                        nodes[at][bit] = (nodes.len() - 1) as u32;
                    }
                    at = nodes[at][bit] as usize;
                }
            }
        }
        Self { nodes }
    }

    pub fn decode_one(&self, r: &mut BitReader<'_>) -> Result<u32> {
        let mut at = 0usize;
        loop {
            let next = self.nodes[at][r.read_bit()? as usize];
            if next == EMPTY {
                return Err(Error::Format("bit pattern matches no codeword".into()));
            }
            if next & LEAF != 0 {
                return Ok(next & !LEAF);
            }
            at = next as usize;
        }
    }

    pub fn decode(&self, r: &mut BitReader<'_>, n: usize) -> Result<Vec<u32>> {
        (0..n).map(|_| self.decode_one(r)).collect()
    }
}
