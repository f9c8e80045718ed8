//! Lossless coders and exact bit accounting.
//!
//! [`huffman`] and [`canonical`] build prefix codes and their compact
//! codebooks, [`arith`] is a static-model arithmetic coder, [`marginal`]
//! codes a transformed source block by block, and [`container`] wraps the
//! result in a self-describing byte stream.

pub mod arith;
pub mod bitio;
pub mod canonical;
pub mod container;
pub mod huffman;
pub mod marginal;

pub use arith::{
    arithmetic_decode, arithmetic_encode, ideal_code_length, ArithmeticDecoder, ArithmeticEncoder,
    FrequencyTable, DEFAULT_MAX_ALPHABET,
};
pub use bitio::{BitBuf, BitReader, BitWriter};
pub use canonical::{canonicalize, CanonicalCodebook};
pub use huffman::{huffman_build, PrefixCode};
pub use marginal::{marginal_decode, marginal_encode, MarginalEncoding, SymbolTransform};

/// Two-part code length: the payload plus everything needed to decode it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BitCost {
    pub data_bits: f64,
    pub overhead_bits: f64,
    pub total: f64,
}

impl BitCost {
    pub fn new(data_bits: f64, overhead_bits: f64) -> Self {
        Self {
            data_bits,
            overhead_bits,
            total: data_bits + overhead_bits,
        }
    }
}
