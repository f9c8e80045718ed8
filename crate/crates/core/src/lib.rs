//! Large-alphabet source coding through binary independent component
//! decomposition.
//!
//! A source over `m = 2^d` symbols is pushed through an invertible symbol map
//! chosen so that its `d` output bits are close to independent, and the bits
//! (or small blocks of bits) are then entropy coded separately.
//!
//! The crate is organised by concern:
//!
//! - [`dist`]: joint distributions, symbol permutations, entropy functionals.
//! - [`bica`]: searches for the symbol permutation minimizing the sum of
//!   marginal bit entropies.
//! - [`bounds`]: closed-form redundancy and average-case results, with their
//!   Monte Carlo counterparts.
//! - [`coding`]: Huffman, canonical Huffman and arithmetic coders, bit cost
//!   accounting and the compressed container.
//! - [`universal`]: the iterative shuffle-and-transform block pipeline.
//! - [`vq`]: entropy-constrained and lattice vector quantization.
//! - [`corpus`]: source samplers and dataset plumbing.
//! - [`experiments`]: drivers shared by the CLI and the acceptance tests.

pub mod bica;
pub mod bounds;
pub mod coding;
pub mod corpus;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod numeric;
pub mod partition;
pub mod universal;
pub mod vq;

pub use bica::{SearchMethod, SearchResult};
pub use coding::BitCost;
pub use dist::{JointDistribution, MarginalProfile, SymbolPermutation};
pub use error::{Error, Result};
pub use partition::BlockPartition;
