//! Lossy coding: entropy-constrained vector quantization, its marginal-coded
//! variant, and fixed lattice quantizers with their rate accounting.

mod ecvq;
mod lattice;
mod rate;

pub use ecvq::{
    bica_ecvq_fit, bica_ecvq_fit_with, ecvq_fit, BicaEcvqFit, QuantizerState, MAX_SWEEPS,
    STOP_TOLERANCE,
};
pub use lattice::{lattice_quantize, Lattice, LatticeKind, LatticeQuantization, DEFAULT_RADIUS};
pub use rate::{gaussian_rd, lattice_rate_report, rate_of, Coder, RateReport};

use crate::error::{Error, Result};

/// `n` points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if data.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: data.len() % dim,
            });
        }
        if let Some(x) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coordinate {x}")));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: r.len(),
            });
        }
        Self::new(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
