//! Source samplers and dataset plumbing.
//!
//! Every random stream is derived from one root seed with [`derive_seed`],
//! so an experiment is replayable from a single integer. Categorical
//! sampling uses alias tables; the uniform simplex is sampled as normalized
//! unit exponentials.

use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::vq::Points;

/// Stream identifiers for [`derive_seed`].
pub mod stream {
    pub const SIMPLEX: u64 = 1;
    pub const SYMBOLS: u64 = 2;
    pub const SHUFFLE: u64 = 3;
    pub const POINTS: u64 = 4;
    pub const CLUSTER_INIT: u64 = 5;
    pub const MIXTURE: u64 = 6;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of draw `index` in stream `stream` under root seed `root`.
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(root ^ splitmix64(stream)).wrapping_add(index))
}

/// Generator for draw `index` of `stream`.
pub fn rng_for(root: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, stream, index))
}

/// `probs[k − 1] ∝ k^(−s)` for `k = 1..=m`, zero-padded to a power of two.
pub fn zipf_distribution(m: usize, s: f64) -> Result<JointDistribution> {
    if m < 1 {
        return Err(Error::InvalidArgument(
            "Zipf support must be non-empty".into(),
        ));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Zipf exponent must be positive, got {s}"
        )));
    }
    JointDistribution::from_weights((1..=m).map(|k| (k as f64).powf(-s)).collect())
}

/// A point drawn uniformly from the probability simplex over `m` symbols.
pub fn uniform_simplex<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// O(1) categorical sampler over the symbols of a distribution.
#[derive(Debug, Clone)]
pub struct CategoricalSampler {
    d: u32,
    alias: WeightedAliasIndex<f64>,
}

impl CategoricalSampler {
    pub fn new(p: &JointDistribution) -> Result<Self> {
        let alias = WeightedAliasIndex::new(p.probs().to_vec())
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        Ok(Self { d: p.d(), alias })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.alias.sample(rng) as u32
    }

    /// `n` draws from the [`stream::SYMBOLS`] stream of `seed`.
    pub fn sample_n(&self, n: usize, seed: u64) -> Vec<u32> {
        let mut rng = rng_for(seed, stream::SYMBOLS, 0);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }
}

/// Equal-weight Gaussian mixture with identity covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub means: Vec<Vec<f64>>,
}

impl GaussianMixture {
    /// Components centred at `±(1, .., 1)`, or at the origin for a single
    /// component. More components are spread along the diagonal between
    /// the two.
    pub fn diagonal(dim: usize, components: usize) -> Result<Self> {
        if dim == 0 || components == 0 {
            return Err(Error::InvalidArgument(
                "mixture needs a positive dimension and component count".into(),
            ));
        }
        let means = (0..components)
            .map(|c| {
                let t = if components == 1 {
                    0.0
                } else {
                    -1.0 + 2.0 * c as f64 / (components - 1) as f64
                };
                vec![t; dim]
            })
            .collect();
        Ok(Self { means })
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn sample_n(&self, n: usize, seed: u64) -> Points {
        let dim = self.dim();
        let mut rng = rng_for(seed, stream::MIXTURE, 0);
        let mut data = Vec::with_capacity(n * dim);
        for _ in 0..n {
            let c = rng.random_range(0..self.means.len());
            for &mu in &self.means[c] {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(mu + z);
            }
        }
        Points::new(dim, data).expect("dimension divides the buffer")
    }
}

/// `n` standard normal points in `dim` dimensions.
pub fn gaussian_points(dim: usize, n: usize, seed: u64) -> Result<Points> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut rng = rng_for(seed, stream::POINTS, 0);
    let data = (0..n * dim)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    Points::new(dim, data)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    Zipf { s: f64, m: usize },
    DirichletUniform { m: usize },
    GaussianMixture { dim: usize, components: usize },
    FrequencyList { path: PathBuf, d: Option<u32> },
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceKind::Zipf { s, m } => write!(f, "zipf:{s}:{m}"),
            SourceKind::DirichletUniform { m } => write!(f, "dirichlet:{m}"),
            SourceKind::GaussianMixture { dim, components } => {
                write!(f, "mixture:{dim}:{components}")
            }
            SourceKind::FrequencyList { path, d: None } => write!(f, "freq:{}", path.display()),
            SourceKind::FrequencyList { path, d: Some(d) } => {
                write!(f, "freq:{}:{d}", path.display())
            }
        }
    }
}

impl FromStr for SourceKind {
    type Err = Error;

    /// `zipf:S:M`, `dirichlet:M`, `mixture:DIM:K`, `freq:PATH` or
    /// `freq:PATH:D`. Anything else is read as the path of a frequency list.
    fn from_str(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed source spec {spec:?}"));
        let parts: Vec<&str> = spec.split(':').collect();
        let kind = match parts.as_slice() {
            ["zipf", s, m] => SourceKind::Zipf {
                s: s.parse().map_err(|_| bad())?,
                m: m.parse().map_err(|_| bad())?,
            },
            ["dirichlet", m] => SourceKind::DirichletUniform {
                m: m.parse().map_err(|_| bad())?,
            },
            ["mixture", dim, k] => SourceKind::GaussianMixture {
                dim: dim.parse().map_err(|_| bad())?,
                components: k.parse().map_err(|_| bad())?,
            },
            ["freq", path] => SourceKind::FrequencyList {
                path: path.into(),
                d: None,
            },
            ["freq", path, d] => SourceKind::FrequencyList {
                path: path.into(),
                d: Some(d.parse().map_err(|_| bad())?),
            },
            ["zipf" | "dirichlet" | "mixture" | "freq", ..] => return Err(bad()),
            _ => SourceKind::FrequencyList {
                path: spec.into(),
                d: None,
            },
        };
        Ok(kind)
    }
}

/// A source and the root seed all of its randomness derives from.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub seed: u64,
}

/// Draws from a [`SourceSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    Symbols { d: u32, data: Vec<u32> },
    Points(Points),
}

impl SourceSpec {
    /// The categorical distribution of a discrete source.
    pub fn distribution(&self) -> Result<JointDistribution> {
        match &self.kind {
            SourceKind::Zipf { s, m } => zipf_distribution(*m, *s),
            SourceKind::DirichletUniform { m } => {
                if *m < 1 {
                    return Err(Error::InvalidArgument("m must be positive".into()));
                }
                let mut rng = rng_for(self.seed, stream::SIMPLEX, 0);
                JointDistribution::from_weights(uniform_simplex(*m, &mut rng))
            }
            SourceKind::FrequencyList { path, d } => {
                Ok(crate::universal::ingest_frequency_list(path, *d)?.distribution)
            }
            SourceKind::GaussianMixture { .. } => Err(Error::InvalidArgument(
                "a Gaussian mixture has no categorical distribution".into(),
            )),
        }
    }

    /// `n` i.i.d. draws.
    pub fn sample(&self, n: usize) -> Result<Samples> {
        match &self.kind {
            SourceKind::GaussianMixture { dim, components } => Ok(Samples::Points(
                GaussianMixture::diagonal(*dim, *components)?.sample_n(n, self.seed),
            )),
            _ => {
                let p = self.distribution()?;
                let sampler = CategoricalSampler::new(&p)?;
                Ok(Samples::Symbols {
                    d: p.d(),
                    data: sampler.sample_n(n, self.seed),
                })
            }
        }
    }
}

/// Bytes per symbol in a sample dump.
pub fn dump_symbol_bytes(d: u32) -> usize {
    (d as usize).div_ceil(8).max(1)
}

/// Writes a sample dump: `d` and the symbol count as little-endian `u32`,
/// then each symbol in `⌈d/8⌉` little-endian bytes.
pub fn write_dump<W: Write>(mut w: W, d: u32, symbols: &[u32]) -> Result<()> {
    if d == 0 || d > 32 {
        return Err(Error::InvalidArgument(format!(
            "dump width {d} outside 1..=32"
        )));
    }
    let count = u32::try_from(symbols.len()).map_err(|_| Error::TooLarge {
        what: "dump length",
        value: symbols.len() as u64,
        limit: u32::MAX as u64,
    })?;
    let width = dump_symbol_bytes(d);
    let mut buf = Vec::with_capacity(8 + width * symbols.len());
    buf.extend_from_slice(&d.to_le_bytes());
    buf.extend_from_slice(&count.to_le_bytes());
    for &s in symbols {
        if d < 32 && s >> d != 0 {
            return Err(Error::SymbolOutOfRange {
                symbol: s as u64,
                size: 1 << d,
            });
        }
        buf.extend_from_slice(&s.to_le_bytes()[..width]);
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a dump written by [`write_dump`].
pub fn read_dump<R: Read>(mut r: R) -> Result<(u32, Vec<u32>)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_dump(&bytes)
}

/// Parses an in-memory dump.
pub fn parse_dump(bytes: &[u8]) -> Result<(u32, Vec<u32>)> {
    if bytes.len() < 8 {
        return Err(Error::Format("dump shorter than its header".into()));
    }
    let d = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    let count = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if d == 0 || d > 32 {
        return Err(Error::Format(format!("dump width {d} outside 1..=32")));
    }
    let width = dump_symbol_bytes(d);
    let body = &bytes[8..];
    if body.len() != count * width {
        return Err(Error::Format(format!(
            "dump holds {} bytes, expected {}",
            body.len(),
            count * width
        )));
    }
    let symbols = body
        .chunks_exact(width)
        .map(|c| {
            let mut le = [0u8; 4];
            le[..width].copy_from_slice(c);
            u32::from_le_bytes(le)
        })
        .collect::<Vec<_>>();
    if d < 32 {
        if let Some(&s) = symbols.iter().find(|&&s| s >> d != 0) {
            return Err(Error::Format(format!("symbol {s} wider than {d} bits")));
        }
    }
    Ok((d, symbols))
}

/// Number of distinct values in a symbol stream.
pub fn distinct_count(symbols: &[u32]) -> usize {
    let mut v = symbols.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}
