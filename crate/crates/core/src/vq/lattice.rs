use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{sq_dist, Points};

/// Truncation radius in source standard deviations.
pub const DEFAULT_RADIUS: f64 = 5.0;

/// Shrink factor applied while pulling a truncated point inside the sphere.
const SHRINK: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    /// `Z^dim`.
    Cubic { dim: usize },
    /// Integer vectors with even coordinate sum, in four dimensions.
    D4,
    /// `D8 ∪ (D8 + ½)`.
    E8,
}

impl LatticeKind {
    pub fn dim(&self) -> usize {
        match *self {
            LatticeKind::Cubic { dim } => dim,
            LatticeKind::D4 => 4,
            LatticeKind::E8 => 8,
        }
    }

    /// Covering radius at unit scale.
    pub fn covering_radius(&self) -> f64 {
        match *self {
            LatticeKind::Cubic { dim } => (dim as f64).sqrt() / 2.0,
            LatticeKind::D4 | LatticeKind::E8 => 1.0,
        }
    }

    /// Nearest lattice point to `u` at unit scale, as doubled coordinates.
    fn nearest(&self, u: &[f64]) -> Vec<i64> {
        match self {
            LatticeKind::Cubic { .. } => u.iter().map(|&x| 2 * x.round() as i64).collect(),
            LatticeKind::D4 => nearest_dn(u).into_iter().map(|v| 2 * v).collect(),
            LatticeKind::E8 => {
                let a = nearest_dn(u);
                let shifted: Vec<f64> = u.iter().map(|x| x - 0.5).collect();
                let b = nearest_dn(&shifted);
                let da: f64 = u.iter().zip(&a).map(|(x, &v)| (x - v as f64).powi(2)).sum();
                let db: f64 = shifted
                    .iter()
                    .zip(&b)
                    .map(|(x, &v)| (x - v as f64).powi(2))
                    .sum();
                if db < da {
                    b.into_iter().map(|v| 2 * v + 1).collect()
                } else {
                    a.into_iter().map(|v| 2 * v).collect()
                }
            }
        }
    }
}

/// Nearest point of `D_n`: round every coordinate, and if the sum is odd
/// re-round the worst coordinate the other way.
fn nearest_dn(u: &[f64]) -> Vec<i64> {
    let mut f: Vec<i64> = u.iter().map(|&x| x.round() as i64).collect();
    if f.iter().sum::<i64>().rem_euclid(2) == 1 {
        let (k, _) = u
            .iter()
            .zip(&f)
            .map(|(&x, &v)| (x - v as f64).abs())
            .enumerate()
            .fold(
                (0, -1.0),
                |best, (i, e)| if e > best.1 { (i, e) } else { best },
            );
        f[k] += if u[k] >= f[k] as f64 { 1 } else { -1 };
    }
    f
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeKind::Cubic { dim } => write!(f, "z{dim}"),
            LatticeKind::D4 => write!(f, "d4"),
            LatticeKind::E8 => write!(f, "e8"),
        }
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    /// `zN` for the cubic lattice in `N` dimensions, `d4` or `e8`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "d4" => Ok(LatticeKind::D4),
            "e8" => Ok(LatticeKind::E8),
            _ => lower
                .strip_prefix('z')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&dim| dim > 0)
                .map(|dim| LatticeKind::Cubic { dim })
                .ok_or_else(|| Error::InvalidArgument(format!("unknown lattice {s:?}"))),
        }
    }
}

/// A scaled lattice truncated to a ball around the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub scale: f64,
    pub radius: f64,
}

impl Lattice {
    pub fn new(kind: LatticeKind, scale: f64) -> Result<Self> {
        Self::with_radius(kind, scale, DEFAULT_RADIUS)
    }

    pub fn with_radius(kind: LatticeKind, scale: f64, radius: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::DomainViolation(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::DomainViolation(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            kind,
            scale,
            radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn covering_radius(&self) -> f64 {
        self.kind.covering_radius() * self.scale
    }

    /// Coordinates of the point with doubled unit-scale coordinates `key`.
    pub fn point(&self, key: &[i64]) -> Vec<f64> {
        key.iter().map(|&k| k as f64 * 0.5 * self.scale).collect()
    }

    fn nearest(&self, x: &[f64]) -> Vec<i64> {
        let u: Vec<f64> = x.iter().map(|v| v / self.scale).collect();
        self.kind.nearest(&u)
    }

    /// Nearest lattice point inside the ball. Samples outside are first
    /// projected onto the sphere; a candidate outside the ball is pulled
    /// toward the origin until it lands inside. Returns the key and whether
    /// the sample was truncated.
    pub fn quantize(&self, x: &[f64]) -> (Vec<i64>, bool) {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut y: Vec<f64> = if norm > self.radius {
            x.iter().map(|v| v * self.radius / norm).collect()
        } else {
            x.to_vec()
        };
        let mut truncated = norm > self.radius;
        let r2 = self.radius * self.radius * (1.0 + 1e-12);
        loop {
            let key = self.nearest(&y);
            let q = self.point(&key);
            if q.iter().map(|v| v * v).sum::<f64>() <= r2 {
                return (key, truncated);
            }
            truncated = true;
            y.iter_mut().for_each(|v| *v *= SHRINK);
        }
    }
}

/// Lattice indices of a sample set, compacted by first occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeQuantization {
    pub dim: usize,
    /// Cell index of each sample.
    pub indices: Vec<u32>,
    /// Doubled unit-scale coordinates of each cell.
    pub cells: Vec<Vec<i64>>,
    /// Squared error of each sample.
    pub sq_errors: Vec<f64>,
    /// Mean squared error per dimension.
    pub distortion: f64,
    pub truncated: usize,
}

impl LatticeQuantization {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Mean squared error per sample, summed over dimensions.
    pub fn total_distortion(&self) -> f64 {
        self.distortion * self.dim as f64
    }
}

pub fn lattice_quantize(points: &Points, lattice: &Lattice) -> Result<LatticeQuantization> {
    if points.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            got: points.dim(),
        });
    }
    let quantized: Vec<(Vec<i64>, bool, f64)> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let x = points.point(i);
            let (key, truncated) = lattice.quantize(x);
            let err = sq_dist(x, &lattice.point(&key));
            (key, truncated, err)
        })
        .collect();
    let mut lookup: HashMap<Vec<i64>, u32> = HashMap::new();
    let mut cells = Vec::new();
    let mut indices = Vec::with_capacity(quantized.len());
    let mut sq_errors = Vec::with_capacity(quantized.len());
    let mut truncated = 0;
    for (key, t, err) in quantized {
        let next = cells.len() as u32;
        let idx = *lookup.entry(key.clone()).or_insert_with(|| {
            cells.push(key);
            next
        });
        indices.push(idx);
        sq_errors.push(err);
        truncated += t as usize;
    }
    let distortion = if sq_errors.is_empty() {
        0.0
    } else {
        crate::numeric::sum(sq_errors.iter().copied()) / (sq_errors.len() * points.dim()) as f64
    };
    Ok(LatticeQuantization {
        dim: points.dim(),
        indices,
        cells,
        sq_errors,
        distortion,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{gaussian_points, rng_for};
    use rand::Rng;

    /// Nearest point among all members of each coset in the unit box around `u`.
    fn coset_oracle(u: &[f64], cosets: &[f64]) -> f64 {
        let n = u.len();
        let mut best = f64::INFINITY;
        for &shift in cosets {
            for mask in 0..1u32 << n {
                let v: Vec<f64> = (0..n)
                    .map(|j| {
                        let base = (u[j] - shift).floor() + shift;
                        base + ((mask >> j) & 1) as f64
                    })
                    .collect();
                let sum: f64 = v.iter().map(|x| x - shift).sum();
                if (sum.round() as i64).rem_euclid(2) != 0 {
                    continue;
                }
                best = best.min(sq_dist(u, &v));
            }
        }
        best
    }

    fn unit_dist(kind: LatticeKind, u: &[f64]) -> f64 {
        let q: Vec<f64> = kind.nearest(u).iter().map(|&k| k as f64 / 2.0).collect();
        sq_dist(u, &q)
    }

    #[test]
    fn e8_matches_coset_enumeration() {
        let mut rng = rng_for(1, 0, 0);
        for _ in 0..2000 {
            let u: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            let fast = unit_dist(LatticeKind::E8, &u);
            assert!(
                (fast - coset_oracle(&u, &[0.0, 0.5])).abs() < 1e-12,
                "{u:?}"
            );
        }
    }

    #[test]
    fn d4_matches_enumeration() {
        let mut rng = rng_for(2, 0, 0);
        for _ in 0..2000 {
            let u: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            let fast = unit_dist(LatticeKind::D4, &u);
            assert!((fast - coset_oracle(&u, &[0.0])).abs() < 1e-12, "{u:?}");
        }
    }

    #[test]
    fn lattice_points_are_fixed() {
        for (kind, key) in [
            (LatticeKind::Cubic { dim: 3 }, vec![2, -4, 0]),
            (LatticeKind::D4, vec![2, 2, 0, 0]),
            (LatticeKind::E8, vec![1, 1, 1, 1, 1, 1, -1, -1]),
            (LatticeKind::E8, vec![2, -2, 0, 0, 0, 0, 0, 0]),
        ] {
            let lat = Lattice::new(kind, 0.7).unwrap();
            let x = lat.point(&key);
            let (got, truncated) = lat.quantize(&x);
            assert_eq!(got, key);
            assert!(!truncated);
            let pts = Points::new(kind.dim(), x).unwrap();
            let q = lattice_quantize(&pts, &lat).unwrap();
            assert_eq!(q.distortion, 0.0);
        }
    }

    #[test]
    fn error_within_covering_radius() {
        for kind in [
            LatticeKind::Cubic { dim: 3 },
            LatticeKind::D4,
            LatticeKind::E8,
        ] {
            let lat = Lattice::new(kind, 0.4).unwrap();
            let pts = gaussian_points(kind.dim(), 5000, 3).unwrap();
            let q = lattice_quantize(&pts, &lat).unwrap();
            let inner = lat.radius - lat.covering_radius();
            for (x, &e) in pts.iter().zip(&q.sq_errors) {
                if x.iter().map(|v| v * v).sum::<f64>().sqrt() <= inner {
                    assert!(e.sqrt() <= lat.covering_radius() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn fine_cubic_mse_approaches_uniform_limit() {
        let s = 0.05;
        let mut rng = rng_for(4, 0, 0);
        let data: Vec<f64> = (0..300_000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let pts = Points::new(3, data).unwrap();
        let q = lattice_quantize(
            &pts,
            &Lattice::new(LatticeKind::Cubic { dim: 3 }, s).unwrap(),
        )
        .unwrap();
        let target = s * s / 12.0;
        assert!(
            (q.distortion - target).abs() / target < 0.02,
            "{}",
            q.distortion
        );
    }

    #[test]
    fn truncation_stays_in_ball() {
        let lat = Lattice::new(LatticeKind::E8, 1.3).unwrap();
        let far = vec![40.0, -3.0, 0.0, 1.0, 2.0, 0.0, 0.0, 7.0];
        let (key, truncated) = lat.quantize(&far);
        assert!(truncated);
        let norm = lat.point(&key).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= lat.radius + 1e-9);
        let coarse = Lattice::new(LatticeKind::Cubic { dim: 2 }, 20.0).unwrap();
        assert_eq!(coarse.quantize(&[9.0, 9.0]).0, vec![0, 0]);
    }

    #[test]
    fn compaction_is_first_occurrence() {
        let lat = Lattice::new(LatticeKind::Cubic { dim: 1 }, 1.0).unwrap();
        let pts = Points::new(1, vec![2.1, -0.9, 1.8, 0.1, -1.2]).unwrap();
        let q = lattice_quantize(&pts, &lat).unwrap();
        assert_eq!(q.indices, vec![0, 1, 0, 2, 1]);
        assert_eq!(q.cells, vec![vec![4], vec![-2], vec![0]]);
    }

    #[test]
    fn parse_and_validate() {
        assert_eq!("e8".parse::<LatticeKind>().unwrap(), LatticeKind::E8);
        assert_eq!(
            "Z8".parse::<LatticeKind>().unwrap(),
            LatticeKind::Cubic { dim: 8 }
        );
        assert!("z0".parse::<LatticeKind>().is_err());
        assert!("hex".parse::<LatticeKind>().is_err());
        assert!(Lattice::new(LatticeKind::D4, 0.0).is_err());
        let pts = Points::new(3, vec![0.0; 3]).unwrap();
        assert!(lattice_quantize(&pts, &Lattice::new(LatticeKind::D4, 1.0).unwrap()).is_err());
    }
}
