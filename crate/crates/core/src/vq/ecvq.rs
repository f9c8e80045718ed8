use rand::Rng;
use rayon::prelude::*;

use crate::bica::{objective, search, SearchMethod};
use crate::corpus::{rng_for, stream};
use crate::dist::{marginals, JointDistribution, SymbolPermutation};
use crate::error::{Error, Result};
use crate::numeric::{index_bits, NeumaierSum};

use super::{sq_dist, Points};

/// Upper limit on (cluster, code, reconstruct) sweeps.
pub const MAX_SWEEPS: usize = 200;
/// A sweep improving the Lagrangian by less than this ends the descent.
pub const STOP_TOLERANCE: f64 = 1e-9;

/// Largest codebook the marginal-coded variant accepts.
const MAX_BICA_CLUSTERS: usize = 1 << 16;

/// A fitted quantizer. Clusters that emptied during the descent are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerState {
    pub centroids: Vec<Vec<f64>>,
    /// Cluster of each sample.
    pub assign: Vec<u32>,
    /// Ideal codeword length of each cluster in bits.
    pub lengths: Vec<f64>,
    pub lambda: f64,
    /// `distortion + λ·rate`.
    pub lagrangian: f64,
    /// Mean squared error per sample.
    pub distortion: f64,
    /// Mean codeword length in bits.
    pub rate: f64,
    /// Lagrangian after each sweep.
    pub history: Vec<f64>,
}

impl QuantizerState {
    pub fn clusters(&self) -> usize {
        self.centroids.len()
    }

    pub fn distortion_per_dim(&self) -> f64 {
        self.distortion / self.centroids.first().map_or(1, Vec::len) as f64
    }
}

/// Output of [`bica_ecvq_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct BicaEcvqFit {
    pub state: QuantizerState,
    /// Map from original cluster index to transmitted codeword.
    pub permutation: SymbolPermutation,
    /// Codeword of each surviving cluster, in `state` order.
    pub codewords: Vec<u32>,
}

struct Descent {
    centroids: Vec<Vec<f64>>,
    lengths: Vec<f64>,
    assign: Vec<u32>,
    history: Vec<f64>,
    distortion: f64,
    rate: f64,
}

fn check(points: &Points, m_init: usize, lambda: f64) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no samples to quantize".into()));
    }
    if m_init == 0 {
        return Err(Error::InvalidArgument("m_init must be positive".into()));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::DomainViolation(format!(
            "λ must be non-negative, got {lambda}"
        )));
    }
    Ok(())
}

/// k-means++ seeding; stops early when every sample coincides with a centroid.
fn init_centroids(points: &Points, m: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut rng = rng_for(seed, stream::CLUSTER_INIT, 0);
    let mut centroids = vec![points.point(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = points.iter().map(|x| sq_dist(x, &centroids[0])).collect();
    while centroids.len() < m {
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            break;
        }
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = n - 1;
        for (i, &w) in d2.iter().enumerate() {
            acc += w;
            if acc > u && w > 0.0 {
                pick = i;
                break;
            }
        }
        let c = points.point(pick).to_vec();
        for (i, x) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(x, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn assign_step(points: &Points, centroids: &[Vec<f64>], lengths: &[f64], lambda: f64) -> Vec<u32> {
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let x = points.point(i);
            let mut best = (f64::INFINITY, 0u32);
            for (j, c) in centroids.iter().enumerate() {
                if !lengths[j].is_finite() {
                    continue;
                }
                let cost = sq_dist(x, c) + lambda * lengths[j];
                if cost < best.0 {
                    best = (cost, j as u32);
                }
            }
            best.1
        })
        .collect()
}

fn counts(assign: &[u32], m: usize) -> Vec<u64> {
    let mut c = vec![0u64; m];
    for &a in assign {
        c[a as usize] += 1;
    }
    c
}

fn centroid_step(points: &Points, assign: &[u32], counts: &[u64], centroids: &mut [Vec<f64>]) {
    let dim = points.dim();
    let mut sums = vec![vec![NeumaierSum::new(); dim]; centroids.len()];
    for (x, &a) in points.iter().zip(assign) {
        for (s, &v) in sums[a as usize].iter_mut().zip(x) {
            s.add(v);
        }
    }
    for ((c, s), &k) in centroids.iter_mut().zip(&sums).zip(counts) {
        if k > 0 {
            for (cj, sj) in c.iter_mut().zip(s) {
                *cj = sj.value() / k as f64;
            }
        }
    }
}

fn evaluate(
    points: &Points,
    assign: &[u32],
    centroids: &[Vec<f64>],
    lengths: &[f64],
) -> (f64, f64) {
    let (mut d, mut r) = (NeumaierSum::new(), NeumaierSum::new());
    for (x, &a) in points.iter().zip(assign) {
        d.add(sq_dist(x, &centroids[a as usize]));
        r.add(lengths[a as usize]);
    }
    let n = points.len() as f64;
    (d.value() / n, r.value() / n)
}

/// Generalized Lloyd descent; `rate_step` maps cluster counts to codeword
/// lengths, infinite for empty clusters.
fn lloyd<F>(
    points: &Points,
    m_init: usize,
    lambda: f64,
    seed: u64,
    mut rate_step: F,
) -> Result<Descent>
where
    F: FnMut(&[u64]) -> Result<Vec<f64>>,
{
    let mut centroids = init_centroids(points, m_init.min(points.len()), seed);
    let m = centroids.len();
    let mut lengths = vec![(m as f64).log2(); m];
    let mut history = Vec::new();
    let mut assign = Vec::new();
    let (mut distortion, mut rate) = (0.0, 0.0);
    for _ in 0..MAX_SWEEPS {
        assign = assign_step(points, &centroids, &lengths, lambda);
        let c = counts(&assign, m);
        lengths = rate_step(&c)?;
        centroid_step(points, &assign, &c, &mut centroids);
        (distortion, rate) = evaluate(points, &assign, &centroids, &lengths);
        let l = distortion + lambda * rate;
        let done = history
            .last()
            .is_some_and(|&prev: &f64| prev - l < STOP_TOLERANCE);
        history.push(l);
        if done {
            break;
        }
    }
    Ok(Descent {
        centroids,
        lengths,
        assign,
        history,
        distortion,
        rate,
    })
}

/// Drops empty clusters; returns the state and the surviving original indices.
fn compact(run: Descent, lambda: f64) -> (QuantizerState, Vec<usize>) {
    let keep: Vec<usize> = (0..run.centroids.len())
        .filter(|&j| run.lengths[j].is_finite())
        .collect();
    let mut remap = vec![u32::MAX; run.centroids.len()];
    for (k, &j) in keep.iter().enumerate() {
        remap[j] = k as u32;
    }
    let state = QuantizerState {
        centroids: keep.iter().map(|&j| run.centroids[j].clone()).collect(),
        assign: run.assign.iter().map(|&a| remap[a as usize]).collect(),
        lengths: keep.iter().map(|&j| run.lengths[j]).collect(),
        lambda,
        lagrangian: run.distortion + lambda * run.rate,
        distortion: run.distortion,
        rate: run.rate,
        history: run.history,
    };
    (state, keep)
}

/// Entropy-constrained VQ: minimizes mean squared error plus `λ` times the
/// ideal codeword length `−log2 p̂` of the chosen cluster.
pub fn ecvq_fit(points: &Points, m_init: usize, lambda: f64, seed: u64) -> Result<QuantizerState> {
    check(points, m_init, lambda)?;
    let n = points.len() as f64;
    let run = lloyd(points, m_init, lambda, seed, |c| {
        Ok(c.iter()
            .map(|&k| {
                if k > 0 {
                    -(k as f64 / n).log2()
                } else {
                    f64::INFINITY
                }
            })
            .collect())
    })?;
    Ok(compact(run, lambda).0)
}

/// [`bica_ecvq_fit_with`] using the order permutation.
pub fn bica_ecvq_fit(
    points: &Points,
    m_init: usize,
    lambda: f64,
    seed: u64,
) -> Result<BicaEcvqFit> {
    bica_ecvq_fit_with(points, m_init, lambda, seed, SearchMethod::Order)
}

/// ECVQ with the codeword lengths of marginal coding: cluster indices are
/// `⌈log2 m_init⌉`-bit symbols passed through a BICA transform, and a
/// cluster costs `Σ_j −log2 P(bit j)` of its transformed index. A new
/// transform replaces the previous one only if it lowers the sum of
/// marginal entropies, so the objective never increases.
pub fn bica_ecvq_fit_with(
    points: &Points,
    m_init: usize,
    lambda: f64,
    seed: u64,
    method: SearchMethod,
) -> Result<BicaEcvqFit> {
    check(points, m_init, lambda)?;
    if m_init > MAX_BICA_CLUSTERS {
        return Err(Error::TooLarge {
            what: "initial codebook",
            value: m_init as u64,
            limit: MAX_BICA_CLUSTERS as u64,
        });
    }
    let n = points.len() as f64;
    let d = index_bits(m_init as u64);
    let mut current: Option<SymbolPermutation> = None;
    let run = lloyd(points, m_init, lambda, seed, |c| {
        let mut probs = vec![0.0; 1 << d];
        for (p, &k) in probs.iter_mut().zip(c) {
            *p = k as f64 / n;
        }
        let p = JointDistribution::new(probs)?;
        let candidate = search(&p, method)?.permutation;
        let g = match current.take() {
            Some(prev) if objective(&p, &prev)? <= objective(&p, &candidate)? => prev,
            _ => candidate,
        };
        let pis = marginals(&p, &g)?.pis;
        let lengths = c
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                if k == 0 {
                    return f64::INFINITY;
                }
                let y = g.apply(i as u32);
                pis.iter()
                    .enumerate()
                    .map(|(j, &pi0)| -(if (y >> j) & 1 == 0 { pi0 } else { 1.0 - pi0 }).log2())
                    .sum()
            })
            .collect();
        current = Some(g);
        Ok(lengths)
    })?;
    let (state, keep) = compact(run, lambda);
    let permutation = current.expect("at least one sweep ran");
    let codewords = keep.iter().map(|&j| permutation.apply(j as u32)).collect();
    Ok(BicaEcvqFit {
        state,
        permutation,
        codewords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::GaussianMixture;
    use crate::dist::entropy_of;

    fn line(xs: &[f64]) -> Points {
        Points::new(1, xs.to_vec()).unwrap()
    }

    fn non_increasing(h: &[f64]) -> bool {
        h.windows(2).all(|w| w[1] <= w[0] + 1e-12)
    }

    /// Restricted growth strings of length `n` with at most `k` blocks.
    fn set_partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            let next = prefix.iter().max().map_or(0, |&m| m + 1);
            for b in 0..=next.min(k - 1) {
                prefix.push(b);
                rec(prefix, n, k, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, k, &mut out);
        out
    }

    fn partition_lagrangian(xs: &[f64], blocks: &[usize], lambda: f64) -> f64 {
        let nb = blocks.iter().max().unwrap() + 1;
        let n = xs.len() as f64;
        let mut total = 0.0;
        for b in 0..nb {
            let members: Vec<f64> = xs
                .iter()
                .zip(blocks)
                .filter(|(_, &a)| a == b)
                .map(|(&x, _)| x)
                .collect();
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            let sse: f64 = members.iter().map(|x| (x - mean) * (x - mean)).sum();
            let p = members.len() as f64 / n;
            total += sse / n + lambda * p * -p.log2();
        }
        total
    }

    #[test]
    fn matches_exhaustive_partition_search() {
        // The descent is local, so the oracle must bound every run from below
        // and be reached from some starting codebook.
        let xs = [0.0, 0.3, 0.5, 4.0, 4.4, 9.0, 9.2, 9.9];
        let partitions = set_partitions(xs.len(), 3);
        assert_eq!(partitions.len(), 1 + 127 + 966);
        for lambda in [0.0, 0.5, 2.0, 8.0, 40.0] {
            let oracle = partitions
                .iter()
                .map(|b| partition_lagrangian(&xs, b, lambda))
                .fold(f64::INFINITY, f64::min);
            let mut best = f64::INFINITY;
            for m_init in 1..=3 {
                for seed in 0..10 {
                    let l = ecvq_fit(&line(&xs), m_init, lambda, seed)
                        .unwrap()
                        .lagrangian;
                    assert!(
                        l >= oracle - 1e-9,
                        "λ = {lambda}: {l} below optimum {oracle}"
                    );
                    best = best.min(l);
                }
            }
            assert!(
                (best - oracle).abs() < 1e-9,
                "λ = {lambda}: {best} vs {oracle}"
            );
        }
    }

    #[test]
    fn zero_lambda_is_lloyd() {
        let pts = GaussianMixture::diagonal(2, 3).unwrap().sample_n(400, 5);
        let q = ecvq_fit(&pts, 6, 0.0, 1).unwrap();
        for (x, &a) in pts.iter().zip(&q.assign) {
            let own = sq_dist(x, &q.centroids[a as usize]);
            assert!(q.centroids.iter().all(|c| own <= sq_dist(x, c) + 1e-12));
        }
        assert!((q.lagrangian - q.distortion).abs() < 1e-15);
    }

    #[test]
    fn large_lambda_collapses_to_one_cluster() {
        let mut xs = vec![0.0; 60];
        xs.extend(std::iter::repeat_n(10.0, 40));
        for (i, x) in xs.iter_mut().enumerate() {
            *x += 0.01 * i as f64 / 100.0;
        }
        let q = ecvq_fit(&line(&xs), 2, 1e4, 3).unwrap();
        assert_eq!(q.clusters(), 1);
        assert_eq!(q.rate, 0.0);
        let q = ecvq_fit(&line(&xs), 2, 1e-3, 3).unwrap();
        assert_eq!(q.clusters(), 2);
    }

    #[test]
    fn lagrangian_is_monotone_over_seeds() {
        let pts = GaussianMixture::diagonal(3, 2).unwrap().sample_n(300, 11);
        for seed in 0..50 {
            let lambda = 0.05 * (1 + seed % 7) as f64;
            let q = ecvq_fit(&pts, 16, lambda, seed).unwrap();
            assert!(non_increasing(&q.history), "seed {seed}: {:?}", q.history);
            let b = bica_ecvq_fit(&pts, 16, lambda, seed).unwrap();
            assert!(
                non_increasing(&b.state.history),
                "seed {seed}: {:?}",
                b.state.history
            );
        }
    }

    #[test]
    fn lengths_are_ideal() {
        let pts = GaussianMixture::diagonal(2, 2).unwrap().sample_n(500, 2);
        let q = ecvq_fit(&pts, 8, 0.2, 4).unwrap();
        let n = pts.len() as f64;
        let c = counts(&q.assign, q.clusters());
        assert!(c.iter().all(|&k| k > 0));
        for (l, &k) in q.lengths.iter().zip(&c) {
            assert!((l + (k as f64 / n).log2()).abs() < 1e-12);
        }
        let p: Vec<f64> = c.iter().map(|&k| k as f64 / n).collect();
        assert!((q.rate - entropy_of(&p)).abs() < 1e-9);
    }

    #[test]
    fn independent_occupancy_gives_equal_rates() {
        // Four tight clusters with occupancies 0.36, 0.24, 0.24, 0.16: a
        // product of two bits, so marginal lengths equal joint lengths.
        let mut xs = Vec::new();
        for (c, k) in [(0.0, 36), (10.0, 24), (20.0, 24), (30.0, 16)] {
            xs.extend(std::iter::repeat_n(c, k));
        }
        let pts = line(&xs);
        let joint = ecvq_fit(&pts, 4, 0.01, 0).unwrap();
        let marg = bica_ecvq_fit(&pts, 4, 0.01, 0).unwrap();
        assert_eq!(joint.clusters(), 4);
        assert_eq!(marg.state.clusters(), 4);
        assert!((joint.rate - marg.state.rate).abs() < 1e-6);
        let mut a = joint.lengths.clone();
        let mut b = marg.state.lengths.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn bica_codewords_are_distinct() {
        let pts = GaussianMixture::diagonal(2, 2).unwrap().sample_n(400, 8);
        let fit = bica_ecvq_fit(&pts, 10, 0.1, 1).unwrap();
        let mut cw = fit.codewords.clone();
        cw.sort_unstable();
        cw.dedup();
        assert_eq!(cw.len(), fit.state.clusters());
        assert_eq!(fit.permutation.d(), 4);
        // Marginal lengths are never shorter on average than ideal joint ones.
        let n = pts.len() as f64;
        let c = counts(&fit.state.assign, fit.state.clusters());
        let h = entropy_of(&c.iter().map(|&k| k as f64 / n).collect::<Vec<_>>());
        assert!(fit.state.rate >= h - 1e-12);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let pts = GaussianMixture::diagonal(4, 2).unwrap().sample_n(800, 3);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| ecvq_fit(&pts, 12, 0.3, 9).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn rejects_bad_arguments() {
        let pts = line(&[1.0, 2.0]);
        assert!(ecvq_fit(&pts, 0, 1.0, 0).is_err());
        assert!(ecvq_fit(&pts, 2, -1.0, 0).is_err());
        assert!(ecvq_fit(&line(&[]), 2, 1.0, 0).is_err());
        assert!(bica_ecvq_fit(&pts, (1 << 16) + 1, 1.0, 0).is_err());
    }
}
