use std::f64::consts::LN_2;

use crate::dist::binary_entropy_clamped;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Number of leading bits bounded individually in [`theorem3_bound`]; the
/// remaining bits are charged one bit each.
pub const THEOREM3_SPLIT: u32 = 10;

/// Harmonic numbers `K_0 = 0, K_1, .., K_max`, accumulated in ascending
/// order with compensated summation.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    k: Vec<f64>,
}

impl HarmonicTable {
    pub fn new(max: usize) -> Self {
        let mut k = Vec::with_capacity(max + 1);
        let mut acc = NeumaierSum::new();
        k.push(0.0);
        for i in 1..=max {
            acc.add(1.0 / i as f64);
            k.push(acc.value());
        }
        Self { k }
    }

    pub fn max(&self) -> usize {
        self.k.len() - 1
    }

    /// `K_m`; panics if `m` exceeds the table.
    #[inline]
    pub fn get(&self, m: usize) -> f64 {
        self.k[m]
    }

    fn check(&self, m: usize) -> Result<()> {
        if m > self.max() {
            return Err(Error::TooLarge {
                what: "harmonic index",
                value: m as u64,
                limit: self.max() as u64,
            });
        }
        Ok(())
    }

    /// `E[p_(i)] = (K_m − K_{m−i}) / m` under the uniform simplex.
    pub fn expected_order_statistic(&self, m: usize, i: usize) -> Result<f64> {
        self.check(m)?;
        if i < 1 || i > m {
            return Err(Error::InvalidArgument(format!(
                "order statistic {i} outside 1..={m}"
            )));
        }
        Ok((self.get(m) - self.get(m - i)) / m as f64)
    }

    /// Jensen bound on `E[H_b(Y)]` for the `j`-th bit chosen by the order
    /// permutation at `m = 2^d`; see [`jensen_marginal_bound`].
    pub fn jensen_marginal_bound(&self, d: u32, j: u32) -> Result<JensenBound> {
        if d == 0 || d > 30 || j < 1 || j > d {
            return Err(Error::InvalidArgument(format!(
                "bit {j} outside 1..={d} or unsupported dimension"
            )));
        }
        let m = 1usize << d;
        self.check(m)?;
        let bit = d - j;
        // Codeword i − 1 holds the i-th smallest probability.
        let mut acc = NeumaierSum::new();
        for i in 1..=m {
            if ((i - 1) >> bit) & 1 == 0 {
                acc.add(self.get(m - i));
            }
        }
        let pi = 0.5 * self.get(m) - acc.value() / m as f64;
        Ok(JensenBound {
            pi,
            exact: binary_entropy_clamped(pi),
            asymptotic: binary_entropy_clamped(limit_marginal(j)),
        })
    }
}

/// `Σ_{i=1}^{2^j − 1} (−1)^{i+1} (i/2^j) ln(i/2^j) + 1/2`.
fn limit_marginal(j: u32) -> f64 {
    let n = (1u64 << j) as f64;
    let mut acc = NeumaierSum::new();
    for i in 1..(1u64 << j) {
        let x = i as f64 / n;
        let term = x * x.ln();
        acc.add(if i % 2 == 1 { term } else { -term });
    }
    acc.value() + 0.5
}

/// `ψ(n)` for integer `n ≥ 1`, by the recurrence from `ψ(1) = −γ`.
pub fn digamma_int(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::DomainViolation("digamma needs n ≥ 1".into()));
    }
    Ok(HarmonicTable::new(n - 1).get(n - 1) - EULER_GAMMA)
}

/// `E[H(X)] = (ψ(m + 1) − ψ(2)) / ln 2` under the uniform simplex.
pub fn expected_joint_entropy(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::DomainViolation(format!(
            "expected entropy needs m ≥ 2, got {m}"
        )));
    }
    Ok((digamma_int(m + 1)? - digamma_int(2)?) / LN_2)
}

/// `E[p_(i)]` under the uniform simplex over `m` symbols.
pub fn expected_order_statistic(m: usize, i: usize) -> Result<f64> {
    HarmonicTable::new(m).expected_order_statistic(m, i)
}

/// Jensen bound on one marginal entropy of the order permutation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenBound {
    /// `E[P(Y_j = 0)]` at finite `m`.
    pub pi: f64,
    /// `h_b(pi)`.
    pub exact: f64,
    /// The `m → ∞` limit of `exact`.
    pub asymptotic: f64,
}

/// Jensen bound for the `j`-th bit selected by the greedy order
/// construction at `m = 2^d`. Bit `j = 1` splits the sorted symbols into two
/// halves and is the most significant output bit; bit `j` is output bit
/// `d − j`.
pub fn jensen_marginal_bound(d: u32, j: u32) -> Result<JensenBound> {
    if d == 0 || d > 30 {
        return Err(Error::InvalidArgument(format!("unsupported dimension {d}")));
    }
    HarmonicTable::new(1 << d).jensen_marginal_bound(d, j)
}

/// Upper bounds on `E[C(X, g_ord)]` at `m = 2^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem3Bound {
    /// First [`THEOREM3_SPLIT`] bits bounded individually, one bit for each
    /// remaining position.
    pub proof_faithful: f64,
    /// Every bit bounded individually.
    pub all_bits: f64,
}

/// Finite-`m` bound on the expected total correlation left by the order
/// permutation. Requires `d ≥ 10`.
pub fn theorem3_bound(m: usize) -> Result<Theorem3Bound> {
    if !m.is_power_of_two() || !(1 << THEOREM3_SPLIT..=1 << 30).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "m = {m} must be a power of two with 10 ≤ log2 m ≤ 30"
        )));
    }
    let d = m.trailing_zeros();
    let table = HarmonicTable::new(m);
    let mut head = NeumaierSum::new();
    let mut all = NeumaierSum::new();
    for j in 1..=d {
        let b = table.jensen_marginal_bound(d, j)?.exact;
        if j <= THEOREM3_SPLIT {
            head.add(b);
        }
        all.add(b);
    }
    let h = (table.get(m) - 1.0) / LN_2;
    Ok(Theorem3Bound {
        proof_faithful: head.value() + (d - THEOREM3_SPLIT) as f64 - h,
        all_bits: all.value() - h,
    })
}

/// `ψ(2) / ln 2 = (1 − γ) / ln 2`, the limiting gap between `log2 m` and the
/// expected entropy.
pub fn theorem4_gap() -> f64 {
    (1.0 - EULER_GAMMA) / LN_2
}
