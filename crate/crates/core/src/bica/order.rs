use crate::dist::{JointDistribution, MarginalProfile, SymbolPermutation};

use super::{SearchMethod, SearchResult};

/// Symbol indices sorted by probability ascending, ties by index.
pub fn sorted_ascending(probs: &[f64]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..probs.len() as u32).collect();
    idx.sort_by(|&a, &b| probs[a as usize].total_cmp(&probs[b as usize]));
    idx
}

/// Maps the `i`-th least probable symbol to codeword `i`.
///
/// The most significant output bit then has the smallest achievable
/// `P(Y = 0)`: the lower half of the codewords collects the `m/2` least
/// probable symbols. The same holds recursively for lower bits within each
/// half.
pub fn order_permutation(p: &JointDistribution) -> SearchResult {
    let probs = p.probs();
    let sorted = sorted_ascending(probs);
    let mut map = vec![0u32; probs.len()];
    let mut by_codeword = vec![0.0; probs.len()];
    for (c, &s) in sorted.iter().enumerate() {
        map[s as usize] = c as u32;
        by_codeword[c] = probs[s as usize];
    }
    SearchResult {
        permutation: SymbolPermutation::from_map(map).expect("sorting yields a bijection"),
        objective: MarginalProfile::of_codewords(&by_codeword).entropy_sum(),
        method: SearchMethod::Order,
        fallback: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bica::{brute_force_optimum, objective};
    use crate::dist::{marginals, total_correlation};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp1};

    fn dirichlet(m: usize, rng: &mut ChaCha8Rng) -> JointDistribution {
        let w: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
        JointDistribution::from_weights(w).unwrap()
    }

    #[test]
    fn sorted_probabilities_map_to_codewords_in_order() {
        // p_1 ≤ ... ≤ p_8 already ascending: every symbol keeps its index.
        let w = [0.01, 0.02, 0.04, 0.08, 0.1, 0.15, 0.25, 0.35];
        let p = JointDistribution::new(w.to_vec()).unwrap();
        assert!(order_permutation(&p).permutation.is_identity());

        let shuffled =
            JointDistribution::new(vec![0.35, 0.01, 0.25, 0.02, 0.15, 0.04, 0.1, 0.08]).unwrap();
        let g = order_permutation(&shuffled).permutation;
        assert_eq!(g.map(), &[7, 0, 6, 1, 5, 2, 4, 3]);
    }

    #[test]
    fn ties_break_by_symbol_index() {
        let p = JointDistribution::new(vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        assert!(order_permutation(&p).permutation.is_identity());
        let q = JointDistribution::new(vec![0.4, 0.2, 0.2, 0.2]).unwrap();
        assert_eq!(order_permutation(&q).permutation.map(), &[3, 0, 1, 2]);
    }

    #[test]
    fn uniform_objective() {
        let r = order_permutation(&JointDistribution::uniform(3).unwrap());
        assert!((r.objective - 3.0).abs() < 1e-12);
        let u = JointDistribution::uniform(3).unwrap();
        assert!(total_correlation(&u, &r.permutation).unwrap().abs() < 1e-12);
    }

    #[test]
    fn dominated_by_brute_force_on_dirichlet_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = dirichlet(8, &mut rng);
            let ord = order_permutation(&p).objective;
            let opt = brute_force_optimum(&p).unwrap().objective;
            assert!(ord >= opt - 1e-9, "{ord} < {opt}");
        }
    }

    #[test]
    fn reported_objective_matches_reevaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = dirichlet(64, &mut rng);
        let r = order_permutation(&p);
        assert!((objective(&p, &r.permutation).unwrap() - r.objective).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn msb_marginal_is_smallest_half_sum(w in proptest::collection::vec(0.0f64..1.0, 16)) {
            prop_assume!(w.iter().sum::<f64>() > 0.0);
            let p = JointDistribution::from_weights(w).unwrap();
            let g = order_permutation(&p).permutation;
            let msb = marginals(&p, &g).unwrap().pis[3];
            let mut sorted = p.probs().to_vec();
            sorted.sort_by(f64::total_cmp);
            let half: f64 = sorted[..8].iter().sum();
            prop_assert!((msb - half).abs() < 1e-12);
        }
    }
}
