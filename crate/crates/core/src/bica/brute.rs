use crate::dist::{JointDistribution, MarginalProfile, SymbolPermutation};
use crate::error::{Error, Result};

use super::{SearchMethod, SearchResult};

/// Largest `d` accepted by [`brute_force_optimum`] (`8! = 40320` maps).
pub const MAX_BRUTE_FORCE_BITS: u32 = 3;

/// Exact minimum over all `m!` symbol permutations, enumerated with Heap's
/// algorithm. The first minimizer in enumeration order wins ties.
pub fn brute_force_optimum(p: &JointDistribution) -> Result<SearchResult> {
    if p.d() > MAX_BRUTE_FORCE_BITS {
        return Err(Error::TooLarge {
            what: "bit dimension for exhaustive search",
            value: p.d() as u64,
            limit: MAX_BRUTE_FORCE_BITS as u64,
        });
    }
    let probs = p.probs();
    let m = probs.len();
    let mut map: Vec<u32> = (0..m as u32).collect();
    let mut q = vec![0.0; m];
    let mut eval = |map: &[u32]| {
        for (s, &c) in map.iter().enumerate() {
            q[c as usize] = probs[s];
        }
        MarginalProfile::of_codewords(&q).entropy_sum()
    };

    let mut best_obj = eval(&map);
    let mut best_map = map.clone();
    let mut c = vec![0usize; m];
    let mut i = 1;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                map.swap(0, i);
            } else {
                map.swap(c[i], i);
            }
            let obj = eval(&map);
            if obj < best_obj {
                best_obj = obj;
                best_map.copy_from_slice(&map);
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(SearchResult {
        permutation: SymbolPermutation::from_map(best_map)?,
        objective: best_obj,
        method: SearchMethod::BruteForce,
        fallback: false,
    })
}
