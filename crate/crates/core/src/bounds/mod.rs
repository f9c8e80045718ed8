//! Closed-form redundancy and average-case results.
//!
//! - Minimax redundancy asymptotics in three alphabet/sample-size regimes and
//!   the pattern-plus-dictionary cost model ([`minimax_redundancy`],
//!   [`pattern_dictionary_cost`]).
//! - Expectations under the uniform simplex: joint entropy, order statistics
//!   and the Jensen bounds on the marginal entropies of the order
//!   permutation ([`HarmonicTable`], [`theorem3_bound`], [`theorem4_gap`]).
//! - The worst-case distribution for the order permutation
//!   ([`worst_case_distribution`]).
//! - Monte Carlo estimators for the same quantities.

mod harmonic;
mod montecarlo;
mod redundancy;
mod worst_case;

pub use harmonic::{
    digamma_int, expected_joint_entropy, expected_order_statistic, jensen_marginal_bound,
    theorem3_bound, theorem4_gap, HarmonicTable, JensenBound, Theorem3Bound, EULER_GAMMA,
    THEOREM3_SPLIT,
};
pub use montecarlo::{mc_joint_entropy, mc_marginal_entropy, mc_total_correlation, McTransform};
pub use redundancy::{minimax_redundancy, pattern_dictionary_cost, RedundancyRegime};
pub use worst_case::{
    worst_case_correlation, worst_case_distribution, worst_case_intercept, worst_case_slope,
};
