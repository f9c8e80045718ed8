//! Universal block coding: shuffle bit positions, group them into blocks,
//! run block BICA, repeat, and account for the total code length against
//! whole-alphabet baselines.

mod cost;
mod descend;
mod empirical;
mod ingest;
mod transform;

pub use cost::{
    baseline_costs, block_cost, block_cost_widths, redundancy_term, total_cost_curve, Baselines,
    CostReport, CostRow,
};
pub use descend::{default_block_method, descend, DescendConfig, Descent, PipelineState};
pub use empirical::{
    bit_zero_counts, block_counts, block_entropies, empirical_entropy, empirical_marginal_sum,
    symbol_counts,
};
pub use ingest::{ingest_frequency_list, parse_frequency_list, FrequencyList};
pub use transform::{Stage, TransformChain};
