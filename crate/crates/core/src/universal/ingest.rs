use std::path::Path;

use crate::corpus::CategoricalSampler;
use crate::dist::JointDistribution;
use crate::error::{Error, Result};

/// Ranked token counts and the distribution they induce.
#[derive(Debug, Clone)]
pub struct FrequencyList {
    /// Tokens by rank: count descending, then token ascending.
    pub tokens: Vec<String>,
    pub counts: Vec<u64>,
    /// Rank `r` is symbol `r`; zero-padded to a power of two.
    pub distribution: JointDistribution,
}

impl FrequencyList {
    pub fn sampler(&self) -> Result<CategoricalSampler> {
        CategoricalSampler::new(&self.distribution)
    }
}

/// Parses `token count` lines, keeping the `2^d` highest-ranked tokens
/// when `d` is given. Blank lines are skipped.
pub fn parse_frequency_list(text: &str, d: Option<u32>) -> Result<FrequencyList> {
    let mut entries: Vec<(String, u64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(tok), Some(count), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse {
                line: i + 1,
                msg: "expected `token count`".into(),
            });
        };
        let count: u64 = count.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("bad count {count:?}"),
        })?;
        entries.push((tok.to_string(), count));
    }
    if entries.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "frequency list is empty".into(),
        });
    }
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if let Some(w) = entries
        .windows(2)
        .find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1)
    {
        return Err(Error::InvalidArgument(format!(
            "token {:?} listed twice",
            w[0].0
        )));
    }
    if let Some(d) = d {
        if d == 0 || d > 30 {
            return Err(Error::InvalidArgument(format!("d = {d} outside 1..=30")));
        }
        entries.truncate(1 << d);
    }
    let (tokens, counts): (Vec<String>, Vec<u64>) = entries.into_iter().unzip();
    let mut weights: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    if let Some(d) = d {
        weights.resize(1 << d, 0.0);
    }
    let distribution = JointDistribution::from_weights(weights)?;
    Ok(FrequencyList {
        tokens,
        counts,
        distribution,
    })
}

/// Reads a frequency list from a file; see [`parse_frequency_list`].
pub fn ingest_frequency_list(path: impl AsRef<Path>, d: Option<u32>) -> Result<FrequencyList> {
    parse_frequency_list(&std::fs::read_to_string(path)?, d)
}
