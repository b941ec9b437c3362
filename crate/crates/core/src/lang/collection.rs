use std::sync::Arc;

use super::families::{BlockGrowth, BlockLevel, MarkerLevel, MarkerSpacing, Naturals};
use super::Language;
use crate::error::{invalid, Result};

/// Declares that a collection is a nested chain `L^1 ⊆ L^2 ⊆ … ⊆ L^∞`
/// whose last member is the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainInfo {
    pub limit_index: usize,
}

/// An indexed family of languages, 1-based.
#[derive(Debug, Clone)]
pub struct LanguageCollection {
    name: String,
    languages: Vec<Arc<dyn Language>>,
    chain: Option<ChainInfo>,
}

impl LanguageCollection {
    pub fn new(name: impl Into<String>, languages: Vec<Arc<dyn Language>>) -> Result<Self> {
        if languages.is_empty() {
            return Err(invalid("collection must hold at least one language"));
        }
        Ok(Self { name: name.into(), languages, chain: None })
    }

    /// Builds a collection declared to be a chain ordered by inclusion, with
    /// the limit language last.
    pub fn chain(name: impl Into<String>, languages: Vec<Arc<dyn Language>>) -> Result<Self> {
        let mut c = Self::new(name, languages)?;
        c.chain = Some(ChainInfo { limit_index: c.languages.len() });
        Ok(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.languages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_empty()
    }

    pub fn chain_info(&self) -> Option<ChainInfo> {
        self.chain
    }

    /// Language at 1-based index `j`.
    pub fn get(&self, j: usize) -> Option<&Arc<dyn Language>> {
        j.checked_sub(1).and_then(|k| self.languages.get(k))
    }

    /// Language at 1-based index `j`, or an invalid-argument error.
    pub fn language(&self, j: usize) -> Result<&Arc<dyn Language>> {
        self.get(j).ok_or_else(|| invalid(format!("collection index {j} out of range 1..={}", self.len())))
    }

    pub fn limit(&self) -> Option<&Arc<dyn Language>> {
        self.chain.and_then(|c| self.get(c.limit_index))
    }

    /// Ground-truth `L_a ⊆ L_b`, known only for declared chains.
    pub fn is_subset(&self, a: usize, b: usize) -> Option<bool> {
        self.chain.map(|_| a <= b)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Arc<dyn Language>)> {
        self.languages.iter().enumerate().map(|(k, l)| (k + 1, l))
    }
}

/// Block-partition chain with dyadic blocks `B_m = [2^m, 2^{m+1} - 1]`.
pub fn make_block_partition_chain(num_levels: u64) -> Result<LanguageCollection> {
    make_block_partition_chain_with(BlockGrowth::Dyadic, num_levels, super::DEFAULT_BOUND)
}

/// Block-partition chain `(L^1, …, L^num_levels, L^∞)` for the given block
/// growth and enumeration bound; `L^∞` is the positive integers.
pub fn make_block_partition_chain_with(growth: BlockGrowth, num_levels: u64, bound: u64) -> Result<LanguageCollection> {
    if num_levels == 0 {
        return Err(invalid("num_levels must be >= 1"));
    }
    let mut langs: Vec<Arc<dyn Language>> =
        (1..=num_levels).map(|j| Arc::new(BlockLevel::new(growth, j).with_bound(bound)) as Arc<dyn Language>).collect();
    langs.push(Arc::new(Naturals::new(1).with_bound(bound)));
    LanguageCollection::chain(format!("block_partition[{growth:?}]"), langs)
}

/// Marker-interval chain with geometric markers `a_i = base^i`.
pub fn make_marker_interval_chain(base: u64, num_levels: u64) -> Result<LanguageCollection> {
    make_marker_interval_chain_with(MarkerSpacing::Geometric { base }, num_levels, super::DEFAULT_BOUND)
}

/// Marker-interval chain `(L^1, …, L^num_levels, L^∞)` with
/// `L^j = ∪_i [a_i, a_i + j]`; `L^∞` is the nonnegative integers.
pub fn make_marker_interval_chain_with(spacing: MarkerSpacing, num_levels: u64, bound: u64) -> Result<LanguageCollection> {
    spacing.validate()?;
    if num_levels == 0 {
        return Err(invalid("num_levels must be >= 1"));
    }
    let mut langs: Vec<Arc<dyn Language>> = Vec::new();
    for j in 1..=num_levels {
        langs.push(Arc::new(MarkerLevel::new(spacing, j)?.with_bound(bound)));
    }
    langs.push(Arc::new(Naturals::new(0).with_bound(bound)));
    LanguageCollection::chain(format!("marker_interval[{spacing:?}]"), langs)
}
