//! Universe elements, lazily enumerated ordered languages, and the
//! unused-element selectors shared by every generator.
//!
//! The universe is the nonnegative integers and an integer is its own
//! preference rank, so "the i-th element of `L`" always means the i-th
//! smallest member.

mod collection;
mod families;

use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metrics::Density;
use crate::schedule::DeadlineFn;

pub use collection::{
    make_block_partition_chain, make_block_partition_chain_with, make_marker_interval_chain,
    make_marker_interval_chain_with, ChainInfo, LanguageCollection,
};
pub use families::{BlockGrowth, BlockLevel, MarkerLevel, MarkerSpacing, Naturals, PredicateLanguage};

/// Default enumeration bound for lazy languages.
pub const DEFAULT_BOUND: u64 = 1 << 40;

/// An element of the universe, identified by its preference rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StringId(pub u64);

impl StringId {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for StringId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for StringId {
    fn from(v: u64) -> Self {
        StringId(v)
    }
}

/// A countably infinite, ordered subset of the universe.
///
/// `nth` is 1-based. Implementations answer queries in closed form where
/// they can; anything past [`Language::bound`] raises
/// [`Error::ExhaustedEnumeration`].
pub trait Language: Send + Sync + fmt::Debug {
    fn contains(&self, x: StringId) -> bool;

    fn nth(&self, i: u64) -> Result<StringId>;

    /// Number of members `<= x`.
    fn rank_leq(&self, x: StringId) -> u64;

    /// Largest value this language will enumerate.
    fn bound(&self) -> u64;

    fn describe(&self) -> String;

    /// Smallest member `>= x`.
    fn first_at_or_after(&self, x: StringId) -> Result<StringId> {
        let below = if x.0 == 0 { 0 } else { self.rank_leq(StringId(x.0 - 1)) };
        self.nth(below + 1)
    }
}

pub(crate) fn exhausted(lang: &dyn Language, what: impl Into<String>) -> Error {
    Error::ExhaustedEnumeration { what: format!("{}: {}", lang.describe(), what.into()), bound: lang.bound() }
}

/// Insert-only set of elements already observed or output in one game.
#[derive(Debug, Clone, Default)]
pub struct UsedSet {
    members: FxHashSet<StringId>,
}

impl UsedSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` if `x` was not present before.
    pub fn insert(&mut self, x: StringId) -> bool {
        self.members.insert(x)
    }

    pub fn contains(&self, x: StringId) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl FromIterator<StringId> for UsedSet {
    fn from_iter<I: IntoIterator<Item = StringId>>(iter: I) -> Self {
        Self { members: iter.into_iter().collect() }
    }
}

fn scan_unused(lang: &dyn Language, used: &UsedSet, mut x: StringId) -> Result<StringId> {
    loop {
        x = lang.first_at_or_after(x)?;
        if !used.contains(x) {
            return Ok(x);
        }
        x = StringId(x.0.checked_add(1).ok_or_else(|| exhausted(lang, "next unused past u64::MAX"))?);
    }
}

/// Minimal member of `lang` not in `used`.
pub fn next_unused(lang: &dyn Language, used: &UsedSet) -> Result<StringId> {
    scan_unused(lang, used, lang.nth(1)?)
}

/// Minimal member of `lang` whose index `i` satisfies `D(i) >= t` and which
/// is not in `used`; `None` once every such element within the bound is used.
pub fn on_time_unused(lang: &dyn Language, used: &UsedSet, t: u64, deadline: &DeadlineFn) -> Result<Option<StringId>> {
    if t == 0 {
        return Err(invalid("on_time_unused requires t >= 1"));
    }
    let first_on_time = deadline.inverse(t);
    let floor = match lang.nth(first_on_time) {
        Ok(x) => x,
        Err(Error::ExhaustedEnumeration { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    match scan_unused(lang, used, floor) {
        Ok(x) => Ok(Some(x)),
        Err(Error::ExhaustedEnumeration { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Amortized [`next_unused`] / [`on_time_unused`] for one language queried
/// repeatedly against one growing [`UsedSet`].
///
/// Both answers are nondecreasing over time because the used set only grows
/// (and `D^{-1}(t)` only grows), so the cursor never has to move backwards.
/// Reusing a cursor with a different used set gives wrong answers.
#[derive(Debug, Clone, Default)]
pub struct UnusedCursor {
    unused_floor: Option<StringId>,
    on_time_floor: Option<StringId>,
}

impl UnusedCursor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_unused(&mut self, lang: &dyn Language, used: &UsedSet) -> Result<StringId> {
        let start = match self.unused_floor {
            Some(x) => x,
            None => lang.nth(1)?,
        };
        let x = scan_unused(lang, used, start)?;
        self.unused_floor = Some(x);
        Ok(x)
    }

    pub fn on_time_unused(&mut self, lang: &dyn Language, used: &UsedSet, t: u64, deadline: &DeadlineFn) -> Result<Option<StringId>> {
        if t == 0 {
            return Err(invalid("on_time_unused requires t >= 1"));
        }
        let floor = match lang.nth(deadline.inverse(t)) {
            Ok(x) => x,
            Err(Error::ExhaustedEnumeration { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let start = self.on_time_floor.map_or(floor, |c| c.max(floor));
        match scan_unused(lang, used, start) {
            Ok(x) => {
                self.on_time_floor = Some(x);
                Ok(Some(x))
            }
            Err(Error::ExhaustedEnumeration { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// `|A ∩ B_n| / n` where `B_n` is the first `n` elements of `B`.
pub fn plain_prefix_density(a: &dyn Language, b: &dyn Language, n: u64) -> Result<Density> {
    if n == 0 {
        return Err(invalid("plain_prefix_density requires n >= 1"));
    }
    let last = b.nth(n)?;
    // Walk whichever side has fewer members up to `last`.
    let a_count = a.rank_leq(last);
    let hits = if a_count <= n {
        let mut hits = 0;
        let mut x = StringId(0);
        for _ in 0..a_count {
            x = a.first_at_or_after(x)?;
            if b.contains(x) {
                hits += 1;
            }
            x = StringId(x.0 + 1);
        }
        hits
    } else {
        let mut hits = 0;
        let mut x = StringId(0);
        for _ in 0..n {
            x = b.first_at_or_after(x)?;
            if a.contains(x) {
                hits += 1;
            }
            x = StringId(x.0 + 1);
        }
        hits
    };
    Ok(Density::new(hits, n))
}
