use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{exhausted, Language, StringId, DEFAULT_BOUND};
use crate::error::{invalid, Result};

/// All integers `>= start`.
#[derive(Debug, Clone)]
pub struct Naturals {
    start: u64,
    bound: u64,
}

impl Naturals {
    pub fn new(start: u64) -> Self {
        Self { start, bound: DEFAULT_BOUND }
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }
}

impl Language for Naturals {
    fn contains(&self, x: StringId) -> bool {
        x.0 >= self.start
    }

    fn nth(&self, i: u64) -> Result<StringId> {
        let x = self.start.checked_add(i.saturating_sub(1)).filter(|&x| i >= 1 && x <= self.bound);
        x.map(StringId).ok_or_else(|| exhausted(self, format!("nth({i})")))
    }

    fn rank_leq(&self, x: StringId) -> u64 {
        let x = x.0.min(self.bound);
        if x < self.start {
            0
        } else {
            x - self.start + 1
        }
    }

    fn bound(&self) -> u64 {
        self.bound
    }

    fn describe(&self) -> String {
        format!("N>={}", self.start)
    }

    fn first_at_or_after(&self, x: StringId) -> Result<StringId> {
        let x = x.0.max(self.start);
        if x > self.bound {
            return Err(exhausted(self, format!("first_at_or_after({x})")));
        }
        Ok(StringId(x))
    }
}

/// How the consecutive blocks `B_0, B_1, …` of a block-partition chain grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockGrowth {
    /// `B_m = [2^m, 2^{m+1} - 1]`.
    Dyadic,
    /// `|B_m| = m + 1`, so `B_m` starts at `1 + m(m+1)/2`.
    Linear,
}

impl BlockGrowth {
    /// First element `b_m*` of block `m`, or `None` on overflow.
    pub fn block_start(self, m: u64) -> Option<u64> {
        match self {
            BlockGrowth::Dyadic => (m < 64).then(|| 1 << m),
            BlockGrowth::Linear => m.checked_mul(m.checked_add(1)?).map(|p| p / 2)?.checked_add(1),
        }
    }

    /// Number of blocks whose first element is `<= x`.
    pub fn blocks_started_leq(self, x: u64) -> u64 {
        if x == 0 {
            return 0;
        }
        match self {
            BlockGrowth::Dyadic => u64::from(64 - x.leading_zeros()),
            BlockGrowth::Linear => {
                // largest m with m(m+1)/2 <= x - 1
                let y = u128::from(x - 1);
                let mut m = ((8 * y + 1).isqrt() as u64 - 1) / 2;
                while u128::from(m + 1) * u128::from(m + 2) / 2 <= y {
                    m += 1;
                }
                while u128::from(m) * u128::from(m + 1) / 2 > y {
                    m -= 1;
                }
                m + 1
            }
        }
    }

    /// Block containing `x >= 1`.
    pub fn block_of(self, x: u64) -> u64 {
        self.blocks_started_leq(x) - 1
    }
}

/// `L^j`: every element of blocks `0..=j`, plus the first element of each
/// later block.
#[derive(Debug, Clone)]
pub struct BlockLevel {
    growth: BlockGrowth,
    level: u64,
    end: u64,
    bound: u64,
}

impl BlockLevel {
    pub fn new(growth: BlockGrowth, level: u64) -> Self {
        let end = growth.block_start(level + 1).map_or(u64::MAX, |s| s - 1);
        Self { growth, level, end, bound: DEFAULT_BOUND }
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    fn checked(&self, x: Option<u64>, what: impl FnOnce() -> String) -> Result<StringId> {
        match x {
            Some(x) if x <= self.bound => Ok(StringId(x)),
            _ => Err(exhausted(self, what())),
        }
    }
}

impl Language for BlockLevel {
    fn contains(&self, x: StringId) -> bool {
        let x = x.0;
        x >= 1 && (x <= self.end || self.growth.block_start(self.growth.block_of(x)) == Some(x))
    }

    fn nth(&self, i: u64) -> Result<StringId> {
        if i == 0 {
            return Err(invalid("nth is 1-based"));
        }
        let x = if i <= self.end { Some(i) } else { self.growth.block_start(self.level + (i - self.end)) };
        self.checked(x, || format!("nth({i})"))
    }

    fn rank_leq(&self, x: StringId) -> u64 {
        let x = x.0.min(self.bound);
        if x <= self.end {
            x
        } else {
            self.end + self.growth.blocks_started_leq(x) - (self.level + 1)
        }
    }

    fn bound(&self) -> u64 {
        self.bound
    }

    fn describe(&self) -> String {
        format!("block[{:?}] L^{}", self.growth, self.level)
    }

    fn first_at_or_after(&self, x: StringId) -> Result<StringId> {
        let x = x.0.max(1);
        let y = if x <= self.end {
            Some(x)
        } else {
            let m = self.growth.block_of(x);
            if self.growth.block_start(m) == Some(x) {
                Some(x)
            } else {
                self.growth.block_start(m + 1)
            }
        };
        self.checked(y, || format!("first_at_or_after({x})"))
    }
}

/// Marker positions `a_0 = 0 < a_1 < a_2 < …` of a marker-interval chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "spacing", rename_all = "snake_case")]
pub enum MarkerSpacing {
    /// `a_i = base^i` for `i >= 1`.
    Geometric { base: u64 },
    /// `a_i = i^power`.
    Polynomial { power: u32 },
}

impl MarkerSpacing {
    pub fn validate(self) -> Result<()> {
        match self {
            MarkerSpacing::Geometric { base } if base < 2 => Err(invalid(format!("marker base must be >= 2, got {base}"))),
            MarkerSpacing::Polynomial { power } if power < 2 => {
                Err(invalid(format!("marker power must be >= 2, got {power}")))
            }
            _ => Ok(()),
        }
    }

    /// `a_i`, or `None` on overflow.
    pub fn marker(self, i: u64) -> Option<u64> {
        if i == 0 {
            return Some(0);
        }
        let e = u32::try_from(i).ok();
        match self {
            MarkerSpacing::Geometric { base } => base.checked_pow(e?),
            MarkerSpacing::Polynomial { power } => i.checked_pow(power),
        }
    }

    /// Index of the largest marker `<= x`.
    pub fn last_marker_leq(self, x: u64) -> u64 {
        match self {
            MarkerSpacing::Geometric { base } => {
                if x < base {
                    return 0;
                }
                let mut i = 0;
                let mut p = 1u64;
                while let Some(q) = p.checked_mul(base).filter(|&q| q <= x) {
                    p = q;
                    i += 1;
                }
                i
            }
            MarkerSpacing::Polynomial { power } => {
                let mut r = (x as f64).powf(1.0 / f64::from(power)) as u64;
                while self.marker(r + 1).is_some_and(|a| a <= x) {
                    r += 1;
                }
                while self.marker(r).is_none_or(|a| a > x) {
                    r -= 1;
                }
                r
            }
        }
    }
}

/// `L^j = ∪_i [a_i, a_i + j]`.
///
/// Early markers may sit closer than `j` apart, so the overlapping head is
/// materialized once; past it every marker contributes exactly `j + 1`
/// fresh elements.
#[derive(Debug, Clone)]
pub struct MarkerLevel {
    spacing: MarkerSpacing,
    width: u64,
    head: Vec<u64>,
    /// First marker whose interval lies beyond `head`.
    tail_start: u64,
    bound: u64,
}

impl MarkerLevel {
    pub fn new(spacing: MarkerSpacing, width: u64) -> Result<Self> {
        spacing.validate()?;
        let mut tail_start = 1;
        loop {
            let (Some(prev), Some(cur)) = (spacing.marker(tail_start - 1), spacing.marker(tail_start)) else {
                return Err(invalid(format!("marker width {width} too large for {spacing:?}")));
            };
            if cur - prev > width {
                break;
            }
            tail_start += 1;
        }
        let mut head = Vec::new();
        for i in 0..tail_start {
            let a = spacing.marker(i).expect("checked above");
            let from = head.last().map_or(a, |&last: &u64| a.max(last + 1));
            head.extend(from..=a + width);
        }
        Ok(Self { spacing, width, head, tail_start, bound: DEFAULT_BOUND })
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    fn head_max(&self) -> u64 {
        *self.head.last().expect("head holds at least [0, width]")
    }

    fn checked(&self, x: Option<u64>, what: impl FnOnce() -> String) -> Result<StringId> {
        match x {
            Some(x) if x <= self.bound => Ok(StringId(x)),
            _ => Err(exhausted(self, what())),
        }
    }
}

impl Language for MarkerLevel {
    fn contains(&self, x: StringId) -> bool {
        let x = x.0;
        if x <= self.head_max() {
            return self.head.binary_search(&x).is_ok();
        }
        let a = self.spacing.marker(self.spacing.last_marker_leq(x)).expect("marker <= x exists");
        x - a <= self.width
    }

    fn nth(&self, i: u64) -> Result<StringId> {
        if i == 0 {
            return Err(invalid("nth is 1-based"));
        }
        let h = self.head.len() as u64;
        if i <= h {
            return self.checked(Some(self.head[(i - 1) as usize]), || format!("nth({i})"));
        }
        let k = i - h - 1;
        let per = self.width + 1;
        let x = self.spacing.marker(self.tail_start + k / per).and_then(|a| a.checked_add(k % per));
        self.checked(x, || format!("nth({i})"))
    }

    fn rank_leq(&self, x: StringId) -> u64 {
        let x = x.0.min(self.bound);
        if x <= self.head_max() {
            return self.head.partition_point(|&y| y <= x) as u64;
        }
        let h = self.head.len() as u64;
        let last = self.spacing.last_marker_leq(x);
        if last < self.tail_start {
            return h;
        }
        let a = self.spacing.marker(last).expect("marker <= x exists");
        h + (last - self.tail_start) * (self.width + 1) + (x - a + 1).min(self.width + 1)
    }

    fn bound(&self) -> u64 {
        self.bound
    }

    fn describe(&self) -> String {
        format!("marker[{:?}] L^{}", self.spacing, self.width)
    }

    fn first_at_or_after(&self, x: StringId) -> Result<StringId> {
        let x = x.0;
        if x <= self.head_max() {
            let pos = self.head.partition_point(|&y| y < x);
            return self.checked(Some(self.head[pos]), || format!("first_at_or_after({x})"));
        }
        let last = self.spacing.last_marker_leq(x);
        let a = self.spacing.marker(last).expect("marker <= x exists");
        let y = if x - a <= self.width { Some(x) } else { self.spacing.marker(last + 1) };
        self.checked(y, || format!("first_at_or_after({x})"))
    }
}

/// Language given by a membership predicate, enumerated by bounded scan.
#[derive(Clone)]
pub struct PredicateLanguage {
    name: String,
    start: u64,
    pred: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    bound: u64,
}

impl PredicateLanguage {
    pub fn new(name: impl Into<String>, start: u64, pred: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        Self { name: name.into(), start, pred: Arc::new(pred), bound: 1 << 24 }
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }
}

impl fmt::Debug for PredicateLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateLanguage").field("name", &self.name).field("bound", &self.bound).finish()
    }
}

impl Language for PredicateLanguage {
    fn contains(&self, x: StringId) -> bool {
        x.0 >= self.start && x.0 <= self.bound && (self.pred)(x.0)
    }

    fn nth(&self, i: u64) -> Result<StringId> {
        if i == 0 {
            return Err(invalid("nth is 1-based"));
        }
        let mut seen = 0;
        for x in self.start..=self.bound {
            if (self.pred)(x) {
                seen += 1;
                if seen == i {
                    return Ok(StringId(x));
                }
            }
        }
        Err(exhausted(self, format!("nth({i})")))
    }

    fn rank_leq(&self, x: StringId) -> u64 {
        if x.0 < self.start {
            return 0;
        }
        (self.start..=x.0.min(self.bound)).filter(|&y| (self.pred)(y)).count() as u64
    }

    fn bound(&self) -> u64 {
        self.bound
    }

    fn describe(&self) -> String {
        self.name.clone()
    }

    fn first_at_or_after(&self, x: StringId) -> Result<StringId> {
        (x.0.max(self.start)..=self.bound)
            .find(|&y| (self.pred)(y))
            .map(StringId)
            .ok_or_else(|| exhausted(self, format!("first_at_or_after({x})")))
    }
}
