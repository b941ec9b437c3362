//! Exact density and hallucination metrics over finite traces.
//!
//! `S` is the generator's output sequence, `R` a reference sequence
//! (normally the target's canonical enumeration) and `S_n` the first `n`
//! elements of `S`, or all of `S` when it is shorter.

use std::cmp::Ordering;
use std::io::Write;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lang::{Language, StringId};
use crate::schedule::DeadlineFn;

/// Exact ratio `hits / of`, compared by cross-multiplication.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Density {
    pub hits: u64,
    pub of: u64,
}

impl Density {
    pub fn new(hits: u64, of: u64) -> Self {
        assert!(of > 0 && hits <= of, "density {hits}/{of} out of range");
        Self { hits, of }
    }

    pub fn to_f64(self) -> f64 {
        self.hits as f64 / self.of as f64
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Density {}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.hits) * u128::from(other.of)).cmp(&(u128::from(other.hits) * u128::from(self.of)))
    }
}

/// 1-based time of the first occurrence of each element.
fn first_positions(seq: &[StringId]) -> FxHashMap<StringId, u64> {
    let mut pos = FxHashMap::with_capacity_and_hasher(seq.len(), Default::default());
    for (k, &x) in seq.iter().enumerate() {
        pos.entry(x).or_insert(k as u64 + 1);
    }
    pos
}

fn check_prefix(r: &[StringId], i: u64) -> Result<()> {
    if i == 0 {
        return Err(invalid("density index must be >= 1"));
    }
    if (r.len() as u64) < i {
        return Err(invalid(format!("reference has {} elements, need {i}", r.len())));
    }
    Ok(())
}

/// `μ^el_i = (1/i)·|{j <= i : r_j ∈ S_{D(j)}}|`.
pub fn timely_elementwise_density(s: &[StringId], r: &[StringId], d: &DeadlineFn, i: u64) -> Result<Density> {
    check_prefix(r, i)?;
    let pos = first_positions(s);
    let hits = r[..i as usize]
        .iter()
        .enumerate()
        .filter(|(j, x)| pos.get(x).is_some_and(|&p| p <= d.eval(*j as u64 + 1)))
        .count() as u64;
    Ok(Density::new(hits, i))
}

/// `μ^pfx_i = |S_{F(i)} ∩ R_i| / i`.
pub fn prefixwise_density(s: &[StringId], r: &[StringId], f: &DeadlineFn, i: u64) -> Result<Density> {
    check_prefix(r, i)?;
    let window = f.eval(i);
    let pos = first_positions(s);
    let reference: FxHashSet<StringId> = r[..i as usize].iter().copied().collect();
    let hits = reference.iter().filter(|x| pos.get(x).is_some_and(|&p| p <= window)).count() as u64;
    Ok(Density::new(hits, i))
}

/// `|(S_{D(i)} ∪ X_{D(i)}) ∩ K_i| / i`.
pub fn union_density(s: &[StringId], x: &[StringId], k: &dyn Language, d: &DeadlineFn, i: u64) -> Result<Density> {
    if i == 0 {
        return Err(invalid("density index must be >= 1"));
    }
    let window = d.eval(i);
    let take = |seq: &[StringId]| seq.len().min(usize::try_from(window).unwrap_or(usize::MAX));
    let seen: FxHashSet<StringId> = s[..take(s)].iter().chain(&x[..take(x)]).copied().collect();
    let mut hits = 0;
    let mut cur = StringId(0);
    for _ in 0..i {
        cur = k.first_at_or_after(cur)?;
        if seen.contains(&cur) {
            hits += 1;
        }
        cur = StringId(cur.0 + 1);
    }
    Ok(Density::new(hits, i))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HallucinationStats {
    pub count: u64,
    pub rate: f64,
}

/// Outputs among `s_1..s_t` that fall outside `K`.
pub fn hallucination_stats(s: &[StringId], k: &dyn Language, t: u64) -> Result<HallucinationStats> {
    if t == 0 || (s.len() as u64) < t {
        return Err(invalid(format!("need 1 <= t <= {}, got {t}", s.len())));
    }
    let count = s[..t as usize].iter().filter(|&&x| !k.contains(x)).count() as u64;
    Ok(HallucinationStats { count, rate: count as f64 / t as f64 })
}

/// `(min, max)` of the last `window` values.
pub fn tail_extrema(series: &[(u64, f64)], window: usize) -> Result<(f64, f64)> {
    if window == 0 || series.len() < window {
        return Err(invalid(format!("tail window {window} needs at least that many entries, got {}", series.len())));
    }
    let tail = &series[series.len() - window..];
    let lo = tail.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = tail.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Last quarter of `len` checkpoints, at least one.
pub fn default_tail_window(len: usize) -> usize {
    len.div_ceil(4).max(1)
}

/// Indices `⌈1.3^k⌉`, deduplicated, with `D(i) <= horizon`.
pub fn default_checkpoints(d: &DeadlineFn, horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for k in 0.. {
        let i = 1.3f64.powi(k).ceil() as u64;
        if d.eval(i) > horizon {
            break;
        }
        if out.last() != Some(&i) {
            out.push(i);
        }
    }
    out
}

/// Metrics at one checkpoint index `i`, evaluated at time `D(i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointRow {
    pub index: u64,
    pub time: u64,
    pub mu_el: Density,
    pub mu_pfx: Density,
    pub halluc_count: u64,
    pub halluc_rate: f64,
    pub union_density: Density,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries {
    pub rows: Vec<CheckpointRow>,
    /// Trace length.
    pub horizon: u64,
    /// Hallucinations over the whole trace.
    pub final_halluc: HallucinationStats,
}

/// Which column of a [`MetricSeries`] to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MuEl,
    MuPfx,
    HallucRate,
    Union,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub horizon: u64,
    pub checkpoints: usize,
    pub final_index: u64,
    pub final_mu_el: f64,
    pub final_mu_pfx: f64,
    pub final_union: f64,
    pub final_halluc_count: u64,
    pub final_halluc_rate: f64,
    pub tail_window: usize,
    pub mu_el_tail: (f64, f64),
    pub mu_pfx_tail: (f64, f64),
    pub union_tail: (f64, f64),
}

impl MetricSeries {
    /// Replays generator outputs `o` and adversary outputs `x` (both indexed
    /// by time) against target `k` and deadline `d`.
    pub fn compute(o: &[StringId], x: &[StringId], k: &dyn Language, d: &DeadlineFn, checkpoints: &[u64]) -> Result<Self> {
        let horizon = o.len() as u64;
        if x.len() != o.len() {
            return Err(invalid("generator and adversary sequences differ in length"));
        }
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("checkpoints must be strictly increasing"));
        }
        if let Some(&bad) = checkpoints.iter().find(|&&i| i == 0 || d.eval(i) > horizon) {
            return Err(invalid(format!("checkpoint {bad} has D(i) outside [1, {horizon}]")));
        }
        let max_index = checkpoints.last().copied().unwrap_or(0);
        let gen_time = first_positions(o);
        let adv_time = first_positions(x);
        let mut g = Vec::with_capacity(max_index as usize);
        let mut u = Vec::with_capacity(max_index as usize);
        let mut cur = StringId(0);
        for _ in 0..max_index {
            cur = k.first_at_or_after(cur)?;
            let gt = gen_time.get(&cur).copied().unwrap_or(u64::MAX);
            let at = adv_time.get(&cur).copied().unwrap_or(u64::MAX);
            g.push(gt);
            u.push(gt.min(at));
            cur = StringId(cur.0 + 1);
        }
        let mut halluc_prefix = Vec::with_capacity(o.len() + 1);
        halluc_prefix.push(0u64);
        for &y in o {
            let last = *halluc_prefix.last().expect("nonempty");
            halluc_prefix.push(last + u64::from(!k.contains(y)));
        }

        let mut rows = Vec::with_capacity(checkpoints.len());
        let mut el_hits = 0u64;
        let mut j = 0u64;
        for &i in checkpoints {
            while j < i {
                j += 1;
                if g[(j - 1) as usize] <= d.eval(j) {
                    el_hits += 1;
                }
            }
            let time = d.eval(i);
            let prefix = &g[..i as usize];
            let pfx_hits = prefix.iter().filter(|&&t| t <= time).count() as u64;
            let union_hits = u[..i as usize].iter().filter(|&&t| t <= time).count() as u64;
            let count = halluc_prefix[time as usize];
            rows.push(CheckpointRow {
                index: i,
                time,
                mu_el: Density::new(el_hits, i),
                mu_pfx: Density::new(pfx_hits, i),
                halluc_count: count,
                halluc_rate: count as f64 / time as f64,
                union_density: Density::new(union_hits, i),
            });
        }
        let total = halluc_prefix[o.len()];
        let final_halluc =
            HallucinationStats { count: total, rate: if horizon == 0 { 0.0 } else { total as f64 / horizon as f64 } };
        Ok(Self { rows, horizon, final_halluc })
    }

    pub fn column(&self, metric: Metric) -> Vec<(u64, f64)> {
        self.rows
            .iter()
            .map(|r| {
                let v = match metric {
                    Metric::MuEl => r.mu_el.to_f64(),
                    Metric::MuPfx => r.mu_pfx.to_f64(),
                    Metric::HallucRate => r.halluc_rate,
                    Metric::Union => r.union_density.to_f64(),
                };
                (r.index, v)
            })
            .collect()
    }

    pub fn final_row(&self) -> Option<&CheckpointRow> {
        self.rows.last()
    }

    pub fn summary(&self) -> Result<MetricSummary> {
        let last = self.final_row().ok_or_else(|| invalid("metric series has no checkpoints"))?;
        let window = default_tail_window(self.rows.len());
        Ok(MetricSummary {
            horizon: self.horizon,
            checkpoints: self.rows.len(),
            final_index: last.index,
            final_mu_el: last.mu_el.to_f64(),
            final_mu_pfx: last.mu_pfx.to_f64(),
            final_union: last.union_density.to_f64(),
            final_halluc_count: self.final_halluc.count,
            final_halluc_rate: self.final_halluc.rate,
            tail_window: window,
            mu_el_tail: tail_extrema(&self.column(Metric::MuEl), window)?,
            mu_pfx_tail: tail_extrema(&self.column(Metric::MuPfx), window)?,
            union_tail: tail_extrema(&self.column(Metric::Union), window)?,
        })
    }

    /// One CSV row per checkpoint.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "time", "mu_el", "mu_pfx", "halluc_count", "halluc_rate", "union_density"])?;
        for r in &self.rows {
            w.write_record([
                r.index.to_string(),
                r.time.to_string(),
                r.mu_el.to_f64().to_string(),
                r.mu_pfx.to_f64().to_string(),
                r.halluc_count.to_string(),
                r.halluc_rate.to_string(),
                r.union_density.to_f64().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
