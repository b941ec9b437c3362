//! Bounded-horizon versions of the function constructions behind the
//! density-metric reduction and the speculation budget.
//!
//! Every construction scans a finite horizon. Infima over unbounded ranges
//! become suffix minima up to the horizon, and staircases stop at the last
//! level whose threshold fits; that level is then held forever.

use super::{check_feasible_profile, DeadlineFn, Profile, RateFn};
use crate::error::{invalid, Result};

/// Piecewise-constant nondecreasing `s` with `s(i) = k` on `[N_k, N_{k+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Staircase {
    thresholds: Vec<u64>,
    horizon: u64,
}

impl Staircase {
    pub fn eval(&self, i: u64) -> u64 {
        self.thresholds.partition_point(|&n| n <= i.max(1)) as u64
    }

    /// `N_1, N_2, …`, with `N_1 = 1`.
    pub fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Level held from the last threshold onwards; the next threshold was
    /// not reached within the horizon.
    pub fn truncated_level(&self) -> u64 {
        self.thresholds.len() as u64
    }

    /// `Σ_{k <= m} s(k)`.
    pub fn prefix_sum(&self, m: u64) -> u64 {
        let mut total = 0;
        for (k, w) in self.thresholds.iter().enumerate() {
            if *w > m {
                break;
            }
            let end = self.thresholds.get(k + 1).map_or(m, |&n| (n - 1).min(m));
            total += (k as u64 + 1) * (end - w + 1);
        }
        total
    }
}

/// Slowly diverging `s` with `s = o(a)` and `s = o(b)`.
///
/// `N_k` is the first index from which both `a` and `b` stay at or above
/// `k²` up to the horizon, so `s(i) <= min(a(i), b(i)) / k` on block `k >= 2`.
pub fn slow_divergent_minorant(a: impl Fn(u64) -> f64, b: impl Fn(u64) -> f64, horizon: u64) -> Result<Staircase> {
    if horizon == 0 {
        return Err(invalid("minorant horizon must be >= 1"));
    }
    let h = horizon as usize;
    let mut floor = vec![0.0f64; h + 2];
    floor[h + 1] = f64::INFINITY;
    for i in (1..=h).rev() {
        let v = a(i as u64).min(b(i as u64));
        floor[i] = floor[i + 1].min(v);
    }
    let mut thresholds = vec![1u64];
    let mut i = 2usize;
    for k in 2u64.. {
        let need = (k * k) as f64;
        while i <= h && floor[i] < need {
            i += 1;
        }
        if i > h {
            break;
        }
        thresholds.push(i as u64);
        i += 1;
    }
    Ok(Staircase { thresholds, horizon })
}

/// Output of [`diagonal_dominant`]: `s(1..=horizon)` plus its thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct Dominant {
    values: Vec<u64>,
    thresholds: Vec<u64>,
}

impl Dominant {
    /// `s(i)`; past the horizon the last value is held.
    pub fn eval(&self, i: u64) -> u64 {
        if i == 0 {
            return 0;
        }
        let k = ((i - 1) as usize).min(self.values.len() - 1);
        self.values[k]
    }

    pub fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }

    pub fn horizon(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn truncated_level(&self) -> u64 {
        self.thresholds.len() as u64
    }

    /// Block index `k` with `N_k <= i < N_{k+1}`.
    pub fn block_of(&self, i: u64) -> u64 {
        self.thresholds.partition_point(|&n| n <= i.max(1)) as u64
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Nondecreasing `s = o(i)` that eventually dominates every member of a
/// family of sublinear nondecreasing functions.
///
/// `N_k = max(k², N_{k-1} + 1, first i with f_m(i') <= i'/k for all m <= k
/// and all i' >= i up to the horizon)`, and `s(i) = max{k, f_1(i), …, f_k(i)}`
/// on `[N_k, N_{k+1})`.
pub fn diagonal_dominant(family: &[&dyn Fn(u64) -> u64], horizon: u64) -> Result<Dominant> {
    diagonal_dominant_with(family.len(), horizon, |m, from, running| {
        let f = family[m - 1];
        for (i, slot) in running.iter_mut().enumerate().skip(from) {
            *slot = (*slot).max(f(i as u64));
        }
    })
}

/// Core of [`diagonal_dominant`]: `merge(m, from, running)` must raise
/// `running[i]` to at least `f_m(i)` for every `i >= from`.
fn diagonal_dominant_with(
    family_len: usize,
    horizon: u64,
    mut merge: impl FnMut(usize, usize, &mut [u64]),
) -> Result<Dominant> {
    if horizon == 0 {
        return Err(invalid("dominant horizon must be >= 1"));
    }
    let h = horizon as usize;
    let mut running = vec![0u64; h + 1];
    let mut values = vec![0u64; h + 1];
    let mut thresholds: Vec<u64> = Vec::new();
    let mut pending: Option<(u64, usize)> = None;
    let mut ratio_floor: Vec<u64> = Vec::new();
    let mut pointer = 0usize;

    for k in 1u64.. {
        let prev = thresholds.last().map_or(0, |&n| n as usize);
        let start = if k == 1 { 1 } else { ((k * k) as usize).max(prev + 1) };
        if start > h {
            break;
        }
        let n_k = if (k as usize) <= family_len {
            merge(k as usize, start, &mut running);
            let last_violation =
                (start..=h).rev().find(|&i| u128::from(k) * u128::from(running[i]) > i as u128).unwrap_or(0);
            if k == 1 {
                1
            } else {
                start.max(last_violation + 1)
            }
        } else {
            if ratio_floor.is_empty() {
                // floor(i / F(i)) suffix minima, valid from `start` on.
                ratio_floor = vec![u64::MAX; h + 2];
                for i in (start..=h).rev() {
                    let r = if running[i] == 0 { u64::MAX } else { i as u64 / running[i] };
                    ratio_floor[i] = ratio_floor[i + 1].min(r);
                }
                pointer = start;
            }
            pointer = pointer.max(start);
            while pointer <= h && ratio_floor[pointer] < k {
                pointer += 1;
            }
            pointer
        };
        if n_k > h {
            break;
        }
        if let Some((level, from)) = pending.take() {
            for (i, v) in values.iter_mut().enumerate().take(n_k).skip(from) {
                *v = level.max(running[i]);
            }
        }
        if (k as usize) <= family_len {
            for i in n_k..=h {
                values[i] = k.max(running[i]);
            }
        } else {
            pending = Some((k, n_k));
        }
        thresholds.push(n_k as u64);
    }
    if let Some((level, from)) = pending {
        for i in from..=h {
            values[i] = level.max(running[i]);
        }
    }
    values.remove(0);
    Ok(Dominant { values, thresholds })
}

/// Number of `q_m` members used by [`build_prefix_deadline`].
pub const PREFIX_FAMILY_SIZE: usize = 64;

/// Prefix-wise deadline built from an element-wise profile.
#[derive(Debug, Clone)]
pub struct PrefixDeadline {
    /// `D_pfx(i) = D_el(s(i))`, tabulated up to the horizon.
    pub d_pfx: DeadlineFn,
    pub s: Dominant,
    r: Vec<u64>,
    tau: Vec<u64>,
}

impl PrefixDeadline {
    /// `r(i) = max{j <= i : D_el(j) < D_pfx(i)}`, for `1 <= i <= horizon`.
    pub fn r(&self, i: u64) -> u64 {
        self.r[(i - 1) as usize]
    }

    /// `τ(t) = min{n : D_pfx(n) > t}`, for `1 <= t <= horizon`. Values past
    /// the tabulated range read as `horizon + 1`.
    pub fn tau(&self, t: u64) -> u64 {
        self.tau[(t - 1) as usize]
    }

    pub fn horizon(&self) -> u64 {
        self.r.len() as u64
    }
}

/// Builds `D_pfx` so that element-wise guarantees under `(D_el, H_el)`
/// transfer to prefix-wise ones.
///
/// `s` dominates `g(i) = D_el^{-1}(⌈√(i·D_el(i))⌉)` and
/// `q_m(n) = 1 + max{D_el^{-1}(t) : ⌊t·H_el(t)/m⌋ <= n}` for `m <= 64`, with
/// both indices and times bounded by `horizon`.
pub fn build_prefix_deadline(d_el: &DeadlineFn, h_el: &RateFn, horizon: u64) -> Result<PrefixDeadline> {
    let report = check_feasible_profile(&Profile::new(d_el.clone(), h_el.clone()), horizon)?;
    if !report.feasible() {
        let failed: Vec<_> = report.failures().map(|e| e.condition).collect();
        return Err(invalid(format!("infeasible profile: {}", failed.join(", "))));
    }
    let h = horizon as usize;
    let t_h: Vec<f64> = (0..=h).map(|t| if t == 0 { 0.0 } else { t as f64 * h_el.eval(t as u64) }).collect();
    let g = |i: u64| {
        let target = (i as f64 * d_el.eval(i) as f64).sqrt().ceil() as u64;
        d_el.inverse(target)
    };
    let mut best = vec![0u64; h + 1];
    let s = diagonal_dominant_with(PREFIX_FAMILY_SIZE + 1, horizon, |m, from, running| {
        if m == 1 {
            for (i, slot) in running.iter_mut().enumerate().skip(from) {
                *slot = (*slot).max(g(i as u64));
            }
            return;
        }
        let m = (m - 1) as f64;
        // best[v] = largest t with ⌊tH(t)/m⌋ = v; prefix maxima give t_max(n).
        best.fill(0);
        for (t, &th) in t_h.iter().enumerate().skip(1) {
            let v = (th / m).floor() as usize;
            if v <= h {
                best[v] = t as u64;
            }
        }
        let mut t_max = 0u64;
        let mut cached = (0u64, 0u64);
        for (n, slot) in running.iter_mut().enumerate() {
            t_max = t_max.max(best[n]);
            if n < from {
                continue;
            }
            if cached.0 != t_max {
                cached = (t_max, d_el.inverse(t_max));
            }
            *slot = (*slot).max(1 + cached.1);
        }
    })?;
    let d_values: Vec<u64> = s.values().iter().map(|&k| d_el.eval(k)).collect();
    let r = d_values.iter().enumerate().map(|(i, &v)| (i as u64 + 1).min(d_el.inverse(v) - 1)).collect();
    let d_pfx = DeadlineFn::table(d_values)?;
    let tau = (1..=horizon).map(|t| d_pfx.inverse(t + 1)).collect();
    Ok(PrefixDeadline { d_pfx, s, r, tau })
}

/// Prefix-wise hallucination bound `H_pfx = H_el / √a` with
/// `a(t) = min_{t <= u <= horizon} u·H_el(u)/τ(u)`.
#[derive(Debug, Clone)]
pub struct PrefixHallucination {
    pub h_pfx: RateFn,
    a: Vec<f64>,
}

impl PrefixHallucination {
    pub fn a(&self, t: u64) -> f64 {
        self.a[(t - 1) as usize]
    }
}

/// `H_pfx(t) = H_el(t)/√a(t)`, or `H_el(t)` while `a(t) < 1`.
pub fn build_prefix_hallucination(tau: impl Fn(u64) -> u64, h_el: &RateFn, horizon: u64) -> Result<PrefixHallucination> {
    if horizon == 0 {
        return Err(invalid("hallucination horizon must be >= 1"));
    }
    let h = horizon as usize;
    let mut a = vec![0.0f64; h];
    let mut running = f64::INFINITY;
    for t in (1..=h).rev() {
        let tau_t = tau(t as u64).max(1) as f64;
        running = running.min(t as f64 * h_el.eval(t as u64) / tau_t);
        a[t - 1] = running;
    }
    let values = a
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let base = h_el.eval(k as u64 + 1);
            if a >= 1.0 {
                base / a.sqrt()
            } else {
                base
            }
        })
        .collect();
    Ok(PrefixHallucination { h_pfx: RateFn::table(values)?, a })
}

/// Speculation budget `C(m)` over epochs.
///
/// `C` is the slow divergent minorant of `a(m) = D(m) - D(m-1)` and
/// `b(m) = min_{D(m-1) < t <= horizon} t·H(t) / m` over the epochs that
/// start inside the horizon.
pub fn choose_speculation_budget(d: &DeadlineFn, h: &RateFn, horizon: u64) -> Result<Staircase> {
    let report = check_feasible_profile(&Profile::new(d.clone(), h.clone()), horizon)?;
    if !report.feasible() {
        let failed: Vec<_> = report.failures().map(|e| e.condition).collect();
        return Err(invalid(format!("infeasible profile: {}", failed.join(", "))));
    }
    let epochs = d.inverse(horizon);
    // b(m) needs min t·H(t) over (D(m-1), horizon]; sweep t downwards once.
    let mut b_num = vec![f64::INFINITY; epochs as usize + 1];
    let mut running = f64::INFINITY;
    let mut m = epochs;
    for t in (1..=horizon).rev() {
        running = running.min(t as f64 * h.eval(t));
        while m >= 1 && d.eval(m - 1) + 1 >= t {
            b_num[m as usize] = running;
            m -= 1;
        }
    }
    slow_divergent_minorant(
        |m| (d.eval(m) - d.eval(m - 1)) as f64,
        |m| b_num[m as usize] / m as f64,
        epochs,
    )
}
