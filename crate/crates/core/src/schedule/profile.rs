use serde::Serialize;

use super::{DeadlineFn, RateFn};
use crate::error::{invalid, Result};

/// A deadline paired with a hallucination-rate bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub deadline: DeadlineFn,
    pub rate: RateFn,
}

impl Profile {
    pub fn new(deadline: DeadlineFn, rate: RateFn) -> Self {
        Self { deadline, rate }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Failed, but the condition is only advisory for this input.
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub condition: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

/// Per-condition outcome of [`check_feasible_profile`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub horizon: u64,
    pub entries: Vec<CheckEntry>,
}

impl FeasibilityReport {
    /// `true` when no entry failed; warnings are allowed.
    pub fn feasible(&self) -> bool {
        self.entries.iter().all(|e| e.status != CheckStatus::Fail)
    }

    pub fn status(&self, condition: &str) -> Option<CheckStatus> {
        self.entries.iter().find(|e| e.condition == condition).map(|e| e.status)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.status == CheckStatus::Fail)
    }
}

pub const D_MONOTONE: &str = "deadline_nondecreasing";
pub const D_CONVEX: &str = "deadline_increments_nondecreasing";
pub const D_SUPERLINEAR: &str = "deadline_superlinear_trend";
pub const H_MONOTONE: &str = "rate_nonincreasing";
pub const H_VANISHING: &str = "rate_vanishing_trend";
pub const BUDGET_TREND: &str = "rate_dominates_inverse_deadline";

/// Log-spaced checkpoints `16, 32, 64, …` up to `limit`.
pub(crate) fn log_checkpoints(limit: u64) -> Vec<u64> {
    std::iter::successors(Some(16u64), |&x| x.checked_mul(2)).take_while(|&x| x <= limit).collect()
}

/// Evaluates the feasible-profile conditions up to `horizon`.
///
/// Monotonicity and convexity of `D` are checked exhaustively over the
/// indices whose deadlines fall inside the horizon; the asymptotic
/// conditions are checked as strict trends at log-spaced checkpoints.
pub fn check_feasible_profile(profile: &Profile, horizon: u64) -> Result<FeasibilityReport> {
    if horizon < 100 {
        return Err(invalid(format!("feasibility horizon must be >= 100, got {horizon}")));
    }
    let d = &profile.deadline;
    let h = &profile.rate;
    let max_index = d.inverse(horizon);
    let mut entries = Vec::new();

    // Built-in kinds round a convex real function up to integers, which
    // moves each increment by less than one. An increment may therefore
    // trail the largest earlier increment by at most one.
    let mut mono = None;
    let mut convex = None;
    let mut prev = 0u64;
    let mut max_inc = 0u64;
    for i in 1..=max_index {
        let cur = d.eval(i);
        if cur < prev {
            mono.get_or_insert(i);
        } else {
            let inc = cur - prev;
            if inc + 1 < max_inc {
                convex.get_or_insert(i);
            }
            max_inc = max_inc.max(inc);
        }
        prev = cur;
    }
    entries.push(entry(D_MONOTONE, mono.is_none(), mono.map(|i| format!("D({i}) < D({})", i - 1))));
    let convex_detail = convex.map(|i| format!("D({i})-D({}) shrinks by more than rounding", i - 1));
    entries.push(match (convex.is_none(), d.is_table()) {
        (false, true) => CheckEntry { condition: D_CONVEX, status: CheckStatus::Warn, detail: convex_detail.unwrap_or_default() },
        (ok, _) => entry(D_CONVEX, ok, convex_detail),
    });

    let index_points = log_checkpoints(max_index);
    let superlinear = index_points
        .windows(2)
        .find(|w| u128::from(d.eval(w[0])) * u128::from(w[1]) >= u128::from(d.eval(w[1])) * u128::from(w[0]));
    entries.push(trend(D_SUPERLINEAR, &index_points, superlinear.map(|w| format!("D(i)/i stalls between i={} and i={}", w[0], w[1]))));

    let time_points = log_checkpoints(horizon);
    let nonincreasing = time_points.windows(2).find(|w| h.eval(w[1]) > h.eval(w[0]));
    entries.push(trend(H_MONOTONE, &time_points, nonincreasing.map(|w| format!("H({}) > H({})", w[1], w[0]))));
    let vanishing = time_points.windows(2).find(|w| h.eval(w[1]) >= h.eval(w[0]));
    entries.push(trend(H_VANISHING, &time_points, vanishing.map(|w| format!("H does not decrease from t={} to t={}", w[0], w[1]))));
    let ratio = |t: u64| t as f64 * h.eval(t) / d.inverse(t) as f64;
    let budget = time_points.windows(2).find(|w| ratio(w[1]) <= ratio(w[0]));
    entries.push(trend(BUDGET_TREND, &time_points, budget.map(|w| format!("t*H(t)/D^-1(t) stalls between t={} and t={}", w[0], w[1]))));

    Ok(FeasibilityReport { horizon, entries })
}

/// Trend checks need two checkpoints; with fewer they pass vacuously.
fn trend(condition: &'static str, points: &[u64], failure: Option<String>) -> CheckEntry {
    if points.len() < 2 {
        return CheckEntry { condition, status: CheckStatus::Pass, detail: "fewer than two checkpoints".into() };
    }
    entry(condition, failure.is_none(), failure)
}

fn entry(condition: &'static str, ok: bool, detail: Option<String>) -> CheckEntry {
    CheckEntry {
        condition,
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        detail: detail.unwrap_or_default(),
    }
}
