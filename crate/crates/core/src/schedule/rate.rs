use std::sync::Arc;

use crate::error::{invalid, Result};

/// Hallucination-rate bound `H(t)`, defined for `t >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum RateFn {
    /// `H(t) = t^{-beta}`.
    Power { beta: f64 },
    Constant { value: f64 },
    /// `H(t) = values[t-1]`; times past the table reuse the last value.
    Table { values: Arc<[f64]> },
}

impl RateFn {
    pub fn power(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(invalid(format!("rate exponent must be finite and >= 0, got {beta}")));
        }
        Ok(RateFn::Power { beta })
    }

    pub fn constant(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(invalid(format!("rate must be finite and >= 0, got {value}")));
        }
        Ok(RateFn::Constant { value })
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("rate table must be nonempty, finite and nonnegative"));
        }
        Ok(RateFn::Table { values: values.into() })
    }

    pub fn eval(&self, t: u64) -> f64 {
        let t = t.max(1);
        match self {
            RateFn::Power { beta } => (t as f64).powf(-beta),
            RateFn::Constant { value } => *value,
            RateFn::Table { values } => values[((t - 1) as usize).min(values.len() - 1)],
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RateFn::Power { beta } => format!("H(t)=t^-{beta}"),
            RateFn::Constant { value } => format!("H(t)={value}"),
            RateFn::Table { values } => format!("H=table[{}]", values.len()),
        }
    }
}
