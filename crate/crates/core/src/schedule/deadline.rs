use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{invalid, Result};

/// Monotone map from prefix index to time with `D(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum DeadlineFn {
    /// `D(i) = i`.
    Identity,
    /// `D(i) = c·i`.
    Linear { c: u64 },
    /// `D(i) = ⌈i^{num/den}⌉`, evaluated exactly.
    Power { num: u32, den: u32 },
    /// `D(i) = values[i-1]`; indices past the table map to `u64::MAX`.
    Table { values: Arc<[u64]> },
}

impl DeadlineFn {
    pub fn linear(c: u64) -> Result<Self> {
        if c == 0 {
            return Err(invalid("linear deadline needs c >= 1"));
        }
        Ok(if c == 1 { DeadlineFn::Identity } else { DeadlineFn::Linear { c } })
    }

    /// `⌈i^{num/den}⌉`; the exponent must be at least 1.
    pub fn power(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num < den {
            return Err(invalid(format!("power exponent {num}/{den} must be a fraction >= 1")));
        }
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        Ok(if num == den { DeadlineFn::Identity } else { DeadlineFn::Power { num, den } })
    }

    /// `⌈i^{1+alpha}⌉`, with `1 + alpha` read as a fraction of denominator at most 1000.
    pub fn power_alpha(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid(format!("alpha must be a finite value >= 0, got {alpha}")));
        }
        let (num, den) = to_fraction(1.0 + alpha).ok_or_else(|| invalid(format!("alpha {alpha} is not a small-denominator fraction")))?;
        Self::power(num, den)
    }

    pub fn table(values: Vec<u64>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("table deadline must be nondecreasing"));
        }
        Ok(DeadlineFn::Table { values: values.into() })
    }

    pub fn is_table(&self) -> bool {
        matches!(self, DeadlineFn::Table { .. })
    }

    pub fn eval(&self, i: u64) -> u64 {
        if i == 0 {
            return 0;
        }
        match self {
            DeadlineFn::Identity => i,
            DeadlineFn::Linear { c } => c.saturating_mul(i),
            DeadlineFn::Power { num, den } => ceil_root_power(i, *num, *den),
            DeadlineFn::Table { values } => values.get((i - 1) as usize).copied().unwrap_or(u64::MAX),
        }
    }

    /// `D^{-1}(t) = min{n : D(n) >= t}`.
    pub fn inverse(&self, t: u64) -> u64 {
        if t == 0 {
            return 0;
        }
        match self {
            DeadlineFn::Identity => t,
            DeadlineFn::Linear { c } => t.div_ceil(*c),
            DeadlineFn::Power { num, den } => {
                let mut n = (t as f64).powf(f64::from(*den) / f64::from(*num)).floor() as u64;
                while n > 0 && self.eval(n) >= t {
                    n -= 1;
                }
                while self.eval(n) < t {
                    n += 1;
                }
                n
            }
            DeadlineFn::Table { values } => values.partition_point(|&v| v < t) as u64 + 1,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DeadlineFn::Identity => "D(i)=i".into(),
            DeadlineFn::Linear { c } => format!("D(i)={c}i"),
            DeadlineFn::Power { num, den } => format!("D(i)=ceil(i^({num}/{den}))"),
            DeadlineFn::Table { values } => format!("D=table[{}]", values.len()),
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn to_fraction(x: f64) -> Option<(u32, u32)> {
    (1..=1000u32).find_map(|den| {
        let num = (x * f64::from(den)).round();
        ((x * f64::from(den) - num).abs() < 1e-9 && num <= f64::from(u32::MAX)).then_some((num as u32, den))
    })
}

/// `⌈i^{num/den}⌉`, saturating at `u64::MAX`.
fn ceil_root_power(i: u64, num: u32, den: u32) -> u64 {
    let f = (i as f64).powf(f64::from(num) / f64::from(den));
    if f >= 1.8e19 {
        return u64::MAX;
    }
    let c = f.ceil();
    // Far from an integer the float ceiling is exact.
    let margin = f * 1e-12 + 1e-9;
    if c - f > margin && f - (c - 1.0) > margin {
        return c as u64;
    }
    // Exact: smallest y with y^den >= i^num.
    let target = BigUint::from(i).pow(num);
    let mut y = (c as u64).saturating_sub(1).max(1);
    while BigUint::from(y).pow(den) < target {
        y += 1;
    }
    while y > 1 && BigUint::from(y - 1).pow(den) >= target {
        y -= 1;
    }
    y
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn inverse_examples() {
        let sq = DeadlineFn::power(2, 1).unwrap();
        assert_eq!(sq.inverse(5), 3);
        assert_eq!(sq.inverse(9), 3);
        assert_eq!(sq.inverse(10), 4);
        for t in 1..100 {
            assert_eq!(DeadlineFn::Identity.inverse(t), t);
        }
        assert_eq!(DeadlineFn::linear(2).unwrap().inverse(5), 3);
        let table = DeadlineFn::table(vec![1, 1, 4, 9]).unwrap();
        assert_eq!(table.inverse(1), 1);
        assert_eq!(table.inverse(2), 3);
        assert_eq!(table.inverse(10), 5);
        assert_eq!(table.eval(5), u64::MAX);
    }

    #[test]
    fn power_is_exact_ceiling() {
        let d = DeadlineFn::power_alpha(0.5).unwrap();
        assert_eq!(d, DeadlineFn::Power { num: 3, den: 2 });
        assert_eq!(d.eval(4), 8);
        assert_eq!(d.eval(2), 3);
        assert_eq!(d.eval(100), 1000);
        assert_eq!(DeadlineFn::power_alpha(0.2).unwrap(), DeadlineFn::Power { num: 6, den: 5 });
        assert_eq!(DeadlineFn::power_alpha(0.0).unwrap(), DeadlineFn::Identity);
        assert_eq!(DeadlineFn::power(4, 2).unwrap(), DeadlineFn::Power { num: 2, den: 1 });
        assert!(DeadlineFn::power(1, 2).is_err());
        assert!(DeadlineFn::linear(0).is_err());
        assert!(DeadlineFn::table(vec![3, 2]).is_err());
        assert!(DeadlineFn::power_alpha(f64::NAN).is_err());
    }

    #[test]
    fn power_matches_bigint_oracle() {
        for (num, den) in [(3, 2), (6, 5), (2, 1), (5, 3), (7, 4)] {
            let d = DeadlineFn::power(num, den).unwrap();
            for i in (1..5000u64).chain([1 << 20, 1_000_000, 999_999, 4_096_000]) {
                let y = d.eval(i);
                let target = BigUint::from(i).pow(num);
                assert!(BigUint::from(y).pow(den) >= target);
                assert!(BigUint::from(y - 1).pow(den) < target, "{num}/{den} at {i}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn inverse_is_generalized_inverse(t in 1u64..1_000_000_000, kind in 0usize..4, c in 1u64..10) {
            let d = match kind {
                0 => DeadlineFn::Identity,
                1 => DeadlineFn::linear(c).unwrap(),
                2 => DeadlineFn::power(c as u32 + 10, 10).unwrap(),
                _ => DeadlineFn::power(2 + c as u32, 2).unwrap(),
            };
            let n = d.inverse(t);
            prop_assert!(d.eval(n) >= t);
            prop_assert!(n == 1 || d.eval(n - 1) < t);
        }

        #[test]
        fn eval_is_monotone(i in 0u64..10_000_000, extra in 0u32..8, den in 1u32..5) {
            let d = DeadlineFn::power(den + extra, den).unwrap();
            prop_assert!(d.eval(i) <= d.eval(i + 1));
        }
    }
}
