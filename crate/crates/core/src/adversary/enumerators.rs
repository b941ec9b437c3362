use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use super::Adversary;
use crate::error::{invalid, Result};
use crate::lang::{exhausted, Language, StringId, UsedSet};

fn successor(lang: &dyn Language, x: StringId) -> Result<StringId> {
    let next = x.0.checked_add(1).ok_or_else(|| exhausted(lang, "successor past u64::MAX"))?;
    lang.first_at_or_after(StringId(next))
}

/// `x_t = nth(K, t)`.
#[derive(Debug)]
pub struct Canonical {
    k: Arc<dyn Language>,
    last: Option<StringId>,
}

impl Canonical {
    pub fn new(k: Arc<dyn Language>) -> Self {
        Self { k, last: None }
    }
}

impl Adversary for Canonical {
    fn emit(&mut self, _t: u64, _used: &UsedSet) -> Result<StringId> {
        let x = match self.last {
            None => self.k.nth(1)?,
            Some(prev) => successor(self.k.as_ref(), prev)?,
        };
        self.last = Some(x);
        Ok(x)
    }

    fn name(&self) -> &'static str {
        "canonical"
    }
}

/// Emits the smallest member of `K` nobody has used yet. Members it skips
/// because the generator took them first go to a backlog, one of which is
/// re-emitted at every perfect-square turn so the sequence stays total.
#[derive(Debug)]
pub struct Aggressive {
    k: Arc<dyn Language>,
    next: Option<StringId>,
    backlog: VecDeque<StringId>,
}

impl Aggressive {
    pub fn new(k: Arc<dyn Language>) -> Self {
        Self { k, next: None, backlog: VecDeque::new() }
    }

    pub fn backlog_len(&self) -> usize {
        self.backlog.len()
    }
}

impl Adversary for Aggressive {
    fn emit(&mut self, t: u64, used: &UsedSet) -> Result<StringId> {
        if t.isqrt() * t.isqrt() == t {
            if let Some(x) = self.backlog.pop_front() {
                return Ok(x);
            }
        }
        let mut x = match self.next {
            None => self.k.nth(1)?,
            Some(x) => x,
        };
        while used.contains(x) {
            self.backlog.push_back(x);
            x = successor(self.k.as_ref(), x)?;
        }
        self.next = Some(successor(self.k.as_ref(), x)?);
        Ok(x)
    }

    fn name(&self) -> &'static str {
        "aggressive"
    }
}

/// Enumerates `{k_i : i mod q < p}` in increasing order, a subset of lower
/// density `p/q` in `K`.
#[derive(Debug)]
pub struct Partial {
    k: Arc<dyn Language>,
    p: u64,
    q: u64,
    index: u64,
}

impl Partial {
    pub fn new(k: Arc<dyn Language>, alpha: f64, p: u64, q: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if p == 0 || p > q {
            return Err(invalid(format!("pattern needs 1 <= p <= q, got p={p}, q={q}")));
        }
        if (p as f64) < alpha * q as f64 {
            return Err(invalid(format!("pattern density {p}/{q} is below alpha {alpha}")));
        }
        Ok(Self { k, p, q, index: 0 })
    }
}

impl Adversary for Partial {
    fn emit(&mut self, _t: u64, _used: &UsedSet) -> Result<StringId> {
        self.index += 1;
        while self.index % self.q >= self.p {
            self.index += 1;
        }
        self.k.nth(self.index)
    }

    fn name(&self) -> &'static str {
        "partial"
    }
}

/// Enumerates `(K \ omissions) ∪ insertions` in increasing order.
#[derive(Debug)]
pub struct Contaminated {
    k: Arc<dyn Language>,
    insertions: Vec<StringId>,
    omissions: BTreeSet<StringId>,
    next_insertion: usize,
    next_member: Option<StringId>,
}

impl Contaminated {
    pub fn new(k: Arc<dyn Language>, insertions: Vec<StringId>, omissions: Vec<StringId>) -> Result<Self> {
        let mut ins = insertions;
        ins.sort_unstable();
        if ins.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("insertions contain duplicates"));
        }
        if let Some(x) = ins.iter().find(|x| k.contains(**x)) {
            return Err(invalid(format!("insertion {x} is already in the target")));
        }
        let omit: BTreeSet<StringId> = omissions.iter().copied().collect();
        if omit.len() != omissions.len() {
            return Err(invalid("omissions contain duplicates"));
        }
        if let Some(x) = omit.iter().find(|x| !k.contains(**x)) {
            return Err(invalid(format!("omission {x} is not in the target")));
        }
        Ok(Self { k, insertions: ins, omissions: omit, next_insertion: 0, next_member: None })
    }

    fn member(&mut self) -> Result<StringId> {
        let mut x = match self.next_member {
            None => self.k.nth(1)?,
            Some(x) => x,
        };
        while self.omissions.contains(&x) {
            x = successor(self.k.as_ref(), x)?;
        }
        self.next_member = Some(x);
        Ok(x)
    }
}

impl Adversary for Contaminated {
    fn emit(&mut self, _t: u64, _used: &UsedSet) -> Result<StringId> {
        let member = self.member()?;
        if let Some(&ins) = self.insertions.get(self.next_insertion) {
            if ins < member {
                self.next_insertion += 1;
                return Ok(ins);
            }
        }
        self.next_member = Some(successor(self.k.as_ref(), member)?);
        Ok(member)
    }

    fn name(&self) -> &'static str {
        "contaminated"
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::lang::{make_block_partition_chain, Naturals, PredicateLanguage};

    fn run(adv: &mut dyn Adversary, n: u64) -> Vec<u64> {
        let used = UsedSet::new();
        (1..=n).map(|t| adv.emit(t, &used).unwrap().0).collect()
    }

    fn evens() -> Arc<dyn Language> {
        Arc::new(PredicateLanguage::new("evens", 0, |x| x % 2 == 0))
    }

    #[test]
    fn canonical_examples() {
        let chain = make_block_partition_chain(3).unwrap();
        assert_eq!(run(&mut Canonical::new(chain.limit().unwrap().clone()), 5), vec![1, 2, 3, 4, 5]);
        assert_eq!(run(&mut Canonical::new(chain.language(1).unwrap().clone()), 6), vec![1, 2, 3, 4, 8, 16]);
    }

    #[test]
    fn aggressive_without_generator_is_canonical() {
        let k: Arc<dyn Language> = Arc::new(Naturals::new(1));
        assert_eq!(run(&mut Aggressive::new(k), 20), (1..=20).collect::<Vec<_>>());
    }

    #[test]
    fn aggressive_skips_generated_and_replays_backlog() {
        let k: Arc<dyn Language> = Arc::new(Naturals::new(1));
        let mut adv = Aggressive::new(k);
        let mut used = UsedSet::new();
        let x1 = adv.emit(1, &used).unwrap();
        used.insert(x1);
        // generator plays 2, the next member of K
        used.insert(StringId(2));
        let x2 = adv.emit(2, &used).unwrap();
        assert_eq!((x1, x2), (StringId(1), StringId(3)));
        used.insert(x2);
        let x3 = adv.emit(3, &used).unwrap();
        used.insert(x3);
        assert_eq!(adv.emit(4, &used).unwrap(), StringId(2));
        assert_eq!(adv.backlog_len(), 0);
    }

    #[test]
    fn partial_examples() {
        let n: Arc<dyn Language> = Arc::new(Naturals::new(1));
        assert_eq!(run(&mut Partial::new(n.clone(), 0.5, 1, 2).unwrap(), 4), vec![2, 4, 6, 8]);
        assert_eq!(run(&mut Partial::new(n.clone(), 1.0, 1, 1).unwrap(), 4), vec![1, 2, 3, 4]);
        assert_eq!(run(&mut Partial::new(n.clone(), 0.6, 2, 3).unwrap(), 4), vec![1, 3, 4, 6]);
        assert!(Partial::new(n.clone(), 0.75, 1, 2).is_err());
        assert!(Partial::new(n.clone(), 0.5, 3, 2).is_err());
        assert!(Partial::new(n, 0.0, 1, 2).is_err());
    }

    #[test]
    fn contaminated_examples() {
        let mut adv = Contaminated::new(evens(), vec![StringId(3)], vec![StringId(2)]).unwrap();
        assert_eq!(run(&mut adv, 5), vec![0, 3, 4, 6, 8]);
        let mut plain = Contaminated::new(evens(), vec![], vec![]).unwrap();
        assert_eq!(run(&mut plain, 4), vec![0, 2, 4, 6]);
        assert!(Contaminated::new(evens(), vec![StringId(4)], vec![]).is_err());
        assert!(Contaminated::new(evens(), vec![], vec![StringId(5)]).is_err());
        assert!(Contaminated::new(evens(), vec![StringId(5), StringId(5)], vec![]).is_err());
    }

    proptest! {
        #[test]
        fn partial_matches_pattern_oracle(p in 1u64..6, extra in 0u64..6, n in 200u64..2000) {
            let q = p + extra;
            let k: Arc<dyn Language> = Arc::new(Naturals::new(1));
            let out = run(&mut Partial::new(k, p as f64 / q as f64, p, q).unwrap(), n);
            let oracle: Vec<u64> = (1u64..).filter(|i| i % q < p).take(n as usize).collect();
            prop_assert_eq!(&out, &oracle);
            let last = *out.last().unwrap();
            prop_assert!((n as f64 / last as f64 - p as f64 / q as f64).abs() <= q as f64 / last as f64);
        }

        #[test]
        fn contaminated_differs_by_lists(ins in proptest::collection::btree_set(0u64..100, 0..4), omit in proptest::collection::btree_set(0u64..50, 0..4)) {
            let ins: Vec<StringId> = ins.into_iter().map(|x| StringId(2 * x + 1)).collect();
            let omit: Vec<StringId> = omit.into_iter().map(|x| StringId(2 * x)).collect();
            let mut adv = Contaminated::new(evens(), ins.clone(), omit.clone()).unwrap();
            let out: BTreeSet<u64> = run(&mut adv, 300).into_iter().collect();
            let k: BTreeSet<u64> = (0..=*out.iter().max().unwrap()).filter(|x| x % 2 == 0).collect();
            let inserted: BTreeSet<u64> = out.difference(&k).copied().collect();
            let omitted: BTreeSet<u64> = k.difference(&out).copied().collect();
            prop_assert_eq!(inserted, ins.iter().map(|x| x.0).filter(|&x| x <= *out.iter().max().unwrap()).collect::<BTreeSet<_>>());
            prop_assert_eq!(omitted, omit.iter().map(|x| x.0).collect::<BTreeSet<_>>());
        }

        #[test]
        fn aggressive_stream_is_total(gen_moves in proptest::collection::vec(0u64..3, 1..200)) {
            // the generator takes the 1st, 2nd or 3rd smallest untouched member, or passes
            let k: Arc<dyn Language> = Arc::new(Naturals::new(1));
            let mut adv = Aggressive::new(k);
            let mut used = UsedSet::new();
            let mut emitted = BTreeSet::new();
            let horizon = gen_moves.len() as u64;
            let mut t = 0;
            for &mv in &gen_moves {
                t += 1;
                let x = adv.emit(t, &used).unwrap();
                emitted.insert(x.0);
                used.insert(x);
                let mut fresh = (1u64..).filter(|y| !used.contains(StringId(*y)));
                if let Some(y) = fresh.nth(mv as usize) {
                    used.insert(StringId(y));
                }
            }
            // keep playing silently until the backlog drains
            while adv.backlog_len() > 0 {
                t += 1;
                emitted.insert(adv.emit(t, &used).unwrap().0);
            }
            let max = *emitted.iter().max().unwrap();
            prop_assert!((1..=max).all(|y| emitted.contains(&y)));
            prop_assert!(t >= horizon);
        }
    }
}
