use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::instance::Instance;
use crate::outcome::{Outcome, TraceEvent};
use crate::rational::{from_uint, Rational};
use crate::tiebreak::TieBreakOrder;

use super::RuleError;

/// Smallest `q` with `sum_i min(b_i, q * cost) = cost`, or `None` when the
/// balances together hold less than `cost`.
///
/// The left-hand side is piecewise linear in the per-voter cap `q * cost`
/// with breakpoints at the balances, so sweeping the balances in ascending
/// order finds the first segment that reaches `cost`.
pub fn minimal_q(balances: &[Rational], cost: &BigUint) -> Option<Rational> {
    let mut groups: Vec<(&Rational, usize)> = balances.iter().map(|b| (b, 1)).collect();
    minimal_q_grouped(&mut groups, cost)
}

/// [`minimal_q`] over `(balance, number of voters)` pairs.
fn minimal_q_grouped(groups: &mut [(&Rational, usize)], cost: &BigUint) -> Option<Rational> {
    assert!(!cost.is_zero(), "project cost must be positive");
    let cost = from_uint(cost);
    groups.sort_by(|a, b| a.0.cmp(b.0));
    let weighted = |b: &Rational, c: usize| b * Rational::from_integer(BigInt::from(c));
    let total: Rational = groups.iter().map(|&(b, c)| weighted(b, c)).sum();
    if total < cost {
        return None;
    }
    let mut below = Rational::zero();
    let mut uncapped: usize = groups.iter().map(|g| g.1).sum();
    for &(b, c) in groups.iter() {
        let cap = (&cost - &below) / Rational::from_integer(BigInt::from(uncapped));
        if cap <= *b {
            return Some(cap / &cost);
        }
        below += weighted(b, c);
        uncapped -= c;
    }
    unreachable!("total balance covers the cost")
}

// Voters with identical payment histories hold identical balances, so
// balances are stored per class and each voter points to its class. Class
// balances are integer numerators over one common denominator.
struct Balances {
    class_of: Vec<usize>,
    value: Vec<BigInt>,
    size: Vec<usize>,
    counts: Vec<usize>,
    denom: BigInt,
}

/// `q = num / (denom * factor)` for the denominator current when computed.
struct Q {
    num: BigInt,
    factor: BigInt,
    uncapped: usize,
}

impl Balances {
    fn new(n: usize, budget: &BigUint) -> Self {
        Balances {
            class_of: vec![0; n],
            value: vec![BigInt::from(budget.clone())],
            size: vec![n],
            counts: vec![0],
            denom: BigInt::from(n),
        }
    }

    /// Supporters of a project grouped by class, as `(class, count)`.
    fn group(&mut self, supporters: &[usize]) -> Vec<(usize, usize)> {
        let mut touched = Vec::new();
        for &v in supporters {
            let c = self.class_of[v];
            if self.counts[c] == 0 {
                touched.push(c);
            }
            self.counts[c] += 1;
        }
        touched.into_iter().map(|c| (c, std::mem::take(&mut self.counts[c]))).collect()
    }

    fn min_q(&mut self, supporters: &[usize], cost: &BigUint) -> Option<Q> {
        let mut groups = self.group(supporters);
        groups.sort_by(|a, b| self.value[a.0].cmp(&self.value[b.0]));
        let target = BigInt::from(cost.clone()) * &self.denom;
        let total: BigInt = groups.iter().map(|&(c, k)| &self.value[c] * k).sum();
        if total < target {
            return None;
        }
        let mut remaining = target;
        let mut uncapped: usize = groups.iter().map(|g| g.1).sum();
        for &(c, k) in &groups {
            // cap = remaining / (denom * uncapped)
            if remaining <= &self.value[c] * uncapped {
                let factor = BigInt::from(uncapped) * BigInt::from(cost.clone());
                return Some(Q { num: remaining, factor, uncapped });
            }
            remaining -= &self.value[c] * k;
            uncapped -= k;
        }
        unreachable!("total balance covers the cost")
    }

    /// Charges every supporter `min(balance, cap)` with `cap = q * cost` and
    /// returns the payments.
    fn pay(&mut self, supporters: &[usize], q: &Q) -> Vec<(usize, Rational)> {
        let u = BigInt::from(q.uncapped);
        let g = q.num.gcd(&u);
        let scale = &u / &g;
        if !scale.is_one() {
            self.denom *= &scale;
            for v in self.value.iter_mut() {
                *v *= &scale;
            }
        }
        let cap = &q.num / &g;
        let classes = self.value.len();
        let mut paid: Vec<Option<Rational>> = vec![None; classes];
        let mut moved_to = vec![usize::MAX; classes];
        for (c, k) in self.group(supporters) {
            let amount = if self.value[c] < cap { self.value[c].clone() } else { cap.clone() };
            let rest = &self.value[c] - &amount;
            if k == self.size[c] {
                self.value[c] = rest;
                moved_to[c] = c;
            } else {
                self.size[c] -= k;
                moved_to[c] = self.value.len();
                self.value.push(rest);
                self.size.push(k);
                self.counts.push(0);
            }
            paid[c] = Some(Rational::new(amount, self.denom.clone()));
        }
        supporters
            .iter()
            .map(|&v| {
                let old = self.class_of[v];
                self.class_of[v] = moved_to[old];
                (v, paid[old].clone().expect("class of a supporter"))
            })
            .collect()
    }
}

pub(super) fn run(
    instance: &Instance,
    tiebreak: &TieBreakOrder,
    active: Option<&[bool]>,
) -> Result<Outcome, RuleError> {
    let n = instance.num_voters();
    if n == 0 {
        return Err(RuleError::NoVoters);
    }
    let mut balances = Balances::new(n, instance.budget());
    let mut candidates: Vec<usize> =
        (0..instance.num_projects()).filter(|&p| active.is_none_or(|a| a[p]) && instance.score(p) > 0).collect();
    let mut outcome = Outcome::default();
    let mut round = 0;

    loop {
        let mut best: Option<(usize, usize, Q)> = None;
        for (slot, &p) in candidates.iter().enumerate() {
            let Some(q) = balances.min_q(instance.supporters(p), instance.cost(p)) else { continue };
            let better = match &best {
                None => true,
                Some((_, o, bq)) => {
                    let lhs = &q.num * &bq.factor;
                    let rhs = &bq.num * &q.factor;
                    lhs < rhs || (lhs == rhs && tiebreak.prefers(p, *o))
                }
            };
            if better {
                best = Some((slot, p, q));
            }
        }
        let Some((slot, p, q)) = best else { break };
        candidates.swap_remove(slot);
        round += 1;
        let q_value = Rational::new(q.num.clone(), &balances.denom * &q.factor);
        let payments = balances.pay(instance.supporters(p), &q);
        outcome.funded.push(p);
        outcome.trace.push(TraceEvent { project: p, round, funded: true, time: None, q: Some(q_value), payments });
    }
    Ok(outcome)
}

/// Method of Equal Shares (no completion phase).
pub fn equal_shares(instance: &Instance, tiebreak: &TieBreakOrder) -> Result<Outcome, RuleError> {
    run(instance, tiebreak, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_u64, ratio};

    #[test]
    fn minimal_q_examples() {
        assert_eq!(minimal_q(&[from_u64(1), from_u64(1)], &BigUint::from(1u32)), Some(ratio(1, 2)));
        assert_eq!(minimal_q(&[from_u64(1)], &BigUint::from(2u32)), None);
        assert_eq!(minimal_q(&[ratio(1, 4), from_u64(1), from_u64(1)], &BigUint::from(2u32)), Some(ratio(7, 16)));
        // exact total: cap equals the largest balance
        assert_eq!(minimal_q(&[ratio(1, 2), ratio(3, 2)], &BigUint::from(2u32)), Some(ratio(3, 4)));
    }

    #[test]
    fn symmetric_split() {
        let e = Instance::builder(2u32).project("a", 1u32).voters(2, &["a"]).build().unwrap();
        let o = equal_shares(&e, &TieBreakOrder::input_order(&e)).unwrap();
        assert_eq!(o.funded, vec![0]);
        assert_eq!(o.trace[0].q, Some(ratio(1, 2)));
        assert!(o.trace[0].payments.iter().all(|(_, x)| *x == ratio(1, 2)));
    }

    #[test]
    fn insufficient_supporter_budget() {
        let e = Instance::builder(2u32).project("a", 2u32).voter(&["a"]).voter::<&str>(&[]).build().unwrap();
        let o = equal_shares(&e, &TieBreakOrder::input_order(&e)).unwrap();
        assert!(o.funded.is_empty());
    }

    #[test]
    fn sorted_balance_payments() {
        // Six voters with 4 each. `warmup` (cost 12, four supporters, q = 1/4)
        // leaves voter C with 1; `target` (cost 8) then sees balances 4, 4, 1
        // and needs q = 7/16, charging 7/2, 7/2 and 1.
        let e = Instance::builder(24u32)
            .project("warmup", 12u32)
            .project("target", 8u32)
            .voter_with_id("A", &["target"])
            .voter_with_id("B", &["target"])
            .voter_with_id("C", &["warmup", "target"])
            .voter_with_id("D1", &["warmup"])
            .voter_with_id("D2", &["warmup"])
            .voter_with_id("D3", &["warmup"])
            .build()
            .unwrap();
        let o = equal_shares(&e, &TieBreakOrder::input_order(&e)).unwrap();
        assert_eq!(o.funded, vec![0, 1]);
        assert_eq!(o.trace[0].q, Some(ratio(1, 4)));
        assert_eq!(o.trace[1].q, Some(ratio(7, 16)));
        let pays: Vec<Rational> = o.trace[1].payments.iter().map(|(_, x)| x.clone()).collect();
        assert_eq!(pays, vec![ratio(7, 2), ratio(7, 2), from_u64(1)]);
    }

    #[test]
    fn zero_voters_is_an_error() {
        let e = Instance::builder(2u32).project("a", 1u32).build().unwrap();
        assert_eq!(equal_shares(&e, &TieBreakOrder::input_order(&e)), Err(RuleError::NoVoters));
    }
}
