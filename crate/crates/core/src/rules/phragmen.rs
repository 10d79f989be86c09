use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::instance::Instance;
use crate::outcome::{Outcome, TraceEvent};
use crate::rational::Rational;
use crate::tiebreak::TieBreakOrder;

// Every voter earns one unit per unit of time, so a balance is just
// `now - last_reset`. The time at which a project's supporters jointly hold
// its cost is therefore (cost + sum of their last resets) / supporters.
//
// Voters are tracked by the index of their last reset time, and all reset
// times are kept as integer numerators over one common denominator, so a
// round needs integer arithmetic only.
pub(super) fn run(instance: &Instance, tiebreak: &TieBreakOrder, active: Option<&[bool]>) -> Outcome {
    let budget = instance.budget();
    let mut denom = BigInt::one();
    let mut reset_num = vec![BigInt::zero()];
    let mut epoch = vec![0usize; instance.num_voters()];
    let mut counts: Vec<usize> = vec![0];
    let mut spent = BigUint::zero();
    let mut candidates: Vec<usize> =
        (0..instance.num_projects()).filter(|&p| active.is_none_or(|a| a[p]) && instance.score(p) > 0).collect();
    let mut outcome = Outcome::default();
    let mut round = 0;

    loop {
        candidates.retain(|&p| &spent + instance.cost(p) <= *budget);
        if candidates.is_empty() {
            break;
        }
        // time = acc / (denom * supporters)
        let mut best: Option<(usize, usize, BigInt, usize)> = None;
        for (slot, &p) in candidates.iter().enumerate() {
            let supporters = instance.supporters(p);
            counts.iter_mut().for_each(|c| *c = 0);
            for &v in supporters {
                counts[epoch[v]] += 1;
            }
            let mut acc = BigInt::from(instance.cost(p).clone()) * &denom;
            for (e, &c) in counts.iter().enumerate() {
                if c > 0 && !reset_num[e].is_zero() {
                    acc += &reset_num[e] * c;
                }
            }
            let s = supporters.len();
            let better = match &best {
                None => true,
                Some((_, q, b_acc, b_s)) => {
                    let lhs = &acc * *b_s;
                    let rhs = b_acc * s;
                    lhs < rhs || (lhs == rhs && tiebreak.prefers(p, *q))
                }
            };
            if better {
                best = Some((slot, p, acc, s));
            }
        }
        let (slot, p, acc, s) = best.expect("non-empty candidate list");
        candidates.swap_remove(slot);
        round += 1;

        let time = Rational::new(acc.clone(), &denom * s);
        let scale = BigInt::from(s) / acc.gcd(&BigInt::from(s));
        if !scale.is_one() {
            denom *= &scale;
            for n in reset_num.iter_mut() {
                *n *= &scale;
            }
        }
        let new_num = time.numer() * (&denom / time.denom());
        let new_epoch = reset_num.len();
        let payments = instance
            .supporters(p)
            .iter()
            .map(|&v| {
                let paid = Rational::new(&new_num - &reset_num[epoch[v]], denom.clone());
                epoch[v] = new_epoch;
                (v, paid)
            })
            .collect();
        reset_num.push(new_num);
        counts.push(0);
        spent += instance.cost(p);
        outcome.funded.push(p);
        outcome.trace.push(TraceEvent { project: p, round, funded: true, time: Some(time), q: None, payments });
    }
    outcome
}

/// Phragmén's sequential rule with exact funding times.
pub fn phragmen(instance: &Instance, tiebreak: &TieBreakOrder) -> Outcome {
    run(instance, tiebreak, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_uint, ratio};

    #[test]
    fn single_project_two_supporters() {
        let e = Instance::builder(1u32).project("a", 1u32).voters(2, &["a"]).build().unwrap();
        let o = phragmen(&e, &TieBreakOrder::input_order(&e));
        assert_eq!(o.funded, vec![0]);
        assert_eq!(o.trace[0].time, Some(ratio(1, 2)));
    }

    #[test]
    fn unsupported_projects_are_never_funded() {
        let e = Instance::builder(5u32).project("a", 1u32).project("b", 1u32).voter(&["a"]).build().unwrap();
        assert_eq!(phragmen(&e, &TieBreakOrder::input_order(&e)).funded, vec![0]);
    }

    #[test]
    fn simultaneous_ties_reset_before_recomputing() {
        // a and b share their only voter and both become affordable at t=1;
        // funding a (preferred) resets the voter, so b waits until t=2.
        let e = Instance::builder(2u32).project("a", 1u32).project("b", 1u32).voter(&["a", "b"]).build().unwrap();
        let o = phragmen(&e, &TieBreakOrder::input_order(&e));
        assert_eq!(o.funded, vec![0, 1]);
        assert_eq!(o.trace[0].time, Some(ratio(1, 1)));
        assert_eq!(o.trace[1].time, Some(ratio(2, 1)));
    }

    #[test]
    fn budget_drops_unaffordable_projects() {
        let e = Instance::builder(2u32)
            .project("a", 1u32)
            .project("b", 2u32)
            .voters(2, &["a"])
            .voter(&["b"])
            .build()
            .unwrap();
        let o = phragmen(&e, &TieBreakOrder::input_order(&e));
        assert_eq!(o.funded, vec![0]);
    }

    #[test]
    fn payments_cover_cost_exactly() {
        let e = Instance::builder(10u32)
            .project("a", 3u32)
            .project("b", 2u32)
            .voter(&["a", "b"])
            .voter(&["a"])
            .voter(&["b"])
            .build()
            .unwrap();
        let o = phragmen(&e, &TieBreakOrder::input_order(&e));
        for ev in &o.trace {
            let total: Rational = ev.payments.iter().map(|(_, x)| x.clone()).sum();
            assert_eq!(total, from_uint(e.cost(ev.project)));
        }
    }
}
