#![allow(clippy::needless_range_loop)]

mod common;

use num_bigint::BigUint;
use pb_control::instance::validate_instance;
use pb_control::rational::{from_u64, from_uint, Rational};
use pb_control::rules::{equal_shares, evaluate, greedy_av, greedy_cost, minimal_q, phragmen, RuleId};
use proptest::prelude::*;

use common::spec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rationals_are_exact(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
        let x = Rational::new(a.into(), b.into());
        let y = Rational::new(c.into(), d.into());
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        if c != 0 {
            prop_assert_eq!(&(&x * &y) / &y, x);
        }
    }

    #[test]
    fn validation_is_idempotent(s in spec(6, 6, 30, 10)) {
        let inst = s.instance();
        let again = validate_instance(inst.to_raw()).unwrap();
        prop_assert_eq!(again, inst);
    }

    #[test]
    fn every_rule_is_feasible_and_deterministic(s in spec(7, 7, 30, 12).prop_filter("voters", |s| !s.ballots.is_empty())) {
        let inst = s.instance();
        let tb = s.tiebreak();
        for rule in RuleId::ALL {
            let o = evaluate(rule, &inst, &tb).unwrap();
            prop_assert!(o.funded_cost(&inst) <= *inst.budget(), "{}", rule);
            prop_assert_eq!(evaluate(rule, &inst, &tb).unwrap(), o);
        }
    }

    #[test]
    fn unit_costs_make_greedy_rules_agree(s in spec(7, 7, 7, 1)) {
        let inst = s.instance();
        let tb = s.tiebreak();
        prop_assert_eq!(greedy_cost(&inst, &tb).funded, greedy_av(&inst, &tb).funded);
    }

    #[test]
    fn phragmen_times_increase_and_balances_cover_cost(s in spec(7, 7, 30, 12)) {
        let inst = s.instance();
        let o = phragmen(&inst, &s.tiebreak());
        let mut last_reset = vec![Rational::from_integer(0.into()); inst.num_voters()];
        let mut prev = Rational::from_integer(0.into());
        for ev in &o.trace {
            let t = ev.time.clone().unwrap();
            prop_assert!(t >= prev);
            let held: Rational = inst.supporters(ev.project).iter().map(|&v| &t - &last_reset[v]).sum();
            prop_assert_eq!(held, from_uint(inst.cost(ev.project)));
            for &v in inst.supporters(ev.project) {
                last_reset[v] = t.clone();
            }
            prev = t;
        }
    }

    #[test]
    fn equal_shares_spends_within_shares_and_picks_minimal_q(s in spec(7, 7, 30, 12).prop_filter("voters", |s| !s.ballots.is_empty())) {
        let inst = s.instance();
        let tb = s.tiebreak();
        let o = equal_shares(&inst, &tb).unwrap();
        let n = inst.num_voters() as u64;
        let share = from_uint(inst.budget()) / from_u64(n);
        let mut balance = vec![share.clone(); inst.num_voters()];
        let mut funded = vec![false; inst.num_projects()];
        for ev in &o.trace {
            let q = ev.q.clone().unwrap();
            for p in 0..inst.num_projects() {
                if funded[p] || inst.score(p) == 0 {
                    continue;
                }
                let bals: Vec<Rational> = inst.supporters(p).iter().map(|&v| balance[v].clone()).collect();
                if let Some(other) = minimal_q(&bals, inst.cost(p)) {
                    prop_assert!(other > q || (other == q && !tb.prefers(p, ev.project)) || p == ev.project);
                }
            }
            for (v, paid) in &ev.payments {
                balance[*v] -= paid;
            }
            funded[ev.project] = true;
        }
        let total: Rational = balance.iter().map(|b| &share - b).sum();
        prop_assert_eq!(total, from_uint(&o.funded_cost(&inst)));
        for b in &balance {
            prop_assert!(*b >= Rational::from_integer(0.into()));
        }
        prop_assert!(o.funded_cost(&inst) <= BigUint::from(s.budget));
    }
}
