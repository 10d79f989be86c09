mod common;

use common::{funded_with, spec};
use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use pb_control::control::SearchOptions;
use pb_control::measures::{
    baseline_cost_measure, cheapest_deletion, min_deletion_size, pearson, pearson_f64, rivalry, win_probability,
    BaselineConfig, CostSearch,
};
use pb_control::rational::{from_u64, ratio, Rational};
use pb_control::rules::RuleId;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rule() -> impl Strategy<Value = RuleId> {
    prop::sample::select(RuleId::ALL.to_vec())
}

/// Deletion sets of exactly `r` projects other than `p` that fund `p`.
fn successes(s: &common::Spec, rule: RuleId, p: usize, r: usize, exclude: Option<usize>) -> (usize, usize) {
    let inst = s.instance();
    let tb = s.tiebreak();
    let m = inst.num_projects();
    let others: Vec<usize> = (0..m).filter(|&i| i != p && Some(i) != exclude).collect();
    let mut hits = 0;
    let mut total = 0;
    for set in others.iter().copied().combinations(r) {
        let mut keep = vec![true; m];
        for &i in set.iter().chain(exclude.iter()) {
            keep[i] = false;
        }
        total += 1;
        if funded_with(&inst, &tb, rule, &keep, p) {
            hits += 1;
        }
    }
    (hits, total)
}

fn min_cost_oracle(s: &common::Spec, rule: RuleId, p: usize) -> Option<u64> {
    let inst = s.instance();
    let tb = s.tiebreak();
    let m = inst.num_projects();
    let others: Vec<usize> = (0..m).filter(|&i| i != p).collect();
    let mut best: Option<u64> = None;
    for k in 0..=others.len() {
        for set in others.iter().copied().combinations(k) {
            let mut keep = vec![true; m];
            for &i in &set {
                keep[i] = false;
            }
            if funded_with(&inst, &tb, rule, &keep, p) {
                let c: u64 = set.iter().map(|&i| s.costs[i]).sum();
                best = Some(best.map_or(c, |b| b.min(c)));
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn win_probability_counts_subsets(s in spec(6, 6, 8, 5), rule in rule(), p_seed in any::<prop::sample::Index>(), r in 0usize..4) {
        let inst = s.instance();
        prop_assume!(inst.num_voters() > 0);
        let p = p_seed.index(inst.num_projects());
        prop_assume!(r < inst.num_projects());
        let got = win_probability(&inst, rule, p, &s.tiebreak(), r, SearchOptions::sequential()).unwrap();
        let (hits, total) = successes(&s, rule, p, r, None);
        prop_assert_eq!(got.clone(), ratio(hits as u64, total as u64));
        prop_assert_eq!(!got.is_zero(), hits > 0);
    }

    #[test]
    fn rivalry_matches_enumeration(s in spec(6, 6, 8, 5), rule in rule(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>(), r in 0usize..3) {
        let inst = s.instance();
        prop_assume!(inst.num_voters() > 0);
        let m = inst.num_projects();
        prop_assume!(m >= 2 && r + 2 <= m);
        let p = a.index(m);
        let q = (p + 1 + b.index(m - 1)) % m;
        let got = rivalry(&inst, rule, p, q, &s.tiebreak(), r, SearchOptions::sequential()).unwrap();
        let (hits, total) = successes(&s, rule, p, r, Some(q));
        prop_assert_eq!(got.clone(), ratio(hits as u64, total as u64));
        if r == 0 {
            prop_assert!(got.is_zero() || got == from_u64(1));
        }
    }

    #[test]
    fn cheapest_deletion_matches_enumeration(s in spec(6, 6, 8, 5), rule in rule(), p_seed in any::<prop::sample::Index>()) {
        let inst = s.instance();
        prop_assume!(inst.num_voters() > 0);
        let m = inst.num_projects();
        let p = p_seed.index(m);
        let got = cheapest_deletion(&inst, rule, p, &s.tiebreak(), m, SearchOptions::sequential()).unwrap();
        let want = min_cost_oracle(&s, rule, p);
        prop_assert_eq!(got.as_ref().map(|c| c.total_cost.to_u64().unwrap()), want);
        if let Some(c) = got {
            let mut keep = vec![true; m];
            for &i in &c.set {
                keep[i] = false;
            }
            prop_assert!(!c.set.contains(&p));
            prop_assert!(funded_with(&inst, &s.tiebreak(), rule, &keep, p));
        }
    }

    #[test]
    fn min_deletion_size_matches_enumeration(s in spec(6, 6, 8, 5), rule in rule(), p_seed in any::<prop::sample::Index>()) {
        let inst = s.instance();
        prop_assume!(inst.num_voters() > 0);
        let m = inst.num_projects();
        let p = p_seed.index(m);
        let got = min_deletion_size(&inst, rule, p, &s.tiebreak(), m, SearchOptions::sequential()).unwrap();
        let want = (0..m).find(|&r| successes(&s, rule, p, r, None).0 > 0);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn baseline_bisection_equals_scan(s in spec(6, 6, 12, 12), greedy in prop::bool::ANY, p_seed in any::<prop::sample::Index>()) {
        let rule = if greedy { RuleId::GreedyAv } else { RuleId::GreedyCost };
        let inst = s.instance();
        let tb = s.tiebreak();
        let p = p_seed.index(inst.num_projects());
        let got = baseline_cost_measure(&inst, rule, p, &tb, &BaselineConfig::default()).unwrap();
        let all = vec![true; inst.num_projects()];
        let want = (1..=s.costs[p]).rev().find(|&c| {
            let changed = inst.with_cost(p, BigUint::from(c)).unwrap();
            funded_with(&changed, &tb, rule, &all, p)
        });
        prop_assert_eq!(got.c_star.map(|c| c.to_u64().unwrap()), want);
        if got.search != CostSearch::Trivial {
            prop_assert_eq!(got.search, CostSearch::Bisection);
        }
    }
}

fn direct_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

#[test]
fn pearson_agrees_with_textbook_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let xs: Vec<Rational> = (0..100).map(|_| ratio(rng.gen_range(0..1000), rng.gen_range(1..50))).collect();
        let ys: Vec<Rational> =
            xs.iter().map(|x| x * ratio(rng.gen_range(1..5), 3) + ratio(rng.gen_range(0..100), 7)).collect();
        let xf: Vec<f64> = xs.iter().map(|x| x.to_f64().unwrap()).collect();
        let yf: Vec<f64> = ys.iter().map(|y| y.to_f64().unwrap()).collect();
        let want = direct_pearson(&xf, &yf);
        assert!((pearson(&xs, &ys).unwrap() - want).abs() < 1e-12);
        assert!((pearson_f64(&xf, &yf).unwrap() - want).abs() < 1e-12);
    }
    let c = vec![from_u64(1); 5];
    let v: Vec<Rational> = (0..5).map(from_u64).collect();
    assert!(pearson(&c, &v).is_err());
}
