//! Baseline measures: lowering the cost of a losing project, or adding
//! voters who approve only it, until it wins. Both scores lie in [0, 1].

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::rational::{from_u64, from_uint, ratio, Rational};
use crate::rules::{RuleId, Simulator};
use crate::tiebreak::TieBreakOrder;

use super::{is_funded, MeasureError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostScore {
    /// c* / cost(p)
    #[default]
    Ratio,
    /// (c* / cost(p))^2
    Squared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AddScore {
    /// 1 / (1 + k)
    #[default]
    Reciprocal,
    /// (cap + 1 - k) / (cap + 1)
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaselineConfig {
    pub cost_score: CostScore,
    pub add_score: AddScore,
    /// The continuous rules scan every cost up to this many candidates and
    /// bisect beyond it.
    pub scan_limit: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { cost_score: CostScore::Ratio, add_score: AddScore::Reciprocal, scan_limit: 10_000 }
    }
}

/// How the reduced cost was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostSearch {
    /// Already funded at its own cost.
    Trivial,
    /// Every candidate cost was simulated.
    Scan,
    /// Bisection, exact because funding is monotone in the own cost for
    /// the greedy rules.
    Bisection,
    /// Bisection for a continuous rule whose cost range exceeded the scan limit.
    HeuristicBisection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineCost {
    /// Largest cost at which the project is funded.
    pub c_star: Option<BigUint>,
    pub score: Rational,
    pub search: CostSearch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineAdd {
    /// Fewest added single-project voters that fund the project.
    pub k: Option<usize>,
    pub score: Rational,
}

fn funded_at(
    instance: &Instance,
    rule: RuleId,
    p: usize,
    tiebreak: &TieBreakOrder,
    cost: &BigUint,
) -> Result<bool, MeasureError> {
    let changed = instance.with_cost(p, cost.clone()).expect("positive cost");
    is_funded(&changed, rule, tiebreak, p)
}

/// Largest reduced cost `c* <= cost(p)` at which `p` is funded, scored
/// according to `config.cost_score`; 0 when no positive cost works.
pub fn baseline_cost_measure(
    instance: &Instance,
    rule: RuleId,
    distinguished: usize,
    tiebreak: &TieBreakOrder,
    config: &BaselineConfig,
) -> Result<BaselineCost, MeasureError> {
    let cost = instance.cost(distinguished).clone();
    if is_funded(instance, rule, tiebreak, distinguished)? {
        return Ok(BaselineCost { c_star: Some(cost), score: Rational::one(), search: CostSearch::Trivial });
    }
    let scan = !rule.is_greedy() && cost <= BigUint::from(config.scan_limit);
    let (c_star, search) = if scan {
        let mut c = &cost - 1u32;
        let mut found = None;
        while !c.is_zero() {
            if funded_at(instance, rule, distinguished, tiebreak, &c)? {
                found = Some(c);
                break;
            }
            c -= 1u32;
        }
        (found, CostSearch::Scan)
    } else {
        let search = if rule.is_greedy() { CostSearch::Bisection } else { CostSearch::HeuristicBisection };
        let one = BigUint::one();
        if !funded_at(instance, rule, distinguished, tiebreak, &one)? {
            (None, search)
        } else {
            // invariant: funded at lo, not funded at hi
            let (mut lo, mut hi) = (one, cost.clone());
            while &hi - &lo > BigUint::one() {
                let mid: BigUint = (&lo + &hi) >> 1;
                if funded_at(instance, rule, distinguished, tiebreak, &mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (Some(lo), search)
        }
    };
    let score = match &c_star {
        None => Rational::zero(),
        Some(c) => {
            let fraction = from_uint(c) / from_uint(&cost);
            match config.cost_score {
                CostScore::Ratio => fraction,
                CostScore::Squared => &fraction * &fraction,
            }
        }
    };
    Ok(BaselineCost { c_star, score, search })
}

/// Fewest voters approving only `p` whose addition funds it, up to `cap`,
/// scored according to `config.add_score`; 0 when `cap` is not enough.
pub fn baseline_add_measure(
    instance: &Instance,
    rule: RuleId,
    distinguished: usize,
    tiebreak: &TieBreakOrder,
    cap: usize,
    config: &BaselineConfig,
) -> Result<BaselineAdd, MeasureError> {
    let mut k_found = None;
    for k in 0..=cap {
        let grown = instance.with_singleton_voters(distinguished, k);
        let sim = Simulator::new(rule, &grown, tiebreak)?;
        if sim.funds(None, distinguished)? {
            k_found = Some(k);
            break;
        }
    }
    let score = match k_found {
        None => Rational::zero(),
        Some(k) => match config.add_score {
            AddScore::Reciprocal => ratio(1, 1 + k as u64),
            AddScore::Linear => from_u64((cap + 1 - k) as u64) / from_u64(cap as u64 + 1),
        },
    };
    Ok(BaselineAdd { k: k_found, score })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::example_one;

    #[test]
    fn example_one_cost() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        for rule in RuleId::ALL {
            let b = baseline_cost_measure(&e, rule, 1, &t, &BaselineConfig::default()).unwrap();
            if rule.is_greedy() {
                assert_eq!(b.c_star, Some(BigUint::from(1u32)), "{rule}");
                assert_eq!(b.score, ratio(1, 2));
            }
        }
        let b = baseline_cost_measure(&e, RuleId::GreedyAv, 0, &t, &BaselineConfig::default()).unwrap();
        assert_eq!((b.score, b.search), (Rational::one(), CostSearch::Trivial));
    }

    #[test]
    fn unfundable_at_cost_one() {
        // `a` takes the whole budget before `p` at any cost of `p`
        let e = Instance::builder(2u32)
            .project("a", 2u32)
            .project("p", 3u32)
            .voters(2, &["a"])
            .voter(&["p"])
            .build()
            .unwrap();
        let t = TieBreakOrder::input_order(&e);
        let b = baseline_cost_measure(&e, RuleId::GreedyAv, 1, &t, &BaselineConfig::default()).unwrap();
        assert_eq!(b.c_star, None);
        assert!(b.score.is_zero());
    }

    #[test]
    fn example_one_add() {
        let e = example_one();
        let t = TieBreakOrder::from_ids(&e, &["c2", "c1", "p"]).unwrap();
        let cfg = BaselineConfig::default();
        let b = baseline_add_measure(&e, RuleId::GreedyAv, 1, &t, 5, &cfg).unwrap();
        assert_eq!(b.k, Some(1));
        assert_eq!(b.score, ratio(1, 2));
        let lin = BaselineConfig { add_score: AddScore::Linear, ..cfg };
        assert_eq!(baseline_add_measure(&e, RuleId::GreedyAv, 1, &t, 5, &lin).unwrap().score, ratio(5, 6));
        let w = baseline_add_measure(&e, RuleId::GreedyAv, 0, &t, 5, &cfg).unwrap();
        assert_eq!((w.k, w.score), (Some(0), Rational::one()));
    }

    #[test]
    fn too_expensive_never_added_in() {
        let e = Instance::builder(2u32).project("p", 3u32).voter(&["p"]).build().unwrap();
        let t = TieBreakOrder::input_order(&e);
        let b = baseline_add_measure(&e, RuleId::GreedyAv, 0, &t, 10, &BaselineConfig::default()).unwrap();
        assert_eq!(b.k, None);
        assert!(b.score.is_zero());
    }
}
