#![allow(dead_code)]

use pb_control::{Instance, TieBreakOrder};
use proptest::prelude::*;

/// Random approval election: `m` projects, `n` voters.
#[derive(Clone, Debug)]
pub struct Spec {
    pub budget: u64,
    pub costs: Vec<u64>,
    pub ballots: Vec<Vec<bool>>,
    pub order: Vec<usize>,
}

impl Spec {
    pub fn instance(&self) -> Instance {
        let mut b = Instance::builder(self.budget);
        for (i, &c) in self.costs.iter().enumerate() {
            b = b.project(format!("x{i}"), c);
        }
        for ballot in &self.ballots {
            let ids: Vec<String> = (0..self.costs.len()).filter(|&i| ballot[i]).map(|i| format!("x{i}")).collect();
            b = b.voter(&ids);
        }
        b.build().expect("valid random instance")
    }

    pub fn tiebreak(&self) -> TieBreakOrder {
        TieBreakOrder::from_indices(self.order.clone()).expect("permutation")
    }
}

pub fn spec(max_m: usize, max_n: usize, max_budget: u64, max_cost: u64) -> impl Strategy<Value = Spec> {
    (1..=max_m, 0..=max_n).prop_flat_map(move |(m, n)| {
        (
            1..=max_budget,
            prop::collection::vec(1..=max_cost, m),
            prop::collection::vec(prop::collection::vec(any::<bool>(), m), n),
            Just((0..m).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(|(budget, costs, ballots, order)| Spec { budget, costs, ballots, order })
    })
}

use pb_control::control::{ControlQuery, Goal, Operation};
use pb_control::rules::{evaluate, RuleId};

/// A control query over a random election.
#[derive(Clone, Debug)]
pub struct QuerySpec {
    pub election: Spec,
    pub rule: RuleId,
    pub goal: Goal,
    pub operation: Operation,
    pub distinguished: usize,
    pub weights: Vec<u64>,
    pub spoiler_mask: Vec<bool>,
}

impl QuerySpec {
    pub fn query(&self, bound: u64) -> ControlQuery {
        let spoilers = match self.operation {
            Operation::Delete => Vec::new(),
            Operation::Add => (0..self.weights.len()).filter(|&i| self.spoiler_mask[i]).collect(),
        };
        ControlQuery::new(self.rule, self.goal, self.operation, self.distinguished, bound)
            .with_weights(self.weights.clone())
            .with_spoilers(spoilers)
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().sum()
    }
}

pub fn query_spec(
    rules: Vec<RuleId>,
    unit_costs: bool,
    max_m: usize,
    max_n: usize,
    max_budget: u64,
    max_cost: u64,
    max_weight: u64,
) -> impl Strategy<Value = QuerySpec> {
    let election = if unit_costs {
        spec(max_m, max_n, max_budget, 1).boxed()
    } else {
        spec(max_m, max_n, max_budget, max_cost).boxed()
    };
    (election, prop::sample::select(rules), any::<bool>(), any::<bool>()).prop_flat_map(
        move |(e, rule, constructive, add)| {
            let m = e.costs.len();
            let add = add && m > 1;
            (0..m, prop::collection::vec(1..=max_weight, m), prop::collection::vec(any::<bool>(), m)).prop_map(
                move |(d, weights, mut mask)| {
                    mask[d] = false;
                    if add && !mask.iter().any(|&b| b) {
                        mask[(d + 1) % m] = true;
                    }
                    QuerySpec {
                        election: e.clone(),
                        rule,
                        goal: if constructive { Goal::Constructive } else { Goal::Destructive },
                        operation: if add { Operation::Add } else { Operation::Delete },
                        distinguished: d,
                        weights,
                        spoiler_mask: mask,
                    }
                },
            )
        },
    )
}

/// Whether `p` is funded when only the projects in `keep` run, computed on
/// the reduced election.
pub fn funded_with(instance: &Instance, tiebreak: &TieBreakOrder, rule: RuleId, keep: &[bool], p: usize) -> bool {
    let reduced = instance.retain_projects(keep);
    let order = tiebreak.restrict(keep);
    let idx = keep[..p].iter().filter(|&&k| k).count();
    evaluate(rule, &reduced, &order).expect("rule runs").is_funded(idx)
}

/// Least total weight of a successful action within `bound`, by trying every
/// subset of the controllable projects.
pub fn naive_min_weight(qs: &QuerySpec, bound: u64) -> Option<u64> {
    let inst = qs.election.instance();
    let tb = qs.election.tiebreak();
    let m = inst.num_projects();
    let pool: Vec<usize> = match qs.operation {
        Operation::Delete => (0..m).filter(|&i| i != qs.distinguished).collect(),
        Operation::Add => (0..m).filter(|&i| qs.spoiler_mask[i]).collect(),
    };
    let mut best: Option<u64> = None;
    for bits in 0u32..(1 << pool.len()) {
        let chosen: Vec<usize> = (0..pool.len()).filter(|&k| bits >> k & 1 == 1).map(|k| pool[k]).collect();
        let w: u64 = chosen.iter().map(|&c| qs.weights[c]).sum();
        if w > bound || best.is_some_and(|b| b <= w) {
            continue;
        }
        let keep: Vec<bool> = (0..m)
            .map(|i| match qs.operation {
                Operation::Delete => !chosen.contains(&i),
                Operation::Add => !qs.spoiler_mask[i] || chosen.contains(&i),
            })
            .collect();
        let funded = funded_with(&inst, &tb, qs.rule, &keep, qs.distinguished);
        if funded == (qs.goal == Goal::Constructive) {
            best = Some(w);
        }
    }
    best
}
