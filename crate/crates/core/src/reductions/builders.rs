use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::control::{ControlQuery, Goal, Operation};
use crate::instance::{Instance, InstanceBuilder};
use crate::rules::RuleId;
use crate::tiebreak::TieBreakOrder;

use super::Rx3cInstance;

/// Which construction to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Construction {
    /// GreedyAV, constructive, deletion, two voters.
    #[serde(rename = "1")]
    GreedyAvCcdc,
    /// GreedyAV, destructive, deletion, two voters.
    #[serde(rename = "1d")]
    GreedyAvDcdc,
    /// Phragmén, constructive, deletion, unit costs.
    #[serde(rename = "3")]
    PhragmenCcdc,
    /// Phragmén, destructive, deletion, unit costs.
    #[serde(rename = "4")]
    PhragmenDcdc,
    /// GreedyAV, constructive, addition, two voters.
    #[serde(rename = "6")]
    GreedyAvCcac,
    /// GreedyAV, destructive, addition, two voters.
    #[serde(rename = "6d")]
    GreedyAvDcac,
    /// Phragmén, constructive, addition, unit costs.
    #[serde(rename = "8")]
    PhragmenCcac,
    /// Phragmén, destructive, addition, unit costs.
    #[serde(rename = "9")]
    PhragmenDcac,
}

impl Construction {
    pub const ALL: [Construction; 8] = [
        Construction::GreedyAvCcdc,
        Construction::GreedyAvDcdc,
        Construction::PhragmenCcdc,
        Construction::PhragmenDcdc,
        Construction::GreedyAvCcac,
        Construction::GreedyAvDcac,
        Construction::PhragmenCcac,
        Construction::PhragmenDcac,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Construction::GreedyAvCcdc => "1",
            Construction::GreedyAvDcdc => "1d",
            Construction::PhragmenCcdc => "3",
            Construction::PhragmenDcdc => "4",
            Construction::GreedyAvCcac => "6",
            Construction::GreedyAvDcac => "6d",
            Construction::PhragmenCcac => "8",
            Construction::PhragmenDcac => "9",
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Construction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Construction::ALL
            .into_iter()
            .find(|c| c.code() == s)
            .ok_or_else(|| format!("unknown construction `{s}` (expected one of 1, 1d, 3, 4, 6, 6d, 8, 9)"))
    }
}

/// A built control instance. Projects appear in tie-breaking order with the
/// distinguished project last, so the file order reproduces the intended
/// tie-breaking.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub construction: Construction,
    pub instance: Instance,
    pub tiebreak: TieBreakOrder,
    pub query: ControlQuery,
    /// `set_projects[j]` is the project encoding set `j` of the family.
    pub set_projects: Vec<usize>,
}

impl Reduction {
    /// The control action corresponding to an exact cover: the cover's set
    /// projects (constructions 1, 1d, 6, 6d, 8, 9) or all other set projects
    /// (constructions 3 and 4).
    pub fn action_for_cover(&self, cover: &[usize]) -> Vec<usize> {
        let complement = matches!(self.construction, Construction::PhragmenCcdc | Construction::PhragmenDcdc);
        let mut action: Vec<usize> = (0..self.set_projects.len())
            .filter(|j| cover.contains(j) != complement)
            .map(|j| self.set_projects[j])
            .collect();
        action.sort_unstable();
        action
    }
}

/// sum over i of 4^i for i = 1..=3N, times `digit`
fn base4_all(n: usize, digit: u32) -> BigUint {
    (1..=3 * n).map(|i| BigUint::from(4u32).pow(i as u32)).sum::<BigUint>() * digit
}

fn set_cost(set: &[usize; 3]) -> BigUint {
    set.iter().map(|&e| BigUint::from(4u32).pow(e as u32 + 1)).sum()
}

fn set_ids(n: usize) -> Vec<String> {
    (1..=3 * n).map(|j| format!("p{j}")).collect()
}

#[allow(clippy::too_many_arguments)]
fn finish(
    construction: Construction,
    builder: InstanceBuilder,
    rule: RuleId,
    goal: Goal,
    operation: Operation,
    bound: usize,
    n: usize,
    spoilers: bool,
) -> Reduction {
    let instance = builder
        .meta("description", format!("exact-cover construction {construction}, N = {n}"))
        .build()
        .expect("constructions are valid instances");
    let tiebreak = TieBreakOrder::input_order(&instance);
    let distinguished = instance.index_of("p").expect("distinguished project");
    let set_projects: Vec<usize> = set_ids(n).iter().map(|id| instance.index_of(id).expect("set project")).collect();
    let mut query = ControlQuery::new(rule, goal, operation, distinguished, bound as u64);
    if spoilers {
        query = query.with_spoilers(set_projects.clone());
    }
    Reduction { construction, instance, tiebreak, query, set_projects }
}

fn greedy_sets(inst: &Rx3cInstance, budget: BigUint) -> InstanceBuilder {
    let mut b = Instance::builder(budget);
    for (id, set) in set_ids(inst.n()).into_iter().zip(inst.family()) {
        b = b.project(id, set_cost(set));
    }
    b
}

/// Set projects cost their base-4 encoding; `N + 1` guards cost one more
/// than `p`; `v1` approves everything but `p`, `v2` only the set projects.
pub fn build_greedyav_ccdc(inst: &Rx3cInstance) -> Reduction {
    let n = inst.n();
    let p_cost = base4_all(n, 1);
    let guards: Vec<String> = (1..=n + 1).map(|l| format!("g{l}")).collect();
    let mut b = greedy_sets(inst, base4_all(n, 3));
    for g in &guards {
        b = b.project(g.clone(), &p_cost + 1u32);
    }
    b = b.project("p", p_cost);
    let sets = set_ids(n);
    let v1: Vec<&str> = sets.iter().chain(&guards).map(String::as_str).collect();
    b = b.voter_with_id("v1", &v1).voter_with_id("v2", &sets);
    finish(Construction::GreedyAvCcdc, b, RuleId::GreedyAv, Goal::Constructive, Operation::Delete, n, n, false)
}

/// One guard costing `sum 4^i + 1`, `p` costs 1, budget `sum 3*4^i + 1`.
pub fn build_greedyav_dcdc(inst: &Rx3cInstance) -> Reduction {
    let n = inst.n();
    let mut b = greedy_sets(inst, base4_all(n, 3) + 1u32);
    b = b.project("g", base4_all(n, 1) + 1u32).project("p", 1u32);
    let sets = set_ids(n);
    let mut v1 = sets.clone();
    v1.push("g".into());
    b = b.voter_with_id("v1", &v1).voter_with_id("v2", &sets);
    finish(Construction::GreedyAvDcdc, b, RuleId::GreedyAv, Goal::Destructive, Operation::Delete, n, n, false)
}

fn greedy_addition(
    inst: &Rx3cInstance,
    construction: Construction,
    g_cost: BigUint,
    p_cost: BigUint,
    goal: Goal,
) -> Reduction {
    let n = inst.n();
    let mut b = greedy_sets(inst, base4_all(n, 2));
    b = b.project("g", g_cost).project("p", p_cost);
    let sets = set_ids(n);
    let mut v1 = sets.clone();
    v1.push("g".into());
    b = b.voter_with_id("v1", &v1).voter_with_id("v2", &sets);
    finish(construction, b, RuleId::GreedyAv, goal, Operation::Add, n, n, true)
}

/// Standard projects `g` and `p` with `cost(g) = cost(p) + 1`; set projects
/// are spoilers approved by both voters.
pub fn build_greedyav_ccac(inst: &Rx3cInstance) -> Reduction {
    let p_cost = base4_all(inst.n(), 1);
    greedy_addition(inst, Construction::GreedyAvCcac, &p_cost + 1u32, p_cost, Goal::Constructive)
}

/// As [`build_greedyav_ccac`] with `cost(g) = sum 4^i` and `cost(p) = 1`.
pub fn build_greedyav_dcac(inst: &Rx3cInstance) -> Reduction {
    greedy_addition(inst, Construction::GreedyAvDcac, base4_all(inst.n(), 1), BigUint::from(1u32), Goal::Destructive)
}

fn phragmen_guarded(inst: &Rx3cInstance) -> InstanceBuilder {
    let n = inst.n();
    let mut b = Instance::builder(n as u32 + 1);
    for id in set_ids(n) {
        b = b.project(id, 1u32);
    }
    for i in 1..=3 * n {
        for l in 1..=n {
            b = b.project(format!("g{i}_{l}"), 1u32);
        }
    }
    b = b.project("p", 1u32).voter_with_id("v", &["p"]);
    for e in 0..3 * n {
        let sets: Vec<String> = inst.containing(e).into_iter().map(|j| format!("p{}", j + 1)).collect();
        for l in 1..=n {
            let mut approvals = vec![format!("g{}_{l}", e + 1)];
            approvals.extend(sets.iter().cloned());
            b = b.voter_with_id(format!("u{}_{l}", e + 1), &approvals);
        }
    }
    b
}

/// Unit costs, `3N^2` guards `g_i^l`; voter `u_i^l` approves `g_i^l` and the
/// sets containing element `i`; `B = N + 1`, `r = 2N`.
pub fn build_phragmen_ccdc(inst: &Rx3cInstance) -> Reduction {
    let n = inst.n();
    finish(
        Construction::PhragmenCcdc,
        phragmen_guarded(inst),
        RuleId::Phragmen,
        Goal::Constructive,
        Operation::Delete,
        2 * n,
        n,
        false,
    )
}

/// As [`build_phragmen_ccdc`] with the set projects as spoilers and `r = N`.
pub fn build_phragmen_ccac(inst: &Rx3cInstance) -> Reduction {
    let n = inst.n();
    finish(
        Construction::PhragmenCcac,
        phragmen_guarded(inst),
        RuleId::Phragmen,
        Goal::Constructive,
        Operation::Add,
        n,
        n,
        true,
    )
}

/// Unit costs; eight voters per element approving the sets containing it,
/// six of which also approve that element's guard; six voters per set
/// project; five voters for `p`; `B = 4N`, `r = 2N`.
pub fn build_phragmen_dcdc(inst: &Rx3cInstance) -> Reduction {
    let n = inst.n();
    let mut b = Instance::builder(4 * n as u32);
    for id in set_ids(n) {
        b = b.project(id, 1u32);
    }
    for i in 1..=3 * n {
        b = b.project(format!("g{i}"), 1u32);
    }
    b = b.project("p", 1u32);
    for e in 0..3 * n {
        let sets: Vec<String> = inst.containing(e).into_iter().map(|j| format!("p{}", j + 1)).collect();
        for k in 1..=8 {
            let mut approvals = sets.clone();
            if k <= 6 {
                approvals.push(format!("g{}", e + 1));
            }
            b = b.voter_with_id(format!("u{}_{k}", e + 1), &approvals);
        }
    }
    for j in 1..=3 * n {
        for k in 1..=6 {
            b = b.voter_with_id(format!("x{j}_{k}"), &[format!("p{j}")]);
        }
    }
    for k in 1..=5 {
        b = b.voter_with_id(format!("v{k}"), &["p"]);
    }
    finish(Construction::PhragmenDcdc, b, RuleId::Phragmen, Goal::Destructive, Operation::Delete, 2 * n, n, false)
}

/// Unit costs; standard `g` (with `3N - 1` voters) and `p`; spoiler set
/// projects with `9N^2 - 3N - 3` dummy voters each; element voter `u_i`
/// approves `p` and the sets containing `i`; `B = N + 1`, `r = N`.
pub fn build_phragmen_dcac(inst: &Rx3cInstance) -> Reduction {
    let n = inst.n();
    let x = 9 * n * n - 3 * n - 3;
    let mut b = Instance::builder(n as u32 + 1);
    for id in set_ids(n) {
        b = b.project(id, 1u32);
    }
    b = b.project("g", 1u32).project("p", 1u32);
    for k in 1..=3 * n - 1 {
        b = b.voter_with_id(format!("v{k}"), &["g"]);
    }
    for e in 0..3 * n {
        let mut approvals: Vec<String> = inst.containing(e).into_iter().map(|j| format!("p{}", j + 1)).collect();
        approvals.push("p".into());
        b = b.voter_with_id(format!("u{}", e + 1), &approvals);
    }
    for j in 1..=3 * n {
        for k in 1..=x {
            b = b.voter_with_id(format!("d{j}_{k}"), &[format!("p{j}")]);
        }
    }
    finish(Construction::PhragmenDcac, b, RuleId::Phragmen, Goal::Destructive, Operation::Add, n, n, true)
}

pub fn build(construction: Construction, inst: &Rx3cInstance) -> Reduction {
    match construction {
        Construction::GreedyAvCcdc => build_greedyav_ccdc(inst),
        Construction::GreedyAvDcdc => build_greedyav_dcdc(inst),
        Construction::PhragmenCcdc => build_phragmen_ccdc(inst),
        Construction::PhragmenDcdc => build_phragmen_dcdc(inst),
        Construction::GreedyAvCcac => build_greedyav_ccac(inst),
        Construction::GreedyAvDcac => build_greedyav_dcac(inst),
        Construction::PhragmenCcac => build_phragmen_ccac(inst),
        Construction::PhragmenDcac => build_phragmen_dcac(inst),
    }
}
