//! Exhaustive search over control actions, in order of increasing weight.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;

use crate::instance::Instance;
use crate::rules::Simulator;
use crate::tiebreak::TieBreakOrder;

use super::{ControlAnswer, ControlError, ControlQuery, SearchOptions, Solver};

const CHUNK: usize = 4096;

/// Number of successful control actions of one size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub count: u64,
    /// Subsets actually simulated (less than the total when `complete` is false).
    pub evaluated: u64,
    pub complete: bool,
}

struct Checker<'a> {
    query: &'a ControlQuery,
    sim: Simulator<'a>,
    m: usize,
}

impl Checker<'_> {
    fn new<'a>(
        query: &'a ControlQuery,
        instance: &'a Instance,
        tiebreak: &'a TieBreakOrder,
    ) -> Result<Checker<'a>, ControlError> {
        query.validate(instance)?;
        let sim = Simulator::new(query.rule, instance, tiebreak)?;
        // The only rule error (no voters) does not depend on the active set.
        sim.run(None)?;
        Ok(Checker { query, sim, m: instance.num_projects() })
    }

    fn achieves(&self, chosen: &[usize]) -> bool {
        let active = self.query.active_mask(self.m, chosen);
        self.sim.funds(Some(&active), self.query.distinguished).map(|f| self.query.goal_met(f)).unwrap_or(false)
    }
}

fn run_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    if jobs <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// First successful subset of the chunk in chunk order.
fn first_hit(checker: &Checker, chunk: &[Vec<usize>], parallel: bool) -> Option<usize> {
    if parallel {
        chunk.par_iter().position_first(|s| checker.achieves(s))
    } else {
        chunk.iter().position(|s| checker.achieves(s))
    }
}

/// Subsets of `pool` with total weight `<= bound` as project lists, grouped
/// by weight, each group in lexicographic order of pool positions.
fn weighted_levels(query: &ControlQuery, pool: &[usize]) -> BTreeMap<u64, Vec<Vec<usize>>> {
    struct Walk<'a> {
        weights: &'a [u64],
        bound: u64,
        max_size: usize,
        stack: Vec<usize>,
        levels: BTreeMap<u64, Vec<Vec<usize>>>,
    }
    impl Walk<'_> {
        fn go(&mut self, start: usize, w: u64) {
            self.levels.entry(w).or_default().push(self.stack.clone());
            if self.stack.len() == self.max_size {
                return;
            }
            for i in start..self.weights.len() {
                let nw = w.saturating_add(self.weights[i]);
                if nw <= self.bound {
                    self.stack.push(i);
                    self.go(i + 1, nw);
                    self.stack.pop();
                }
            }
        }
    }
    let weights: Vec<u64> = pool.iter().map(|&p| query.weight(p)).collect();
    let mut walk = Walk {
        weights: &weights,
        bound: query.bound,
        max_size: query.max_size.unwrap_or(usize::MAX),
        stack: Vec::new(),
        levels: BTreeMap::new(),
    };
    walk.go(0, 0);
    let mut levels = walk.levels;
    for group in levels.values_mut() {
        group.sort();
        for s in group.iter_mut() {
            for i in s.iter_mut() {
                *i = pool[*i];
            }
        }
    }
    levels
}

/// Exhaustive control for any rule. Subsets of the controllable projects are
/// tried by increasing weight, and within one weight in lexicographic order
/// of the canonical pool order, so the witness is deterministic regardless
/// of the number of workers.
pub fn brute_force_control(
    query: &ControlQuery,
    instance: &Instance,
    tiebreak: &TieBreakOrder,
    options: SearchOptions,
) -> Result<ControlAnswer, ControlError> {
    let checker = Checker::new(query, instance, tiebreak)?;
    let pool = query.pool(instance, tiebreak);
    let parallel = options.jobs > 1;

    let unit = pool.iter().map(|&p| query.weight(p)).all_equal_value().ok();
    run_pool(options.jobs, || {
        if let Some(w) = unit {
            let max_size = usize::try_from(query.bound / w)
                .unwrap_or(usize::MAX)
                .min(pool.len())
                .min(query.max_size.unwrap_or(usize::MAX));
            for size in 0..=max_size {
                for chunk in &(0..pool.len()).combinations(size).chunks(CHUNK) {
                    if options.expired() {
                        return Ok(partial());
                    }
                    let chunk: Vec<Vec<usize>> = chunk.map(|s| s.iter().map(|&i| pool[i]).collect()).collect();
                    if let Some(i) = first_hit(&checker, &chunk, parallel) {
                        return Ok(ControlAnswer::found(Solver::BruteForce, chunk[i].clone(), w * size as u64));
                    }
                }
            }
            return Ok(ControlAnswer::infeasible(Solver::BruteForce));
        }
        for (w, group) in weighted_levels(query, &pool) {
            for chunk in group.chunks(CHUNK) {
                if options.expired() {
                    return Ok(partial());
                }
                if let Some(i) = first_hit(&checker, chunk, parallel) {
                    return Ok(ControlAnswer::found(Solver::BruteForce, chunk[i].clone(), w));
                }
            }
        }
        Ok(ControlAnswer::infeasible(Solver::BruteForce))
    })
}

fn partial() -> ControlAnswer {
    ControlAnswer { complete: false, ..ControlAnswer::infeasible(Solver::BruteForce) }
}

/// Counts the subsets of exactly `size` controllable projects that achieve
/// the goal. Weights and the bound are ignored.
pub fn count_solutions(
    query: &ControlQuery,
    instance: &Instance,
    tiebreak: &TieBreakOrder,
    size: usize,
    options: SearchOptions,
) -> Result<CountResult, ControlError> {
    let checker = Checker::new(query, instance, tiebreak)?;
    let pool = query.pool(instance, tiebreak);
    if size > pool.len() {
        return Ok(CountResult { count: 0, evaluated: 0, complete: true });
    }
    let parallel = options.jobs > 1;
    Ok(run_pool(options.jobs, || {
        let mut count = 0u64;
        let mut evaluated = 0u64;
        for chunk in &(0..pool.len()).combinations(size).chunks(CHUNK) {
            if options.expired() {
                return CountResult { count, evaluated, complete: false };
            }
            let chunk: Vec<Vec<usize>> = chunk.map(|s| s.iter().map(|&i| pool[i]).collect()).collect();
            let hits = if parallel {
                chunk.par_iter().filter(|s| checker.achieves(s)).count()
            } else {
                chunk.iter().filter(|s| checker.achieves(s)).count()
            };
            count += hits as u64;
            evaluated += chunk.len() as u64;
        }
        CountResult { count, evaluated, complete: true }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{Goal, Operation};
    use crate::instance::fixtures::example_one;
    use crate::rules::RuleId;

    #[test]
    fn example_one_all_rules() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        for rule in RuleId::ALL {
            let q = ControlQuery::new(rule, Goal::Constructive, Operation::Delete, 1, 1);
            let a = brute_force_control(&q, &e, &t, SearchOptions::sequential()).unwrap();
            assert!(a.complete);
            if rule.is_greedy() {
                assert_eq!(a.witness, Some(vec![0]), "{rule}");
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        for goal in [Goal::Constructive, Goal::Destructive] {
            for p in 0..3 {
                let q = ControlQuery::new(RuleId::EqualShares, goal, Operation::Delete, p, 2);
                let a = brute_force_control(&q, &e, &t, SearchOptions::sequential()).unwrap();
                let b = brute_force_control(&q, &e, &t, SearchOptions::with_jobs(3)).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn weighted_order() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        let pool = vec![0, 2];
        let q = ControlQuery::new(RuleId::GreedyAv, Goal::Constructive, Operation::Delete, 1, 5)
            .with_weights(vec![3, 1, 2]);
        let levels = weighted_levels(&q, &pool);
        let keys: Vec<u64> = levels.keys().copied().collect();
        assert_eq!(keys, vec![0, 2, 3, 5]);
        assert_eq!(brute_force_control(&q, &e, &t, SearchOptions::sequential()).unwrap().weight, Some(3));
    }

    #[test]
    fn counts_by_size() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::GreedyAv, Goal::Constructive, Operation::Delete, 1, 0);
        let c = |k| count_solutions(&q, &e, &t, k, SearchOptions::sequential()).unwrap().count;
        assert_eq!((c(0), c(1), c(2), c(3)), (0, 1, 1, 0));
    }

    #[test]
    fn expired_deadline_is_partial() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        let q = ControlQuery::new(RuleId::Phragmen, Goal::Constructive, Operation::Delete, 1, 2);
        let opts = SearchOptions { jobs: 1, deadline: Some(std::time::Instant::now()) };
        let a = brute_force_control(&q, &e, &t, opts).unwrap();
        assert!(!a.complete && !a.feasible);
    }
}
