use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::control::{count_solutions, ControlQuery, Goal, Operation, SearchOptions};
use crate::instance::Instance;
use crate::rational::{binomial, from_uint, ratio, Rational};
use crate::rules::{RuleId, Simulator};
use crate::tiebreak::TieBreakOrder;

use super::{is_funded, MeasureError};

fn exact_fraction(
    instance: &Instance,
    rule: RuleId,
    distinguished: usize,
    tiebreak: &TieBreakOrder,
    r: usize,
    options: SearchOptions,
) -> Result<Rational, MeasureError> {
    let available = instance.num_projects() - 1;
    if r > available {
        return Err(MeasureError::TooManyDeletions { r, available });
    }
    let query = ControlQuery::new(rule, Goal::Constructive, Operation::Delete, distinguished, r as u64);
    let counted = count_solutions(&query, instance, tiebreak, r, options)?;
    if !counted.complete {
        return Err(MeasureError::Incomplete);
    }
    Ok(from_uint(&BigUint::from(counted.count)) / from_uint(&binomial(available, r)))
}

/// Fraction of the `C(m-1, r)` deletion sets of exactly `r` other projects
/// after which `distinguished` is funded.
pub fn win_probability(
    instance: &Instance,
    rule: RuleId,
    distinguished: usize,
    tiebreak: &TieBreakOrder,
    r: usize,
    options: SearchOptions,
) -> Result<Rational, MeasureError> {
    exact_fraction(instance, rule, distinguished, tiebreak, r, options)
}

/// Monte-Carlo estimate of [`win_probability`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledProbability {
    pub successes: u64,
    pub samples: u64,
    pub seed: u64,
}

impl SampledProbability {
    pub fn estimate(&self) -> Rational {
        if self.samples == 0 {
            return Rational::default();
        }
        ratio(self.successes, self.samples)
    }
}

/// Draws `samples` uniform `r`-subsets of the other projects with a seeded
/// ChaCha generator and counts those whose deletion funds `distinguished`.
pub fn win_probability_sampled(
    instance: &Instance,
    rule: RuleId,
    distinguished: usize,
    tiebreak: &TieBreakOrder,
    r: usize,
    samples: u64,
    seed: u64,
) -> Result<SampledProbability, MeasureError> {
    let m = instance.num_projects();
    let available = m - 1;
    if r > available {
        return Err(MeasureError::TooManyDeletions { r, available });
    }
    let sim = Simulator::new(rule, instance, tiebreak)?;
    sim.run(None)?;
    let others: Vec<usize> = (0..m).filter(|&i| i != distinguished).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    let mut active = vec![true; m];
    for _ in 0..samples {
        let picked = sample(&mut rng, available, r);
        for i in picked.iter() {
            active[others[i]] = false;
        }
        if sim.funds(Some(&active), distinguished)? {
            successes += 1;
        }
        for i in picked.iter() {
            active[others[i]] = true;
        }
    }
    Ok(SampledProbability { successes, samples, seed })
}

/// Probability that `p` is funded after deleting `q` and `r` further
/// projects drawn uniformly from the rest.
pub fn rivalry(
    instance: &Instance,
    rule: RuleId,
    p: usize,
    q: usize,
    tiebreak: &TieBreakOrder,
    r: usize,
    options: SearchOptions,
) -> Result<Rational, MeasureError> {
    if p == q {
        return Err(MeasureError::SameProject);
    }
    let mut keep = vec![true; instance.num_projects()];
    keep[q] = false;
    let reduced = instance.retain_projects(&keep);
    let reduced_tb = tiebreak.restrict(&keep);
    let p_reduced = if p > q { p - 1 } else { p };
    let available = instance.num_projects().saturating_sub(2);
    match exact_fraction(&reduced, rule, p_reduced, &reduced_tb, r, options) {
        Err(MeasureError::TooManyDeletions { r, .. }) => Err(MeasureError::TooManyDeletions { r, available }),
        other => other,
    }
}

/// Rivalry of every initially losing project against every other project.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RivalryMatrix {
    pub r: usize,
    /// Losing projects.
    pub rows: Vec<usize>,
    /// All projects.
    pub columns: Vec<usize>,
    /// `entries[i][j]` is the rivalry of `columns[j]` for `rows[i]`; `None` on the diagonal.
    pub entries: Vec<Vec<Option<Rational>>>,
}

pub fn rivalry_matrix(
    instance: &Instance,
    rule: RuleId,
    tiebreak: &TieBreakOrder,
    r: usize,
    options: SearchOptions,
) -> Result<RivalryMatrix, MeasureError> {
    let m = instance.num_projects();
    let mut rows = Vec::new();
    for p in 0..m {
        if !is_funded(instance, rule, tiebreak, p)? {
            rows.push(p);
        }
    }
    let columns: Vec<usize> = (0..m).collect();
    let mut entries = Vec::with_capacity(rows.len());
    for &p in &rows {
        let mut row = Vec::with_capacity(m);
        for &q in &columns {
            row.push(if p == q { None } else { Some(rivalry(instance, rule, p, q, tiebreak, r, options)?) });
        }
        entries.push(row);
    }
    Ok(RivalryMatrix { r, rows, columns, entries })
}
