use std::collections::BTreeMap;

use crate::control::SearchOptions;
use crate::instance::Instance;
use crate::rational::Rational;
use crate::rules::RuleId;
use crate::tiebreak::TieBreakOrder;

use super::{
    cheapest_deletion, is_funded, min_deletion_size, win_probability, win_probability_sampled, CheapestDeletion,
    MeasureError, SampledProbability, DEFAULT_CAP,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Probability {
    Exact(Rational),
    Sampled(SampledProbability),
}

impl Probability {
    pub fn value(&self) -> Rational {
        match self {
            Probability::Exact(r) => r.clone(),
            Probability::Sampled(s) => s.estimate(),
        }
    }
}

/// Measures for one project. Funded projects carry the sentinels
/// `min_deletions = 0`, an empty cheapest deletion and no probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectStrength {
    pub project: usize,
    pub funded: bool,
    pub min_deletions: Option<usize>,
    pub cheapest: Option<CheapestDeletion>,
    /// Keyed by the number of deleted projects r.
    pub win_probability: BTreeMap<usize, Probability>,
    /// False if some enumeration hit the time budget; the affected values are missing.
    pub complete: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct StrengthConfig {
    pub r_max: usize,
    /// Size cap for the enumerating measures.
    pub cap: usize,
    /// `(samples, seed)` switches the probabilities to Monte-Carlo estimates.
    pub sampling: Option<(u64, u64)>,
    pub options: SearchOptions,
}

impl Default for StrengthConfig {
    fn default() -> Self {
        StrengthConfig { r_max: 3, cap: DEFAULT_CAP, sampling: None, options: SearchOptions::sequential() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrengthReport {
    pub rule: RuleId,
    pub projects: Vec<ProjectStrength>,
}

fn partial<T>(r: Result<T, MeasureError>, complete: &mut bool) -> Result<Option<T>, MeasureError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(MeasureError::Incomplete) => {
            *complete = false;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// All deletion-based measures for every project of the instance.
pub fn strength_report(
    instance: &Instance,
    rule: RuleId,
    tiebreak: &TieBreakOrder,
    config: &StrengthConfig,
) -> Result<StrengthReport, MeasureError> {
    let m = instance.num_projects();
    let mut projects = Vec::with_capacity(m);
    for p in 0..m {
        let funded = is_funded(instance, rule, tiebreak, p)?;
        let mut complete = true;
        if funded {
            projects.push(ProjectStrength {
                project: p,
                funded,
                min_deletions: Some(0),
                cheapest: Some(CheapestDeletion { set: Vec::new(), total_cost: Default::default(), ratio: None }),
                win_probability: BTreeMap::new(),
                complete,
            });
            continue;
        }
        let min_deletions =
            partial(min_deletion_size(instance, rule, p, tiebreak, config.cap, config.options), &mut complete)?
                .flatten();
        let cheapest =
            partial(cheapest_deletion(instance, rule, p, tiebreak, config.cap, config.options), &mut complete)?
                .flatten();
        let mut win = BTreeMap::new();
        for r in 1..=config.r_max.min(m.saturating_sub(1)) {
            let prob = match config.sampling {
                None => partial(win_probability(instance, rule, p, tiebreak, r, config.options), &mut complete)?
                    .map(Probability::Exact),
                Some((samples, seed)) => {
                    Some(Probability::Sampled(win_probability_sampled(instance, rule, p, tiebreak, r, samples, seed)?))
                }
            };
            if let Some(prob) = prob {
                win.insert(r, prob);
            }
        }
        projects.push(ProjectStrength { project: p, funded, min_deletions, cheapest, win_probability: win, complete });
    }
    Ok(StrengthReport { rule, projects })
}
