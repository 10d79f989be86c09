use num_bigint::BigUint;

use crate::instance::{Instance, ProjectId};
use crate::rational::Rational;

/// One step of a rule's execution.
///
/// Greedy rules record every processed project (funded or skipped). The
/// continuous rules only record funding events; Phragmén stores the funding
/// time and Equal-Shares the chosen `q`, together with what each supporter paid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub project: usize,
    pub round: usize,
    pub funded: bool,
    pub time: Option<Rational>,
    pub q: Option<Rational>,
    pub payments: Vec<(usize, Rational)>,
}

impl TraceEvent {
    pub(crate) fn processed(project: usize, round: usize, funded: bool) -> Self {
        TraceEvent { project, round, funded, time: None, q: None, payments: Vec::new() }
    }
}

/// Result of running a rule: the funded projects (in funding order) and the trace.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Outcome {
    pub funded: Vec<usize>,
    pub trace: Vec<TraceEvent>,
}

impl Outcome {
    pub fn is_funded(&self, project: usize) -> bool {
        self.funded.contains(&project)
    }

    pub fn funded_ids(&self, instance: &Instance) -> Vec<ProjectId> {
        instance.ids_of(&self.funded)
    }

    pub fn funded_cost(&self, instance: &Instance) -> BigUint {
        instance.cost_of(&self.funded)
    }

    /// Funded project indices in ascending order.
    pub fn funded_sorted(&self) -> Vec<usize> {
        let mut v = self.funded.clone();
        v.sort_unstable();
        v
    }
}
