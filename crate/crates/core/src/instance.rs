//! Participatory budgeting instances: projects with integer costs, approval
//! ballots and a budget.
//!
//! Projects are identified externally by their string id. Internally every
//! project has a dense index (its position in the input), which is what the
//! rule kernels and solvers work with.

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// External identity of a project.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectId(pub String);

impl ProjectId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ProjectId {
    fn from(s: &str) -> Self {
        ProjectId(s.to_string())
    }
}

impl From<String> for ProjectId {
    fn from(s: String) -> Self {
        ProjectId(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("duplicate project id `{0}`")]
    DuplicateProject(String),
    #[error("project `{0}` has a non-positive cost")]
    NonPositiveCost(String),
    #[error("voter `{voter}` approves unknown project `{project}`")]
    UnknownApproval { voter: String, project: String },
    #[error("duplicate voter id `{0}`")]
    DuplicateVoter(String),
    #[error("unknown project `{0}`")]
    UnknownProject(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Project {
    pub id: ProjectId,
    pub cost: BigUint,
    /// Extra per-project columns carried through from the input file.
    pub attributes: IndexMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Voter {
    pub id: String,
    /// Dense project indices, sorted and free of duplicates.
    pub approvals: Vec<usize>,
    pub attributes: IndexMap<String, String>,
}

/// Unvalidated, string-keyed form of an instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawInstance {
    pub projects: Vec<RawProject>,
    pub voters: Vec<RawVoter>,
    pub budget: BigUint,
    pub metadata: IndexMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawProject {
    pub id: String,
    pub cost: BigUint,
    pub attributes: IndexMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawVoter {
    pub id: String,
    pub approvals: Vec<String>,
    pub attributes: IndexMap<String, String>,
}

/// A validated instance. Immutable once built.
#[derive(Clone, Debug)]
pub struct Instance {
    projects: Vec<Project>,
    voters: Vec<Voter>,
    budget: BigUint,
    metadata: IndexMap<String, String>,
    index: HashMap<ProjectId, usize>,
    supporters: Vec<Vec<usize>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.projects == other.projects
            && self.voters == other.voters
            && self.budget == other.budget
            && self.metadata == other.metadata
    }
}

impl Eq for Instance {}

/// Checks every instance invariant and builds the dense representation.
///
/// Projects costing more than the budget are kept; see [`Instance::unfundable`].
pub fn validate_instance(raw: RawInstance) -> Result<Instance, InstanceError> {
    let mut index = HashMap::with_capacity(raw.projects.len());
    let mut projects = Vec::with_capacity(raw.projects.len());
    for (i, p) in raw.projects.into_iter().enumerate() {
        if p.cost.is_zero() {
            return Err(InstanceError::NonPositiveCost(p.id));
        }
        let id = ProjectId(p.id);
        if index.insert(id.clone(), i).is_some() {
            return Err(InstanceError::DuplicateProject(id.0));
        }
        projects.push(Project { id, cost: p.cost, attributes: p.attributes });
    }

    let mut seen_voters = HashSet::with_capacity(raw.voters.len());
    let mut voters = Vec::with_capacity(raw.voters.len());
    let mut supporters = vec![Vec::new(); projects.len()];
    for (vi, v) in raw.voters.into_iter().enumerate() {
        if !seen_voters.insert(v.id.clone()) {
            return Err(InstanceError::DuplicateVoter(v.id));
        }
        let mut approvals = Vec::with_capacity(v.approvals.len());
        for a in &v.approvals {
            match index.get(a.as_str()) {
                Some(&pi) => approvals.push(pi),
                None => return Err(InstanceError::UnknownApproval { voter: v.id, project: a.clone() }),
            }
        }
        approvals.sort_unstable();
        approvals.dedup();
        for &pi in &approvals {
            supporters[pi].push(vi);
        }
        voters.push(Voter { id: v.id, approvals, attributes: v.attributes });
    }

    Ok(Instance { projects, voters, budget: raw.budget, metadata: raw.metadata, index, supporters })
}

impl std::borrow::Borrow<str> for ProjectId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl Instance {
    pub fn builder(budget: impl Into<BigUint>) -> InstanceBuilder {
        InstanceBuilder::new(budget)
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn voters(&self) -> &[Voter] {
        &self.voters
    }

    pub fn budget(&self) -> &BigUint {
        &self.budget
    }

    pub fn metadata(&self) -> &IndexMap<String, String> {
        &self.metadata
    }

    pub fn num_projects(&self) -> usize {
        self.projects.len()
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn project_id(&self, idx: usize) -> &ProjectId {
        &self.projects[idx].id
    }

    pub fn cost(&self, idx: usize) -> &BigUint {
        &self.projects[idx].cost
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require_index(&self, id: &str) -> Result<usize, InstanceError> {
        self.index_of(id).ok_or_else(|| InstanceError::UnknownProject(id.to_string()))
    }

    /// Voters (by index) approving the project.
    pub fn supporters(&self, idx: usize) -> &[usize] {
        &self.supporters[idx]
    }

    /// Approval score.
    pub fn score(&self, idx: usize) -> usize {
        self.supporters[idx].len()
    }

    /// Projects whose cost exceeds the budget; they can never be funded.
    pub fn unfundable(&self) -> Vec<usize> {
        (0..self.projects.len()).filter(|&i| self.projects[i].cost > self.budget).collect()
    }

    pub fn is_unfundable(&self, idx: usize) -> bool {
        self.projects[idx].cost > self.budget
    }

    pub fn cost_of<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> BigUint {
        indices.into_iter().map(|&i| &self.projects[i].cost).sum()
    }

    pub fn all_costs_equal(&self) -> bool {
        self.projects.windows(2).all(|w| w[0].cost == w[1].cost)
    }

    pub fn ids_of<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> Vec<ProjectId> {
        indices.into_iter().map(|&i| self.projects[i].id.clone()).collect()
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            projects: self
                .projects
                .iter()
                .map(|p| RawProject { id: p.id.0.clone(), cost: p.cost.clone(), attributes: p.attributes.clone() })
                .collect(),
            voters: self
                .voters
                .iter()
                .map(|v| RawVoter {
                    id: v.id.clone(),
                    approvals: v.approvals.iter().map(|&a| self.projects[a].id.0.clone()).collect(),
                    attributes: v.attributes.clone(),
                })
                .collect(),
            budget: self.budget.clone(),
            metadata: self.metadata.clone(),
        }
    }

    /// Keeps only the projects with `keep[i] == true`, dropping them from every ballot.
    pub fn retain_projects(&self, keep: &[bool]) -> Instance {
        let mut raw = self.to_raw();
        let dropped: HashSet<String> =
            (0..self.projects.len()).filter(|&i| !keep[i]).map(|i| self.projects[i].id.0.clone()).collect();
        raw.projects.retain(|p| !dropped.contains(&p.id));
        for v in &mut raw.voters {
            v.approvals.retain(|a| !dropped.contains(a));
        }
        validate_instance(raw).expect("restriction of a valid instance is valid")
    }

    /// Same instance with one project's cost replaced.
    pub fn with_cost(&self, idx: usize, cost: BigUint) -> Result<Instance, InstanceError> {
        let mut raw = self.to_raw();
        raw.projects[idx].cost = cost;
        validate_instance(raw)
    }

    /// Same instance plus `count` fresh voters approving only `idx`.
    pub fn with_singleton_voters(&self, idx: usize, count: usize) -> Instance {
        let mut raw = self.to_raw();
        let mut taken: HashSet<String> = raw.voters.iter().map(|v| v.id.clone()).collect();
        let mut serial = 0usize;
        for _ in 0..count {
            let id = loop {
                serial += 1;
                let candidate = format!("__singleton_{serial}");
                if taken.insert(candidate.clone()) {
                    break candidate;
                }
            };
            raw.voters.push(RawVoter {
                id,
                approvals: vec![self.projects[idx].id.0.clone()],
                attributes: IndexMap::new(),
            });
        }
        validate_instance(raw).expect("adding voters keeps the instance valid")
    }

    /// Compares projects, costs, budget and ballots; ignores metadata,
    /// voter ids and attribute columns.
    pub fn same_election(&self, other: &Instance) -> bool {
        self.budget == other.budget
            && self.projects.len() == other.projects.len()
            && self.projects.iter().zip(&other.projects).all(|(a, b)| a.id == b.id && a.cost == b.cost)
            && self.voters.len() == other.voters.len()
            && self.voters.iter().zip(&other.voters).all(|(a, b)| a.approvals == b.approvals)
    }
}

/// Sum of costs of the named projects.
pub fn total_cost<S: AsRef<str>>(projects: &[S], instance: &Instance) -> Result<BigUint, InstanceError> {
    let mut total = BigUint::zero();
    for id in projects {
        total += instance.cost(instance.require_index(id.as_ref())?);
    }
    Ok(total)
}

/// Convenience builder, mostly for tests and the reduction constructions.
#[derive(Clone, Debug)]
pub struct InstanceBuilder {
    raw: RawInstance,
}

impl InstanceBuilder {
    pub fn new(budget: impl Into<BigUint>) -> Self {
        InstanceBuilder { raw: RawInstance { budget: budget.into(), ..Default::default() } }
    }

    pub fn project(mut self, id: impl Into<String>, cost: impl Into<BigUint>) -> Self {
        self.raw.projects.push(RawProject { id: id.into(), cost: cost.into(), attributes: IndexMap::new() });
        self
    }

    /// Adds a voter with an automatically assigned id.
    pub fn voter<S: AsRef<str>>(mut self, approvals: &[S]) -> Self {
        let id = format!("v{}", self.raw.voters.len() + 1);
        self.push_voter(id, approvals);
        self
    }

    /// Adds `count` identical voters.
    pub fn voters<S: AsRef<str>>(mut self, count: usize, approvals: &[S]) -> Self {
        for _ in 0..count {
            let id = format!("v{}", self.raw.voters.len() + 1);
            self.push_voter(id, approvals);
        }
        self
    }

    pub fn voter_with_id<S: AsRef<str>>(mut self, id: impl Into<String>, approvals: &[S]) -> Self {
        self.push_voter(id.into(), approvals);
        self
    }

    pub fn meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.raw.metadata.insert(key.into(), value.into());
        self
    }

    fn push_voter<S: AsRef<str>>(&mut self, id: String, approvals: &[S]) {
        self.raw.voters.push(RawVoter {
            id,
            approvals: approvals.iter().map(|a| a.as_ref().to_string()).collect(),
            attributes: IndexMap::new(),
        });
    }

    pub fn build(self) -> Result<Instance, InstanceError> {
        validate_instance(self.raw)
    }

    pub fn into_raw(self) -> RawInstance {
        self.raw
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Three projects c1 (cost 1, 3 approvals), c2 (cost 2, 2 approvals),
    /// p (cost 1, 1 approval), budget 2.
    pub fn example_one() -> Instance {
        Instance::builder(2u32)
            .project("c1", 1u32)
            .project("c2", 2u32)
            .project("p", 1u32)
            .voters(3, &["c1"])
            .voters(2, &["c2"])
            .voter(&["p"])
            .build()
            .unwrap()
    }
}
