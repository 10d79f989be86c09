use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TieBreakError {
    #[error("tie-breaking order has {got} entries, instance has {expected} projects")]
    WrongLength { expected: usize, got: usize },
    #[error("tie-breaking order names unknown project `{0}`")]
    UnknownProject(String),
    #[error("tie-breaking order repeats project `{0}`")]
    Repeated(String),
}

/// Strict preference over project indices; earlier means preferred.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieBreakOrder {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl TieBreakOrder {
    /// The order in which projects appear in the instance.
    pub fn input_order(instance: &Instance) -> Self {
        Self::identity(instance.num_projects())
    }

    pub fn identity(n: usize) -> Self {
        TieBreakOrder { order: (0..n).collect(), rank: (0..n).collect() }
    }

    /// Builds an order from a permutation of project indices.
    pub fn from_indices(order: Vec<usize>) -> Option<Self> {
        let mut rank = vec![usize::MAX; order.len()];
        for (pos, &p) in order.iter().enumerate() {
            if p >= order.len() || rank[p] != usize::MAX {
                return None;
            }
            rank[p] = pos;
        }
        Some(TieBreakOrder { order, rank })
    }

    /// Builds an order from project ids; every project must appear exactly once.
    pub fn from_ids<S: AsRef<str>>(instance: &Instance, ids: &[S]) -> Result<Self, TieBreakError> {
        if ids.len() != instance.num_projects() {
            return Err(TieBreakError::WrongLength { expected: instance.num_projects(), got: ids.len() });
        }
        let mut order = Vec::with_capacity(ids.len());
        let mut seen = vec![false; ids.len()];
        for id in ids {
            let idx =
                instance.index_of(id.as_ref()).ok_or_else(|| TieBreakError::UnknownProject(id.as_ref().to_string()))?;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(TieBreakError::Repeated(id.as_ref().to_string()));
            }
            order.push(idx);
        }
        Ok(Self::from_indices(order).expect("checked permutation"))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position of a project (0 = most preferred).
    pub fn rank(&self, project: usize) -> usize {
        self.rank[project]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }

    /// Restriction to the kept projects, re-indexed like [`Instance::retain_projects`].
    pub fn restrict(&self, keep: &[bool]) -> TieBreakOrder {
        let mut new_index = vec![usize::MAX; keep.len()];
        let mut next = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = next;
                next += 1;
            }
        }
        let order = self.order.iter().filter(|&&p| keep[p]).map(|&p| new_index[p]).collect();
        TieBreakOrder::from_indices(order).expect("restriction of a permutation")
    }
}
