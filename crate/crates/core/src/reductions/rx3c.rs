use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Rx3cError {
    #[error("N must be at least 1")]
    EmptyUniverse,
    #[error("expected {expected} sets, got {got}")]
    FamilySize { expected: usize, got: usize },
    #[error("set {0} does not have three distinct elements of the universe")]
    BadSet(usize),
    #[error("element {element} occurs in {count} sets instead of 3")]
    Occurrences { element: usize, count: usize },
    #[error("sets {0} and {1} share more than one element")]
    NotStrict(usize, usize),
}

/// Universe `{0, .., 3N-1}` and `3N` three-element sets in which every
/// element occurs exactly three times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rx3cInstance {
    n: usize,
    family: Vec<[usize; 3]>,
}

impl Rx3cInstance {
    pub fn new(n: usize, family: Vec<[usize; 3]>) -> Result<Self, Rx3cError> {
        if n == 0 {
            return Err(Rx3cError::EmptyUniverse);
        }
        let u = 3 * n;
        if family.len() != u {
            return Err(Rx3cError::FamilySize { expected: u, got: family.len() });
        }
        let mut count = vec![0usize; u];
        let mut normalized = Vec::with_capacity(u);
        for (j, set) in family.into_iter().enumerate() {
            let mut s = set;
            s.sort_unstable();
            if s[2] >= u || s[0] == s[1] || s[1] == s[2] {
                return Err(Rx3cError::BadSet(j));
            }
            for &e in &s {
                count[e] += 1;
            }
            normalized.push(s);
        }
        if let Some((element, &c)) = count.iter().enumerate().find(|(_, &c)| c != 3) {
            return Err(Rx3cError::Occurrences { element, count: c });
        }
        Ok(Rx3cInstance { n, family: normalized })
    }

    /// As [`Rx3cInstance::new`], additionally requiring pairwise intersections of at most one element.
    pub fn new_strict(n: usize, family: Vec<[usize; 3]>) -> Result<Self, Rx3cError> {
        let inst = Self::new(n, family)?;
        for a in 0..inst.family.len() {
            for b in a + 1..inst.family.len() {
                let shared = inst.family[a].iter().filter(|e| inst.family[b].contains(e)).count();
                if shared > 1 {
                    return Err(Rx3cError::NotStrict(a, b));
                }
            }
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe_size(&self) -> usize {
        3 * self.n
    }

    /// Sets with elements sorted ascending.
    pub fn family(&self) -> &[[usize; 3]] {
        &self.family
    }

    /// Sets (by index) containing element `e`.
    pub fn containing(&self, e: usize) -> Vec<usize> {
        (0..self.family.len()).filter(|&j| self.family[j].contains(&e)).collect()
    }

    /// Whether the given set indices form an exact cover.
    pub fn is_cover(&self, sets: &[usize]) -> bool {
        let mut seen = vec![false; self.universe_size()];
        for &j in sets {
            for &e in &self.family[j] {
                if std::mem::replace(&mut seen[e], true) {
                    return false;
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Backtracking search for `N` disjoint sets covering the universe. Always
/// branches on the smallest uncovered element. Returns the set indices in
/// ascending order.
pub fn rx3c_has_exact_cover(inst: &Rx3cInstance) -> Option<Vec<usize>> {
    fn go(inst: &Rx3cInstance, covered: &mut [bool], chosen: &mut Vec<usize>) -> bool {
        let Some(e) = covered.iter().position(|&c| !c) else { return true };
        for j in inst.containing(e) {
            let set = inst.family[j];
            if set.iter().any(|&x| covered[x]) {
                continue;
            }
            for &x in &set {
                covered[x] = true;
            }
            chosen.push(j);
            if go(inst, covered, chosen) {
                return true;
            }
            chosen.pop();
            for &x in &set {
                covered[x] = false;
            }
        }
        false
    }
    let mut covered = vec![false; inst.universe_size()];
    let mut chosen = Vec::new();
    if go(inst, &mut covered, &mut chosen) {
        chosen.sort_unstable();
        Some(chosen)
    } else {
        None
    }
}

fn random_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<[usize; 3]> {
    let mut elems: Vec<usize> = (0..3 * n).collect();
    elems.shuffle(rng);
    elems.chunks(3).map(|c| [c[0], c[1], c[2]]).collect()
}

/// Instance with a planted cover: three random partitions of the universe
/// into triples, shuffled together. Returns the instance and the planted
/// cover's set indices.
pub fn planted_cover<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Rx3cInstance, Vec<usize>) {
    let mut tagged: Vec<([usize; 3], bool)> = random_partition(n, rng).into_iter().map(|s| (s, true)).collect();
    for _ in 0..2 {
        tagged.extend(random_partition(n, rng).into_iter().map(|s| (s, false)));
    }
    tagged.shuffle(rng);
    let cover: Vec<usize> = tagged.iter().enumerate().filter(|(_, (_, c))| *c).map(|(j, _)| j).collect();
    let inst = Rx3cInstance::new(n, tagged.into_iter().map(|(s, _)| s).collect()).expect("three partitions are valid");
    (inst, cover)
}

/// Uniform-ish random instance: every element is written three times, the
/// list is shuffled and cut into triples; retried until all triples are
/// proper sets.
pub fn random_rx3c<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Rx3cInstance {
    let mut slots: Vec<usize> = (0..3 * n).flat_map(|e| [e, e, e]).collect();
    loop {
        slots.shuffle(rng);
        let family: Vec<[usize; 3]> = slots.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        if let Ok(inst) = Rx3cInstance::new(n, family) {
            return inst;
        }
    }
}

/// Random instance without an exact cover, by rejection sampling. `None`
/// after `attempts` failures (always the case for N = 1, where every
/// instance has a cover).
pub fn random_without_cover<R: Rng + ?Sized>(n: usize, rng: &mut R, attempts: usize) -> Option<Rx3cInstance> {
    (0..attempts).map(|_| random_rx3c(n, rng)).find(|inst| rx3c_has_exact_cover(inst).is_none())
}
