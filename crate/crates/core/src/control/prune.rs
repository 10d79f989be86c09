use crate::instance::Instance;
use crate::rules::{processing_order, RuleId};
use crate::tiebreak::TieBreakOrder;

/// A reduced instance together with the map back to original indices.
#[derive(Clone, Debug)]
pub struct Pruned {
    pub instance: Instance,
    pub tiebreak: TieBreakOrder,
    /// `kept[i]` is the original index of project `i` of the reduced instance.
    pub kept: Vec<usize>,
    /// Index of the distinguished project in the reduced instance.
    pub distinguished: usize,
}

impl Pruned {
    pub fn to_original(&self, projects: &[usize]) -> Vec<usize> {
        projects.iter().map(|&i| self.kept[i]).collect()
    }
}

/// Drops projects that cannot influence whether `distinguished` is funded:
/// those costing more than the budget and, for the greedy rules, those
/// processed after it.
pub fn prune_after_distinguished(
    instance: &Instance,
    tiebreak: &TieBreakOrder,
    rule: RuleId,
    distinguished: usize,
) -> Pruned {
    let m = instance.num_projects();
    let mut keep = vec![true; m];
    if rule.is_greedy() {
        let mut after = false;
        for p in processing_order(rule, instance, tiebreak) {
            if after {
                keep[p] = false;
            }
            after |= p == distinguished;
        }
    }
    for (i, k) in keep.iter_mut().enumerate() {
        if i != distinguished && instance.is_unfundable(i) {
            *k = false;
        }
    }
    let kept: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();
    let position = kept.iter().position(|&i| i == distinguished).expect("distinguished project is kept");
    Pruned {
        instance: instance.retain_projects(&keep),
        tiebreak: tiebreak.restrict(&keep),
        kept,
        distinguished: position,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::example_one;
    use crate::rules::evaluate;

    #[test]
    fn drops_later_and_unfundable_projects() {
        let e = Instance::builder(3u32)
            .project("big", 4u32)
            .project("a", 1u32)
            .project("p", 1u32)
            .project("late", 1u32)
            .voters(3, &["big", "a"])
            .voters(2, &["p"])
            .voter(&["late"])
            .build()
            .unwrap();
        let t = TieBreakOrder::input_order(&e);
        let pr = prune_after_distinguished(&e, &t, RuleId::GreedyAv, 2);
        assert_eq!(pr.kept, vec![1, 2]);
        assert_eq!(pr.distinguished, 1);
        let pr = prune_after_distinguished(&e, &t, RuleId::Phragmen, 2);
        assert_eq!(pr.kept, vec![1, 2, 3]);
    }

    #[test]
    fn pruning_preserves_fate() {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        for p in 0..e.num_projects() {
            let pr = prune_after_distinguished(&e, &t, RuleId::GreedyAv, p);
            let full = evaluate(RuleId::GreedyAv, &e, &t).unwrap().is_funded(p);
            let reduced = evaluate(RuleId::GreedyAv, &pr.instance, &pr.tiebreak).unwrap().is_funded(pr.distinguished);
            assert_eq!(full, reduced);
        }
    }
}
