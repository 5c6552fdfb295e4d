//! Partition refinement against a table, and quotients by the result.
//!
//! Two states are behaviorally equal when some relation containing the pair
//! satisfies the back-and-forth condition: related states reacting alone
//! reach related results, and componentwise-related pairs reacting jointly
//! reach related results. The coarsest such partition is the kernel of a
//! homomorphism out of the explored system, and refinement computes it the
//! usual way: start with everything together and split blocks until no
//! recorded experiment distinguishes states sharing a block.

use std::collections::{BTreeMap, BTreeSet};

use super::{DialgebraTable, LtsTable, Partition, StateId};

/// Coarsest partition under which every recorded experiment respects
/// blocks.
///
/// Each pass splits blocks by the block-image of the unary results, then by
/// the block-image of the binary results against every partner state in
/// turn. Results of a pair do not depend on its order here (exploration
/// records both orders alike), so splitting by partner columns alone
/// reaches the full condition: at the fixpoint, recorded pairs with
/// blockwise-equal components have equal block-images, chained through the
/// shared-partner columns. States with no recorded result against some
/// partner carry no evidence and stay with their block.
pub fn refine_dialgebra(table: &DialgebraTable) -> Partition {
    let n = table.len();
    let mut partition = Partition::single_block(n);
    loop {
        let mut changed = false;
        let unary_keys: Vec<Option<BTreeSet<usize>>> = (0..n)
            .map(|x| table.unary.get(&StateId(x)).map(|r| partition.image(r)))
            .collect();
        changed |= partition.split_by(&unary_keys);
        for y in 0..n {
            let column: Vec<Option<BTreeSet<usize>>> = (0..n)
                .map(|x| table.binary.get(&(StateId(x), StateId(y))).map(|r| partition.image(r)))
                .collect();
            changed |= partition.split_by(&column);
        }
        if !changed {
            break;
        }
    }
    partition.normalize();
    partition
}

/// Coarsest partition under which every recorded transition respects
/// blocks: states sharing a block have the same set of (label, target
/// block) moves.
pub fn refine_lts<L: Ord>(table: &LtsTable<L>) -> Partition {
    let n = table.len();
    let mut partition = Partition::single_block(n);
    loop {
        let keys: Vec<Option<BTreeSet<(&L, usize)>>> = (0..n)
            .map(|x| {
                table.transitions.get(&StateId(x)).map(|moves| {
                    moves.iter().map(|(label, target)| (label, partition.block_of(*target))).collect()
                })
            })
            .collect();
        if !partition.split_by(&keys) {
            break;
        }
    }
    partition.normalize();
    partition
}

/// Checks the back-and-forth condition over the recorded experiments:
/// whenever two recorded unary experiments start in one block, or two
/// recorded binary experiments start in blockwise-equal pairs, their
/// results hit the same blocks.
pub fn satisfies_back_and_forth(table: &DialgebraTable, partition: &Partition) -> bool {
    let mut unary_seen: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (&x, results) in &table.unary {
        let image = partition.image(results);
        match unary_seen.entry(partition.block_of(x)) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(image);
            }
            std::collections::btree_map::Entry::Occupied(seen) => {
                if *seen.get() != image {
                    return false;
                }
            }
        }
    }
    let mut binary_seen: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for (&(x, y), results) in &table.binary {
        let image = partition.image(results);
        match binary_seen.entry((partition.block_of(x), partition.block_of(y))) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(image);
            }
            std::collections::btree_map::Entry::Occupied(seen) => {
                if *seen.get() != image {
                    return false;
                }
            }
        }
    }
    true
}

/// Quotient of a table by a partition satisfying the back-and-forth
/// condition. Block ids become the new state ids; each block is represented
/// by its member with the least canonical rendering, and experiment results
/// map through the partition. The state map is then a homomorphism: every
/// recorded experiment commutes with it.
///
/// Panics when the partition does not satisfy the condition, since the
/// result sets would then be ambiguous.
pub fn quotient(table: &DialgebraTable, partition: &Partition) -> DialgebraTable {
    assert_eq!(partition.len(), table.len(), "partition must cover the table");
    assert!(
        satisfies_back_and_forth(table, partition),
        "quotient needs a partition satisfying the back-and-forth condition"
    );
    let states = partition
        .blocks()
        .iter()
        .map(|block| {
            block
                .iter()
                .map(|&member| &table.states[member])
                .min_by(|a, b| a.rendering().cmp(b.rendering()))
                .expect("blocks are nonempty")
                .clone()
        })
        .collect();
    let map = |results: &BTreeSet<StateId>| -> BTreeSet<StateId> {
        results.iter().map(|&s| StateId(partition.block_of(s))).collect()
    };
    let mut unary = BTreeMap::new();
    for (&x, results) in &table.unary {
        unary.entry(StateId(partition.block_of(x))).or_insert_with(|| map(results));
    }
    let mut binary = BTreeMap::new();
    for (&(x, y), results) in &table.binary {
        let key = (StateId(partition.block_of(x)), StateId(partition.block_of(y)));
        binary.entry(key).or_insert_with(|| map(results));
    }
    let witnesses = table.witnesses.iter().map(|&w| StateId(partition.block_of(w))).collect();
    DialgebraTable {
        calculus: table.calculus,
        states,
        unary,
        binary,
        witnesses,
        unary_complete: table.unary_complete,
        binary_complete: table.binary_complete,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;
    use crate::engine::{explore_dialgebra, explore_lts, ChallengerPolicy, NamePool};
    use crate::ccs::ccs_lts_step;
    use crate::name::Name;
    use crate::parser::parse_term;
    use crate::term::{Calculus, Term};

    fn ccs(src: &str) -> Term {
        parse_term(src, Calculus::Ccs).unwrap()
    }

    fn witness_policy(names: &[&str]) -> ChallengerPolicy {
        ChallengerPolicy::WitnessSet { pool: NamePool::new(names.iter().map(|n| Name::new(n).unwrap())) }
    }

    fn explored(sources: &[&str], policy: &ChallengerPolicy) -> DialgebraTable {
        let terms: Vec<Term> = sources.iter().map(|s| ccs(s)).collect();
        explore_dialgebra(&terms, policy, 10_000).unwrap()
    }

    fn blocks_of(table: &DialgebraTable, partition: &Partition, a: &str, b: &str) -> (usize, usize) {
        let ia = table.id_of(&canonicalize(&ccs(a))).unwrap();
        let ib = table.id_of(&canonicalize(&ccs(b))).unwrap();
        (partition.block_of(ia), partition.block_of(ib))
    }

    #[test]
    fn idle_differs_from_active_through_unary_evidence() {
        let table = explored(&["tau.0", "0"], &ChallengerPolicy::BoundedClosure { rounds: 1 });
        let partition = refine_dialgebra(&table);
        let (t, z) = blocks_of(&table, &partition, "tau.0", "0");
        assert_ne!(t, z);
        assert!(satisfies_back_and_forth(&table, &partition));
    }

    #[test]
    fn choice_of_identical_branches_collapses() {
        let table = explored(&["a.0 + a.0", "a.0"], &witness_policy(&["a"]));
        let partition = refine_dialgebra(&table);
        let (l, r) = blocks_of(&table, &partition, "a.0 + a.0", "a.0");
        assert_eq!(l, r);
    }

    #[test]
    fn witness_evidence_separates_different_channels() {
        let table = explored(&["a.0", "b.0"], &witness_policy(&["a", "b"]));
        let partition = refine_dialgebra(&table);
        let (l, r) = blocks_of(&table, &partition, "a.0", "b.0");
        assert_ne!(l, r);
        assert!(satisfies_back_and_forth(&table, &partition));
    }

    #[test]
    fn interleaving_matches_the_expansion() {
        // A parallel pair against its sequentialization, no synchronization
        // possible between them.
        let table = explored(&["a.0 | b.0", "a.b.0 + b.a.0"], &witness_policy(&["a", "b"]));
        let partition = refine_dialgebra(&table);
        let (l, r) = blocks_of(&table, &partition, "a.0 | b.0", "a.b.0 + b.a.0");
        assert_eq!(l, r);
    }

    #[test]
    fn complementary_pair_differs_from_its_expansion() {
        // a | ~a can also synchronize silently; the pure interleaving
        // cannot, and the unary experiment sees the difference.
        let table =
            explored(&["a.0 | ~a.0", "a.~a.0 + ~a.a.0"], &witness_policy(&["a"]));
        let partition = refine_dialgebra(&table);
        let (l, r) = blocks_of(&table, &partition, "a.0 | ~a.0", "a.~a.0 + ~a.a.0");
        assert_ne!(l, r);
    }

    #[test]
    fn refinement_result_passes_the_condition_it_refines_by() {
        let table = explored(
            &["a.(b.0 + tau.0)", "a.b.0", "tau.a.0 | b.0"],
            &witness_policy(&["a", "b"]),
        );
        let partition = refine_dialgebra(&table);
        assert!(satisfies_back_and_forth(&table, &partition));
    }

    #[test]
    fn lts_refinement_separates_by_labels() {
        let terms = [ccs("a.0"), ccs("b.0"), ccs("a.0 + a.0")];
        let table = explore_lts(&terms, ccs_lts_step, 1000).unwrap();
        let partition = refine_lts(&table);
        let a = table.states.iter().position(|s| s.rendering() == "a.0").unwrap();
        let b = table.states.iter().position(|s| s.rendering() == "b.0").unwrap();
        assert_ne!(partition.block_of(StateId(a)), partition.block_of(StateId(b)));
    }

    #[test]
    fn quotient_collapses_blocks_and_commutes() {
        let table = explored(&["a.0 + a.0", "a.0"], &witness_policy(&["a"]));
        let partition = refine_dialgebra(&table);
        let q = quotient(&table, &partition);
        assert_eq!(q.len(), partition.block_count());
        assert!(q.len() < table.len());
        // Homomorphism: recorded results map onto the quotient's results.
        for (&x, results) in &table.unary {
            let qx = StateId(partition.block_of(x));
            let mapped: BTreeSet<StateId> =
                results.iter().map(|&s| StateId(partition.block_of(s))).collect();
            assert_eq!(q.unary[&qx], mapped);
        }
        for (&(x, y), results) in &table.binary {
            let key = (StateId(partition.block_of(x)), StateId(partition.block_of(y)));
            let mapped: BTreeSet<StateId> =
                results.iter().map(|&s| StateId(partition.block_of(s))).collect();
            assert_eq!(q.binary[&key], mapped);
        }
        // Representatives are least renderings, so a.0 represents its block.
        let merged = q.id_of(&canonicalize(&ccs("a.0")));
        assert!(merged.is_some());
        assert!(q.id_of(&canonicalize(&ccs("a.0 + a.0"))).is_none());
    }

    #[test]
    fn quotient_of_the_quotient_is_stable() {
        let table = explored(&["a.0 + a.0", "a.0", "tau.0 + tau.0"], &witness_policy(&["a"]));
        let partition = refine_dialgebra(&table);
        let q = quotient(&table, &partition);
        let again = refine_dialgebra(&q);
        assert_eq!(again.block_count(), q.len());
    }
}
