//! Exhaustive cross-check for partition refinement at small sizes.
//!
//! Every partition of the state set is enumerated and tested against the
//! back-and-forth condition verbatim; the unique coarsest passing partition
//! is returned. Exponential on purpose: it shares no machinery with the
//! refinement loop beyond the condition itself, so agreement between the
//! two is meaningful.

use super::refine::satisfies_back_and_forth;
use super::{DialgebraTable, EngineError, Partition};

/// Largest number of states the enumeration accepts. Partition counts are
/// Bell numbers; 6 states mean 203 candidates.
pub const BRUTE_FORCE_MAX_STATES: usize = 6;

/// Coarsest partition satisfying the back-and-forth condition, by
/// exhaustive enumeration.
///
/// Fails with [`EngineError::TooManyStates`] beyond
/// [`BRUTE_FORCE_MAX_STATES`] states, and with
/// [`EngineError::NoUniqueMaximum`] when no passing partition coarsens all
/// others, which happens on tables with too few recorded experiments to pin
/// the relation down.
pub fn brute_force_bisim(table: &DialgebraTable) -> Result<Partition, EngineError> {
    let n = table.len();
    if n > BRUTE_FORCE_MAX_STATES {
        return Err(EngineError::TooManyStates { max: BRUTE_FORCE_MAX_STATES, actual: n });
    }
    if n == 0 {
        return Ok(Partition::single_block(0));
    }
    let mut passing: Vec<Partition> = Vec::new();
    let mut assignment = vec![0usize; n];
    enumerate_assignments(1, 1, &mut assignment, &mut |candidate| {
        let partition = Partition::from_assignment(candidate);
        if satisfies_back_and_forth(table, &partition) {
            passing.push(partition);
        }
    });
    // The discrete partition always passes, so there is a fewest-blocks
    // candidate; it must be unique and must coarsen every other pass.
    let fewest =
        passing.iter().map(Partition::block_count).min().expect("discrete partition passes");
    let mut best: Vec<&Partition> = passing.iter().filter(|p| p.block_count() == fewest).collect();
    if best.len() != 1 {
        return Err(EngineError::NoUniqueMaximum);
    }
    let best = best.pop().expect("exactly one candidate");
    if passing.iter().all(|other| best.coarsens(other)) {
        let mut result = best.clone();
        result.normalize();
        Ok(result)
    } else {
        Err(EngineError::NoUniqueMaximum)
    }
}

/// Restricted growth strings: position 0 is block 0, and each later
/// position uses a block id at most one above the maximum so far. These
/// hit every set partition exactly once.
fn enumerate_assignments(
    position: usize,
    used: usize,
    assignment: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if position == assignment.len() {
        visit(assignment);
        return;
    }
    for block in 0..=used {
        assignment[position] = block;
        enumerate_assignments(position + 1, used.max(block + 1), assignment, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;
    use crate::engine::{explore_dialgebra, refine_dialgebra, ChallengerPolicy, StateId};
    use crate::parser::parse_term;
    use crate::term::{Calculus, Term};

    fn ccs(src: &str) -> Term {
        parse_term(src, Calculus::Ccs).unwrap()
    }

    fn saturated(sources: &[&str], rounds: usize) -> DialgebraTable {
        let terms: Vec<Term> = sources.iter().map(|s| ccs(s)).collect();
        let table =
            explore_dialgebra(&terms, &ChallengerPolicy::BoundedClosure { rounds }, 1000).unwrap();
        // Saturation: every ordered pair recorded, so the coarsest passing
        // partition is unique and comparable across algorithms.
        for i in 0..table.len() {
            for j in 0..table.len() {
                assert!(table.binary.contains_key(&(StateId(i), StateId(j))));
            }
        }
        table
    }

    #[test]
    fn partition_count_is_the_bell_number() {
        let mut count = 0;
        let mut assignment = vec![0usize; 6];
        enumerate_assignments(1, 1, &mut assignment, &mut |_| count += 1);
        assert_eq!(count, 203);
    }

    #[test]
    fn agrees_with_refinement_on_a_saturated_table() {
        let table = saturated(&["a.0", "~a.0", "0"], 3);
        assert!(table.len() <= BRUTE_FORCE_MAX_STATES);
        let brute = brute_force_bisim(&table).unwrap();
        let refined = refine_dialgebra(&table);
        assert_eq!(brute, refined);
    }

    #[test]
    fn separates_senders_from_receivers() {
        let table = saturated(&["a.0", "~a.0", "0"], 3);
        let brute = brute_force_bisim(&table).unwrap();
        let a = table.id_of(&canonicalize(&ccs("a.0"))).unwrap();
        let na = table.id_of(&canonicalize(&ccs("~a.0"))).unwrap();
        let zero = table.id_of(&canonicalize(&ccs("0"))).unwrap();
        assert!(!brute.same_block(a, na));
        assert!(!brute.same_block(a, zero));
        assert!(!brute.same_block(na, zero));
    }

    #[test]
    fn merges_states_no_experiment_separates() {
        let table = saturated(&["tau.0 + tau.0", "tau.0"], 2);
        let brute = brute_force_bisim(&table).unwrap();
        let l = table.id_of(&canonicalize(&ccs("tau.0 + tau.0"))).unwrap();
        let r = table.id_of(&canonicalize(&ccs("tau.0"))).unwrap();
        assert!(brute.same_block(l, r));
    }

    #[test]
    fn rejects_large_tables() {
        // A chain of seven internal steps closes to eight states.
        let table = saturated(&["tau.tau.tau.tau.tau.tau.tau.0"], 1);
        assert!(table.len() > BRUTE_FORCE_MAX_STATES);
        assert!(matches!(brute_force_bisim(&table), Err(EngineError::TooManyStates { .. })));
    }

    #[test]
    fn unsaturated_evidence_has_no_unique_answer() {
        // State 0 loops, state 2 is stuck, state 1 has no recorded
        // experiment at all. Putting 1 with 0 passes, putting 1 with 2
        // passes, and the two groupings are incomparable, so no coarsest
        // passing partition exists.
        use std::collections::{BTreeMap, BTreeSet};
        let table = DialgebraTable {
            calculus: Calculus::Ccs,
            states: vec![
                canonicalize(&ccs("0")),
                canonicalize(&ccs("tau.0")),
                canonicalize(&ccs("tau.tau.0")),
            ],
            unary: BTreeMap::from([
                (StateId(0), BTreeSet::from([StateId(0)])),
                (StateId(2), BTreeSet::new()),
            ]),
            binary: BTreeMap::new(),
            witnesses: BTreeSet::new(),
            unary_complete: false,
            binary_complete: false,
        };
        let result = brute_force_bisim(&table);
        assert_eq!(result, Err(EngineError::NoUniqueMaximum));
    }
}
