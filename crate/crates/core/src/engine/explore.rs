//! Breadth-first exploration of reaction systems and transition systems
//! into finite tables.
//!
//! States are interned by canonical rendering, so structurally congruent
//! terms share one state and the tables stay finite whenever the reachable
//! quotient is. A `max_states` budget guards the cases where it is not:
//! running out of budget aborts the remaining closure and leaves the
//! corresponding completeness flag false rather than failing.

use std::collections::{BTreeMap, BTreeSet};

use crate::canon::{canonicalize, CanonicalTerm};
use crate::ccs::{ccs_binary_canonical, ccs_unary_canonical};
use crate::name::Name;
use crate::pi::{pi_binary_canonical, pi_unary_canonical};
use crate::term::{Calculus, Prefix, Term};

use super::{ChallengerPolicy, DialgebraTable, EngineError, LtsTable, NamePool, StateId};

fn unary_of(calculus: Calculus, t: &CanonicalTerm) -> BTreeSet<CanonicalTerm> {
    match calculus {
        Calculus::Ccs => ccs_unary_canonical(t),
        Calculus::Pi => pi_unary_canonical(t),
    }
}

fn binary_of(calculus: Calculus, x: &CanonicalTerm, y: &CanonicalTerm) -> BTreeSet<CanonicalTerm> {
    match calculus {
        Calculus::Ccs => ccs_binary_canonical(x, y),
        Calculus::Pi => pi_binary_canonical(x, y),
    }
}

/// The standard witness processes over a pool.
///
/// For CCS, one sender `~a.0` and one receiver `a.0` per pool name: pairing
/// a state with them exposes exactly its labelled steps. For the
/// pi-calculus, a sender `a<b>.0` per pool pair exposes inputs, and a
/// forwarding receiver `a(y). y<y>.0` per pool name exposes outputs
/// including which name was sent, since the received name becomes the next
/// channel.
pub fn witness_terms(calculus: Calculus, pool: &NamePool) -> Vec<Term> {
    let mut out = Vec::new();
    match calculus {
        Calculus::Ccs => {
            for a in pool.names() {
                out.push(Term::prefixed(Prefix::CcsOut(a.clone()), Term::empty(calculus)));
                out.push(Term::prefixed(Prefix::CcsIn(a.clone()), Term::empty(calculus)));
            }
        }
        Calculus::Pi => {
            for a in pool.names() {
                for b in pool.names() {
                    out.push(Term::prefixed(
                        Prefix::PiOut { chan: a.clone(), datum: b.clone() },
                        Term::empty(calculus),
                    ));
                }
            }
            let y = Name::new("y").expect("fixed valid name");
            for a in pool.names() {
                let forward = Term::prefixed(
                    Prefix::PiOut { chan: y.clone(), datum: y.clone() },
                    Term::empty(calculus),
                );
                out.push(Term::prefixed(
                    Prefix::PiIn { chan: a.clone(), binder: y.clone() },
                    forward,
                ));
            }
        }
    }
    out
}

/// Interning state store shared by the exploration loops.
struct Store {
    states: Vec<CanonicalTerm>,
    index: BTreeMap<String, StateId>,
    budget: usize,
}

impl Store {
    fn new(budget: usize) -> Self {
        Store { states: Vec::new(), index: BTreeMap::new(), budget }
    }

    /// Id for a canonical term, interning it if new. `None` means the
    /// budget is spent.
    fn intern(&mut self, t: CanonicalTerm) -> Option<StateId> {
        if let Some(&id) = self.index.get(t.rendering()) {
            return Some(id);
        }
        if self.states.len() >= self.budget {
            return None;
        }
        let id = StateId(self.states.len());
        self.index.insert(t.rendering().to_string(), id);
        self.states.push(t);
        Some(id)
    }

    fn intern_all(&mut self, ts: BTreeSet<CanonicalTerm>) -> Option<BTreeSet<StateId>> {
        ts.into_iter().map(|t| self.intern(t)).collect()
    }
}

fn check_same_calculus(initials: &[Term]) -> Result<Calculus, EngineError> {
    let first = initials.first().ok_or(EngineError::EmptyInput)?;
    for t in initials {
        if t.calculus() != first.calculus() {
            return Err(EngineError::CalculusMismatch {
                left: first.calculus(),
                right: t.calculus(),
            });
        }
    }
    Ok(first.calculus())
}

/// Explores the reaction system generated by `initials` under `policy`.
///
/// All initial terms (and, for a witness policy, all witnesses) become
/// states up front; exploration then records experiments and interns their
/// results until closed under the policy or out of budget. Every state is
/// closed under unary reactions. A witness policy records both orders of
/// each state-witness pair; a bounded closure runs its rounds over all
/// ordered pairs present when the round starts, re-closing unary reactions
/// after each round. Result sets are insensitive to the pair order, so the
/// recorded table is symmetric by construction.
pub fn explore_dialgebra(
    initials: &[Term],
    policy: &ChallengerPolicy,
    max_states: usize,
) -> Result<DialgebraTable, EngineError> {
    let calculus = check_same_calculus(initials)?;
    let mut store = Store::new(max_states);
    let mut table = DialgebraTable {
        calculus,
        states: Vec::new(),
        unary: BTreeMap::new(),
        binary: BTreeMap::new(),
        witnesses: BTreeSet::new(),
        unary_complete: true,
        binary_complete: true,
    };

    let mut seeded = true;
    for t in initials {
        if store.intern(canonicalize(t)).is_none() {
            seeded = false;
        }
    }
    let mut witness_ids = Vec::new();
    if let ChallengerPolicy::WitnessSet { pool } = policy {
        for w in witness_terms(calculus, pool) {
            match store.intern(canonicalize(&w)) {
                Some(id) => witness_ids.push(id),
                None => seeded = false,
            }
        }
        table.witnesses = witness_ids.iter().copied().collect();
    }
    if !seeded {
        // Not even the mandatory states fit; nothing recorded is wrong, but
        // nothing is complete either.
        table.states = store.states;
        table.unary_complete = false;
        table.binary_complete = false;
        return Ok(table);
    }

    let exhausted = match policy {
        ChallengerPolicy::WitnessSet { .. } => {
            explore_with_witnesses(&mut store, &mut table, &witness_ids)
        }
        ChallengerPolicy::BoundedClosure { rounds } => {
            explore_bounded_closure(&mut store, &mut table, *rounds)
        }
    };
    if exhausted {
        table.unary_complete = false;
        table.binary_complete = false;
    }
    table.states = store.states;
    Ok(table)
}

/// Closes `table.unary` over all states currently in the store. Returns
/// true when the budget ran out.
fn close_unary(store: &mut Store, table: &mut DialgebraTable) -> bool {
    let mut cursor = 0;
    while cursor < store.states.len() {
        let id = StateId(cursor);
        cursor += 1;
        if table.unary.contains_key(&id) {
            continue;
        }
        let results = unary_of(table.calculus, &store.states[id.0]);
        match store.intern_all(results) {
            Some(ids) => {
                table.unary.insert(id, ids);
            }
            None => return true,
        }
    }
    false
}

/// Witness policy: walk the growing state list, recording each state's
/// unary experiment and its pair with every witness, both orders at once.
fn explore_with_witnesses(
    store: &mut Store,
    table: &mut DialgebraTable,
    witness_ids: &[StateId],
) -> bool {
    let mut cursor = 0;
    while cursor < store.states.len() {
        let id = StateId(cursor);
        cursor += 1;
        if !table.unary.contains_key(&id) {
            let results = unary_of(table.calculus, &store.states[id.0]);
            match store.intern_all(results) {
                Some(ids) => {
                    table.unary.insert(id, ids);
                }
                None => return true,
            }
        }
        for &w in witness_ids {
            if table.binary.contains_key(&(id, w)) {
                continue;
            }
            let results = binary_of(table.calculus, &store.states[id.0], &store.states[w.0]);
            match store.intern_all(results) {
                Some(ids) => {
                    table.binary.insert((id, w), ids.clone());
                    table.binary.insert((w, id), ids);
                }
                None => return true,
            }
        }
    }
    false
}

/// Bounded closure: close unary reactions, then for each round pair up all
/// states present at the round's start and close unary reactions again.
fn explore_bounded_closure(store: &mut Store, table: &mut DialgebraTable, rounds: usize) -> bool {
    if close_unary(store, table) {
        return true;
    }
    for _ in 0..rounds {
        let snapshot = store.states.len();
        for i in 0..snapshot {
            for j in i..snapshot {
                let (left, right) = (StateId(i), StateId(j));
                if table.binary.contains_key(&(left, right)) {
                    continue;
                }
                let results = binary_of(table.calculus, &store.states[i], &store.states[j]);
                match store.intern_all(results) {
                    Some(ids) => {
                        table.binary.insert((left, right), ids.clone());
                        table.binary.insert((right, left), ids);
                    }
                    None => return true,
                }
            }
        }
        if close_unary(store, table) {
            return true;
        }
    }
    false
}

/// Explores the transition system generated by `initials` under `step`.
pub fn explore_lts<L: Ord>(
    initials: &[Term],
    step: impl Fn(&Term) -> BTreeSet<(L, CanonicalTerm)>,
    max_states: usize,
) -> Result<LtsTable<L>, EngineError> {
    let calculus = check_same_calculus(initials)?;
    let mut store = Store::new(max_states);
    let mut complete = true;
    for t in initials {
        if store.intern(canonicalize(t)).is_none() {
            complete = false;
        }
    }
    let mut transitions = BTreeMap::new();
    let mut cursor = 0;
    while complete && cursor < store.states.len() {
        let id = StateId(cursor);
        cursor += 1;
        let mut moves = BTreeSet::new();
        for (label, target) in step(store.states[id.0].term()) {
            match store.intern(target) {
                Some(t) => {
                    moves.insert((label, t));
                }
                None => {
                    complete = false;
                    moves.clear();
                    break;
                }
            }
        }
        if complete {
            transitions.insert(id, moves);
        }
    }
    Ok(LtsTable { calculus, states: store.states, transitions, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccs::CcsLabel;
    use crate::ccs::ccs_lts_step;
    use crate::parser::parse_term;

    fn ccs(src: &str) -> Term {
        parse_term(src, Calculus::Ccs).unwrap()
    }

    fn pool(names: &[&str]) -> NamePool {
        NamePool::new(names.iter().map(|n| Name::new(n).unwrap()))
    }

    #[test]
    fn witness_exploration_reaches_all_labelled_residuals() {
        let p = ccs("a.b.0");
        let policy = ChallengerPolicy::WitnessSet { pool: pool(&["a", "b"]) };
        let table = explore_dialgebra(&[p], &policy, 1000).unwrap();
        assert!(table.complete());
        // Initial, 4 witnesses, b.0, 0 after both steps.
        let renderings: Vec<&str> = table.states.iter().map(|s| s.rendering()).collect();
        assert!(renderings.contains(&"a.b.0"));
        assert!(renderings.contains(&"b.0"));
        assert!(renderings.contains(&"0"));
        assert_eq!(table.witnesses.len(), 4);
        // Every state has its unary row and both orders of each witness pair.
        for i in 0..table.len() {
            assert!(table.unary.contains_key(&StateId(i)));
            for &w in &table.witnesses {
                assert!(table.binary.contains_key(&(StateId(i), w)));
                assert!(table.binary.contains_key(&(w, StateId(i))));
            }
        }
    }

    #[test]
    fn recorded_pairs_are_symmetric() {
        let p = ccs("a.0 | ~a.b.0");
        let policy = ChallengerPolicy::WitnessSet { pool: pool(&["a", "b"]) };
        let table = explore_dialgebra(&[p], &policy, 1000).unwrap();
        for (&(i, j), results) in &table.binary {
            assert_eq!(table.binary.get(&(j, i)), Some(results));
        }
    }

    #[test]
    fn bounded_closure_pairs_all_states_each_round() {
        let p = ccs("a.0");
        let q = ccs("~a.0");
        let policy = ChallengerPolicy::BoundedClosure { rounds: 1 };
        let table = explore_dialgebra(&[p, q], &policy, 1000).unwrap();
        assert!(table.complete());
        let a = table.id_of(&canonicalize(&ccs("a.0"))).unwrap();
        let na = table.id_of(&canonicalize(&ccs("~a.0"))).unwrap();
        let zero = table.id_of(&canonicalize(&ccs("0"))).unwrap();
        assert_eq!(table.binary[&(a, na)], BTreeSet::from([zero]));
        assert_eq!(table.binary[&(na, a)], BTreeSet::from([zero]));
        assert!(table.binary[&(a, a)].is_empty());
    }

    #[test]
    fn budget_cut_leaves_honest_flags() {
        // Unary closure alone needs 3 states (tau.tau.0, tau.0, 0); allow 2.
        let p = ccs("tau.tau.0");
        let policy = ChallengerPolicy::BoundedClosure { rounds: 1 };
        let table = explore_dialgebra(&[p], &policy, 2).unwrap();
        assert!(!table.unary_complete);
        assert!(!table.binary_complete);
        assert!(table.len() <= 2);
        // Recorded results still point at real states.
        for results in table.unary.values().chain(table.binary.values()) {
            for &StateId(s) in results {
                assert!(s < table.len());
            }
        }
    }

    #[test]
    fn lts_exploration_walks_the_reachable_graph() {
        let p = ccs("a.0 | ~a.0");
        let table = explore_lts(&[p], ccs_lts_step, 1000).unwrap();
        assert!(table.complete);
        // Reachable: the pair, a.0, ~a.0, 0. Every state has a row.
        assert_eq!(table.len(), 4);
        assert_eq!(table.transitions.len(), 4);
        let tau_targets: Vec<_> = table.transitions[&StateId(0)]
            .iter()
            .filter(|(l, _)| *l == CcsLabel::Tau)
            .collect();
        assert_eq!(tau_targets.len(), 1);
    }

    #[test]
    fn mixed_calculi_are_rejected() {
        let p = ccs("a.0");
        let q = parse_term("a<b>.0", Calculus::Pi).unwrap();
        let err = explore_dialgebra(&[p, q], &ChallengerPolicy::BoundedClosure { rounds: 1 }, 10)
            .unwrap_err();
        assert!(matches!(err, EngineError::CalculusMismatch { .. }));
    }
}
