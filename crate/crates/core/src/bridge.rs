//! The bridge between the two CCS semantics.
//!
//! Labelled transitions and reactions are interdefinable without touching
//! the states. Three maps carry one semantics to the other:
//!
//! * `lambda` sends a state to labelled experiments: the state alone under
//!   `tau`, and the state paired with a one-shot witness `~a.0` under `a`
//!   (resp. `a.0` under `~a`) for each pool channel.
//! * `mu` flattens labelled result sets to labelled successors.
//! * `delta` reads reactions off labelled steps: silent steps of one state,
//!   or parallel compositions of complementary-step successors of a pair.
//!
//! Composing them derives a transition system from a reaction table and a
//! reaction table from a transition system; [`compare_semantics`] checks
//! both derivations against the natively computed semantics,
//! experiment by experiment, over one explored state space. The two routes
//! share nothing but the term type, so agreement is evidence that the
//! semantics coincide, not an artifact of shared code.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::canon::{canonicalize, CanonicalTerm};
use crate::ccs::{ccs_lts_step, CcsLabel};
use crate::engine::{
    explore_dialgebra, ChallengerPolicy, DialgebraTable, EngineError, Experiment, LtsTable,
    NamePool, StateId,
};
use crate::term::{Calculus, Prefix, Term};

/// An element of the labelled result space: label/result-set pairs over an
/// explored fragment.
pub type LabelledResultSet = BTreeSet<(CcsLabel, BTreeSet<StateId>)>;

/// Labelled steps of one state or of an ordered pair, as consumed by
/// [`delta_map`].
#[derive(Clone, Copy, Debug)]
pub enum StepSets<'a> {
    Unary(&'a BTreeSet<(CcsLabel, StateId)>),
    Binary(&'a BTreeSet<(CcsLabel, StateId)>, &'a BTreeSet<(CcsLabel, StateId)>),
}

/// Labelled experiments observing a state: `(τ, x)` plus `(a, (x, ~a.0))`
/// and `(~a, (x, a.0))` for every pool channel `a`. The input label pairs
/// the state with the output witness and vice versa, since those are the
/// partners it can synchronize with.
///
/// Fails when a required witness is not interned in the table.
pub fn lambda_map(
    x: StateId,
    pool: &NamePool,
    table: &DialgebraTable,
) -> Result<BTreeSet<(CcsLabel, Experiment)>, EngineError> {
    let mut out = BTreeSet::new();
    out.insert((CcsLabel::Tau, Experiment::Unary(x)));
    for a in pool.names() {
        let sender = witness_id(table, Prefix::CcsOut(a.clone()))?;
        let receiver = witness_id(table, Prefix::CcsIn(a.clone()))?;
        out.insert((CcsLabel::In(a.clone()), Experiment::Binary(x, sender)));
        out.insert((CcsLabel::Out(a.clone()), Experiment::Binary(x, receiver)));
    }
    Ok(out)
}

fn witness_id(table: &DialgebraTable, prefix: Prefix) -> Result<StateId, EngineError> {
    let term = Term::prefixed(prefix, Term::empty(Calculus::Ccs));
    let canonical = canonicalize(&term);
    table
        .id_of(&canonical)
        .ok_or_else(|| EngineError::MissingWitness { term: canonical.rendering().to_string() })
}

/// Flattens labelled result sets to labelled successors:
/// `{(l, x) | (l, q') ∈ q, x ∈ q'}`.
pub fn mu_map(q: &LabelledResultSet) -> BTreeSet<(CcsLabel, StateId)> {
    q.iter()
        .flat_map(|(label, results)| results.iter().map(move |&x| (label.clone(), x)))
        .collect()
}

/// Reads reaction results off labelled steps. For one state: targets of its
/// silent steps. For a pair: canonicalized compositions `x' | y'` of
/// successors reached on complementary pool channels.
pub fn delta_map(
    e: StepSets<'_>,
    states: &[CanonicalTerm],
    pool: &NamePool,
) -> BTreeSet<CanonicalTerm> {
    match e {
        StepSets::Unary(steps) => steps
            .iter()
            .filter(|(label, _)| *label == CcsLabel::Tau)
            .map(|&(_, target)| states[target.0].clone())
            .collect(),
        StepSets::Binary(left, right) => {
            let mut out = BTreeSet::new();
            for (ll, lt) in left {
                let Some(channel) = ll.channel() else { continue };
                if !pool.names().contains(channel) {
                    continue;
                }
                let Some(complement) = ll.complement() else { continue };
                for (rl, rt) in right {
                    if *rl == complement {
                        let composed = Term::par(
                            Calculus::Ccs,
                            vec![states[lt.0].term().clone(), states[rt.0].term().clone()],
                        );
                        out.insert(canonicalize(&composed));
                    }
                }
            }
            out
        }
    }
}

/// Transition system derived from a reaction table explored with witnesses
/// over `pool`: steps of `x` are the flattened results of its labelled
/// experiments. States and ids are shared with the input table. States
/// whose experiments are not all recorded (possible only on
/// budget-cut tables) get no transition row.
pub fn derived_coalgebra(
    dialg: &DialgebraTable,
    pool: &NamePool,
) -> Result<LtsTable<CcsLabel>, EngineError> {
    let mut transitions = BTreeMap::new();
    for x in 0..dialg.len() {
        let x = StateId(x);
        let mut labelled: LabelledResultSet = BTreeSet::new();
        let mut recorded = true;
        for (label, experiment) in lambda_map(x, pool, dialg)? {
            match dialg.results(experiment) {
                Some(results) => {
                    labelled.insert((label, results.clone()));
                }
                None => {
                    recorded = false;
                    break;
                }
            }
        }
        if recorded {
            transitions.insert(x, mu_map(&labelled));
        }
    }
    Ok(LtsTable {
        calculus: Calculus::Ccs,
        states: dialg.states.clone(),
        transitions,
        complete: dialg.complete(),
    })
}

/// Which experiments [`derived_dialgebra`] records: unary rows for all
/// states and binary rows for the given pairs. Matching the pair set of a
/// native table makes the two directly comparable.
pub struct DerivedDialgebra {
    pub table: DialgebraTable,
    /// Reaction results that are not states of the input system; they are
    /// appended to the state list.
    pub minted: Vec<CanonicalTerm>,
}

/// Reaction table derived from a closed transition system: unary results
/// are silent-step targets, binary results compose complementary-step
/// successors over the pool. Compositions that are not already states are
/// interned behind the existing ids.
pub fn derived_dialgebra(
    lts: &LtsTable<CcsLabel>,
    pairs: &BTreeSet<(StateId, StateId)>,
    pool: &NamePool,
) -> DerivedDialgebra {
    let mut states = lts.states.clone();
    let mut index: BTreeMap<String, StateId> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.rendering().to_string(), StateId(i)))
        .collect();
    let mut minted = Vec::new();
    let empty = BTreeSet::new();
    let steps = |x: StateId| lts.transitions.get(&x).unwrap_or(&empty);

    let mut unary = BTreeMap::new();
    for x in 0..lts.len() {
        let x = StateId(x);
        if !lts.transitions.contains_key(&x) {
            continue;
        }
        let results = delta_map(StepSets::Unary(steps(x)), &states, pool);
        let ids = results
            .into_iter()
            .map(|t| index.get(t.rendering()).copied().expect("silent targets are states"))
            .collect();
        unary.insert(x, ids);
    }
    let mut binary = BTreeMap::new();
    for &(x, y) in pairs {
        if !lts.transitions.contains_key(&x) || !lts.transitions.contains_key(&y) {
            continue;
        }
        let results = delta_map(StepSets::Binary(steps(x), steps(y)), &states, pool);
        let mut ids = BTreeSet::new();
        for t in results {
            let id = match index.get(t.rendering()) {
                Some(&id) => id,
                None => {
                    let id = StateId(states.len());
                    index.insert(t.rendering().to_string(), id);
                    states.push(t.clone());
                    minted.push(t);
                    id
                }
            };
            ids.insert(id);
        }
        binary.insert((x, y), ids);
    }
    DerivedDialgebra {
        table: DialgebraTable {
            calculus: Calculus::Ccs,
            states,
            unary,
            binary,
            witnesses: BTreeSet::new(),
            unary_complete: lts.complete,
            binary_complete: lts.complete,
        },
        minted,
    }
}

/// One disagreement between a natively recorded experiment and the same
/// experiment derived from the other semantics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentMismatch {
    pub experiment: String,
    pub native: Vec<String>,
    pub derived: Vec<String>,
}

/// One state whose native labelled steps differ from the derived ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepMismatch {
    pub state: String,
    pub native: Vec<String>,
    pub derived: Vec<String>,
}

/// Outcome of checking both derivations against the native semantics.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub states: usize,
    pub experiments_checked: usize,
    pub lts_states_checked: usize,
    pub dialg_mismatches: Vec<ExperimentMismatch>,
    pub lts_mismatches: Vec<StepMismatch>,
    /// True when the exploration budget cut the table short; the lists then
    /// cover only the recorded fragment.
    pub inconclusive: bool,
}

impl ComparisonReport {
    /// Conclusive agreement in both directions.
    pub fn pass(&self) -> bool {
        !self.inconclusive && self.dialg_mismatches.is_empty() && self.lts_mismatches.is_empty()
    }
}

fn render_steps(steps: &BTreeSet<(CcsLabel, StateId)>, states: &[CanonicalTerm]) -> Vec<String> {
    steps.iter().map(|(l, t)| format!("{l} -> {}", states[t.0].rendering())).collect()
}

fn render_ids(ids: &BTreeSet<StateId>, states: &[CanonicalTerm]) -> Vec<String> {
    ids.iter().map(|&t| states[t.0].rendering().to_string()).collect()
}

/// Explores the reaction system of `p` with witnesses over `pool` (extended
/// by the term's free names and a standard fresh reserve) and checks, over
/// the shared state space:
///
/// 1. every recorded reaction experiment against the one derived from
///    native labelled steps, and
/// 2. every state's native labelled steps against the ones derived from the
///    recorded reactions.
///
/// Empty mismatch lists on a conclusive run mean the two semantics agree on
/// this system.
pub fn compare_semantics(
    p: &Term,
    pool: &NamePool,
    max_states: usize,
) -> Result<ComparisonReport, EngineError> {
    if p.calculus() != Calculus::Ccs {
        return Err(EngineError::WrongCalculus {
            mode: "compare".to_string(),
            expected: Calculus::Ccs,
        });
    }
    let pool = pool.with_extra(NamePool::suggested(&[p]).names().to_vec());
    let policy = ChallengerPolicy::WitnessSet { pool: pool.clone() };
    let dialg = explore_dialgebra(std::slice::from_ref(p), &policy, max_states)?;
    let inconclusive = !dialg.complete();

    // Native labelled steps of every state, resolved to shared ids. The
    // reaction table is closed under labelled steps by construction: a step
    // on `a` is a reaction with the witness `~a.0`, and a silent step is a
    // unary reaction. A target outside the table would itself be a
    // disagreement, surfaced as a mismatch below.
    let mut native_steps: Vec<BTreeSet<(CcsLabel, StateId)>> = Vec::with_capacity(dialg.len());
    let mut unresolved: Vec<StepMismatch> = Vec::new();
    for state in &dialg.states {
        let mut steps = BTreeSet::new();
        for (label, target) in ccs_lts_step(state.term()) {
            match dialg.id_of(&target) {
                Some(id) => {
                    steps.insert((label, id));
                }
                None => {
                    if !inconclusive {
                        unresolved.push(StepMismatch {
                            state: state.rendering().to_string(),
                            native: vec![format!("{label} -> {}", target.rendering())],
                            derived: vec!["target missing from the explored states".to_string()],
                        });
                    }
                }
            }
        }
        native_steps.push(steps);
    }

    // Direction one: reactions derived from labelled steps vs the recorded
    // table.
    let mut dialg_mismatches = Vec::new();
    let mut experiments_checked = 0;
    for (&x, native) in &dialg.unary {
        experiments_checked += 1;
        let derived: BTreeSet<StateId> = native_steps[x.0]
            .iter()
            .filter(|(l, _)| *l == CcsLabel::Tau)
            .map(|&(_, t)| t)
            .collect();
        if derived != *native {
            dialg_mismatches.push(ExperimentMismatch {
                experiment: format!("unary {}", dialg.states[x.0].rendering()),
                native: render_ids(native, &dialg.states),
                derived: render_ids(&derived, &dialg.states),
            });
        }
    }
    for (&(x, y), native) in &dialg.binary {
        experiments_checked += 1;
        let composed = delta_map(
            StepSets::Binary(&native_steps[x.0], &native_steps[y.0]),
            &dialg.states,
            &pool,
        );
        let mut derived = BTreeSet::new();
        let mut missing = Vec::new();
        for t in composed {
            match dialg.id_of(&t) {
                Some(id) => {
                    derived.insert(id);
                }
                None => missing.push(t.rendering().to_string()),
            }
        }
        if derived != *native || !missing.is_empty() {
            let mut derived_rendered = render_ids(&derived, &dialg.states);
            derived_rendered.extend(missing);
            dialg_mismatches.push(ExperimentMismatch {
                experiment: format!(
                    "binary ({}, {})",
                    dialg.states[x.0].rendering(),
                    dialg.states[y.0].rendering()
                ),
                native: render_ids(native, &dialg.states),
                derived: derived_rendered,
            });
        }
    }

    // Direction two: labelled steps derived from the reaction table vs the
    // native steps. A budget cut can leave even the witnesses unseeded, in
    // which case nothing can be derived and the flagged report stands on
    // direction one alone.
    let mut lts_mismatches = unresolved;
    let mut lts_states_checked = 0;
    match derived_coalgebra(&dialg, &pool) {
        Ok(derived_lts) => {
            for (&x, derived) in &derived_lts.transitions {
                lts_states_checked += 1;
                if *derived != native_steps[x.0] {
                    lts_mismatches.push(StepMismatch {
                        state: dialg.states[x.0].rendering().to_string(),
                        native: render_steps(&native_steps[x.0], &dialg.states),
                        derived: render_steps(derived, &dialg.states),
                    });
                }
            }
        }
        Err(EngineError::MissingWitness { .. }) if inconclusive => {}
        Err(other) => return Err(other),
    }

    Ok(ComparisonReport {
        states: dialg.len(),
        experiments_checked,
        lts_states_checked,
        dialg_mismatches,
        lts_mismatches,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Name;
    use crate::parser::parse_term;

    fn ccs(src: &str) -> Term {
        parse_term(src, Calculus::Ccs).unwrap()
    }

    fn pool(names: &[&str]) -> NamePool {
        NamePool::new(names.iter().map(|n| Name::new(n).unwrap()))
    }

    fn explored(sources: &[&str], pool: &NamePool) -> DialgebraTable {
        let terms: Vec<Term> = sources.iter().map(|s| ccs(s)).collect();
        let policy = ChallengerPolicy::WitnessSet { pool: pool.clone() };
        explore_dialgebra(&terms, &policy, 10_000).unwrap()
    }

    #[test]
    fn lambda_has_one_silent_and_two_experiments_per_channel() {
        let p = pool(&["a", "b"]);
        let table = explored(&["a.0"], &p);
        let x = table.id_of(&canonicalize(&ccs("a.0"))).unwrap();
        let lambda = lambda_map(x, &p, &table).unwrap();
        assert_eq!(lambda.len(), 2 * 2 + 1);
        assert!(lambda.contains(&(CcsLabel::Tau, Experiment::Unary(x))));
        let sender = table.id_of(&canonicalize(&ccs("~a.0"))).unwrap();
        assert!(lambda
            .contains(&(CcsLabel::In(Name::new("a").unwrap()), Experiment::Binary(x, sender))));
    }

    #[test]
    fn lambda_on_an_empty_pool_is_just_the_silent_experiment() {
        let p = pool(&[]);
        let table = explored(&["tau.0"], &pool(&["a"]));
        let x = table.id_of(&canonicalize(&ccs("tau.0"))).unwrap();
        let lambda = lambda_map(x, &p, &table).unwrap();
        assert_eq!(lambda, BTreeSet::from([(CcsLabel::Tau, Experiment::Unary(x))]));
    }

    #[test]
    fn lambda_without_witnesses_reports_which_is_missing() {
        let table = explored(&["a.0"], &pool(&["a"]));
        let err = lambda_map(StateId(0), &pool(&["a", "c"]), &table).unwrap_err();
        assert!(matches!(err, EngineError::MissingWitness { .. }));
    }

    #[test]
    fn mu_flattens_and_is_monotone() {
        let q: LabelledResultSet =
            BTreeSet::from([(CcsLabel::Tau, BTreeSet::from([StateId(1), StateId(2)]))]);
        assert_eq!(
            mu_map(&q),
            BTreeSet::from([(CcsLabel::Tau, StateId(1)), (CcsLabel::Tau, StateId(2))])
        );
        let empty_inner: LabelledResultSet =
            BTreeSet::from([(CcsLabel::In(Name::new("a").unwrap()), BTreeSet::new())]);
        assert!(mu_map(&empty_inner).is_empty());
        let mut bigger = q.clone();
        bigger.insert((CcsLabel::Out(Name::new("b").unwrap()), BTreeSet::from([StateId(0)])));
        assert!(mu_map(&q).is_subset(&mu_map(&bigger)));
    }

    #[test]
    fn delta_composes_exactly_the_complementary_pairs() {
        let p = pool(&["a"]);
        let table = explored(&["a.0", "~a.0"], &p);
        let steps = |src: &str| {
            let mut out = BTreeSet::new();
            for (l, t) in ccs_lts_step(&ccs(src)) {
                out.insert((l, table.id_of(&t).unwrap()));
            }
            out
        };
        let sender = steps("~a.0");
        let receiver = steps("a.0");
        let composed = delta_map(StepSets::Binary(&receiver, &sender), &table.states, &p);
        assert_eq!(composed, BTreeSet::from([canonicalize(&ccs("0"))]));
        // No silent steps anywhere: unary delta is empty.
        assert!(delta_map(StepSets::Unary(&receiver), &table.states, &p).is_empty());
    }

    #[test]
    fn derived_transitions_match_native_steps() {
        let p = pool(&["a", "b"]);
        let table = explored(&["a.b.0 + b.0", "~a.0 | b.0"], &p);
        let lts = derived_coalgebra(&table, &p).unwrap();
        for (x, state) in table.states.iter().enumerate() {
            let native: BTreeSet<(CcsLabel, StateId)> = ccs_lts_step(state.term())
                .into_iter()
                .map(|(l, t)| (l, table.id_of(&t).unwrap()))
                .collect();
            assert_eq!(lts.transitions[&StateId(x)], native, "state {}", state.rendering());
        }
    }

    #[test]
    fn derived_reactions_match_native_reactions() {
        let p = pool(&["a", "b"]);
        let table = explored(&["a.b.0 | ~a.0"], &p);
        // Native steps feed the derivation; pair set copied from the table.
        let mut lts_transitions = BTreeMap::new();
        for (x, state) in table.states.iter().enumerate() {
            let steps: BTreeSet<(CcsLabel, StateId)> = ccs_lts_step(state.term())
                .into_iter()
                .map(|(l, t)| (l, table.id_of(&t).unwrap()))
                .collect();
            lts_transitions.insert(StateId(x), steps);
        }
        let lts = LtsTable {
            calculus: Calculus::Ccs,
            states: table.states.clone(),
            transitions: lts_transitions,
            complete: true,
        };
        let pairs: BTreeSet<(StateId, StateId)> = table.binary.keys().copied().collect();
        let derived = derived_dialgebra(&lts, &pairs, &p);
        assert!(derived.minted.is_empty());
        assert_eq!(derived.table.unary, table.unary);
        assert_eq!(derived.table.binary, table.binary);
    }

    #[test]
    fn comparison_passes_on_a_synchronizing_pair() {
        let report = compare_semantics(&ccs("a.0 | ~a.0"), &pool(&["a"]), 10_000).unwrap();
        assert!(report.pass(), "{report:?}");
        assert!(report.experiments_checked > 0);
    }

    #[test]
    fn comparison_passes_trivially_on_the_empty_process() {
        let report = compare_semantics(&ccs("0"), &pool(&[]), 10_000).unwrap();
        assert!(report.pass());
    }

    #[test]
    fn comparison_is_inconclusive_when_the_budget_cuts() {
        let report = compare_semantics(&ccs("a.b.c.0"), &pool(&["a", "b", "c"]), 4).unwrap();
        assert!(report.inconclusive);
        assert!(!report.pass());
    }

    #[test]
    fn growing_the_pool_keeps_the_comparison_passing() {
        let term = ccs("a.(b.0 + tau.0)");
        for extra in [vec!["a", "b"], vec!["a", "b", "c"], vec!["a", "b", "c", "d"]] {
            let report = compare_semantics(&term, &pool(&extra), 10_000).unwrap();
            assert!(report.pass(), "pool {extra:?}");
        }
    }
}
