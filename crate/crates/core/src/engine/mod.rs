//! Finite exploration and bisimilarity machinery.
//!
//! A system is explored into a table: states are canonical terms, and an
//! experiment is either one state reacting alone or an ordered pair reacting
//! jointly. Bisimilarity is the kernel of a homomorphism out of the system;
//! concretely, two states are bisimilar exactly when the coarsest partition
//! satisfying the back-and-forth condition puts them in one block, which
//! partition refinement computes and a brute-force enumeration cross-checks
//! at small sizes. A classical labelled-transition route is kept alongside
//! for comparison.

mod bisim;
mod brute;
mod explore;
mod refine;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::canon::CanonicalTerm;
use crate::name::{Name, NameSet};
use crate::term::{Calculus, Term};

pub use bisim::{barbed_bisimilar, bisimilar, BarbedOutcome, BisimOutcome, ExploredSystem, Mode};
pub use brute::brute_force_bisim;
pub use explore::{explore_dialgebra, explore_lts, witness_terms};
pub use refine::{quotient, refine_dialgebra, refine_lts, satisfies_back_and_forth};

/// Index into a table's state list. Dense and stable within one exploration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One experiment: a state reacting alone, or an ordered pair reacting
/// jointly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Unary(StateId),
    Binary(StateId, StateId),
}

/// Finite set of channel names standing in for the countable universe.
///
/// Adequate pools contain every free name of the system under study plus at
/// least one name fresh for it; [`NamePool::suggested`] also budgets one
/// fresh name per binder so no run can exhaust them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamePool {
    names: Vec<Name>,
}

impl NamePool {
    /// Sorted, deduplicated pool from arbitrary names.
    pub fn new(names: impl IntoIterator<Item = Name>) -> Self {
        let set: BTreeSet<Name> = names.into_iter().collect();
        NamePool { names: set.into_iter().collect() }
    }

    /// Default pool for a system: its free names, plus one fresh name for
    /// CCS, or one fresh name per binder plus two for the pi-calculus.
    pub fn suggested(terms: &[&Term]) -> Self {
        let mut names = NameSet::new();
        let mut binders = 0;
        let mut calculus = Calculus::Ccs;
        for t in terms {
            names.extend(t.free_names());
            binders += t.binder_count();
            calculus = t.calculus();
        }
        let fresh = match calculus {
            Calculus::Ccs => 1,
            Calculus::Pi => binders + 2,
        };
        for k in 0..fresh {
            names.insert(Name::pool_fresh(k));
        }
        NamePool::new(names)
    }

    /// This pool extended by further names.
    pub fn with_extra(&self, extra: impl IntoIterator<Item = Name>) -> Self {
        NamePool::new(self.names.iter().cloned().chain(extra))
    }

    pub fn names(&self) -> &[Name] {
        &self.names
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// How binary experiments are chosen. The full pairing of all states can
/// grow without bound (interaction copies bystanders), so a finite
/// challenger set is picked up front.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChallengerPolicy {
    /// Pair every state with a fixed set of small witness processes built
    /// from the pool: one sender and one receiver per channel for CCS; all
    /// pool-name senders plus datum-forwarding receivers for the
    /// pi-calculus. The witnesses expose exactly the labelled behavior.
    WitnessSet { pool: NamePool },
    /// Pair all current states with each other, repeated `rounds` times.
    BoundedClosure { rounds: usize },
}

impl ChallengerPolicy {
    pub fn witness_for(terms: &[&Term]) -> Self {
        ChallengerPolicy::WitnessSet { pool: NamePool::suggested(terms) }
    }

    /// Short config-style description, e.g. `witness` or `closure:2`.
    pub fn describe(&self) -> String {
        match self {
            ChallengerPolicy::WitnessSet { .. } => "witness".to_string(),
            ChallengerPolicy::BoundedClosure { rounds } => format!("closure:{rounds}"),
        }
    }
}

/// Explored fragment of a reaction system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DialgebraTable {
    pub calculus: Calculus,
    pub states: Vec<CanonicalTerm>,
    /// Results of each state reacting alone. Present for every state when
    /// `unary_complete`.
    pub unary: BTreeMap<StateId, BTreeSet<StateId>>,
    /// Results of recorded pairs. Both orders of a pair are recorded with
    /// the same result set.
    pub binary: BTreeMap<(StateId, StateId), BTreeSet<StateId>>,
    /// States that exist as policy witnesses.
    pub witnesses: BTreeSet<StateId>,
    /// False when the state budget cut the corresponding closure short.
    pub unary_complete: bool,
    pub binary_complete: bool,
}

impl DialgebraTable {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn complete(&self) -> bool {
        self.unary_complete && self.binary_complete
    }

    pub fn state(&self, id: StateId) -> &CanonicalTerm {
        &self.states[id.0]
    }

    pub fn id_of(&self, term: &CanonicalTerm) -> Option<StateId> {
        self.states.iter().position(|s| s == term).map(StateId)
    }

    pub fn results(&self, experiment: Experiment) -> Option<&BTreeSet<StateId>> {
        match experiment {
            Experiment::Unary(s) => self.unary.get(&s),
            Experiment::Binary(s, t) => self.binary.get(&(s, t)),
        }
    }

    /// All recorded experiments in ascending order.
    pub fn experiments(&self) -> impl Iterator<Item = Experiment> + '_ {
        self.unary
            .keys()
            .map(|&s| Experiment::Unary(s))
            .chain(self.binary.keys().map(|&(s, t)| Experiment::Binary(s, t)))
    }
}

/// Explored fragment of a labelled transition system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtsTable<L> {
    pub calculus: Calculus,
    pub states: Vec<CanonicalTerm>,
    pub transitions: BTreeMap<StateId, BTreeSet<(L, StateId)>>,
    pub complete: bool,
}

impl<L> LtsTable<L> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: StateId) -> &CanonicalTerm {
        &self.states[id.0]
    }
}

/// A partition of the state set into blocks. Block ids are dense; after
/// normalization blocks are ordered by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<BTreeSet<usize>>,
}

impl Partition {
    /// Everything in one block.
    pub fn single_block(n: usize) -> Self {
        let blocks = if n == 0 { Vec::new() } else { vec![(0..n).collect()] };
        Partition { block_of: vec![0; n], blocks }
    }

    /// Every state on its own.
    pub fn discrete(n: usize) -> Self {
        Partition { block_of: (0..n).collect(), blocks: (0..n).map(|i| BTreeSet::from([i])).collect() }
    }

    /// Partition from a block assignment, one entry per state.
    pub fn from_assignment(assignment: &[usize]) -> Self {
        let count = assignment.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![BTreeSet::new(); count];
        for (state, &block) in assignment.iter().enumerate() {
            blocks[block].insert(state);
        }
        debug_assert!(blocks.iter().all(|b| !b.is_empty()), "block ids must be dense");
        Partition { block_of: assignment.to_vec(), blocks }
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, state: StateId) -> usize {
        self.block_of[state.0]
    }

    pub fn blocks(&self) -> &[BTreeSet<usize>] {
        &self.blocks
    }

    pub fn same_block(&self, a: StateId, b: StateId) -> bool {
        self.block_of[a.0] == self.block_of[b.0]
    }

    /// Block ids hit by a set of states.
    pub fn image(&self, states: &BTreeSet<StateId>) -> BTreeSet<usize> {
        states.iter().map(|s| self.block_of[s.0]).collect()
    }

    /// True when every block of `finer` sits inside one block of `self`.
    pub fn coarsens(&self, finer: &Partition) -> bool {
        debug_assert_eq!(self.len(), finer.len());
        finer.blocks.iter().all(|block| {
            let mut targets = block.iter().map(|&m| self.block_of[m]);
            match targets.next() {
                None => true,
                Some(first) => targets.all(|b| b == first),
            }
        })
    }

    /// Renumbers blocks in ascending order of their smallest member.
    pub fn normalize(&mut self) {
        self.blocks.sort_by_key(|block| *block.first().expect("blocks are nonempty"));
        for (id, block) in self.blocks.iter().enumerate() {
            for &member in block {
                self.block_of[member] = id;
            }
        }
    }

    /// Splits every block by the given per-state key. States with no key
    /// stay with the block's smallest keyed member: an absent key is absence
    /// of evidence, not evidence of difference. Returns true when any block
    /// split.
    pub(crate) fn split_by<K: Ord>(&mut self, keys: &[Option<K>]) -> bool {
        debug_assert_eq!(keys.len(), self.block_of.len());
        let mut changed = false;
        let mut next: Vec<BTreeSet<usize>> = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let mut groups: BTreeMap<&K, BTreeSet<usize>> = BTreeMap::new();
            let mut unkeyed: BTreeSet<usize> = BTreeSet::new();
            for &member in block {
                match &keys[member] {
                    Some(key) => {
                        groups.entry(key).or_default().insert(member);
                    }
                    None => {
                        unkeyed.insert(member);
                    }
                }
            }
            if groups.len() <= 1 {
                next.push(block.clone());
                continue;
            }
            changed = true;
            let anchor = *block
                .iter()
                .find(|&&m| keys[m].is_some())
                .expect("at least two keyed groups exist");
            let mut parts: Vec<BTreeSet<usize>> = groups.into_values().collect();
            if !unkeyed.is_empty() {
                let host = parts
                    .iter_mut()
                    .find(|part| part.contains(&anchor))
                    .expect("anchor belongs to a keyed group");
                host.extend(unkeyed);
            }
            parts.sort_by_key(|part| *part.first().expect("groups are nonempty"));
            next.extend(parts);
        }
        if changed {
            self.blocks = next;
            for (id, block) in self.blocks.iter().enumerate() {
                for &member in block {
                    self.block_of[member] = id;
                }
            }
        }
        changed
    }
}

/// Three-valued answer: a budget cut means the tables can neither confirm
/// nor refute, so no boolean is guessed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bisimilar,
    NotBisimilar,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Verdict::Bisimilar => "bisimilar",
            Verdict::NotBisimilar => "not-bisimilar",
            Verdict::Unknown => "unknown",
        };
        f.write_str(text)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("no initial terms given")]
    EmptyInput,
    #[error("terms mix calculi: {left} vs {right}")]
    CalculusMismatch { left: Calculus, right: Calculus },
    #[error("mode {mode} expects a {expected} term")]
    WrongCalculus { mode: String, expected: Calculus },
    #[error("brute force handles at most {max} states, table has {actual}")]
    TooManyStates { max: usize, actual: usize },
    #[error("no unique coarsest relation satisfies the condition on this table")]
    NoUniqueMaximum,
    #[error("witness state {term} missing from the table")]
    MissingWitness { term: String },
}
