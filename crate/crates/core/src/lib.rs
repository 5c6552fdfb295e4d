//! Process terms for CCS and the pi-calculus with two interchangeable
//! semantics: classical labelled transitions and a reaction relation in
//! which a state is taken to a set of successor states either on its own
//! or jointly with a partner. The library canonicalizes terms modulo
//! structural congruence, explores finite state spaces under both
//! semantics, decides bisimilarity by partition refinement, and checks
//! that the two semantics induce the same equivalence.

pub mod bridge;
pub mod canon;
pub mod ccs;
pub mod corpus;
pub mod engine;
pub mod name;
pub mod parser;
pub mod pi;
pub mod pretty;
mod reaction;
pub mod subst;
pub mod term;

pub use bridge::{
    compare_semantics, delta_map, derived_coalgebra, derived_dialgebra, lambda_map, mu_map,
    ComparisonReport, DerivedDialgebra, ExperimentMismatch, LabelledResultSet, StepMismatch,
    StepSets,
};
pub use canon::{canonicalize, congruent, CanonicalTerm};
pub use ccs::{ccs_dialg_binary, ccs_dialg_unary, ccs_lts_step, CcsLabel};
pub use corpus::gen_corpus;
pub use engine::{
    barbed_bisimilar, bisimilar, brute_force_bisim, explore_dialgebra, explore_lts, quotient,
    refine_dialgebra, refine_lts, satisfies_back_and_forth, witness_terms, BarbedOutcome,
    BisimOutcome, ChallengerPolicy, DialgebraTable, EngineError, Experiment, ExploredSystem,
    LtsTable, Mode, NamePool, Partition, StateId, Verdict,
};
pub use name::{fresh_name, fresh_names, Name, NameSet};
pub use parser::parse_term;
pub use pi::{barbs, pi_dialg_binary, pi_dialg_unary, pi_early_step, Barb, PiLabel};
pub use pretty::pretty;
pub use subst::{refresh_bound, substitute};
pub use term::{Calculus, Node, Prefix, Term, TermError};
