//! Process terms.
//!
//! One AST serves both calculi; every term carries a calculus tag and its
//! prefixes must agree with that tag. The representation keeps three
//! structural invariants: `Par` never directly nests `Par` (flattened on
//! construction), `Par` holds at least two components, and the empty process
//! is the zero-ary `Sum`. Summand multiplicity is significant: `a.0 + a.0`
//! keeps two summands, and `P | P` keeps two components.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::name::{Name, NameSet};

/// Which calculus a term belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Calculus {
    Ccs,
    Pi,
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Calculus::Ccs => f.write_str("ccs"),
            Calculus::Pi => f.write_str("pi"),
        }
    }
}

/// An action prefix guarding a summand.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prefix {
    /// Internal action, shared by both calculi.
    Tau,
    /// CCS input `a`.
    CcsIn(Name),
    /// CCS output `~a`.
    CcsOut(Name),
    /// Pi input `chan(binder)`; `binder` binds in the continuation.
    PiIn { chan: Name, binder: Name },
    /// Pi output `chan<datum>`.
    PiOut { chan: Name, datum: Name },
}

impl Prefix {
    /// The calculus this prefix is specific to; `Tau` fits either.
    pub fn calculus(&self) -> Option<Calculus> {
        match self {
            Prefix::Tau => None,
            Prefix::CcsIn(_) | Prefix::CcsOut(_) => Some(Calculus::Ccs),
            Prefix::PiIn { .. } | Prefix::PiOut { .. } => Some(Calculus::Pi),
        }
    }
}

/// A process term. Immutable; all operations build new terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    calculus: Calculus,
    node: Node,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    /// Guarded choice. The empty sum is the empty process.
    Sum(Vec<(Prefix, Term)>),
    /// Parallel composition of two or more components, never nested.
    Par(Vec<Term>),
    /// Name restriction; the name binds in the body.
    Nu(Name, Box<Term>),
}

/// Errors from parsing and term-level operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("operands of '+' must be prefixed (at byte {pos})")]
    UnguardedSum { pos: usize },
    #[error("{found} syntax is not available in {expected} mode (at byte {pos})")]
    WrongCalculus { pos: usize, expected: Calculus, found: Calculus },
    #[error("invalid name {text:?}")]
    InvalidName { text: String },
    #[error("cannot relate a {left} term and a {right} term")]
    CalculusMismatch { left: Calculus, right: Calculus },
}

impl Term {
    /// The empty process of the given calculus.
    pub fn empty(calculus: Calculus) -> Term {
        Term { calculus, node: Node::Sum(Vec::new()) }
    }

    /// Guarded choice over the given summands.
    ///
    /// Panics if a prefix belongs to the other calculus or a continuation is
    /// tagged differently; terms of mixed calculi are construction bugs.
    pub fn sum(calculus: Calculus, summands: Vec<(Prefix, Term)>) -> Term {
        for (prefix, cont) in &summands {
            if let Some(c) = prefix.calculus() {
                assert_eq!(c, calculus, "prefix calculus must match the term");
            }
            assert_eq!(cont.calculus, calculus, "summand calculus must match the term");
        }
        Term { calculus, node: Node::Sum(summands) }
    }

    /// Single-summand sum `prefix.cont`.
    pub fn prefixed(prefix: Prefix, cont: Term) -> Term {
        let calculus = cont.calculus;
        Term::sum(calculus, vec![(prefix, cont)])
    }

    /// Parallel composition. Nested `Par` components are flattened in place;
    /// zero components yield the empty process and one component collapses to
    /// itself. Empty-process components are kept (dropping them is the
    /// canonicalizer's job, not the constructor's).
    pub fn par(calculus: Calculus, components: Vec<Term>) -> Term {
        let mut flat = Vec::with_capacity(components.len());
        for component in components {
            assert_eq!(component.calculus, calculus, "component calculus must match");
            match component.node {
                Node::Par(inner) => flat.extend(inner),
                _ => flat.push(component),
            }
        }
        match flat.len() {
            0 => Term::empty(calculus),
            1 => flat.pop().expect("single component"),
            _ => Term { calculus, node: Node::Par(flat) },
        }
    }

    /// Restriction `nu name. body`.
    pub fn nu(name: Name, body: Term) -> Term {
        let calculus = body.calculus;
        Term { calculus, node: Node::Nu(name, Box::new(body)) }
    }

    pub fn calculus(&self) -> Calculus {
        self.calculus
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    /// True for the empty process (the zero-ary sum).
    pub fn is_empty(&self) -> bool {
        matches!(&self.node, Node::Sum(s) if s.is_empty())
    }

    /// Free names, with `nu` and pi input binders removed in their scope.
    pub fn free_names(&self) -> NameSet {
        let mut out = NameSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut NameSet) {
        match &self.node {
            Node::Sum(summands) => {
                for (prefix, cont) in summands {
                    match prefix {
                        Prefix::Tau => cont.collect_free(bound, out),
                        Prefix::CcsIn(chan) | Prefix::CcsOut(chan) => {
                            record_free(chan, bound, out);
                            cont.collect_free(bound, out);
                        }
                        Prefix::PiIn { chan, binder } => {
                            record_free(chan, bound, out);
                            bound.push(binder.clone());
                            cont.collect_free(bound, out);
                            bound.pop();
                        }
                        Prefix::PiOut { chan, datum } => {
                            record_free(chan, bound, out);
                            record_free(datum, bound, out);
                            cont.collect_free(bound, out);
                        }
                    }
                }
            }
            Node::Par(components) => {
                for component in components {
                    component.collect_free(bound, out);
                }
            }
            Node::Nu(name, body) => {
                bound.push(name.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Number of prefixes in the term. Every reaction strictly decreases it,
    /// which is what makes reaction graphs of finite terms finite.
    pub fn prefix_count(&self) -> usize {
        match &self.node {
            Node::Sum(summands) => {
                summands.iter().map(|(_, cont)| 1 + cont.prefix_count()).sum()
            }
            Node::Par(components) => components.iter().map(Term::prefix_count).sum(),
            Node::Nu(_, body) => body.prefix_count(),
        }
    }

    /// Number of binding sites (`nu` binders plus pi input binders).
    pub fn binder_count(&self) -> usize {
        match &self.node {
            Node::Sum(summands) => summands
                .iter()
                .map(|(prefix, cont)| {
                    let own = usize::from(matches!(prefix, Prefix::PiIn { .. }));
                    own + cont.binder_count()
                })
                .sum(),
            Node::Par(components) => components.iter().map(Term::binder_count).sum(),
            Node::Nu(_, body) => 1 + body.binder_count(),
        }
    }
}

fn record_free(name: &Name, bound: &[Name], out: &mut NameSet) {
    if !bound.contains(name) {
        out.insert(name.clone());
    }
}
