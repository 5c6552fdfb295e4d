//! CCS semantics: the classical labelled transition system and the
//! reaction relation.
//!
//! The two are implemented independently on purpose. The transition system
//! below is plain structural operational semantics; the reactions go through
//! the shared core in [`crate::reaction`]. Tests and the comparison tooling
//! check that they agree where the theory says they must, which only means
//! something because neither is defined in terms of the other.

use std::collections::BTreeSet;
use std::fmt;

use crate::canon::{canonicalize, CanonicalTerm};
use crate::name::Name;
use crate::reaction::{binary_reactions, unary_reactions};
use crate::term::{Calculus, Node, Prefix, Term};

/// A CCS action: silent, input on a channel, or output on a channel.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CcsLabel {
    Tau,
    In(Name),
    Out(Name),
}

impl CcsLabel {
    /// The co-action this label synchronizes with, if any.
    pub fn complement(&self) -> Option<CcsLabel> {
        match self {
            CcsLabel::Tau => None,
            CcsLabel::In(a) => Some(CcsLabel::Out(a.clone())),
            CcsLabel::Out(a) => Some(CcsLabel::In(a.clone())),
        }
    }

    pub fn channel(&self) -> Option<&Name> {
        match self {
            CcsLabel::Tau => None,
            CcsLabel::In(a) | CcsLabel::Out(a) => Some(a),
        }
    }
}

impl fmt::Display for CcsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CcsLabel::Tau => f.write_str("tau"),
            CcsLabel::In(a) => write!(f, "{a}"),
            CcsLabel::Out(a) => write!(f, "~{a}"),
        }
    }
}

/// All labelled transitions of `t`, with canonicalized targets.
pub fn ccs_lts_step(t: &Term) -> BTreeSet<(CcsLabel, CanonicalTerm)> {
    assert_eq!(t.calculus(), Calculus::Ccs, "ccs_lts_step needs a CCS term");
    raw_steps(t)
        .into_iter()
        .map(|(label, target)| (label, canonicalize(&target)))
        .collect()
}

fn raw_steps(t: &Term) -> Vec<(CcsLabel, Term)> {
    match t.node() {
        Node::Sum(summands) => summands
            .iter()
            .map(|(prefix, cont)| {
                let label = match prefix {
                    Prefix::Tau => CcsLabel::Tau,
                    Prefix::CcsIn(a) => CcsLabel::In(a.clone()),
                    Prefix::CcsOut(a) => CcsLabel::Out(a.clone()),
                    Prefix::PiIn { .. } | Prefix::PiOut { .. } => {
                        unreachable!("pi prefix in a CCS term")
                    }
                };
                (label, cont.clone())
            })
            .collect(),
        Node::Par(components) => {
            let moves: Vec<Vec<(CcsLabel, Term)>> = components.iter().map(raw_steps).collect();
            let in_context = |i: usize, target: &Term| {
                let mut next = components.clone();
                next[i] = target.clone();
                Term::par(Calculus::Ccs, next)
            };
            let mut out = Vec::new();
            for (i, steps) in moves.iter().enumerate() {
                for (label, target) in steps {
                    out.push((label.clone(), in_context(i, target)));
                }
            }
            for i in 0..components.len() {
                for j in i + 1..components.len() {
                    for (li, ti) in &moves[i] {
                        for (lj, tj) in &moves[j] {
                            if li.complement().as_ref() == Some(lj) {
                                let mut next = components.clone();
                                next[i] = ti.clone();
                                next[j] = tj.clone();
                                out.push((CcsLabel::Tau, Term::par(Calculus::Ccs, next)));
                            }
                        }
                    }
                }
            }
            out
        }
        Node::Nu(binder, body) => raw_steps(body)
            .into_iter()
            .filter(|(label, _)| label.channel() != Some(binder))
            .map(|(label, target)| (label, Term::nu(binder.clone(), target)))
            .collect(),
    }
}

fn ccs_match(lp: &Prefix, lc: &Term, rp: &Prefix, rc: &Term) -> Option<(Term, Term)> {
    match (lp, rp) {
        (Prefix::CcsOut(a), Prefix::CcsIn(b)) | (Prefix::CcsIn(a), Prefix::CcsOut(b))
            if a == b =>
        {
            Some((lc.clone(), rc.clone()))
        }
        _ => None,
    }
}

/// Successors of `t` reacting on its own: a `tau` prefix fires or two
/// parallel components synchronize on a channel.
pub fn ccs_dialg_unary(t: &Term) -> BTreeSet<CanonicalTerm> {
    assert_eq!(t.calculus(), Calculus::Ccs, "ccs_dialg_unary needs a CCS term");
    unary_reactions(t, ccs_match)
}

/// Successors of the pair `(x, y)` synchronizing with each other inside
/// `x | y`. Restricted channels of either side stay private.
pub fn ccs_dialg_binary(x: &Term, y: &Term) -> BTreeSet<CanonicalTerm> {
    assert_eq!(x.calculus(), Calculus::Ccs, "ccs_dialg_binary needs CCS terms");
    assert_eq!(y.calculus(), Calculus::Ccs, "ccs_dialg_binary needs CCS terms");
    binary_reactions(x, y, ccs_match)
}

// Canonical-input variants used by the exploration engine, which holds its
// states in canonical form already.
pub(crate) fn ccs_unary_canonical(t: &CanonicalTerm) -> BTreeSet<CanonicalTerm> {
    crate::reaction::unary_reactions_canonical(t, ccs_match)
}

pub(crate) fn ccs_binary_canonical(
    x: &CanonicalTerm,
    y: &CanonicalTerm,
) -> BTreeSet<CanonicalTerm> {
    crate::reaction::binary_reactions_canonical(x, y, ccs_match)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;

    fn ccs(text: &str) -> Term {
        parse_term(text, Calculus::Ccs).expect("ccs term")
    }

    fn steps(text: &str) -> Vec<(String, String)> {
        ccs_lts_step(&ccs(text))
            .into_iter()
            .map(|(l, t)| (l.to_string(), t.rendering().to_string()))
            .collect()
    }

    fn unary(text: &str) -> Vec<String> {
        ccs_dialg_unary(&ccs(text))
            .into_iter()
            .map(|t| t.rendering().to_string())
            .collect()
    }

    fn binary(left: &str, right: &str) -> Vec<String> {
        ccs_dialg_binary(&ccs(left), &ccs(right))
            .into_iter()
            .map(|t| t.rendering().to_string())
            .collect()
    }

    #[test]
    fn prefixes_step_to_their_continuations() {
        assert_eq!(steps("a.0"), vec![("a".into(), "0".into())]);
        assert_eq!(steps("~a.b.0"), vec![("~a".into(), "b.0".into())]);
        assert_eq!(steps("tau.0"), vec![("tau".into(), "0".into())]);
        assert_eq!(steps("0"), vec![]);
    }

    #[test]
    fn choice_offers_every_summand() {
        let got = steps("a.0 + tau.b.0");
        assert_eq!(got, vec![("tau".into(), "b.0".into()), ("a".into(), "0".into())]);
    }

    #[test]
    fn parallel_interleaves_and_synchronizes() {
        let got = steps("a.0 | ~a.0");
        assert_eq!(
            got,
            vec![
                ("tau".into(), "0".into()),
                ("a".into(), "~a.0".into()),
                ("~a".into(), "a.0".into()),
            ]
        );
    }

    #[test]
    fn restriction_blocks_its_channel_but_not_tau() {
        assert_eq!(steps("nu a. a.0"), vec![]);
        assert_eq!(steps("nu a. (a.0 | ~a.0)"), vec![("tau".into(), "0".into())]);
        assert_eq!(steps("nu a. (a.0 | ~a.0 | b.0)").len(), 2);
    }

    #[test]
    fn transitions_are_invariant_under_congruence() {
        let direct = ccs_lts_step(&ccs("nu a. (a.b.0 | ~a.0) | c.0"));
        let shuffled = ccs_lts_step(&ccs("c.0 | nu x. (~x.0 | x.b.0)"));
        assert_eq!(direct, shuffled);
    }

    #[test]
    fn unary_reactions_fire_tau_and_internal_synchronization() {
        assert_eq!(unary("tau.a.0 + b.0"), vec!["a.0"]);
        assert_eq!(unary("a.0"), Vec::<String>::new());
        assert_eq!(unary("a.0 | ~a.0"), vec!["0"]);
        assert_eq!(unary("(a.0 + tau.b.0) | ~a.c.0"), vec!["b.0 | ~a.c.0", "c.0"]);
    }

    #[test]
    fn unary_reactions_match_silent_transitions() {
        for text in [
            "tau.a.0 + b.0",
            "a.0 | ~a.0",
            "nu a. (a.b.0 | ~a.0 | tau.c.0)",
            "(a.0 | ~a.0) | (b.0 | ~b.0)",
        ] {
            let term = ccs(text);
            let silent: BTreeSet<CanonicalTerm> = ccs_lts_step(&term)
                .into_iter()
                .filter(|(l, _)| *l == CcsLabel::Tau)
                .map(|(_, t)| t)
                .collect();
            assert_eq!(silent, ccs_dialg_unary(&term), "mismatch for {text}");
        }
    }

    #[test]
    fn binary_reactions_synchronize_across_the_pair() {
        assert_eq!(binary("~a.0", "a.0"), vec!["0"]);
        assert_eq!(binary("a.0", "~a.0"), vec!["0"]);
        assert_eq!(binary("~a.p.0 | c.0", "a.q.0"), vec!["c.0 | p.0 | q.0"]);
        assert_eq!(binary("~a.0 + b.0", "a.0 + c.0"), vec!["0"]);
        assert_eq!(binary("a.0", "b.0"), Vec::<String>::new());
    }

    #[test]
    fn restricted_channels_stay_private_across_the_pair() {
        // The left side's `a` is restricted: the right side cannot meet it.
        assert_eq!(binary("nu a. (~a.0 | c.0)", "a.b.0"), Vec::<String>::new());
        // A free channel next to a restricted one still synchronizes.
        assert_eq!(binary("nu a. (~a.0 | ~c.0)", "c.0"), vec!["nu #0. ~#0.0"]);
    }

    #[test]
    fn binary_reactions_are_symmetric() {
        let l = binary("~a.p.0 + tau.0", "a.q.0 | b.0");
        let r = binary("a.q.0 | b.0", "~a.p.0 + tau.0");
        assert_eq!(l, r);
    }
}
