//! Pi-calculus semantics: the early labelled transition system, the
//! reaction relation, and barbs.
//!
//! As on the CCS side, the transition system and the reactions are
//! implemented independently so that their agreement is a real check.
//! Reactions reuse the shared core with a matcher that passes the sent name
//! into the receiver's continuation; a restricted name sent to the partner
//! extrudes its scope because the sender's restriction spine ends up over
//! the joint result.

use std::collections::BTreeSet;
use std::fmt;

use crate::canon::{canonicalize, split_spine, CanonicalTerm};
use crate::name::{fresh_name, Name, NameSet};
use crate::reaction::{binary_reactions, unary_reactions};
use crate::subst::{binder_names, refresh_bound, substitute};
use crate::term::{Calculus, Node, Prefix, Term};

/// An early transition label.
///
/// `Out` sends a free name (`a<b>`), `In` receives a name (`a(b)`), and
/// `BoundOut` sends a restricted name out of its scope (`~a(#k)`); the
/// receiver of a bound output learns a fresh name. `In` labels only arise
/// for data drawn from the ambient pool: the observer can send the names it
/// knows. Internal communication is exact and does not consult the pool.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PiLabel {
    Tau,
    FreeOut { chan: Name, datum: Name },
    FreeIn { chan: Name, datum: Name },
    BoundOut { chan: Name, fresh: Name },
}

impl fmt::Display for PiLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiLabel::Tau => f.write_str("tau"),
            PiLabel::FreeOut { chan, datum } => write!(f, "{chan}<{datum}>"),
            PiLabel::FreeIn { chan, datum } => write!(f, "{chan}({datum})"),
            PiLabel::BoundOut { chan, fresh } => write!(f, "~{chan}({fresh})"),
        }
    }
}

/// An observable: the subject of an unguarded, unrestricted prefix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Barb {
    In(Name),
    Out(Name),
}

impl fmt::Display for Barb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Barb::In(a) => write!(f, "{a}"),
            Barb::Out(a) => write!(f, "~{a}"),
        }
    }
}

fn pi_match(lp: &Prefix, lc: &Term, rp: &Prefix, rc: &Term) -> Option<(Term, Term)> {
    match (lp, rp) {
        (Prefix::PiOut { chan: out, datum }, Prefix::PiIn { chan: inp, binder })
            if out == inp =>
        {
            Some((lc.clone(), substitute(rc, datum, binder)))
        }
        (Prefix::PiIn { chan: inp, binder }, Prefix::PiOut { chan: out, datum })
            if out == inp =>
        {
            Some((substitute(lc, datum, binder), rc.clone()))
        }
        _ => None,
    }
}

/// Successors of `t` reacting on its own: a `tau` prefix fires or two
/// parallel components communicate.
pub fn pi_dialg_unary(t: &Term) -> BTreeSet<CanonicalTerm> {
    assert_eq!(t.calculus(), Calculus::Pi, "pi_dialg_unary needs a pi term");
    unary_reactions(t, pi_match)
}

/// Successors of the pair `(x, y)` communicating with each other inside
/// `x | y`. A restricted name sent across extrudes its scope over the
/// result; a restricted channel stays private.
pub fn pi_dialg_binary(x: &Term, y: &Term) -> BTreeSet<CanonicalTerm> {
    assert_eq!(x.calculus(), Calculus::Pi, "pi_dialg_binary needs pi terms");
    assert_eq!(y.calculus(), Calculus::Pi, "pi_dialg_binary needs pi terms");
    binary_reactions(x, y, pi_match)
}

// Canonical-input variants used by the exploration engine, which holds its
// states in canonical form already.
pub(crate) fn pi_unary_canonical(t: &CanonicalTerm) -> BTreeSet<CanonicalTerm> {
    crate::reaction::unary_reactions_canonical(t, pi_match)
}

pub(crate) fn pi_binary_canonical(
    x: &CanonicalTerm,
    y: &CanonicalTerm,
) -> BTreeSet<CanonicalTerm> {
    crate::reaction::binary_reactions_canonical(x, y, pi_match)
}

/// All early transitions of `t`, with canonicalized targets. Input labels
/// instantiate the received name from `pool`; silent steps match senders
/// and receivers exactly, whatever the sent name is.
pub fn pi_early_step(t: &Term, pool: &[Name]) -> BTreeSet<(PiLabel, CanonicalTerm)> {
    assert_eq!(t.calculus(), Calculus::Pi, "pi_early_step needs a pi term");
    // Keep bound names clear of the pool so a pool name in a label can never
    // collide with a binder, then pick one provisional name for extrusions.
    let mut avoid: NameSet = pool.iter().cloned().collect();
    let w = refresh_bound(canonicalize(t).term(), &avoid);
    avoid.extend(w.free_names());
    let mut bound = Vec::new();
    binder_names(&w, &mut bound);
    avoid.extend(bound);
    let ext = fresh_name(&avoid);
    raw_steps(&w, pool, &ext)
        .into_iter()
        .map(|(label, target)| finalize(label, target, pool, &ext))
        .collect()
}

/// Canonicalizes a step. A bound output carries a name that exists only to
/// be fresh, so it is normalized to the least internal name not otherwise
/// known; without this, transitions of bisimilar states could disagree on
/// the spelling of the fresh name.
fn finalize(
    label: PiLabel,
    target: Term,
    pool: &[Name],
    ext: &Name,
) -> (PiLabel, CanonicalTerm) {
    let canonical = canonicalize(&target);
    match label {
        PiLabel::BoundOut { chan, .. } => {
            let mut reserved: NameSet = pool.iter().cloned().collect();
            reserved.extend(canonical.free_names());
            reserved.remove(ext);
            let fresh = fresh_name(&reserved);
            let renamed = if fresh == *ext {
                canonical
            } else {
                canonicalize(&substitute(canonical.term(), &fresh, ext))
            };
            (PiLabel::BoundOut { chan, fresh }, renamed)
        }
        _ => (label, canonical),
    }
}

fn raw_steps(t: &Term, pool: &[Name], ext: &Name) -> Vec<(PiLabel, Term)> {
    match t.node() {
        Node::Sum(summands) => {
            let mut out = Vec::new();
            for (prefix, cont) in summands {
                match prefix {
                    Prefix::Tau => out.push((PiLabel::Tau, cont.clone())),
                    Prefix::PiOut { chan, datum } => out.push((
                        PiLabel::FreeOut { chan: chan.clone(), datum: datum.clone() },
                        cont.clone(),
                    )),
                    Prefix::PiIn { chan, binder } => {
                        for datum in pool {
                            out.push((
                                PiLabel::FreeIn { chan: chan.clone(), datum: datum.clone() },
                                substitute(cont, datum, binder),
                            ));
                        }
                    }
                    Prefix::CcsIn(_) | Prefix::CcsOut(_) => {
                        unreachable!("CCS prefix in a pi term")
                    }
                }
            }
            out
        }
        Node::Par(components) => {
            let moves: Vec<Vec<(PiLabel, Term)>> =
                components.iter().map(|c| raw_steps(c, pool, ext)).collect();
            let in_context = |i: usize, target: &Term| {
                let mut next = components.clone();
                next[i] = target.clone();
                Term::par(Calculus::Pi, next)
            };
            let mut out = Vec::new();
            for (i, steps) in moves.iter().enumerate() {
                for (label, target) in steps {
                    out.push((label.clone(), in_context(i, target)));
                }
            }
            // Communication: sender in component i, receiver in component j.
            // Receivers are recomputed at the exact sent name, so internal
            // traffic is not limited to pool names. A bound output rewraps
            // the restriction around both parties: the name stays private,
            // its scope has just grown.
            for i in 0..components.len() {
                for (label, sent) in &moves[i] {
                    let (chan, datum, rebind) = match label {
                        PiLabel::FreeOut { chan, datum } => (chan, datum, false),
                        PiLabel::BoundOut { chan, fresh } => (chan, fresh, true),
                        _ => continue,
                    };
                    for (j, component) in components.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        for received in in_moves_at(component, chan, datum) {
                            let mut next = components.clone();
                            next[i] = sent.clone();
                            next[j] = received;
                            let body = Term::par(Calculus::Pi, next);
                            let target = if rebind {
                                Term::nu(datum.clone(), body)
                            } else {
                                body
                            };
                            out.push((PiLabel::Tau, target));
                        }
                    }
                }
            }
            out
        }
        Node::Nu(binder, body) => {
            let mut out = Vec::new();
            for (label, target) in raw_steps(body, pool, ext) {
                match &label {
                    PiLabel::Tau => {
                        out.push((label, Term::nu(binder.clone(), target)));
                    }
                    PiLabel::FreeOut { chan, datum } => {
                        if chan == binder {
                            continue;
                        }
                        if datum == binder {
                            // The restricted name escapes: open the scope.
                            out.push((
                                PiLabel::BoundOut { chan: chan.clone(), fresh: ext.clone() },
                                substitute(&target, ext, binder),
                            ));
                        } else {
                            out.push((label, Term::nu(binder.clone(), target)));
                        }
                    }
                    PiLabel::FreeIn { chan, datum } => {
                        if chan == binder || datum == binder {
                            continue;
                        }
                        out.push((label, Term::nu(binder.clone(), target)));
                    }
                    PiLabel::BoundOut { chan, .. } => {
                        if chan == binder {
                            continue;
                        }
                        out.push((label, Term::nu(binder.clone(), target)));
                    }
                }
            }
            out
        }
    }
}

/// Residuals of `t` after receiving exactly `datum` on `chan`.
fn in_moves_at(t: &Term, chan: &Name, datum: &Name) -> Vec<Term> {
    match t.node() {
        Node::Sum(summands) => summands
            .iter()
            .filter_map(|(prefix, cont)| match prefix {
                Prefix::PiIn { chan: c, binder } if c == chan => {
                    Some(substitute(cont, datum, binder))
                }
                _ => None,
            })
            .collect(),
        Node::Par(components) => {
            let mut out = Vec::new();
            for (i, component) in components.iter().enumerate() {
                for received in in_moves_at(component, chan, datum) {
                    let mut next = components.clone();
                    next[i] = received;
                    out.push(Term::par(Calculus::Pi, next));
                }
            }
            out
        }
        Node::Nu(binder, body) => {
            // Binders were freshened apart from every name a label can carry.
            debug_assert!(binder != chan && binder != datum);
            in_moves_at(body, chan, datum)
                .into_iter()
                .map(|received| Term::nu(binder.clone(), received))
                .collect()
        }
    }
}

/// The barbs of `t`: subjects of unguarded prefixes not hidden by a
/// restriction.
pub fn barbs(t: &Term) -> BTreeSet<Barb> {
    assert_eq!(t.calculus(), Calculus::Pi, "barbs need a pi term");
    let w = canonicalize(t).into_term();
    let (spine, components) = split_spine(&w);
    let hidden: NameSet = spine.into_iter().collect();
    let mut out = BTreeSet::new();
    for component in &components {
        let Node::Sum(summands) = component.node() else { continue };
        for (prefix, _) in summands {
            match prefix {
                Prefix::Tau => {}
                Prefix::CcsIn(chan) | Prefix::PiIn { chan, .. } => {
                    if !hidden.contains(chan) {
                        out.insert(Barb::In(chan.clone()));
                    }
                }
                Prefix::CcsOut(chan) | Prefix::PiOut { chan, .. } => {
                    if !hidden.contains(chan) {
                        out.insert(Barb::Out(chan.clone()));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;

    fn pi(text: &str) -> Term {
        parse_term(text, Calculus::Pi).expect("pi term")
    }

    fn names(list: &[&str]) -> Vec<Name> {
        list.iter().map(|n| Name::new(n).unwrap()).collect()
    }

    fn steps(text: &str, pool: &[&str]) -> Vec<(String, String)> {
        pi_early_step(&pi(text), &names(pool))
            .into_iter()
            .map(|(l, t)| (l.to_string(), t.rendering().to_string()))
            .collect()
    }

    fn unary(text: &str) -> Vec<String> {
        pi_dialg_unary(&pi(text)).into_iter().map(|t| t.rendering().to_string()).collect()
    }

    fn binary(left: &str, right: &str) -> Vec<String> {
        pi_dialg_binary(&pi(left), &pi(right))
            .into_iter()
            .map(|t| t.rendering().to_string())
            .collect()
    }

    #[test]
    fn output_and_input_prefixes_step() {
        assert_eq!(steps("a<b>.0", &["a"]), vec![("a<b>".into(), "0".into())]);
        assert_eq!(
            steps("a(y).y<c>.0", &["a", "b"]),
            vec![
                ("a(a)".into(), "a<c>.0".into()),
                ("a(b)".into(), "b<c>.0".into()),
            ]
        );
        assert_eq!(steps("tau.0", &["a"]), vec![("tau".into(), "0".into())]);
    }

    #[test]
    fn communication_uses_the_exact_sent_name_not_the_pool() {
        // `d` is not in the pool, yet the internal step must happen.
        let got = steps("a<d>.0 | a(y).y<c>.0", &["a"]);
        assert!(got.contains(&("tau".into(), "d<c>.0".into())), "{got:?}");
    }

    #[test]
    fn restriction_blocks_its_subject() {
        assert_eq!(steps("nu a. a<b>.0", &["b"]), vec![]);
        assert_eq!(steps("nu a. a(y).0", &["b"]), vec![]);
    }

    #[test]
    fn bound_output_opens_the_scope() {
        assert_eq!(steps("nu x. a<x>.0", &["a"]), vec![("~a(#0)".into(), "0".into())]);
        // The extruded name stays usable in the target.
        assert_eq!(
            steps("nu x. a<x>.x<b>.0", &["a", "b"]),
            vec![("~a(#0)".into(), "#0<b>.0".into())]
        );
    }

    #[test]
    fn bound_output_labels_agree_across_bisimilar_shapes() {
        // One term drags a dead restricted channel along; the fresh-name
        // label must not leak that difference.
        let plain = steps("nu x. a<x>.0", &["a", "b"]);
        let heavy = steps("nu z. nu x. a<x>.z<b>.0", &["a", "b"]);
        assert_eq!(plain[0].0, heavy[0].0);
        assert_eq!(plain[0].0, "~a(#0)");
    }

    #[test]
    fn scope_closes_again_after_an_extruding_communication() {
        let got = steps("(nu x. a<x>.x<b>.0) | a(y).y(z).0", &["a", "b"]);
        let silent: Vec<_> = got.iter().filter(|(l, _)| l == "tau").collect();
        assert_eq!(silent.len(), 1);
        assert_eq!(silent[0].1, "nu #0. #0(#1).0 | #0<b>.0");
    }

    #[test]
    fn reactions_pass_data() {
        assert_eq!(unary("a<d>.0 | a(y).y<c>.0"), vec!["d<c>.0"]);
        assert_eq!(unary("tau.a<b>.0 + c<d>.0"), vec!["a<b>.0"]);
        assert_eq!(binary("a<d>.0", "a(y).y<c>.0"), vec!["d<c>.0"]);
        assert_eq!(binary("a(y).y<c>.0", "a<d>.0"), vec!["d<c>.0"]);
        assert_eq!(binary("a<d>.0", "b(y).0"), Vec::<String>::new());
    }

    #[test]
    fn reactions_extrude_restricted_names() {
        // ((nu x) a<x>.P, a(y).Q) reacts to (nu x)(P | Q[x/y]).
        assert_eq!(
            binary("nu x. a<x>.x(w).0", "a(y).y<c>.0"),
            vec!["nu #0. #0(#1).0 | #0<c>.0"]
        );
        // The restricted channel itself stays private.
        assert_eq!(binary("nu x. x<b>.0", "x(y).0"), Vec::<String>::new());
    }

    #[test]
    fn silent_transitions_and_unary_reactions_coincide() {
        for text in [
            "a<d>.0 | a(y).y<c>.0",
            "tau.a<b>.0 + c<d>.0",
            "(nu x. a<x>.x<b>.0) | a(y).y(z).0",
            "nu a. (a<b>.0 | a(y).y<c>.0 | tau.0)",
            "a<b>.0 | c(y).0",
        ] {
            let term = pi(text);
            let silent: BTreeSet<CanonicalTerm> = pi_early_step(&term, &names(&["a", "b"]))
                .into_iter()
                .filter(|(l, _)| *l == PiLabel::Tau)
                .map(|(_, t)| t)
                .collect();
            assert_eq!(silent, pi_dialg_unary(&term), "mismatch for {text}");
        }
    }

    #[test]
    fn barbs_see_subjects_but_not_restricted_ones() {
        let read = |text: &str| -> Vec<String> {
            barbs(&pi(text)).into_iter().map(|b| b.to_string()).collect()
        };
        assert_eq!(read("a(y).0 + b<c>.0"), vec!["a", "~b"]);
        assert_eq!(read("nu x. (x<b>.0 | a<x>.0)"), vec!["~a"]);
        assert_eq!(read("nu x. x(y).0"), Vec::<String>::new());
        assert_eq!(read("tau.a<b>.0"), Vec::<String>::new());
    }

}
