//! Shared core of the reaction semantics.
//!
//! Both calculi have the same reaction shape and differ only in how a pair
//! of complementary prefixes synchronizes, so the machinery lives here and
//! each calculus supplies a [`Matcher`]. Reactions are computed on canonical
//! forms: closure under structural congruence then comes for free, and the
//! restriction spine at the top makes scoping rules trivial to apply.
//!
//! A unary reaction takes one state to a successor: an internal `tau` prefix
//! fires, or two parallel components synchronize. A binary reaction takes a
//! pair of states to a successor of their parallel composition in which one
//! component of each side synchronizes with the other; the two sides keep
//! their restrictions (freshened apart first), which is what makes a
//! restricted channel private and lets a sent restricted name extrude its
//! scope.

use std::collections::BTreeSet;

use crate::canon::{canonicalize, split_spine, wrap_spine, CanonicalTerm};
use crate::name::NameSet;
use crate::subst::{binder_names, refresh_bound};
use crate::term::{Node, Prefix, Term};

/// Decides whether two prefixed summands, one from each component,
/// synchronize, and if so returns their residuals in the same order.
pub(crate) type Matcher = fn(&Prefix, &Term, &Prefix, &Term) -> Option<(Term, Term)>;

/// Successors of `t` on its own.
pub(crate) fn unary_reactions(t: &Term, matcher: Matcher) -> BTreeSet<CanonicalTerm> {
    unary_reactions_canonical(&canonicalize(t), matcher)
}

/// [`unary_reactions`] for a term that is already canonical.
pub(crate) fn unary_reactions_canonical(
    t: &CanonicalTerm,
    matcher: Matcher,
) -> BTreeSet<CanonicalTerm> {
    let w = t.term();
    let calculus = w.calculus();
    let (spine, components) = split_spine(w);
    let mut out = BTreeSet::new();
    for (i, component) in components.iter().enumerate() {
        let Node::Sum(summands) = component.node() else { continue };
        for (prefix, cont) in summands {
            if *prefix == Prefix::Tau {
                let mut next = components.clone();
                next[i] = cont.clone();
                out.insert(canonicalize(&wrap_spine(calculus, &spine, next)));
            }
        }
    }
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            let (Node::Sum(left), Node::Sum(right)) =
                (components[i].node(), components[j].node())
            else {
                continue;
            };
            for (lp, lc) in left {
                for (rp, rc) in right {
                    if let Some((li, ri)) = matcher(lp, lc, rp, rc) {
                        let mut next = components.clone();
                        next[i] = li;
                        next[j] = ri;
                        out.insert(canonicalize(&wrap_spine(calculus, &spine, next)));
                    }
                }
            }
        }
    }
    out
}

/// Successors of the pair `(x, y)` acting jointly.
pub(crate) fn binary_reactions(x: &Term, y: &Term, matcher: Matcher) -> BTreeSet<CanonicalTerm> {
    binary_reactions_canonical(&canonicalize(x), &canonicalize(y), matcher)
}

/// [`binary_reactions`] for terms that are already canonical.
pub(crate) fn binary_reactions_canonical(
    x: &CanonicalTerm,
    y: &CanonicalTerm,
    matcher: Matcher,
) -> BTreeSet<CanonicalTerm> {
    let cx = x.term();
    let cy = y.term();
    let calculus = cx.calculus();
    debug_assert_eq!(calculus, cy.calculus());
    // Freshen the two sides apart: afterwards no bound name of one side
    // occurs in the other, so concatenating the two restriction spines over
    // the joint components is scope-correct, and a restricted channel can
    // never match a prefix of the partner.
    let mut avoid: NameSet = cx.free_names();
    avoid.extend(cy.free_names());
    let wx = refresh_bound(cx, &avoid);
    let mut bound = Vec::new();
    binder_names(&wx, &mut bound);
    avoid.extend(bound);
    let wy = refresh_bound(cy, &avoid);

    let (spine_x, comps_x) = split_spine(&wx);
    let (spine_y, comps_y) = split_spine(&wy);
    let mut spine = spine_x;
    spine.extend(spine_y);

    let mut out = BTreeSet::new();
    for (i, cx) in comps_x.iter().enumerate() {
        let Node::Sum(left) = cx.node() else { continue };
        for (j, cy) in comps_y.iter().enumerate() {
            let Node::Sum(right) = cy.node() else { continue };
            for (lp, lc) in left {
                for (rp, rc) in right {
                    if let Some((li, rj)) = matcher(lp, lc, rp, rc) {
                        let mut next = comps_x.clone();
                        next[i] = li;
                        for (k, c) in comps_y.iter().enumerate() {
                            next.push(if k == j { rj.clone() } else { c.clone() });
                        }
                        out.insert(canonicalize(&wrap_spine(calculus, &spine, next)));
                    }
                }
            }
        }
    }
    out
}
