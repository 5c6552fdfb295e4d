//! Canonical forms modulo structural congruence.
//!
//! The congruence is: alpha-conversion of `nu` and pi input binders, the
//! commutative monoid laws of `|` with unit `0`, reordering of summands,
//! `nu a. 0 = 0`, exchange of adjacent restrictions, and scope extrusion
//! `nu a. (P | Q) = (nu a. P) | Q` when `a` is not free in `Q`.
//!
//! A canonical term has an outermost spine of restrictions over a flattened
//! parallel composition of sums, no unit components, no binder unused in its
//! scope, and all bound names renumbered to `#0, #1, ...` in order of first
//! use. Components and summands are ordered by a name-erased structural
//! skeleton; groups the skeleton cannot separate are ordered by trying every
//! distinct arrangement and keeping the lexicographically least rendering.
//! Two terms are congruent exactly when their canonical renderings are
//! byte-equal.

use std::collections::BTreeMap;
use std::fmt;

use crate::name::{Name, NameSet};
use crate::pretty::pretty;
use crate::subst::refresh_bound;
use crate::term::{Calculus, Node, Prefix, Term, TermError};

/// Bound on how many candidate arrangements tie-breaking may enumerate.
/// Past it the skeleton-sorted order is kept as is; at the term sizes this
/// library targets the bound is never reached.
const ARRANGE_CAP: usize = 20_000;

/// A term in canonical form, identified by its rendering.
#[derive(Clone, Debug)]
pub struct CanonicalTerm {
    term: Term,
    rendering: String,
}

impl CanonicalTerm {
    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn rendering(&self) -> &str {
        &self.rendering
    }

    pub fn calculus(&self) -> Calculus {
        self.term.calculus()
    }

    pub fn free_names(&self) -> NameSet {
        self.term.free_names()
    }

    pub fn into_term(self) -> Term {
        self.term
    }
}

impl PartialEq for CanonicalTerm {
    fn eq(&self, other: &Self) -> bool {
        self.rendering == other.rendering
    }
}

impl Eq for CanonicalTerm {}

impl PartialOrd for CanonicalTerm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalTerm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rendering.cmp(&other.rendering)
    }
}

impl std::hash::Hash for CanonicalTerm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rendering.hash(state);
    }
}

impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rendering)
    }
}

/// Rewrites `t` to canonical form.
pub fn canonicalize(t: &Term) -> CanonicalTerm {
    let free = t.free_names();
    let refreshed = refresh_bound(t, &NameSet::new());
    let shaped = shape(&refreshed);
    let candidates = arrangements(&shaped, ARRANGE_CAP)
        .unwrap_or_else(|| vec![first_arrangement(&shaped)]);
    let (rendering, term) = candidates
        .into_iter()
        .map(|candidate| {
            let renamed = renumber(&candidate, &free);
            (pretty(&renamed), renamed)
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("at least one arrangement");
    CanonicalTerm { term, rendering }
}

/// Structural congruence: equality of canonical renderings.
pub fn congruent(a: &Term, b: &Term) -> Result<bool, TermError> {
    if a.calculus() != b.calculus() {
        return Err(TermError::CalculusMismatch { left: a.calculus(), right: b.calculus() });
    }
    Ok(canonicalize(a) == canonicalize(b))
}

// --- structural phase -------------------------------------------------------

/// Flattens parallel compositions, deletes unit components, pulls every
/// restriction that is not guarded by a prefix up to the nearest spine, and
/// drops binders unused in their scope. Binders must already be pairwise
/// distinct and distinct from all free names, so extrusion needs no renaming.
fn shape(t: &Term) -> Term {
    match t.node() {
        Node::Sum(summands) => {
            let summands =
                summands.iter().map(|(p, c)| (p.clone(), shape(c))).collect();
            Term::sum(t.calculus(), summands)
        }
        Node::Par(components) => {
            let mut spine = Vec::new();
            let mut flat = Vec::new();
            for component in components {
                let shaped = shape(component);
                collect(shaped, &mut spine, &mut flat);
            }
            assemble(t.calculus(), spine, flat)
        }
        Node::Nu(binder, body) => {
            let shaped = shape(body);
            let mut spine = vec![binder.clone()];
            let mut flat = Vec::new();
            collect(shaped, &mut spine, &mut flat);
            assemble(t.calculus(), spine, flat)
        }
    }
}

/// Splits a shaped term into its restriction spine and core components.
fn collect(shaped: Term, spine: &mut Vec<Name>, flat: &mut Vec<Term>) {
    let mut rest = shaped;
    loop {
        match rest.node() {
            Node::Nu(binder, body) => {
                spine.push(binder.clone());
                rest = (**body).clone();
            }
            Node::Par(components) => {
                flat.extend(components.iter().cloned());
                return;
            }
            Node::Sum(summands) if summands.is_empty() => return,
            Node::Sum(_) => {
                flat.push(rest);
                return;
            }
        }
    }
}

fn assemble(calculus: Calculus, spine: Vec<Name>, components: Vec<Term>) -> Term {
    let core = Term::par(calculus, components);
    let free = core.free_names();
    spine
        .into_iter()
        .filter(|binder| free.contains(binder))
        .rev()
        .fold(core, |acc, binder| Term::nu(binder, acc))
}

// --- ordering phase ---------------------------------------------------------

/// Structural key with bound (internal) names erased. Free user names are
/// kept: they are invariant under the congruence, so keeping them separates
/// more children without risking order instability.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Skel {
    Sum(Vec<(PfxSkel, Skel)>),
    Par(Vec<Skel>),
    Nu(usize, Box<Skel>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum PfxSkel {
    Tau,
    In(Option<Name>),
    Out(Option<Name>),
    PiIn(Option<Name>),
    PiOut(Option<Name>, Option<Name>),
}

fn erase(name: &Name) -> Option<Name> {
    if name.is_internal() {
        None
    } else {
        Some(name.clone())
    }
}

fn prefix_skel(prefix: &Prefix) -> PfxSkel {
    match prefix {
        Prefix::Tau => PfxSkel::Tau,
        Prefix::CcsIn(chan) => PfxSkel::In(erase(chan)),
        Prefix::CcsOut(chan) => PfxSkel::Out(erase(chan)),
        Prefix::PiIn { chan, .. } => PfxSkel::PiIn(erase(chan)),
        Prefix::PiOut { chan, datum } => PfxSkel::PiOut(erase(chan), erase(datum)),
    }
}

fn skel(t: &Term) -> Skel {
    match t.node() {
        Node::Sum(summands) => {
            let mut keys: Vec<(PfxSkel, Skel)> = summands
                .iter()
                .map(|(p, c)| (prefix_skel(p), skel(c)))
                .collect();
            keys.sort();
            Skel::Sum(keys)
        }
        Node::Par(components) => {
            let mut keys: Vec<Skel> = components.iter().map(skel).collect();
            keys.sort();
            Skel::Par(keys)
        }
        Node::Nu(_, _) => {
            let mut depth = 0;
            let mut rest = t;
            while let Node::Nu(_, body) = rest.node() {
                depth += 1;
                rest = body;
            }
            Skel::Nu(depth, Box::new(skel(rest)))
        }
    }
}

/// All child orderings compatible with the skeleton sort: children are sorted
/// by skeleton, and every distinct permutation of each equal-skeleton group is
/// tried. Returns `None` when more than `cap` whole-term candidates would
/// arise.
fn arrangements(t: &Term, cap: usize) -> Option<Vec<Term>> {
    let out = match t.node() {
        Node::Sum(summands) if summands.is_empty() => vec![t.clone()],
        Node::Sum(summands) => {
            let variants: Vec<Vec<Term>> = summands
                .iter()
                .map(|(_, cont)| arrangements(cont, cap))
                .collect::<Option<_>>()?;
            let keys: Vec<(PfxSkel, Skel)> = summands
                .iter()
                .map(|(p, c)| (prefix_skel(p), skel(c)))
                .collect();
            let equal = |i: usize, j: usize| summands[i] == summands[j];
            let orders = key_orders(&keys, &equal, cap)?;
            let mut out = Vec::new();
            for order in &orders {
                let lists: Vec<&Vec<Term>> =
                    order.iter().map(|&i| &variants[i]).collect();
                for combo in cartesian(&lists, cap.checked_sub(out.len())?)? {
                    let chosen = order
                        .iter()
                        .zip(combo)
                        .map(|(&i, cont)| (summands[i].0.clone(), cont))
                        .collect();
                    out.push(Term::sum(t.calculus(), chosen));
                }
            }
            out
        }
        Node::Par(components) => {
            let variants: Vec<Vec<Term>> = components
                .iter()
                .map(|c| arrangements(c, cap))
                .collect::<Option<_>>()?;
            let keys: Vec<Skel> = components.iter().map(skel).collect();
            let equal = |i: usize, j: usize| components[i] == components[j];
            let orders = key_orders(&keys, &equal, cap)?;
            let mut out = Vec::new();
            for order in &orders {
                let lists: Vec<&Vec<Term>> =
                    order.iter().map(|&i| &variants[i]).collect();
                for combo in cartesian(&lists, cap.checked_sub(out.len())?)? {
                    out.push(Term::par(t.calculus(), combo));
                }
            }
            out
        }
        Node::Nu(_, _) => {
            let (chain, core) = split_chain(t);
            arrangements(core, cap)?
                .into_iter()
                .map(|core| wrap_chain(&chain, core))
                .collect()
        }
    };
    if out.len() > cap {
        None
    } else {
        Some(out)
    }
}

/// Skeleton-sorted order with ties left in their given order. Fallback for
/// terms past `ARRANGE_CAP`.
fn first_arrangement(t: &Term) -> Term {
    match t.node() {
        Node::Sum(summands) => {
            let mut arranged: Vec<(Prefix, Term)> = summands
                .iter()
                .map(|(p, c)| (p.clone(), first_arrangement(c)))
                .collect();
            arranged.sort_by_cached_key(|(p, c)| (prefix_skel(p), skel(c)));
            Term::sum(t.calculus(), arranged)
        }
        Node::Par(components) => {
            let mut arranged: Vec<Term> =
                components.iter().map(first_arrangement).collect();
            arranged.sort_by_cached_key(skel);
            Term::par(t.calculus(), arranged)
        }
        Node::Nu(_, _) => {
            let (chain, core) = split_chain(t);
            wrap_chain(&chain, first_arrangement(core))
        }
    }
}

/// Splits a term into its outermost restriction spine and the parallel
/// components under it. On canonical terms the components are sums. The
/// inverse is [`wrap_spine`].
pub(crate) fn split_spine(t: &Term) -> (Vec<Name>, Vec<Term>) {
    let (chain, core) = split_chain(t);
    let components = match core.node() {
        Node::Par(components) => components.clone(),
        Node::Sum(summands) if summands.is_empty() => Vec::new(),
        Node::Sum(_) => vec![core.clone()],
        Node::Nu(_, _) => unreachable!("split_chain strips all leading restrictions"),
    };
    (chain, components)
}

pub(crate) fn wrap_spine(calculus: Calculus, spine: &[Name], components: Vec<Term>) -> Term {
    wrap_chain(spine, Term::par(calculus, components))
}

fn split_chain(t: &Term) -> (Vec<Name>, &Term) {
    let mut chain = Vec::new();
    let mut rest = t;
    while let Node::Nu(binder, body) = rest.node() {
        chain.push(binder.clone());
        rest = body;
    }
    (chain, rest)
}

fn wrap_chain(chain: &[Name], core: Term) -> Term {
    chain
        .iter()
        .rev()
        .fold(core, |acc, binder| Term::nu(binder.clone(), acc))
}

/// Index orders compatible with sorting by `keys`: ties (equal keys) are
/// permuted, except that members with equal terms are interchangeable and
/// contribute one arrangement.
fn key_orders<K: Ord>(
    keys: &[K],
    equal: &dyn Fn(usize, usize) -> bool,
    cap: usize,
) -> Option<Vec<Vec<usize>>> {
    let mut sorted: Vec<usize> = (0..keys.len()).collect();
    sorted.sort_by(|&i, &j| keys[i].cmp(&keys[j]).then(i.cmp(&j)));
    let mut group_perms: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && keys[sorted[start]] == keys[sorted[end]] {
            end += 1;
        }
        group_perms.push(distinct_permutations(&sorted[start..end], equal, cap)?);
        start = end;
    }
    let borrowed: Vec<&Vec<Vec<usize>>> = group_perms.iter().collect();
    let combos = cartesian(&borrowed, cap)?;
    Some(combos.into_iter().map(|groups| groups.concat()).collect())
}

/// Distinct permutations of `members`, treating `equal` members as
/// interchangeable.
fn distinct_permutations(
    members: &[usize],
    equal: &dyn Fn(usize, usize) -> bool,
    cap: usize,
) -> Option<Vec<Vec<usize>>> {
    // Group members into equality classes; each class keeps its input order.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &m in members {
        match classes.iter_mut().find(|class| equal(class[0], m)) {
            Some(class) => class.push(m),
            None => classes.push(vec![m]),
        }
    }
    let mut remaining: Vec<usize> = classes.iter().map(|c| c.len()).collect();
    let mut taken: Vec<usize> = vec![0; classes.len()];
    let mut prefix: Vec<usize> = Vec::with_capacity(members.len());
    let mut out = Vec::new();
    fn rec(
        classes: &[Vec<usize>],
        remaining: &mut [usize],
        taken: &mut [usize],
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        total: usize,
        cap: usize,
    ) -> bool {
        if prefix.len() == total {
            out.push(prefix.clone());
            return out.len() <= cap;
        }
        for class in 0..classes.len() {
            if remaining[class] == 0 {
                continue;
            }
            remaining[class] -= 1;
            prefix.push(classes[class][taken[class]]);
            taken[class] += 1;
            let ok = rec(classes, remaining, taken, prefix, out, total, cap);
            taken[class] -= 1;
            prefix.pop();
            remaining[class] += 1;
            if !ok {
                return false;
            }
        }
        true
    }
    if rec(&classes, &mut remaining, &mut taken, &mut prefix, &mut out, members.len(), cap) {
        Some(out)
    } else {
        None
    }
}

/// Cartesian product of `lists`, bounded by `cap` rows.
fn cartesian<T: Clone>(lists: &[&Vec<T>], cap: usize) -> Option<Vec<Vec<T>>> {
    let mut rows: Vec<Vec<T>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::new();
        for row in &rows {
            for item in list.iter() {
                if next.len() >= cap {
                    return None;
                }
                let mut extended = row.clone();
                extended.push(item.clone());
                next.push(extended);
            }
        }
        rows = next;
    }
    Some(rows)
}

// --- numbering phase --------------------------------------------------------

/// Renumbers bound names to `#0, #1, ...` by first use in rendering order and
/// sorts each restriction chain by its binders' new numbers. Indices already
/// taken by free `#k` names are skipped so rebinding can never collide.
fn renumber(t: &Term, free: &NameSet) -> Term {
    let mut order: Vec<Name> = Vec::new();
    scan(t, free, &mut order);
    let mut map: BTreeMap<Name, Name> = BTreeMap::new();
    let mut k = 0;
    for name in order {
        loop {
            let candidate = Name::internal(k);
            k += 1;
            if !free.contains(&candidate) {
                map.insert(name, candidate);
                break;
            }
        }
    }
    rename(t, &map)
}

/// Visits name uses in rendering order. Restriction binder sites are skipped
/// so a chain's order is decided by first use, not by itself; pi input binder
/// sites count, since they occupy a fixed spot in the text.
fn scan(t: &Term, free: &NameSet, order: &mut Vec<Name>) {
    let visit = |name: &Name, order: &mut Vec<Name>| {
        if name.is_internal() && !free.contains(name) && !order.contains(name) {
            order.push(name.clone());
        }
    };
    match t.node() {
        Node::Sum(summands) => {
            for (prefix, cont) in summands {
                match prefix {
                    Prefix::Tau => {}
                    Prefix::CcsIn(chan) | Prefix::CcsOut(chan) => visit(chan, order),
                    Prefix::PiIn { chan, binder } => {
                        visit(chan, order);
                        visit(binder, order);
                    }
                    Prefix::PiOut { chan, datum } => {
                        visit(chan, order);
                        visit(datum, order);
                    }
                }
                scan(cont, free, order);
            }
        }
        Node::Par(components) => {
            for component in components {
                scan(component, free, order);
            }
        }
        Node::Nu(_, body) => scan(body, free, order),
    }
}

fn rename(t: &Term, map: &BTreeMap<Name, Name>) -> Term {
    let swap = |name: &Name| map.get(name).cloned().unwrap_or_else(|| name.clone());
    match t.node() {
        Node::Sum(summands) => {
            let summands = summands
                .iter()
                .map(|(prefix, cont)| {
                    let prefix = match prefix {
                        Prefix::Tau => Prefix::Tau,
                        Prefix::CcsIn(chan) => Prefix::CcsIn(swap(chan)),
                        Prefix::CcsOut(chan) => Prefix::CcsOut(swap(chan)),
                        Prefix::PiIn { chan, binder } => {
                            Prefix::PiIn { chan: swap(chan), binder: swap(binder) }
                        }
                        Prefix::PiOut { chan, datum } => {
                            Prefix::PiOut { chan: swap(chan), datum: swap(datum) }
                        }
                    };
                    (prefix, rename(cont, map))
                })
                .collect();
            Term::sum(t.calculus(), summands)
        }
        Node::Par(components) => {
            let components = components.iter().map(|c| rename(c, map)).collect();
            Term::par(t.calculus(), components)
        }
        Node::Nu(_, _) => {
            let (chain, core) = split_chain(t);
            let mut chain: Vec<Name> = chain.iter().map(&swap).collect();
            chain.sort_by_key(|name| {
                name.internal_index().expect("renumbered binders are canonical")
            });
            wrap_chain(&chain, rename(core, map))
        }
    }
}
