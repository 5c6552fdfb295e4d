//! Capture-avoiding substitution and binder refreshing.

use crate::name::{fresh_name, Name, NameSet};
use crate::term::{Node, Prefix, Term};

/// `t` with `datum` substituted for every free occurrence of `var`.
///
/// Binders that would capture `datum` are renamed first. Only pi terms ever
/// need substitution, but the operation is total on both calculi.
pub fn substitute(t: &Term, datum: &Name, var: &Name) -> Term {
    if datum == var {
        return t.clone();
    }
    match t.node() {
        Node::Sum(summands) => {
            let summands = summands
                .iter()
                .map(|(prefix, cont)| substitute_summand(prefix, cont, datum, var))
                .collect();
            Term::sum(t.calculus(), summands)
        }
        Node::Par(components) => {
            let components =
                components.iter().map(|c| substitute(c, datum, var)).collect();
            Term::par(t.calculus(), components)
        }
        Node::Nu(binder, body) => {
            if binder == var {
                return t.clone();
            }
            let (binder, body) = unshadow(binder, body, datum, var);
            Term::nu(binder, substitute(&body, datum, var))
        }
    }
}

fn substitute_summand(
    prefix: &Prefix,
    cont: &Term,
    datum: &Name,
    var: &Name,
) -> (Prefix, Term) {
    let swap = |name: &Name| if name == var { datum.clone() } else { name.clone() };
    match prefix {
        Prefix::Tau => (Prefix::Tau, substitute(cont, datum, var)),
        Prefix::CcsIn(chan) => (Prefix::CcsIn(swap(chan)), substitute(cont, datum, var)),
        Prefix::CcsOut(chan) => (Prefix::CcsOut(swap(chan)), substitute(cont, datum, var)),
        Prefix::PiOut { chan, datum: sent } => (
            Prefix::PiOut { chan: swap(chan), datum: swap(sent) },
            substitute(cont, datum, var),
        ),
        Prefix::PiIn { chan, binder } => {
            let chan = swap(chan);
            if binder == var {
                // The binder shadows `var`; only the channel is affected.
                return (Prefix::PiIn { chan, binder: binder.clone() }, cont.clone());
            }
            let (binder, cont) = unshadow(binder, cont, datum, var);
            (Prefix::PiIn { chan, binder }, substitute(&cont, datum, var))
        }
    }
}

/// Renames `binder` away when substituting under it would capture `datum`.
fn unshadow(binder: &Name, body: &Term, datum: &Name, var: &Name) -> (Name, Term) {
    let body_free = body.free_names();
    if binder != datum || !body_free.contains(var) {
        return (binder.clone(), body.clone());
    }
    let mut avoid = body_free;
    avoid.insert(datum.clone());
    avoid.insert(var.clone());
    let renamed = fresh_name(&avoid);
    let body = substitute(body, &renamed, binder);
    (renamed, body)
}

/// Renames every binder in `t` to a fresh internal name.
///
/// The result is structurally congruent to `t`; its binders are pairwise
/// distinct and avoid both `avoid` and the free names of `t`.
pub fn refresh_bound(t: &Term, avoid: &NameSet) -> Term {
    let mut used = avoid.clone();
    used.extend(t.free_names());
    let mut refresher = Refresher { used, next: 0 };
    refresher.walk(t, &mut Vec::new())
}

struct Refresher {
    used: NameSet,
    next: usize,
}

impl Refresher {
    fn allocate(&mut self) -> Name {
        loop {
            let candidate = Name::internal(self.next);
            self.next += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    fn resolve(&self, name: &Name, env: &[(Name, Name)]) -> Name {
        env.iter()
            .rev()
            .find(|(old, _)| old == name)
            .map_or_else(|| name.clone(), |(_, new)| new.clone())
    }

    fn walk(&mut self, t: &Term, env: &mut Vec<(Name, Name)>) -> Term {
        match t.node() {
            Node::Sum(summands) => {
                let summands = summands
                    .iter()
                    .map(|(prefix, cont)| self.walk_summand(prefix, cont, env))
                    .collect();
                Term::sum(t.calculus(), summands)
            }
            Node::Par(components) => {
                let components = components.iter().map(|c| self.walk(c, env)).collect();
                Term::par(t.calculus(), components)
            }
            Node::Nu(binder, body) => {
                let fresh = self.allocate();
                env.push((binder.clone(), fresh.clone()));
                let body = self.walk(body, env);
                env.pop();
                Term::nu(fresh, body)
            }
        }
    }

    fn walk_summand(
        &mut self,
        prefix: &Prefix,
        cont: &Term,
        env: &mut Vec<(Name, Name)>,
    ) -> (Prefix, Term) {
        match prefix {
            Prefix::Tau => (Prefix::Tau, self.walk(cont, env)),
            Prefix::CcsIn(chan) => {
                (Prefix::CcsIn(self.resolve(chan, env)), self.walk(cont, env))
            }
            Prefix::CcsOut(chan) => {
                (Prefix::CcsOut(self.resolve(chan, env)), self.walk(cont, env))
            }
            Prefix::PiOut { chan, datum } => (
                Prefix::PiOut {
                    chan: self.resolve(chan, env),
                    datum: self.resolve(datum, env),
                },
                self.walk(cont, env),
            ),
            Prefix::PiIn { chan, binder } => {
                let chan = self.resolve(chan, env);
                let fresh = self.allocate();
                env.push((binder.clone(), fresh.clone()));
                let cont = self.walk(cont, env);
                env.pop();
                (Prefix::PiIn { chan, binder: fresh }, cont)
            }
        }
    }
}

/// All binder names occurring in `t`, in traversal order.
pub(crate) fn binder_names(t: &Term, out: &mut Vec<Name>) {
    match t.node() {
        Node::Sum(summands) => {
            for (prefix, cont) in summands {
                if let Prefix::PiIn { binder, .. } = prefix {
                    out.push(binder.clone());
                }
                binder_names(cont, out);
            }
        }
        Node::Par(components) => {
            for component in components {
                binder_names(component, out);
            }
        }
        Node::Nu(binder, body) => {
            out.push(binder.clone());
            binder_names(body, out);
        }
    }
}
