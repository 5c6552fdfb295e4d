//! Seeded random term generation.
//!
//! Corpora drive the semantic agreement checks, so generation is fully
//! deterministic: one seed, one term list. Size is measured in prefixes;
//! every channel and datum is drawn from the ambient pool plus enclosing
//! binders, so free names of a generated term always lie in the pool and
//! restricted names get a chance to be sent (scope extrusion) in the
//! pi-calculus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::name::Name;
use crate::term::{Calculus, Prefix, Term};

/// Bound-name candidates. Shadowing is allowed; substitution is
/// capture-avoiding and canonicalization renames binders anyway.
const BINDERS: [&str; 4] = ["x", "y", "z", "w"];

/// Generates `count` terms, each with between 1 and `size_bound` prefixes.
pub fn gen_corpus(
    calculus: Calculus,
    seed: u64,
    count: usize,
    size_bound: usize,
    pool: &[Name],
) -> Vec<Term> {
    let size_bound = size_bound.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scope: Vec<Name> = pool.to_vec();
    (0..count)
        .map(|_| {
            let budget = rng.gen_range(1..=size_bound);
            gen_process(&mut rng, calculus, budget, &scope)
        })
        .collect()
}

fn gen_process(rng: &mut ChaCha8Rng, calculus: Calculus, budget: usize, scope: &[Name]) -> Term {
    if budget == 0 {
        return Term::empty(calculus);
    }
    let roll: f64 = rng.gen();
    if budget >= 2 && roll < 0.25 {
        // Parallel composition: split the budget, both halves nonempty.
        let left = rng.gen_range(1..budget);
        let right = budget - left;
        let components = vec![
            gen_process(rng, calculus, left, scope),
            gen_process(rng, calculus, right, scope),
        ];
        Term::par(calculus, components)
    } else if budget >= 2 && roll < 0.40 {
        // Restriction: the binder joins the scope so the body can use it,
        // and in the pi-calculus send it.
        let binder = Name::new(BINDERS[rng.gen_range(0..BINDERS.len())])
            .expect("binder candidates are valid names");
        let mut inner = scope.to_vec();
        if !inner.contains(&binder) {
            inner.push(binder.clone());
        }
        Term::nu(binder, gen_process(rng, calculus, budget - 1, &inner))
    } else {
        let max_summands = budget.min(3);
        let count = rng.gen_range(1..=max_summands);
        let mut summands = Vec::with_capacity(count);
        let mut remaining = budget;
        for i in 0..count {
            let reserve = count - i - 1;
            let share = if i + 1 == count {
                remaining
            } else {
                rng.gen_range(1..=remaining - reserve)
            };
            remaining -= share;
            summands.push(gen_summand(rng, calculus, share, scope));
        }
        Term::sum(calculus, summands)
    }
}

/// One summand: a prefix (cost 1) and its continuation.
fn gen_summand(
    rng: &mut ChaCha8Rng,
    calculus: Calculus,
    budget: usize,
    scope: &[Name],
) -> (Prefix, Term) {
    debug_assert!(budget >= 1);
    let pick = |rng: &mut ChaCha8Rng, from: &[Name]| from[rng.gen_range(0..from.len())].clone();
    let roll = if scope.is_empty() { 0 } else { rng.gen_range(0..5) };
    match calculus {
        Calculus::Ccs => {
            let prefix = match roll {
                0 => Prefix::Tau,
                1 | 2 => Prefix::CcsIn(pick(rng, scope)),
                _ => Prefix::CcsOut(pick(rng, scope)),
            };
            (prefix, gen_process(rng, calculus, budget - 1, scope))
        }
        Calculus::Pi => match roll {
            0 => (Prefix::Tau, gen_process(rng, calculus, budget - 1, scope)),
            1 | 2 => {
                let binder = Name::new(BINDERS[rng.gen_range(0..BINDERS.len())])
                    .expect("binder candidates are valid names");
                let mut inner = scope.to_vec();
                if !inner.contains(&binder) {
                    inner.push(binder.clone());
                }
                let cont = gen_process(rng, calculus, budget - 1, &inner);
                (Prefix::PiIn { chan: pick(rng, scope), binder }, cont)
            }
            _ => {
                let prefix = Prefix::PiOut { chan: pick(rng, scope), datum: pick(rng, scope) };
                (prefix, gen_process(rng, calculus, budget - 1, scope))
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;
    use crate::pretty::pretty;

    fn pool() -> Vec<Name> {
        ["a", "b", "c"].iter().map(|n| Name::new(n).unwrap()).collect()
    }

    #[test]
    fn generation_is_deterministic() {
        let first = gen_corpus(Calculus::Pi, 7, 50, 5, &pool());
        let second = gen_corpus(Calculus::Pi, 7, 50, 5, &pool());
        assert_eq!(first, second);
        let other = gen_corpus(Calculus::Pi, 8, 50, 5, &pool());
        assert_ne!(first, other);
    }

    #[test]
    fn sizes_and_free_names_stay_in_bounds() {
        for calculus in [Calculus::Ccs, Calculus::Pi] {
            let corpus = gen_corpus(calculus, 42, 200, 6, &pool());
            assert_eq!(corpus.len(), 200);
            for term in &corpus {
                assert_eq!(term.calculus(), calculus);
                let size = term.prefix_count();
                assert!((1..=6).contains(&size), "size {size} out of bounds");
                for name in term.free_names() {
                    assert!(pool().contains(&name), "escaped name {name}");
                }
            }
        }
    }

    #[test]
    fn generated_terms_round_trip_through_the_parser() {
        for calculus in [Calculus::Ccs, Calculus::Pi] {
            for term in gen_corpus(calculus, 9, 100, 6, &pool()) {
                let text = pretty(&term);
                let back = parse_term(&text, calculus).expect("reparse");
                assert_eq!(back, term, "round trip of {text}");
            }
        }
    }

    #[test]
    fn corpus_exercises_every_construct() {
        let corpus = gen_corpus(Calculus::Pi, 1, 300, 6, &pool());
        assert!(corpus.iter().any(|t| t.binder_count() > 0));
        assert!(corpus.iter().any(|t| matches!(t.node(), crate::term::Node::Par(_))));
        assert!(corpus.iter().any(|t| {
            matches!(t.node(), crate::term::Node::Sum(s) if s.len() > 1)
        }));
        let tiny = gen_corpus(Calculus::Ccs, 3, 50, 1, &pool());
        assert!(tiny.iter().all(|t| t.prefix_count() == 1));
    }

    #[test]
    fn empty_pool_still_generates_tau_only_terms() {
        let corpus = gen_corpus(Calculus::Ccs, 5, 30, 4, &[]);
        for term in &corpus {
            assert!(term.free_names().is_empty());
        }
    }
}
