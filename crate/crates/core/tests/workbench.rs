//! Cross-module flows through the public API only.

use dialg_core::engine::{
    barbed_bisimilar, bisimilar, explore_dialgebra, quotient, refine_dialgebra,
    satisfies_back_and_forth, ChallengerPolicy, Mode, NamePool, Verdict,
};
use dialg_core::{compare_semantics, parse_term, Calculus, Term};

fn ccs(text: &str) -> Term {
    parse_term(text, Calculus::Ccs).expect(text)
}

fn pi(text: &str) -> Term {
    parse_term(text, Calculus::Pi).expect(text)
}

fn witness() -> ChallengerPolicy {
    ChallengerPolicy::WitnessSet { pool: NamePool::new([]) }
}

#[test]
fn verdicts_agree_across_all_four_modes_on_a_choice_pair() {
    let left = ccs("a.b.0 + a.c.0");
    let right = ccs("a.(b.0 + c.0)");
    for mode in [Mode::CcsDialg, Mode::CcsLts] {
        let outcome = bisimilar(&left, &right, mode, &witness(), 10_000).unwrap();
        assert_eq!(outcome.verdict, Verdict::NotBisimilar);
    }
    let left = pi("a(x).b<x>.0 + a(x).c<x>.0");
    let right = pi("a(x).(b<x>.0 + c<x>.0)");
    for mode in [Mode::PiDialg, Mode::PiEarly] {
        let outcome = bisimilar(&left, &right, mode, &witness(), 10_000).unwrap();
        assert_eq!(outcome.verdict, Verdict::NotBisimilar);
    }
}

#[test]
fn minimization_is_stable_under_a_second_pass() {
    let term = ccs("tau.a.0 + tau.a.0 | 0");
    let table = explore_dialgebra(&[term], &witness(), 10_000).unwrap();
    let partition = refine_dialgebra(&table);
    assert!(satisfies_back_and_forth(&table, &partition));
    let minimized = quotient(&table, &partition);
    let again = refine_dialgebra(&minimized);
    assert_eq!(again.block_count(), minimized.len(), "quotient still had mergeable states");
}

#[test]
fn extruded_names_feed_later_interactions() {
    // The sent private name is usable by the receiver afterwards: the
    // composition below reacts twice and ends inert.
    let system = pi("nu x. a<x>.x(z).0 | a(y).y<b>.0");
    let table = explore_dialgebra(
        &[system],
        &ChallengerPolicy::BoundedClosure { rounds: 1 },
        10_000,
    )
    .unwrap();
    let inert = table
        .states
        .iter()
        .position(|s| s.rendering() == "0")
        .expect("the system drains to the inert process");
    assert!(inert > 0);
}

#[test]
fn reaction_and_labelled_views_translate_into_each_other() {
    for text in ["a.0 | ~a.0", "nu b. (b.0 | ~b.a.0)", "tau.a.0 + ~c.0"] {
        let report = compare_semantics(&ccs(text), &NamePool::new([]), 10_000).unwrap();
        assert!(report.pass(), "{text}: {report:?}");
    }
}

#[test]
fn barbed_and_dialgebraic_routes_agree_on_a_tau_guard() {
    let left = pi("a<b>.0");
    let right = pi("tau.a<b>.0");
    let barbed = barbed_bisimilar(&left, &right, 10_000).unwrap();
    assert_eq!(barbed.verdict, Verdict::NotBisimilar);
    let dialg = bisimilar(&left, &right, Mode::PiDialg, &witness(), 10_000).unwrap();
    assert_eq!(dialg.verdict, Verdict::NotBisimilar);
}

#[test]
fn the_state_budget_is_reported_not_papered_over() {
    let outcome = bisimilar(
        &ccs("tau.tau.tau.tau.0"),
        &ccs("tau.tau.tau.0"),
        Mode::CcsDialg,
        &witness(),
        2,
    )
    .unwrap();
    assert_eq!(outcome.verdict, Verdict::Unknown);
}
