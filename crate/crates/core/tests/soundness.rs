mod support;

use fdmusic::{Domain, LinearTerm, Relation, Space};
use proptest::prelude::*;

fn run(suite: fn() -> Result<support::Tally, String>) {
    let tally = suite().unwrap_or_else(|e| panic!("{e}"));
    assert!(tally.instances > 0);
}

#[test]
fn linear_is_sound() {
    run(support::linear_suite);
}

#[test]
fn all_distinct_is_sound() {
    run(support::all_distinct_suite);
}

#[test]
fn count_is_sound() {
    run(support::count_suite);
}

#[test]
fn abs_diff_is_domain_consistent() {
    run(support::abs_diff_suite);
}

#[test]
fn mod_diff_is_domain_consistent() {
    run(support::mod_diff_suite);
}

#[test]
fn regular_is_gac() {
    run(support::regular_suite);
}

#[test]
fn reified_eq_const_is_gac() {
    run(support::reified_suite);
}

#[test]
fn bool_and_eq_is_gac() {
    run(support::bool_and_suite);
}

fn build(domains: &[(i64, i64)], c: i64) -> Space {
    let mut s = Space::new();
    let vs: Vec<_> = domains.iter().map(|&(lo, hi)| s.new_var_range(lo, hi.max(lo))).collect();
    s.post_all_distinct(&vs).unwrap();
    let terms: Vec<LinearTerm> = vs.iter().map(|&v| LinearTerm::new(1, v)).collect();
    s.post_linear(&terms, Relation::Le, c).unwrap();
    if vs.len() >= 2 {
        s.post_abs_diff(vs[0], vs[0], vs[1]).unwrap();
    }
    s
}

proptest! {
    #[test]
    fn propagation_is_deterministic(
        domains in proptest::collection::vec((0i64..8, 0i64..8), 1..5),
        c in 0i64..20,
    ) {
        let mut a = build(&domains, c);
        let mut b = build(&domains, c);
        prop_assert_eq!(a.propagate(), b.propagate());
        prop_assert_eq!(a.domains(), b.domains());
    }

    #[test]
    fn copies_do_not_share_domains(
        domains in proptest::collection::vec((0i64..8, 0i64..8), 2..5),
        cut in 0i64..8,
    ) {
        let original = build(&domains, 100);
        let before: Vec<Domain> = original.domains().to_vec();
        let mut copy = original.clone();
        for v in copy.vars().collect::<Vec<_>>() {
            copy.remove_below(v, cut);
        }
        copy.propagate();
        prop_assert_eq!(original.domains(), &before[..]);
    }
}
