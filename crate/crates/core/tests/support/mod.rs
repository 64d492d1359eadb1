//! Exhaustive checks of single propagators against brute-force enumeration.
//! Shared by this crate's integration tests and the CLI acceptance suite.
#![allow(dead_code)]

use fdmusic::{Dfa, Domain, LinearTerm, ModelError, Relation, Space, SpaceStatus, VarId};

pub type Poster = dyn Fn(&mut Space, &[VarId]) -> Result<(), ModelError>;
pub type Checker = dyn Fn(&[i64]) -> bool;

/// Domains used for general integer variables: every non-empty subset of
/// 0..=3 plus a few wider or negative ones (span at most 6).
pub fn int_pool() -> Vec<Domain> {
    let mut pool: Vec<Domain> =
        (1u32..16).map(|mask| Domain::from_values((0..4).filter(|b| mask & (1 << b) != 0))).collect();
    pool.push(Domain::from_range(-2, 3));
    pool.push(Domain::from_range(0, 6));
    pool.push(Domain::from_values([1, 3, 5]));
    pool.push(Domain::from_values([-3, 0, 3]));
    pool
}

pub fn bool_pool() -> Vec<Domain> {
    vec![Domain::singleton(0), Domain::singleton(1), Domain::from_range(0, 1)]
}

fn cartesian(domains: &[Domain]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                d.iter().map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// All tuples of length `k` over `pool`; when there are more than `cap`,
/// a deterministic stride sample of them.
pub fn domain_tuples(pool: &[Domain], k: usize, cap: usize) -> Vec<Vec<Domain>> {
    let total = pool.len().pow(k as u32);
    let stride = if total > cap { total / cap + 1 } else { 1 };
    (0..total)
        .step_by(stride)
        .map(|mut idx| {
            (0..k)
                .map(|_| {
                    let d = pool[idx % pool.len()].clone();
                    idx /= pool.len();
                    d
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Tally {
    pub instances: usize,
    pub failed: usize,
}

/// Posts one constraint over fresh variables with `domains`, propagates, and
/// checks soundness, monotonicity and idempotence (and GAC if `gac`).
pub fn check_instance(domains: &[Domain], post: &Poster, holds: &Checker, gac: bool) -> Result<bool, String> {
    let mut s = Space::new();
    let vars: Vec<VarId> = domains.iter().map(|d| s.new_var(d.clone())).collect();
    post(&mut s, &vars).map_err(|e| format!("post failed: {e}"))?;
    let status = s.propagate();

    let solutions: Vec<Vec<i64>> = cartesian(domains).into_iter().filter(|t| holds(t)).collect();
    let ctx = || format!("domains {domains:?}");

    if status == SpaceStatus::Failed {
        if !solutions.is_empty() {
            return Err(format!("{}: failed but {:?} is a solution", ctx(), solutions[0]));
        }
        return Ok(true);
    }
    for (i, (&v, before)) in vars.iter().zip(domains).enumerate() {
        let after = s.domain(v);
        if !after.iter().all(|x| before.contains(x)) {
            return Err(format!("{}: var {i} grew to {after:?}", ctx()));
        }
        for sol in &solutions {
            if !after.contains(sol[i]) {
                return Err(format!("{}: pruned {} from var {i}, needed by {sol:?}", ctx(), sol[i]));
            }
        }
        if gac {
            for x in after.iter() {
                if !solutions.iter().any(|sol| sol[i] == x) {
                    return Err(format!("{}: var {i} keeps unsupported value {x}", ctx()));
                }
            }
        }
    }
    let mut again = s.clone();
    again.propagate();
    if again.domains() != s.domains() {
        return Err(format!("{}: second propagate changed {:?} to {:?}", ctx(), s.domains(), again.domains()));
    }
    if status == SpaceStatus::Solved && solutions.is_empty() {
        return Err(format!("{}: solved space {:?} is not a solution", ctx(), s.assignment()));
    }
    Ok(false)
}

pub fn check_all(tuples: &[Vec<Domain>], post: &Poster, holds: &Checker, gac: bool) -> Result<Tally, String> {
    let mut tally = Tally::default();
    for t in tuples {
        tally.instances += 1;
        if check_instance(t, post, holds, gac)? {
            tally.failed += 1;
        }
    }
    Ok(tally)
}

fn rel_holds(rel: Relation, lhs: i64, rhs: i64) -> bool {
    match rel {
        Relation::Eq => lhs == rhs,
        Relation::Ne => lhs != rhs,
        Relation::Lt => lhs < rhs,
        Relation::Le => lhs <= rhs,
        Relation::Gt => lhs > rhs,
        Relation::Ge => lhs >= rhs,
    }
}

const RELATIONS: [Relation; 6] = [Relation::Eq, Relation::Ne, Relation::Lt, Relation::Le, Relation::Gt, Relation::Ge];

pub fn linear_suite() -> Result<Tally, String> {
    let mut total = Tally::default();
    let shapes: Vec<Vec<i64>> =
        vec![vec![1], vec![1, 1], vec![1, -1], vec![2, -1], vec![-3, 2], vec![1, 1, -1], vec![1, -2, 1, 1]];
    for coeffs in shapes {
        let k = coeffs.len();
        let tuples = domain_tuples(&int_pool(), k, if k <= 2 { usize::MAX } else { 600 });
        for rel in RELATIONS {
            for c in [-2i64, 0, 1, 3] {
                let cs = coeffs.clone();
                let post = move |s: &mut Space, vs: &[VarId]| {
                    let terms: Vec<LinearTerm> = cs.iter().zip(vs).map(|(&a, &v)| LinearTerm::new(a, v)).collect();
                    s.post_linear(&terms, rel, c).map(|_| ())
                };
                let cs = coeffs.clone();
                let holds = move |t: &[i64]| rel_holds(rel, cs.iter().zip(t).map(|(a, x)| a * x).sum(), c);
                let r = check_all(&tuples, &post, &holds, false)?;
                total.instances += r.instances;
                total.failed += r.failed;
            }
        }
    }
    // Repeated variable: x - x < 0 style constraints over one variable.
    let tuples = domain_tuples(&int_pool(), 1, usize::MAX);
    for rel in RELATIONS {
        let post = move |s: &mut Space, vs: &[VarId]| {
            s.post_linear(&[LinearTerm::new(2, vs[0]), LinearTerm::new(-1, vs[0])], rel, 1).map(|_| ())
        };
        let holds = move |t: &[i64]| rel_holds(rel, t[0], 1);
        let r = check_all(&tuples, &post, &holds, false)?;
        total.instances += r.instances;
        total.failed += r.failed;
    }
    Ok(total)
}

pub fn all_distinct_suite() -> Result<Tally, String> {
    let mut total = Tally::default();
    for k in 1..=4 {
        let tuples = domain_tuples(&int_pool(), k, 4000);
        let post = |s: &mut Space, vs: &[VarId]| s.post_all_distinct(vs).map(|_| ());
        let holds = |t: &[i64]| (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j]));
        let r = check_all(&tuples, &post, &holds, false)?;
        total.instances += r.instances;
        total.failed += r.failed;
    }
    Ok(total)
}

pub fn count_suite() -> Result<Tally, String> {
    let mut total = Tally::default();
    for k in 1..=4 {
        let tuples = domain_tuples(&int_pool(), k, 1500);
        for value in [0i64, 1, 3] {
            for occ in 0..=k + 1 {
                let post = move |s: &mut Space, vs: &[VarId]| s.post_count(vs, value, occ).map(|_| ());
                let holds = move |t: &[i64]| t.iter().filter(|&&x| x == value).count() == occ;
                let r = check_all(&tuples, &post, &holds, false)?;
                total.instances += r.instances;
                total.failed += r.failed;
            }
        }
    }
    Ok(total)
}

pub fn abs_diff_suite() -> Result<Tally, String> {
    let tuples = domain_tuples(&int_pool(), 3, usize::MAX);
    let post = |s: &mut Space, vs: &[VarId]| s.post_abs_diff(vs[0], vs[1], vs[2]).map(|_| ());
    let holds = |t: &[i64]| t[0] == (t[1] - t[2]).abs();
    check_all(&tuples, &post, &holds, true)
}

pub fn mod_diff_suite() -> Result<Tally, String> {
    let mut total = Tally::default();
    let tuples = domain_tuples(&int_pool(), 3, usize::MAX);
    for n in 1..=4i64 {
        let post = move |s: &mut Space, vs: &[VarId]| s.post_mod_diff(vs[0], vs[1], vs[2], n).map(|_| ());
        let holds = move |t: &[i64]| t[0] == (t[1] - t[2]).rem_euclid(n);
        let r = check_all(&tuples, &post, &holds, true)?;
        total.instances += r.instances;
        total.failed += r.failed;
    }
    Ok(total)
}

/// Small automata over {0, 1, 2} (and one over {0, 1}).
pub fn sample_dfas() -> Vec<Dfa> {
    vec![
        // alternating 0,1 starting with 0
        Dfa::new(2, 0, [0, 1], [0, 1], [(0, 0, 1), (1, 1, 0)]).unwrap(),
        // no two equal neighbours, any length
        Dfa::new(
            4,
            0,
            [0, 1, 2, 3],
            [0, 1, 2],
            [(0, 0, 1), (0, 1, 2), (0, 2, 3), (1, 1, 2), (1, 2, 3), (2, 0, 1), (2, 2, 3), (3, 0, 1), (3, 1, 2)],
        )
        .unwrap(),
        // contains at least one 2
        Dfa::new(2, 0, [1], [0, 1, 2], [(0, 0, 0), (0, 1, 0), (0, 2, 1), (1, 0, 1), (1, 1, 1), (1, 2, 1)]).unwrap(),
        // even number of 1s, symbol 2 forbidden
        Dfa::new(2, 0, [0], [0, 1, 2], [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]).unwrap(),
        // rejects everything
        Dfa::new(1, 0, [], [0, 1], [(0, 0, 0), (0, 1, 0)]).unwrap(),
    ]
}

pub fn regular_suite() -> Result<Tally, String> {
    let mut total = Tally::default();
    let pool: Vec<Domain> = (1u32..8)
        .map(|mask| Domain::from_values((0..3).filter(|b| mask & (1 << b) != 0)))
        .chain([Domain::from_range(-1, 3)])
        .collect();
    for dfa in sample_dfas() {
        for k in 0..=4 {
            let tuples = domain_tuples(&pool, k, 4096);
            let d = dfa.clone();
            let post = move |s: &mut Space, vs: &[VarId]| s.post_regular(vs, d.clone()).map(|_| ());
            let d = dfa.clone();
            let holds = move |t: &[i64]| d.accepts(t);
            let r = check_all(&tuples, &post, &holds, true)?;
            total.instances += r.instances;
            total.failed += r.failed;
        }
    }
    Ok(total)
}

pub fn reified_suite() -> Result<Tally, String> {
    let mut total = Tally::default();
    let mut tuples = Vec::new();
    for x in int_pool() {
        for b in bool_pool() {
            tuples.push(vec![x.clone(), b]);
        }
    }
    for c in -1..=4i64 {
        let post = move |s: &mut Space, vs: &[VarId]| s.post_reified_eq_const(vs[0], c, vs[1]).map(|_| ());
        let holds = move |t: &[i64]| (t[1] == 1) == (t[0] == c);
        let r = check_all(&tuples, &post, &holds, true)?;
        total.instances += r.instances;
        total.failed += r.failed;
    }
    Ok(total)
}

pub fn bool_and_suite() -> Result<Tally, String> {
    let mut total = Tally::default();
    for k in 0..=3 {
        let tuples = domain_tuples(&bool_pool(), k + 1, usize::MAX);
        let post = move |s: &mut Space, vs: &[VarId]| s.post_bool_and_eq(&vs[..k], vs[k]).map(|_| ());
        let holds = move |t: &[i64]| t[k] == i64::from(t[..k].iter().all(|&b| b == 1));
        let r = check_all(&tuples, &post, &holds, true)?;
        total.instances += r.instances;
        total.failed += r.failed;
    }
    Ok(total)
}

/// Every suite, by name.
pub type Suite = fn() -> Result<Tally, String>;

pub fn soundness_suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("linear", linear_suite as fn() -> Result<Tally, String>),
        ("all_distinct", all_distinct_suite),
        ("count", count_suite),
        ("abs_diff", abs_diff_suite),
        ("mod_diff", mod_diff_suite),
        ("regular", regular_suite),
        ("reified_eq_const", reified_suite),
        ("bool_and_eq", bool_and_suite),
    ]
}
