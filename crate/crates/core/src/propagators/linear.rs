//! Linear (in)equalities `sum(coeff * var) REL constant` with bounds reasoning.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::VarId;
use crate::error::ModelError;
use crate::space::{Context, Failure, PropCondition, PropId, PropResult, Propagation, Propagator, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearTerm {
    pub coeff: i64,
    pub var: VarId,
}

impl LinearTerm {
    pub fn new(coeff: i64, var: VarId) -> Self {
        LinearTerm { coeff, var }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Le,
    Eq,
    Ne,
}

#[derive(Debug)]
struct Linear {
    terms: Vec<(i128, VarId)>,
    kind: Kind,
    constant: i128,
}

fn clamp(v: i128) -> i64 {
    v.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

/// Smallest and largest value of `coeff * var`.
fn term_bounds(ctx: &Context<'_>, coeff: i128, v: VarId) -> (i128, i128) {
    let lo = ctx.min(v) as i128 * coeff;
    let hi = ctx.max(v) as i128 * coeff;
    if coeff > 0 {
        (lo, hi)
    } else {
        (hi, lo)
    }
}

/// One bounds pass of `sum(terms) <= c`, with `sign` applied to every coefficient.
fn prune_le(ctx: &mut Context<'_>, terms: &[(i128, VarId)], sign: i128, c: i128) -> Result<bool, Failure> {
    let mut min_total: i128 = 0;
    let mut max_total: i128 = 0;
    for &(a, v) in terms {
        let (lo, hi) = term_bounds(ctx, a * sign, v);
        min_total += lo;
        max_total += hi;
    }
    if min_total > c {
        return Err(Failure);
    }
    if max_total <= c {
        return Ok(true);
    }
    for &(a, v) in terms {
        let a = a * sign;
        let (lo, _) = term_bounds(ctx, a, v);
        let slack = c - (min_total - lo);
        if a > 0 {
            ctx.remove_above(v, clamp(slack.div_euclid(a)))?;
        } else {
            ctx.remove_below(v, clamp(-slack.div_euclid(-a)))?;
        }
    }
    Ok(false)
}

impl Propagator for Linear {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)> {
        let cond = if self.kind == Kind::Ne { PropCondition::Value } else { PropCondition::Bounds };
        self.terms.iter().map(|&(_, v)| (v, cond)).collect()
    }

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult {
        match self.kind {
            Kind::Le => {
                if prune_le(ctx, &self.terms, 1, self.constant)? {
                    Ok(Propagation::Subsumed)
                } else {
                    Ok(Propagation::AtFixpoint)
                }
            }
            Kind::Eq => {
                let upper = prune_le(ctx, &self.terms, 1, self.constant)?;
                let lower = prune_le(ctx, &self.terms, -1, -self.constant)?;
                if upper && lower {
                    Ok(Propagation::Subsumed)
                } else {
                    Ok(Propagation::AtFixpoint)
                }
            }
            Kind::Ne => {
                let mut rest: i128 = 0;
                let mut free = None;
                for &(a, v) in &self.terms {
                    match ctx.value(v) {
                        Some(x) => rest += a * x as i128,
                        None if free.is_none() => free = Some((a, v)),
                        None => return Ok(Propagation::AtFixpoint),
                    }
                }
                match free {
                    None if rest == self.constant => Err(Failure),
                    None => Ok(Propagation::Subsumed),
                    Some((a, v)) => {
                        let target = self.constant - rest;
                        if target % a == 0 {
                            let x = target / a;
                            if x >= i64::MIN as i128 && x <= i64::MAX as i128 {
                                ctx.remove_value(v, x as i64)?;
                            }
                        }
                        Ok(Propagation::Subsumed)
                    }
                }
            }
        }
    }
}

impl Space {
    /// Posts `sum(terms) REL constant`.
    ///
    /// Repeated variables are merged and zero coefficients dropped, so
    /// `x - x < 0` becomes the ground constraint `0 < 0` and fails.
    pub fn post_linear(&mut self, terms: &[LinearTerm], rel: Relation, constant: i64) -> Result<PropId, ModelError> {
        let mut merged: BTreeMap<VarId, i128> = BTreeMap::new();
        for t in terms {
            self.check_var(t.var)?;
            *merged.entry(t.var).or_default() += t.coeff as i128;
        }
        let mut terms: Vec<(i128, VarId)> = merged.into_iter().filter(|&(_, a)| a != 0).map(|(v, a)| (a, v)).collect();
        let c = constant as i128;
        let (kind, constant) = match rel {
            Relation::Eq => (Kind::Eq, c),
            Relation::Ne => (Kind::Ne, c),
            Relation::Le => (Kind::Le, c),
            Relation::Lt => (Kind::Le, c - 1),
            Relation::Ge | Relation::Gt => {
                for t in &mut terms {
                    t.0 = -t.0;
                }
                (Kind::Le, if rel == Relation::Ge { -c } else { -c - 1 })
            }
        };
        Ok(self.post(Linear { terms, kind, constant }))
    }

    /// Posts `x REL y + offset`.
    pub fn post_binary(&mut self, x: VarId, rel: Relation, y: VarId, offset: i64) -> Result<PropId, ModelError> {
        self.post_linear(&[LinearTerm::new(1, x), LinearTerm::new(-1, y)], rel, offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::space::{PropagatorStatus, SpaceStatus};

    #[test]
    fn pitch_narrowing_example() {
        let mut s = Space::new();
        let p1 = s.new_var_range(36, 72);
        let p2 = s.new_var_range(60, 80);
        s.post_binary(p1, Relation::Gt, p2, 2).unwrap();
        assert_eq!(s.propagate(), SpaceStatus::Stable);
        assert_eq!(s.domain(p1), &Domain::from_range(63, 72));
        assert_eq!(s.domain(p2), &Domain::from_range(60, 69));
    }

    #[test]
    fn ground_sum_is_subsumed() {
        let mut s = Space::new();
        let x = s.new_var_range(0, 0);
        let y = s.new_var_range(0, 0);
        let p = s.post_linear(&[LinearTerm::new(1, x), LinearTerm::new(1, y)], Relation::Eq, 0).unwrap();
        assert_eq!(s.run_propagator(p), PropagatorStatus::Subsumed);
    }

    #[test]
    fn x_less_than_itself_fails() {
        let mut s = Space::new();
        let x = s.new_var_range(0, 5);
        let p = s.post_linear(&[LinearTerm::new(1, x), LinearTerm::new(-1, x)], Relation::Lt, 0).unwrap();
        assert_eq!(s.run_propagator(p), PropagatorStatus::Failed);
    }

    #[test]
    fn contradictory_bounds_fail() {
        let mut s = Space::new();
        let x = s.new_var_range(1, 2);
        s.post_linear(&[LinearTerm::new(1, x)], Relation::Gt, 1).unwrap();
        s.post_linear(&[LinearTerm::new(1, x)], Relation::Lt, 2).unwrap();
        assert_eq!(s.propagate(), SpaceStatus::Failed);
    }

    #[test]
    fn not_equal_prunes_last_free_variable() {
        let mut s = Space::new();
        let x = s.new_var_range(3, 3);
        let y = s.new_var_range(0, 9);
        s.post_linear(&[LinearTerm::new(2, x), LinearTerm::new(-1, y)], Relation::Ne, 1).unwrap();
        s.propagate();
        assert!(!s.domain(y).contains(5));
        assert_eq!(s.domain(y).size(), 9);
    }

    #[test]
    fn not_equal_waits_for_assignment() {
        let mut s = Space::new();
        let x = s.new_var_range(0, 3);
        let y = s.new_var_range(0, 3);
        let p = s.post_linear(&[LinearTerm::new(1, x), LinearTerm::new(1, y)], Relation::Ne, 2).unwrap();
        assert_eq!(s.run_propagator(p), PropagatorStatus::AtFixpoint);
        assert_eq!(s.domain(x).size(), 4);
    }

    #[test]
    fn negative_coefficients_round_correctly() {
        // -3x <= -7  =>  x >= 3 (ceil of 7/3)
        let mut s = Space::new();
        let x = s.new_var_range(-10, 10);
        s.post_linear(&[LinearTerm::new(-3, x)], Relation::Le, -7).unwrap();
        s.propagate();
        assert_eq!(s.domain(x).min(), Some(3));
        // 3x <= -7  =>  x <= -3 (floor of -7/3)
        let mut s = Space::new();
        let x = s.new_var_range(-10, 10);
        s.post_linear(&[LinearTerm::new(3, x)], Relation::Le, -7).unwrap();
        s.propagate();
        assert_eq!(s.domain(x).max(), Some(-3));
    }

    #[test]
    fn invalid_var_is_rejected() {
        let mut s = Space::new();
        let err = s.post_linear(&[LinearTerm::new(1, VarId(3))], Relation::Eq, 0).unwrap_err();
        assert!(matches!(err, ModelError::InvalidVar { .. }));
    }
}
