//! Cardinality: exactly `occurrences` of `vars` take `value`.

use crate::domain::{Domain, VarId};
use crate::error::ModelError;
use crate::space::{Context, Failure, PropCondition, PropId, PropResult, Propagation, Propagator, Space};

#[derive(Debug)]
struct Count {
    vars: Vec<VarId>,
    value: i64,
    occurrences: usize,
}

impl Propagator for Count {
    fn name(&self) -> &'static str {
        "count"
    }

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)> {
        self.vars.iter().map(|&v| (v, PropCondition::Domain)).collect()
    }

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult {
        let fixed = self.vars.iter().filter(|&&v| ctx.value(v) == Some(self.value)).count();
        let possible = self.vars.iter().filter(|&&v| ctx.dom(v).contains(self.value)).count();
        if fixed > self.occurrences || possible < self.occurrences {
            return Err(Failure);
        }
        if fixed == self.occurrences {
            for &v in &self.vars {
                if ctx.value(v) != Some(self.value) {
                    ctx.remove_value(v, self.value)?;
                }
            }
            return Ok(Propagation::Subsumed);
        }
        if possible == self.occurrences {
            for &v in &self.vars {
                if ctx.dom(v).contains(self.value) {
                    ctx.assign(v, self.value)?;
                }
            }
            return Ok(Propagation::Subsumed);
        }
        Ok(Propagation::AtFixpoint)
    }
}

#[derive(Debug)]
struct Member {
    var: VarId,
    allowed: Domain,
}

impl Propagator for Member {
    fn name(&self) -> &'static str {
        "member"
    }

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)> {
        Vec::new()
    }

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult {
        ctx.intersect(self.var, &self.allowed)?;
        Ok(Propagation::Subsumed)
    }
}

impl Space {
    /// Posts `|{i : vars[i] = value}| = occurrences`. More occurrences than
    /// variables fails on the first propagation.
    pub fn post_count(&mut self, vars: &[VarId], value: i64, occurrences: usize) -> Result<PropId, ModelError> {
        self.check_vars(vars)?;
        let mut distinct = vars.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != vars.len() {
            return Err(ModelError::spec("vars", "count over a repeated variable is not supported"));
        }
        Ok(self.post(Count { vars: vars.to_vec(), value, occurrences }))
    }

    /// Posts `var ∈ allowed`.
    pub fn post_member(&mut self, var: VarId, allowed: &[i64]) -> Result<PropId, ModelError> {
        self.check_var(var)?;
        Ok(self.post(Member { var, allowed: Domain::from_values(allowed.iter().copied()) }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{PropagatorStatus, SpaceStatus};

    #[test]
    fn zero_occurrences_of_fixed_value_fails() {
        let mut s = Space::new();
        let x = s.new_var_range(1, 1);
        let p = s.post_count(&[x], 1, 0).unwrap();
        assert_eq!(s.run_propagator(p), PropagatorStatus::Failed);
    }

    #[test]
    fn absent_value_with_zero_occurrences_is_subsumed() {
        let mut s = Space::new();
        let vs: Vec<VarId> = (0..3).map(|_| s.new_var_range(1, 2)).collect();
        let p = s.post_count(&vs, 7, 0).unwrap();
        assert_eq!(s.run_propagator(p), PropagatorStatus::Subsumed);
    }

    #[test]
    fn too_many_occurrences_fail() {
        let mut s = Space::new();
        let vs: Vec<VarId> = (0..2).map(|_| s.new_var_range(1, 2)).collect();
        s.post_count(&vs, 1, 3).unwrap();
        assert_eq!(s.propagate(), SpaceStatus::Failed);
    }

    #[test]
    fn forces_value_when_supply_is_tight() {
        let mut s = Space::new();
        let x = s.new_var_range(1, 2);
        let y = s.new_var_range(2, 3);
        let z = s.new_var(Domain::from_values([1, 3]));
        s.post_count(&[x, y, z], 1, 2).unwrap();
        s.propagate();
        assert_eq!(s.domain(x).assigned_value(), Some(1));
        assert_eq!(s.domain(z).assigned_value(), Some(1));
        assert_eq!(s.domain(y).size(), 2);
    }

    #[test]
    fn member_examples() {
        let mut s = Space::new();
        let x = s.new_var_range(0, 127);
        let p = s.post_member(x, &[60, 62, 64, 65, 67]).unwrap();
        assert_eq!(s.run_propagator(p), PropagatorStatus::Subsumed);
        assert_eq!(s.domain(x), &Domain::from_values([60, 62, 64, 65, 67]));

        let mut s = Space::new();
        let x = s.new_var_range(60, 61);
        s.post_member(x, &[60, 62]).unwrap();
        assert_eq!(s.propagate(), SpaceStatus::Solved);
        assert_eq!(s.domain(x).assigned_value(), Some(60));

        let mut s = Space::new();
        let x = s.new_var_range(0, 5);
        s.post_member(x, &[]).unwrap();
        assert_eq!(s.propagate(), SpaceStatus::Failed);
    }

    #[test]
    fn member_reports_value_event() {
        let mut d = Domain::from_range(60, 61);
        assert_eq!(d.intersect(&Domain::from_values([60, 62])), crate::domain::DomainEvent::Value);
    }
}
