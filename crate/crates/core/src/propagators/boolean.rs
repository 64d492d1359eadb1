//! Reification and conjunction over 0/1 variables.

use crate::domain::VarId;
use crate::error::ModelError;
use crate::space::{Context, Failure, PropCondition, PropId, PropResult, Propagation, Propagator, Space};

/// `b = 1 <=> var = value`
#[derive(Debug)]
struct ReifiedEqConst {
    var: VarId,
    value: i64,
    b: VarId,
}

impl Propagator for ReifiedEqConst {
    fn name(&self) -> &'static str {
        "reified_eq_const"
    }

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)> {
        vec![(self.var, PropCondition::Domain), (self.b, PropCondition::Value)]
    }

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult {
        match ctx.value(self.b) {
            Some(1) => {
                ctx.assign(self.var, self.value)?;
                return Ok(Propagation::Subsumed);
            }
            Some(0) => {
                ctx.remove_value(self.var, self.value)?;
                return Ok(Propagation::Subsumed);
            }
            Some(_) => return Err(Failure),
            None => {}
        }
        if !ctx.dom(self.var).contains(self.value) {
            ctx.assign(self.b, 0)?;
            Ok(Propagation::Subsumed)
        } else if ctx.value(self.var) == Some(self.value) {
            ctx.assign(self.b, 1)?;
            Ok(Propagation::Subsumed)
        } else {
            Ok(Propagation::AtFixpoint)
        }
    }
}

/// `r = bs[0] ∧ ... ∧ bs[k-1]`
#[derive(Debug)]
struct BoolAndEq {
    bs: Vec<VarId>,
    r: VarId,
}

impl Propagator for BoolAndEq {
    fn name(&self) -> &'static str {
        "bool_and_eq"
    }

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)> {
        self.bs.iter().chain(std::iter::once(&self.r)).map(|&v| (v, PropCondition::Value)).collect()
    }

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult {
        if self.bs.iter().any(|&b| ctx.value(b) == Some(0)) {
            ctx.assign(self.r, 0)?;
            return Ok(Propagation::Subsumed);
        }
        if self.bs.iter().all(|&b| ctx.value(b) == Some(1)) {
            ctx.assign(self.r, 1)?;
            return Ok(Propagation::Subsumed);
        }
        match ctx.value(self.r) {
            Some(1) => {
                for &b in &self.bs {
                    ctx.assign(b, 1)?;
                }
                Ok(Propagation::Subsumed)
            }
            Some(0) => {
                let mut free = self.bs.iter().filter(|&&b| !ctx.is_assigned(b));
                match (free.next(), free.next()) {
                    (Some(&last), None) => {
                        ctx.assign(last, 0)?;
                        Ok(Propagation::Subsumed)
                    }
                    _ => Ok(Propagation::AtFixpoint),
                }
            }
            _ => Ok(Propagation::AtFixpoint),
        }
    }
}

impl Space {
    /// Posts `b = 1 <=> var = value`. `b` must range over {0, 1}.
    pub fn post_reified_eq_const(&mut self, var: VarId, value: i64, b: VarId) -> Result<PropId, ModelError> {
        self.check_var(var)?;
        self.check_bool(b)?;
        Ok(self.post(ReifiedEqConst { var, value, b }))
    }

    /// Posts `r = min(bs)` over 0/1 variables. An empty conjunction is true.
    pub fn post_bool_and_eq(&mut self, bs: &[VarId], r: VarId) -> Result<PropId, ModelError> {
        for &b in bs {
            self.check_bool(b)?;
        }
        self.check_bool(r)?;
        Ok(self.post(BoolAndEq { bs: bs.to_vec(), r }))
    }
}
