//! `z = |x - y|` and `z = (x - y) mod n`, filtered by scanning supports.
//!
//! Cost is `|dom(x)| * |dom(y)|` per run, which is fine for pitch-sized
//! domains but not meant for wide ones.

use crate::domain::{Domain, VarId};
use crate::error::ModelError;
use crate::space::{Context, PropCondition, PropId, PropResult, Propagation, Propagator, Space};

#[derive(Clone, Copy, Debug)]
enum DiffOp {
    Abs,
    Mod(i64),
}

impl DiffOp {
    fn apply(self, x: i64, y: i64) -> i64 {
        match self {
            DiffOp::Abs => (x - y).abs(),
            DiffOp::Mod(n) => (x - y).rem_euclid(n),
        }
    }
}

/// Values of one domain seen with a support: flags over its bounds when
/// the span is small, a plain list otherwise.
enum Supports {
    Flags { lo: i64, seen: Vec<bool> },
    List(Vec<i64>),
}

const MAX_FLAG_SPAN: i64 = 4096;

impl Supports {
    fn new(d: &Domain) -> Supports {
        match (d.min(), d.max()) {
            (Some(lo), Some(hi)) if hi - lo < MAX_FLAG_SPAN => {
                Supports::Flags { lo, seen: vec![false; (hi - lo + 1) as usize] }
            }
            _ => Supports::List(Vec::new()),
        }
    }

    fn mark(&mut self, v: i64) {
        match self {
            Supports::Flags { lo, seen } => seen[(v - *lo) as usize] = true,
            Supports::List(vs) => vs.push(v),
        }
    }

    fn into_domain(self) -> Domain {
        match self {
            Supports::Flags { lo, seen } => {
                Domain::from_values(seen.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| lo + i as i64))
            }
            Supports::List(vs) => Domain::from_values(vs),
        }
    }
}

#[derive(Debug)]
struct Diff {
    z: VarId,
    x: VarId,
    y: VarId,
    op: DiffOp,
}

impl Propagator for Diff {
    fn name(&self) -> &'static str {
        match self.op {
            DiffOp::Abs => "abs_diff",
            DiffOp::Mod(_) => "mod_diff",
        }
    }

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)> {
        [self.z, self.x, self.y].iter().map(|&v| (v, PropCondition::Domain)).collect()
    }

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult {
        let (z, x, y) = (self.z, self.x, self.y);
        let mut sx = Vec::new();
        let mut sy = Supports::new(ctx.dom(y));
        let mut sz = Supports::new(ctx.dom(z));
        {
            let (dx, dy, dz) = (ctx.dom(x), ctx.dom(y), ctx.dom(z));
            for xv in dx.iter() {
                let mut supported = false;
                let ys = dy.iter().filter(|_| x != y).chain((x == y).then_some(xv));
                for yv in ys {
                    let zv = self.op.apply(xv, yv);
                    let aliased_ok = (z != x || zv == xv) && (z != y || zv == yv);
                    if aliased_ok && dz.contains(zv) {
                        supported = true;
                        sy.mark(yv);
                        sz.mark(zv);
                    }
                }
                if supported {
                    sx.push(xv);
                }
            }
        }
        ctx.intersect(x, &Domain::from_values(sx))?;
        ctx.intersect(y, &sy.into_domain())?;
        ctx.intersect(z, &sz.into_domain())?;
        if ctx.is_assigned(x) && ctx.is_assigned(y) {
            Ok(Propagation::Subsumed)
        } else {
            Ok(Propagation::AtFixpoint)
        }
    }
}

impl Space {
    /// Posts `z = |x - y|`.
    pub fn post_abs_diff(&mut self, z: VarId, x: VarId, y: VarId) -> Result<PropId, ModelError> {
        self.check_vars(&[z, x, y])?;
        Ok(self.post(Diff { z, x, y, op: DiffOp::Abs }))
    }

    /// Posts `z = (x - y) mod n`, with the result in `0..n`.
    pub fn post_mod_diff(&mut self, z: VarId, x: VarId, y: VarId, n: i64) -> Result<PropId, ModelError> {
        if n <= 0 {
            return Err(ModelError::NonPositiveModulus(n));
        }
        self.check_vars(&[z, x, y])?;
        Ok(self.post(Diff { z, x, y, op: DiffOp::Mod(n) }))
    }
}
