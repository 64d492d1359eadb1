//! All-distinct: value elimination plus Hall-interval bounds reasoning.

use crate::domain::VarId;
use crate::error::ModelError;
use crate::space::{Context, Failure, PropCondition, PropId, PropResult, Propagation, Propagator, Space};

#[derive(Debug)]
struct AllDistinct {
    vars: Vec<VarId>,
}

impl AllDistinct {
    /// Removes every assigned value from the other domains until no new
    /// variable becomes assigned.
    fn eliminate_values(&self, ctx: &mut Context<'_>) -> Result<(), Failure> {
        let mut done = vec![false; self.vars.len()];
        let mut taken: Vec<i64> = Vec::new();
        loop {
            let before = taken.len();
            for (i, &var) in self.vars.iter().enumerate() {
                if done[i] {
                    continue;
                }
                if let Some(v) = ctx.value(var) {
                    if taken.contains(&v) {
                        return Err(Failure);
                    }
                    done[i] = true;
                    taken.push(v);
                }
            }
            if taken.len() == before {
                return Ok(());
            }
            for (j, &other) in self.vars.iter().enumerate() {
                if done[j] {
                    continue;
                }
                for &v in &taken[before..] {
                    if ctx.dom(other).contains(v) {
                        ctx.remove_value(other, v)?;
                    }
                }
            }
        }
    }

    /// Repeatedly finds intervals `[lo, hi]` that contain exactly as many
    /// variable domains (by bounds) as values, and pushes every other
    /// variable's bounds out of them.
    fn hall_intervals(&self, ctx: &mut Context<'_>) -> Result<(), Failure> {
        'restart: loop {
            let bounds: Vec<(i64, i64)> = self.vars.iter().map(|&v| (ctx.min(v), ctx.max(v))).collect();
            let mut los: Vec<i64> = bounds.iter().map(|b| b.0).collect();
            los.sort_unstable();
            los.dedup();
            let mut his: Vec<i64> = Vec::with_capacity(bounds.len());
            for &lo in &los {
                // Upper bounds of the variables starting at or above `lo`; the
                // k-th smallest gives the count of domains inside [lo, his[k]].
                his.clear();
                his.extend(bounds.iter().filter(|b| b.0 >= lo).map(|b| b.1));
                his.sort_unstable();
                for k in 0..his.len() {
                    if his.get(k + 1) == Some(&his[k]) {
                        continue;
                    }
                    let hi = his[k];
                    let inside = k as i128 + 1;
                    let capacity = (hi as i128) - (lo as i128) + 1;
                    if inside > capacity {
                        return Err(Failure);
                    }
                    if inside < capacity {
                        continue;
                    }
                    let mut changed = false;
                    for (idx, &(a, b)) in bounds.iter().enumerate() {
                        if a >= lo && b <= hi {
                            continue;
                        }
                        let v = self.vars[idx];
                        if (lo..=hi).contains(&a) {
                            ctx.remove_below(v, hi + 1)?;
                            changed = true;
                        }
                        if (lo..=hi).contains(&b) {
                            ctx.remove_above(v, lo - 1)?;
                            changed = true;
                        }
                    }
                    if changed {
                        continue 'restart;
                    }
                }
            }
            return Ok(());
        }
    }
}

impl Propagator for AllDistinct {
    fn name(&self) -> &'static str {
        "all_distinct"
    }

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)> {
        self.vars.iter().map(|&v| (v, PropCondition::Bounds)).collect()
    }

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult {
        self.eliminate_values(ctx)?;
        self.hall_intervals(ctx)?;
        self.eliminate_values(ctx)?;
        if self.vars.iter().all(|&v| ctx.is_assigned(v)) {
            Ok(Propagation::Subsumed)
        } else {
            Ok(Propagation::AtFixpoint)
        }
    }
}

impl Space {
    /// Posts pairwise difference over `vars`. A variable listed twice makes
    /// the constraint unsatisfiable.
    pub fn post_all_distinct(&mut self, vars: &[VarId]) -> Result<PropId, ModelError> {
        if vars.is_empty() {
            return Err(ModelError::TooFewVariables { what: "all_distinct", min: 1, got: 0 });
        }
        self.check_vars(vars)?;
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            self.fail();
        }
        Ok(self.post(AllDistinct { vars: vars.to_vec() }))
    }
}
