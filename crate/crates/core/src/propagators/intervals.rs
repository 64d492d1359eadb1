//! Melodic interval channels and motive counting, built from the primitive
//! propagators.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, VarId};
use crate::error::ModelError;
use crate::propagators::linear::{LinearTerm, Relation};
use crate::space::{PropId, Space};

/// How consecutive pitches are turned into an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMode {
    /// `|x[i+1] - x[i]|`
    Absolute,
    /// `x[i+1] - x[i]`
    Signed,
    /// `(x[i+1] - x[i]) mod n`, in `0..n`
    Modulo(i64),
}

impl IntervalMode {
    pub fn apply(self, from: i64, to: i64) -> i64 {
        match self {
            IntervalMode::Absolute => (to - from).abs(),
            IntervalMode::Signed => to - from,
            IntervalMode::Modulo(n) => (to - from).rem_euclid(n),
        }
    }

    fn validate(self) -> Result<(), ModelError> {
        match self {
            IntervalMode::Modulo(n) if n <= 0 => Err(ModelError::NonPositiveModulus(n)),
            _ => Ok(()),
        }
    }
}

/// Initial domain for interval variables over pitches with the given domains.
pub(crate) fn interval_domain<'a>(pitches: impl IntoIterator<Item = &'a Domain>, mode: IntervalMode) -> Domain {
    let (mut lo, mut hi) = (None::<i64>, None::<i64>);
    for d in pitches {
        if let (Some(a), Some(b)) = (d.min(), d.max()) {
            lo = Some(lo.map_or(a, |l| l.min(a)));
            hi = Some(hi.map_or(b, |h| h.max(b)));
        }
    }
    match (mode, lo, hi) {
        (IntervalMode::Modulo(n), _, _) => Domain::from_range(0, n - 1),
        (_, None, _) | (_, _, None) => Domain::empty(),
        (IntervalMode::Signed, Some(lo), Some(hi)) => Domain::from_range(lo - hi, hi - lo),
        (IntervalMode::Absolute, Some(lo), Some(hi)) => Domain::from_range(0, hi - lo),
    }
}

impl Space {
    /// Creates one fresh variable per consecutive pair of `xs`, channels it to
    /// the interval under `mode`, and optionally makes the intervals pairwise
    /// distinct. Returns the interval variables.
    pub fn post_intervals(
        &mut self,
        xs: &[VarId],
        mode: IntervalMode,
        distinct: bool,
    ) -> Result<Vec<VarId>, ModelError> {
        if xs.len() < 2 {
            return Err(ModelError::TooFewVariables { what: "intervals", min: 2, got: xs.len() });
        }
        self.check_vars(xs)?;
        mode.validate()?;
        let dom = interval_domain(xs.iter().map(|&x| self.domain(x)), mode);
        let ds: Vec<VarId> = (1..xs.len()).map(|_| self.new_var(dom.clone())).collect();
        self.link_intervals(xs, &ds, mode, distinct)?;
        Ok(ds)
    }

    /// Like [`post_intervals`](Space::post_intervals) but over existing
    /// interval variables `ds` (`ds.len() == xs.len() - 1`).
    pub fn link_intervals(
        &mut self,
        xs: &[VarId],
        ds: &[VarId],
        mode: IntervalMode,
        distinct: bool,
    ) -> Result<Vec<PropId>, ModelError> {
        if xs.len() < 2 {
            return Err(ModelError::TooFewVariables { what: "intervals", min: 2, got: xs.len() });
        }
        if ds.len() + 1 != xs.len() {
            return Err(ModelError::spec(
                "ds",
                format!("expected {} interval variables, got {}", xs.len() - 1, ds.len()),
            ));
        }
        self.check_vars(xs)?;
        self.check_vars(ds)?;
        mode.validate()?;
        let mut props = Vec::with_capacity(ds.len() + 1);
        for (pair, &d) in xs.windows(2).zip(ds) {
            let (from, to) = (pair[0], pair[1]);
            let p = match mode {
                IntervalMode::Signed => self.post_linear(
                    &[LinearTerm::new(1, to), LinearTerm::new(-1, from), LinearTerm::new(-1, d)],
                    Relation::Eq,
                    0,
                )?,
                IntervalMode::Absolute => self.post_abs_diff(d, to, from)?,
                IntervalMode::Modulo(n) => self.post_mod_diff(d, to, from, n)?,
            };
            props.push(p);
        }
        if distinct {
            props.push(self.post_all_distinct(ds)?);
        }
        Ok(props)
    }

    /// Constrains the number of start positions `j` at which `motive` occurs
    /// in `ivars` (i.e. `ivars[j + k] = motive[k]` for every `k`) to equal
    /// `occurrences`. Overlapping matches each count.
    pub fn post_motive_occurrences(
        &mut self,
        ivars: &[VarId],
        motive: &[i64],
        occurrences: usize,
    ) -> Result<Vec<PropId>, ModelError> {
        self.check_vars(ivars)?;
        if motive.is_empty() {
            return Err(ModelError::spec("motive", "a motive needs at least one interval"));
        }
        let mut props = Vec::new();
        let mut matches = Vec::new();
        if motive.len() <= ivars.len() {
            for start in 0..=(ivars.len() - motive.len()) {
                let mut hits = Vec::with_capacity(motive.len());
                for (k, &m) in motive.iter().enumerate() {
                    let b = self.new_bool();
                    props.push(self.post_reified_eq_const(ivars[start + k], m, b)?);
                    hits.push(b);
                }
                let all = self.new_bool();
                props.push(self.post_bool_and_eq(&hits, all)?);
                matches.push(LinearTerm::new(1, all));
            }
        }
        props.push(self.post_linear(&matches, Relation::Eq, occurrences as i64)?);
        Ok(props)
    }
}
