//! Declarative models and the two musical problems built on them.
//!
//! A [`ModelSpec`] is a variable list with initial domains plus an ordered
//! list of [`Constraint`]s. It can be serialized, turned into a [`Space`]
//! for search, and checked against a candidate assignment by
//! [`verify_solution`], which evaluates every constraint directly without
//! touching any propagator.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, VarId};
use crate::error::ModelError;
use crate::propagators::intervals::{interval_domain, IntervalMode};
use crate::propagators::linear::{LinearTerm, Relation};
use crate::propagators::regular::Dfa;
use crate::space::Space;

/// Lowest and highest MIDI pitch.
pub const PITCH_MIN: i64 = 0;
pub const PITCH_MAX: i64 = 127;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Constraint {
    Linear {
        terms: Vec<LinearTerm>,
        relation: Relation,
        constant: i64,
    },
    AllDistinct {
        vars: Vec<VarId>,
    },
    Count {
        vars: Vec<VarId>,
        value: i64,
        occurrences: usize,
    },
    Member {
        var: VarId,
        allowed: Vec<i64>,
    },
    ReifiedEqConst {
        var: VarId,
        value: i64,
        b: VarId,
    },
    BoolAndEq {
        bs: Vec<VarId>,
        r: VarId,
    },
    AbsDiff {
        z: VarId,
        x: VarId,
        y: VarId,
    },
    ModDiff {
        z: VarId,
        x: VarId,
        y: VarId,
        modulus: i64,
    },
    Regular {
        vars: Vec<VarId>,
        dfa: Dfa,
    },
    /// `ds[i]` is the interval from `xs[i]` to `xs[i + 1]`.
    Intervals {
        xs: Vec<VarId>,
        ds: Vec<VarId>,
        mode: IntervalMode,
        distinct: bool,
    },
    MotiveOccurrences {
        ivars: Vec<VarId>,
        motive: Vec<i64>,
        occurrences: usize,
    },
}

impl Constraint {
    fn post(&self, s: &mut Space) -> Result<(), ModelError> {
        match self {
            Constraint::Linear { terms, relation, constant } => {
                s.post_linear(terms, *relation, *constant)?;
            }
            Constraint::AllDistinct { vars } => {
                s.post_all_distinct(vars)?;
            }
            Constraint::Count { vars, value, occurrences } => {
                s.post_count(vars, *value, *occurrences)?;
            }
            Constraint::Member { var, allowed } => {
                s.post_member(*var, allowed)?;
            }
            Constraint::ReifiedEqConst { var, value, b } => {
                s.post_reified_eq_const(*var, *value, *b)?;
            }
            Constraint::BoolAndEq { bs, r } => {
                s.post_bool_and_eq(bs, *r)?;
            }
            Constraint::AbsDiff { z, x, y } => {
                s.post_abs_diff(*z, *x, *y)?;
            }
            Constraint::ModDiff { z, x, y, modulus } => {
                s.post_mod_diff(*z, *x, *y, *modulus)?;
            }
            Constraint::Regular { vars, dfa } => {
                s.post_regular(vars, dfa.clone())?;
            }
            Constraint::Intervals { xs, ds, mode, distinct } => {
                s.link_intervals(xs, ds, *mode, *distinct)?;
            }
            Constraint::MotiveOccurrences { ivars, motive, occurrences } => {
                s.post_motive_occurrences(ivars, motive, *occurrences)?;
            }
        }
        Ok(())
    }
}

/// Variables, their initial domains, and constraints (posted in list order).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub domains: Vec<Domain>,
    pub constraints: Vec<Constraint>,
}

impl ModelSpec {
    pub fn new() -> ModelSpec {
        ModelSpec::default()
    }

    pub fn var_count(&self) -> usize {
        self.domains.len()
    }

    pub fn new_var(&mut self, domain: Domain) -> VarId {
        self.domains.push(domain);
        VarId(self.domains.len() - 1)
    }

    pub fn add(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    /// Adds interval variables over `xs` and the constraint linking them.
    pub fn intervals(&mut self, xs: &[VarId], mode: IntervalMode, distinct: bool) -> Vec<VarId> {
        let dom = interval_domain(xs.iter().filter_map(|x| self.domains.get(x.0)), mode);
        let ds: Vec<VarId> = (1..xs.len().max(1)).map(|_| self.new_var(dom.clone())).collect();
        self.add(Constraint::Intervals { xs: xs.to_vec(), ds: ds.clone(), mode, distinct });
        ds
    }

    /// Builds a fresh space with every constraint posted, not yet propagated.
    /// Decompositions may add auxiliary variables after the model's own.
    pub fn to_space(&self) -> Result<Space, ModelError> {
        let mut s = Space::new();
        for d in &self.domains {
            s.new_var(d.clone());
        }
        for c in &self.constraints {
            c.post(&mut s)?;
        }
        Ok(s)
    }
}

/// Checks `values` (one per model variable; extra trailing values are
/// ignored) against every domain and constraint by direct evaluation.
///
/// # Panics
///
/// If fewer values than model variables are given.
pub fn verify_solution(m: &ModelSpec, values: &[i64]) -> bool {
    assert!(values.len() >= m.var_count(), "assignment covers {} of {} variables", values.len(), m.var_count());
    let val = |v: &VarId| values[v.0];
    let domains_ok = m.domains.iter().zip(values).all(|(d, &x)| d.contains(x));
    domains_ok
        && m.constraints.iter().all(|c| match c {
            Constraint::Linear { terms, relation, constant } => {
                let sum: i128 = terms.iter().map(|t| t.coeff as i128 * val(&t.var) as i128).sum();
                match relation {
                    Relation::Eq => sum == *constant as i128,
                    Relation::Ne => sum != *constant as i128,
                    Relation::Lt => sum < *constant as i128,
                    Relation::Le => sum <= *constant as i128,
                    Relation::Gt => sum > *constant as i128,
                    Relation::Ge => sum >= *constant as i128,
                }
            }
            Constraint::AllDistinct { vars } => {
                let seen: BTreeSet<i64> = vars.iter().map(val).collect();
                seen.len() == vars.len()
            }
            Constraint::Count { vars, value, occurrences } => {
                vars.iter().filter(|v| val(v) == *value).count() == *occurrences
            }
            Constraint::Member { var, allowed } => allowed.contains(&val(var)),
            Constraint::ReifiedEqConst { var, value, b } => match val(b) {
                0 => val(var) != *value,
                1 => val(var) == *value,
                _ => false,
            },
            Constraint::BoolAndEq { bs, r } => {
                let all_bool = bs.iter().chain(std::iter::once(r)).all(|b| matches!(val(b), 0 | 1));
                all_bool && val(r) == i64::from(bs.iter().all(|b| val(b) == 1))
            }
            Constraint::AbsDiff { z, x, y } => val(z) == (val(x) - val(y)).abs(),
            Constraint::ModDiff { z, x, y, modulus } => {
                *modulus > 0 && val(z) == (val(x) - val(y)).rem_euclid(*modulus)
            }
            Constraint::Regular { vars, dfa } => {
                let word: Vec<i64> = vars.iter().map(val).collect();
                dfa.accepts(&word)
            }
            Constraint::Intervals { xs, ds, mode, distinct } => {
                let ivs: Vec<i64> = xs.windows(2).map(|w| mode.apply(val(&w[0]), val(&w[1]))).collect();
                let linked = ds.len() == ivs.len() && ds.iter().map(val).eq(ivs.iter().copied());
                let unique = !distinct || ivs.iter().collect::<BTreeSet<_>>().len() == ivs.len();
                linked && unique
            }
            Constraint::MotiveOccurrences { ivars, motive, occurrences } => {
                let word: Vec<i64> = ivars.iter().map(val).collect();
                count_occurrences(&word, motive) == *occurrences
            }
        })
}

/// Number of start positions at which `motive` appears in `word`, overlaps
/// included.
pub fn count_occurrences(word: &[i64], motive: &[i64]) -> usize {
    if motive.is_empty() || motive.len() > word.len() {
        return 0;
    }
    word.windows(motive.len()).filter(|w| *w == motive).count()
}

/// A model together with the variables a caller usually wants to read back.
#[derive(Clone, Debug)]
pub struct Model {
    pub spec: ModelSpec,
    /// The melody, in order.
    pub pitches: Vec<VarId>,
    /// The interval between consecutive pitches.
    pub intervals: Vec<VarId>,
}

impl Model {
    pub fn space(&self) -> Result<Space, ModelError> {
        self.spec.to_space()
    }

    pub fn verify(&self, values: &[i64]) -> bool {
        verify_solution(&self.spec, values)
    }
}

/// All-interval series of length `n`: `n` distinct pitch classes in
/// `0..n` whose `n - 1` consecutive intervals mod `n` are also distinct.
/// The series starts on 0 and ends above its first note.
pub fn build_all_interval(n: usize) -> Result<Model, ModelError> {
    if n < 2 {
        return Err(ModelError::TooFewVariables { what: "all-interval series", min: 2, got: n });
    }
    let top = n as i64 - 1;
    let mut spec = ModelSpec::new();
    let pitches: Vec<VarId> = (0..n).map(|_| spec.new_var(Domain::from_range(0, top))).collect();
    spec.add(Constraint::AllDistinct { vars: pitches.clone() });
    let intervals = spec.intervals(&pitches, IntervalMode::Modulo(n as i64), true);
    spec.add(Constraint::Linear { terms: vec![LinearTerm::new(1, pitches[0])], relation: Relation::Eq, constant: 0 });
    spec.add(Constraint::Linear {
        terms: vec![LinearTerm::new(1, pitches[0]), LinearTerm::new(-1, pitches[n - 1])],
        relation: Relation::Lt,
        constant: 0,
    });
    Ok(Model { spec, pitches, intervals })
}

/// One motive of a [`JarrellSpec`] as written in a spec file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Motive {
    pub intervals: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occurrences: Option<usize>,
}

/// A melody of `n` notes whose signed intervals contain each motive an
/// exact number of times, whose inner notes come from `chord`, and whose
/// first and last notes are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JarrellSpec {
    pub n: usize,
    pub motives: Vec<Vec<i64>>,
    pub occurrences: Vec<usize>,
    pub chord: Vec<i64>,
    pub first: i64,
    pub last: i64,
}

/// On-disk layout of a [`JarrellSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JarrellFile {
    pub n: usize,
    pub chord: Vec<i64>,
    pub first: i64,
    pub last: i64,
    pub motives: Vec<Motive>,
}

impl From<JarrellFile> for JarrellSpec {
    fn from(f: JarrellFile) -> Self {
        JarrellSpec {
            n: f.n,
            occurrences: f.motives.iter().filter_map(|m| m.occurrences).collect(),
            motives: f.motives.into_iter().map(|m| m.intervals).collect(),
            chord: f.chord,
            first: f.first,
            last: f.last,
        }
    }
}

impl JarrellSpec {
    /// Parses and validates the JSON spec-file format.
    pub fn from_json(text: &str) -> Result<JarrellSpec, ModelError> {
        let file: JarrellFile = serde_json::from_str(text).map_err(|e| ModelError::spec("spec", e.to_string()))?;
        let spec = JarrellSpec::from(file);
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        if self.motives.len() != self.occurrences.len() {
            return Err(self.length_mismatch());
        }
        let file = JarrellFile {
            n: self.n,
            chord: self.chord.clone(),
            first: self.first,
            last: self.last,
            motives: self
                .motives
                .iter()
                .zip(&self.occurrences)
                .map(|(m, &o)| Motive { intervals: m.clone(), occurrences: Some(o) })
                .collect(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| ModelError::spec("spec", e.to_string()))
    }

    fn length_mismatch(&self) -> ModelError {
        ModelError::spec(
            "motives",
            format!("`motives` has {} entries but `occurrences` has {}", self.motives.len(), self.occurrences.len()),
        )
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 2 {
            return Err(ModelError::spec("n", format!("need at least 2 notes, got {}", self.n)));
        }
        if self.motives.len() != self.occurrences.len() {
            return Err(self.length_mismatch());
        }
        for (i, m) in self.motives.iter().enumerate() {
            if m.is_empty() {
                return Err(ModelError::spec("motives", format!("motive {i} is empty")));
            }
            if m.len() > self.n - 1 {
                return Err(ModelError::spec(
                    "motives",
                    format!("motive {i} has {} intervals but a melody of {} notes has {}", m.len(), self.n, self.n - 1),
                ));
            }
        }
        let in_range = |v: i64| (PITCH_MIN..=PITCH_MAX).contains(&v);
        if let Some(&bad) = self.chord.iter().find(|&&v| !in_range(v)) {
            return Err(ModelError::spec("chord", format!("pitch {bad} outside {PITCH_MIN}..={PITCH_MAX}")));
        }
        if !in_range(self.first) {
            return Err(ModelError::spec("first", format!("pitch {} outside {PITCH_MIN}..={PITCH_MAX}", self.first)));
        }
        if !in_range(self.last) {
            return Err(ModelError::spec("last", format!("pitch {} outside {PITCH_MIN}..={PITCH_MAX}", self.last)));
        }
        Ok(())
    }
}

/// The motive melody model: pitches in `0..=127`, signed intervals, exact
/// motive counts, chord tones on every inner note, fixed endpoints.
pub fn build_jarrell(spec: &JarrellSpec) -> Result<Model, ModelError> {
    spec.validate()?;
    let n = spec.n;
    let mut m = ModelSpec::new();
    let pitches: Vec<VarId> = (0..n).map(|_| m.new_var(Domain::from_range(PITCH_MIN, PITCH_MAX))).collect();
    let intervals = m.intervals(&pitches, IntervalMode::Signed, false);
    for (motive, &occurrences) in spec.motives.iter().zip(&spec.occurrences) {
        m.add(Constraint::MotiveOccurrences { ivars: intervals.clone(), motive: motive.clone(), occurrences });
    }
    for &p in &pitches[1..n - 1] {
        m.add(Constraint::Member { var: p, allowed: spec.chord.clone() });
    }
    m.add(Constraint::Linear {
        terms: vec![LinearTerm::new(1, pitches[0])],
        relation: Relation::Eq,
        constant: spec.first,
    });
    m.add(Constraint::Linear {
        terms: vec![LinearTerm::new(1, pitches[n - 1])],
        relation: Relation::Eq,
        constant: spec.last,
    });
    Ok(Model { spec: m, pitches, intervals })
}
