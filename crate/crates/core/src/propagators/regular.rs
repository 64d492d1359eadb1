//! Word-membership in a regular language, filtered over the layered graph of
//! (position, state) pairs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, VarId};
use crate::error::ModelError;
use crate::space::{Context, Failure, PropCondition, PropId, PropResult, Propagation, Propagator, Space};

/// A deterministic finite automaton over integer symbols. Missing
/// transitions reject.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DfaRepr", into = "DfaRepr")]
pub struct Dfa {
    states: usize,
    start: usize,
    accepting: BTreeSet<usize>,
    alphabet: BTreeSet<i64>,
    delta: BTreeMap<(usize, i64), usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DfaRepr {
    states: usize,
    start: usize,
    accepting: Vec<usize>,
    alphabet: Vec<i64>,
    /// `(from, symbol, to)`
    transitions: Vec<(usize, i64, usize)>,
}

impl TryFrom<DfaRepr> for Dfa {
    type Error = ModelError;

    fn try_from(r: DfaRepr) -> Result<Self, Self::Error> {
        Dfa::new(r.states, r.start, r.accepting, r.alphabet, r.transitions)
    }
}

impl From<Dfa> for DfaRepr {
    fn from(d: Dfa) -> Self {
        DfaRepr {
            states: d.states,
            start: d.start,
            accepting: d.accepting.into_iter().collect(),
            alphabet: d.alphabet.into_iter().collect(),
            transitions: d.delta.into_iter().map(|((q, a), t)| (q, a, t)).collect(),
        }
    }
}

impl Dfa {
    pub fn new(
        states: usize,
        start: usize,
        accepting: impl IntoIterator<Item = usize>,
        alphabet: impl IntoIterator<Item = i64>,
        transitions: impl IntoIterator<Item = (usize, i64, usize)>,
    ) -> Result<Dfa, ModelError> {
        if start >= states {
            return Err(ModelError::InvalidDfa(format!("start state {start} out of range 0..{states}")));
        }
        let accepting: BTreeSet<usize> = accepting.into_iter().collect();
        if let Some(&q) = accepting.iter().find(|&&q| q >= states) {
            return Err(ModelError::InvalidDfa(format!("accepting state {q} out of range 0..{states}")));
        }
        let alphabet: BTreeSet<i64> = alphabet.into_iter().collect();
        let mut delta = BTreeMap::new();
        for (from, symbol, to) in transitions {
            if from >= states || to >= states {
                return Err(ModelError::InvalidDfa(format!("transition {from} -{symbol}-> {to} leaves 0..{states}")));
            }
            if !alphabet.contains(&symbol) {
                return Err(ModelError::InvalidDfa(format!("symbol {symbol} is not in the alphabet")));
            }
            if delta.insert((from, symbol), to).is_some_and(|prev| prev != to) {
                return Err(ModelError::InvalidDfa(format!("state {from} has two transitions on {symbol}")));
            }
        }
        Ok(Dfa { states, start, accepting, alphabet, delta })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn alphabet(&self) -> &BTreeSet<i64> {
        &self.alphabet
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn step(&self, q: usize, symbol: i64) -> Option<usize> {
        self.delta.get(&(q, symbol)).copied()
    }

    pub fn accepts(&self, word: &[i64]) -> bool {
        word.iter().try_fold(self.start, |q, &a| self.step(q, a)).is_some_and(|q| self.is_accepting(q))
    }
}

#[derive(Debug)]
struct Regular {
    vars: Vec<VarId>,
    dfa: Dfa,
}

impl Propagator for Regular {
    fn name(&self) -> &'static str {
        "regular"
    }

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)> {
        self.vars.iter().map(|&v| (v, PropCondition::Domain)).collect()
    }

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult {
        let k = self.vars.len();
        let q = self.dfa.states;
        // Forward: states reachable from the start after i symbols.
        let mut fwd = vec![vec![false; q]; k + 1];
        fwd[0][self.dfa.start] = true;
        for i in 0..k {
            let dom = ctx.dom(self.vars[i]);
            for s in 0..q {
                if !fwd[i][s] {
                    continue;
                }
                for a in dom.iter() {
                    if let Some(t) = self.dfa.step(s, a) {
                        fwd[i + 1][t] = true;
                    }
                }
            }
        }
        // Backward: forward-reachable states that can still reach acceptance.
        let mut live = vec![vec![false; q]; k + 1];
        for s in 0..q {
            live[k][s] = fwd[k][s] && self.dfa.is_accepting(s);
        }
        let mut supported: Vec<Vec<i64>> = vec![Vec::new(); k];
        for i in (0..k).rev() {
            let dom = ctx.dom(self.vars[i]);
            for s in 0..q {
                if !fwd[i][s] {
                    continue;
                }
                for a in dom.iter() {
                    if let Some(t) = self.dfa.step(s, a) {
                        if live[i + 1][t] {
                            live[i][s] = true;
                            supported[i].push(a);
                        }
                    }
                }
            }
        }
        if !live[0][self.dfa.start] {
            return Err(Failure);
        }
        for (i, values) in supported.into_iter().enumerate() {
            ctx.intersect(self.vars[i], &Domain::from_values(values))?;
        }
        if self.vars.iter().all(|&v| ctx.is_assigned(v)) {
            Ok(Propagation::Subsumed)
        } else {
            Ok(Propagation::AtFixpoint)
        }
    }
}

impl Space {
    /// Posts "the word `vars[0] vars[1] ...` is accepted by `dfa`".
    pub fn post_regular(&mut self, vars: &[VarId], dfa: Dfa) -> Result<PropId, ModelError> {
        self.check_vars(vars)?;
        Ok(self.post(Regular { vars: vars.to_vec(), dfa }))
    }
}
