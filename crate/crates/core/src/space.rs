//! The constraint store: variable domains, posted propagators, and the
//! worklist that runs them to a common fixpoint.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::domain::{Domain, DomainEvent, VarId};
use crate::error::ModelError;

/// Handle to a posted propagator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropId(pub usize);

/// Minimum event strength on a variable that reschedules a subscriber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropCondition {
    /// Any change.
    Domain,
    /// Min or max changed, or the variable became assigned.
    Bounds,
    /// The variable became assigned.
    Value,
}

impl PropCondition {
    fn triggered_by(self, ev: DomainEvent) -> bool {
        let threshold = match self {
            PropCondition::Domain => DomainEvent::Prune,
            PropCondition::Bounds => DomainEvent::Bounds,
            PropCondition::Value => DomainEvent::Value,
        };
        ev >= threshold
    }
}

/// Outcome of one propagator run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropagatorStatus {
    Failed,
    AtFixpoint,
    /// Entailed by the current domains; the propagator is retired.
    Subsumed,
}

/// Marker for a wiped-out domain or a violated constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Failure;

/// Non-failing outcomes of a propagator run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagation {
    AtFixpoint,
    Subsumed,
}

pub type PropResult = Result<Propagation, Failure>;

impl From<PropResult> for PropagatorStatus {
    fn from(r: PropResult) -> Self {
        match r {
            Err(Failure) => PropagatorStatus::Failed,
            Ok(Propagation::AtFixpoint) => PropagatorStatus::AtFixpoint,
            Ok(Propagation::Subsumed) => PropagatorStatus::Subsumed,
        }
    }
}

/// A pruning rule. Propagators hold no mutable state, so they are shared
/// between copies of a space.
pub trait Propagator: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn subscriptions(&self) -> Vec<(VarId, PropCondition)>;

    fn propagate(&self, ctx: &mut Context<'_>) -> PropResult;
}

/// Domain access handed to a running propagator. Every narrowing is
/// recorded so subscribers can be rescheduled.
pub struct Context<'a> {
    domains: &'a mut [Domain],
    events: &'a mut Vec<(VarId, DomainEvent)>,
}

impl<'a> Context<'a> {
    pub fn dom(&self, v: VarId) -> &Domain {
        &self.domains[v.0]
    }

    pub fn min(&self, v: VarId) -> i64 {
        self.domains[v.0].min().expect("propagator ran on a failed domain")
    }

    pub fn max(&self, v: VarId) -> i64 {
        self.domains[v.0].max().expect("propagator ran on a failed domain")
    }

    pub fn value(&self, v: VarId) -> Option<i64> {
        self.domains[v.0].assigned_value()
    }

    pub fn is_assigned(&self, v: VarId) -> bool {
        self.domains[v.0].is_assigned()
    }

    fn record(&mut self, v: VarId, ev: DomainEvent) -> Result<DomainEvent, Failure> {
        match ev {
            DomainEvent::Failed => Err(Failure),
            DomainEvent::None => Ok(ev),
            _ => {
                self.events.push((v, ev));
                Ok(ev)
            }
        }
    }

    pub fn remove_below(&mut self, v: VarId, bound: i64) -> Result<DomainEvent, Failure> {
        let ev = self.domains[v.0].remove_below(bound);
        self.record(v, ev)
    }

    pub fn remove_above(&mut self, v: VarId, bound: i64) -> Result<DomainEvent, Failure> {
        let ev = self.domains[v.0].remove_above(bound);
        self.record(v, ev)
    }

    pub fn remove_value(&mut self, v: VarId, value: i64) -> Result<DomainEvent, Failure> {
        let ev = self.domains[v.0].remove_value(value);
        self.record(v, ev)
    }

    pub fn remove_range(&mut self, v: VarId, lo: i64, hi: i64) -> Result<DomainEvent, Failure> {
        let ev = self.domains[v.0].remove_range(lo, hi);
        self.record(v, ev)
    }

    pub fn assign(&mut self, v: VarId, value: i64) -> Result<DomainEvent, Failure> {
        let ev = self.domains[v.0].assign(value);
        self.record(v, ev)
    }

    pub fn intersect(&mut self, v: VarId, other: &Domain) -> Result<DomainEvent, Failure> {
        let ev = self.domains[v.0].intersect(other);
        self.record(v, ev)
    }
}

/// Result of running the store to fixpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceStatus {
    Stable,
    Solved,
    Failed,
}

/// Variables plus posted propagators. Cloning a space yields a fully
/// independent copy; propagator definitions are shared read-only.
#[derive(Clone)]
pub struct Space {
    domains: Vec<Domain>,
    props: Arc<Vec<Arc<dyn Propagator>>>,
    subscribers: Arc<Vec<Vec<(PropId, PropCondition)>>>,
    retired: Vec<bool>,
    queued: Vec<bool>,
    queue: VecDeque<PropId>,
    failed: bool,
}

impl Default for Space {
    fn default() -> Self {
        Space::new()
    }
}

impl Space {
    pub fn new() -> Space {
        Space {
            domains: Vec::new(),
            props: Arc::new(Vec::new()),
            subscribers: Arc::new(Vec::new()),
            retired: Vec::new(),
            queued: Vec::new(),
            queue: VecDeque::new(),
            failed: false,
        }
    }

    pub fn new_var(&mut self, domain: Domain) -> VarId {
        let id = VarId(self.domains.len());
        if domain.is_empty() {
            self.failed = true;
        }
        self.domains.push(domain);
        Arc::make_mut(&mut self.subscribers).push(Vec::new());
        id
    }

    pub fn new_var_range(&mut self, lo: i64, hi: i64) -> VarId {
        self.new_var(Domain::from_range(lo, hi))
    }

    pub fn new_bool(&mut self) -> VarId {
        self.new_var(Domain::from_range(0, 1))
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn num_propagators(&self) -> usize {
        self.props.len()
    }

    /// Propagators not yet retired by subsumption.
    pub fn active_propagators(&self) -> usize {
        self.retired.iter().filter(|r| !**r).count()
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        &self.domains[v.0]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.domains.len()).map(VarId)
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    pub fn all_assigned(&self) -> bool {
        self.domains.iter().all(Domain::is_assigned)
    }

    /// Values of all variables, if every one is assigned.
    pub fn assignment(&self) -> Option<Vec<i64>> {
        if self.failed {
            return None;
        }
        self.domains.iter().map(Domain::assigned_value).collect()
    }

    pub(crate) fn check_var(&self, v: VarId) -> Result<(), ModelError> {
        if v.0 < self.domains.len() {
            Ok(())
        } else {
            Err(ModelError::InvalidVar { var: v, count: self.domains.len() })
        }
    }

    pub(crate) fn check_vars(&self, vs: &[VarId]) -> Result<(), ModelError> {
        vs.iter().try_for_each(|&v| self.check_var(v))
    }

    pub(crate) fn check_bool(&self, v: VarId) -> Result<(), ModelError> {
        self.check_var(v)?;
        let d = &self.domains[v.0];
        if d.is_empty() || (d.min() >= Some(0) && d.max() <= Some(1)) {
            Ok(())
        } else {
            Err(ModelError::NonBoolean { var: v })
        }
    }

    /// Registers a propagator and schedules it for the next [`propagate`](Space::propagate).
    pub fn post<P: Propagator + 'static>(&mut self, prop: P) -> PropId {
        let id = PropId(self.props.len());
        let subs = prop.subscriptions();
        Arc::make_mut(&mut self.props).push(Arc::new(prop));
        let table = Arc::make_mut(&mut self.subscribers);
        for (v, cond) in subs {
            table[v.0].push((id, cond));
        }
        self.retired.push(false);
        self.queued.push(true);
        self.queue.push_back(id);
        id
    }

    /// Marks the space as failed.
    pub fn fail(&mut self) {
        self.failed = true;
        self.queue.clear();
        self.queued.iter_mut().for_each(|q| *q = false);
    }

    fn schedule(&mut self, v: VarId, ev: DomainEvent) {
        for &(p, cond) in &self.subscribers[v.0] {
            if !self.retired[p.0] && !self.queued[p.0] && cond.triggered_by(ev) {
                self.queued[p.0] = true;
                self.queue.push_back(p);
            }
        }
    }

    fn apply(&mut self, v: VarId, ev: DomainEvent) -> DomainEvent {
        match ev {
            DomainEvent::Failed => self.fail(),
            DomainEvent::None => {}
            _ => self.schedule(v, ev),
        }
        ev
    }

    /// Posts the basic constraint `v = value`.
    pub fn assign(&mut self, v: VarId, value: i64) -> DomainEvent {
        let ev = self.domains[v.0].assign(value);
        self.apply(v, ev)
    }

    /// Posts the basic constraint `v != value`.
    pub fn remove_value(&mut self, v: VarId, value: i64) -> DomainEvent {
        let ev = self.domains[v.0].remove_value(value);
        self.apply(v, ev)
    }

    /// Posts the basic constraint `v >= bound`.
    pub fn remove_below(&mut self, v: VarId, bound: i64) -> DomainEvent {
        let ev = self.domains[v.0].remove_below(bound);
        self.apply(v, ev)
    }

    /// Posts the basic constraint `v <= bound`.
    pub fn remove_above(&mut self, v: VarId, bound: i64) -> DomainEvent {
        let ev = self.domains[v.0].remove_above(bound);
        self.apply(v, ev)
    }

    pub fn intersect(&mut self, v: VarId, other: &Domain) -> DomainEvent {
        let ev = self.domains[v.0].intersect(other);
        self.apply(v, ev)
    }

    /// Runs scheduled propagators (FIFO) until none is scheduled or one fails.
    pub fn propagate(&mut self) -> SpaceStatus {
        if self.failed {
            return SpaceStatus::Failed;
        }
        let props = Arc::clone(&self.props);
        let mut events = Vec::new();
        while let Some(p) = self.queue.pop_front() {
            self.queued[p.0] = false;
            if self.retired[p.0] {
                continue;
            }
            events.clear();
            let result = {
                let mut ctx = Context { domains: &mut self.domains, events: &mut events };
                props[p.0].propagate(&mut ctx)
            };
            match result {
                Err(Failure) => {
                    self.fail();
                    return SpaceStatus::Failed;
                }
                Ok(Propagation::Subsumed) => self.retired[p.0] = true,
                Ok(Propagation::AtFixpoint) => {}
            }
            for &(v, ev) in &events {
                self.schedule(v, ev);
            }
        }
        if self.all_assigned() {
            SpaceStatus::Solved
        } else {
            SpaceStatus::Stable
        }
    }

    /// Runs a single propagator once, outside the worklist. Testing aid.
    pub fn run_propagator(&mut self, p: PropId) -> PropagatorStatus {
        if self.failed {
            return PropagatorStatus::Failed;
        }
        let props = Arc::clone(&self.props);
        let mut events = Vec::new();
        let result = {
            let mut ctx = Context { domains: &mut self.domains, events: &mut events };
            props[p.0].propagate(&mut ctx)
        };
        match result {
            Err(Failure) => self.fail(),
            Ok(Propagation::Subsumed) => self.retired[p.0] = true,
            Ok(Propagation::AtFixpoint) => {}
        }
        for &(v, ev) in &events {
            self.schedule(v, ev);
        }
        result.into()
    }

    pub fn is_retired(&self, p: PropId) -> bool {
        self.retired[p.0]
    }
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Space")
            .field("domains", &self.domains)
            .field("propagators", &self.props.iter().map(|p| p.name()).collect::<Vec<_>>())
            .field("failed", &self.failed)
            .finish()
    }
}
