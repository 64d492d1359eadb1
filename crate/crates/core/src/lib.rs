//! Finite-domain constraint propagation and search, with builders for two
//! musical problems: all-interval series and motive-constrained melodies.
//!
//! A [`Space`] holds variable [`Domain`]s and posted propagators. Calling
//! [`Space::propagate`] narrows domains to a common fixpoint; the engines in
//! [`search`] then branch on `x = v` / `x != v` until every variable is fixed.
//!
//! ```
//! use fdmusic::{Relation, Space, SpaceStatus};
//!
//! let mut s = Space::new();
//! let p1 = s.new_var_range(36, 72);
//! let p2 = s.new_var_range(60, 80);
//! s.post_binary(p1, Relation::Gt, p2, 2).unwrap();
//! assert_eq!(s.propagate(), SpaceStatus::Stable);
//! assert_eq!(s.domain(p1).ranges(), &[(63, 72)]);
//! assert_eq!(s.domain(p2).ranges(), &[(60, 69)]);
//! ```

pub mod domain;
pub mod error;
pub mod models;
pub mod oracle;
pub mod pitch;
pub mod propagators;
pub mod search;
pub mod space;

pub use domain::{Domain, DomainEvent, VarId};
pub use error::ModelError;
pub use models::{Constraint, JarrellSpec, Model, ModelSpec, Motive};
pub use propagators::intervals::IntervalMode;
pub use propagators::linear::{LinearTerm, Relation};
pub use propagators::regular::Dfa;
pub use search::{Objective, SearchOptions, SearchOutcome, Solution, ValHeuristic, VarHeuristic};
pub use space::{PropId, PropagatorStatus, Space, SpaceStatus};
