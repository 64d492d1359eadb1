//! The finite-domain constraint catalog. Each constraint is posted through a
//! `post_*` method on [`Space`](crate::Space).

mod arith;
mod boolean;
mod count;
mod distinct;
pub mod intervals;
pub mod linear;
pub mod regular;
