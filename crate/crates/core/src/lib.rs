//! State-lattice regional planner with previous-plan arbitration.
//!
//! Each planning cycle produces a fresh lattice plan, re-times the
//! previously published plan on the current map, repairs it on a lattice
//! aligned with its shape when it collides, and publishes the fresh plan
//! only when it is sufficiently cheaper than the kept one.

// Negated comparisons double as NaN rejection in parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arbiter;
pub mod gridmap;
pub mod harness;
pub mod lattice;
pub mod metrics;
pub mod search;
