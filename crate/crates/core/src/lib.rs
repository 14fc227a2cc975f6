//! Commonsense tabletop rearrangement planning.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`oracle`] asks a language model for symbolic relations between the
//!    objects ("Place fork to the left of plate") and retries until the
//!    answer passes the consistency check in [`relations`].
//! 2. The same model is asked for distances, which [`grounding`] turns into
//!    nominal table-frame coordinates and then into candidate configurations
//!    by Gaussian rejection sampling.
//! 3. [`tamp`] picks, for every candidate, the standing poses that trade
//!    placement feasibility against navigation cost, and keeps the best plan.
//! 4. [`sim`] executes plans under a stochastic failure model and scores the
//!    resulting layouts, alongside the baseline planners used for comparison.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, network
//! backends and the command line live in the companion `grop` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod geometry;
pub mod grid;
pub mod grounding;
pub mod oracle;
pub mod pipeline;
pub mod relations;
pub mod scene;
pub mod seed;
pub mod sim;
pub mod tamp;

pub use geometry::{Point2, Pose2, Shape};
pub use grid::{Cell, OccupancyGrid};
pub use relations::{Relation, RelationKind, RelationSet};
pub use scene::Scene;
