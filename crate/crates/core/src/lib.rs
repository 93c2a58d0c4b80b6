//! Dual quermassintegrals of star bodies, realizability of prescribed tuples
//! through moment problems, constructive witnesses, and the roots of dual
//! Steiner polynomials.

// `!(x <= tol)` is the NaN-rejecting form of every tolerance test here.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod error;
pub mod format;
pub mod grid;
pub mod linalg;
pub mod lp;
pub mod measure;
pub mod moment;
pub mod optimize;
pub mod poly;
pub mod quadrature;
pub mod quermass;
pub mod random;
pub mod rootcone;
pub mod special;
pub mod steiner;
pub mod synth;

pub use body::{ratio_range, BodyKind, Interpolation, StarBody, ZonalAxis};
pub use error::{Error, Result};
pub use grid::SphereGrid;
pub use measure::{Interval, IntervalMeasure};
pub use moment::{ConeStatus, ConeVerdict, Feasibility, MomentConfig};
pub use quermass::{dual_quermass, quermass_tuple, QuermassTuple};
pub use rootcone::{ConeQuery, ConeWitness, Membership};
pub use steiner::{DualSteinerPoly, RootSet, RootTransform, Stability};
