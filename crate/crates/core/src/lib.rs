//! Sharp starlikeness bounds for weighted integral transforms of
//! Bazilevič type, with the numerical machinery to check them.
//!
//! The pipeline runs bottom-up: [`ParameterSet`] fixes `(alpha, gamma,
//! delta, zeta)`, a [`Weight`] fixes `lambda`, [`beta::solve_beta`] gives the
//! sharp order, [`conditions`] checks the sufficient conditions and
//! [`verify`] tests the resulting functions on grids in the disk.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beta;
pub mod conditions;
pub mod error;
pub mod kernel;
pub mod params;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod transform;
pub mod verify;
pub mod weight;

pub use beta::{BetaMethod, BetaResult};
pub use conditions::{ConditionReport, HxiEvaluator, TheoremId};
pub use error::{Error, Result};
pub use params::{ParamWarning, ParameterSet};
pub use series::PowerSeries;
pub use transform::TestFunctionSpec;
pub use verify::{DiskGrid, VerificationReport};
pub use weight::{Weight, WeightKind, WeightSpec};
