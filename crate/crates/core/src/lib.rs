//! Mutual information extractable by POVM measurements on pairs of spins
//! that encode a uniformly random direction.
//!
//! The library covers the full chain: spin-1/2 geometry, rank-one POVMs and
//! their collective-rotation reduction, quadrature on the Bloch sphere,
//! Kullback-Leibler information gains, the closed-form Jensen bound with its
//! constrained maximization, and a catalog of reference measurements.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below fix the scalar for everyday use.

// `!(x > 0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod error;
pub mod geometry;
pub mod info;
pub mod optimizer;
pub mod povm;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{
    rotate_direction, signal_state, transition_probability, EnsembleKind, Rotation3, SphericalDirection, Spinor,
    TwoQubitState, UnitVector3,
};
pub use info::{
    bound_theta, conditional_probability, h_derivative, h_function, info_theta, mutual_information,
    outcome_probability, posterior_density, reduced_bound, reduced_info, reduced_outcome_probability, InfoReport,
    OutcomeInfo,
};
/// Complex type used by all amplitude APIs.
pub use num_complex;
pub use optimizer::{
    hessian_diagonal, numeric_maximize, parallel_map, solve_stationarity, Objective, OptimizationResult,
};
pub use povm::{
    apply_collective_rotation, entanglement_measure, feasibility_check, reduce_product_measurement,
    validate_completeness, Povm, PovmElement, ProductElement, ReducedMeasurement,
};
pub use quadrature::{build_grid, integrate, integrate_with_refinement, SphereGrid};
pub use scalar::Real;

pub type SphericalDirectionF64 = SphericalDirection<f64>;
pub type UnitVector3F64 = UnitVector3<f64>;
pub type Rotation3F64 = Rotation3<f64>;
pub type SpinorF64 = Spinor<f64>;
pub type TwoQubitStateF64 = TwoQubitState<f64>;
pub type PovmElementF64 = PovmElement<f64>;
pub type PovmF64 = Povm<f64>;
pub type ProductElementF64 = ProductElement<f64>;
pub type ReducedMeasurementF64 = ReducedMeasurement<f64>;
pub type SphereGridF64 = SphereGrid<f64>;
pub type InfoReportF64 = InfoReport<f64>;
pub type OptimizationResultF64 = OptimizationResult<f64>;
pub type NamedMeasurementF64 = catalog::NamedMeasurement<f64>;

pub type SphereGridF32 = SphereGrid<f32>;
pub type PovmF32 = Povm<f32>;
