//! Reflection factor of a half space filled with a confined scalar field, and the
//! Casimir energy between two such half spaces.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The aliases below
//! fix the scalar for the common double-precision case.

// NaN-rejecting comparisons are written as negations on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cache;
pub mod energy;
pub mod error;
pub mod oracle;
pub mod polylog;
pub mod quadrature;
pub mod reflection;
pub mod scalar;
pub mod table;
pub mod verify;

pub use asymptotics::{
    asymptotic_value, fit_asymptotic_constant, AsymptoticConstants, AsymptoticRegime, Component, FitModel,
    Regime, SubleadingMassPower,
};
pub use cache::ReflectionTable;
pub use energy::{
    casimir_energy, casimir_energy_with, dirichlet_reference, energy_integrand, eta_curve, large_separation_limit,
    CachedReflection, DirectReflection, EnergyCurve, EnergyResult, FrozenReflection, ReflectionProvider,
    Separation,
};
pub use error::{Axis, Error, Result};
pub use polylog::li4;
pub use quadrature::{
    integrate_1d, integrate_2d, integrate_2d_nested, integrate_semi_infinite, EndpointTransform, IntegralResult,
    Nesting, QuadratureSpec, Rect,
};
pub use reflection::{
    n_minus_minus, n_minus_plus, n_nt, n_t_renormalized, n_total, n_zero_limit, sector_integrand, CouplingMode,
    EuclideanMomentum, ModelParams, ReflectionBreakdown, Sector,
};
pub use scalar::Real;
pub use table::{Cell, CurveTable};

pub type QuadratureSpecF64 = QuadratureSpec<f64>;
pub type QuadratureSpecF32 = QuadratureSpec<f32>;
pub type ModelParamsF64 = ModelParams<f64>;
pub type ModelParamsF32 = ModelParams<f32>;
pub type ReflectionBreakdownF64 = ReflectionBreakdown<f64>;
pub type EnergyResultF64 = EnergyResult<f64>;
pub type EnergyCurveF64 = EnergyCurve<f64>;
pub type SeparationF64 = Separation<f64>;
pub type EuclideanMomentumF64 = EuclideanMomentum<f64>;
