//! Mean curvature flow of real hypersurfaces in `CP^n` and `HP^n`.
//!
//! The crate is organised bottom-up:
//!
//! - [`ambient`]: curvature tensor, Einstein constant and curvature couplings
//!   of `KP^n(4)` in a model tangent space.
//! - [`spectrum`] and [`sampling`]: pinching functionals of a principal
//!   curvature spectrum and seeded samplers for them.
//! - [`profiles`]: geodesic spheres and tubes, whose flow reduces to an ODE in
//!   the radius.
//! - [`ode`] and [`flow`]: adaptive Runge–Kutta integration of that ODE and the
//!   dynamic checks (comparison bound, pinching preservation, evolution
//!   residuals).
//! - [`lab`]: randomized certification of the static inequalities.
//! - [`report`]: CSV/JSON output and the command implementations behind the
//!   `kpflow` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod error;
pub mod flow;
pub mod lab;
pub mod ode;
pub mod profiles;
pub mod report;
pub mod sampling;
pub mod spectrum;

pub use ambient::{
    curvature_coupling, curvature_tensor, make_space, random_adapted_frame, AmbientSpace, Coupling,
    CurvatureTensor, Field, FrameConfig, HSampler,
};
pub use error::{Error, Result};
pub use flow::{comparison_lower_bound, evolution_residuals, evolve, monitor_report, FlowTrajectory, StopPolicy};

pub use profiles::{pinched_interval, radial_riccati_oracle, EquivariantFamily, FamilyKind, RiccatiStart};
pub use spectrum::{AlphaChoice, PinchingParams, ShapeSpectrum};
