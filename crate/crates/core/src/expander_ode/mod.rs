//! Rotationally symmetric and one-dimensional self-expanders: solves,
//! barrier certificates, asymptotics and geometric identities.

mod bounds;
mod identities;
mod profile;
mod solve;

pub use bounds::{asymptotic_constant, asymptotic_fit, entire_limit_bounds, AsymptoticFit, LimitReport};
pub use identities::{
    mean_curvature_identity_residual, monotonicity_identity_check, MonotonicityReport,
    MonotonicityRow,
};
pub use profile::{Curvatures, RadialProfile};
pub use solve::{
    barrier_report, entire_profile, residual_j, residual_j_at, solve_1d, solve_1d_full_line,
    solve_rotational, solve_rotational_with, BarrierReport, BarrierSpec, ExpanderOde,
};
