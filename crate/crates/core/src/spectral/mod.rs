//! The stability functional I₀ on cones, its Gamma-function closed form,
//! stability classification and the eigen-identities of the operator L₀.

mod functional;
mod operator;
mod stability;

pub use functional::{
    i0_closed_form, i0_family_quadrature, i0_quadrature, i0_untruncated_quadrature, ClosureEta,
    EtaFamily, I0Value, SpectralParams, TestFunction,
};
pub use operator::{
    l0_affine_exact, l0_affine_identity_residual, l0_identity_residual, l0_power_exact,
    l0_power_rhs, L0Residual,
};
pub use stability::{stability_classify, ConeEigendata, Stability};
