//! Relativistic string: momentum 2-form algebra, worldsheet residuals and
//! the light-cone gauge solver.

pub mod algebra;
pub mod light_cone;
pub mod sheet;

pub use algebra::{
    em_boundary_residual, field_strength_bulk_term, identity_suite, momentum_currents, pi_components,
    EndpointSample, IdentityReport, MomentumCurrent, StringMomentumForm,
};
pub use light_cone::{
    endpoint_null_check, light_cone_metric, null_end_residual, reconstruct_y, solve_light_cone,
    EndpointCheck, FourierMode, LightConeInit, LightConeState, ModeKind, Profile, YField,
};
pub use sheet::{EomResidual, StringSheet, Topology, Window};
