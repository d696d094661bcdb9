//! Concrete instances: a scalar point-interaction model with closed forms and
//! a discretized one-dimensional Fock hierarchy.

pub mod point;
pub mod polaron;

pub use point::{point_dtn, point_green, point_scalar_suite, point_symmetry_form, point_trace_right_inverse_check};
pub use polaron::{
    build_polaron, continuum_g_norm, continuum_t_bound, g_mu_l2_norm, local_b_estimate, pointwise_robin_relation, polaron_g_norm,
    polaron_invariance_report, polaron_sector_dtn, structured, LaplacianBc, LocalBEstimate, PointwiseRobin, PolaronConfig,
    PolaronSetting, SectorBasis, SectorDtn,
};
