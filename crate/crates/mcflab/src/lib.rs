//! mcflab: a numerical laboratory for mean curvature flow of closed
//! hypersurfaces.
//!
//! The crate evolves plane curves, hypersurfaces of revolution and analytic
//! round spheres under the flow dF/dt = -H nu, tracks the space-time integral
//! curvature norms whose finiteness governs extendability past the final
//! time, verifies the evolution equations and the parabolic-rescaling
//! invariants by finite differences, and evaluates the explicit
//! Sobolev/Moser constant chain behind the sup bound on H^2.

pub mod analysis;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod monitors;
pub mod oracles;

pub use error::{Error, Result};
pub use flow::{
    adaptive_dt, run_flow, step, FlowConfig, FlowTrajectory, StepRecord, StopReason,
    TrajectoryFrame,
};
pub use geometry::{
    area_integral, compute_geometry, compute_geometry_at, laplace_beltrami, GeometryFrame,
    Immersion,
};
pub use monitors::{
    dichotomy_fit, extension_report, hypothesis_monitor, monitor_report, update_accumulators,
    DichotomyFit, DichotomyVerdict, ExtensionReport, MonitorConfig, MonitorReport, MonitorRow,
    NormAccumulator, Quantity,
};
pub use analysis::{
    evolution_residual, moser_constants, parabolic_rescale, pinching_evolution_residual,
    sobolev_constant, spacetime_norm_invariance_check, spatial_norm_invariance_check,
    verify_moser_bound, EvolutionEquation, InvarianceCheck, MoserBoundReport, MoserConstants,
    PinchingResidual, RescaleSpec,
};
pub use oracles::{make_initial, sphere_spacetime_norm, InitialShape, SphereSolution};
