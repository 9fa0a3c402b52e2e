//! Fabry-Pérot cavity model for interaction-free detection of semitransparent
//! objects.
//!
//! The crate is organised bottom-up:
//!
//! - [`cavity`]: physical parameters, steady-state port coefficients
//!   (reflection, transmission, absorption), flux bound and the optional
//!   optomechanical fixed-point solver.
//! - [`metrics`]: per-port signal-to-noise ratio, total security and their
//!   product, plus the inversion from a target SNR back to a photon budget.
//! - [`optimizer`]: closed-form optimal photon number, constrained maxima over
//!   the (coupling efficiency, photon number) plane and two-parameter sweeps.
//! - [`montecarlo`]: a seeded Poisson/Bernoulli photon-counting simulator
//!   used as an independent check on the analytic metrics.
//! - [`cli`]: run configuration, table serialisation, run manifests and the
//!   subcommand implementations behind the `ifm-cavity` binary.
//!
//! All rates and detunings are stored as ordinary frequencies, i.e. the value
//! of `X / 2π` in Hz.

pub mod cavity;
pub mod cli;
mod error;
pub mod metrics;
pub mod montecarlo;
pub mod optimizer;

pub use cavity::{
    g0_max, max_photon_flux, per_photon_security, port_coefficients, solve_steady_state,
    CavitySpec, ObjectState, OptomechanicalParams, PortCoefficients, SteadyStateSolution,
};
pub use error::{Error, Result};
pub use metrics::{
    n0_for_snr, security_vs_snr_curve, snr, total_security, zeta, DetectorSpec, Detectors,
    MetricsBundle, OperatingPoint, Port,
};
pub use optimizer::{
    maximize_zeta, optimal_n0_at_xi, sweep_kappa3_delta_p, sweep_xi, Axis, AxisScale, Constraints,
    N0Range, OptimumReport, RegimeMaps, SweepGrid,
};
