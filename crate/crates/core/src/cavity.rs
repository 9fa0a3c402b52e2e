//! Cavity parameter model and steady-state coefficients.
//!
//! A two-mirror cavity is pumped through the input mirror (port 1). Light
//! leaves through the input mirror (reflection), the end mirror
//! (transmission) or is absorbed by the object (port 3). With mode-matching
//! efficiency `ε`, total decay `κ` and detuning `Δ` the steady-state
//! probabilities are
//!
//! ```text
//! R = 1 − ε κ₁ (κ − κ₁) / ((κ/2)² + Δ²)
//! T =     ε κ₁ κ₂       / ((κ/2)² + Δ²)
//! A =     ε κ₁ κ₃       / ((κ/2)² + Δ²)
//! ```
//!
//! The mirror rates are parameterised by the empty-cavity coupling efficiency
//! `ξ = κ₁ / (κ₁ + κ₂)`. The expressions are homogeneous in `(κ, Δ)`, so
//! every rate is stored in Hz as `X / 2π`. Only the optomechanical solver
//! works in angular units.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cavity, object and drive parameters. Rates and detunings in Hz (`X / 2π`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    /// Empty-cavity total decay rate `κ_A`.
    pub kappa_a: f64,
    /// Decay rate through absorption by the object, `κ₃`. Zero means no object.
    pub kappa_3: f64,
    /// Detuning without the object, `Δ_A`.
    pub delta_a: f64,
    /// Detuning with the object inside, `Δ_P`.
    pub delta_p: f64,
    /// Mode-matching efficiency without the object.
    pub epsilon_a: f64,
    /// Mode-matching efficiency with the object inside.
    pub epsilon_p: f64,
    /// Empty-cavity coupling efficiency `ξ = κ₁ / (κ₁ + κ₂)`, open interval (0, 1).
    pub xi: f64,
}

impl Default for CavitySpec {
    /// The headline system: a membrane roughly as lossy as the mirrors,
    /// detuning the cavity by more than a linewidth.
    fn default() -> Self {
        CavitySpec {
            kappa_a: 1.5e7,
            kappa_3: 6.5e6,
            delta_a: 0.0,
            delta_p: 2.0e7,
            epsilon_a: 1.0,
            epsilon_p: 0.2,
            xi: 0.5,
        }
    }
}

impl CavitySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_a.is_finite() && self.kappa_a > 0.0) {
            return Err(Error::invalid(
                "kappa_a",
                format!("must be finite and > 0, got {}", self.kappa_a),
            ));
        }
        if !(self.kappa_3.is_finite() && self.kappa_3 >= 0.0) {
            return Err(Error::invalid(
                "kappa_3",
                format!("must be finite and >= 0, got {}", self.kappa_3),
            ));
        }
        if !self.delta_a.is_finite() {
            return Err(Error::invalid("delta_a", "must be finite"));
        }
        if !self.delta_p.is_finite() {
            return Err(Error::invalid("delta_p", "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.epsilon_a) {
            return Err(Error::invalid(
                "epsilon_a",
                format!("must lie in [0, 1], got {}", self.epsilon_a),
            ));
        }
        if !(0.0..=1.0).contains(&self.epsilon_p) {
            return Err(Error::invalid(
                "epsilon_p",
                format!("must lie in [0, 1], got {}", self.epsilon_p),
            ));
        }
        check_xi(self.xi)
    }

    /// Same cavity with a different coupling efficiency.
    pub fn with_xi(&self, xi: f64) -> Result<CavitySpec> {
        check_xi(xi)?;
        Ok(CavitySpec { xi, ..*self })
    }

    /// Input-mirror decay rate `κ₁ = ξ κ_A`.
    pub fn kappa_1(&self) -> f64 {
        self.xi * self.kappa_a
    }

    /// End-mirror decay rate. Taken as `κ_A − κ₁` so the two mirror rates
    /// sum back to `κ_A`.
    pub fn kappa_2(&self) -> f64 {
        self.kappa_a - self.kappa_1()
    }

    /// Total decay rate in the given state.
    pub fn kappa(&self, state: ObjectState) -> f64 {
        match state {
            ObjectState::Absent => self.kappa_a,
            ObjectState::Present => self.kappa_a + self.kappa_3,
        }
    }

    pub fn detuning(&self, state: ObjectState) -> f64 {
        match state {
            ObjectState::Absent => self.delta_a,
            ObjectState::Present => self.delta_p,
        }
    }

    pub fn mode_matching(&self, state: ObjectState) -> f64 {
        match state {
            ObjectState::Absent => self.epsilon_a,
            ObjectState::Present => self.epsilon_p,
        }
    }

    /// Absorption rate seen in the given state; zero without the object.
    pub fn absorption_rate(&self, state: ObjectState) -> f64 {
        match state {
            ObjectState::Absent => 0.0,
            ObjectState::Present => self.kappa_3,
        }
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "xi",
            format!("must lie in (0, 1), got {xi}"),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectState {
    Absent,
    Present,
}

/// Probabilities that a photon leaves by reflection, transmission or is absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortCoefficients {
    pub r: f64,
    pub t: f64,
    pub a: f64,
}

impl PortCoefficients {
    pub fn sum(&self) -> f64 {
        self.r + self.t + self.a
    }
}

/// Steady-state reflection, transmission and absorption coefficients.
pub fn port_coefficients(spec: &CavitySpec, state: ObjectState) -> Result<PortCoefficients> {
    spec.validate()?;
    let kappa = spec.kappa(state);
    let delta = spec.detuning(state);
    let eps = spec.mode_matching(state);
    let k1 = spec.kappa_1();
    let k2 = spec.kappa_2();
    let k3 = spec.absorption_rate(state);

    let half = 0.5 * kappa;
    let lorentz = eps * k1 / (half * half + delta * delta);
    let t = lorentz * k2;
    let a = lorentz * k3;
    // κ − κ₁ = κ₂ + κ₃ up to rounding; the clamp only absorbs the last ulp
    // on an impedance-matched resonance.
    let r = (1.0 - lorentz * (k2 + k3)).clamp(0.0, 1.0);
    Ok(PortCoefficients { r, t, a })
}

/// Single-photon security `η = 1 − A` with the object present.
pub fn per_photon_security(spec: &CavitySpec) -> Result<f64> {
    let c = port_coefficients(spec, ObjectState::Present)?;
    Ok(1.0 - c.a)
}

/// Largest input flux (photons/s) compatible with at most one intracavity
/// photon on average: the object-present linewidth `κ_P / 2π`.
pub fn max_photon_flux(spec: &CavitySpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.kappa(ObjectState::Present))
}

/// Checks an input flux against [`max_photon_flux`].
pub fn check_photon_flux(spec: &CavitySpec, flux: f64) -> Result<()> {
    if !(flux.is_finite() && flux >= 0.0) {
        return Err(Error::invalid(
            "flux",
            format!("must be finite and >= 0, got {flux}"),
        ));
    }
    let bound = max_photon_flux(spec)?;
    if flux > bound {
        return Err(Error::FluxExceedsBound { flux, bound });
    }
    Ok(())
}

/// Mechanical and geometric parameters of a compliant object (angular units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptomechanicalParams {
    /// Vacuum optomechanical coupling rate, rad/s.
    pub g0: f64,
    /// Mechanical mode frequency, rad/s.
    pub omega_m: f64,
    /// Cavity resonance frequency, rad/s.
    pub omega_c: f64,
    /// Cavity length, m.
    pub cavity_length: f64,
    /// Membrane field reflectivity magnitude.
    pub r_m: f64,
    /// Zero-point fluctuation amplitude, m.
    pub x_zpf: f64,
    /// Drive power in photon units, photons/s.
    pub drive_photon_flux: f64,
}

impl OptomechanicalParams {
    pub fn validate(&self) -> Result<()> {
        // g0 = 0 is the no-back-action limit and stays admissible.
        if !(self.g0.is_finite() && self.g0 >= 0.0) {
            return Err(Error::invalid(
                "g0",
                format!("must be >= 0, got {}", self.g0),
            ));
        }
        let positive = [
            ("omega_m", self.omega_m),
            ("omega_c", self.omega_c),
            ("cavity_length", self.cavity_length),
            ("x_zpf", self.x_zpf),
            ("drive_photon_flux", self.drive_photon_flux),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {value}")));
            }
        }
        if !(0.0..=1.0).contains(&self.r_m) {
            return Err(Error::invalid(
                "r_m",
                format!("must lie in [0, 1], got {}", self.r_m),
            ));
        }
        Ok(())
    }
}

/// Largest vacuum coupling rate, reached halfway between a node and an
/// antinode of the intracavity intensity: `2 (ω_c / L) |r_m| x_zpf`.
pub fn g0_max(params: &OptomechanicalParams) -> f64 {
    2.0 * (params.omega_c / params.cavity_length) * params.r_m.abs() * params.x_zpf
}

/// One self-consistent steady state of the driven optomechanical cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSolution {
    /// Intracavity photon number `|α|²`.
    pub alpha_sq: f64,
    /// Mechanical steady-state amplitude `β = −g₀ |α|² / ω_m`.
    pub beta: f64,
    /// Radiation-pressure shifted detuning, Hz.
    pub delta_shifted: f64,
    /// Number of real roots of the fixed-point cubic (1 or 3).
    pub branch_count: usize,
}

const STEADY_STATE_TOL: f64 = 1e-10;

/// Solves the radiation-pressure fixed point with the object present.
///
/// With `n = |α|²`, `c = 2 g₀² / ω_m` and the bare detuning `Δ_A`, the
/// intracavity photon number satisfies
///
/// ```text
/// n [ (κ/2)² + (Δ_A − c n)² ] = κ₁ ε |a_in|²
/// ```
///
/// Every real root is returned in ascending order. In the bistable regime
/// there are three and none is preferred.
pub fn solve_steady_state(
    spec: &CavitySpec,
    params: &OptomechanicalParams,
) -> Result<Vec<SteadyStateSolution>> {
    spec.validate()?;
    params.validate()?;

    let state = ObjectState::Present;
    let half = PI * spec.kappa(state); // κ/2 in rad/s
    let delta = 2.0 * PI * spec.delta_a;
    let pump = 2.0 * PI * spec.kappa_1() * spec.mode_matching(state) * params.drive_photon_flux;
    let c = 2.0 * params.g0 * params.g0 / params.omega_m;
    let cubic = FixedPointCubic {
        c,
        delta,
        half_sq: half * half,
        pump,
    };

    let roots = cubic.roots()?;
    let branch_count = roots.len();
    Ok(roots
        .into_iter()
        .map(|n| SteadyStateSolution {
            alpha_sq: n,
            beta: -params.g0 * n / params.omega_m,
            delta_shifted: (delta - c * n) / (2.0 * PI),
            branch_count,
        })
        .collect())
}

/// `f(n) = c² n³ − 2 Δ c n² + ((κ/2)² + Δ²) n − P`.
#[derive(Debug, Clone, Copy)]
struct FixedPointCubic {
    c: f64,
    delta: f64,
    half_sq: f64,
    pump: f64,
}

impl FixedPointCubic {
    fn eval(&self, n: f64) -> f64 {
        let shifted = self.delta - self.c * n;
        n * (self.half_sq + shifted * shifted) - self.pump
    }

    fn derivative(&self, n: f64) -> f64 {
        let c = self.c;
        3.0 * c * c * n * n - 4.0 * self.delta * c * n + self.half_sq + self.delta * self.delta
    }

    fn relative_residual(&self, n: f64) -> f64 {
        let c = self.c;
        let scale = c * c * n.powi(3)
            + 2.0 * (self.delta * c).abs() * n * n
            + (self.half_sq + self.delta * self.delta) * n
            + self.pump;
        if scale == 0.0 {
            0.0
        } else {
            self.eval(n).abs() / scale
        }
    }

    fn roots(&self) -> Result<Vec<f64>> {
        if self.pump == 0.0 {
            return Ok(vec![0.0]);
        }
        // f(n) >= (κ/2)² n − P, so every root lies below P / (κ/2)².
        let upper = self.pump / self.half_sq;

        let mut roots = Vec::with_capacity(3);
        match self.critical_points() {
            Some((lo, hi)) if lo > 0.0 && hi < upper => {
                let f_lo = self.eval(lo);
                let f_hi = self.eval(hi);
                if f_lo > 0.0 {
                    roots.push(self.bracketed_root(0.0, lo)?);
                }
                if f_lo >= 0.0 && f_hi <= 0.0 {
                    // A double root at a critical point collapses two branches.
                    if f_lo > 0.0 && f_hi < 0.0 {
                        roots.push(self.bracketed_root(lo, hi)?);
                    } else if f_lo == 0.0 {
                        roots.push(lo);
                    }
                }
                if f_hi < 0.0 {
                    roots.push(self.bracketed_root(hi, upper)?);
                } else if f_hi == 0.0 && f_lo > 0.0 {
                    roots.push(hi);
                }
            }
            _ => roots.push(self.bracketed_root(0.0, upper)?),
        }

        for &n in &roots {
            let residual = self.relative_residual(n);
            if residual.is_nan() || residual >= STEADY_STATE_TOL {
                return Err(Error::NoConvergence { residual });
            }
        }
        roots.dedup();
        Ok(roots)
    }

    /// Local maximum and minimum of `f`, present only when `Δ² > 3 (κ/2)²`.
    fn critical_points(&self) -> Option<(f64, f64)> {
        if self.c == 0.0 {
            return None;
        }
        let disc = self.delta * self.delta - 3.0 * self.half_sq;
        if disc <= 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let a = (2.0 * self.delta - root) / (3.0 * self.c);
        let b = (2.0 * self.delta + root) / (3.0 * self.c);
        Some((a.min(b), a.max(b)))
    }

    /// Safeguarded Newton iteration on a sign-changing bracket.
    fn bracketed_root(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let f_lo = self.eval(lo);
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if self.eval(hi) == 0.0 {
            return Ok(hi);
        }
        let ascending = f_lo < 0.0;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..400 {
            let fx = self.eval(x);
            if fx == 0.0 {
                return Ok(x);
            }
            if (fx < 0.0) == ascending {
                lo = x;
            } else {
                hi = x;
            }
            if (hi - lo) <= 4.0 * f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            let d = self.derivative(x);
            let newton = x - fx / d;
            x = if d != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        let residual = self.relative_residual(x);
        if residual < STEADY_STATE_TOL {
            Ok(x)
        } else {
            Err(Error::NoConvergence { residual })
        }
    }
}
