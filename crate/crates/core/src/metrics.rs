//! Figures of merit for telling "object present" from "object absent".
//!
//! A detector in port `j` (reflection or transmission) counts photons in both
//! cases. The signal is the difference of the expected counts and the noise is
//! the Poisson spread of both totals, dark counts included:
//!
//! ```text
//! SNR_j = √N₀ χ |J_A − J_P| / √(χ (J_A + J_P) + 2 D)
//! ```
//!
//! The total security is the probability that none of the `N₀` photons is
//! absorbed, `η_tot = (1 − A)^N₀`, and `ζ_j = SNR_j · η_tot` is the merit
//! product that the optimizer maximises.

use serde::{Deserialize, Serialize};

use crate::cavity::{port_coefficients, CavitySpec, ObjectState, PortCoefficients};
use crate::error::{Error, Result};

/// Accessible output port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Reflection,
    Transmission,
}

impl Port {
    pub const BOTH: [Port; 2] = [Port::Reflection, Port::Transmission];

    /// The coefficient this port observes.
    pub fn select(self, coeffs: &PortCoefficients) -> f64 {
        match self {
            Port::Reflection => coeffs.r,
            Port::Transmission => coeffs.t,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Port::Reflection => "reflection",
            Port::Transmission => "transmission",
        }
    }
}

impl std::fmt::Display for Port {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Quantum efficiency and dark-count ratio `D = C_dark / C₀` of one detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub chi: f64,
    pub dark_ratio: f64,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        DetectorSpec {
            chi: 0.5,
            dark_ratio: 1e-3,
        }
    }
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.chi > 0.0 && self.chi <= 1.0) {
            return Err(Error::invalid(
                "chi",
                format!("must lie in (0, 1], got {}", self.chi),
            ));
        }
        if !(self.dark_ratio.is_finite() && self.dark_ratio >= 0.0) {
            return Err(Error::invalid(
                "dark_ratio",
                format!("must be finite and >= 0, got {}", self.dark_ratio),
            ));
        }
        Ok(())
    }
}

/// One detector per accessible port.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Detectors {
    pub reflection: DetectorSpec,
    pub transmission: DetectorSpec,
}

impl Detectors {
    pub fn get(&self, port: Port) -> &DetectorSpec {
        match port {
            Port::Reflection => &self.reflection,
            Port::Transmission => &self.transmission,
        }
    }
}

/// A point in the (coupling efficiency, photon number) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub xi: f64,
    pub n0: f64,
}

impl OperatingPoint {
    pub fn new(xi: f64, n0: f64) -> Result<Self> {
        let point = OperatingPoint { xi, n0 };
        point.validate()?;
        Ok(point)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(Error::invalid(
                "xi",
                format!("must lie in (0, 1), got {}", self.xi),
            ));
        }
        check_n0(self.n0)
    }
}

fn check_n0(n0: f64) -> Result<()> {
    if n0.is_finite() && n0 >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "n0",
            format!("must be finite and >= 0, got {n0}"),
        ))
    }
}

/// Everything worth plotting at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsBundle {
    pub point: OperatingPoint,
    pub coeffs_a: PortCoefficients,
    pub coeffs_p: PortCoefficients,
    pub eta: f64,
    pub eta_tot: f64,
    /// `[reflection, transmission]`
    pub snr: [f64; 2],
    /// `[reflection, transmission]`
    pub zeta: [f64; 2],
}

impl MetricsBundle {
    pub fn evaluate(spec: &CavitySpec, dets: &Detectors, point: OperatingPoint) -> Result<Self> {
        point.validate()?;
        let spec = spec.with_xi(point.xi)?;
        let coeffs_a = port_coefficients(&spec, ObjectState::Absent)?;
        let coeffs_p = port_coefficients(&spec, ObjectState::Present)?;
        let eta = 1.0 - coeffs_p.a;
        let eta_tot = eta.powf(point.n0);
        let mut snr_pair = [0.0; 2];
        let mut zeta_pair = [0.0; 2];
        for (i, port) in Port::BOTH.into_iter().enumerate() {
            let det = dets.get(port);
            det.validate()?;
            let s = snr_from(
                port.select(&coeffs_a),
                port.select(&coeffs_p),
                det,
                point.n0,
            )?;
            snr_pair[i] = s;
            zeta_pair[i] = s * eta_tot;
        }
        Ok(MetricsBundle {
            point,
            coeffs_a,
            coeffs_p,
            eta,
            eta_tot,
            snr: snr_pair,
            zeta: zeta_pair,
        })
    }

    pub fn snr_at(&self, port: Port) -> f64 {
        self.snr[port_index(port)]
    }

    pub fn zeta_at(&self, port: Port) -> f64 {
        self.zeta[port_index(port)]
    }
}

fn port_index(port: Port) -> usize {
    match port {
        Port::Reflection => 0,
        Port::Transmission => 1,
    }
}

/// `(J_A, J_P)` for the port, both states evaluated at `spec.xi`.
pub fn port_pair(spec: &CavitySpec, port: Port) -> Result<(f64, f64)> {
    let absent = port_coefficients(spec, ObjectState::Absent)?;
    let present = port_coefficients(spec, ObjectState::Present)?;
    Ok((port.select(&absent), port.select(&present)))
}

fn noise_factor(j_a: f64, j_p: f64, det: &DetectorSpec) -> Result<f64> {
    let noise = det.chi * (j_a + j_p) + 2.0 * det.dark_ratio;
    if noise > 0.0 {
        Ok(noise)
    } else {
        Err(Error::DegenerateNoise)
    }
}

fn snr_from(j_a: f64, j_p: f64, det: &DetectorSpec, n0: f64) -> Result<f64> {
    let noise = noise_factor(j_a, j_p, det)?;
    Ok(n0.sqrt() * det.chi * (j_a - j_p).abs() / noise.sqrt())
}

/// Signal-to-noise ratio of a detector in `port` after `n0` input photons.
pub fn snr(spec: &CavitySpec, det: &DetectorSpec, port: Port, n0: f64) -> Result<f64> {
    det.validate()?;
    check_n0(n0)?;
    let (j_a, j_p) = port_pair(spec, port)?;
    snr_from(j_a, j_p, det, n0)
}

/// Probability that none of `n0` photons is absorbed, `(1 − A)^n0`.
pub fn total_security(spec: &CavitySpec, n0: f64) -> Result<f64> {
    check_n0(n0)?;
    let present = port_coefficients(spec, ObjectState::Present)?;
    Ok((1.0 - present.a).powf(n0))
}

/// Merit product `SNR · η_tot` at `point`; `point.xi` overrides `spec.xi`.
pub fn zeta(
    spec: &CavitySpec,
    det: &DetectorSpec,
    port: Port,
    point: OperatingPoint,
) -> Result<f64> {
    point.validate()?;
    let spec = spec.with_xi(point.xi)?;
    Ok(snr(&spec, det, port, point.n0)? * total_security(&spec, point.n0)?)
}

/// Photon number needed to reach `target_snr`, i.e. the inverse of [`snr`] in `N₀`.
pub fn n0_for_snr(
    spec: &CavitySpec,
    det: &DetectorSpec,
    port: Port,
    target_snr: f64,
) -> Result<f64> {
    det.validate()?;
    if !(target_snr.is_finite() && target_snr >= 0.0) {
        return Err(Error::invalid(
            "target_snr",
            format!("must be finite and >= 0, got {target_snr}"),
        ));
    }
    let (j_a, j_p) = port_pair(spec, port)?;
    if j_a == j_p {
        return Err(Error::ZeroContrast);
    }
    let noise = noise_factor(j_a, j_p, det)?;
    let contrast = det.chi * (j_a - j_p);
    Ok(target_snr * target_snr * noise / (contrast * contrast))
}

/// One point of the security-versus-SNR trade-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityPoint {
    pub snr: f64,
    pub n0: f64,
    pub eta_tot: f64,
}

/// Total security reachable at each requested SNR, for the cavity at `spec.xi`.
pub fn security_vs_snr_curve(
    spec: &CavitySpec,
    det: &DetectorSpec,
    port: Port,
    snr_grid: &[f64],
) -> Result<Vec<SecurityPoint>> {
    if snr_grid.is_empty() {
        return Err(Error::EmptyGrid("snr grid"));
    }
    snr_grid
        .iter()
        .map(|&s| {
            let n0 = n0_for_snr(spec, det, port, s)?;
            Ok(SecurityPoint {
                snr: s,
                n0,
                eta_tot: total_security(spec, n0)?,
            })
        })
        .collect()
}
