//! Run configuration.
//!
//! A TOML (or JSON) document with one table per concern. Every physical rate
//! carries its unit in the key (`_hz` = value of `X / 2π` in Hz). Missing
//! keys fall back to the headline system; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::cavity::CavitySpec;
use crate::metrics::{DetectorSpec, Detectors};
use crate::optimizer::{default_xi_axis, Axis, AxisScale, Constraints, N0Range};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub cavity: CavitySection,
    pub detectors: DetectorsSection,
    pub sweep: SweepSection,
    /// A present but empty table means "unconstrained".
    #[serde(default = "ConstraintsSection::headline")]
    pub constraints: ConstraintsSection,
    pub security_curve: SecurityCurveSection,
    pub param_map: ParamMapSection,
    pub montecarlo: MonteCarloSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cavity: CavitySection::default(),
            detectors: DetectorsSection::default(),
            sweep: SweepSection::default(),
            constraints: ConstraintsSection::headline(),
            security_curve: SecurityCurveSection::default(),
            param_map: ParamMapSection::default(),
            montecarlo: MonteCarloSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavitySection {
    pub kappa_a_hz: f64,
    pub kappa_3_hz: f64,
    pub delta_a_hz: f64,
    pub delta_p_hz: f64,
    pub epsilon_a: f64,
    pub epsilon_p: f64,
    pub xi: f64,
}

impl Default for CavitySection {
    fn default() -> Self {
        let s = CavitySpec::default();
        CavitySection {
            kappa_a_hz: s.kappa_a,
            kappa_3_hz: s.kappa_3,
            delta_a_hz: s.delta_a,
            delta_p_hz: s.delta_p,
            epsilon_a: s.epsilon_a,
            epsilon_p: s.epsilon_p,
            xi: s.xi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    pub chi: f64,
    pub dark_ratio: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        let d = DetectorSpec::default();
        DetectorSection {
            chi: d.chi,
            dark_ratio: d.dark_ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorsSection {
    pub reflection: DetectorSection,
    pub transmission: DetectorSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_count: usize,
    /// Photon numbers for the ξ sweep, one row block each.
    pub n0_values: Vec<f64>,
    /// Photon budget searched by the optimizer.
    pub n0_min: f64,
    pub n0_max: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        let xi = default_xi_axis();
        let n0 = N0Range::default();
        SweepSection {
            xi_min: xi.min(),
            xi_max: xi.max(),
            xi_count: xi.len(),
            n0_values: vec![5.0, 55.0],
            n0_min: n0.min,
            n0_max: n0.max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstraintsSection {
    pub min_eta_tot: Option<f64>,
    pub min_snr: Option<f64>,
}

impl ConstraintsSection {
    pub fn headline() -> Self {
        ConstraintsSection {
            min_eta_tot: Some(0.85),
            min_snr: Some(2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SecurityCurveSection {
    pub snr_min: f64,
    pub snr_max: f64,
    pub snr_count: usize,
    /// Fixed ξ per port; defaults to the conditional optimum of that port.
    pub xi_reflection: Option<f64>,
    pub xi_transmission: Option<f64>,
}

impl Default for SecurityCurveSection {
    fn default() -> Self {
        SecurityCurveSection {
            snr_min: 0.0,
            snr_max: 5.0,
            snr_count: 100,
            xi_reflection: None,
            xi_transmission: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamMapSection {
    pub kappa3_min_hz: f64,
    pub kappa3_max_hz: f64,
    pub kappa3_count: usize,
    pub delta_p_min_hz: f64,
    pub delta_p_max_hz: f64,
    pub delta_p_count: usize,
    pub scale: AxisScale,
    /// Apply `[constraints]` in every cell instead of searching the global maximum.
    pub use_constraints: bool,
}

impl Default for ParamMapSection {
    fn default() -> Self {
        ParamMapSection {
            kappa3_min_hz: 1.5e4,
            kappa3_max_hz: 1.5e10,
            kappa3_count: 13,
            delta_p_min_hz: 1.5e4,
            delta_p_max_hz: 1.5e10,
            delta_p_count: 13,
            scale: AxisScale::Log,
            use_constraints: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloSection {
    pub n0_values: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        MonteCarloSection {
            n0_values: vec![5, 55],
            trials: 100_000,
            seed: 20_240_917,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub format: Option<Format>,
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid {field}: {reason}"))
}

impl RunConfig {
    /// Reads a TOML file, or JSON when the extension is `.json` (e.g. a
    /// manifest's config echo).
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg = if path.extension().is_some_and(|e| e == "json") {
            RunConfig::from_json_str(&text)?
        } else {
            RunConfig::from_toml_str(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<RunConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn cavity_spec(&self) -> CavitySpec {
        let c = &self.cavity;
        CavitySpec {
            kappa_a: c.kappa_a_hz,
            kappa_3: c.kappa_3_hz,
            delta_a: c.delta_a_hz,
            delta_p: c.delta_p_hz,
            epsilon_a: c.epsilon_a,
            epsilon_p: c.epsilon_p,
            xi: c.xi,
        }
    }

    pub fn detectors(&self) -> Detectors {
        let d = &self.detectors;
        Detectors {
            reflection: DetectorSpec {
                chi: d.reflection.chi,
                dark_ratio: d.reflection.dark_ratio,
            },
            transmission: DetectorSpec {
                chi: d.transmission.chi,
                dark_ratio: d.transmission.dark_ratio,
            },
        }
    }

    pub fn constraints(&self) -> Constraints {
        Constraints {
            min_eta_tot: self.constraints.min_eta_tot,
            min_snr: self.constraints.min_snr,
        }
    }

    pub fn xi_axis(&self) -> Result<Axis, CliError> {
        let s = &self.sweep;
        if !(s.xi_min > 0.0 && s.xi_max < 1.0) {
            return Err(invalid(
                "sweep.xi_min/xi_max",
                format!(
                    "xi grid must stay inside (0, 1), got [{}, {}]",
                    s.xi_min, s.xi_max
                ),
            ));
        }
        Axis::linear("xi", s.xi_min, s.xi_max, s.xi_count).map_err(|e| invalid("sweep.xi", e))
    }

    pub fn n0_axis(&self) -> Result<Axis, CliError> {
        if self.sweep.n0_values.iter().any(|&n| n.is_nan() || n < 0.0) {
            return Err(invalid("sweep.n0_values", "photon numbers must be >= 0"));
        }
        Axis::list("n0", self.sweep.n0_values.clone()).map_err(|e| invalid("sweep.n0_values", e))
    }

    pub fn n0_range(&self) -> Result<N0Range, CliError> {
        let r = N0Range {
            min: self.sweep.n0_min,
            max: self.sweep.n0_max,
        };
        r.validate()
            .map_err(|e| invalid("sweep.n0_min/n0_max", e))?;
        Ok(r)
    }

    pub fn snr_grid(&self) -> Result<Axis, CliError> {
        let s = &self.security_curve;
        if s.snr_min < 0.0 {
            return Err(invalid("security_curve.snr_min", "must be >= 0"));
        }
        Axis::linear("snr", s.snr_min, s.snr_max, s.snr_count)
            .map_err(|e| invalid("security_curve.snr", e))
    }

    pub fn param_axes(&self) -> Result<(Axis, Axis), CliError> {
        let p = &self.param_map;
        let build = |name: &str, min: f64, max: f64, count: usize| match p.scale {
            AxisScale::Log => Axis::log(name, min, max, count),
            AxisScale::Linear => Axis::linear(name, min, max, count),
            AxisScale::List => Err(crate::Error::InvalidSpec {
                field: "scale",
                reason: "param_map.scale must be \"log\" or \"linear\"".into(),
            }),
        };
        let k = build("kappa3", p.kappa3_min_hz, p.kappa3_max_hz, p.kappa3_count)
            .map_err(|e| invalid("param_map.kappa3", e))?;
        let d = build(
            "delta_p",
            p.delta_p_min_hz,
            p.delta_p_max_hz,
            p.delta_p_count,
        )
        .map_err(|e| invalid("param_map.delta_p", e))?;
        if k.min() < 0.0 {
            return Err(invalid("param_map.kappa3_min_hz", "must be >= 0"));
        }
        Ok((k, d))
    }

    /// Checks every section before any computation runs.
    pub fn validate(&self) -> Result<(), CliError> {
        self.cavity_spec()
            .validate()
            .map_err(|e| CliError::Config(format!("cavity: {e}")))?;
        let dets = self.detectors();
        dets.reflection
            .validate()
            .map_err(|e| CliError::Config(format!("detectors.reflection: {e}")))?;
        dets.transmission
            .validate()
            .map_err(|e| CliError::Config(format!("detectors.transmission: {e}")))?;
        self.xi_axis()?;
        self.n0_axis()?;
        self.n0_range()?;
        self.constraints()
            .validate()
            .map_err(|e| CliError::Config(format!("constraints: {e}")))?;
        self.snr_grid()?;
        let s = &self.security_curve;
        for (field, xi) in [
            ("security_curve.xi_reflection", s.xi_reflection),
            ("security_curve.xi_transmission", s.xi_transmission),
        ] {
            if let Some(xi) = xi {
                if !(xi > 0.0 && xi < 1.0) {
                    return Err(invalid(field, format!("xi must lie in (0, 1), got {xi}")));
                }
            }
        }
        self.param_axes()?;
        if self.montecarlo.trials == 0 {
            return Err(invalid("montecarlo.trials", "must be >= 1"));
        }
        if self.montecarlo.n0_values.is_empty() {
            return Err(invalid("montecarlo.n0_values", "must not be empty"));
        }
        Ok(())
    }
}
