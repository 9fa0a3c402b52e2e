use serde_json::json;

use super::config::RunConfig;
use super::table::{Table, Value};
use super::{Artifact, CliError, Report};
use crate::cavity::{max_photon_flux, port_coefficients, ObjectState};
use crate::metrics::{security_vs_snr_curve, snr, total_security, Port};
use crate::montecarlo::{simulate_counts, TrialConfig, RNG_ALGORITHM};
use crate::optimizer::{maximize_zeta, sweep_kappa3_delta_p, Constraints, OptimumReport};

fn single(stem: &str, table: Table, summary: String) -> Report {
    Report {
        artifacts: vec![Artifact {
            stem: stem.to_string(),
            table,
        }],
        summary,
        infeasible: false,
        seeds: Vec::new(),
        rng: None,
        details: serde_json::Value::Null,
    }
}

pub fn coeffs_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.cavity_spec();
    let mut t = Table::new(&["state", "reflection", "transmission", "absorption", "eta"]);
    for (name, state) in [
        ("absent", ObjectState::Absent),
        ("present", ObjectState::Present),
    ] {
        let c = port_coefficients(&spec, state)?;
        t.push(vec![
            name.into(),
            c.r.into(),
            c.t.into(),
            c.a.into(),
            (1.0 - c.a).into(),
        ]);
    }
    Ok(t)
}

pub(super) fn coeffs(cfg: &RunConfig) -> Result<Report, CliError> {
    let table = coeffs_table(cfg)?;
    let flux = max_photon_flux(&cfg.cavity_spec())?;
    let summary = format!(
        "{}max photon flux (kappa_P/2pi): {flux:?} photons/s\n",
        table.render()
    );
    Ok(single("coeffs", table, summary))
}

pub fn sweep_xi_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let grid = crate::optimizer::sweep_xi(
        &cfg.cavity_spec(),
        &cfg.detectors(),
        &cfg.n0_axis()?,
        &cfg.xi_axis()?,
    )?;
    let mut t = Table::new(&["n0", "xi", "eta_tot", "snr1", "snr2", "zeta1", "zeta2"]);
    for b in &grid.cells {
        t.push(vec![
            b.point.n0.into(),
            b.point.xi.into(),
            b.eta_tot.into(),
            b.snr[0].into(),
            b.snr[1].into(),
            b.zeta[0].into(),
            b.zeta[1].into(),
        ]);
    }
    Ok(t)
}

pub(super) fn sweep_xi(cfg: &RunConfig) -> Result<Report, CliError> {
    let table = sweep_xi_table(cfg)?;
    let summary = format!("sweep-xi: {} rows\n", table.rows.len());
    Ok(single("sweep_xi", table, summary))
}

fn optimum(
    cfg: &RunConfig,
    port: Port,
    constraints: &Constraints,
) -> Result<OptimumReport, CliError> {
    let dets = cfg.detectors();
    Ok(maximize_zeta(
        &cfg.cavity_spec(),
        dets.get(port),
        port,
        constraints,
        &cfg.xi_axis()?.values,
        cfg.n0_range()?,
    )?)
}

fn report_row(search: &str, r: &OptimumReport) -> Vec<Value> {
    vec![
        search.into(),
        r.port.name().into(),
        r.xi_star.into(),
        r.n0_star.into(),
        r.zeta_star.into(),
        r.eta_tot_at_star.into(),
        r.snr_at_star.into(),
        r.feasible.into(),
    ]
}

/// Global optima for both ports, then conditional ones when constraints are set.
/// The flag is true when a conditional search found no feasible point.
pub fn optimize_table(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let mut t = Table::new(&[
        "search",
        "port",
        "xi_star",
        "n0_star",
        "zeta_star",
        "eta_tot",
        "snr",
        "feasible",
    ]);
    for port in Port::BOTH {
        t.push(report_row(
            "global",
            &optimum(cfg, port, &Constraints::none())?,
        ));
    }
    let constraints = cfg.constraints();
    let mut infeasible = false;
    if !constraints.is_unconstrained() {
        for port in Port::BOTH {
            let r = optimum(cfg, port, &constraints)?;
            infeasible |= !r.feasible;
            t.push(report_row("conditional", &r));
        }
    }
    Ok((t, infeasible))
}

pub(super) fn optimize(cfg: &RunConfig) -> Result<Report, CliError> {
    let (table, infeasible) = optimize_table(cfg)?;
    let mut summary = table.render();
    if infeasible {
        summary.push_str("no grid point satisfies the constraints; conditional rows hold the unconstrained optimum\n");
    }
    let mut report = single("optimize", table, summary);
    report.infeasible = infeasible;
    Ok(report)
}

/// `(file stem, table)` pairs: argmax-ξ and max-ζ maps per port.
pub fn param_map_tables(cfg: &RunConfig) -> Result<Vec<(String, Table)>, CliError> {
    let (k_axis, d_axis) = cfg.param_axes()?;
    let constraints = if cfg.param_map.use_constraints {
        cfg.constraints()
    } else {
        Constraints::none()
    };
    let maps = sweep_kappa3_delta_p(
        &cfg.cavity_spec(),
        &cfg.detectors(),
        &k_axis,
        &d_axis,
        &constraints,
        &cfg.xi_axis()?,
        cfg.n0_range()?,
    )?;
    let mut out = Vec::new();
    for port in Port::BOTH {
        for (kind, grid) in [
            ("argmax_xi", maps.argmax_xi(port)),
            ("max_zeta", maps.max_zeta(port)),
        ] {
            let mut t = Table::new(&["kappa3", "deltaP", "value"]);
            for (coords, value) in grid.iter_cells() {
                t.push(vec![coords[0].into(), coords[1].into(), (*value).into()]);
            }
            out.push((format!("param_map_{kind}_{}", port.name()), t));
        }
    }
    Ok(out)
}

pub(super) fn param_map(cfg: &RunConfig) -> Result<Report, CliError> {
    let tables = param_map_tables(cfg)?;
    let summary = format!(
        "param-map: {} files, {} cells each\n",
        tables.len(),
        tables.first().map_or(0, |t| t.1.rows.len())
    );
    Ok(Report {
        artifacts: tables
            .into_iter()
            .map(|(stem, table)| Artifact { stem, table })
            .collect(),
        summary,
        infeasible: false,
        seeds: Vec::new(),
        rng: None,
        details: serde_json::Value::Null,
    })
}

/// ξ used for one port's security curve and where it came from.
pub type CurveXi = (f64, &'static str);

/// Coupling efficiency used for one port's security curve: the configured
/// value, else the conditional optimum, else the global optimum.
fn curve_xi(cfg: &RunConfig, port: Port) -> Result<CurveXi, CliError> {
    let fixed = match port {
        Port::Reflection => cfg.security_curve.xi_reflection,
        Port::Transmission => cfg.security_curve.xi_transmission,
    };
    if let Some(xi) = fixed {
        return Ok((xi, "configured"));
    }
    let constraints = cfg.constraints();
    if !constraints.is_unconstrained() {
        let r = optimum(cfg, port, &constraints)?;
        if r.feasible {
            return Ok((r.xi_star, "conditional optimum"));
        }
    }
    Ok((
        optimum(cfg, port, &Constraints::none())?.xi_star,
        "global optimum",
    ))
}

/// Security-versus-SNR table plus the ξ used per port.
pub fn security_curve_table(cfg: &RunConfig) -> Result<(Table, [CurveXi; 2]), CliError> {
    let grid = cfg.snr_grid()?;
    let base = cfg.cavity_spec();
    let dets = cfg.detectors();
    let xis = [
        curve_xi(cfg, Port::Reflection)?,
        curve_xi(cfg, Port::Transmission)?,
    ];
    let mut curves = Vec::with_capacity(2);
    for (port, (xi, _)) in Port::BOTH.into_iter().zip(xis) {
        let spec = base.with_xi(xi)?;
        curves.push(security_vs_snr_curve(
            &spec,
            dets.get(port),
            port,
            &grid.values,
        )?);
    }
    let mut t = Table::new(&[
        "snr",
        "n0_reflection",
        "eta_tot_reflection",
        "n0_transmission",
        "eta_tot_transmission",
    ]);
    for (r, tr) in curves[0].iter().zip(&curves[1]) {
        t.push(vec![
            r.snr.into(),
            r.n0.into(),
            r.eta_tot.into(),
            tr.n0.into(),
            tr.eta_tot.into(),
        ]);
    }
    Ok((t, xis))
}

pub(super) fn security_curve(cfg: &RunConfig) -> Result<Report, CliError> {
    let (table, xis) = security_curve_table(cfg)?;
    let summary = format!(
        "security-curve: {} rows; xi_reflection = {:?} ({}), xi_transmission = {:?} ({})\n",
        table.rows.len(),
        xis[0].0,
        xis[0].1,
        xis[1].0,
        xis[1].1
    );
    let mut report = single("security_curve", table, summary);
    report.details = json!({
        "xi_reflection": xis[0].0,
        "xi_reflection_source": xis[0].1,
        "xi_transmission": xis[1].0,
        "xi_transmission_source": xis[1].1,
    });
    Ok(report)
}

pub fn montecarlo_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.cavity_spec();
    let dets = cfg.detectors();
    let mc = &cfg.montecarlo;
    let mut t = Table::new(&[
        "port",
        "xi",
        "n0",
        "trials",
        "seed",
        "mean_signal",
        "std_noise",
        "empirical_snr",
        "analytic_snr",
        "snr_rel_dev",
        "degenerate_noise",
        "survival_fraction",
        "analytic_survival",
        "survival_rel_dev",
        "survival_sigma",
    ]);
    for &n0 in &mc.n0_values {
        for port in Port::BOTH {
            let det = dets.get(port);
            let stats = simulate_counts(
                &spec,
                det,
                &TrialConfig {
                    n0,
                    trials: mc.trials,
                    seed: mc.seed,
                    port,
                },
            )?;
            let analytic_snr = snr(&spec, det, port, n0 as f64)?;
            let analytic_eta = total_security(&spec, n0 as f64)?;
            let sigma = (analytic_eta * (1.0 - analytic_eta) / mc.trials as f64).sqrt();
            let rel = |emp: f64, exact: f64| {
                if exact == 0.0 {
                    if emp == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (emp - exact) / exact
                }
            };
            t.push(vec![
                port.name().into(),
                spec.xi.into(),
                n0.into(),
                mc.trials.into(),
                mc.seed.into(),
                stats.mean_signal.into(),
                stats.std_noise.into(),
                stats.empirical_snr.into(),
                analytic_snr.into(),
                rel(stats.empirical_snr, analytic_snr).into(),
                stats.degenerate_noise.into(),
                stats.survival_fraction.into(),
                analytic_eta.into(),
                rel(stats.survival_fraction, analytic_eta).into(),
                sigma.into(),
            ]);
        }
    }
    Ok(t)
}

pub(super) fn montecarlo(cfg: &RunConfig) -> Result<Report, CliError> {
    let table = montecarlo_table(cfg)?;
    let mut report = single("montecarlo", table.clone(), table.render());
    report.seeds = vec![cfg.montecarlo.seed];
    report.rng = Some(RNG_ALGORITHM);
    Ok(report)
}
