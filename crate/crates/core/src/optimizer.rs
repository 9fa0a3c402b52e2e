//! Maxima of the merit product over the (ξ, N₀) plane.
//!
//! For fixed ξ the product has the form `ζ(N₀) = c √N₀ (1 − A)^N₀`, whose only
//! stationary point is `N₀* = −1 / (2 ln(1 − A))`. The search therefore scans
//! ξ on a grid and places N₀ analytically, clamping it into the interval
//! allowed by the photon budget and any security / SNR constraints.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{port_coefficients, CavitySpec, ObjectState};
use crate::error::{Error, Result};
use crate::metrics::{
    self, port_pair, DetectorSpec, Detectors, MetricsBundle, OperatingPoint, Port,
};

/// Lower bounds on total security and SNR. `None` leaves a bound off.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Constraints {
    pub min_eta_tot: Option<f64>,
    pub min_snr: Option<f64>,
}

impl Constraints {
    pub fn none() -> Self {
        Constraints::default()
    }

    pub fn is_unconstrained(&self) -> bool {
        self.min_eta_tot.is_none() && self.min_snr.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.min_eta_tot {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::invalid(
                    "min_eta_tot",
                    format!("must lie in [0, 1], got {e}"),
                ));
            }
        }
        if let Some(s) = self.min_snr {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::invalid(
                    "min_snr",
                    format!("must be finite and >= 0, got {s}"),
                ));
            }
        }
        Ok(())
    }
}

/// Admissible photon budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct N0Range {
    pub min: f64,
    pub max: f64,
}

impl Default for N0Range {
    fn default() -> Self {
        N0Range {
            min: 1.0,
            max: 1000.0,
        }
    }
}

impl N0Range {
    pub fn validate(&self) -> Result<()> {
        if !(self.min >= 0.0 && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::invalid(
                "n0_range",
                format!(
                    "need 0 <= min <= max < inf, got [{}, {}]",
                    self.min, self.max
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumReport {
    pub port: Port,
    pub xi_star: f64,
    pub n0_star: f64,
    pub zeta_star: f64,
    pub eta_tot_at_star: f64,
    pub snr_at_star: f64,
    /// False when no grid point meets the constraints; the report then holds
    /// the unconstrained optimum.
    pub feasible: bool,
}

/// Closed-form optimal photon number at fixed ξ and the merit product there.
pub fn optimal_n0_at_xi(
    spec: &CavitySpec,
    det: &DetectorSpec,
    port: Port,
    xi: f64,
) -> Result<(f64, f64)> {
    let spec = spec.with_xi(xi)?;
    let absorption = port_coefficients(&spec, ObjectState::Present)?.a;
    if absorption <= 0.0 {
        return Err(Error::UnboundedInN0 { xi });
    }
    let n0 = stationary_n0(absorption);
    let z =
        |n: f64| -> Result<f64> { metrics::zeta(&spec, det, port, OperatingPoint { xi, n0: n }) };
    let peak = z(n0)?;

    // Second-difference check on a symmetric stencil around the stationary point.
    let h = 1e-3 * n0;
    let (left, right) = (z(n0 - h)?, z(n0 + h)?);
    if !(left + right - 2.0 * peak <= 0.0 && peak >= left && peak >= right) {
        return Err(Error::NotAMaximum { n0 });
    }
    Ok((n0, peak))
}

fn stationary_n0(absorption: f64) -> f64 {
    -0.5 / (-absorption).ln_1p()
}

/// Per-ξ candidates: the best point within the photon budget and, when the
/// constraints leave a non-empty interval, the best constrained point.
struct XiCandidate {
    xi: f64,
    free: (f64, f64),
    constrained: Option<(f64, f64)>,
}

fn evaluate_xi(
    spec: &CavitySpec,
    det: &DetectorSpec,
    port: Port,
    constraints: &Constraints,
    xi: f64,
    range: N0Range,
) -> Result<XiCandidate> {
    let spec = spec.with_xi(xi)?;
    let absorption = port_coefficients(&spec, ObjectState::Present)?.a;
    let (j_a, j_p) = port_pair(&spec, port)?;
    let target = if absorption > 0.0 {
        stationary_n0(absorption)
    } else {
        // ζ is increasing in N₀ without absorption.
        range.max
    };
    let zeta_at = |n0: f64| metrics::zeta(&spec, det, port, OperatingPoint { xi, n0 });

    let free_n0 = target.clamp(range.min, range.max);
    let free = (free_n0, zeta_at(free_n0)?);

    let mut lo = range.min;
    let mut hi = range.max;
    if let Some(min_eta) = constraints.min_eta_tot {
        if absorption > 0.0 {
            // (1 − A)^N ≥ η_min  ⇔  N ≤ ln η_min / ln(1 − A)
            hi = hi.min(min_eta.ln() / (-absorption).ln_1p());
        }
    }
    let mut snr_reachable = true;
    if let Some(min_snr) = constraints.min_snr {
        if j_a == j_p {
            snr_reachable = min_snr == 0.0;
        } else {
            lo = lo.max(metrics::n0_for_snr(&spec, det, port, min_snr)?);
        }
    }

    let constrained = if snr_reachable && lo <= hi {
        let satisfied = |n0: f64| -> Result<bool> {
            let eta_ok = match constraints.min_eta_tot {
                Some(e) => metrics::total_security(&spec, n0)? >= e,
                None => true,
            };
            let snr_ok = match constraints.min_snr {
                Some(s) => metrics::snr(&spec, det, port, n0)? >= s,
                None => true,
            };
            Ok(eta_ok && snr_ok)
        };
        let mut n0 = target.clamp(lo, hi);
        // Closed-form bounds can miss by an ulp; step inward until the
        // constraints hold when re-evaluated.
        let mut steps = 0;
        while !satisfied(n0)? && steps < 8 {
            let nudge = n0.abs().max(1.0) * 4.0 * f64::EPSILON * (1 << steps) as f64;
            n0 = if n0 >= hi { n0 - nudge } else { n0 + nudge };
            steps += 1;
        }
        if satisfied(n0)? && n0 >= range.min && n0 <= range.max {
            Some((n0, zeta_at(n0)?))
        } else {
            None
        }
    } else {
        None
    };

    Ok(XiCandidate {
        xi,
        free,
        constrained,
    })
}

fn better(z: f64, xi: f64, best: Option<(f64, f64, f64)>) -> bool {
    match best {
        None => true,
        Some((bz, bxi, _)) => z > bz || (z == bz && (xi - 0.5).abs() < (bxi - 0.5).abs()),
    }
}

fn report(
    spec: &CavitySpec,
    det: &DetectorSpec,
    port: Port,
    xi: f64,
    n0: f64,
    feasible: bool,
) -> Result<OptimumReport> {
    let at = spec.with_xi(xi)?;
    let snr = metrics::snr(&at, det, port, n0)?;
    let eta_tot = metrics::total_security(&at, n0)?;
    Ok(OptimumReport {
        port,
        xi_star: xi,
        n0_star: n0,
        zeta_star: metrics::zeta(spec, det, port, OperatingPoint { xi, n0 })?,
        eta_tot_at_star: eta_tot,
        snr_at_star: snr,
        feasible,
    })
}

/// Best merit product over `xi_grid × n0_range`, subject to `constraints`.
///
/// Exact ties in ζ go to the ξ nearest 0.5.
pub fn maximize_zeta(
    spec: &CavitySpec,
    det: &DetectorSpec,
    port: Port,
    constraints: &Constraints,
    xi_grid: &[f64],
    n0_range: N0Range,
) -> Result<OptimumReport> {
    if xi_grid.is_empty() {
        return Err(Error::EmptyGrid("xi grid"));
    }
    spec.validate()?;
    det.validate()?;
    constraints.validate()?;
    n0_range.validate()?;

    let mut best_free: Option<(f64, f64, f64)> = None;
    let mut best_constrained: Option<(f64, f64, f64)> = None;
    for &xi in xi_grid {
        let cand = evaluate_xi(spec, det, port, constraints, xi, n0_range)?;
        let (n0, z) = cand.free;
        if better(z, cand.xi, best_free) {
            best_free = Some((z, cand.xi, n0));
        }
        if let Some((n0, z)) = cand.constrained {
            if better(z, cand.xi, best_constrained) {
                best_constrained = Some((z, cand.xi, n0));
            }
        }
    }

    if constraints.is_unconstrained() {
        let (_, xi, n0) = best_free.expect("non-empty grid");
        return report(spec, det, port, xi, n0, true);
    }
    match best_constrained {
        Some((_, xi, n0)) => report(spec, det, port, xi, n0, true),
        None => {
            let (_, xi, n0) = best_free.expect("non-empty grid");
            report(spec, det, port, xi, n0, false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    Linear,
    Log,
    /// Explicitly listed values.
    List,
}

/// One sweep axis; values are strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub scale: AxisScale,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Result<Axis> {
        check_bounds(min, max, count)?;
        let values = if count == 1 {
            vec![min]
        } else {
            let step = (max - min) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        max
                    } else {
                        min + step * i as f64
                    }
                })
                .collect()
        };
        Axis::build(name, AxisScale::Linear, values)
    }

    pub fn log(name: &str, min: f64, max: f64, count: usize) -> Result<Axis> {
        check_bounds(min, max, count)?;
        if min <= 0.0 {
            return Err(Error::invalid(
                "axis",
                format!("log axis needs min > 0, got {min}"),
            ));
        }
        let values = if count == 1 {
            vec![min]
        } else {
            let (lmin, lmax) = (min.log10(), max.log10());
            let step = (lmax - lmin) / (count - 1) as f64;
            (0..count)
                .map(|i| match i {
                    0 => min,
                    _ if i + 1 == count => max,
                    _ => 10f64.powf(lmin + step * i as f64),
                })
                .collect()
        };
        Axis::build(name, AxisScale::Log, values)
    }

    pub fn list(name: &str, values: Vec<f64>) -> Result<Axis> {
        Axis::build(name, AxisScale::List, values)
    }

    fn build(name: &str, scale: AxisScale, values: Vec<f64>) -> Result<Axis> {
        if values.is_empty() {
            return Err(Error::EmptyGrid("axis"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("axis", format!("{name}: non-finite value")));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "axis",
                format!("{name}: values must be strictly increasing"),
            ));
        }
        Ok(Axis {
            name: name.to_string(),
            scale,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

fn check_bounds(min: f64, max: f64, count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::EmptyGrid("axis"));
    }
    if !(min.is_finite() && max.is_finite())
        || (count > 1 && min >= max)
        || (count == 1 && min > max)
    {
        return Err(Error::invalid(
            "axis",
            format!("need finite min < max, got [{min}, {max}]"),
        ));
    }
    Ok(())
}

/// Default coupling-efficiency grid: 500 points over [0.001, 0.999].
pub fn default_xi_axis() -> Axis {
    Axis::linear("xi", 0.001, 0.999, 500).expect("static axis")
}

/// Rectangular grid of cell payloads; the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid<T> {
    pub axes: Vec<Axis>,
    pub cells: Vec<T>,
    /// Parameters held fixed across the sweep, in insertion order.
    pub fixed: Vec<(String, f64)>,
    /// Filled in by callers that want one; the sweep itself is time-independent.
    pub timestamp: Option<String>,
}

impl<T> SweepGrid<T> {
    fn from_cells(axes: Vec<Axis>, cells: Vec<T>, fixed: Vec<(String, f64)>) -> Self {
        debug_assert_eq!(cells.len(), axes.iter().map(Axis::len).product::<usize>());
        SweepGrid {
            axes,
            cells,
            fixed,
            timestamp: None,
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    /// Flat index of a multi-index (row-major).
    pub fn index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.axes.len());
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, axis)| {
            assert!(i < axis.len());
            acc * axis.len() + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.cells[self.index(idx)]
    }

    /// Axis coordinates of every cell alongside the payload.
    pub fn iter_cells(&self) -> impl Iterator<Item = (Vec<f64>, &T)> + '_ {
        self.cells.iter().enumerate().map(move |(flat, cell)| {
            let mut rem = flat;
            let mut coords = vec![0.0; self.axes.len()];
            for (k, axis) in self.axes.iter().enumerate().rev() {
                coords[k] = axis.values[rem % axis.len()];
                rem /= axis.len();
            }
            (coords, cell)
        })
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> SweepGrid<U> {
        SweepGrid {
            axes: self.axes.clone(),
            cells: self.cells.iter().map(f).collect(),
            fixed: self.fixed.clone(),
            timestamp: self.timestamp.clone(),
        }
    }
}

fn spec_fixed(spec: &CavitySpec) -> Vec<(String, f64)> {
    vec![
        ("kappa_a_hz".into(), spec.kappa_a),
        ("kappa_3_hz".into(), spec.kappa_3),
        ("delta_a_hz".into(), spec.delta_a),
        ("delta_p_hz".into(), spec.delta_p),
        ("epsilon_a".into(), spec.epsilon_a),
        ("epsilon_p".into(), spec.epsilon_p),
    ]
}

/// Metrics at every (N₀, ξ) pair; one block of ξ values per N₀.
pub fn sweep_xi(
    spec: &CavitySpec,
    dets: &Detectors,
    n0_values: &Axis,
    xi_grid: &Axis,
) -> Result<SweepGrid<MetricsBundle>> {
    if n0_values.is_empty() || xi_grid.is_empty() {
        return Err(Error::EmptyGrid("sweep axes"));
    }
    let pairs: Vec<(f64, f64)> = n0_values
        .values
        .iter()
        .flat_map(|&n0| xi_grid.values.iter().map(move |&xi| (n0, xi)))
        .collect();
    let cells = pairs
        .par_iter()
        .map(|&(n0, xi)| MetricsBundle::evaluate(spec, dets, OperatingPoint::new(xi, n0)?))
        .collect::<Result<Vec<_>>>()?;
    let mut n0_axis = n0_values.clone();
    n0_axis.name = "n0".into();
    let mut xi_axis = xi_grid.clone();
    xi_axis.name = "xi".into();
    Ok(SweepGrid::from_cells(
        vec![n0_axis, xi_axis],
        cells,
        spec_fixed(spec),
    ))
}

/// Optima for both ports in one (κ₃, Δ_P) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellOptima {
    pub reflection: OptimumReport,
    pub transmission: OptimumReport,
}

impl CellOptima {
    pub fn get(&self, port: Port) -> &OptimumReport {
        match port {
            Port::Reflection => &self.reflection,
            Port::Transmission => &self.transmission,
        }
    }
}

/// Result of a (κ₃, Δ_P) sweep: axes are `[kappa3, delta_p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeMaps {
    pub cells: SweepGrid<CellOptima>,
}

impl RegimeMaps {
    pub fn argmax_xi(&self, port: Port) -> SweepGrid<f64> {
        self.cells.map(|c| c.get(port).xi_star)
    }

    pub fn max_zeta(&self, port: Port) -> SweepGrid<f64> {
        self.cells.map(|c| c.get(port).zeta_star)
    }
}

/// Runs [`maximize_zeta`] for both ports in every (κ₃, Δ_P) cell.
pub fn sweep_kappa3_delta_p(
    base: &CavitySpec,
    dets: &Detectors,
    kappa3_grid: &Axis,
    delta_p_grid: &Axis,
    constraints: &Constraints,
    xi_grid: &Axis,
    n0_range: N0Range,
) -> Result<RegimeMaps> {
    if kappa3_grid.is_empty() || delta_p_grid.is_empty() || xi_grid.is_empty() {
        return Err(Error::EmptyGrid("regime map axes"));
    }
    let pairs: Vec<(f64, f64)> = kappa3_grid
        .values
        .iter()
        .flat_map(|&k3| delta_p_grid.values.iter().map(move |&dp| (k3, dp)))
        .collect();
    let cells = pairs
        .par_iter()
        .map(|&(kappa_3, delta_p)| {
            let spec = CavitySpec {
                kappa_3,
                delta_p,
                ..*base
            };
            let run = |port: Port| {
                maximize_zeta(
                    &spec,
                    dets.get(port),
                    port,
                    constraints,
                    &xi_grid.values,
                    n0_range,
                )
            };
            Ok(CellOptima {
                reflection: run(Port::Reflection)?,
                transmission: run(Port::Transmission)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut k_axis = kappa3_grid.clone();
    k_axis.name = "kappa3".into();
    let mut d_axis = delta_p_grid.clone();
    d_axis.name = "delta_p".into();
    let mut fixed = spec_fixed(base);
    fixed.retain(|(k, _)| k != "kappa_3_hz" && k != "delta_p_hz");
    Ok(RegimeMaps {
        cells: SweepGrid::from_cells(vec![k_axis, d_axis], cells, fixed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn headline() -> (CavitySpec, DetectorSpec) {
        (CavitySpec::default(), DetectorSpec::default())
    }

    fn headline_constraints() -> Constraints {
        Constraints {
            min_eta_tot: Some(0.85),
            min_snr: Some(2.0),
        }
    }

    #[test]
    fn stationary_point_at_unit_log() {
        // ln(1 − A) = −1  ⇒  N₀* = 1/2
        let a = 1.0 - (-1.0f64).exp();
        assert!((stationary_n0(a) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn optimal_n0_headline_against_dense_scan() {
        let (spec, det) = headline();
        let (n0, z) = optimal_n0_at_xi(&spec, &det, Port::Transmission, 0.5).unwrap();
        assert!((n0 - 26.188307048503766).abs() < 1e-9, "{n0}");

        // Brute force over N₀ ∈ (0, 1000] in steps of 0.01.
        let step = 0.01;
        let (mut best_n, mut best_z) = (0.0, f64::NEG_INFINITY);
        for i in 1..=100_000 {
            let n = i as f64 * step;
            let v = metrics::zeta(
                &spec,
                &det,
                Port::Transmission,
                OperatingPoint { xi: 0.5, n0: n },
            )
            .unwrap();
            if v > best_z {
                best_z = v;
                best_n = n;
            }
        }
        assert!((best_n - n0).abs() <= step, "{best_n} vs {n0}");
        assert!(z >= best_z - 1e-12);
    }

    #[test]
    fn optimal_n0_requires_absorption() {
        let spec = CavitySpec {
            kappa_3: 0.0,
            ..CavitySpec::default()
        };
        assert_eq!(
            optimal_n0_at_xi(&spec, &DetectorSpec::default(), Port::Reflection, 0.5),
            Err(Error::UnboundedInN0 { xi: 0.5 })
        );
    }

    #[test]
    fn conditional_optima_headline() {
        let (spec, det) = headline();
        let grid = default_xi_axis().values;
        let t = maximize_zeta(
            &spec,
            &det,
            Port::Transmission,
            &headline_constraints(),
            &grid,
            N0Range::default(),
        )
        .unwrap();
        let r = maximize_zeta(
            &spec,
            &det,
            Port::Reflection,
            &headline_constraints(),
            &grid,
            N0Range::default(),
        )
        .unwrap();
        assert!(t.feasible && r.feasible);
        assert!((t.xi_star - 0.03).abs() < 0.005, "{t:?}");
        assert!((r.xi_star - 0.4).abs() < 0.01, "{r:?}");
        assert!(t.zeta_star >= r.zeta_star);
        for rep in [t, r] {
            assert!(rep.eta_tot_at_star >= 0.85);
            assert!(rep.snr_at_star >= 2.0);
        }
    }

    #[test]
    fn impossible_constraints_are_infeasible() {
        let (spec, det) = headline();
        let c = Constraints {
            min_eta_tot: Some(1.0),
            min_snr: Some(0.5),
        };
        let grid = default_xi_axis().values;
        let rep = maximize_zeta(
            &spec,
            &det,
            Port::Transmission,
            &c,
            &grid,
            N0Range::default(),
        )
        .unwrap();
        assert!(!rep.feasible);
        let free = maximize_zeta(
            &spec,
            &det,
            Port::Transmission,
            &Constraints::none(),
            &grid,
            N0Range::default(),
        )
        .unwrap();
        assert_eq!(rep.xi_star, free.xi_star);
        assert_eq!(rep.zeta_star, free.zeta_star);
    }

    #[test]
    fn empty_grid_rejected() {
        let (spec, det) = headline();
        assert_eq!(
            maximize_zeta(
                &spec,
                &det,
                Port::Reflection,
                &Constraints::none(),
                &[],
                N0Range::default()
            ),
            Err(Error::EmptyGrid("xi grid"))
        );
    }

    #[test]
    fn ties_prefer_critical_coupling() {
        assert!(better(1.0, 0.5, Some((1.0, 0.3, 1.0))));
        assert!(!better(1.0, 0.2, Some((1.0, 0.3, 1.0))));
        assert!(better(1.1, 0.01, Some((1.0, 0.5, 1.0))));
    }

    #[test]
    fn axes() {
        let lin = Axis::linear("xi", 0.001, 0.999, 500).unwrap();
        assert_eq!(lin.len(), 500);
        assert_eq!(lin.max(), 0.999);
        assert!(((lin.values[1] - lin.values[0]) - 0.002).abs() < 1e-12);
        let log = Axis::log("k", 1.5e4, 1.5e10, 3).unwrap();
        assert_eq!(log.values[0], 1.5e4);
        assert!((log.values[1] / 1.5e7 - 1.0).abs() < 1e-12);
        assert_eq!(log.values[2], 1.5e10);
        assert!(Axis::linear("x", 1.0, 0.0, 3).is_err());
        assert!(Axis::log("x", 0.0, 1.0, 3).is_err());
        assert!(Axis::list("x", vec![1.0, 1.0]).is_err());
        assert_eq!(
            Axis::linear("x", 0.0, 1.0, 0),
            Err(Error::EmptyGrid("axis"))
        );
    }

    #[test]
    fn sweep_xi_layout_and_consistency() {
        let (spec, _) = headline();
        let dets = Detectors::default();
        let n0 = Axis::list("n0", vec![5.0, 55.0]).unwrap();
        let xi = default_xi_axis();
        let grid = sweep_xi(&spec, &dets, &n0, &xi).unwrap();
        assert_eq!(grid.cells.len(), 1000);
        assert_eq!(grid.shape(), vec![2, 500]);

        for i in 0..500 {
            assert!(grid.get(&[1, i]).eta_tot <= grid.get(&[0, i]).eta_tot);
        }
        // Both SNR columns peak at one of the two grid points straddling ξ = 0.5.
        for block in 0..2 {
            for port in Port::BOTH {
                let argmax = (0..500)
                    .max_by(|&a, &b| {
                        grid.get(&[block, a])
                            .snr_at(port)
                            .partial_cmp(&grid.get(&[block, b]).snr_at(port))
                            .unwrap()
                    })
                    .unwrap();
                assert!(
                    (xi.values[argmax] - 0.5).abs() < 0.0011,
                    "{port} block {block}"
                );
            }
        }
        let (coords, cell) = grid.iter_cells().nth(1).unwrap();
        assert_eq!(coords, vec![5.0, xi.values[1]]);
        assert_eq!(cell.point.xi, xi.values[1]);
    }

    #[test]
    fn regime_map_shape() {
        let (spec, _) = headline();
        let k3 = Axis::log("kappa3", 1.5e4, 1.5e10, 3).unwrap();
        let dp = Axis::log("delta_p", 1.5e4, 1.5e10, 3).unwrap();
        let maps = sweep_kappa3_delta_p(
            &spec,
            &Detectors::default(),
            &k3,
            &dp,
            &Constraints::none(),
            &default_xi_axis(),
            N0Range::default(),
        )
        .unwrap();
        assert_eq!(maps.cells.cells.len(), 9);
        let argmax = maps.argmax_xi(Port::Transmission);
        // Centre cell: κ₃ = Δ_P = κ_A, strongly undercoupled.
        assert!(*argmax.get(&[1, 1]) < 0.1);
        // Far-detuned cells sit at critical coupling.
        assert!((*argmax.get(&[0, 2]) - 0.5).abs() < 0.01);
    }
}
