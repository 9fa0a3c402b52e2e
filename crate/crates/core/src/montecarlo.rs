//! Seeded photon-counting simulator used to cross-check the analytic metrics.
//!
//! Each trial draws the detector totals for both object states from Poisson
//! distributions whose means include the dark counts,
//! `N_X ~ Poisson(χ N₀ J_X + D N₀)`, and records the difference `N_A − N_P`.
//! The empirical SNR is `|mean| / std` of that difference over all trials.
//! Survival is simulated photon by photon: a trial survives when none of its
//! `N₀` photons is absorbed.
//!
//! Trials are split into fixed-size lanes. Lane `k` draws from its own
//! ChaCha8 stream derived from the master seed, so results do not depend on
//! how many threads process the lanes.

use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{port_coefficients, CavitySpec, ObjectState};
use crate::error::{Error, Result};
use crate::metrics::{port_pair, DetectorSpec, Port};

/// Generator identification recorded in run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9); seed_from_u64(seed), stream 2k for counting lane k, 2k+1 for survival lane k";

/// Trials per independent random stream.
pub const LANE_TRIALS: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n0: u64,
    pub trials: u64,
    pub seed: u64,
    pub port: Port,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    /// `|mean(N_A − N_P)|` over trials.
    pub mean_signal: f64,
    /// Sample standard deviation of `N_A − N_P`.
    pub std_noise: f64,
    pub empirical_snr: f64,
    pub survival_fraction: f64,
    /// Set when the difference never fluctuates (`std_noise == 0`); the SNR is then reported as 0.
    pub degenerate_noise: bool,
}

fn lane_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn lanes(trials: u64) -> Vec<(u64, u64)> {
    let count = trials.div_ceil(LANE_TRIALS);
    (0..count)
        .map(|k| (k, LANE_TRIALS.min(trials - k * LANE_TRIALS)))
        .collect()
}

/// Poisson sampler that also accepts a zero mean.
struct Counts(Option<Poisson<f64>>);

impl Counts {
    fn new(mean: f64) -> Result<Self> {
        if mean == 0.0 {
            return Ok(Counts(None));
        }
        Poisson::new(mean)
            .map(|p| Counts(Some(p)))
            .map_err(|e| Error::invalid("poisson mean", format!("{mean}: {e}")))
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> i64 {
        match &self.0 {
            Some(p) => p.sample(rng) as i64,
            None => 0,
        }
    }
}

/// Simulates `cfg.trials` counting experiments in `cfg.port` and, on separate
/// streams, the photon-by-photon survival of the same budget.
pub fn simulate_counts(
    spec: &CavitySpec,
    det: &DetectorSpec,
    cfg: &TrialConfig,
) -> Result<EmpiricalStats> {
    cfg.validate()?;
    det.validate()?;
    let (j_a, j_p) = port_pair(spec, cfg.port)?;
    let n0 = cfg.n0 as f64;
    let dark = det.dark_ratio * n0;
    let absent = Counts::new(det.chi * n0 * j_a + dark)?;
    let present = Counts::new(det.chi * n0 * j_p + dark)?;

    // Differences are integers, so the sums are exact and order-independent.
    let (sum, sum_sq) = lanes(cfg.trials)
        .into_par_iter()
        .map(|(lane, len)| {
            let mut rng = lane_rng(cfg.seed, 2 * lane);
            let mut s: i128 = 0;
            let mut s2: i128 = 0;
            for _ in 0..len {
                let d = (absent.draw(&mut rng) - present.draw(&mut rng)) as i128;
                s += d;
                s2 += d * d;
            }
            (s, s2)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let n = cfg.trials as i128;
    let mean_signal = (sum as f64 / n as f64).abs();
    let std_noise = if n > 1 {
        let numer = n * sum_sq - sum * sum;
        (numer as f64 / (n * (n - 1)) as f64).sqrt()
    } else {
        0.0
    };
    let degenerate_noise = std_noise == 0.0;
    let empirical_snr = if degenerate_noise {
        0.0
    } else {
        mean_signal / std_noise
    };

    Ok(EmpiricalStats {
        mean_signal,
        std_noise,
        empirical_snr,
        survival_fraction: simulate_survival(spec, cfg)?,
        degenerate_noise,
    })
}

/// Fraction of trials in which none of the `cfg.n0` photons is absorbed.
pub fn simulate_survival(spec: &CavitySpec, cfg: &TrialConfig) -> Result<f64> {
    let absorption = port_coefficients(spec, ObjectState::Present)?.a;
    survival_fraction(absorption, cfg)
}

fn survival_fraction(absorption: f64, cfg: &TrialConfig) -> Result<f64> {
    cfg.validate()?;
    let absorbed =
        Bernoulli::new(absorption).map_err(|e| Error::invalid("absorption", e.to_string()))?;

    let survivors: u64 = lanes(cfg.trials)
        .into_par_iter()
        .map(|(lane, len)| {
            let mut rng = lane_rng(cfg.seed, 2 * lane + 1);
            (0..len)
                .filter(|_| !(0..cfg.n0).any(|_| absorbed.sample(&mut rng)))
                .count() as u64
        })
        .sum();
    Ok(survivors as f64 / cfg.trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{snr, total_security};

    fn cfg(n0: u64, trials: u64, port: Port) -> TrialConfig {
        TrialConfig {
            n0,
            trials,
            seed: 0x5eed,
            port,
        }
    }

    #[test]
    fn zero_photons_no_dark_counts() {
        let det = DetectorSpec {
            chi: 0.5,
            dark_ratio: 0.0,
        };
        let stats = simulate_counts(
            &CavitySpec::default(),
            &det,
            &cfg(0, 1000, Port::Transmission),
        )
        .unwrap();
        assert_eq!(stats.mean_signal, 0.0);
        assert_eq!(stats.std_noise, 0.0);
        assert_eq!(stats.empirical_snr, 0.0);
        assert!(stats.degenerate_noise);
        assert_eq!(stats.survival_fraction, 1.0);
    }

    #[test]
    fn seed_determinism() {
        let spec = CavitySpec::default();
        let det = DetectorSpec::default();
        let c = cfg(55, 20_000, Port::Reflection);
        assert_eq!(
            simulate_counts(&spec, &det, &c).unwrap(),
            simulate_counts(&spec, &det, &c).unwrap()
        );
        let other = TrialConfig { seed: 1, ..c };
        assert_ne!(
            simulate_counts(&spec, &det, &c).unwrap(),
            simulate_counts(&spec, &det, &other).unwrap()
        );
    }

    #[test]
    fn independent_of_thread_count() {
        let spec = CavitySpec::default();
        let det = DetectorSpec::default();
        let c = cfg(5, 30_000, Port::Transmission);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_counts(&spec, &det, &c).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn survival_limits() {
        let clear = CavitySpec {
            kappa_3: 0.0,
            ..CavitySpec::default()
        };
        assert_eq!(
            simulate_survival(&clear, &cfg(50, 1000, Port::Reflection)).unwrap(),
            1.0
        );

        let spec = CavitySpec::default();
        let s = simulate_survival(&spec, &cfg(1, 200_000, Port::Reflection)).unwrap();
        let a = port_coefficients(&spec, ObjectState::Present).unwrap().a;
        let sigma = (a * (1.0 - a) / 200_000.0).sqrt();
        assert!((s - (1.0 - a)).abs() < 4.0 * sigma);
    }

    #[test]
    fn certain_absorption_never_survives() {
        // A = 1 is out of reach of a two-sided cavity, so drive the sampler directly.
        assert_eq!(
            survival_fraction(1.0, &cfg(1, 5000, Port::Reflection)).unwrap(),
            0.0
        );
        assert_eq!(
            survival_fraction(1.0, &cfg(0, 10, Port::Reflection)).unwrap(),
            1.0
        );
        assert_eq!(
            survival_fraction(0.0, &cfg(80, 5000, Port::Reflection)).unwrap(),
            1.0
        );
    }

    #[test]
    fn snr_matches_analytic_at_moderate_statistics() {
        let spec = CavitySpec::default();
        let det = DetectorSpec::default();
        for port in Port::BOTH {
            let stats = simulate_counts(&spec, &det, &cfg(55, 100_000, port)).unwrap();
            let analytic = snr(&spec, &det, port, 55.0).unwrap();
            assert!(((stats.empirical_snr - analytic) / analytic).abs() < 0.05);
            let eta = total_security(&spec, 55.0).unwrap();
            let sigma = (eta * (1.0 - eta) / 100_000.0).sqrt();
            assert!((stats.survival_fraction - eta).abs() <= 3.0 * sigma);
        }
    }

    #[test]
    fn snr_grows_as_root_n0() {
        let spec = CavitySpec::default();
        let det = DetectorSpec::default();
        let small = simulate_counts(&spec, &det, &cfg(10, 100_000, Port::Transmission)).unwrap();
        let large = simulate_counts(&spec, &det, &cfg(40, 100_000, Port::Transmission)).unwrap();
        let ratio = large.empirical_snr / small.empirical_snr;
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn lanes_cover_all_trials() {
        let l = lanes(2 * LANE_TRIALS + 5);
        assert_eq!(l.len(), 3);
        assert_eq!(l.iter().map(|x| x.1).sum::<u64>(), 2 * LANE_TRIALS + 5);
        assert!(cfg(1, 0, Port::Reflection).validate().is_err());
    }
}
