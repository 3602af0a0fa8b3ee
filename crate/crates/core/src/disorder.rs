//! Static coupling disorder: Monte Carlo fidelity averages and the
//! localization fits.
//!
//! Each edge gets `Omega_jk = omega_0 (zeta + z_jk) / 2` with
//! `z_jk ~ U(-delta_zeta, delta_zeta)` shared by both directions. Only the
//! first-order coupling is kept and all qubits sit at `omega_0`.

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::CouplingMatrix;
use crate::dynamics::transfer_time;
use crate::error::{invalid, Error, Result};
use crate::linalg::{ChebyshevPropagator, CsrMatrix};
use crate::topology::{check_dim, Hypercube};

/// One Monte Carlo ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderConfig {
    pub dim: u32,
    pub zeta: f64,
    /// rad/s.
    pub omega0: f64,
    /// Absolute half-width of the coupling perturbation.
    pub delta_zeta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl DisorderConfig {
    /// `delta_zeta` given as a fraction of `zeta`.
    pub fn relative(dim: u32, zeta: f64, omega0: f64, relative: f64, trials: usize, seed: u64) -> Self {
        Self { dim, zeta, omega0, delta_zeta: relative * zeta, trials, seed }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        if !(self.zeta > 0.0) || !(self.omega0 > 0.0) {
            return Err(invalid("zeta, omega0", "must be positive"));
        }
        if !(self.delta_zeta >= 0.0 && self.delta_zeta < self.zeta) {
            return Err(invalid("delta_zeta", "must satisfy 0 <= delta_zeta < zeta"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        Ok(())
    }

    pub fn transfer_time(&self) -> Result<f64> {
        transfer_time(self.zeta, self.omega0)
    }
}

/// Default trial counts: 10000, 1000 and 100
/// for `d` = 6, 10 and 16; 1000 otherwise.
pub fn default_trials(dim: u32) -> usize {
    match dim {
        6 => 10_000,
        10 => 1_000,
        16 => 100,
        _ => 1_000,
    }
}

/// Independent random stream for one trial of a seeded ensemble.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One disordered first-order coupling matrix. Edges are visited in
/// [`Hypercube::edges`] order, one draw each.
pub fn sample_disordered_coupling<R: Rng + ?Sized>(
    dim: u32,
    zeta: f64,
    delta_zeta: f64,
    omega0: f64,
    rng: &mut R,
) -> Result<CouplingMatrix> {
    let cube = Hypercube::new(dim)?;
    if !(delta_zeta >= 0.0 && delta_zeta < zeta) {
        return Err(invalid("delta_zeta", "must satisfy 0 <= delta_zeta < zeta"));
    }
    let dist = (delta_zeta > 0.0).then(|| Uniform::new(-delta_zeta, delta_zeta));
    let mut triplets = Vec::with_capacity(2 * dim as usize * cube.node_count());
    for (x, y) in cube.edges() {
        let z = match &dist {
            Some(u) => loop {
                let z = u.sample(rng);
                if z > -delta_zeta {
                    break z;
                }
            },
            None => 0.0,
        };
        let v = 0.5 * omega0 * (zeta + z);
        triplets.push((x, y, v));
        triplets.push((y, x, v));
    }
    Ok(CouplingMatrix { entries: CsrMatrix::from_triplets(cube.node_count(), triplets), order: 1 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisorderEnsembleResult {
    pub config: DisorderConfig,
    pub mean_fidelity: f64,
    /// Sample standard deviation over `sqrt(trials)`; zero for one trial.
    pub std_error: f64,
    pub per_trial_fidelities: Vec<f64>,
    /// Largest `|sum_x |f_x|^2 - 1|` over trials.
    pub max_norm_error: f64,
}

struct Trial {
    fidelity: f64,
    norm_error: f64,
}

fn run_trial(config: &DisorderConfig, t: f64, trial: u64) -> Result<Trial> {
    let mut rng = trial_rng(config.seed, trial);
    let coupling = sample_disordered_coupling(config.dim, config.zeta, config.delta_zeta, config.omega0, &mut rng)?;
    let n = coupling.dim();
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    e[0] = Complex64::new(1.0, 0.0);
    // The uniform omega_0 diagonal only contributes a phase.
    let f = ChebyshevPropagator::new(&coupling.entries).apply(&e, t);
    let norm: f64 = f.iter().map(|z| z.norm_sqr()).sum();
    Ok(Trial { fidelity: f[n - 1].norm_sqr(), norm_error: (norm - 1.0).abs() })
}

/// Mean of `|f_b(T)|^2` over independent disorder realizations, corner to
/// opposite corner. Trials run in parallel on the current rayon pool; the
/// result depends only on the configuration and seed.
pub fn disorder_average_fidelity(config: &DisorderConfig) -> Result<DisorderEnsembleResult> {
    config.validate()?;
    let t = config.transfer_time()?;
    let trials: Vec<Trial> =
        (0..config.trials as u64).into_par_iter().map(|k| run_trial(config, t, k)).collect::<Result<_>>()?;
    let per_trial: Vec<f64> = trials.iter().map(|r| r.fidelity).collect();
    let max_norm_error = trials.iter().map(|r| r.norm_error).fold(0.0, f64::max);
    let n = per_trial.len() as f64;
    let mean = per_trial.iter().sum::<f64>() / n;
    let std_error = if per_trial.len() > 1 {
        let var = per_trial.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        log::warn!("a single disorder trial gives no standard error estimate");
        0.0
    };
    Ok(DisorderEnsembleResult {
        config: config.clone(),
        mean_fidelity: mean,
        std_error,
        per_trial_fidelities: per_trial,
        max_norm_error,
    })
}

/// Ordinary least squares `y = slope x + intercept` with its `R^2`.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2)
}

/// Fit of `ln F = intercept - d / length`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalizationFit {
    /// `f64::INFINITY` when the fidelity does not decay with `d`.
    pub length: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares fit of `ln(mean F)` against `d` at fixed disorder.
pub fn fit_localization(points: &[(u32, f64)]) -> Result<LocalizationFit> {
    let mut ds: Vec<u32> = points.iter().map(|p| p.0).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 3 {
        return Err(Error::DegenerateFit("need at least three distinct dimensions".into()));
    }
    if points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::DegenerateFit("mean fidelities must be positive".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(d, f)| (f64::from(d), f.ln())).collect();
    if logs.iter().all(|p| p.1.abs() < 1e-12) {
        return Ok(LocalizationFit { length: f64::INFINITY, slope: 0.0, intercept: 0.0, r_squared: 1.0 });
    }
    let (slope, intercept, r_squared) = linear_fit(&logs);
    let length = if slope < 0.0 { -1.0 / slope } else { f64::INFINITY };
    Ok(LocalizationFit { length, slope, intercept, r_squared })
}

/// `F = amplitude exp(-delta^2 / (2 width^2))`, fitted in log space; `R^2`
/// is evaluated on `F` itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub width: f64,
    pub r_squared: f64,
}

impl GaussianFit {
    pub fn eval(&self, delta: f64) -> f64 {
        self.amplitude * (-delta * delta / (2.0 * self.width * self.width)).exp()
    }
}

/// Gaussian fit of mean fidelity against `delta_zeta` at fixed `d`.
pub fn fit_gaussian(points: &[(f64, f64)]) -> Result<GaussianFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit("need at least three disorder strengths".into()));
    }
    if points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::DegenerateFit("mean fidelities must be positive".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, f)| (x * x, f.ln())).collect();
    let (slope, intercept, _) = linear_fit(&logs);
    if !(slope < 0.0) {
        return Err(Error::DegenerateFit("fidelity does not fall with disorder".into()));
    }
    let fit = GaussianFit { amplitude: intercept.exp(), width: (-0.5 / slope).sqrt(), r_squared: 0.0 };
    let mean = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|p| (p.1 - fit.eval(p.0)).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(GaussianFit { r_squared, ..fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const W0: f64 = 2.0 * PI * 5e9;

    #[test]
    fn zero_disorder_is_ideal() {
        let mut rng = trial_rng(1, 0);
        let c = sample_disordered_coupling(3, 0.01, 0.0, W0, &mut rng).unwrap();
        let adj = crate::topology::hypercube_adjacency(3).unwrap();
        assert_eq!(c.to_dense(), adj.matrix() * (0.5 * 0.01 * W0));
    }

    #[test]
    fn samples_stay_in_support_and_are_symmetric() {
        let mut rng = trial_rng(7, 3);
        let (zeta, dz) = (0.01, 0.004);
        let c = sample_disordered_coupling(4, zeta, dz, W0, &mut rng).unwrap();
        assert_eq!(c.entries.max_asymmetry(), 0.0);
        let cube = Hypercube::new(4).unwrap();
        for (x, y) in cube.edges() {
            let z = c.get(x, y) / (0.5 * W0) - zeta;
            assert!(z.abs() < dz);
        }
        assert_eq!(c.entries.nnz(), 2 * 32);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a = sample_disordered_coupling(5, 0.01, 0.003, W0, &mut trial_rng(42, 9)).unwrap();
        let b = sample_disordered_coupling(5, 0.01, 0.003, W0, &mut trial_rng(42, 9)).unwrap();
        let c = sample_disordered_coupling(5, 0.01, 0.003, W0, &mut trial_rng(42, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ensemble_without_disorder() {
        let cfg = DisorderConfig::relative(6, 0.005, W0, 0.0, 3, 1);
        let r = disorder_average_fidelity(&cfg).unwrap();
        assert_relative_eq!(r.mean_fidelity, 1.0, epsilon = 1e-10);
        assert!(r.max_norm_error < 1e-10);
    }

    #[test]
    fn single_trial_has_zero_std_error() {
        let cfg = DisorderConfig::relative(4, 0.005, W0, 0.2, 1, 5);
        assert_eq!(disorder_average_fidelity(&cfg).unwrap().std_error, 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(DisorderConfig::relative(4, 0.005, W0, 1.0, 10, 0).validate().is_err());
        assert!(DisorderConfig::relative(4, 0.005, W0, 0.1, 0, 0).validate().is_err());
        assert_eq!(default_trials(16), 100);
    }

    #[test]
    fn exact_exponential_recovered() {
        let pts: Vec<(u32, f64)> = [4, 6, 8, 10].iter().map(|&d| (d, (-f64::from(d) / 5.0).exp())).collect();
        let fit = fit_localization(&pts).unwrap();
        assert_relative_eq!(fit.length, 5.0, max_relative = 1e-6);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        let flat = fit_localization(&[(2, 1.0), (3, 1.0), (4, 1.0)]).unwrap();
        assert_eq!(flat.length, f64::INFINITY);
        assert!(fit_localization(&[(2, 0.9), (3, 0.8)]).is_err());
    }

    #[test]
    fn exact_gaussian_recovered() {
        let g = GaussianFit { amplitude: 0.99, width: 0.3, r_squared: 0.0 };
        let pts: Vec<(f64, f64)> = (0..6).map(|k| 0.1 * k as f64).map(|x| (x, g.eval(x))).collect();
        let fit = fit_gaussian(&pts).unwrap();
        assert_relative_eq!(fit.amplitude, 0.99, max_relative = 1e-12);
        assert_relative_eq!(fit.width, 0.3, max_relative = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }
}
