//! Brute-force simulation of the full `2^N`-dimensional qubit register
//! (`N = 2^d` qubits, `d <= 3`) under the rotating-wave Hamiltonian
//!
//! ```text
//! H = -(1/2) sum_j omega'_j Z_j + (1/2) sum_{j<k} Omega_jk (X_j X_k + Y_j Y_k)
//! ```
//!
//! with dressed on-site frequencies `omega'_j = omega_j + Omega_jj`, so that
//! the one-excitation block reproduces `omega + Omega` exactly. Used to
//! check that nothing leaks out of the single-excitation subspace.
//!
//! Register index bit `j` set means qubit `j` is excited.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::CouplingMatrix;
use crate::dynamics::TransferSpec;
use crate::error::{invalid, Error, Result};
use crate::linalg::SpectralPropagator;

/// Largest hypercube dimension the oracle accepts.
pub const MAX_ORACLE_DIMENSION: u32 = 3;

fn check_oracle_dim(dim: u32) -> Result<()> {
    if dim > MAX_ORACLE_DIMENSION {
        return Err(Error::TooLarge { what: "full register", dim, max: MAX_ORACLE_DIMENSION });
    }
    Ok(())
}

/// Register Hamiltonian as a dense real symmetric matrix.
pub fn full_qubit_hamiltonian(dim: u32, omega: &[f64], coupling: &CouplingMatrix) -> Result<DMatrix<f64>> {
    check_oracle_dim(dim)?;
    let n = 1usize << dim;
    if omega.len() != n || coupling.dim() != n {
        return Err(invalid("omega", format!("expected {n} qubits")));
    }
    let states = 1usize << n;
    let dressed: Vec<f64> = (0..n).map(|j| omega[j] + coupling.get(j, j)).collect();
    let mut h = DMatrix::zeros(states, states);
    for s in 0..states {
        h[(s, s)] = (0..n).map(|j| if s >> j & 1 == 1 { 0.5 * dressed[j] } else { -0.5 * dressed[j] }).sum();
        for j in 0..n {
            for k in j + 1..n {
                if (s >> j & 1) != (s >> k & 1) {
                    let t = s ^ (1 << j) ^ (1 << k);
                    h[(t, s)] += coupling.get(j, k);
                }
            }
        }
    }
    Ok(h)
}

/// Diagonal of `sum_j (1 - Z_j) / 2`.
pub fn excitation_numbers(dim: u32) -> Result<Vec<f64>> {
    check_oracle_dim(dim)?;
    Ok((0..1usize << (1 << dim)).map(|s| f64::from(s.count_ones())).collect())
}

/// Register state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FullSpaceState {
    pub dim: u32,
    pub amplitudes: Vec<Complex64>,
}

impl FullSpaceState {
    /// `alpha |0...0> + beta |1_a>`.
    pub fn from_spec(spec: &TransferSpec) -> Result<Self> {
        let dim = spec.a.dim();
        check_oracle_dim(dim)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << (1 << dim)];
        amplitudes[0] = spec.alpha;
        amplitudes[1 << spec.a.index()] += spec.beta;
        Ok(Self { dim, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Mean and variance of the excitation number.
    pub fn excitation_statistics(&self) -> (f64, f64) {
        let weight = self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let count = |s: usize| f64::from(s.count_ones());
        let mean = self.amplitudes.iter().enumerate().map(|(s, z)| count(s) * z.norm_sqr()).sum::<f64>() / weight;
        let var = self.amplitudes.iter().enumerate().map(|(s, z)| (count(s) - mean).powi(2) * z.norm_sqr()).sum::<f64>() / weight;
        (mean, var)
    }

    pub fn energy(&self, h: &DMatrix<f64>) -> f64 {
        let n = self.amplitudes.len();
        let mut e = 0.0;
        for r in 0..n {
            let hr: Complex64 = (0..n).map(|c| self.amplitudes[c] * h[(r, c)]).sum();
            e += (self.amplitudes[r].conj() * hr).re;
        }
        e
    }
}

/// Eigendecomposed register Hamiltonian.
#[derive(Clone, Debug)]
pub struct FullSpaceSimulator {
    dim: u32,
    hamiltonian: DMatrix<f64>,
    propagator: SpectralPropagator,
}

impl FullSpaceSimulator {
    pub fn new(dim: u32, omega: &[f64], coupling: &CouplingMatrix) -> Result<Self> {
        let hamiltonian = full_qubit_hamiltonian(dim, omega, coupling)?;
        let propagator = SpectralPropagator::new(hamiltonian.clone());
        Ok(Self { dim, hamiltonian, propagator })
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }

    pub fn evolve(&self, state: &FullSpaceState, t: f64) -> Result<FullSpaceState> {
        if state.dim != self.dim {
            return Err(Error::DimensionMismatch(state.dim, self.dim));
        }
        Ok(FullSpaceState { dim: self.dim, amplitudes: self.propagator.apply(&state.amplitudes, t) })
    }

    /// Fidelity against `alpha |0) + (-i)^{|a-b|} e^{-i omega_0 t} beta |1_b)`,
    /// with `omega_0 = reference`.
    pub fn transfer(&self, spec: &TransferSpec, reference: f64, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(invalid("t", "must be non-negative"));
        }
        let psi = self.evolve(&FullSpaceState::from_spec(spec)?, t)?;
        let dist = (spec.a.value() ^ spec.b.value()).count_ones();
        let quarter = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ][dist as usize % 4];
        let target_b = quarter * Complex64::from_polar(1.0, -reference * t) * spec.beta;
        let overlap = spec.alpha.conj() * psi.amplitudes[0] + target_b.conj() * psi.amplitudes[1 << spec.b.index()];
        Ok(overlap.norm_sqr())
    }
}

/// One-shot [`FullSpaceSimulator::transfer`].
pub fn full_space_transfer(
    dim: u32,
    omega: &[f64],
    coupling: &CouplingMatrix,
    spec: &TransferSpec,
    reference: f64,
    t: f64,
) -> Result<f64> {
    FullSpaceSimulator::new(dim, omega, coupling)?.transfer(spec, reference, t)
}

/// Single-excitation block of `h` minus the ground-state energy.
pub fn single_excitation_block(dim: u32, h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_oracle_dim(dim)?;
    let n = 1usize << dim;
    if h.nrows() != 1 << n {
        return Err(invalid("h", "size does not match the register"));
    }
    let e0 = h[(0, 0)];
    Ok(DMatrix::from_fn(n, n, |x, y| h[(1 << x, 1 << y)] - if x == y { e0 } else { 0.0 }))
}
