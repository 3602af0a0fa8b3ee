//! From circuit values (capacitances, currents, wire inductance) to the
//! coupling parameter `zeta`, qubit frequencies, the capacitance matrix and
//! the coupling matrix `Omega`.
//!
//! All frequencies are angular (rad/s).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::linalg::CsrMatrix;
use crate::topology::{binomial, check_dim, AdjacencyMatrix};

/// Magnetic flux quantum `h / 2e` in webers.
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;

/// Series truncation order used when none is given.
pub const DEFAULT_ORDER: u32 = 3;

/// Largest `d` for which `(C^-1)_jj` is obtained by explicit inversion.
const EXACT_INVERSE_MAX_DIM: u32 = 10;

/// Junction and coupler values for a uniform hypercube of phase qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitParams {
    /// Intrinsic junction capacitance `C_x` (F).
    pub junction_capacitance: f64,
    /// Coupling capacitance `C_c` (F).
    pub coupling_capacitance: f64,
    /// Critical current `I_c` (A).
    pub critical_current: f64,
    /// Bias current per node (A); length `2^d`.
    pub bias_currents: Vec<f64>,
    /// Inductance of the coupling wires (H), if modelled.
    pub wire_inductance: Option<f64>,
    pub dim: u32,
}

impl CircuitParams {
    /// Parameters with the same bias current on every node.
    pub fn uniform(
        dim: u32,
        junction_capacitance: f64,
        coupling_capacitance: f64,
        critical_current: f64,
        bias_current: f64,
    ) -> Result<Self> {
        check_dim(dim)?;
        let p = Self {
            junction_capacitance,
            coupling_capacitance,
            critical_current,
            bias_currents: vec![bias_current; 1 << dim],
            wire_inductance: None,
            dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_wire_inductance(mut self, inductance: f64) -> Result<Self> {
        if !(inductance > 0.0) {
            return Err(invalid("wire_inductance", "must be positive"));
        }
        self.wire_inductance = Some(inductance);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        if !(self.junction_capacitance > 0.0) {
            return Err(invalid("junction_capacitance", "must be positive"));
        }
        if !(self.coupling_capacitance >= 0.0) {
            return Err(invalid("coupling_capacitance", "must be non-negative"));
        }
        if !(self.critical_current > 0.0) {
            return Err(invalid("critical_current", "must be positive"));
        }
        if self.bias_currents.len() != 1 << self.dim {
            return Err(invalid("bias_currents", format!("expected {} entries", 1usize << self.dim)));
        }
        for &i in &self.bias_currents {
            if !(i >= 0.0) {
                return Err(invalid("bias_currents", "must be non-negative"));
            }
            if i >= self.critical_current {
                return Err(Error::JunctionSwitched { bias: i, critical: self.critical_current });
            }
        }
        Ok(())
    }

    /// Total capacitance per junction, `C = C_x + d C_c`.
    pub fn total_capacitance(&self) -> f64 {
        self.junction_capacitance + f64::from(self.dim) * self.coupling_capacitance
    }

    /// Qubit frequency of every node from its bias current.
    pub fn frequencies(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let inv = inverse_capacitance_diagonal(self)?;
        self.bias_currents
            .iter()
            .zip(inv)
            .map(|(&bias, inv)| qubit_frequency(self.critical_current, bias, inv))
            .collect()
    }
}

/// `zeta = C_c / (C_x + d C_c)`.
pub fn coupling_parameter(params: &CircuitParams) -> Result<f64> {
    if !(params.junction_capacitance > 0.0) {
        return Err(invalid("junction_capacitance", "must be positive"));
    }
    if !(params.coupling_capacitance >= 0.0) {
        return Err(invalid("coupling_capacitance", "must be non-negative"));
    }
    Ok(params.coupling_capacitance / params.total_capacitance())
}

fn check_convergent(zeta: f64, dim: u32) -> Result<()> {
    if !(zeta >= 0.0) {
        return Err(invalid("zeta", "must be non-negative"));
    }
    let product = zeta * f64::from(dim);
    if product >= 1.0 {
        return Err(Error::DivergentCoupling { product });
    }
    Ok(())
}

/// `C_jk = C (delta_jk - zeta A_jk)` in farads.
pub fn capacitance_matrix(params: &CircuitParams, adjacency: &AdjacencyMatrix) -> Result<DMatrix<f64>> {
    if adjacency.dim() != params.dim {
        return Err(Error::DimensionMismatch(adjacency.dim(), params.dim));
    }
    let zeta = coupling_parameter(params)?;
    check_convergent(zeta, params.dim)?;
    let n = adjacency.node_count();
    let c = params.total_capacitance();
    Ok((DMatrix::identity(n, n) - adjacency.matrix() * zeta) * c)
}

/// Diagonal of the inverse capacitance matrix (1/F).
///
/// Uses explicit inversion up to `d = 10`; above that the spectral
/// decomposition of the adjacency matrix, whose eigenprojectors have the
/// uniform diagonal `C(d, k) / 2^d`.
pub fn inverse_capacitance_diagonal(params: &CircuitParams) -> Result<Vec<f64>> {
    let zeta = coupling_parameter(params)?;
    check_convergent(zeta, params.dim)?;
    let n = 1usize << params.dim;
    if params.dim <= EXACT_INVERSE_MAX_DIM {
        let adj = crate::topology::hypercube_adjacency(params.dim)?;
        let cap = capacitance_matrix(params, &adj)?;
        let inv = cap
            .cholesky()
            .ok_or_else(|| invalid("capacitance matrix", "not positive definite"))?
            .inverse();
        Ok((0..n).map(|j| inv[(j, j)]).collect())
    } else {
        let d = params.dim;
        let norm = (n as f64).recip();
        let s: f64 = (0..=d)
            .map(|k| {
                let lambda = f64::from(d) - 2.0 * f64::from(k);
                binomial(d, k) as f64 * norm / (1.0 - zeta * lambda)
            })
            .sum();
        Ok(vec![s / params.total_capacitance(); n])
    }
}

/// `omega_j = (2 pi I_c (C^-1)_jj / Phi_0)^(1/2) (1 - I_j^2 / I_c^2)^(1/4)`.
pub fn qubit_frequency(critical_current: f64, bias_current: f64, inv_cap_diag: f64) -> Result<f64> {
    if !(critical_current > 0.0) {
        return Err(invalid("critical_current", "must be positive"));
    }
    if !(inv_cap_diag > 0.0) {
        return Err(invalid("inv_cap_diag", "must be positive"));
    }
    if !(bias_current >= 0.0) {
        return Err(invalid("bias_current", "must be non-negative"));
    }
    if bias_current >= critical_current {
        return Err(Error::JunctionSwitched { bias: bias_current, critical: critical_current });
    }
    let plasma = (2.0 * PI * critical_current * inv_cap_diag / FLUX_QUANTUM).sqrt();
    let r = bias_current / critical_current;
    Ok(plasma * (1.0 - r * r).powf(0.25))
}

/// Bias current giving frequency `omega` (inverse of [`qubit_frequency`]).
pub fn bias_for_frequency(critical_current: f64, inv_cap_diag: f64, omega: f64) -> Result<f64> {
    let plasma = qubit_frequency(critical_current, 0.0, inv_cap_diag)?;
    if !(omega > 0.0 && omega <= plasma) {
        return Err(invalid("omega", format!("must lie in (0, {plasma:e}] rad/s")));
    }
    let q = (omega / plasma).powi(4);
    Ok(critical_current * (1.0 - q).sqrt())
}

/// Coupling matrix `Omega` with its truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    pub entries: CsrMatrix,
    pub order: u32,
}

impl CouplingMatrix {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries.get(j, k)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.entries.to_dense()
    }
}

/// `P(r) = sum_{m=1..order} zeta^m W_m(r)`, where `W_m(r)` counts walks of
/// length `m` between two nodes at Hamming distance `r`.
fn series_by_distance(dim: u32, zeta: f64, order: u32) -> Vec<f64> {
    let d = dim as usize;
    let mut walks = vec![0.0; d + 1];
    walks[0] = 1.0;
    let mut total = vec![0.0; d + 1];
    let mut power = 1.0;
    for _ in 0..order {
        let mut next = vec![0.0; d + 1];
        for r in 0..=d {
            if r > 0 {
                next[r] += r as f64 * walks[r - 1];
            }
            if r < d {
                next[r] += (d - r) as f64 * walks[r + 1];
            }
        }
        walks = next;
        power *= zeta;
        for r in 0..=d {
            total[r] += power * walks[r];
        }
    }
    total
}

fn masks_up_to_weight(dim: u32, weight: u32) -> Vec<u32> {
    let mut out = vec![0u32];
    let mut frontier = vec![0u32];
    for _ in 0..weight.min(dim) {
        let mut next = Vec::new();
        for &m in &frontier {
            let top = if m == 0 { 0 } else { 32 - m.leading_zeros() };
            for b in top..dim {
                next.push(m | 1 << b);
            }
        }
        out.extend_from_slice(&next);
        frontier = next;
    }
    out
}

/// `Omega_jk = (1/2) sqrt(omega_j omega_k) (zeta A + ... + zeta^order A^order)_jk`.
pub fn coupling_matrix(omega: &[f64], zeta: f64, dim: u32, order: u32) -> Result<CouplingMatrix> {
    check_dim(dim)?;
    let n = 1usize << dim;
    if omega.len() != n {
        return Err(invalid("omega", format!("expected {n} frequencies, got {}", omega.len())));
    }
    if order == 0 {
        return Err(invalid("order", "must be at least 1"));
    }
    if omega.iter().any(|&w| !(w > 0.0)) {
        return Err(invalid("omega", "frequencies must be positive"));
    }
    check_convergent(zeta, dim)?;
    let series = series_by_distance(dim, zeta, order);
    let masks = masks_up_to_weight(dim, order);
    let roots: Vec<f64> = omega.iter().map(|w| w.sqrt()).collect();
    let mut triplets = Vec::with_capacity(n * masks.len());
    for x in 0..n {
        for &m in &masks {
            let p = series[m.count_ones() as usize];
            if p != 0.0 {
                let y = x ^ m as usize;
                triplets.push((x, y, 0.5 * roots[x] * roots[y] * p));
            }
        }
    }
    Ok(CouplingMatrix { entries: CsrMatrix::from_triplets(n, triplets), order })
}

/// The untruncated coupling `(1/2) sqrt(omega_j omega_k) [(1 - zeta A)^-1 - 1]_jk`
/// by explicit inversion.
pub fn resummed_coupling_matrix(omega: &[f64], zeta: f64, adjacency: &AdjacencyMatrix) -> Result<DMatrix<f64>> {
    let n = adjacency.node_count();
    if omega.len() != n {
        return Err(invalid("omega", format!("expected {n} frequencies, got {}", omega.len())));
    }
    check_convergent(zeta, adjacency.dim())?;
    let id = DMatrix::<f64>::identity(n, n);
    let inv = (&id - adjacency.matrix() * zeta)
        .try_inverse()
        .ok_or_else(|| invalid("zeta", "1 - zeta A is singular"))?;
    let series = inv - id;
    Ok(DMatrix::from_fn(n, n, |j, k| 0.5 * (omega[j] * omega[k]).sqrt() * series[(j, k)]))
}

/// Resonant frequency of a coupling wire, `1 / sqrt(L C_c)` (rad/s).
pub fn lc_mode_frequency(inductance: f64, coupling_capacitance: f64) -> Result<f64> {
    if !(inductance > 0.0) {
        return Err(invalid("inductance", "must be positive"));
    }
    if !(coupling_capacitance > 0.0) {
        return Err(invalid("coupling_capacitance", "must be positive"));
    }
    Ok((inductance * coupling_capacitance).sqrt().recip())
}

/// Wire-mode frequency and its margin above the qubit frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LcModeMargin {
    pub omega_lc: f64,
    /// `omega_lc / omega_0`.
    pub ratio: f64,
}

pub fn lc_mode_margin(inductance: f64, coupling_capacitance: f64, omega0: f64) -> Result<LcModeMargin> {
    if !(omega0 > 0.0) {
        return Err(invalid("omega0", "must be positive"));
    }
    let omega_lc = lc_mode_frequency(inductance, coupling_capacitance)?;
    Ok(LcModeMargin { omega_lc, ratio: omega_lc / omega0 })
}
