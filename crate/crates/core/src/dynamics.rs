//! Coherent evolution in the single-excitation subspace.
//!
//! The effective Hamiltonian `H = omega + Omega` acts either on the `2^d`
//! node states or, when frequencies depend only on the row (Hamming weight
//! from the source corner), on the `d + 1` symmetric row states where the
//! adjacency matrix becomes `2 J_x` of a spin `d/2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::coupling_matrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{ChebyshevPropagator, CsrMatrix, SpectralPropagator};
use crate::topology::{binomial, check_dim, subcube_between, NodeLabel, Subcube};

/// Largest `d` for which a node-space Hamiltonian is assembled.
pub const MAX_NODE_SPACE_DIMENSION: u32 = 16;

/// Largest matrix size propagated by full eigendecomposition; bigger ones
/// go through the Chebyshev expansion.
pub const MAX_SPECTRAL_SIZE: usize = 1024;

/// Default detuning of programmed-out nodes, in units of `zeta omega_0`.
pub const DEFAULT_DETUNING_FACTOR: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// One state per node, `2^d` states.
    Node,
    /// One symmetric state per row, `d + 1` states.
    Column,
}

/// `phi(t) = (1/2) sum_x omega_x t`, kept as `count * anchor + offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct GlobalPhase {
    half_count: f64,
    anchor: f64,
    offset: f64,
}

impl GlobalPhase {
    fn new(weighted: impl Iterator<Item = (f64, f64)>, half_count: f64, anchor: f64) -> Self {
        let offset = 0.5 * weighted.map(|(w, m)| m * (w - anchor)).sum::<f64>();
        Self { half_count, anchor, offset }
    }

    fn at(self, t: f64) -> f64 {
        self.half_count * self.anchor * t + self.offset * t
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveHamiltonian {
    dim: u32,
    basis: Basis,
    omega_diag: Vec<f64>,
    coupling: CsrMatrix,
    reference: f64,
    phase: GlobalPhase,
}

impl EffectiveHamiltonian {
    /// Node-space Hamiltonian with order-`order` capacitive coupling between
    /// qubits of the given frequencies.
    pub fn node_space(dim: u32, omega: Vec<f64>, zeta: f64, order: u32) -> Result<Self> {
        check_node_dim(dim)?;
        let coupling = coupling_matrix(&omega, zeta, dim, order)?.entries;
        Self::from_coupling(dim, omega, coupling)
    }

    /// All qubits at `omega0`.
    pub fn uniform(dim: u32, omega0: f64, zeta: f64, order: u32) -> Result<Self> {
        check_node_dim(dim)?;
        positive("omega0", omega0)?;
        Self::node_space(dim, vec![omega0; 1 << dim], zeta, order).map(|h| h.with_reference_frequency(omega0))
    }

    /// Node-space Hamiltonian from an explicit (real symmetric) coupling.
    pub fn from_coupling(dim: u32, omega: Vec<f64>, coupling: CsrMatrix) -> Result<Self> {
        check_node_dim(dim)?;
        let n = 1usize << dim;
        if omega.len() != n || coupling.dim() != n {
            return Err(invalid("omega", format!("expected {n} states")));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(invalid("omega", "frequencies must be finite"));
        }
        let scale = coupling.row(0).map(|(_, v)| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let asymmetry = coupling.max_asymmetry();
        if asymmetry > 1e-12 * scale {
            return Err(Error::NotHermitian { asymmetry });
        }
        let reference = omega.iter().copied().fold(f64::INFINITY, f64::min);
        let phase = GlobalPhase::new(omega.iter().map(|&w| (w, 1.0)), (n / 2) as f64, reference);
        Ok(Self { dim, basis: Basis::Node, omega_diag: omega, coupling, reference, phase })
    }

    /// Row-space Hamiltonian `omega_k + (1/2) sqrt(omega_k omega_l) P(2 J_x)_kl`
    /// where `P(x) = zeta x + ... + zeta^order x^order`.
    pub fn column_space(dim: u32, zeta: f64, row_frequencies: &[f64], order: u32) -> Result<Self> {
        check_dim(dim)?;
        let rows = dim as usize + 1;
        if row_frequencies.len() != rows {
            return Err(invalid("row_frequencies", format!("expected {rows} rows")));
        }
        if row_frequencies.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(invalid("row_frequencies", "frequencies must be positive"));
        }
        if order == 0 {
            return Err(invalid("order", "must be at least 1"));
        }
        if !(zeta >= 0.0) {
            return Err(invalid("zeta", "must be non-negative"));
        }
        if zeta * f64::from(dim) >= 1.0 {
            return Err(Error::DivergentCoupling { product: zeta * f64::from(dim) });
        }
        let a = jx_matrix(dim) * 2.0;
        let mut power = DMatrix::<f64>::identity(rows, rows);
        let mut series = DMatrix::<f64>::zeros(rows, rows);
        for m in 1..=order {
            power = &power * &a;
            series += &power * zeta.powi(m as i32);
        }
        let roots: Vec<f64> = row_frequencies.iter().map(|w| w.sqrt()).collect();
        let omega_col = DMatrix::from_fn(rows, rows, |k, l| 0.5 * roots[k] * roots[l] * series[(k, l)]);
        let reference = row_frequencies.iter().copied().fold(f64::INFINITY, f64::min);
        let phase = GlobalPhase::new(
            (0..=dim).map(|k| (row_frequencies[k as usize], binomial(dim, k) as f64)),
            (1u64 << dim) as f64 / 2.0,
            reference,
        );
        Ok(Self {
            dim,
            basis: Basis::Column,
            omega_diag: row_frequencies.to_vec(),
            coupling: CsrMatrix::from_dense(&omega_col),
            reference,
            phase,
        })
    }

    /// Row-space reduction of a node frequency assignment; rows are counted
    /// from node `0`.
    pub fn column_space_from_nodes(dim: u32, node_frequencies: &[f64], zeta: f64, order: u32) -> Result<Self> {
        let rows = row_frequencies_of(dim, node_frequencies)?;
        Self::column_space(dim, zeta, &rows, order)
    }

    /// Frequency `omega_0` used for the target phase `e^{-i omega_0 t}`.
    /// Defaults to the lowest qubit frequency.
    pub fn with_reference_frequency(mut self, omega0: f64) -> Self {
        self.reference = omega0;
        self
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Number of basis states.
    pub fn size(&self) -> usize {
        self.omega_diag.len()
    }

    pub fn omega_diag(&self) -> &[f64] {
        &self.omega_diag
    }

    pub fn coupling(&self) -> &CsrMatrix {
        &self.coupling
    }

    pub fn reference_frequency(&self) -> f64 {
        self.reference
    }

    /// `phi(t) = (1/2) sum_j omega_j t` over all qubits.
    pub fn global_phase(&self, t: f64) -> f64 {
        self.phase.at(t)
    }

    /// `omega + Omega` as a sparse matrix.
    pub fn matrix(&self) -> CsrMatrix {
        self.coupling.add_diagonal(&self.omega_diag)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.matrix().to_dense()
    }

    /// Time-evolution operator; eigendecomposes small matrices once.
    pub fn propagator(&self) -> Propagator {
        let n = self.size();
        let carrier = self.omega_diag.iter().sum::<f64>() / n as f64;
        let shifted = self.coupling.add_diagonal(&self.omega_diag.iter().map(|w| w - carrier).collect::<Vec<_>>());
        let kind = if n <= MAX_SPECTRAL_SIZE {
            Kind::Spectral(SpectralPropagator::new(shifted.to_dense()))
        } else {
            Kind::Chebyshev(shifted)
        };
        Propagator { carrier, phase: self.phase, reference: self.reference, basis: self.basis, dim: self.dim, kind }
    }

    fn state_index(&self, label: NodeLabel) -> Result<usize> {
        if label.dim() != self.dim {
            return Err(Error::DimensionMismatch(label.dim(), self.dim));
        }
        match self.basis {
            Basis::Node => Ok(label.index()),
            Basis::Column => match label.value() {
                0 => Ok(0),
                v if v == NodeLabel::antipode(self.dim)?.value() => Ok(self.dim as usize),
                _ => Err(invalid("label", "row space only represents the corners 0 and 1...1")),
            },
        }
    }
}

fn check_node_dim(dim: u32) -> Result<()> {
    check_dim(dim)?;
    if dim > MAX_NODE_SPACE_DIMENSION {
        return Err(Error::TooLarge { what: "node-space Hamiltonian", dim, max: MAX_NODE_SPACE_DIMENSION });
    }
    Ok(())
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, "must be positive and finite"))
    }
}

/// Per-row frequencies of a node assignment, failing unless every row is
/// constant.
pub fn row_frequencies_of(dim: u32, node_frequencies: &[f64]) -> Result<Vec<f64>> {
    check_dim(dim)?;
    if node_frequencies.len() != 1 << dim {
        return Err(invalid("node_frequencies", format!("expected {} entries", 1usize << dim)));
    }
    let mut rows: Vec<Option<f64>> = vec![None; dim as usize + 1];
    for (x, &w) in node_frequencies.iter().enumerate() {
        let k = x.count_ones() as usize;
        match rows[k] {
            None => rows[k] = Some(w),
            Some(v) if (v - w).abs() <= 1e-12 * v.abs().max(w.abs()) => {}
            Some(_) => return Err(Error::NotRowConstant { row: k as u32 }),
        }
    }
    Ok(rows.into_iter().map(|r| r.unwrap_or(0.0)).collect())
}

/// `J_x` for spin `d/2` in the `J_z` eigenbasis ordered by row
/// `k = 0..=d`: `(J_x)_{k,k+1} = sqrt((k+1)(d-k)) / 2`.
pub fn jx_matrix(dim: u32) -> DMatrix<f64> {
    let n = dim as usize + 1;
    let d = f64::from(dim);
    DMatrix::from_fn(n, n, |r, c| {
        let k = r.min(c) as f64;
        if r.abs_diff(c) == 1 {
            0.5 * ((k + 1.0) * (d - k)).sqrt()
        } else {
            0.0
        }
    })
}

/// `J_z = diag(k - d/2)`.
pub fn jz_matrix(dim: u32) -> DMatrix<f64> {
    let n = dim as usize + 1;
    DMatrix::from_fn(n, n, |r, c| if r == c { r as f64 - 0.5 * f64::from(dim) } else { 0.0 })
}

#[derive(Clone, Debug)]
enum Kind {
    Spectral(SpectralPropagator),
    Chebyshev(CsrMatrix),
}

/// `exp(-i H t)` for a fixed Hamiltonian, evaluated around a carrier
/// frequency so large optical phases stay exact.
#[derive(Clone, Debug)]
pub struct Propagator {
    carrier: f64,
    phase: GlobalPhase,
    reference: f64,
    basis: Basis,
    dim: u32,
    kind: Kind,
}

impl Propagator {
    pub fn size(&self) -> usize {
        match &self.kind {
            Kind::Spectral(s) => s.dim(),
            Kind::Chebyshev(m) => m.dim(),
        }
    }

    /// `exp(-i H t) psi` (no global phase).
    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        let out = match &self.kind {
            Kind::Spectral(s) => s.apply(psi, t),
            Kind::Chebyshev(m) => ChebyshevPropagator::new(m).apply(psi, t),
        };
        let c = Complex64::from_polar(1.0, -self.carrier * t);
        out.into_iter().map(|z| z * c).collect()
    }

    /// `(exp(-i H t))_{target, source}`.
    pub fn element(&self, target: usize, source: usize, t: f64) -> Complex64 {
        let c = Complex64::from_polar(1.0, -self.carrier * t);
        match &self.kind {
            Kind::Spectral(s) => s.element(target, source, t) * c,
            Kind::Chebyshev(_) => self.column(source, t)[target],
        }
    }

    /// `exp(-i H t) e_source`.
    pub fn column(&self, source: usize, t: f64) -> Vec<Complex64> {
        match &self.kind {
            Kind::Spectral(s) => {
                let c = Complex64::from_polar(1.0, -self.carrier * t);
                s.column(source, t).into_iter().map(|z| z * c).collect()
            }
            Kind::Chebyshev(_) => {
                let mut e = vec![Complex64::new(0.0, 0.0); self.size()];
                e[source] = Complex64::new(1.0, 0.0);
                self.evolve(&e, t)
            }
        }
    }

    pub fn global_phase(&self, t: f64) -> f64 {
        self.phase.at(t)
    }

    /// Amplitudes `f_x(t) = e^{i phi} (exp(-i H t))_{x, source}`.
    pub fn amplitudes(&self, source: usize, t: f64) -> Vec<Complex64> {
        let g = Complex64::from_polar(1.0, self.global_phase(t));
        self.column(source, t).into_iter().map(|z| z * g).collect()
    }

    /// Fidelity of the transfer described by `spec` at time `t`.
    pub fn transfer(&self, spec: &TransferSpec, t: f64) -> Result<TransferResult> {
        check_time(t)?;
        let (a, b) = self.endpoints(spec)?;
        let u = self.element(b, a, t);
        Ok(self.result_from_element(spec, u, t))
    }

    fn result_from_element(&self, spec: &TransferSpec, u: Complex64, t: f64) -> TransferResult {
        let dist = spec.a.value() ^ spec.b.value();
        let target_phase = minus_i_pow(dist.count_ones()) * Complex64::from_polar(1.0, -self.reference * t);
        let pa = spec.alpha.norm_sqr();
        let pb = spec.beta.norm_sqr();
        let overlap = pa + pb * target_phase.conj() * u;
        let phi = self.global_phase(t);
        TransferResult {
            amplitude: u * Complex64::from_polar(1.0, phi),
            fidelity: overlap.norm_sqr(),
            transfer_time: t,
            global_phase: phi,
        }
    }

    /// Best fidelity over `[t_lo, t_hi]`: a grid scan followed by
    /// golden-section refinement around the best grid point.
    pub fn peak_transfer(&self, spec: &TransferSpec, t_lo: f64, t_hi: f64, grid: usize) -> Result<TransferResult> {
        check_time(t_lo)?;
        if !(t_hi > t_lo) || !t_hi.is_finite() {
            return Err(invalid("t_hi", "window must be non-empty"));
        }
        if grid < 3 {
            return Err(invalid("grid", "need at least 3 points"));
        }
        let (a, b) = self.endpoints(spec)?;
        let f = |t: f64| self.result_from_element(spec, self.element(b, a, t), t).fidelity;
        let step = (t_hi - t_lo) / (grid - 1) as f64;
        let (best, _) = (0..grid)
            .map(|i| (i, f(t_lo + step * i as f64)))
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let mut lo = t_lo + step * best.saturating_sub(1) as f64;
        let mut hi = (t_lo + step * (best + 1) as f64).min(t_hi);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        while hi - lo > 1e-9 * step.max(f64::MIN_POSITIVE) {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = f(x1);
            }
        }
        let grid_best = t_lo + step * best as f64;
        let t = [0.5 * (lo + hi), grid_best].into_iter().fold(grid_best, |acc, t| if f(t) > f(acc) { t } else { acc });
        self.transfer(spec, t)
    }

    fn endpoints(&self, spec: &TransferSpec) -> Result<(usize, usize)> {
        if spec.a.dim() != self.dim {
            return Err(Error::DimensionMismatch(spec.a.dim(), self.dim));
        }
        match self.basis {
            Basis::Node => Ok((spec.a.index(), spec.b.index())),
            Basis::Column => {
                if spec.a.value() != 0 || spec.b.value().count_ones() != self.dim {
                    return Err(invalid("spec", "row space covers only transfer from 0...0 to 1...1"));
                }
                Ok((0, self.dim as usize))
            }
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", "must be finite and non-negative"))
    }
}

fn minus_i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Amplitudes `f_x(t)` for a single excitation starting on `source`,
/// including the global phase.
pub fn propagate(h: &EffectiveHamiltonian, source: NodeLabel, t: f64) -> Result<Vec<Complex64>> {
    check_time(t)?;
    let s = h.state_index(source)?;
    Ok(h.propagator().amplitudes(s, t))
}

/// `f_b(t) = e^{i phi} e^{-i omega_0 t} (-i)^d sin^d(zeta omega_0 t / 2)`
/// with `phi = 2^(d-1) omega_0 t`.
pub fn analytic_corner_amplitude(dim: u32, zeta: f64, omega0: f64, t: f64) -> Complex64 {
    let phi = 0.5 * (1u64 << dim) as f64 * omega0 * t;
    let s = (0.5 * zeta * omega0 * t).sin().powi(dim as i32);
    Complex64::from_polar(1.0, phi - omega0 * t) * minus_i_pow(dim) * s
}

/// `T = pi / (zeta omega_0)`.
pub fn transfer_time(zeta: f64, omega0: f64) -> Result<f64> {
    positive("zeta", zeta)?;
    positive("omega0", omega0)?;
    Ok(PI / (zeta * omega0))
}

/// `omega_0 (1 + 4 zeta^2 (k - d/2)^2)` for each row `k = 0..=d`.
pub fn corrected_row_frequencies(dim: u32, omega0: f64, zeta: f64) -> Vec<f64> {
    let half = 0.5 * f64::from(dim);
    (0..=dim)
        .map(|k| {
            let x = f64::from(k) - half;
            omega0 * (1.0 + 4.0 * zeta * zeta * x * x)
        })
        .collect()
}

/// Row-corrected frequency of every node, rows counted from node `0`.
pub fn corrected_frequencies(dim: u32, omega0: f64, zeta: f64) -> Result<Vec<f64>> {
    check_node_dim(dim)?;
    let rows = corrected_row_frequencies(dim, omega0, zeta);
    Ok((0..1usize << dim).map(|x| rows[x.count_ones() as usize]).collect())
}

/// Predicted `1 - F` at small `zeta`: `pi^2 d^2 zeta^2 / 2` without the
/// row correction, `3 pi^2 d^3 zeta^4 / 8 + pi^2 d^6 zeta^6 / 8` with it.
pub fn error_scaling_model(dim: u32, zeta: f64, corrected: bool) -> f64 {
    let d = f64::from(dim);
    let p2 = PI * PI;
    if corrected {
        3.0 * p2 * d.powi(3) * zeta.powi(4) / 8.0 + p2 * d.powi(6) * zeta.powi(6) / 8.0
    } else {
        p2 * d * d * zeta * zeta / 2.0
    }
}

/// Qubit state `alpha |0) + beta |1)` sent from node `a` to node `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferSpec {
    pub a: NodeLabel,
    pub b: NodeLabel,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl TransferSpec {
    pub fn new(a: NodeLabel, b: NodeLabel, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(a.dim(), b.dim()));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !((norm - 1.0).abs() <= 1e-10) {
            return Err(Error::UnnormalizedState { norm });
        }
        Ok(Self { a, b, alpha, beta })
    }

    /// Transfer of the excited state `|1)`.
    pub fn excitation(a: NodeLabel, b: NodeLabel) -> Result<Self> {
        Self::new(a, b, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// Corner-to-corner transfer of `|1)` across the whole cube.
    pub fn corner(dim: u32) -> Result<Self> {
        Self::excitation(NodeLabel::origin(dim)?, NodeLabel::antipode(dim)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferResult {
    /// `f_b(t)`, including the global phase.
    pub amplitude: Complex64,
    pub fidelity: f64,
    /// Evaluation time (s).
    pub transfer_time: f64,
    /// `phi` (rad).
    pub global_phase: f64,
}

/// Fidelity `|<Psi_f| exp(-i H t) |Psi_i>|^2` against the target
/// `alpha |0) + (-i)^{|a-b|} e^{-i omega_0 t} beta |b)`.
pub fn transfer_fidelity(h: &EffectiveHamiltonian, spec: &TransferSpec, t: f64) -> Result<TransferResult> {
    h.propagator().transfer(spec, t)
}

/// Best transfer in `[0.75 T, 1.25 T]` around `T = pi / (zeta omega_0)`.
pub fn peak_transfer_near(h: &EffectiveHamiltonian, spec: &TransferSpec, nominal: f64) -> Result<TransferResult> {
    check_time(nominal)?;
    h.propagator().peak_transfer(spec, 0.75 * nominal, 1.25 * nominal, 401)
}

/// Full-cube row-space Hamiltonian (uncorrected or row-corrected) used for
/// the error-scaling sweep.
pub fn sweep_hamiltonian(dim: u32, omega0: f64, zeta: f64, order: u32, corrected: bool) -> Result<EffectiveHamiltonian> {
    positive("omega0", omega0)?;
    let rows = if corrected { corrected_row_frequencies(dim, omega0, zeta) } else { vec![omega0; dim as usize + 1] };
    Ok(EffectiveHamiltonian::column_space(dim, zeta, &rows, order)?.with_reference_frequency(omega0))
}

/// Frequency assignment putting one subcube in resonance; see
/// [`program_subcubes`].
pub fn program_subcube(a: NodeLabel, b: NodeLabel, omega0: f64, zeta: f64, detuning_factor: f64) -> Result<Vec<f64>> {
    program_subcubes(&[(a, b)], omega0, zeta, detuning_factor, false)
}

/// Frequency assignment for one or more disjoint subcubes.
///
/// Subcube nodes sit at `omega_0` (row-corrected relative to `a` if
/// `corrected`). Every other node `x` is raised by `2 Delta` if its label
/// has even weight and `4 Delta` if odd, `Delta = detuning_factor zeta
/// omega_0`, so each edge leaving a subcube or joining two outside nodes is
/// detuned by at least `2 Delta`. Subcubes may neither overlap nor be joined
/// by an edge.
pub fn program_subcubes(
    pairs: &[(NodeLabel, NodeLabel)],
    omega0: f64,
    zeta: f64,
    detuning_factor: f64,
    corrected: bool,
) -> Result<Vec<f64>> {
    positive("omega0", omega0)?;
    positive("zeta", zeta)?;
    if !(detuning_factor > 1.0) || !detuning_factor.is_finite() {
        return Err(invalid("detuning_factor", "must exceed 1"));
    }
    let Some(&(first, _)) = pairs.first() else {
        return Err(invalid("pairs", "at least one subcube required"));
    };
    let dim = first.dim();
    check_node_dim(dim)?;
    let cubes: Vec<Subcube> = pairs.iter().map(|&(a, b)| subcube_between(a, b)).collect::<Result<_>>()?;
    for c in &cubes {
        if c.a().dim() != dim {
            return Err(Error::DimensionMismatch(c.a().dim(), dim));
        }
    }
    let n = 1usize << dim;
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, c) in cubes.iter().enumerate() {
        for x in c.nodes() {
            if owner[x.index()].is_some() {
                return Err(Error::SubcubesNotSeparated);
            }
            owner[x.index()] = Some(i);
        }
    }
    for x in 0..n {
        if let Some(i) = owner[x] {
            for j in 0..dim {
                if let Some(k) = owner[x ^ (1 << j)] {
                    if k != i {
                        return Err(Error::SubcubesNotSeparated);
                    }
                }
            }
        }
    }
    let delta = detuning_factor * zeta * omega0;
    Ok((0..n)
        .map(|x| match owner[x] {
            Some(i) => {
                let c = &cubes[i];
                if corrected {
                    let k = f64::from((x as u32 ^ c.a().value()).count_ones());
                    let half = 0.5 * f64::from(c.dim());
                    omega0 * (1.0 + 4.0 * zeta * zeta * (k - half).powi(2))
                } else {
                    omega0
                }
            }
            None if x.count_ones() % 2 == 0 => omega0 + 2.0 * delta,
            None => omega0 + 4.0 * delta,
        })
        .collect())
}

/// Hamiltonian for a programmed frequency assignment, with `omega_0` as the
/// reference frequency.
pub fn programmed_hamiltonian(dim: u32, frequencies: Vec<f64>, omega0: f64, zeta: f64, order: u32) -> Result<EffectiveHamiltonian> {
    Ok(EffectiveHamiltonian::node_space(dim, frequencies, zeta, order)?.with_reference_frequency(omega0))
}
