//! Energy decay and dephasing on the subspace spanned by the ground state
//! `|0)` and the single-excitation states `|x)`.
//!
//! The density matrix is split into the ground population `rho_00`, the
//! coherences `rho_0x` and the excited block `rho_xy`, which obey
//!
//! ```text
//! d/dt rho_00 = (1/T1) sum_x rho_xx
//! d/dt rho_0x = i (H rho_0.)_x - rho_0x / T2
//! d/dt rho_xy = -i [H, rho]_xy - delta_xy rho_xx / T1 - (1 - delta_xy) 2 rho_xy / T2
//! ```
//!
//! Integration runs in a frame rotating at a carrier frequency so the
//! optical phase never enters the step size; snapshots are reported in the
//! lab frame.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{Basis, EffectiveHamiltonian, TransferSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::{CsrMatrix, DormandPrince, LinearGenerator, TaylorExponential};

/// `T1` and `T_phi` in seconds; either may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceParams {
    t1: f64,
    t_phi: f64,
}

impl DecoherenceParams {
    pub fn new(t1: f64, t_phi: f64) -> Result<Self> {
        if !(t1 > 0.0) {
            return Err(invalid("t1", "must be positive"));
        }
        if !(t_phi > 0.0) {
            return Err(invalid("t_phi", "must be positive"));
        }
        Ok(Self { t1, t_phi })
    }

    /// From `T1` and `T2`, using `1/T2 = 1/(2 T1) + 1/T_phi`.
    pub fn from_t1_t2(t1: f64, t2: f64) -> Result<Self> {
        if !(t1 > 0.0) || !(t2 > 0.0) {
            return Err(invalid("t2", "T1 and T2 must be positive"));
        }
        let rate = 1.0 / t2 - 0.5 / t1;
        if rate < -1e-15 / t2 {
            return Err(invalid("t2", "T2 cannot exceed 2 T1"));
        }
        let t_phi = if rate <= 0.0 { f64::INFINITY } else { rate.recip() };
        Self::new(t1, t_phi)
    }

    /// No decay and no dephasing.
    pub fn coherent() -> Self {
        Self { t1: f64::INFINITY, t_phi: f64::INFINITY }
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t_phi(&self) -> f64 {
        self.t_phi
    }

    pub fn t2(&self) -> f64 {
        (0.5 / self.t1 + 1.0 / self.t_phi).recip()
    }
}

/// Density matrix restricted to `{|0), |x)}`, lab frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceDensityMatrix {
    pub time: f64,
    pub rho00: f64,
    /// `rho_0x`.
    pub coherences: Vec<Complex64>,
    /// `rho_xy`.
    pub excited: DMatrix<Complex64>,
}

impl SubspaceDensityMatrix {
    /// Number of excited states.
    pub fn dim(&self) -> usize {
        self.coherences.len()
    }

    pub fn population(&self, x: usize) -> f64 {
        self.excited[(x, x)].re
    }

    pub fn coherence(&self, x: usize) -> Complex64 {
        self.coherences[x]
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + (0..self.dim()).map(|x| self.population(x)).sum::<f64>()
    }

    pub fn trace_error(&self) -> f64 {
        (self.trace() - 1.0).abs()
    }

    /// `max |rho_xy - conj(rho_yx)|` over the excited block, including the
    /// imaginary parts of its diagonal.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in x..n {
                worst = worst.max((self.excited[(x, y)] - self.excited[(y, x)].conj()).norm());
            }
        }
        worst
    }

    /// Full `(N+1) x (N+1)` matrix with `|0)` first.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n + 1, n + 1, |r, c| match (r, c) {
            (0, 0) => Complex64::new(self.rho00, 0.0),
            (0, c) => self.coherences[c - 1],
            (r, 0) => self.coherences[r - 1].conj(),
            (r, c) => self.excited[(r - 1, c - 1)],
        })
    }

    /// Whether the smallest eigenvalue is at least `-tol` (Cholesky of
    /// `rho + tol`).
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let mut m = self.to_dense();
        let n = m.nrows();
        for r in 0..n {
            for c in r + 1..n {
                let avg = 0.5 * (m[(r, c)] + m[(c, r)].conj());
                m[(r, c)] = avg;
                m[(c, r)] = avg.conj();
            }
            m[(r, r)] = Complex64::new(m[(r, r)].re + tol, 0.0);
        }
        m.cholesky().is_some()
    }
}

/// The subspace Lindblad generator in a frame rotating at `carrier`.
#[derive(Clone, Debug)]
pub struct MasterEquation {
    h: CsrMatrix,
    carrier: f64,
    gamma1: f64,
    gamma2: f64,
}

impl MasterEquation {
    pub fn new(h: &EffectiveHamiltonian, dec: DecoherenceParams) -> Result<Self> {
        if h.basis() != Basis::Node {
            return Err(invalid("h", "master equation needs a node-space Hamiltonian"));
        }
        let n = h.size();
        let carrier = h.omega_diag().iter().sum::<f64>() / n as f64;
        let shifted: Vec<f64> = h.omega_diag().iter().map(|w| w - carrier).collect();
        Ok(Self { h: h.coupling().add_diagonal(&shifted), carrier, gamma1: dec.t1.recip(), gamma2: dec.t2().recip() })
    }

    /// Number of excited states `N`.
    pub fn size(&self) -> usize {
        self.h.dim()
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    /// Packed state `[rho_00, rho_0x (N), rho_xy (N*N, row-major)]` for
    /// `alpha |0) + beta |a)`.
    pub fn initial_state(&self, spec: &TransferSpec) -> Vec<Complex64> {
        let n = self.size();
        let a = spec.a.index();
        let mut x = vec![Complex64::new(0.0, 0.0); 1 + n + n * n];
        x[0] = Complex64::new(spec.alpha.norm_sqr(), 0.0);
        x[1 + a] = spec.alpha * spec.beta.conj();
        x[1 + n + a * n + a] = Complex64::new(spec.beta.norm_sqr(), 0.0);
        x
    }

    /// Unpack a rotating-frame state at time `t` into the lab frame.
    pub fn snapshot(&self, state: &[Complex64], t: f64) -> SubspaceDensityMatrix {
        let n = self.size();
        let rot = Complex64::from_polar(1.0, self.carrier * t);
        SubspaceDensityMatrix {
            time: t,
            rho00: state[0].re,
            coherences: state[1..=n].iter().map(|z| z * rot).collect(),
            excited: DMatrix::from_row_slice(n, n, &state[1 + n..]),
        }
    }
}

impl LinearGenerator for MasterEquation {
    fn dim(&self) -> usize {
        let n = self.size();
        1 + n + n * n
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.size();
        let i = Complex64::new(0.0, 1.0);
        let (r, e) = (&x[1..=n], &x[1 + n..]);
        let (out0, rest) = out.split_at_mut(1);
        let (out_r, out_e) = rest.split_at_mut(n);

        out0[0] = Complex64::new(self.gamma1 * (0..n).map(|k| e[k * n + k].re).sum::<f64>(), 0.0);

        self.h.mul_complex_into(r, out_r);
        for (o, rx) in out_r.iter_mut().zip(r) {
            *o = i * *o - rx * self.gamma2;
        }

        // M = H E, then [H, E] = M - M^dagger for Hermitian E.
        out_e.fill(Complex64::new(0.0, 0.0));
        for row in 0..n {
            let dst = &mut out_e[row * n..(row + 1) * n];
            for (col, h) in self.h.row(row) {
                let src = &e[col * n..(col + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += s * h;
                }
            }
        }
        for row in 0..n {
            for col in row..n {
                let m_rc = out_e[row * n + col];
                let m_cr = out_e[col * n + row];
                if row == col {
                    let comm = m_rc - m_rc.conj();
                    out_e[row * n + row] = -i * comm - e[row * n + row] * self.gamma1;
                } else {
                    let comm_rc = m_rc - m_cr.conj();
                    let decay = 2.0 * self.gamma2;
                    out_e[row * n + col] = -i * comm_rc - e[row * n + col] * decay;
                    out_e[col * n + row] = (-i * comm_rc).conj() - e[col * n + row] * decay;
                }
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.h.gershgorin_bounds();
        2.0 * lo.abs().max(hi.abs()) + self.gamma1 + 2.0 * self.gamma2
    }
}

/// Time-stepping scheme for the master equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MasterSolver {
    /// Adaptive Dormand-Prince 5(4) with the given relative tolerance.
    DormandPrince { rtol: f64 },
    /// Taylor-series exponential substeps converged to roundoff.
    Taylor,
}

impl Default for MasterSolver {
    fn default() -> Self {
        MasterSolver::Taylor
    }
}

/// Integrate from `t = 0` and hand each requested time's snapshot to
/// `observe`. `t_grid` must be non-decreasing and non-negative.
pub fn integrate_master_equation_with(
    h: &EffectiveHamiltonian,
    spec: &TransferSpec,
    dec: DecoherenceParams,
    t_grid: &[f64],
    solver: MasterSolver,
    mut observe: impl FnMut(SubspaceDensityMatrix) -> Result<()>,
) -> Result<()> {
    if spec.a.dim() != h.dim() {
        return Err(Error::DimensionMismatch(spec.a.dim(), h.dim()));
    }
    if t_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("t_grid", "times must be finite, non-negative and sorted"));
    }
    let eq = MasterEquation::new(h, dec)?;
    let mut state = eq.initial_state(spec);
    let mut now = 0.0;
    let mut dopri = match solver {
        MasterSolver::DormandPrince { rtol } => Some(DormandPrince::new(rtol, rtol * 1e-3)),
        MasterSolver::Taylor => None,
    };
    let mut taylor = TaylorExponential::default();
    for &t in t_grid {
        if t > now {
            match dopri.as_mut() {
                Some(dp) => dp.advance(&eq, &mut state, now, t)?,
                None => taylor.advance(&eq, &mut state, now, t)?,
            }
            now = t;
        }
        observe(eq.snapshot(&state, t))?;
    }
    Ok(())
}

/// Collected trajectory; see [`integrate_master_equation_with`] for large
/// systems where keeping every snapshot is too costly.
pub fn integrate_master_equation(
    h: &EffectiveHamiltonian,
    spec: &TransferSpec,
    dec: DecoherenceParams,
    t_grid: &[f64],
    solver: MasterSolver,
) -> Result<Vec<SubspaceDensityMatrix>> {
    let mut out = Vec::with_capacity(t_grid.len());
    integrate_master_equation_with(h, spec, dec, t_grid, solver, |s| {
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}

/// `rho_00(t) = 1 - |beta|^2 e^{-t/T1}`.
pub fn closed_form_rho00(t: f64, beta: Complex64, t1: f64) -> f64 {
    1.0 - beta.norm_sqr() * (-t / t1).exp()
}

/// `rho_0b(t) = alpha conj(beta) e^{-t/T2} e^{i omega_0 t} i^d sin^d(zeta omega_0 t / 2)`.
pub fn closed_form_coherence(t: f64, dim: u32, zeta: f64, omega0: f64, alpha: Complex64, beta: Complex64, t2: f64) -> Complex64 {
    let i_pow = match dim % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let s = (0.5 * zeta * omega0 * t).sin().powi(dim as i32);
    alpha * beta.conj() * (-t / t2).exp() * Complex64::from_polar(1.0, omega0 * t) * i_pow * s
}

const EXACT_FACTORIAL_MAX_DIM: u32 = 15;

fn factorial(n: u32) -> u64 {
    (1..=u64::from(n)).product()
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// `a! / (b! c!)` times `2^e`, exact integers for small `d`, log-space above.
fn factorial_ratio(d: u32, a: u32, b: u32, c: u32, extra: &[u32], e: i32) -> f64 {
    if d <= EXACT_FACTORIAL_MAX_DIM {
        let den = factorial(b) * factorial(c) * extra.iter().map(|&k| factorial(k)).product::<u64>();
        factorial(a) as f64 / den as f64 * 2f64.powi(e)
    } else {
        let ln = ln_factorial(a) - ln_factorial(b) - ln_factorial(c) - extra.iter().map(|&k| ln_factorial(k)).sum::<f64>()
            + f64::from(e) * 2f64.ln();
        ln.exp()
    }
}

/// `lambda_pn = (2/T_phi) (1 - 2^{n-d-2p} (d-n+2p)! / (p! (d-n+p)!))`.
pub fn lambda_pn(p: u32, n: u32, dim: u32, t_phi: f64) -> Result<f64> {
    if n > dim || p > n / 2 {
        return Err(invalid("p, n", format!("need 0 <= n <= {dim} and 0 <= p <= n/2, got p={p}, n={n}")));
    }
    let e = n as i32 - dim as i32 - 2 * p as i32;
    let ratio = factorial_ratio(dim, dim - n + 2 * p, p, dim - n + p, &[], e);
    Ok(2.0 / t_phi * (1.0 - ratio))
}

/// `g_n(t) = sum_p d! (2 - delta_nd) 2^{n-2d-2p} / (p! (n-2p)! (d-n+p)!) e^{-lambda_pn t}`.
pub fn g_n(n: u32, t: f64, dim: u32, t_phi: f64) -> Result<f64> {
    if n > dim {
        return Err(invalid("n", format!("must not exceed {dim}")));
    }
    let weight = if n == dim { 1.0 } else { 2.0 };
    let mut sum = 0.0;
    for p in 0..=n / 2 {
        let e = n as i32 - 2 * dim as i32 - 2 * p as i32;
        let coeff = factorial_ratio(dim, dim, p, n - 2 * p, &[dim - n + p], e);
        let lambda = lambda_pn(p, n, dim, t_phi)?;
        sum += weight * coeff * (-lambda * t).exp();
    }
    Ok(sum)
}

/// `sum_n g_n(t)`.
pub fn g_sum(t: f64, dim: u32, t_phi: f64) -> Result<f64> {
    (0..=dim).map(|n| g_n(n, t, dim, t_phi)).sum()
}

/// `|beta|^2 e^{-t/T1} sum_n (-1)^{d-n} g_n(t) cos(zeta omega_0 t (d-n))`.
pub fn closed_form_rho_bb(t: f64, dim: u32, zeta: f64, omega0: f64, beta: Complex64, dec: DecoherenceParams) -> Result<f64> {
    let mut s = 0.0;
    for n in 0..=dim {
        let sign = if (dim - n) % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * g_n(n, t, dim, dec.t_phi)? * (zeta * omega0 * t * f64::from(dim - n)).cos();
    }
    Ok(beta.norm_sqr() * (-t / dec.t1).exp() * s)
}

fn transfer_time_of(zeta: f64, omega0: f64) -> Result<f64> {
    crate::dynamics::transfer_time(zeta, omega0)
}

/// Fidelity at `T = pi / (zeta omega_0)`:
/// `|alpha|^2 - |alpha|^2 |beta|^2 e^{-T/T1} + 2 |alpha|^2 |beta|^2 e^{-T/T2} + |beta|^4 e^{-T/T1} sum_n g_n(T)`.
pub fn transfer_fidelity_decoherent(spec: &TransferSpec, zeta: f64, omega0: f64, dec: DecoherenceParams) -> Result<f64> {
    let dim = spec.a.dim();
    let t = transfer_time_of(zeta, omega0)?;
    let pa = spec.alpha.norm_sqr();
    let pb = spec.beta.norm_sqr();
    let e1 = (-t / dec.t1).exp();
    let e2 = (-t / dec.t2()).exp();
    Ok(pa - pa * pb * e1 + 2.0 * pa * pb * e2 + pb * pb * e1 * g_sum(t, dim, dec.t_phi)?)
}

/// Bloch-sphere average of [`transfer_fidelity_decoherent`]:
/// `1/2 - e^{-T/T1}/6 + e^{-T/T2}/3 + e^{-T/T1} sum_n g_n(T) / 3`.
pub fn average_fidelity(dim: u32, zeta: f64, omega0: f64, dec: DecoherenceParams) -> Result<f64> {
    let t = transfer_time_of(zeta, omega0)?;
    let e1 = (-t / dec.t1).exp();
    let e2 = (-t / dec.t2()).exp();
    Ok(0.5 - e1 / 6.0 + e2 / 3.0 + e1 * g_sum(t, dim, dec.t_phi)? / 3.0)
}

/// Size-independent bound `1/2 - e^{-T/T1}/6 + e^{-T/T2}/3 + e^{-2T/T2}/3`.
pub fn fidelity_lower_bound(t: f64, t1: f64, t2: f64) -> Result<f64> {
    if !(t > 0.0) || !(t1 > 0.0) || !(t2 > 0.0) {
        return Err(invalid("t, t1, t2", "must be positive"));
    }
    Ok(0.5 - (-t / t1).exp() / 6.0 + (-t / t2).exp() / 3.0 + (-2.0 * t / t2).exp() / 3.0)
}

/// `T(d) = T(1) [1 + (d - 1) zeta]^{3/2}` when the coupling capacitors are
/// fixed and `zeta` is quoted for `d = 1`.
pub fn transfer_time_fixed_capacitor(dim: u32, zeta: f64, t_at_d1: f64) -> Result<f64> {
    if dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    if !(zeta >= 0.0) || !(t_at_d1 > 0.0) {
        return Err(invalid("zeta, t_at_d1", "zeta must be non-negative and T(1) positive"));
    }
    Ok(t_at_d1 * (1.0 + f64::from(dim - 1) * zeta).powf(1.5))
}

/// Uniform grid of `points` times on `[0, t_end]`.
pub fn time_grid(t_end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|k| t_end * k as f64 / (points - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::transfer_time;
    use crate::topology::NodeLabel;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const W0: f64 = 2.0 * PI * 5e9;
    const NS: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_relations() {
        let p = DecoherenceParams::from_t1_t2(120.0 * NS, 80.0 * NS).unwrap();
        assert_relative_eq!(p.t_phi(), 120.0 * NS, max_relative = 1e-12);
        let p = DecoherenceParams::new(120.0 * NS, 120.0 * NS).unwrap();
        assert_relative_eq!(p.t2(), 80.0 * NS, max_relative = 1e-12);
        assert!(p.t2() <= 2.0 * p.t1() && p.t2() <= p.t_phi());
        assert!(DecoherenceParams::from_t1_t2(10.0 * NS, 30.0 * NS).is_err());
        assert!(DecoherenceParams::new(0.0, 1.0).is_err());
        assert_eq!(DecoherenceParams::from_t1_t2(1.0, 2.0).unwrap().t_phi(), f64::INFINITY);
    }

    #[test]
    fn rho00_examples() {
        assert_relative_eq!(closed_form_rho00(0.0, c(0.6, 0.0), 1.0), 0.64, epsilon = 1e-15);
        assert_relative_eq!(closed_form_rho00(1e6, c(1.0, 0.0), 1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(closed_form_rho00(1.0, c(1.0, 0.0), 1.0), 0.632_120_558_828_557_7, epsilon = 1e-15);
    }

    #[test]
    fn coherence_examples() {
        let t = transfer_time(0.005, W0).unwrap();
        assert_eq!(closed_form_coherence(t, 3, 0.005, W0, c(0.0, 0.0), c(1.0, 0.0), 80.0 * NS).norm(), 0.0);
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let z = closed_form_coherence(t, 3, 0.005, W0, a, b, 80.0 * NS);
        assert_relative_eq!(z.norm(), 0.48 * (-t / (80.0 * NS)).exp(), max_relative = 1e-12);
    }

    #[test]
    fn lambda_examples() {
        let tp = 3.0;
        for d in 1..=6 {
            assert_relative_eq!(lambda_pn(0, 0, d, tp).unwrap(), 2.0 / tp * (1.0 - 0.5f64.powi(d as i32)), epsilon = 1e-15);
        }
        assert_relative_eq!(lambda_pn(1, 2, 2, tp).unwrap(), 1.0 / tp, epsilon = 1e-15);
        assert!(lambda_pn(2, 3, 4, tp).is_err());
        assert!(lambda_pn(0, 5, 4, tp).is_err());
    }

    #[test]
    fn g_normalization_d1() {
        let s = g_n(0, 0.0, 1, 1.0).unwrap() + g_n(1, 0.0, 1, 1.0).unwrap();
        assert_relative_eq!(s, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn g_coherent_limit_identity() {
        for d in [1, 2, 5, 10, 16, 20] {
            for k in 0..40 {
                let x = 0.17 * k as f64;
                let mut s = 0.0;
                for n in 0..=d {
                    let sign = if (d - n) % 2 == 0 { 1.0 } else { -1.0 };
                    s += sign * g_n(n, 0.0, d, f64::INFINITY).unwrap() * (x * f64::from(d - n)).cos();
                }
                assert!((s - (0.5 * x).sin().powi(2 * d as i32)).abs() < 1e-12, "d={d} x={x}");
            }
        }
    }

    #[test]
    fn log_space_matches_exact_at_the_boundary() {
        let d = EXACT_FACTORIAL_MAX_DIM;
        let exact = factorial_ratio(d, 12, 3, 4, &[2], -7);
        let logged = factorial_ratio(d + 1, 12, 3, 4, &[2], -7);
        assert_relative_eq!(exact, logged, max_relative = 1e-13);
    }

    #[test]
    fn rho_bb_limits() {
        let dec = DecoherenceParams::coherent();
        assert_eq!(closed_form_rho_bb(0.0, 3, 0.005, W0, c(1.0, 0.0), dec).unwrap().abs() < 1e-15, true);
        for k in 1..10 {
            let t = 4.1 * NS * k as f64;
            let want = 0.25 * (0.5 * 0.005 * W0 * t).sin().powi(6);
            assert_relative_eq!(closed_form_rho_bb(t, 3, 0.005, W0, c(0.0, 0.5), dec).unwrap(), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        let dec = DecoherenceParams::new(120.0 * NS, 120.0 * NS).unwrap();
        let o = NodeLabel::origin(2).unwrap();
        let b = NodeLabel::antipode(2).unwrap();
        let ground = TransferSpec::new(o, b, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(transfer_fidelity_decoherent(&ground, 0.005, W0, dec).unwrap(), 1.0, epsilon = 1e-15);

        let mixed = TransferSpec::new(o, b, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let coherent = transfer_fidelity_decoherent(&mixed, 0.005, W0, DecoherenceParams::coherent()).unwrap();
        assert_relative_eq!(coherent, 1.0, epsilon = 1e-12);

        let one = TransferSpec::excitation(o, b).unwrap();
        let t = transfer_time(0.005, W0).unwrap();
        assert_relative_eq!(
            transfer_fidelity_decoherent(&one, 0.005, W0, dec).unwrap(),
            closed_form_rho_bb(t, 2, 0.005, W0, c(1.0, 0.0), dec).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn average_and_bound_examples() {
        assert_relative_eq!(average_fidelity(4, 0.005, W0, DecoherenceParams::coherent()).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(fidelity_lower_bound(20.0 * NS, f64::INFINITY, f64::INFINITY).unwrap(), 1.0, epsilon = 1e-15);
        let bound = fidelity_lower_bound(20.0 * NS, 120.0 * NS, 80.0 * NS).unwrap();
        assert!((bound - 0.8207).abs() < 1e-4, "{bound}");
        let dec = DecoherenceParams::from_t1_t2(120.0 * NS, 80.0 * NS).unwrap();
        for d in 1..=10 {
            let f = average_fidelity(d, 0.005, W0, dec).unwrap();
            assert!(f >= bound - 1e-12 && f >= 0.8);
        }
    }

    #[test]
    fn fixed_capacitor_time() {
        assert_eq!(transfer_time_fixed_capacitor(1, 0.3, 5.0).unwrap(), 5.0);
        assert_eq!(transfer_time_fixed_capacitor(9, 0.0, 5.0).unwrap(), 5.0);
        let r = transfer_time_fixed_capacitor(20, 0.005, 1.0).unwrap();
        assert_relative_eq!(r, 1.095f64.powf(1.5), max_relative = 1e-12);
        assert!((r - 1.146).abs() < 1e-3);
    }

    #[test]
    fn pure_decay_without_coupling() {
        let h = EffectiveHamiltonian::uniform(2, W0, 0.0, 1).unwrap();
        let spec = TransferSpec::excitation(NodeLabel::origin(2).unwrap(), NodeLabel::antipode(2).unwrap()).unwrap();
        let dec = DecoherenceParams::new(50.0 * NS, 70.0 * NS).unwrap();
        let grid = time_grid(60.0 * NS, 7);
        for solver in [MasterSolver::Taylor, MasterSolver::DormandPrince { rtol: 1e-10 }] {
            for s in integrate_master_equation(&h, &spec, dec, &grid, solver).unwrap() {
                assert_relative_eq!(s.population(0), (-s.time / (50.0 * NS)).exp(), epsilon = 1e-10);
                for x in 1..4 {
                    assert!(s.excited.row(x).iter().all(|z| z.norm() < 1e-15));
                }
            }
        }
    }

    #[test]
    fn coherent_limit_matches_pure_dynamics() {
        let h = EffectiveHamiltonian::uniform(3, W0, 0.005, 1).unwrap();
        let o = NodeLabel::origin(3).unwrap();
        let b = NodeLabel::antipode(3).unwrap();
        let spec = TransferSpec::new(o, b, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let grid = time_grid(40.0 * NS, 9);
        let traj = integrate_master_equation(&h, &spec, DecoherenceParams::coherent(), &grid, MasterSolver::default()).unwrap();
        for s in traj {
            let want = 0.64 * (0.5 * 0.005 * W0 * s.time).sin().powi(6);
            assert_relative_eq!(s.population(7), want, epsilon = 1e-10);
        }
    }

    #[test]
    fn solvers_agree_and_preserve_structure() {
        let h = EffectiveHamiltonian::uniform(2, W0, 0.005, 3).unwrap();
        let o = NodeLabel::origin(2).unwrap();
        let spec = TransferSpec::new(o, NodeLabel::antipode(2).unwrap(), c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let dec = DecoherenceParams::new(120.0 * NS, 120.0 * NS).unwrap();
        let grid = time_grid(40.0 * NS, 11);
        let a = integrate_master_equation(&h, &spec, dec, &grid, MasterSolver::Taylor).unwrap();
        let b = integrate_master_equation(&h, &spec, dec, &grid, MasterSolver::DormandPrince { rtol: 1e-10 }).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.to_dense() - y.to_dense()).iter().all(|z| z.norm() < 1e-8));
            assert!(x.trace_error() < 1e-12);
            assert!(x.hermiticity_error() < 1e-12);
            assert!(x.is_positive_semidefinite(1e-9));
            assert_relative_eq!(x.rho00, closed_form_rho00(x.time, spec.beta, dec.t1()), epsilon = 1e-12);
        }
    }
}
