//! Integrators for autonomous linear systems `dx/dt = L x` over complex
//! vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A time-independent linear generator `L`.
pub trait LinearGenerator {
    fn dim(&self) -> usize;

    /// `out = L x`.
    fn apply(&self, x: &[Complex64], out: &mut [Complex64]);

    /// Upper bound on an operator norm of `L` (used to size exponential
    /// substeps).
    fn norm_bound(&self) -> f64;
}

fn axpy_into(out: &mut [Complex64], x: &[Complex64], terms: &[(f64, &[Complex64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut v = x[i];
        for &(c, k) in terms {
            v += k[i] * c;
        }
        *o = v;
    }
}

/// Classic fixed-step fourth-order Runge-Kutta from `t = 0` to `t`.
pub fn rk4_fixed<G: LinearGenerator + ?Sized>(gen: &G, x0: &[Complex64], t: f64, steps: usize) -> Vec<Complex64> {
    let n = gen.dim();
    let h = t / steps as f64;
    let mut x = x0.to_vec();
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    for _ in 0..steps {
        gen.apply(&x, &mut k1);
        axpy_into(&mut tmp, &x, &[(0.5 * h, &k1)]);
        gen.apply(&tmp, &mut k2);
        axpy_into(&mut tmp, &x, &[(0.5 * h, &k2)]);
        gen.apply(&tmp, &mut k3);
        axpy_into(&mut tmp, &x, &[(h, &k3)]);
        gen.apply(&tmp, &mut k4);
        for i in 0..n {
            x[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    x
}

/// Adaptive Dormand-Prince 5(4) integrator with per-step error control.
#[derive(Clone, Debug)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Step size carried between successive `advance` calls.
    h: Option<f64>,
    /// Accepted steps so far.
    pub steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self::new(1e-10, 1e-13)
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the fifth- and embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl DormandPrince {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, max_steps: 10_000_000, h: None, steps: 0 }
    }

    /// Advances `x` from `t0` to `t1`.
    pub fn advance<G: LinearGenerator + ?Sized>(&mut self, gen: &G, x: &mut [Complex64], t0: f64, t1: f64) -> Result<()> {
        let n = gen.dim();
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![zero; n]).collect();
        let mut tmp = vec![zero; n];
        let mut xnew = vec![zero; n];
        let mut h = self.h.unwrap_or_else(|| {
            let b = gen.norm_bound();
            if b > 0.0 {
                (0.01 / b).min(span)
            } else {
                span
            }
        });
        let mut t = t0;
        let mut fresh_k1 = false;
        let mut taken = 0usize;
        while t < t1 {
            if taken > self.max_steps {
                return Err(Error::StepSizeFailure { time: t });
            }
            let last = t + h >= t1;
            let hs = if last { t1 - t } else { h };
            if !fresh_k1 {
                gen.apply(x, &mut k[0]);
            }
            let (k1, rest) = k.split_at_mut(1);
            let (k2, rest) = rest.split_at_mut(1);
            let (k3, rest) = rest.split_at_mut(1);
            let (k4, rest) = rest.split_at_mut(1);
            let (k5, rest) = rest.split_at_mut(1);
            let (k6, k7) = rest.split_at_mut(1);
            let (k1, k2, k3, k4, k5, k6, k7) =
                (&mut k1[0], &mut k2[0], &mut k3[0], &mut k4[0], &mut k5[0], &mut k6[0], &mut k7[0]);
            axpy_into(&mut tmp, x, &[(hs * A21, k1)]);
            gen.apply(&tmp, k2);
            axpy_into(&mut tmp, x, &[(hs * A31, k1), (hs * A32, k2)]);
            gen.apply(&tmp, k3);
            axpy_into(&mut tmp, x, &[(hs * A41, k1), (hs * A42, k2), (hs * A43, k3)]);
            gen.apply(&tmp, k4);
            axpy_into(&mut tmp, x, &[(hs * A51, k1), (hs * A52, k2), (hs * A53, k3), (hs * A54, k4)]);
            gen.apply(&tmp, k5);
            axpy_into(
                &mut tmp,
                x,
                &[(hs * A61, k1), (hs * A62, k2), (hs * A63, k3), (hs * A64, k4), (hs * A65, k5)],
            );
            gen.apply(&tmp, k6);
            axpy_into(&mut xnew, x, &[(hs * B1, k1), (hs * B3, k3), (hs * B4, k4), (hs * B5, k5), (hs * B6, k6)]);
            gen.apply(&xnew, k7);

            let mut err_sq = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
                let scale = self.atol + self.rtol * x[i].norm().max(xnew[i].norm());
                err_sq += (e.norm() / scale).powi(2);
            }
            let err = (err_sq / n.max(1) as f64).sqrt();
            if err <= 1.0 {
                t = if last { t1 } else { t + hs };
                x.copy_from_slice(&xnew);
                std::mem::swap(k1, k7);
                fresh_k1 = true;
                self.steps += 1;
                taken += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || hs >= h {
                    h = hs * fac;
                }
            } else {
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = hs * fac;
                fresh_k1 = true;
                if h < 1e-14 * t.abs().max(span) {
                    return Err(Error::StepSizeFailure { time: t });
                }
            }
        }
        self.h = Some(h);
        Ok(())
    }
}

/// Exponential integrator for autonomous linear systems: each substep
/// applies the Taylor series of `exp(hL)` until the terms drop below `tol`
/// relative to the accumulated result.
#[derive(Clone, Debug)]
pub struct TaylorExponential {
    pub tol: f64,
    /// Target `h * ||L||` per substep.
    pub theta: f64,
    pub max_terms: usize,
    /// Generator applications so far.
    pub applications: usize,
}

impl Default for TaylorExponential {
    fn default() -> Self {
        Self { tol: 1e-15, theta: 3.0, max_terms: 80, applications: 0 }
    }
}

impl TaylorExponential {
    pub fn advance<G: LinearGenerator + ?Sized>(&mut self, gen: &G, x: &mut [Complex64], t0: f64, t1: f64) -> Result<()> {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        let n = gen.dim();
        let bound = gen.norm_bound();
        let substeps = ((span * bound / self.theta).ceil() as usize).max(1);
        let h = span / substeps as f64;
        let zero = Complex64::new(0.0, 0.0);
        let mut term = vec![zero; n];
        let mut next = vec![zero; n];
        for s in 0..substeps {
            term.copy_from_slice(x);
            let mut small = 0;
            let mut converged = false;
            for j in 1..=self.max_terms {
                gen.apply(&term, &mut next);
                self.applications += 1;
                let c = h / j as f64;
                let mut tmax: f64 = 0.0;
                let mut xmax: f64 = 0.0;
                for i in 0..n {
                    let v = next[i] * c;
                    term[i] = v;
                    x[i] += v;
                    tmax = tmax.max(v.norm());
                    xmax = xmax.max(x[i].norm());
                }
                if tmax <= self.tol * xmax.max(f64::MIN_POSITIVE) {
                    small += 1;
                    if small == 2 {
                        converged = true;
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            if !converged {
                return Err(Error::StepSizeFailure { time: t0 + s as f64 * h });
            }
        }
        Ok(())
    }
}
