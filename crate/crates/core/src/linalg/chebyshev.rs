//! Matrix-free `exp(-iHt) v` for real symmetric sparse `H` by Chebyshev
//! expansion with Bessel-function coefficients.

use num_complex::Complex64;

use super::sparse::CsrMatrix;

/// Bessel functions `J_0(x) ..= J_kmax(x)` for `x >= 0` by Miller's
/// backward recurrence, normalized with `J_0 + 2 sum J_2k = 1`.
pub fn bessel_j_sequence(x: f64, kmax: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and non-negative");
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = {
        let m = kmax.max(x.ceil() as usize) + 20 + (10.0 * x.cbrt()) as usize;
        m + (m % 2)
    };
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-280; // J_k
    let mut norm = 0.0;
    let mut raw = vec![0.0; kmax + 1];
    for k in (0..=start).rev() {
        if k <= kmax {
            raw[k] = cur;
        }
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            for r in raw.iter_mut() {
                *r *= s;
            }
        }
    }
    for (o, r) in out.iter_mut().zip(raw) {
        *o = r / norm;
    }
    out
}

/// Chebyshev propagator for a fixed real symmetric sparse Hamiltonian
/// (angular-frequency units).
#[derive(Clone, Debug)]
pub struct ChebyshevPropagator<'a> {
    h: &'a CsrMatrix,
    centre: f64,
    half_width: f64,
    tol: f64,
}

impl<'a> ChebyshevPropagator<'a> {
    pub fn new(h: &'a CsrMatrix) -> Self {
        let (lo, hi) = h.gershgorin_bounds();
        let pad = 1e-12 * (hi.abs().max(lo.abs())).max(1e-300);
        let (lo, hi) = (lo - pad, hi + pad);
        Self { h, centre: 0.5 * (hi + lo), half_width: 0.5 * (hi - lo), tol: 1e-16 }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// `exp(-i H t) v`.
    pub fn apply(&self, v: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = self.h.dim();
        assert_eq!(v.len(), n);
        let shift = Complex64::from_polar(1.0, -self.centre * t);
        let x = self.half_width * t.abs();
        if x == 0.0 {
            return v.iter().map(|&z| z * shift).collect();
        }
        let kmax = (x + 10.0 * x.cbrt() + 40.0) as usize;
        let bessel = bessel_j_sequence(x, kmax);
        let last = (0..=kmax)
            .rev()
            .find(|&k| bessel[k].abs() > self.tol)
            .unwrap_or(0)
            .max(x.ceil() as usize)
            .min(kmax);

        // Phase convention for negative t: exp(-iHt) = conj-phase series.
        let minus_i = if t >= 0.0 { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
        let inv_a = 1.0 / self.half_width;
        let c = self.centre;
        let apply_x = |src: &[Complex64], dst: &mut [Complex64]| {
            self.h.mul_complex_into(src, dst);
            for (d, s) in dst.iter_mut().zip(src) {
                *d = (*d - *s * c) * inv_a;
            }
        };

        let mut acc: Vec<Complex64> = v.iter().map(|&z| z * bessel[0]).collect();
        let mut prev = v.to_vec();
        let mut cur = vec![Complex64::new(0.0, 0.0); n];
        apply_x(&prev, &mut cur);
        let mut phase = minus_i;
        if last >= 1 {
            let coef = phase * (2.0 * bessel[1]);
            for (a, z) in acc.iter_mut().zip(&cur) {
                *a += z * coef;
            }
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        for &b in bessel.iter().take(last + 1).skip(2) {
            apply_x(&cur, &mut scratch);
            for ((s, p), _) in scratch.iter_mut().zip(&prev).zip(0..n) {
                *s = 2.0 * *s - *p;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut scratch);
            phase *= minus_i;
            let coef = phase * (2.0 * b);
            for (a, z) in acc.iter_mut().zip(&cur) {
                *a += z * coef;
            }
        }
        for a in acc.iter_mut() {
            *a *= shift;
        }
        acc
    }
}
