use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Cached eigendecomposition `H = V diag(E) V^T` of a real symmetric
/// matrix, for evaluating `exp(-iHt)` at many times.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralPropagator {
    pub fn new(h: DMatrix<f64>) -> Self {
        let n = h.nrows();
        let m = Mat::<f64>::from_fn(n, n, |i, j| h[(i, j)]);
        let eig = m.selfadjoint_eigendecomposition(Side::Lower);
        let s = eig.s().column_vector();
        let u = eig.u();
        Self {
            eigenvalues: DVector::from_fn(n, |k, _| s.read(k)),
            eigenvectors: DMatrix::from_fn(n, n, |i, k| u.read(i, k)),
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Column `source` of `exp(-iHt)`.
    pub fn column(&self, source: usize, t: f64) -> Vec<Complex64> {
        let v = &self.eigenvectors;
        let n = self.dim();
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, -self.eigenvalues[k] * t) * v[(source, k)])
            .collect();
        (0..n)
            .map(|x| (0..n).map(|k| coeffs[k] * v[(x, k)]).sum())
            .collect()
    }

    /// Single matrix element `exp(-iHt)[target, source]`.
    pub fn element(&self, target: usize, source: usize, t: f64) -> Complex64 {
        let v = &self.eigenvectors;
        (0..self.dim())
            .map(|k| Complex64::from_polar(v[(target, k)] * v[(source, k)], -self.eigenvalues[k] * t))
            .sum()
    }

    /// `exp(-iHt) psi` for an arbitrary complex vector.
    pub fn apply(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        let v = &self.eigenvectors;
        let n = self.dim();
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                let proj: Complex64 = (0..n).map(|x| psi[x] * v[(x, k)]).sum();
                proj * Complex64::from_polar(1.0, -self.eigenvalues[k] * t)
            })
            .collect();
        (0..n)
            .map(|x| (0..n).map(|k| coeffs[k] * v[(x, k)]).sum())
            .collect()
    }
}
