//! Numerical building blocks: sparse storage, spectral and Chebyshev
//! propagators, and linear ODE integrators.

pub mod chebyshev;
pub mod ode;
pub mod sparse;
pub mod spectral;

pub use chebyshev::ChebyshevPropagator;
pub use ode::{DormandPrince, LinearGenerator, TaylorExponential};
pub use sparse::CsrMatrix;
pub use spectral::SpectralPropagator;
