//! Special functions and quadrature.

pub mod appendix;
pub mod gamma;
pub mod hypergeom;
pub mod jacobi;
pub mod quadrature;
pub mod series;

pub use gamma::{beta, binomial, gamma_ratio, ln_factorial, ln_gamma_signed, pochhammer};
pub use hypergeom::{hyp2f1_terminating, hyp3f2_terminating};
pub use jacobi::{jacobi_all, jacobi_deriv, jacobi_negative_upper, jacobi_poly, JacobiSeq};
pub use quadrature::{gauss_jacobi, RadialQuadrature};
pub use series::{
    abel_sum, compensated_sum, levin, AbelOptions, AbelSum, LevinKind, NeumaierSum, SeriesEstimate,
};
