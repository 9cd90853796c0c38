//! Weight-defined quantizers and the quantization map f ↦ A_f.

pub mod grid;
pub mod operator;
pub mod quantize;
pub mod weight;

pub use grid::{boundary_exponent, DiskGrid, GridSpec};
pub use operator::{
    m_diagonal, m_power_closed, m_power_reflected, profile_terms, Profile, QuantizerOperator,
    SeriesMode,
};
pub use quantize::{
    c_w_constant, covariance_dim, gamma_by_quadrature, gamma_constant,
    generator_quantization_deviation, hyper_consistency, ikn1_closed, ikn2_closed,
    isotropic_integral, parity_integral_check, quantize, quantize_isotropic,
    quantize_with_estimate, quantized_partner, resolution_identity_deviation, s_series, Field,
    Quantization, RadialFn,
};
pub use weight::{WeightKind, WeightSpec};
