//! Special functions: Gamma and the Mittag-Leffler family.

pub mod extended;
pub mod gamma;
pub mod mittag_leffler;

pub use gamma::{gamma, ln_gamma, recip_gamma};
pub use mittag_leffler::{
    crossover_radius, duhamel_kernel_value, ml_asymptotic, ml_eval, ml_series, ml_series_extended,
    MLOrder, MLValue, MlMethod, PhaseConvention, RayEvaluator,
};
