//! Equation parameters and the regularities derived from them.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::special::mittag_leffler::PhaseConvention;

/// Parameter bundle for `i^β ∂_t^β u = (-Δ)^{α/2} u + μ|u|^{p-1}u`.
///
/// Derived quantities:
/// * `σ = α/β`, the effective dispersion exponent of the oscillatory phase
///   `e^{-it|ξ|^σ}`;
/// * `γ = (σ-1)/2` and `γ̃ = α - (σ+1)/2`, the derivative gains of the
///   local-smoothing estimates for the homogeneous and inhomogeneous parts;
/// * `s_c = 1/2 - α/(p-1)`, the scaling-critical regularity;
/// * `s_g = 1/2 - α/4`, the Galilean-invariant regularity.
///
/// `smoothing_ok` records whether `α > (σ+1)/2`, i.e. whether the smoothing
/// gain can absorb the `σ-α` derivative loss of the memory kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    /// Order of the fractional Laplacian, α > 0.
    pub alpha: f64,
    /// Order of the time derivative, β ∈ (0, 1].
    pub beta: f64,
    /// Odd nonlinearity degree p ≥ 3.
    pub p: u32,
    /// Sign of the nonlinearity, ±1.
    pub mu: f64,
}

impl FracParams {
    pub fn new(alpha: f64, beta: f64, p: u32, mu: f64) -> Result<Self, ParamError> {
        if !(alpha > 0.0) {
            return Err(ParamError::Invalid(format!("alpha = {alpha} must be positive")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(ParamError::Invalid(format!("beta = {beta} must lie in (0, 1]")));
        }
        if p < 3 || p % 2 == 0 {
            return Err(ParamError::Invalid(format!("p = {p} must be an odd integer >= 3")));
        }
        if mu != 1.0 && mu != -1.0 {
            return Err(ParamError::Invalid(format!("mu = {mu} must be +1 or -1")));
        }
        let params = FracParams { alpha, beta, p, mu };
        params.validate()?;
        Ok(params)
    }

    /// Re-run the constructor checks (useful after deserialisation).
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.alpha > 0.0)
            || !(self.beta > 0.0 && self.beta <= 1.0)
            || self.p < 3
            || self.p % 2 == 0
            || (self.mu != 1.0 && self.mu != -1.0)
        {
            return Err(ParamError::Invalid(format!(
                "alpha = {}, beta = {}, p = {}, mu = {}",
                self.alpha, self.beta, self.p, self.mu
            )));
        }
        Ok(())
    }

    /// Branch convention for the powers of i attached to β.
    pub fn phase(&self) -> PhaseConvention {
        PhaseConvention::new(self.beta)
    }

    /// Parameters of the worked cubic case: α = 7/4, β = 7/8, p = 3.
    pub fn cubic_reference(mu: f64) -> Self {
        FracParams::new(1.75, 0.875, 3, mu).expect("reference parameters are valid")
    }

    /// σ = α/β.
    pub fn sigma(&self) -> f64 {
        self.alpha / self.beta
    }

    /// γ = (σ-1)/2, the homogeneous smoothing gain.
    pub fn gamma(&self) -> f64 {
        (self.sigma() - 1.0) / 2.0
    }

    /// γ̃ = α - (σ+1)/2, the inhomogeneous smoothing gain.
    pub fn gamma_tilde(&self) -> f64 {
        self.alpha - (self.sigma() + 1.0) / 2.0
    }

    /// Scaling-critical regularity s_c = 1/2 - α/(p-1).
    pub fn s_critical(&self) -> f64 {
        0.5 - self.alpha / (self.p as f64 - 1.0)
    }

    /// Galilean regularity s_g = 1/2 - α/4.
    pub fn s_galilean(&self) -> f64 {
        0.5 - self.alpha / 4.0
    }

    /// Whether the smoothing gain beats the kernel's derivative loss,
    /// i.e. α > (σ+1)/2 (equivalently γ̃ > 0).
    pub fn smoothing_ok(&self) -> bool {
        self.alpha > (self.sigma() + 1.0) / 2.0
    }

    /// Exponent of the scaling symmetry on the data side:
    /// `u_λ(t,x) = λ^{αβ/(p-1)} u(λ^α t, λ^β x)`.
    pub fn scaling_amplitude_exponent(&self) -> f64 {
        self.alpha * self.beta / (self.p as f64 - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parameters() {
        let p = FracParams::cubic_reference(1.0);
        assert_eq!(p.sigma(), 2.0);
        assert_eq!(p.gamma(), 0.5);
        assert_eq!(p.gamma_tilde(), 0.25);
        assert_eq!(p.s_critical(), -0.375);
        assert_eq!(p.s_galilean(), 0.0625);
        assert!(p.smoothing_ok());
        assert!((p.sigma() * p.beta - p.alpha).abs() <= 1e-15 * p.alpha);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FracParams::new(0.0, 0.5, 3, 1.0).is_err());
        assert!(FracParams::new(1.0, 1.5, 3, 1.0).is_err());
        assert!(FracParams::new(1.0, 0.5, 4, 1.0).is_err());
        assert!(FracParams::new(1.0, 0.5, 3, 0.5).is_err());
    }

    #[test]
    fn phase_convention_unit_modulus() {
        let p = FracParams::cubic_reference(1.0);
        let f = p.phase().i_pow_beta();
        let b = p.phase().i_pow_neg_beta();
        assert!((f.norm() - 1.0).abs() < 1e-15);
        assert!((f * b - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn smoothing_flag_tracks_condition() {
        // α = 1.2, β = 0.9: σ = 4/3, (σ+1)/2 = 7/6 < 1.2 → ok
        let p = FracParams::new(1.2, 0.9, 3, -1.0).unwrap();
        assert!(p.smoothing_ok());
        // α = 1.0, β = 0.6: σ = 5/3, (σ+1)/2 = 4/3 > 1 → not ok
        let p = FracParams::new(1.0, 0.6, 3, 1.0).unwrap();
        assert!(!p.smoothing_ok());
    }
}
