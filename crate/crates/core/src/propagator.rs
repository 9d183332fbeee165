//! Linear evolution and its low/high frequency operator decomposition.
//!
//! The linear flow is the Fourier multiplier `E_β(i^{-β} t^β |ξ|^α)`. For
//! large `t|ξ|^σ` (σ = α/β) it behaves like `(1/β) e^{-it|ξ|^σ}` plus an
//! algebraically decaying tail; for small `t|ξ|^σ` the series is benign.
//! A smooth cutoff χ equal to 1 on `{t|ξ|^σ ≤ M}` and 0 on `{t|ξ|^σ ≥ 2M}`
//! splits every operator into those two regimes:
//!
//! * `S_t`: oscillatory phase on the low set,
//! * `T_t`: the `t^{-β}|ξ|^{-α}` algebraic envelope on the high set,
//! * `U_t`: the full multiplier on the low set,
//!
//! and tilde variants with the extra `|ξ|^{σ-α}` / kernel factors that enter
//! the inhomogeneous part. The remainder of the decomposition — the full
//! multiplier minus its oscillatory principal part on the high set — decays
//! like `(t^β|ξ|^α)^{-1}`, which `remainder_decomposition` verifies mode by
//! mode.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::field::SpectralField;
use crate::params::FracParams;
use crate::special::mittag_leffler::{ml_eval, MLOrder};

/// Smooth cutoff with scale `M`: equals 1 where `t|ξ|^σ ≤ M`, vanishes where
/// `t|ξ|^σ ≥ 2M`, and transitions over one octave of `t|ξ|^σ` through the
/// classical `exp(-1/x)` mollifier in the variable `log₂(t|ξ|^σ / M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffChi {
    pub m: f64,
}

impl CutoffChi {
    pub fn new(m: f64) -> Self {
        assert!(m > 0.0, "cutoff scale must be positive");
        CutoffChi { m }
    }

    /// Default scale: M = 10 puts the high set comfortably inside the
    /// asymptotic regime of the multiplier.
    pub fn default_scale() -> Self {
        CutoffChi { m: 10.0 }
    }

    fn bump(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-1.0 / x).exp()
        }
    }

    /// χ(t, ξ) as a function of u = t|ξ|^σ.
    pub fn chi_of_u(&self, u: f64) -> f64 {
        if u <= self.m {
            return 1.0;
        }
        if u >= 2.0 * self.m {
            return 0.0;
        }
        let s = (u / self.m).log2();
        let up = Self::bump(1.0 - s);
        let down = Self::bump(s);
        up / (up + down)
    }

    pub fn chi(&self, t: f64, xi: f64, sigma: f64) -> f64 {
        self.chi_of_u(t * xi.abs().powf(sigma))
    }
}

/// Multiplier tags of the operator family.
///
/// `Osc` is the pure oscillatory flow `e^{-it|∇|^σ}`; `OscNl` its
/// `|∇|^{σ-α}`-weighted variant from the kernel's principal part; `Full` and
/// `FullKernel` are the exact Mittag-Leffler multipliers of the homogeneous
/// and inhomogeneous parts. The remaining tags carry the smooth cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Osc,
    S,
    T,
    U,
    OscNl,
    STilde,
    TTilde,
    UTilde,
    Full,
    FullKernel,
}

impl OperatorKind {
    /// Whether the symbol contains a negative power of `t`.
    pub fn needs_positive_time(self) -> bool {
        matches!(
            self,
            OperatorKind::T | OperatorKind::TTilde | OperatorKind::UTilde | OperatorKind::FullKernel
        )
    }
}

/// The exact symbol of `kind` at time `t` and frequency `xi`.
pub fn operator_symbol(
    kind: OperatorKind,
    t: f64,
    xi: f64,
    params: &FracParams,
    chi: &CutoffChi,
) -> Complex64 {
    let sigma = params.sigma();
    let alpha = params.alpha;
    let beta = params.beta;
    let abs_xi = xi.abs();
    let u = t * abs_xi.powf(sigma);
    let oscillation = Complex64::from_polar(1.0, -u);
    let lo = chi.chi_of_u(u);
    let hi = 1.0 - lo;
    let ml_arg = || params.phase().i_pow_neg_beta() * t.powf(beta) * abs_xi.powf(alpha);
    match kind {
        OperatorKind::Osc => oscillation,
        OperatorKind::S => oscillation * lo,
        OperatorKind::T => {
            if hi == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(t.powf(-beta) * abs_xi.powf(-alpha) * hi, 0.0)
            }
        }
        OperatorKind::U => {
            if lo == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                ml_eval(MLOrder::one_param(beta), ml_arg()).value * lo
            }
        }
        OperatorKind::OscNl => oscillation * abs_xi.powf(sigma - alpha),
        OperatorKind::STilde => oscillation * abs_xi.powf(sigma - alpha) * lo,
        OperatorKind::TTilde => {
            if hi == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(t.powf(-1.0 - beta) * abs_xi.powf(-2.0 * alpha) * hi, 0.0)
            }
        }
        OperatorKind::UTilde => {
            if lo == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                ml_eval(MLOrder::kernel(beta), ml_arg()).value * t.powf(beta - 1.0) * lo
            }
        }
        OperatorKind::Full => ml_eval(MLOrder::one_param(beta), ml_arg()).value,
        OperatorKind::FullKernel => {
            ml_eval(MLOrder::kernel(beta), ml_arg()).value * t.powf(beta - 1.0)
        }
    }
}

/// Apply one operator of the family to a field.
pub fn apply_operator(
    kind: OperatorKind,
    f: &mut SpectralField,
    t: f64,
    params: &FracParams,
    chi: &CutoffChi,
) -> Result<SpectralField, FieldError> {
    if t < 0.0 || (t == 0.0 && kind.needs_positive_time()) {
        return Err(FieldError::InvalidGrid(format!(
            "operator {kind:?} requires t > 0, got t = {t}"
        )));
    }
    if t == 0.0 {
        // All remaining symbols are either 1 (Osc, S, U, Full on the low
        // plateau) or the plain |ξ|-weights; evaluate directly.
        return Ok(f.apply_symbol(|xi| operator_symbol(kind, 0.0, xi, params, chi)));
    }
    Ok(f.apply_symbol(|xi| operator_symbol(kind, t, xi, params, chi)))
}

/// Evolve initial data under the linear flow: `û(t,ξ) = E_β(i^{-β}t^β|ξ|^α) f̂(ξ)`.
pub fn evolve_linear(f: &mut SpectralField, t: f64, params: &FracParams) -> SpectralField {
    evolve_linear_report(f, t, params).0
}

/// Same as [`evolve_linear`] but also reports the largest relative error
/// estimate among the per-mode multiplier evaluations.
pub fn evolve_linear_report(
    f: &mut SpectralField,
    t: f64,
    params: &FracParams,
) -> (SpectralField, f64) {
    assert!(t >= 0.0, "the flow runs forward from t = 0");
    if t == 0.0 {
        return (f.clone().to_spectral(), 0.0);
    }
    let order = MLOrder::one_param(params.beta);
    let phase = params.phase().i_pow_neg_beta();
    let tb = t.powf(params.beta);
    let alpha = params.alpha;
    let max_rel = std::cell::Cell::new(0.0f64);
    let out = f.apply_symbol(|xi| {
        let ml = ml_eval(order, phase * tb * xi.abs().powf(alpha));
        let rel = ml.err_estimate / ml.value.norm().max(f64::MIN_POSITIVE);
        if rel > max_rel.get() {
            max_rel.set(rel);
        }
        ml.value
    });
    (out, max_rel.get())
}

/// One mode's worth of remainder verification data.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RemainderSample {
    pub xi: f64,
    /// z = t^β |ξ|^α, the decay variable.
    pub z: f64,
    /// |R̂(ξ)| / |f̂(ξ)|.
    pub ratio: f64,
    /// ratio · z — flat in z when the remainder obeys the `z^{-1}` law.
    pub scaled: f64,
}

/// Report of [`remainder_decomposition`].
#[derive(Debug, Clone)]
pub struct RemainderReport {
    /// Samples on the support of 1-χ (cutoff fully off), skipping modes with
    /// negligible data.
    pub samples: Vec<RemainderSample>,
    /// Largest `ratio · z` over the samples.
    pub sup_scaled: f64,
}

/// Split the flow into its low-frequency part, the oscillatory principal
/// part, and the remainder
/// `R = Full - U - (1/β)(Osc - S) = (1-χ)[E_β(i^{-β}t^β|ξ|^α) - (1/β)e^{-it|ξ|^σ}]`,
/// returning `R f` together with per-mode decay data. The oscillatory
/// reference carries the 1/β mass factor of the multiplier's principal
/// asymptotic term; with it the remainder obeys `|R̂| ≲ (t^β|ξ|^α)^{-1}|f̂|`
/// with constant `1/Γ(1-β)` + O(z^{-1}).
pub fn remainder_decomposition(
    f: &mut SpectralField,
    t: f64,
    params: &FracParams,
    chi: &CutoffChi,
) -> (SpectralField, RemainderReport) {
    assert!(t > 0.0, "the remainder split needs t > 0");
    let beta = params.beta;
    let sigma = params.sigma();
    let order = MLOrder::one_param(beta);
    let phase = params.phase().i_pow_neg_beta();
    let tb = t.powf(beta);

    let grid = *f.grid();
    let spec = f.spectral().to_vec();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n];
    let mut samples = Vec::new();
    let mut sup_scaled = 0.0f64;
    let max_mag = spec.iter().map(|c| c.norm()).fold(0.0f64, f64::max);

    for (i, &c) in spec.iter().enumerate() {
        let xi = grid.freq(i);
        let u = t * xi.abs().powf(sigma);
        let lo = chi.chi_of_u(u);
        let hi = 1.0 - lo;
        if hi == 0.0 {
            continue; // χ = 1: the split cancels identically.
        }
        let full = ml_eval(order, phase * tb * xi.abs().powf(params.alpha)).value;
        let osc = Complex64::from_polar(1.0 / beta, -u);
        let r = (full - osc) * hi;
        out[i] = r * c;
        if lo == 0.0 && c.norm() > 1e-13 * max_mag {
            let z = tb * xi.abs().powf(params.alpha);
            let ratio = r.norm();
            let scaled = ratio * z;
            sup_scaled = sup_scaled.max(scaled);
            samples.push(RemainderSample { xi, z, ratio, scaled });
        }
    }

    (
        SpectralField::from_spectral(grid, out),
        RemainderReport { samples, sup_scaled },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::special::gamma::recip_gamma;

    fn band_field(grid: Grid, lo: f64, hi: f64) -> SpectralField {
        let spec = (0..grid.n)
            .map(|i| {
                let xi = grid.freq(i).abs();
                if xi >= lo && xi <= hi {
                    Complex64::new(1.0, 0.5)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        SpectralField::from_spectral(grid, spec)
    }

    #[test]
    fn cutoff_plateaus_and_smoothness() {
        let chi = CutoffChi::new(10.0);
        assert_eq!(chi.chi_of_u(0.0), 1.0);
        assert_eq!(chi.chi_of_u(10.0), 1.0);
        assert_eq!(chi.chi_of_u(20.0), 0.0);
        let mid = chi.chi_of_u(14.0);
        assert!(mid > 0.0 && mid < 1.0);
        // partition of unity by construction
        for &u in &[3.0, 11.0, 15.0, 19.0, 30.0] {
            let lo = chi.chi_of_u(u);
            assert!(lo >= 0.0 && lo <= 1.0);
        }
    }

    #[test]
    fn classical_reduction_unitary() {
        // β = 1, α = 2: multiplier is e^{-it|ξ|²} and mass is conserved.
        let params = FracParams::new(2.0, 1.0, 3, 1.0).unwrap();
        let grid = Grid::new(64, 16.0).unwrap();
        let mut f = band_field(grid, 0.5, 10.0);
        let n0 = f.l2_norm();
        for &t in &[0.3, 2.0, 10.0] {
            let mut u = evolve_linear(&mut f, t, &params);
            assert!((u.l2_norm() - n0).abs() < 1e-12 * n0);
            // per-mode phase
            let spec_in = f.spectral().to_vec();
            let spec_out = u.spectral();
            for (i, (a, b)) in spec_in.iter().zip(spec_out).enumerate() {
                let xi = grid.freq(i);
                let expect = a * Complex64::from_polar(1.0, -t * xi * xi);
                assert!((b - expect).norm() <= 1e-12 * (1.0 + a.norm()), "mode {i}");
            }
        }
    }

    #[test]
    fn time_zero_is_identity() {
        let params = FracParams::cubic_reference(1.0);
        let grid = Grid::new(32, 8.0).unwrap();
        let mut f = band_field(grid, 0.5, 6.0);
        let mut u = evolve_linear(&mut f, 0.0, &params);
        assert_eq!(u.spectral(), f.spectral());
    }

    #[test]
    fn mass_ratio_approaches_reciprocal_beta() {
        // band |ξ| ∈ [4,16], β = 7/8: ratio → 8/7 once t^β ξ_min^α ≥ 1e3
        let params = FracParams::cubic_reference(1.0);
        let grid = Grid::new(256, 8.0 * std::f64::consts::PI).unwrap();
        let mut f = band_field(grid, 4.0, 16.0);
        let n0 = f.l2_norm();
        let t_min = (1e3 / 4.0f64.powf(params.alpha)).powf(1.0 / params.beta);
        for &t in &[t_min, 2.5 * t_min, 6.0 * t_min] {
            let mut u = evolve_linear(&mut f, t, &params);
            let ratio = u.l2_norm() / n0;
            assert!(
                (ratio - 8.0 / 7.0).abs() < 0.02,
                "t = {t}: mass ratio {ratio}"
            );
        }
    }

    #[test]
    fn uniform_mass_bound_all_times() {
        let params = FracParams::cubic_reference(1.0);
        let grid = Grid::new(128, 8.0 * std::f64::consts::PI).unwrap();
        let mut f = band_field(grid, 2.0, 12.0);
        let n0 = f.l2_norm();
        let bound = 1.0 / params.beta + 0.2;
        let mut t = 1e-3;
        while t < 2e3 {
            let mut u = evolve_linear(&mut f, t, &params);
            let ratio = u.l2_norm() / n0;
            assert!(ratio <= bound, "t = {t}: ratio {ratio} exceeds {bound}");
            t *= 1.9;
        }
    }

    #[test]
    fn operator_single_mode_cases() {
        let params = FracParams::cubic_reference(1.0);
        let chi = CutoffChi::new(10.0);
        let grid = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let k = 4usize;
        let xi1 = grid.freq(k);
        let mut f = SpectralField::from_fn(grid, |x| Complex64::from_polar(1.0, xi1 * x));

        // Osc: pure phase -t|ξ|^σ
        let t = 0.37;
        let mut osc = apply_operator(OperatorKind::Osc, &mut f, t, &params, &chi).unwrap();
        let phase = osc.spectral()[k] / f.spectral()[k];
        let expect = Complex64::from_polar(1.0, -t * xi1.abs().powf(params.sigma()));
        assert!((phase - expect).norm() < 1e-12);

        // S and U carry full weight on the plateau t|ξ|^σ ≤ M
        let t_small = 10.0 / xi1.abs().powf(params.sigma()) * 0.5;
        let mut s = apply_operator(OperatorKind::S, &mut f, t_small, &params, &chi).unwrap();
        assert!((s.spectral()[k].norm() - grid.length).abs() < 1e-10);
        let mut u_op = apply_operator(OperatorKind::U, &mut f, t_small, &params, &chi).unwrap();
        let full = operator_symbol(OperatorKind::Full, t_small, xi1, &params, &chi);
        assert!((u_op.spectral()[k] / f.spectral()[k] - full).norm() < 1e-12);

        // T at t|ξ|^σ = 4M: coefficient exactly t^{-β}|ξ|^{-α}
        let t_big = 4.0 * 10.0 / xi1.abs().powf(params.sigma());
        let mut t_op = apply_operator(OperatorKind::T, &mut f, t_big, &params, &chi).unwrap();
        let coeff = t_op.spectral()[k] / f.spectral()[k];
        let expect = t_big.powf(-params.beta) * xi1.abs().powf(-params.alpha);
        assert!((coeff.re - expect).abs() < 1e-12 * expect && coeff.im.abs() < 1e-15);

        // T and TTilde refuse t = 0
        assert!(apply_operator(OperatorKind::T, &mut f, 0.0, &params, &chi).is_err());
        assert!(apply_operator(OperatorKind::TTilde, &mut f, 0.0, &params, &chi).is_err());
    }

    #[test]
    fn partition_low_plus_high_is_full() {
        let params = FracParams::cubic_reference(1.0);
        let chi = CutoffChi::new(10.0);
        let grid = Grid::new(128, 16.0).unwrap();
        let mut f = band_field(grid, 0.5, 20.0);
        let t = 0.8;
        let mut u_part = apply_operator(OperatorKind::U, &mut f, t, &params, &chi).unwrap();
        let mut full = apply_operator(OperatorKind::Full, &mut f, t, &params, &chi).unwrap();
        // Full restricted to the 1-χ support:
        let sigma = params.sigma();
        let mut high = full.apply_symbol(|xi| {
            Complex64::new(1.0 - chi.chi_of_u(t * xi.abs().powf(sigma)), 0.0)
        });
        let mut sum = u_part.linear_comb(Complex64::new(1.0, 0.0), &mut high, Complex64::new(1.0, 0.0));
        assert!(sum.rel_l2_distance(&mut full) < 1e-12);
    }

    #[test]
    fn remainder_vanishes_on_plateau_and_decays_above() {
        let params = FracParams::cubic_reference(1.0);
        let chi = CutoffChi::new(10.0);
        // modes spanning z = t^β|ξ|^α ∈ [~50, ~800] at t = 1
        let grid = Grid::new(2048, 16.0 * std::f64::consts::PI).unwrap();
        let mut f = band_field(grid, 9.0, 46.0);
        let (mut r, report) = remainder_decomposition(&mut f, 1.0, &params, &chi);

        // plateau modes: χ = 1 → R̂ = 0 identically
        let rs = r.spectral();
        for (i, c) in rs.iter().enumerate() {
            let xi = grid.freq(i);
            if xi.abs().powf(params.sigma()) <= chi.m {
                assert_eq!(c.norm(), 0.0, "mode {i} not cancelled");
            }
        }

        // decay law: ratio ≤ C/z with C close to 1/Γ(1-β)
        let c_theory = recip_gamma(1.0 - params.beta).abs();
        for s in &report.samples {
            if s.z >= 50.0 {
                assert!(
                    s.ratio <= 1.5 * c_theory / s.z,
                    "xi={} z={}: ratio {} vs C/z {}",
                    s.xi,
                    s.z,
                    s.ratio,
                    c_theory / s.z
                );
            }
        }

        // doubling z halves the ratio within a 1.3 factor
        let pick = |target: f64| {
            report
                .samples
                .iter()
                .min_by(|a, b| {
                    (a.z - target).abs().partial_cmp(&(b.z - target).abs()).unwrap()
                })
                .copied()
                .unwrap()
        };
        let s100 = pick(100.0);
        let s200 = pick(200.0);
        let halving = s100.ratio / s200.ratio * (s100.z / s200.z);
        assert!(
            halving > 1.0 / 1.3 && halving < 1.3,
            "halving factor {halving} (z {} -> {})",
            s100.z,
            s200.z
        );
    }
}
