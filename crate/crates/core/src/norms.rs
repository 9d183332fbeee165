//! Mixed space-time norms and randomized ratio tests of the estimate family.
//!
//! The well-posedness argument controls three quantities of a trajectory:
//!
//! ```text
//! η₁ = ‖⟨∇⟩^δ v‖_{L^∞_x L²_T},   η₂ = ‖⟨∇⟩^s v‖_{L^∞_T L²_x},
//! η₃ = ‖v‖_{L^{2(p-1)}_x L^∞_T},   Λ_T = max(η₁, η₂, η₃).
//! ```
//!
//! The ratio labs probe the linear estimates behind them: the local
//! smoothing gain of γ = (σ-1)/2 derivatives in `L^∞_x L²_T` and the
//! maximal-function bound `‖e^{-it|∇|^σ}f‖_{L^p_x L^∞_t} ≲ ‖|∇|^s f‖` at
//! `p = 2/(1-2s)`. Randomized band-limited trials on dyadic shells measure
//! LHS/RHS ratios; a flat trend of log-ratio against log-scale is the
//! numerical signature of the estimate, and weight exponents above the
//! critical gain serve as negative controls.
//!
//! Discrete `L^∞_x` is the max over grid points and `L^∞_T` the max over
//! time samples; each statistic records its resolution so that the
//! discretisation bias stays visible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::field::SpectralField;
use crate::grid::Grid;
use crate::params::FracParams;
use crate::propagator::{operator_symbol, CutoffChi, OperatorKind};
use crate::quad::regression_slope;
use crate::solver::Trajectory;

/// Mixed-norm diagnostics of a trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormReport {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub lambda_t: f64,
    pub hs_at_t: f64,
}

/// Discrete mixed norms of a trajectory: outer norm over grid points, inner
/// trapezoid (for L²_T) or max (for L^∞_T) over the mesh, in the order each
/// norm prescribes.
pub fn eta_norms(traj: &mut Trajectory, s: f64, delta: f64, p: u32) -> NormReport {
    let grid = traj.grid();
    let n = grid.n;
    let tw = traj.mesh.trapezoid_weights();

    let mut l2t_acc = vec![0.0f64; n];
    let mut sup_t = vec![0.0f64; n];
    let mut eta2 = 0.0f64;
    for (j, field) in traj.fields.iter_mut().enumerate() {
        eta2 = eta2.max(field.hs_norm(s));
        let mut weighted = field.apply_symbol(|xi| Complex64::new((1.0 + xi.abs()).powf(delta), 0.0));
        let wphys = weighted.physical();
        let phys = field.physical();
        for (r, (wv, v)) in wphys.iter().zip(phys).enumerate() {
            l2t_acc[r] += tw[j] * wv.norm_sqr();
            sup_t[r] = sup_t[r].max(v.norm());
        }
    }
    let eta1 = l2t_acc.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt();
    let q = 2.0 * (p as f64 - 1.0);
    let eta3 = (grid.dx() * sup_t.iter().map(|m| m.powf(q)).sum::<f64>()).powf(1.0 / q);
    let hs_at_t = traj.fields.last_mut().unwrap().hs_norm(s);
    NormReport {
        eta1,
        eta2,
        eta3,
        lambda_t: eta1.max(eta2).max(eta3),
        hs_at_t,
    }
}

/// One (input, LHS, RHS) sample of a ratio experiment.
#[derive(Debug, Clone, Serialize)]
pub struct RatioSample {
    pub trial: usize,
    /// Dyadic scale 2^k of the input band.
    pub scale: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Ratio statistics for one tested inequality.
#[derive(Debug, Clone, Serialize)]
pub struct RatioStat {
    pub estimate_id: String,
    pub samples: Vec<RatioSample>,
    pub max_ratio: f64,
    /// Slope of log(mean ratio per scale) against log(scale).
    pub trend_slope: f64,
    pub seed: u64,
    /// Largest spatial resolution used (per design: sup norms are grid maxima).
    pub grid_n_max: usize,
}

impl RatioStat {
    fn from_samples(id: &str, samples: Vec<RatioSample>, seed: u64, grid_n_max: usize) -> Self {
        let max_ratio = samples.iter().map(|s| s.ratio).fold(0.0f64, f64::max);
        // aggregate per scale
        let mut per_scale: std::collections::BTreeMap<u64, (f64, usize)> = Default::default();
        for s in &samples {
            let e = per_scale.entry(s.scale.to_bits()).or_insert((0.0, 0));
            e.0 += s.ratio;
            e.1 += 1;
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (bits, (sum, count)) in per_scale {
            xs.push(f64::from_bits(bits).ln());
            ys.push((sum / count as f64).ln());
        }
        let trend_slope = if xs.len() >= 2 { regression_slope(&xs, &ys) } else { 0.0 };
        RatioStat {
            estimate_id: id.to_string(),
            samples,
            max_ratio,
            trend_slope,
            seed,
            grid_n_max,
        }
    }
}

/// Randomized trial layout: `trials` band-limited fields distributed
/// round-robin over the dyadic scales, each carrying up to
/// `modes_per_trial` complex-Gaussian coefficients.
///
/// Two geometries are generated, matching what each estimate family can
/// honestly show at desk scale:
///
/// * **shell trials** (smoothing): modes spread over the positive half of
///   the full shell `[2^k, 2^{k+1})`, on a torus whose circumference grows
///   like the group velocity, `L_k = 2 t_horizon σ (2^{k+1})^{σ-1}`. On a
///   fixed torus the left side has the diagonal lower bound
///   `T Σ ξ^{2γ}|a_j|²`, which grows like `ξ^{σ-1} T/L` — wrap-around
///   recurrence, not a failure of the estimate. Keeping `T` below the
///   recurrence time is the faithful finite-domain surrogate of the line
///   estimate (whose constant is otherwise `L`-dependent).
/// * **packet trials** (maximal function): modes on the narrow sub-band
///   `[2^k, 2^k + W_k]`, `W_k ~ (σ 2^{(k+1)(σ-1)}/L)^{1/2}`, the width for
///   which the packet stays coherent over one torus transit — the
///   quasi-extremal family of the maximal estimate. Full-shell random data
///   sits far below the sharp constant and drifts like `2^{-k(1/2-s)/...}`
///   instead of showing the scaling law.
#[derive(Debug, Clone)]
pub struct TrialSpec {
    pub scales: Vec<u32>,
    pub trials: usize,
    pub modes_per_trial: usize,
    pub base_length: f64,
    pub t_horizon: f64,
    pub seed: u64,
}

impl Default for TrialSpec {
    fn default() -> Self {
        TrialSpec {
            scales: (3..=9).collect(),
            trials: 100,
            modes_per_trial: 64,
            base_length: 16.0 * std::f64::consts::PI,
            t_horizon: 1.0,
            seed: 0x5EED_CAFE,
        }
    }
}

/// A sparse band-limited trial field: mode frequencies and coefficients.
struct Trial {
    grid: Grid,
    /// (frequency, dx-convention coefficient)
    modes: Vec<(f64, Complex64)>,
}

impl TrialSpec {
    fn scale_index(&self, trial_idx: usize) -> u32 {
        self.scales[trial_idx % self.scales.len()]
    }

    fn scale_of(&self, trial_idx: usize) -> f64 {
        2.0f64.powi(self.scale_index(trial_idx) as i32)
    }

    fn rng(&self, trial_idx: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(
            self.seed ^ (trial_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        )
    }

    /// Torus below the recurrence time of the shell's group velocity.
    fn smoothing_length(&self, k: u32, sigma: f64) -> f64 {
        let velocity = sigma * 2.0f64.powi(k as i32 + 1).powf(sigma - 1.0);
        (2.0 * self.t_horizon * velocity).max(self.base_length)
    }

    /// Shell trial on the recurrence-free torus (positive frequencies).
    fn make_shell_trial(&self, trial_idx: usize, sigma: f64) -> Trial {
        let k = self.scale_index(trial_idx);
        let length = self.smoothing_length(k, sigma);
        let dxi = 2.0 * std::f64::consts::PI / length;
        // the grid only fixes the frequency lattice and the x-scan range
        let n_points = ((4.0 * 2.0f64.powi(k as i32 + 1) / dxi).ceil() as usize)
            .next_power_of_two()
            .max(8);
        let grid = Grid::new(n_points, length).expect("trial grid");
        let lo = 2.0f64.powi(k as i32);
        let hi = 2.0f64.powi(k as i32 + 1);
        let k_lo = (lo / dxi).ceil() as i64;
        let k_hi = (hi / dxi).floor() as i64 - 1;
        let mut rng = self.rng(trial_idx);
        // a contiguous block at a random offset inside the shell: the mode
        // spacing resolved against the horizon is then scale-invariant, so
        // trials at different scales are statistically self-similar
        let count = self.modes_per_trial.min((k_hi - k_lo).max(1) as usize);
        let start = if k_hi - count as i64 > k_lo {
            rng.gen_range(k_lo..=(k_hi - count as i64))
        } else {
            k_lo
        };
        let normal = rand_distr::StandardNormal;
        let modes = (start..start + count as i64)
            .map(|kk| {
                let re: f64 = rng.sample(normal);
                let im: f64 = rng.sample(normal);
                (kk as f64 * dxi, Complex64::new(re, im) * length)
            })
            .collect();
        Trial { grid, modes }
    }

    /// Packet trial: Gaussian coefficients on the coherent sub-band.
    fn make_packet_trial(&self, trial_idx: usize, sigma: f64) -> Trial {
        let k = self.scale_index(trial_idx);
        let length = self.base_length;
        let dxi = 2.0 * std::f64::consts::PI / length;
        let lo = 2.0f64.powi(k as i32);
        let width = (4.0 * sigma * 2.0f64.powi(k as i32 + 1).powf(sigma - 1.0) / length)
            .sqrt()
            .max(2.0 * dxi);
        let n_points = ((4.0 * (lo + width) / dxi).ceil() as usize)
            .next_power_of_two()
            .max(8);
        let grid = Grid::new(n_points, length).expect("trial grid");
        let k_lo = (lo / dxi).ceil() as i64;
        let k_hi = ((lo + width) / dxi).floor() as i64;
        let mut rng = self.rng(trial_idx);
        let normal = rand_distr::StandardNormal;
        // near-coherent packet: a random global amplitude and phase with
        // 10% per-mode jitter. Fully random phases scatter the envelope
        // over the torus and sit a scale-dependent factor below the
        // maximal estimate's sharp constant; the coherent family is its
        // quasi-extremizer.
        let g_re: f64 = rng.sample(normal);
        let g_im: f64 = rng.sample(normal);
        let global = Complex64::new(g_re, g_im);
        let modes = (k_lo..=k_hi)
            .map(|kk| {
                let jr: f64 = rng.sample(normal);
                let ji: f64 = rng.sample(normal);
                let c = global * (Complex64::new(1.0, 0.0) + Complex64::new(jr, ji) * 0.1);
                (kk as f64 * dxi, c * length)
            })
            .collect();
        Trial { grid, modes }
    }
}

fn l2_norm_of_modes(grid: &Grid, modes: &[(f64, Complex64)]) -> f64 {
    (modes.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>() / grid.length).sqrt()
}

/// Which operator the smoothing experiment probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothingOp {
    Flow,
    S,
    T,
    U,
}

/// Smoothing-effect ratios
/// `‖⟨∇⟩^{γ'} Op f‖_{L^∞_x L²_T} / (RHS(T) ‖f‖_{L²})` over randomized dyadic
/// trials, with `RHS = 1 + √T` for the flow and `T^{(γ-γ')/σ} + √T` for the
/// cutoff operators.
pub fn smoothing_ratio(
    params: &FracParams,
    gamma_prime: f64,
    op: SmoothingOp,
    spec: &TrialSpec,
    chi: &CutoffChi,
) -> RatioStat {
    let t_hor = spec.t_horizon;
    let sigma = params.sigma();
    let samples: Vec<RatioSample> = (0..spec.trials)
        .into_par_iter()
        .map(|idx| {
            let trial = spec.make_shell_trial(idx, sigma);
            let lhs = match op {
                SmoothingOp::Flow => flow_smoothing_lhs(&trial, gamma_prime, sigma, t_hor),
                SmoothingOp::S | SmoothingOp::U => {
                    let kind = if op == SmoothingOp::S { OperatorKind::S } else { OperatorKind::U };
                    // cutoff support: t ≤ 2M / ω_min
                    let om_min = trial
                        .modes
                        .iter()
                        .map(|(xi, _)| xi.abs().powf(sigma))
                        .fold(f64::INFINITY, f64::min);
                    let t_hi = (2.2 * chi.m / om_min).min(t_hor);
                    sampled_smoothing_lhs(&trial, gamma_prime, params, chi, kind, 0.0, t_hi, 512, false)
                }
                SmoothingOp::T => {
                    let om_max = trial
                        .modes
                        .iter()
                        .map(|(xi, _)| xi.abs().powf(sigma))
                        .fold(0.0f64, f64::max);
                    let t_lo = 0.5 * chi.m / om_max;
                    sampled_smoothing_lhs(&trial, gamma_prime, params, chi, OperatorKind::T, t_lo, t_hor, 512, true)
                }
            };
            let rhs_factor = match op {
                SmoothingOp::Flow => 1.0 + t_hor.sqrt(),
                _ => t_hor.powf((params.gamma() - gamma_prime) / sigma) + t_hor.sqrt(),
            };
            let rhs = rhs_factor * l2_norm_of_modes(&trial.grid, &trial.modes);
            let ratio = lhs / rhs;
            RatioSample {
                trial: idx,
                scale: spec.scale_of(idx),
                lhs,
                rhs,
                ratio,
            }
        })
        .collect();
    let n_max = samples.len().min(spec.scales.len());
    let _ = n_max;
    let grid_n_max = (0..spec.scales.len())
        .map(|i| spec.make_shell_trial(i, sigma).grid.n)
        .max()
        .unwrap_or(0);
    let id = format!("smoothing:{op:?}:gamma'={gamma_prime}");
    RatioStat::from_samples(&id, samples, spec.seed, grid_n_max)
}

/// Exact-in-time L^∞_x L²_T norm of `⟨∇⟩^{γ'} e^{-it|∇|^σ} f` for a sparse
/// field: with `u(t,x) = Σ_j a_j e^{ixξ_j} e^{-itω_j}` the time integral is
/// `Σ_{j,l} a_j ā_l e^{ix(ξ_j-ξ_l)} P_{jl}`,
/// `P_{jl} = T e^{-iT(ω_j-ω_l)/2} sinc((ω_j-ω_l)T/2)` — no time sampling.
fn flow_smoothing_lhs(trial: &Trial, gamma_prime: f64, sigma: f64, t_hor: f64) -> f64 {
    let grid = trial.grid;
    let m = trial.modes.len();
    let inv_l = 1.0 / grid.length;
    let a: Vec<(f64, Complex64)> = trial
        .modes
        .iter()
        .map(|(xi, c)| (*xi, c * (1.0 + xi.abs()).powf(gamma_prime) * inv_l))
        .collect();
    let sinc = |x: f64| if x.abs() < 1e-8 { 1.0 } else { x.sin() / x };
    // pair matrix
    let mut pair: Vec<(f64, Complex64)> = Vec::with_capacity(m * (m - 1) / 2);
    let mut diag = 0.0f64;
    let mut delta_max = 0.0f64;
    for j in 0..m {
        diag += a[j].1.norm_sqr() * t_hor;
        for l in j + 1..m {
            let dw = a[j].0.abs().powf(sigma) - a[l].0.abs().powf(sigma);
            let p = t_hor
                * Complex64::from_polar(1.0, -0.5 * t_hor * dw)
                * sinc(0.5 * t_hor * dw);
            let delta = a[j].0 - a[l].0;
            delta_max = delta_max.max(delta.abs());
            pair.push((delta, a[j].1 * a[l].1.conj() * p));
        }
    }
    // The time integral is a trig polynomial in x whose bandwidth is the
    // frequency *spread* of the trial, far below the field's bandwidth:
    // scan it at 4 points per period of its fastest component.
    let n_scan = (((grid.length * delta_max / std::f64::consts::PI) * 2.0).ceil() as usize)
        .max(64)
        .min(1 << 22);
    let mut best = 0.0f64;
    for r in 0..n_scan {
        let x = grid.length * (r as f64 / n_scan as f64 - 0.5);
        let mut v = diag;
        for (dxi, b) in &pair {
            v += 2.0 * (b * Complex64::from_polar(1.0, x * dxi)).re;
        }
        best = best.max(v);
    }
    best.max(0.0).sqrt()
}

/// Time-sampled L^∞_x L²_T norm for the cutoff operators (their multipliers
/// are not pure tones). `log_spaced` suits the algebraic `t^{-β}` envelopes.
#[allow(clippy::too_many_arguments)]
fn sampled_smoothing_lhs(
    trial: &Trial,
    gamma_prime: f64,
    params: &FracParams,
    chi: &CutoffChi,
    kind: OperatorKind,
    t_lo: f64,
    t_hi: f64,
    nt: usize,
    log_spaced: bool,
) -> f64 {
    let grid = trial.grid;
    let times: Vec<f64> = if log_spaced {
        let lo = t_lo.max(1e-12);
        (0..=nt)
            .map(|i| lo * (t_hi / lo).powf(i as f64 / nt as f64))
            .collect()
    } else {
        (0..=nt)
            .map(|i| t_lo + (t_hi - t_lo) * i as f64 / nt as f64)
            .collect()
    };
    let mut acc = vec![0.0f64; grid.n];
    let mut spec_buf = vec![Complex64::new(0.0, 0.0); grid.n];
    for (i, &t) in times.iter().enumerate() {
        // trapezoid weight
        let w = match i {
            0 => 0.5 * (times[1] - times[0]),
            i if i == times.len() - 1 => 0.5 * (times[i] - times[i - 1]),
            i => 0.5 * (times[i + 1] - times[i - 1]),
        };
        if t == 0.0 && kind.needs_positive_time() {
            continue;
        }
        for v in spec_buf.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for (xi, c) in &trial.modes {
            // place by frequency
            let idx = mode_index(&grid, *xi);
            let sym = operator_symbol(kind, t, *xi, params, chi);
            spec_buf[idx] = c * sym * (1.0 + xi.abs()).powf(gamma_prime);
        }
        let mut field = SpectralField::from_spectral(grid, spec_buf.clone());
        for (r, v) in field.physical().iter().enumerate() {
            acc[r] += w * v.norm_sqr();
        }
    }
    acc.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt()
}

fn mode_index(grid: &Grid, xi: f64) -> usize {
    let k = ((xi - grid.offset) / grid.dxi()).round() as i64;
    if k >= 0 {
        k as usize
    } else {
        (k + grid.n as i64) as usize
    }
}

/// Maximal-function ratios
/// `‖e^{-it|∇|^σ} f‖_{L^p_x L^∞_T} / ‖|∇|^s f‖_{L²}` with `s = 1/2 - 1/p`.
/// The horizon is scale-adapted so each trial resolves a fixed number of
/// beat oscillations regardless of the shell.
pub fn maximal_ratio(params: &FracParams, p_exponent: u32, spec: &TrialSpec) -> RatioStat {
    assert!(p_exponent >= 4, "maximal-function exponent must be >= 4");
    let s = 0.5 - 1.0 / p_exponent as f64;
    maximal_ratio_with_s(params, p_exponent, s, spec)
}

/// Maximal-function ratios with an explicit regularity on the right-hand
/// side (used for sharpness probes below the critical index).
pub fn maximal_ratio_with_s(
    params: &FracParams,
    p_exponent: u32,
    s: f64,
    spec: &TrialSpec,
) -> RatioStat {
    let sigma = params.sigma();
    let samples: Vec<RatioSample> = (0..spec.trials)
        .into_par_iter()
        .map(|idx| {
            let trial = spec.make_packet_trial(idx, sigma);
            let grid = trial.grid;
            let scale = spec.scale_of(idx);
            // one full torus transit of the packet at its group velocity
            let velocity = sigma * scale.powf(sigma - 1.0);
            let t_hor = 1.2 * grid.length / velocity;
            let nt = 2048usize;
            let mut maxes = vec![0.0f64; grid.n];
            let mut spec_buf = vec![Complex64::new(0.0, 0.0); grid.n];
            for i in 0..=nt {
                let t = t_hor * i as f64 / nt as f64;
                for v in spec_buf.iter_mut() {
                    *v = Complex64::new(0.0, 0.0);
                }
                for (xi, c) in &trial.modes {
                    let idx = mode_index(&grid, *xi);
                    spec_buf[idx] = c * Complex64::from_polar(1.0, -t * xi.abs().powf(sigma));
                }
                let mut field = SpectralField::from_spectral(grid, spec_buf.clone());
                for (r, v) in field.physical().iter().enumerate() {
                    maxes[r] = maxes[r].max(v.norm());
                }
            }
            let p = p_exponent as f64;
            let lhs = (grid.dx() * maxes.iter().map(|m| m.powf(p)).sum::<f64>()).powf(1.0 / p);
            let rhs = (trial
                .modes
                .iter()
                .map(|(xi, c)| xi.abs().powf(2.0 * s) * c.norm_sqr())
                .sum::<f64>()
                / grid.length)
                .sqrt();
            let ratio = lhs / rhs;
            RatioSample {
                trial: idx,
                scale,
                lhs,
                rhs,
                ratio,
            }
        })
        .collect();
    let grid_n_max = (0..spec.scales.len())
        .map(|i| spec.make_packet_trial(i, sigma).grid.n)
        .max()
        .unwrap_or(0);
    let id = format!("maximal:p={p_exponent}:s={s}");
    RatioStat::from_samples(&id, samples, spec.seed, grid_n_max)
}

/// One sample of the product-rule bound
/// `‖⟨∇⟩^s(|v|^{p-1}v)‖_{L²_{T,x}} ≤ C ‖⟨∇⟩^s v‖_{L^∞_x L²_T} ‖v‖_{L^{2(p-1)}_x L^∞_T}^{p-1}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LeibnizSample {
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Measure the product-rule ratio on a trajectory; `None` when the input is
/// degenerate (zero denominator — reported as a skipped sample).
pub fn leibniz_bound_ratio(v: &mut Trajectory, s: f64, p: u32) -> Option<LeibnizSample> {
    assert!(p % 2 == 1, "odd p only");
    let grid = v.grid();
    let tw = v.mesh.trapezoid_weights();
    let padding = (p as f64 + 1.0) / 2.0;

    let mut num_sq = 0.0f64;
    for (j, f) in v.fields.iter().enumerate() {
        let mut f = f.clone();
        let mut g = f.power_nonlinearity(p, 1.0, padding);
        let gs = g.hs_norm(s);
        num_sq += tw[j] * gs * gs;
    }
    let numerator = num_sq.sqrt();

    let report = eta_norms(v, s, s, p);
    let denominator = report.eta1 * report.eta3.powf(p as f64 - 1.0);
    if denominator <= f64::MIN_POSITIVE * 1e10 {
        return None;
    }
    let _ = grid;
    Some(LeibnizSample {
        numerator,
        denominator,
        ratio: numerator / denominator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TimeMesh;

    fn separable_trajectory(
        grid: Grid,
        mesh: &TimeMesh,
        xi_index: usize,
        phi: impl Fn(f64) -> Complex64,
    ) -> Trajectory {
        let xi1 = grid.freq(xi_index);
        let fields = mesh
            .nodes()
            .iter()
            .map(|&t| {
                let a = phi(t);
                SpectralField::from_fn(grid, |x| a * Complex64::from_polar(1.0, xi1 * x))
            })
            .collect();
        Trajectory {
            mesh: mesh.clone(),
            fields,
            iterations_used: 0,
            residual: 0.0,
        }
    }

    #[test]
    fn eta_norms_zero_trajectory() {
        let grid = Grid::new(32, 8.0).unwrap();
        let mesh = TimeMesh::uniform(1.0, 8).unwrap();
        let mut z = Trajectory::zero(grid, mesh);
        let r = eta_norms(&mut z, 0.25, 0.74, 3);
        assert_eq!(r.lambda_t, 0.0);
        assert_eq!(r.hs_at_t, 0.0);
    }

    #[test]
    fn eta_norms_separable_factorisation() {
        // v = e^{iξ₁x} φ(t): η₁ = ⟨ξ₁⟩^δ ‖φ‖_{L²_T}, η₃ = L^{1/(2(p-1))} max|φ|
        let grid = Grid::new(64, 5.0).unwrap();
        let mesh = TimeMesh::uniform(1.0, 64).unwrap();
        let phi = |t: f64| Complex64::from_polar(1.0 + 0.5 * (3.0 * t).sin(), 2.0 * t);
        let mut v = separable_trajectory(grid, &mesh, 3, phi);
        let delta = 0.74;
        let p = 3u32;
        let r = eta_norms(&mut v, 0.25, delta, p);

        let xi1 = grid.freq(3);
        let tw = mesh.trapezoid_weights();
        let phi_l2: f64 = mesh
            .nodes()
            .iter()
            .zip(&tw)
            .map(|(&t, &w)| w * phi(t).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let expect1 = (1.0 + xi1.abs()).powf(delta) * phi_l2;
        assert!((r.eta1 - expect1).abs() < 1e-12 * expect1, "{} vs {}", r.eta1, expect1);

        let phi_max = mesh
            .nodes()
            .iter()
            .map(|&t| phi(t).norm())
            .fold(0.0f64, f64::max);
        let expect3 = grid.length.powf(0.25) * phi_max;
        assert!((r.eta3 - expect3).abs() < 1e-12 * expect3, "{} vs {}", r.eta3, expect3);
        assert!(r.lambda_t >= r.eta2);
    }

    #[test]
    fn eta2_at_delta_equals_s_bounds_lambda_below() {
        let grid = Grid::new(32, 7.0).unwrap();
        let mesh = TimeMesh::uniform(0.5, 16).unwrap();
        let mut v = separable_trajectory(grid, &mesh, 2, |t| Complex64::new(1.0 / (1.0 + t), 0.3));
        let r = eta_norms(&mut v, 0.4, 0.4, 3);
        // η₂ is the sup-in-time H^s norm
        let sup_hs = v.sup_hs_norm(0.4);
        assert!((r.eta2 - sup_hs).abs() < 1e-13);
        assert!(r.lambda_t >= r.eta2);
    }

    #[test]
    fn smoothing_single_mode_closed_form() {
        // single mode: LHS = ⟨ξ₁⟩^γ √T |A| √... with modulus-1 multiplier the
        // time integral is exactly T|A⟨ξ₁⟩^γ|², independent of x.
        let params = FracParams::new(2.0, 1.0, 3, 1.0).unwrap();
        let grid = Grid::new(64, 16.0 * std::f64::consts::PI).unwrap();
        let xi1 = grid.freq(5);
        let amp = Complex64::new(0.8, -0.3);
        let trial = Trial {
            grid,
            modes: vec![(xi1, amp * grid.length)],
        };
        let gamma = 0.5;
        let t_hor = 1.3;
        let lhs = flow_smoothing_lhs(&trial, gamma, params.sigma(), t_hor);
        let expect = (1.0 + xi1.abs()).powf(gamma) * t_hor.sqrt() * amp.norm();
        assert!((lhs - expect).abs() < 1e-10 * expect, "{lhs} vs {expect}");
    }

    #[test]
    fn smoothing_flow_flat_and_negative_control() {
        // σ = 2 (the classical half-derivative gain): flat at γ = 1/2,
        // growing at γ + 0.25.
        let params = FracParams::new(2.0, 1.0, 3, 1.0).unwrap();
        let chi = CutoffChi::default_scale();
        let spec = TrialSpec {
            scales: (3..=7).collect(),
            trials: 30,
            ..Default::default()
        };
        let flat = smoothing_ratio(&params, 0.5, SmoothingOp::Flow, &spec, &chi);
        assert!(
            flat.trend_slope.abs() <= 0.05,
            "smoothing slope {}",
            flat.trend_slope
        );
        let grow = smoothing_ratio(&params, 0.75, SmoothingOp::Flow, &spec, &chi);
        assert!(
            grow.trend_slope >= 0.2,
            "negative control slope {}",
            grow.trend_slope
        );
        // homogeneity: ratios invariant under scaling the datum — implicit in
        // lhs/rhs both being 1-homogeneous; spot check by reproducibility:
        let again = smoothing_ratio(&params, 0.5, SmoothingOp::Flow, &spec, &chi);
        assert_eq!(flat.max_ratio, again.max_ratio);
    }

    #[test]
    fn maximal_flat_at_critical_index() {
        let params = FracParams::new(2.0, 1.0, 3, 1.0).unwrap();
        let spec = TrialSpec {
            scales: (3..=7).collect(),
            trials: 20,
            ..Default::default()
        };
        let flat = maximal_ratio(&params, 4, &spec);
        assert!(
            flat.trend_slope.abs() <= 0.05,
            "maximal slope {}",
            flat.trend_slope
        );
        // lowering s makes the ratio grow with scale
        let grow = maximal_ratio_with_s(&params, 4, 0.125, &spec);
        assert!(
            grow.trend_slope >= 0.08,
            "sharpness probe slope {}",
            grow.trend_slope
        );
    }

    #[test]
    fn leibniz_single_mode_ratio_at_most_one() {
        let grid = Grid::new(64, 5.0).unwrap();
        let mesh = TimeMesh::uniform(1.0, 32).unwrap();
        let mut v = separable_trajectory(grid, &mesh, 4, |t| {
            Complex64::from_polar(1.0 + 0.3 * (2.0 * t).cos(), -t)
        });
        let sample = leibniz_bound_ratio(&mut v, 0.5, 3).unwrap();
        assert!(
            sample.ratio <= 1.0 + 1e-10,
            "single-mode ratio {} should not exceed 1",
            sample.ratio
        );

        // zero trajectory → skipped
        let mut z = Trajectory::zero(grid, TimeMesh::uniform(1.0, 8).unwrap());
        assert!(leibniz_bound_ratio(&mut z, 0.5, 3).is_none());
    }

    #[test]
    fn ratio_scalar_invariance() {
        // multiplying the input by a complex scalar leaves every ratio fixed
        // (both sides homogeneous of the same degree).
        let params = FracParams::new(2.0, 1.0, 3, 1.0).unwrap();
        let grid = Grid::new(256, 16.0 * std::f64::consts::PI).unwrap();
        let xi = grid.freq(40);
        let c = Complex64::new(0.3, 0.7);
        let base = vec![(xi, Complex64::new(1.0, 0.2) * grid.length)];
        let scaled: Vec<(f64, Complex64)> = base.iter().map(|(x, a)| (*x, a * c)).collect();
        let t1 = Trial { grid, modes: base };
        let t2 = Trial { grid, modes: scaled };
        let l1 = flow_smoothing_lhs(&t1, 0.5, 2.0, 1.0) / l2_norm_of_modes(&grid, &t1.modes);
        let l2 = flow_smoothing_lhs(&t2, 0.5, 2.0, 1.0) / l2_norm_of_modes(&grid, &t2.modes);
        assert!((l1 - l2).abs() <= 1e-10 * l1);
    }
}
