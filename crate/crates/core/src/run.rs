//! Configuration-driven entry point: every lab as a JSON-configured job.
//!
//! A run is described by a JSON document whose `subcommand` field selects the
//! job; the other fields are job-specific. Identical config + seed produces
//! byte-identical CSV bodies (the only timestamp lives in a leading comment
//! line). Five presets ship embedded in the binary.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::RunError;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::illposed::{growth_experiment, h_closed_form, h_quadrature, h_symmetry_residuals, IllConfig};
use crate::mesh::TimeMesh;
use crate::norms::{eta_norms, leibniz_bound_ratio, maximal_ratio_with_s, smoothing_ratio, RatioStat, SmoothingOp, TrialSpec};
use crate::params::FracParams;
use crate::propagator::{evolve_linear, remainder_decomposition, CutoffChi};
use crate::quad::regression_slope;
use crate::report::{fmt, write_csv, write_json};
use crate::solver::{gaussian_data, picard_solve, SolverConfig};
use crate::special::mittag_leffler::{ml_eval, MLOrder};

/// Fixed default seed: reruns reproduce outputs bit-identically.
pub const DEFAULT_SEED: u64 = 0x5EED_CAFE;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Equation parameters as they appear in configs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub alpha: f64,
    pub beta: f64,
    pub p: u32,
    pub mu: f64,
}

impl ParamSpec {
    pub fn build(&self) -> Result<FracParams, RunError> {
        FracParams::new(self.alpha, self.beta, self.p, self.mu).map_err(RunError::from)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid, RunError> {
        Grid::new(self.n, self.length)
            .map_err(|e| RunError::validation("grid", e.to_string()))
    }
}

/// Gaussian wave-packet data description.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub width: f64,
    pub carrier: f64,
    /// Target H^s norm (s taken from the surrounding job).
    pub target_norm: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    /// Declared wall-clock budget; checked by the preset conformance tests.
    pub time_budget_secs: Option<f64>,
    pub job: JobConfig,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum JobConfig {
    MlEval(MlEvalJob),
    Linear(LinearJob),
    Solve(SolveJob),
    Norms(SolveJob),
    Smoothing(SmoothingJob),
    Maximal(MaximalJob),
    Illposed(IllposedJob),
    HFunc(HFuncJob),
}

impl JobConfig {
    pub fn name(&self) -> &'static str {
        match self {
            JobConfig::MlEval(_) => "ml-eval",
            JobConfig::Linear(_) => "linear",
            JobConfig::Solve(_) => "solve",
            JobConfig::Norms(_) => "norms",
            JobConfig::Smoothing(_) => "smoothing",
            JobConfig::Maximal(_) => "maximal",
            JobConfig::Illposed(_) => "illposed",
            JobConfig::HFunc(_) => "h-func",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlEvalJob {
    pub beta: f64,
    pub rho: f64,
    pub z_re: f64,
    pub z_im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearJob {
    pub params: ParamSpec,
    pub grid: GridSpec,
    /// Band-limited data: unit coefficients on `band_lo ≤ |ξ| ≤ band_hi`.
    pub band_lo: f64,
    pub band_hi: f64,
    pub t_max: f64,
    pub t_samples: usize,
    #[serde(default = "default_chi")]
    pub chi_m: f64,
    pub s: f64,
}

fn default_chi() -> f64 {
    10.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveJob {
    pub params: ParamSpec,
    pub grid: GridSpec,
    pub data: DataSpec,
    pub s: f64,
    pub delta: f64,
    pub t_max: f64,
    pub m: usize,
    #[serde(default = "default_grading")]
    pub grading: f64,
    pub tol: f64,
    pub max_iter: usize,
}

fn default_grading() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingJob {
    pub params: ParamSpec,
    /// γ' = γ + gamma_offset with γ = (σ-1)/2.
    #[serde(default)]
    pub gamma_offset: f64,
    pub op: String,
    pub scales: Vec<u32>,
    pub trials: usize,
    pub t_horizon: f64,
    #[serde(default = "default_chi")]
    pub chi_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximalJob {
    pub params: ParamSpec,
    pub p_exponent: u32,
    /// Defaults to the critical 1/2 - 1/p.
    #[serde(default)]
    pub s_override: Option<f64>,
    pub scales: Vec<u32>,
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IllposedJob {
    pub config: IllConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HFuncJob {
    pub p: u32,
    pub eps: f64,
    pub n_list: Vec<f64>,
    pub samples_per_n: usize,
    pub tol: f64,
}

/// Embedded presets.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "thm11" => Some(include_str!("../presets/thm11.json")),
        "masslimit" => Some(include_str!("../presets/masslimit.json")),
        "smoothing_kpv" => Some(include_str!("../presets/smoothing_kpv.json")),
        "illposed_p3" => Some(include_str!("../presets/illposed_p3.json")),
        "illposed_scaled" => Some(include_str!("../presets/illposed_scaled.json")),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 5] = [
    "thm11",
    "masslimit",
    "smoothing_kpv",
    "illposed_p3",
    "illposed_scaled",
];

/// Parse a config document.
///
/// The envelope fields (`subcommand`, `seed`, `time_budget_secs`) are split
/// off by hand and the remainder is deserialized strictly into the job
/// struct, so unknown fields are rejected with their names even though the
/// job selection is tag-based.
pub fn parse_config(text: &str) -> Result<RunConfig, RunError> {
    let mut value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| RunError::validation("<document>", e.to_string()))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| RunError::validation("<document>", "expected a JSON object"))?;
    let tag = obj
        .remove("subcommand")
        .ok_or_else(|| RunError::validation("subcommand", "missing field"))?;
    let tag = tag
        .as_str()
        .ok_or_else(|| RunError::validation("subcommand", "must be a string"))?
        .to_string();
    let seed = match obj.remove("seed") {
        None => default_seed(),
        Some(v) => v
            .as_u64()
            .ok_or_else(|| RunError::validation("seed", "must be an unsigned integer"))?,
    };
    let time_budget_secs = match obj.remove("time_budget_secs") {
        None => None,
        Some(v) => Some(
            v.as_f64()
                .ok_or_else(|| RunError::validation("time_budget_secs", "must be a number"))?,
        ),
    };
    let rest = serde_json::Value::Object(obj.clone());
    let wrap = |e: serde_json::Error| RunError::validation(tag.clone(), e.to_string());
    let job = match tag.as_str() {
        "ml-eval" => JobConfig::MlEval(serde_json::from_value(rest).map_err(wrap)?),
        "linear" => JobConfig::Linear(serde_json::from_value(rest).map_err(wrap)?),
        "solve" => JobConfig::Solve(serde_json::from_value(rest).map_err(wrap)?),
        "norms" => JobConfig::Norms(serde_json::from_value(rest).map_err(wrap)?),
        "smoothing" => JobConfig::Smoothing(serde_json::from_value(rest).map_err(wrap)?),
        "maximal" => JobConfig::Maximal(serde_json::from_value(rest).map_err(wrap)?),
        "illposed" => JobConfig::Illposed(serde_json::from_value(rest).map_err(wrap)?),
        "h-func" => JobConfig::HFunc(serde_json::from_value(rest).map_err(wrap)?),
        other => {
            return Err(RunError::validation(
                "subcommand",
                format!("unknown subcommand `{other}`"),
            ))
        }
    };
    Ok(RunConfig {
        seed,
        time_budget_secs,
        job,
    })
}

/// Execute a job, writing artifacts under `out_dir`. Returns the one-line
/// summary that the CLI prints.
pub fn execute(config: &RunConfig, out_dir: &Path) -> Result<String, RunError> {
    std::fs::create_dir_all(out_dir)?;
    match &config.job {
        JobConfig::MlEval(job) => run_ml_eval(job, out_dir),
        JobConfig::Linear(job) => run_linear(job, out_dir),
        JobConfig::Solve(job) => run_solve(job, out_dir, false),
        JobConfig::Norms(job) => run_solve(job, out_dir, true),
        JobConfig::Smoothing(job) => run_smoothing(job, config.seed, out_dir),
        JobConfig::Maximal(job) => run_maximal(job, config.seed, out_dir),
        JobConfig::Illposed(job) => run_illposed(job, config.seed, out_dir),
        JobConfig::HFunc(job) => run_hfunc(job, out_dir),
    }
}

fn run_ml_eval(job: &MlEvalJob, out_dir: &Path) -> Result<String, RunError> {
    let order = MLOrder::new(job.beta, job.rho)
        .map_err(|e| RunError::validation("beta/rho", e.to_string()))?;
    let v = ml_eval(order, Complex64::new(job.z_re, job.z_im));
    #[derive(Serialize)]
    struct Out {
        re: f64,
        im: f64,
        method: String,
        err_estimate: f64,
    }
    write_json(
        &out_dir.join("ml_eval.json"),
        &Out {
            re: v.value.re,
            im: v.value.im,
            method: format!("{:?}", v.method),
            err_estimate: v.err_estimate,
        },
    )?;
    Ok(format!(
        "ml-eval: E_({},{})({}{:+}i) = {:.15} {:+.15}i  [{:?}, err<={:.2e}]",
        job.beta, job.rho, job.z_re, job.z_im, v.value.re, v.value.im, v.method, v.err_estimate
    ))
}

fn band_field(grid: Grid, lo: f64, hi: f64) -> SpectralField {
    let spec = (0..grid.n)
        .map(|i| {
            let a = grid.freq(i).abs();
            if a >= lo && a <= hi {
                Complex64::new(grid.length, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SpectralField::from_spectral(grid, spec)
}

fn run_linear(job: &LinearJob, out_dir: &Path) -> Result<String, RunError> {
    let params = job.params.build()?;
    let grid = job.grid.build()?;
    if !(job.band_lo < job.band_hi) {
        return Err(RunError::validation("band_lo/band_hi", "need band_lo < band_hi"));
    }
    if job.t_samples < 2 {
        return Err(RunError::validation("t_samples", "need at least two samples"));
    }
    let chi = CutoffChi::new(job.chi_m);
    let mut f = band_field(grid, job.band_lo, job.band_hi);
    let n0 = f.l2_norm();
    let mut rows = Vec::new();
    let mut final_ratio = 0.0;
    for i in 1..=job.t_samples {
        let t = job.t_max * i as f64 / job.t_samples as f64;
        let mut u = evolve_linear(&mut f, t, &params);
        let ratio = u.l2_norm() / n0;
        let hs = u.hs_norm(job.s);
        let (_, rep) = remainder_decomposition(&mut f, t, &params, &chi);
        rows.push(vec![fmt(t), fmt(ratio), fmt(hs), fmt(rep.sup_scaled)]);
        final_ratio = ratio;
    }
    write_csv(
        &out_dir.join("linear_sweep.csv"),
        &["t", "L2_ratio", "Hs_norm", "remainder_sup"],
        rows.into_iter(),
    )?;
    #[derive(Serialize)]
    struct Out {
        final_mass_ratio: f64,
        reciprocal_beta: f64,
    }
    write_json(
        &out_dir.join("linear_summary.json"),
        &Out {
            final_mass_ratio: final_ratio,
            reciprocal_beta: 1.0 / params.beta,
        },
    )?;
    Ok(format!(
        "linear: mass ratio at T={} is {:.6} (1/beta = {:.6})",
        job.t_max,
        final_ratio,
        1.0 / params.beta
    ))
}

fn run_solve(job: &SolveJob, out_dir: &Path, with_norms: bool) -> Result<String, RunError> {
    let params = job.params.build()?;
    let grid = job.grid.build()?;
    let mesh = TimeMesh::graded(job.t_max, job.m, job.grading)
        .map_err(|e| RunError::validation("t_max/m/grading", e.to_string()))?;
    let config = SolverConfig::new(&params, job.s, job.delta, job.tol, job.max_iter, mesh)
        .map_err(|e| RunError::validation("s/delta/tol/max_iter", e.to_string()))?;
    let mut f = gaussian_data(grid, job.data.width, job.data.carrier, job.s, job.data.target_norm);
    let (mut traj, diag) = picard_solve(&mut f, &params, &config)?;

    // trajectory artifact
    let mut out = Vec::new();
    use std::io::Write;
    writeln!(out, "# trajectory v1")?;
    writeln!(out, "# params {}", serde_json::to_string(&params)?)?;
    writeln!(out, "# mesh {}", serde_json::to_string(&traj.mesh)?)?;
    for (j, field) in traj.fields.iter_mut().enumerate() {
        writeln!(out, "# node {} t={}", j, traj.mesh.nodes()[j])?;
        crate::field::write_field(field, &mut out)?;
    }
    std::fs::write(out_dir.join("trajectory.txt"), out)?;

    let report = eta_norms(&mut traj, job.s, job.delta, params.p);
    write_json(&out_dir.join("solve_summary.json"), &serde_json::json!({
        "iterations": diag.iterations,
        "residual": diag.residual,
        "norms": report,
    }))?;

    if with_norms {
        let leibniz = leibniz_bound_ratio(&mut traj, job.s, params.p);
        write_json(&out_dir.join("norm_report.json"), &serde_json::json!({
            "norms": report,
            "leibniz_sample": leibniz,
        }))?;
    }

    Ok(format!(
        "solve: converged in {} iterations, residual {:.3e}, Lambda_T {:.6}, H^s(T) {:.6}",
        diag.iterations, diag.residual, report.lambda_t, report.hs_at_t
    ))
}

fn ratio_artifacts(stat: &RatioStat, out_dir: &Path, stem: &str) -> Result<(), RunError> {
    write_csv(
        &out_dir.join(format!("{stem}.csv")),
        &["trial_id", "scale", "lhs", "rhs", "ratio"],
        stat.samples.iter().map(|s| {
            vec![
                s.trial.to_string(),
                fmt(s.scale),
                fmt(s.lhs),
                fmt(s.rhs),
                fmt(s.ratio),
            ]
        }),
    )?;
    write_json(&out_dir.join(format!("{stem}.json")), &serde_json::json!({
        "estimate_id": stat.estimate_id,
        "max_ratio": stat.max_ratio,
        "trend_slope": stat.trend_slope,
        "seed": stat.seed,
        "grid_n_max": stat.grid_n_max,
    }))?;
    Ok(())
}

fn run_smoothing(job: &SmoothingJob, seed: u64, out_dir: &Path) -> Result<String, RunError> {
    let params = job.params.build()?;
    let op = match job.op.as_str() {
        "flow" => SmoothingOp::Flow,
        "s" => SmoothingOp::S,
        "t" => SmoothingOp::T,
        "u" => SmoothingOp::U,
        other => {
            return Err(RunError::validation(
                "op",
                format!("unknown operator `{other}` (expected flow|s|t|u)"),
            ))
        }
    };
    let spec = TrialSpec {
        scales: job.scales.clone(),
        trials: job.trials,
        t_horizon: job.t_horizon,
        seed,
        ..Default::default()
    };
    let gamma_prime = params.gamma() + job.gamma_offset;
    let chi = CutoffChi::new(job.chi_m);
    let stat = smoothing_ratio(&params, gamma_prime, op, &spec, &chi);
    ratio_artifacts(&stat, out_dir, "smoothing")?;
    Ok(format!(
        "smoothing: {} trend_slope {:.4}, max_ratio {:.4}",
        stat.estimate_id, stat.trend_slope, stat.max_ratio
    ))
}

fn run_maximal(job: &MaximalJob, seed: u64, out_dir: &Path) -> Result<String, RunError> {
    let params = job.params.build()?;
    if job.p_exponent < 4 {
        return Err(RunError::validation("p_exponent", "must be at least 4"));
    }
    let s = job
        .s_override
        .unwrap_or(0.5 - 1.0 / job.p_exponent as f64);
    let spec = TrialSpec {
        scales: job.scales.clone(),
        trials: job.trials,
        seed,
        ..Default::default()
    };
    let stat = maximal_ratio_with_s(&params, job.p_exponent, s, &spec);
    ratio_artifacts(&stat, out_dir, "maximal")?;
    Ok(format!(
        "maximal: {} trend_slope {:.4}, max_ratio {:.4}",
        stat.estimate_id, stat.trend_slope, stat.max_ratio
    ))
}

fn run_illposed(job: &IllposedJob, seed: u64, out_dir: &Path) -> Result<String, RunError> {
    let report = growth_experiment(&job.config)?;
    write_csv(
        &out_dir.join("growth.csv"),
        &["N", "norm", "window_lo", "window_hi", "achieved_fN_norm"],
        report.points.iter().map(|p| {
            vec![
                fmt(p.n_freq),
                fmt(p.norm),
                fmt(p.window_lo),
                fmt(p.window_hi),
                fmt(p.achieved_f_norm),
            ]
        }),
    )?;
    write_json(&out_dir.join("growth_summary.json"), &serde_json::json!({
        "measured_slope": report.measured_slope,
        "predicted_slope": report.predicted_slope,
        "sign_agrees": report.sign_agrees,
        "window": report.window,
        "seed": seed,
        "s": report.s,
        "eps": report.eps,
        "delta_i": report.delta_i,
        "b": report.b,
    }))?;
    Ok(format!(
        "illposed: measured slope {:.4}, predicted {:.4}, sign agrees: {}",
        report.measured_slope, report.predicted_slope, report.sign_agrees
    ))
}

fn run_hfunc(job: &HFuncJob, out_dir: &Path) -> Result<String, RunError> {
    if job.p < 3 || job.p % 2 == 0 {
        return Err(RunError::validation("p", "odd integer >= 3 required"));
    }
    if job.n_list.len() < 3 {
        return Err(RunError::validation("n_list", "need at least three scales"));
    }
    let mut rows = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n_freq in &job.n_list {
        let w = n_freq.powf(-2.0 * job.eps);
        let mut max_quad = 0.0f64;
        for i in 0..job.samples_per_n {
            // interior window z ∈ (1/2, 1]
            let z = 0.5 + 0.5 * (i as f64 + 0.5) / job.samples_per_n as f64;
            let xi = n_freq - z * w;
            let q = h_quadrature(job.p, n_freq, job.eps, xi, job.tol);
            let c = h_closed_form(job.p, n_freq, job.eps, xi);
            let rel = (q.value - c).norm() / c.norm().max(1e-300);
            rows.push(vec![
                fmt(n_freq),
                fmt(z),
                fmt(q.value.re),
                fmt(c.re),
                fmt(rel),
            ]);
            max_quad = max_quad.max(q.value.norm());
        }
        xs.push(n_freq.ln());
        ys.push(max_quad.ln());
    }
    let slope = regression_slope(&xs, &ys);
    let predicted = 2.0 * job.eps * (1.0 - job.p as f64);
    let (sym_p, sym_one) = h_symmetry_residuals(job.p);
    write_csv(
        &out_dir.join("h_table.csv"),
        &["N", "z", "quad_re", "closed_re", "rel_err"],
        rows.into_iter(),
    )?;
    write_json(&out_dir.join("h_summary.json"), &serde_json::json!({
        "measured_slope": slope,
        "predicted_slope": predicted,
        "reflection_about_p_halves_residual": sym_p,
        "reflection_about_one_half_residual": sym_one,
    }))?;
    Ok(format!(
        "h-func: window-max slope {:.4} vs predicted {:.4} (reflection residuals: p-λ {:.1e}, 1-λ {:.2})",
        slope, predicted, sym_p, sym_one
    ))
}
