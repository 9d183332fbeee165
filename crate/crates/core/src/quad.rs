//! Quadrature primitives: exact moments of weakly singular kernels against
//! piecewise-linear interpolants, oscillatory moments, adaptive Simpson, and
//! the exponential integral needed for analytic oscillatory tails.

use num_complex::Complex64;

/// Exact `∫_a^b (t_end - τ)^{ν-1} dτ` for `0 ≤ a < b ≤ t_end`, `ν > 0`,
/// written to avoid cancellation when `b - a ≪ t_end - a`.
pub fn singular_moment0(nu: f64, t_end: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a < b && b <= t_end * (1.0 + 1e-12));
    let ra = t_end - a;
    let rb = (t_end - b).max(0.0);
    if rb == 0.0 {
        return ra.powf(nu) / nu;
    }
    // ra^ν - rb^ν = ra^ν (1 - exp(ν ln(rb/ra))) = -ra^ν expm1(ν ln1p(-(b-a)/ra))
    let ratio = -(b - a) / ra;
    -(ra.powf(nu)) * (nu * ratio.ln_1p()).exp_m1() / nu
}

/// Exact `∫_a^b (t_end - τ)^{ν} dτ` (the once-higher moment).
fn singular_moment_plus(nu: f64, t_end: f64, a: f64, b: f64) -> f64 {
    singular_moment0(nu + 1.0, t_end, a, b) // same formula with ν+1 in the exponent
}

/// Node weights `(w_a, w_b)` of the product rule on one interval:
/// `∫_a^b (t_end-τ)^{ν-1} f(τ) dτ ≈ w_a f(a) + w_b f(b)` with the kernel
/// integrated exactly against the linear interpolant of `f`.
pub fn singular_interval_weights(nu: f64, t_end: f64, a: f64, b: f64) -> (f64, f64) {
    let h = b - a;
    let m0 = singular_moment0(nu, t_end, a, b);
    let mp = singular_moment_plus(nu, t_end, a, b);
    // ∫ k(τ) (b-τ)/h dτ = [ (b - t_end) m0 + ∫ (t_end-τ)^ν dτ ] / h
    let wa = ((b - t_end) * m0 + mp) / h;
    (wa, m0 - wa)
}

/// Weights of the product-integration rule for
/// `∫_0^{t_j} (t_j-τ)^{ν-1} f(τ) dτ ≈ Σ_l w_l f(t_l)`
/// with `f` replaced by its piecewise-linear interpolant on `nodes[0..=j]`.
/// The kernel moments are integrated exactly, so the rule is exact when `f`
/// is piecewise linear — in particular `Σ w_l = t_j^ν/ν` for `f ≡ 1`.
pub fn singular_pl_weights(nu: f64, nodes: &[f64], j: usize) -> Vec<f64> {
    assert!(j < nodes.len() && j >= 1);
    let t_end = nodes[j];
    let mut w = vec![0.0; j + 1];
    for l in 0..j {
        let (wa, wb) = singular_interval_weights(nu, t_end, nodes[l], nodes[l + 1]);
        w[l] += wa;
        w[l + 1] += wb;
    }
    w
}

/// Moments of `e^{iωτ}` against the linear hat on `[a, b]`:
/// returns `(m0, m1)` with `m0 = ∫_a^b e^{iωτ}dτ` and
/// `m1 = ∫_a^b (τ-a)/(b-a) · e^{iωτ} dτ`; the weight of the left node is
/// `m0 - m1`. Small phases switch to Taylor forms to avoid cancellation.
pub fn oscillatory_pl_moments(omega: f64, a: f64, b: f64) -> (Complex64, Complex64) {
    let h = b - a;
    let c = Complex64::new(0.0, omega);
    let ch = c * h;
    let rot = Complex64::from_polar(1.0, omega * a);
    if ch.norm() < 1e-3 {
        // m0 = h(1 + ch/2 + ch²/6 + ch³/24), m1 = h(1/2 + ch/3 + ch²/8 + ch³/30)
        let m0 = h * (Complex64::new(1.0, 0.0) + ch * 0.5 + ch * ch / 6.0 + ch * ch * ch / 24.0);
        let m1 = h * (Complex64::new(0.5, 0.0) + ch / 3.0 + ch * ch * 0.125 + ch * ch * ch / 30.0);
        (rot * m0, rot * m1)
    } else {
        let ech = ch.exp();
        let m0 = (ech - 1.0) / c;
        let m1 = (ech * (ch - 1.0) + 1.0) / (c * c * h);
        (rot * m0, rot * m1)
    }
}

/// Adaptive Simpson quadrature of a complex integrand on `[a, b]`.
/// Returns the value and an error estimate.
pub fn adaptive_simpson(
    f: &impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> (Complex64, f64) {
    fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
        (fa + fm * 4.0 + fb) * (h / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: usize,
    ) -> (Complex64, f64) {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = (left + right - whole).norm();
        if depth == 0 || delta <= 15.0 * tol {
            return (left + right + (left + right - whole) / 15.0, delta / 15.0);
        }
        let (vl, el) = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
        let (vr, er) = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        (vl + vr, el + er)
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// Exponential integral `E_1(w) = ∫_1^∞ e^{-wt}/t dt` for complex `w`
/// with `Re w ≥ 0` (used on the imaginary axis for oscillatory tails).
pub fn exp_integral_e1(w: Complex64) -> Complex64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    assert!(w.norm() > 0.0, "E_1 is singular at 0");
    if w.norm() <= 3.0 {
        // E_1(w) = -γ - ln w + Σ_{k≥1} (-1)^{k+1} w^k / (k·k!)
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..=60 {
            term *= -w / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.norm() < 1e-17 * (1.0 + sum.norm()) {
                break;
            }
        }
        -EULER_GAMMA - w.ln() + sum
    } else {
        // Modified Lentz continued fraction: E_1(w) = e^{-w} / (w + 1/(1 + 1/(w + 2/(1 + ...))))
        let tiny = 1e-300;
        let mut b = w + 1.0;
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=200 {
            let a = -(i as f64) * (i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).norm() < 1e-16 {
                break;
            }
        }
        (-w).exp() * h
    }
}

/// Analytic tail `∫_y0^∞ y^{-p} e^{iνy} dy` for integer `p ≥ 2`, by the
/// descending recursion `I_k = y0^{1-k} e^{iνy0}/(k-1) + (iν/(k-1)) I_{k-1}`
/// down to `I_1 = E_1(-iν y0)`.
pub fn oscillatory_tail(p: u32, nu: f64, y0: f64) -> Complex64 {
    assert!(p >= 2 && y0 > 0.0);
    if nu == 0.0 {
        return Complex64::new(y0.powi(1 - p as i32) / (p as f64 - 1.0), 0.0);
    }
    let i_nu = Complex64::new(0.0, nu);
    let phase = Complex64::from_polar(1.0, nu * y0);
    // E_1(-iνy0) = ∫_1^∞ e^{iνy0 t}/t dt (analytic continuation onto the axis)
    let mut ik = exp_integral_e1(-i_nu * y0);
    for k in 2..=p {
        let km1 = (k - 1) as f64;
        ik = (y0.powi(1 - k as i32) * phase + i_nu * ik) / km1;
    }
    ik
}

/// Linear least-squares slope of `y` against `x`.
pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_zero_closed_form() {
        // ∫_0^t (t-τ)^{ν-1} dτ = t^ν/ν
        let nu = 0.875;
        let t = 1.7;
        let nodes = [0.0, 0.3, 0.9, 1.3, 1.7];
        let total: f64 = (0..4).map(|l| singular_moment0(nu, t, nodes[l], nodes[l + 1])).sum();
        assert!((total - t.powf(nu) / nu).abs() < 1e-13);
    }

    #[test]
    fn pl_weights_exact_for_linear_functions() {
        let nu = 0.6;
        let nodes: Vec<f64> = (0..=40).map(|j| 2.0 * (j as f64 / 40.0).powi(2)).collect();
        let j = 40;
        let w = singular_pl_weights(nu, &nodes, j);
        // f ≡ 1 → t^ν/ν
        let s1: f64 = w.iter().sum();
        let t = nodes[j];
        assert!((s1 - t.powf(nu) / nu).abs() < 1e-12);
        // f(τ) = τ → ∫ τ (t-τ)^{ν-1} dτ = t^{ν+1} (1/ν - 1/(ν+1))
        let st: f64 = w.iter().zip(&nodes).map(|(wi, ti)| wi * ti).sum();
        let exact = t.powf(nu + 1.0) * (1.0 / nu - 1.0 / (nu + 1.0));
        assert!((st - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn oscillatory_moments_match_quadrature() {
        let (a, b) = (0.4, 1.1);
        for &omega in &[0.0f64, 1e-6, 0.5, 37.0] {
            let (m0, m1) = oscillatory_pl_moments(omega, a, b);
            let (q0, _) = adaptive_simpson(&|t| Complex64::from_polar(1.0, omega * t), a, b, 1e-13, 30);
            let (q1, _) = adaptive_simpson(
                &|t| Complex64::from_polar(1.0, omega * t) * ((t - a) / (b - a)),
                a,
                b,
                1e-13,
                30,
            );
            assert!((m0 - q0).norm() < 1e-11, "omega={omega}");
            assert!((m1 - q1).norm() < 1e-11, "omega={omega}");
        }
    }

    #[test]
    fn e1_real_axis_values() {
        // E_1(1) = 0.2193839343955203, E_1(5) = 0.001148295591275326
        let v1 = exp_integral_e1(Complex64::new(1.0, 0.0));
        assert!((v1.re - 0.2193839343955203).abs() < 1e-13);
        let v5 = exp_integral_e1(Complex64::new(5.0, 0.0));
        assert!((v5.re - 0.001148295591275326).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_tail_against_brute_force() {
        for &(p, nu) in &[(3u32, 2.3f64), (3, -1.2), (3, 0.05), (5, 1.0), (3, 0.0)] {
            let y0 = 40.0;
            let tail = oscillatory_tail(p, nu, y0);
            // brute force on [y0, y_big] plus a crude remainder bound
            let (brute, _) = adaptive_simpson(
                &|y| Complex64::from_polar(y.powi(-(p as i32)), nu * y),
                y0,
                4000.0,
                1e-12,
                40,
            );
            let rem = 4000.0f64.powi(1 - p as i32) / (p as f64 - 1.0);
            assert!(
                (tail - brute).norm() < 5.0 * rem + 1e-10,
                "p={p} nu={nu}: {tail} vs {brute}"
            );
        }
    }

    #[test]
    fn slope_of_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [0.5, 2.5, 4.5, 6.5];
        assert!((regression_slope(&x, &y) - 2.0).abs() < 1e-14);
    }
}
