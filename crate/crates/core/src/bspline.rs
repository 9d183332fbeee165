//! Cardinal B-splines: the p-fold self-convolution of the unit indicator.
//!
//! `B_p` is supported on `[0, p]`, piecewise polynomial of degree `p-1`,
//! symmetric about `p/2`, and vanishes at both endpoints for `p ≥ 2`. It is
//! the exact inverse Fourier transform of `((1-e^{-iy})/(iy))^p`, which makes
//! it the closed form of the band autocorrelation integral in the
//! frequency-growth experiments.

/// Evaluate the cardinal B-spline `B_p = 1_{[0,1]}^{*p}` by the Cox-de Boor
/// recursion on integer knots:
/// `B_1 = 1_{[0,1)}`, `B_k(x) = (x B_{k-1}(x) + (k-x) B_{k-1}(x-1))/(k-1)`.
pub fn cardinal_bspline(p: u32, x: f64) -> f64 {
    assert!(p >= 1);
    if !(0.0..(p as f64)).contains(&x) && x != p as f64 {
        return 0.0;
    }
    if x == p as f64 {
        // right endpoint: 0 for p ≥ 2, 1 only for the half-open indicator
        return if p == 1 { 0.0 } else { 0.0 };
    }
    // values[i] = B_1(x - i) for the shifts that can contribute
    let mut values: Vec<f64> = (0..p)
        .map(|i| {
            let y = x - i as f64;
            if (0.0..1.0).contains(&y) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    for k in 2..=p {
        let kf = k as f64;
        for i in 0..(p - k + 1) as usize {
            let y = x - i as f64;
            values[i] = (y * values[i] + (kf - y) * values[i + 1]) / (kf - 1.0);
        }
    }
    values[0]
}
