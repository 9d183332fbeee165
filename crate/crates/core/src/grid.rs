//! Periodic spatial grid with paired physical/frequency indexing.
//!
//! Physical points sit at `x_j = -L/2 + j·dx`; frequencies follow the usual
//! FFT storage order and are optionally shifted by a carrier offset ξ₀, so a
//! grid can represent a narrow spectral band around a large carrier without
//! resolving everything from zero up (the field then stores the demodulated
//! envelope, and odd-power nonlinearities commute with the carrier exactly).
//!
//! The forward transform carries the `dx` weight, so spectral coefficients
//! approximate the continuum transform `f̂(ξ) = ∫ f e^{-ixξ} dx` and the
//! evolution multipliers apply verbatim.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::FieldError;

static PLANNER: Lazy<Mutex<FftCache>> = Lazy::new(|| {
    Mutex::new(FftCache {
        planner: FftPlanner::new(),
        plans: HashMap::new(),
    })
});

struct FftCache {
    planner: FftPlanner<f64>,
    plans: HashMap<(usize, bool), Arc<dyn Fft<f64>>>,
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLANNER.lock().expect("fft planner lock");
    if let Some(p) = cache.plans.get(&(n, forward)) {
        return p.clone();
    }
    let p = if forward {
        cache.planner.plan_fft_forward(n)
    } else {
        cache.planner.plan_fft_inverse(n)
    };
    cache.plans.insert((n, forward), p.clone());
    p
}

/// Uniform periodic grid of `n` points on a torus of circumference `length`,
/// with frequencies `ξ_k = offset + 2πk/length`, `k ∈ [-n/2, n/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub length: f64,
    #[serde(default)]
    pub offset: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self, FieldError> {
        Self::with_offset(n, length, 0.0)
    }

    /// Grid whose modes represent the band `offset + [-πn/L, πn/L)`.
    pub fn with_offset(n: usize, length: f64, offset: f64) -> Result<Self, FieldError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(FieldError::InvalidGrid(format!(
                "n = {n} must be a power of two, at least 8"
            )));
        }
        if !(length > 0.0) {
            return Err(FieldError::InvalidGrid(format!("length = {length} must be positive")));
        }
        Ok(Grid { n, length, offset })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Frequency spacing 2π/L.
    pub fn dxi(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Signed mode number for storage index i (FFT order).
    pub fn mode_number(&self, i: usize) -> i64 {
        debug_assert!(i < self.n);
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Frequency of storage index i.
    pub fn freq(&self, i: usize) -> f64 {
        self.offset + self.mode_number(i) as f64 * self.dxi()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.freq(i)).collect()
    }

    /// Physical point x_j = -L/2 + j dx.
    pub fn point(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Largest representable |mode frequency| relative to the offset.
    pub fn nyquist(&self) -> f64 {
        self.n as f64 / 2.0 * self.dxi()
    }

    /// Forward transform: physical samples -> dx-weighted spectral
    /// coefficients (in place, storage order).
    pub fn transform_forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n);
        if self.offset != 0.0 {
            for (j, v) in data.iter_mut().enumerate() {
                *v *= Complex64::from_polar(1.0, -self.offset * self.point(j));
            }
        }
        plan(self.n, true).process(data);
        let dx = self.dx();
        for (i, v) in data.iter_mut().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *v *= dx * sign;
        }
    }

    /// Inverse transform: spectral coefficients -> physical samples.
    pub fn transform_inverse(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n);
        let inv_l = 1.0 / self.length;
        for (i, v) in data.iter_mut().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *v *= inv_l * sign;
        }
        plan(self.n, false).process(data);
        if self.offset != 0.0 {
            for (j, v) in data.iter_mut().enumerate() {
                *v *= Complex64::from_polar(1.0, self.offset * self.point(j));
            }
        }
    }

    /// Indices of modes whose frequency lies in `(lo, hi]`.
    pub fn band_indices(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| {
                let xi = self.freq(i);
                xi > lo && xi <= hi
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(7, 1.0).is_err());
        assert!(Grid::new(12, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, 1.0).is_ok());
    }

    #[test]
    fn frequencies_symmetric_about_offset() {
        let g = Grid::new(16, 4.0).unwrap();
        let f = g.freqs();
        assert_eq!(f[0], 0.0);
        // mode +1 and -1
        assert!((f[1] + f[15]).abs() < 1e-14);
        // storage n/2 holds -n/2
        assert!((f[8] + 8.0 * g.dxi()).abs() < 1e-14);
    }

    #[test]
    fn forward_matches_direct_dft() {
        let g = Grid::new(16, 5.0).unwrap();
        let mut data: Vec<Complex64> = (0..16)
            .map(|j| Complex64::new((j as f64 * 0.7).sin(), (j as f64 * 0.3).cos()))
            .collect();
        let original = data.clone();
        g.transform_forward(&mut data);
        for i in [0usize, 3, 8, 13] {
            let xi = g.freq(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in original.iter().enumerate() {
                acc += v * Complex64::from_polar(1.0, -xi * g.point(j));
            }
            acc *= g.dx();
            assert!((acc - data[i]).norm() < 1e-12, "mode {i}");
        }
    }

    #[test]
    fn roundtrip_with_offset() {
        let g = Grid::with_offset(32, 3.0, 100.0).unwrap();
        let mut data: Vec<Complex64> = (0..32)
            .map(|j| Complex64::new((j as f64).cos(), (2.0 * j as f64).sin()))
            .collect();
        let original = data.clone();
        g.transform_forward(&mut data);
        g.transform_inverse(&mut data);
        for (a, b) in data.iter().zip(&original) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
