//! Quadrature rules and deterministic sample grids.
//!
//! Purpose
//! - Periodic trapezoid rule on [−π,π) (spectrally accurate for smooth
//!   periodic integrands) and the matching numeric Fourier coefficients.
//! - Tanh-sinh (double-exponential) quadrature for integrands with an
//!   integrable endpoint singularity (used for the logarithmically singular
//!   Parseval integrand).
//! - A golden-ratio low-discrepancy angle sequence used wherever tests need
//!   "random-looking" sample points without introducing an RNG: the whole
//!   crate is deterministic by design.
//!
//! Notes
//! - All reductions run in a fixed left-to-right order so results are
//!   independent of threading and bit-reproducible.

use num_complex::Complex64;
use std::f64::consts::PI;

/// The `g` equispaced nodes −π + 2πj/g, j = 0..g (left endpoints; the node
/// +π is identified with −π by periodicity).
pub fn periodic_nodes(g: usize) -> Vec<f64> {
    (0..g)
        .map(|j| -PI + 2.0 * PI * (j as f64) / (g as f64))
        .collect()
}

/// Periodic trapezoid rule: (2π/g) Σ_j f(x_j) over the nodes of
/// [`periodic_nodes`]. Exact to spectral accuracy for smooth 2π-periodic f.
pub fn trapezoid_periodic<F: Fn(f64) -> f64>(g: usize, f: F) -> f64 {
    let h = 2.0 * PI / (g as f64);
    let mut s = 0.0;
    for j in 0..g {
        s += f(-PI + h * (j as f64));
    }
    s * h
}

/// Numeric Fourier coefficient f̂(m) = (1/2π)∫ f(α) e^{−imα} dα by the
/// periodic trapezoid rule on `g` nodes.
pub fn fourier_coeff_periodic<F: Fn(f64) -> f64>(g: usize, m: i32, f: F) -> Complex64 {
    let h = 2.0 * PI / (g as f64);
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..g {
        let a = -PI + h * (j as f64);
        let phase = -(f64::from(m)) * a;
        s += f(a) * Complex64::new(phase.cos(), phase.sin());
    }
    s / (g as f64)
}

/// Tanh-sinh quadrature of ∫_a^b f, robust to integrable endpoint
/// singularities (e.g. logarithmic). Halves the step until two consecutive
/// levels agree to `tol` (relative to the magnitude of the result) or
/// `max_levels` is reached.
pub fn tanh_sinh<F: Fn(f64) -> f64>(a: f64, b: f64, tol: f64, max_levels: usize, f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // Clip |t| where the double-exponential weight underflows.
    let t_max = 3.8_f64;
    let eval = |t: f64| -> f64 {
        let s = (0.5 * PI * t.sinh()).tanh();
        let w = (0.5 * PI * t.cosh()) / (0.5 * PI * t.sinh()).cosh().powi(2);
        let x = mid + half * s;
        // Guard against x rounding onto an endpoint where f may blow up.
        if x <= a || x >= b || !w.is_finite() {
            return 0.0;
        }
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = (k as f64) * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut result = sum * h * half;
    for _ in 0..max_levels {
        h *= 0.5;
        // Add the new odd-index nodes of the refined grid.
        let mut j = 1;
        while (j as f64) * h <= t_max {
            let t = (j as f64) * h;
            sum += eval(t) + eval(-t);
            j += 2;
        }
        let refined = sum * h * half;
        let done = (refined - result).abs() <= tol * refined.abs().max(1e-300);
        result = refined;
        if done {
            break;
        }
    }
    result
}

/// `count` deterministic angles −π + 2π·frac(j·φ̄), j = 1..=count, with
/// φ̄ = 1/golden-ratio. Low-discrepancy stand-in for random sample points.
pub fn golden_angles(count: usize) -> Vec<f64> {
    const PHI_BAR: f64 = 0.618_033_988_749_894_9;
    (1..=count)
        .map(|j| {
            let frac = ((j as f64) * PHI_BAR).fract();
            -PI + 2.0 * PI * frac
        })
        .collect()
}
