//! Scattering phase Θ, the angle map k, and the weight Ξ.
//!
//! Purpose
//! - Provide the analytic building blocks shared by the root solver, the
//!   continuum densities, and the Fourier identities:
//!   - Θ(x,y): the continuous antisymmetric phase with Θ(0,0)=0 defined by
//!     e^{−iΘ(x,y)} = e^{i(x−y)} (e^{−ix}+e^{iy}−2Δ)/(e^{ix}+e^{−iy}−2Δ);
//!   - its partial derivatives ∂₁Θ, ∂₂Θ (in closed form);
//!   - Ξ_μ(α) = sinh μ / (cosh μ − cos α);
//!   - the increasing odd bijection k of [−π,π] with
//!     e^{ik(α)} = (e^λ − e^{−iα})/(e^{λ−iα} − 1), k(±π) = ±π, k′ = Ξ_λ.
//!
//! Why this design
//! - For Δ < −1 both e^{ix}+e^{−iy}−2Δ and e^{−ix}+e^{iy}−2Δ have real part
//!   ≥ −2−2Δ > 0, so their ratio never touches the negative real axis and
//!   the principal argument picks the continuous branch globally — no
//!   unwinding state is needed. Θ is realized as (y−x) + arg(ratio), which
//!   is exactly the continuous branch normalized by Θ(0,0)=0.
//! - The limit Δ = −∞ (sentinel `f64::NEG_INFINITY`, [`crate::ModelParams::delta_infinity`])
//!   switches to the exact limit formulas Θ = y−x, ∂₁Θ = −1, ∂₂Θ = +1,
//!   k = id, Ξ_∞ = 1; the solver seeds its continuation there.
//!
//! Notes
//! - All functions are pure; angles are plain `f64` radians. The natural
//!   domain is [−π,π], but Θ and its derivatives evaluate correctly for any
//!   real arguments (the quasi-periodicity Θ(x+2π,y) = Θ(x,y) − 2π comes out
//!   of the same formula), which the counting function relies on.

use num_complex::Complex64;

/// An angle in radians; by convention in [−π, π] unless noted otherwise.
pub type Angle = f64;

#[inline]
fn expi(t: f64) -> Complex64 {
    Complex64::new(t.cos(), t.sin())
}

#[inline]
fn check_delta(delta: f64) {
    assert!(
        delta < -1.0,
        "Θ requires Δ < −1 (got {delta}); use the −∞ sentinel for the limit"
    );
}

/// The continuous antisymmetric phase Θ(x,y) with Θ(0,0) = 0.
///
/// `delta` must be < −1, or the −∞ sentinel for the limit branch Θ = y−x.
pub fn theta(delta: f64, x: Angle, y: Angle) -> f64 {
    if delta == f64::NEG_INFINITY {
        return y - x;
    }
    check_delta(delta);
    let num = expi(x) + expi(-y) - 2.0 * delta;
    let den = expi(-x) + expi(y) - 2.0 * delta;
    // Both factors have real part ≥ −2−2Δ > 0, so num/den stays in the cut
    // plane and the principal argument is the continuous branch.
    (y - x) + (num / den).arg()
}

/// ∂Θ/∂x in closed form: −1 + Re[e^{ix}/(e^{ix}+e^{−iy}−2Δ) + e^{−ix}/(e^{−ix}+e^{iy}−2Δ)].
pub fn d1_theta(delta: f64, x: Angle, y: Angle) -> f64 {
    if delta == f64::NEG_INFINITY {
        return -1.0;
    }
    check_delta(delta);
    let num = expi(x) + expi(-y) - 2.0 * delta;
    let den = expi(-x) + expi(y) - 2.0 * delta;
    -1.0 + (expi(x) / num + expi(-x) / den).re
}

/// ∂Θ/∂y in closed form: +1 − Re[e^{iy}/(e^{−ix}+e^{iy}−2Δ) + e^{−iy}/(e^{ix}+e^{−iy}−2Δ)].
pub fn d2_theta(delta: f64, x: Angle, y: Angle) -> f64 {
    if delta == f64::NEG_INFINITY {
        return 1.0;
    }
    check_delta(delta);
    let num = expi(x) + expi(-y) - 2.0 * delta;
    let den = expi(-x) + expi(y) - 2.0 * delta;
    1.0 - (expi(y) / den + expi(-y) / num).re
}

/// Ξ_μ(α) = sinh μ / (cosh μ − cos α), strictly positive and even in α.
///
/// `mu` must be > 0; `mu = ∞` returns the limit value 1.
pub fn xi(mu: f64, alpha: Angle) -> f64 {
    if mu == f64::INFINITY {
        return 1.0;
    }
    assert!(mu > 0.0, "Ξ_μ requires μ > 0 (got {mu})");
    mu.sinh() / (mu.cosh() - alpha.cos())
}

/// The increasing odd bijection k of [−π,π] with e^{ik(α)} = (e^λ−e^{−iα})/(e^{λ−iα}−1).
///
/// `lambda` must be > 0; `lambda = ∞` returns α (the identity limit).
/// The branch at the endpoints is fixed by k(±π) = ±π.
pub fn k_map(lambda: f64, alpha: Angle) -> Angle {
    if lambda == f64::INFINITY {
        return alpha;
    }
    assert!(lambda > 0.0, "k requires λ > 0 (got {lambda})");
    if (alpha.abs() - std::f64::consts::PI).abs() < 1e-12 {
        return alpha.signum() * std::f64::consts::PI;
    }
    let el = lambda.exp();
    let w = (el - expi(-alpha)) / (el * expi(-alpha) - 1.0);
    w.arg()
}

/// Inverse of [`k_map`]: e^{−iα} = (e^λ + e^{ix})/(e^λ e^{ix} + 1).
pub fn k_inverse(lambda: f64, x: Angle) -> Angle {
    if lambda == f64::INFINITY {
        return x;
    }
    assert!(lambda > 0.0, "k⁻¹ requires λ > 0 (got {lambda})");
    if (x.abs() - std::f64::consts::PI).abs() < 1e-12 {
        return x.signum() * std::f64::consts::PI;
    }
    let el = lambda.exp();
    let u = (el + expi(x)) / (el * expi(x) + 1.0);
    -u.arg()
}
