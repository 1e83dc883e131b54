//! Closed-form constants: free energy and inverse correlation length.
//!
//! Purpose
//! - Evaluate the model's closed-form constants with explicit tail bounds:
//!   - free energy  f = λ/2 + Σ_{k≥1} e^{−kλ} tanh(kλ)/k;
//!   - inverse correlation length (diagonal direction)
//!     R = λ + 2 Σ_{k≥1} (−1)^k tanh(kλ)/k,
//!     in two independent series forms, and its q↓4 asymptotics
//!     R ∼ 8 exp(−π²/√(q−4)).
//!
//! Why this design
//! - R's defining alternating series converges too slowly to be summed
//!   directly. Two exact resummations exist with complementary ranges:
//!   - tanh-split:  R = λ − 2 log 2 − 4 Σ_k (−1)^k / (k(e^{2kλ}+1)),
//!     converging like e^{−2kλ} (fast for large λ);
//!   - sinh series: R = Σ_{m≥0} 4 / ((2m+1) sinh(π²(2m+1)/(2λ))),
//!     converging like e^{−π²m/λ} (fast for small λ).
//! - The crossover λ = π/2 balances the exponents; both forms are kept and
//!   must agree to 1e−12 across the overlap band λ ∈ [π/4, π].
//! - Extremely close to q = 4 the value itself (∼ e^{−π²/√(q−4)}) underflows
//!   a double. Instead of extended precision, [`inverse_corr_length_log`]
//!   evaluates log R exactly in log space
//!   (log sinh a = a − log 2 + log1p(−e^{−2a})), which stays finite for every
//!   q > 4 representable in f64 and certifies positivity.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

/// Which evaluation route produced a [`SeriesValue`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMethod {
    /// λ − 2log2 − 4Σ(−1)^k/(k(e^{2kλ}+1)).
    TanhSplit,
    /// Σ 4/((2m+1) sinh(π²(2m+1)/(2λ))).
    SinhSeries,
    /// Direct exponentially convergent sum (used by the free energy).
    Direct,
}

/// A series evaluation with its truncation evidence.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeriesValue {
    /// The evaluated sum.
    pub value: f64,
    /// Number of terms summed.
    pub terms_used: usize,
    /// Rigorous bound on the discarded tail.
    pub tail_bound: f64,
    /// Evaluation route.
    pub method: SeriesMethod,
}

/// Free energy f = λ/2 + Σ_{k≥1} e^{−kλ} tanh(kλ)/k, truncated once the
/// geometric tail bound e^{−(K+1)λ}/((K+1)(1−e^{−λ})) drops below `tol`.
pub fn free_energy(params: &ModelParams, tol: f64) -> SeriesValue {
    assert!(tol > 0.0);
    let lam = params.lambda;
    let mut value = lam / 2.0;
    let mut terms_used = 0;
    let mut tail_bound = f64::INFINITY;
    let geo = 1.0 - (-lam).exp();
    for k in 1..=100_000usize {
        let kk = k as f64;
        value += (-kk * lam).exp() * (kk * lam).tanh() / kk;
        terms_used = k;
        let next = kk + 1.0;
        tail_bound = (-next * lam).exp() / (next * geo);
        if tail_bound < tol {
            break;
        }
    }
    SeriesValue {
        value,
        terms_used,
        tail_bound,
        method: SeriesMethod::Direct,
    }
}

/// The tanh-split form of R; converges like e^{−2kλ}.
pub(crate) fn corr_tanh_split(lambda: f64, tol: f64) -> SeriesValue {
    let mut value = lambda - 2.0 * LN_2;
    let mut terms_used = 0;
    let mut tail_bound = f64::INFINITY;
    let geo = 1.0 - (-2.0 * lambda).exp();
    for k in 1..=200_000usize {
        let kk = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        value -= 4.0 * sign / (kk * ((2.0 * kk * lambda).exp() + 1.0));
        terms_used = k;
        let next = kk + 1.0;
        tail_bound = 4.0 * (-2.0 * next * lambda).exp() / (next * geo);
        if tail_bound < tol {
            break;
        }
    }
    SeriesValue {
        value,
        terms_used,
        tail_bound,
        method: SeriesMethod::TanhSplit,
    }
}

/// The sinh-series form of R; converges like e^{−π²m/λ}.
pub(crate) fn corr_sinh_series(lambda: f64, tol: f64) -> SeriesValue {
    let mut value = 0.0;
    let mut terms_used = 0;
    let mut tail_bound = f64::INFINITY;
    let geo = 1.0 - (-PI * PI / lambda).exp();
    for m in 0..=100_000usize {
        let odd = 2.0 * (m as f64) + 1.0;
        let arg = PI * PI * odd / (2.0 * lambda);
        // sinh overflows past arg ≈ 710; those terms are exact zeros in f64.
        let term = 4.0 / (odd * arg.sinh());
        if term.is_finite() {
            value += term;
        }
        terms_used = m + 1;
        let next_arg = arg + PI * PI / lambda;
        tail_bound = 8.0 * (-next_arg).exp() / ((odd + 2.0) * geo);
        if tail_bound < tol {
            break;
        }
    }
    SeriesValue {
        value,
        terms_used,
        tail_bound,
        method: SeriesMethod::SinhSeries,
    }
}

/// Inverse correlation length R(q), choosing the series by regime:
/// tanh-split for λ ≥ π/2, sinh series otherwise. Strictly positive for
/// every q > 4 (see [`inverse_corr_length_log`] when the value underflows).
pub fn inverse_corr_length(params: &ModelParams, tol: f64) -> SeriesValue {
    assert!(tol > 0.0);
    let lam = params.lambda;
    if lam >= PI / 2.0 {
        corr_tanh_split(lam, tol)
    } else {
        corr_sinh_series(lam, tol)
    }
}

/// Evaluate R(q) by a forced series route (cross-validation and the CLI's
/// `--series` switch). The two routes must agree on every q > 4; the
/// regime split in [`inverse_corr_length`] is purely about convergence
/// speed.
pub fn inverse_corr_length_by_method(
    params: &ModelParams,
    method: SeriesMethod,
    tol: f64,
) -> Result<SeriesValue> {
    assert!(tol > 0.0);
    match method {
        SeriesMethod::TanhSplit => Ok(corr_tanh_split(params.lambda, tol)),
        SeriesMethod::SinhSeries => Ok(corr_sinh_series(params.lambda, tol)),
        SeriesMethod::Direct => Err(Error::InvalidParameter(
            "direct summation is the free-energy route; choose tanh_split or sinh_series"
                .to_string(),
        )),
    }
}

/// log sinh a for a > 0 without overflow: a − log 2 + log1p(−e^{−2a}).
fn log_sinh(a: f64) -> f64 {
    a - LN_2 + (-(-2.0 * a).exp()).ln_1p()
}

/// log R(q), finite for every representable q > 4.
///
/// For λ < π/2 the sinh series is accumulated in log space: the first term
/// dominates and the rest enter through log1p of the term ratios, so the
/// result stays finite even when R itself is far below the double-precision
/// underflow threshold (q extremely close to 4).
pub fn inverse_corr_length_log(params: &ModelParams) -> f64 {
    let lam = params.lambda;
    if lam >= PI / 2.0 {
        return corr_tanh_split(lam, 1e-16).value.ln();
    }
    let a0 = PI * PI / (2.0 * lam);
    let log_first = (4.0_f64).ln() - log_sinh(a0);
    let mut rest = 0.0;
    for m in 1..=200usize {
        let odd = 2.0 * (m as f64) + 1.0;
        let am = PI * PI * odd / (2.0 * lam);
        let ratio = (log_sinh(a0) - log_sinh(am)).exp() / odd;
        rest += ratio;
        if ratio < 1e-18 {
            break;
        }
    }
    log_first + rest.ln_1p()
}

/// Correlation length ξ(q) = 1/R(q), evaluated at tolerance 1e−13.
///
/// Errors if R underflowed to zero in double precision (q indistinguishably
/// close to 4); use [`inverse_corr_length_log`] there.
pub fn xi(params: &ModelParams) -> Result<f64> {
    let r = inverse_corr_length(params, 1e-13);
    if r.value <= 0.0 {
        return Err(Error::Degenerate(format!(
            "inverse correlation length underflowed (log value {})",
            inverse_corr_length_log(params)
        )));
    }
    Ok(1.0 / r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::{fourier_check, FourierName};
    use crate::params::params_from_q;

    #[test]
    fn test_free_energy_frozen_value_q10() {
        let p = params_from_q(10.0).unwrap();
        let f = free_energy(&p, 1e-15);
        assert!(
            (f.value - 0.874_114_811_907_303).abs() < 1e-14,
            "f(q=10) = {}",
            f.value
        );
        assert!(f.tail_bound < 1e-15);
        assert_eq!(f.method, SeriesMethod::Direct);
    }

    #[test]
    fn test_free_energy_term_budget_and_large_q() {
        let p = params_from_q(5.0).unwrap();
        let f = free_energy(&p, 1e-15);
        let budget = (35.0 / p.lambda).ceil() as usize + 1;
        assert!(f.terms_used <= budget, "{} > {budget}", f.terms_used);
        // Large λ: the first term dominates f − λ/2.
        let big = params_from_q(1e4).unwrap();
        let f = free_energy(&big, 1e-15);
        let first = (-big.lambda).exp() * big.lambda.tanh();
        assert!(((f.value - big.lambda / 2.0) / first - 1.0).abs() < 0.01);
    }

    #[test]
    fn test_inverse_corr_length_frozen_value_q10() {
        let p = params_from_q(10.0).unwrap();
        let r = inverse_corr_length(&p, 1e-14);
        assert!(
            (r.value - 0.066_967_044_519_995).abs() < 1e-12,
            "R(q=10) = {}",
            r.value
        );
        // λ(10) ≈ 1.03 < π/2, so the sinh series is the chosen regime.
        assert_eq!(r.method, SeriesMethod::SinhSeries);
        assert!(r.value > 0.0);
    }

    #[test]
    fn test_dual_series_agree_in_overlap_band() {
        // Both forms must agree to 1e−12 wherever both converge decently:
        // the mandated band λ ∈ [π/4, π] plus the named q samples.
        for q in [4.8, 5.5, 7.0, 10.0, 25.0] {
            let lam = params_from_q(q).unwrap().lambda;
            let a = corr_tanh_split(lam, 1e-15).value;
            let b = corr_sinh_series(lam, 1e-15).value;
            assert!((a - b).abs() < 1e-12, "q={q}: tanh {a} vs sinh {b}");
        }
        for lam in [PI / 4.0, 0.9, 1.3, 2.0, PI] {
            let a = corr_tanh_split(lam, 1e-15).value;
            let b = corr_sinh_series(lam, 1e-15).value;
            assert!((a - b).abs() < 1e-12, "λ={lam}: tanh {a} vs sinh {b}");
        }
    }

    #[test]
    fn test_asymptotics_approaching_q4() {
        // R/(8 exp(−π²/√(q−4))) → 1 monotonically from below along q ↓ 4.
        let mut prev = 0.0;
        for q in [4.1, 4.01, 4.001] {
            let p = params_from_q(q).unwrap();
            let r = inverse_corr_length(&p, 1e-15).value;
            let ratio = r / (8.0 * (-PI * PI / (q - 4.0_f64).sqrt()).exp());
            assert!(ratio > prev, "not monotone at q={q}: {ratio} ≤ {prev}");
            prev = ratio;
        }
        assert!((0.95..=1.05).contains(&prev), "ratio at q=4.001: {prev}");
    }

    #[test]
    fn test_monotone_in_q_and_positivity_via_log() {
        let ladder = [4.5, 5.0, 6.0, 8.0, 10.0, 20.0];
        let mut prev = 0.0;
        for q in ladder {
            let r = inverse_corr_length(&params_from_q(q).unwrap(), 1e-14).value;
            assert!(r > prev, "R not increasing at q={q}");
            prev = r;
        }
        // Far below double underflow for the value itself, the log form
        // stays finite and consistent where both are representable.
        for q in [4.0 + 1e-8, 4.0 + 1e-4, 4.001, 5.0] {
            let p = params_from_q(q).unwrap();
            let lr = inverse_corr_length_log(&p);
            assert!(lr.is_finite(), "log R not finite at q={q}");
            let r = inverse_corr_length(&p, 1e-15).value;
            if r > 0.0 {
                assert!((lr.exp() / r - 1.0).abs() < 1e-12, "q={q}: {} vs {r}", lr.exp());
            }
        }
        // Spot check the extreme: log R ≈ log 8 − π²/√(q−4) at q = 4+1e−8.
        let p = params_from_q(4.0 + 1e-8).unwrap();
        let lr = inverse_corr_length_log(&p);
        let approx = (8.0_f64).ln() - PI * PI / 1e-4;
        assert!((lr / approx - 1.0).abs() < 1e-3, "{lr} vs {approx}");
    }

    #[test]
    fn test_xi_reciprocal_and_monotone() {
        let p = params_from_q(10.0).unwrap();
        let x = xi(&p).unwrap();
        assert!(x > 0.0);
        assert!((x * inverse_corr_length(&p, 1e-13).value - 1.0).abs() < 1e-14);
        let mut prev = f64::INFINITY;
        for q in [10.0, 100.0, 1000.0] {
            let v = xi(&params_from_q(q).unwrap()).unwrap();
            assert!(v < prev, "ξ must decrease with q");
            prev = v;
        }
        // q ↓ 4: ξ grows like exp(π²/√(q−4))/8.
        let p = params_from_q(4.001).unwrap();
        let v = xi(&p).unwrap();
        let want = (PI * PI / (0.001_f64).sqrt()).exp() / 8.0;
        assert!((v / want - 1.0).abs() < 0.05, "{v} vs {want}");
    }

    #[test]
    fn test_free_energy_equals_parseval_pairing_of_fourier_coefficients() {
        // Σ_m P̂(m)R̂(−m) with *numeric* quadrature coefficients must equal
        // the free-energy series: a genuine cross-module consistency check.
        for q in [5.0, 10.0] {
            let p = params_from_q(q).unwrap();
            let mut f_fourier = {
                let (p0, _) = fourier_check(FourierName::P, &p, 0);
                let (r0, _) = fourier_check(FourierName::R, &p, 0);
                p0.re * r0.re
            };
            for m in 1..=60 {
                let (pm, _) = fourier_check(FourierName::P, &p, m);
                let (rm, _) = fourier_check(FourierName::R, &p, m);
                f_fourier += 2.0 * pm.re * rm.re;
            }
            let f = free_energy(&p, 1e-15).value;
            assert!(
                (f_fourier - f).abs() < 1e-12,
                "q={q}: Parseval {f_fourier} vs series {f}"
            );
        }
    }

    #[test]
    fn test_corr_length_rebuilt_from_numeric_t_coefficients() {
        // R = λ − 2log2 − 4Σ(−1)^m/(m(e^{2λm}+1)) where each 1/(e^{2λm}+1)
        // is reconstructed as (1 − tanh λm)/2 from the *numeric* T̂(m).
        for q in [5.0, 10.0] {
            let p = params_from_q(q).unwrap();
            let mut r_fourier = p.lambda - 2.0 * LN_2;
            for m in 1..=60i32 {
                let (tm, _) = fourier_check(FourierName::T, &p, m);
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let tanh_m = -sign * f64::from(m) * tm.im;
                r_fourier -= 4.0 * sign * (1.0 - tanh_m) / (2.0 * f64::from(m));
            }
            let r = inverse_corr_length(&p, 1e-15).value;
            assert!(
                (r_fourier - r).abs() < 1e-12,
                "q={q}: Fourier route {r_fourier} vs series {r}"
            );
        }
    }
}
