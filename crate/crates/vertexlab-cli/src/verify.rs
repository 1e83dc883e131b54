//! The `verify` subcommand: named invariant batteries over the library.
//!
//! Purpose
//! - Give each module a fast, scriptable pass/fail battery so a regression
//!   anywhere in the numeric stack surfaces as a one-line check failure.
//!
//! Why this design
//! - Every check is normalized to "measured value ≤ target + tol" so the
//!   report schema stays uniform across equalities (value = |error|,
//!   target = 0) and one-sided bounds (value = violation amount).
//! - Thresholds are the library's own contract tolerances; only the two
//!   integral-equation sup-residuals accept command-line overrides.
//!
//! Notes
//! - Batteries favor seconds-scale sizes; the heavyweight convergence runs
//!   live in the acceptance tests and the `convergence` subcommand.

use crate::{Check, Suite};
use anyhow::Result;
use serde_json::json;
use std::f64::consts::PI;
use vertexlab_core::params::params_from_q;
use vertexlab_core::quad::golden_angles;
use vertexlab_core::{bethe, closedform, continuum, fkloop, icelab, kernel, xfermat};

/// Run one battery (or all of them) and return the checks plus a summary.
pub fn run_suite(
    suite: Suite,
    tol_cbe: Option<f64>,
    tol_coe: Option<f64>,
) -> Result<(Vec<Check>, serde_json::Value)> {
    let mut checks = Vec::new();
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![
            Suite::Kernel,
            Suite::Continuum,
            Suite::Bethe,
            Suite::Xfer,
            Suite::Correspondence,
            Suite::Coupling,
            Suite::Closedform,
        ],
        single => vec![single],
    };
    for s in &suites {
        match s {
            Suite::Kernel => kernel_suite(&mut checks)?,
            Suite::Continuum => continuum_suite(&mut checks, tol_cbe, tol_coe)?,
            Suite::Bethe => bethe_suite(&mut checks)?,
            Suite::Xfer => xfer_suite(&mut checks)?,
            Suite::Correspondence => correspondence_suite(&mut checks)?,
            Suite::Coupling => coupling_suite(&mut checks)?,
            Suite::Closedform => closedform_suite(&mut checks)?,
            Suite::All => unreachable!(),
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let results = json!({
        "checks_run": checks.len(),
        "checks_failed": failed,
    });
    Ok((checks, results))
}

/// Scattering-kernel identities on a deterministic low-discrepancy sample.
fn kernel_suite(checks: &mut Vec<Check>) -> Result<()> {
    for q in [5.0, 10.0] {
        let params = params_from_q(q)?;
        let delta = params.delta;
        let lam = params.lambda;
        let sample = golden_angles(128);

        let mut antisym: f64 = 0.0;
        let mut footnote: f64 = 0.0;
        for (i, &a) in sample.iter().enumerate() {
            let b = sample[(i + 37) % sample.len()];
            let (x, y) = (kernel::k_map(lam, a), kernel::k_map(lam, b));
            antisym = antisym.max((kernel::theta(delta, x, y) + kernel::theta(delta, y, x)).abs());
            footnote = footnote.max(
                (kernel::xi(2.0 * lam, a - b)
                    + kernel::d1_theta(delta, x, y) * kernel::xi(lam, a))
                .abs(),
            );
        }
        let diagonal = sample
            .iter()
            .map(|&a| {
                let x = kernel::k_map(lam, a);
                (kernel::d1_theta(delta, x, x) + kernel::d2_theta(delta, x, x)).abs()
            })
            .fold(0.0f64, f64::max);
        let roundtrip = sample
            .iter()
            .map(|&a| (kernel::k_inverse(lam, kernel::k_map(lam, a)) - a).abs())
            .fold(0.0f64, f64::max);

        let tag = |name: &str| format!("{name}_q{q}");
        checks.push(Check::leq(tag("theta_antisymmetry"), antisym, 0.0, 1e-12));
        checks.push(Check::leq(tag("theta_origin"), kernel::theta(delta, 0.0, 0.0).abs(), 0.0, 0.0));
        checks.push(Check::leq(tag("theta_diagonal_derivative"), diagonal, 0.0, 1e-10));
        checks.push(Check::leq(tag("derivative_footnote_identity"), footnote, 0.0, 1e-10));
        checks.push(Check::leq(tag("chart_roundtrip"), roundtrip, 0.0, 1e-12));
    }
    Ok(())
}

/// Integral-equation residuals, Fourier laws, and the series identity.
fn continuum_suite(
    checks: &mut Vec<Check>,
    tol_cbe: Option<f64>,
    tol_coe: Option<f64>,
) -> Result<()> {
    let cbe_tol = tol_cbe.unwrap_or(1e-8);
    let coe_tol = tol_coe.unwrap_or(1e-8);
    for q in [5.0, 10.0] {
        let params = params_from_q(q)?;
        checks.push(Check::leq(
            format!("cBE_sup_residual_q{q}"),
            continuum::sup_residual_cbe(&params, 2048),
            0.0,
            cbe_tol,
        ));
        checks.push(Check::leq(
            format!("cOE_sup_residual_q{q}"),
            continuum::sup_residual_coe(&params, 2048),
            0.0,
            coe_tol,
        ));
    }
    let params = params_from_q(10.0)?;
    let mut fourier: f64 = 0.0;
    for name in [
        continuum::FourierName::Xi,
        continuum::FourierName::R,
        continuum::FourierName::T,
        continuum::FourierName::Psi,
        continuum::FourierName::P,
    ] {
        for m in -16i32..=16 {
            let (numeric, closed) = continuum::fourier_check(name, &params, m);
            fourier = fourier.max((numeric - closed).norm());
        }
    }
    checks.push(Check::leq("fourier_laws_q10", fourier, 0.0, 1e-8));
    let (lhs, rhs) = continuum::identity_hgg_check(params.lambda, 400);
    checks.push(Check::leq("series_identity_q10", (lhs - rhs).abs(), 0.0, 1e-12));
    let (parseval_numeric, parseval_closed) = continuum::parseval_check(&params);
    checks.push(Check::leq(
        "parseval_bookkeeping_q10",
        (parseval_numeric - parseval_closed).abs(),
        0.0,
        1e-8,
    ));
    Ok(())
}

/// Root-system battery: residuals, symmetry, separation, eigenvalue match.
fn bethe_suite(checks: &mut Vec<Check>) -> Result<()> {
    let params = params_from_q(10.0)?;
    for r in [0u32, 1] {
        let n_sites = 64u32;
        let roots = bethe::solve(n_sites, r, params.delta, 1e-12 * f64::from(n_sites))?;
        checks.push(Check::leq(
            format!("solver_residual_n64_r{r}"),
            roots.residual,
            0.0,
            1e-12 * f64::from(n_sites),
        ));
        let n = roots.n_roots();
        let antisym = (0..n)
            .map(|j| (roots.p[j] + roots.p[n - 1 - j]).abs())
            .fold(0.0f64, f64::max);
        checks.push(Check::leq(format!("antisymmetry_n64_r{r}"), antisym, 0.0, 0.0));
        let min_gap = roots
            .p
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::MAX, f64::min);
        // One-sided bound: violation of the π/N separation.
        checks.push(Check::leq(
            format!("root_separation_n64_r{r}"),
            (PI / f64::from(n_sites) - min_gap).max(0.0),
            0.0,
            0.0,
        ));
        let (margin, dominant) = bethe::jacobian_dominance(&roots);
        checks.push(Check::leq(
            format!("jacobian_dominance_n64_r{r}"),
            if dominant && margin > 0.0 { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
    }
    for r in [0u32, 1, 2] {
        let roots = bethe::solve(12, r, params.delta, 1.2e-11)?;
        let lam = bethe::eigenvalue(&roots, &params)?;
        let block = xfermat::build_block(12, 6 - r, params.c)?;
        let pf = xfermat::pf_eigenvalue(&block)?;
        checks.push(Check::leq(
            format!("eigenvalue_vs_block_n12_r{r}"),
            (lam / pf.value - 1.0).abs(),
            0.0,
            1e-10,
        ));
    }
    Ok(())
}

/// Transfer-matrix battery: traces, dominant eigenvalue, frozen limit.
fn xfer_suite(checks: &mut Vec<Check>) -> Result<()> {
    let params = params_from_q(10.0)?;
    for (n_cols, n_rows) in [(2u32, 4u32), (4, 2)] {
        let z_enum = icelab::enumerate(n_cols, n_rows, 3.0)?.z;
        let z_trace = xfermat::trace_power(n_cols, n_rows, 3.0, xfermat::TraceMode::Full)?;
        checks.push(Check::leq(
            format!("trace_vs_enumeration_{n_cols}x{n_rows}"),
            (z_trace / z_enum - 1.0).abs(),
            0.0,
            1e-12,
        ));
    }
    let full = xfermat::trace_power(2, 4, 3.0, xfermat::TraceMode::Full)?;
    let balanced = xfermat::trace_power(2, 4, 3.0, xfermat::TraceMode::Balanced)?;
    checks.push(Check::leq(
        "balanced_trace_below_full_2x4",
        (balanced - full).max(0.0),
        0.0,
        0.0,
    ));
    let block = xfermat::build_block(8, 4, params.c)?;
    let pf = xfermat::pf_eigenvalue(&block)?;
    checks.push(Check::leq(
        "power_iteration_residual_8_4",
        pf.residual,
        0.0,
        1e-12 * pf.value,
    ));
    let limit = xfermat::v_infinity_block(8, 3)?;
    checks.push(Check::leq(
        "limit_block_equality_8_1",
        (limit.lambda_max - limit.bound).abs(),
        0.0,
        1e-10,
    ));
    Ok(())
}

/// Exhaustive cluster↔arrow correspondence on both oracle tori.
fn correspondence_suite(checks: &mut Vec<Check>) -> Result<()> {
    for (n_cols, n_rows) in [(2u32, 2u32), (2, 4)] {
        for q in [4.5, 5.0, 10.0] {
            let params = params_from_q(q)?;
            let rep = fkloop::correspondence_check(n_cols, n_rows, &params)?;
            let tag = format!("{n_cols}x{n_rows}_q{q}");
            checks.push(Check::leq(
                format!("partition_identity_{tag}"),
                rep.rel_err_i,
                0.0,
                1e-12,
            ));
            checks.push(Check::leq(
                format!("sector_inequalities_{tag}"),
                if rep.ok_ii && rep.ok_iii_r1 && rep.ok_iii_r2 { 0.0 } else { 1.0 },
                0.0,
                0.0,
            ));
            checks.push(Check::leq(
                format!("weight_forms_{tag}"),
                rep.weight_form_err,
                0.0,
                1e-13,
            ));
            checks.push(Check::leq(
                format!("orientation_resummation_{tag}"),
                rep.resummation_err,
                0.0,
                1e-12,
            ));
        }
    }
    Ok(())
}

/// Spin↔cluster coupling identities by exact enumeration.
fn coupling_suite(checks: &mut Vec<Check>) -> Result<()> {
    let single = fkloop::SmallGraph {
        n_vertices: 2,
        edges: vec![(0, 1)],
    };
    let rep = fkloop::potts_coupling_check(&single, 2, 2.0f64.ln(), &[])?;
    checks.push(Check::leq(
        "single_edge_q2",
        rep.max_pair_err.max((rep.pairs[0].connect_prob - 1.0 / 3.0).abs()),
        0.0,
        1e-14,
    ));
    let grid = fkloop::grid_graph(2, 2);
    let beta_crit = (1.0 + 3.0f64.sqrt()).ln();
    let rep = fkloop::potts_coupling_check(&grid, 3, beta_crit, &[0, 1])?;
    checks.push(Check::leq("grid2x2_q3_pairs", rep.max_pair_err, 0.0, 1e-13));
    checks.push(Check::leq("grid2x2_q3_wired", rep.max_wired_err, 0.0, 1e-13));
    checks.push(Check::leq(
        "weight_form_equivalence",
        rep.weight_form_gap,
        0.0,
        1e-12,
    ));
    let rep = fkloop::potts_coupling_check(&grid, 4, 0.0, &[])?;
    checks.push(Check::leq(
        "infinite_temperature_q4",
        rep.max_pair_err,
        0.0,
        1e-14,
    ));
    Ok(())
}

/// Closed-form constants: dual series, monotonicity, q↓4 asymptotics.
fn closedform_suite(checks: &mut Vec<Check>) -> Result<()> {
    let mut dual_gap: f64 = 0.0;
    for q in [4.8, 5.5, 7.0] {
        let params = params_from_q(q)?;
        let a = closedform::inverse_corr_length_by_method(
            &params,
            closedform::SeriesMethod::TanhSplit,
            1e-14,
        )?;
        let b = closedform::inverse_corr_length_by_method(
            &params,
            closedform::SeriesMethod::SinhSeries,
            1e-14,
        )?;
        dual_gap = dual_gap.max((a.value - b.value).abs());
    }
    checks.push(Check::leq("dual_series_agreement", dual_gap, 0.0, 1e-12));

    let ladder = [4.5, 5.0, 6.0, 8.0, 10.0, 20.0];
    let values: Vec<f64> = ladder
        .iter()
        .map(|&q| Ok(closedform::inverse_corr_length(&params_from_q(q)?, 1e-13).value))
        .collect::<Result<_>>()?;
    let monotone_violation = values
        .windows(2)
        .map(|w| (w[0] - w[1]).max(0.0))
        .fold(0.0f64, f64::max);
    checks.push(Check::leq(
        "monotone_in_q",
        monotone_violation,
        0.0,
        0.0,
    ));
    let positive_violation = values.iter().cloned().fold(f64::MAX, f64::min).min(0.0).abs();
    checks.push(Check::leq("positivity", positive_violation, 0.0, 0.0));

    let log_r = closedform::inverse_corr_length_log(&params_from_q(4.0 + 1e-8)?);
    checks.push(Check::leq(
        "log_route_finite_near_4",
        if log_r.is_finite() { 0.0 } else { 1.0 },
        0.0,
        0.0,
    ));

    let params = params_from_q(4.001)?;
    let asymptotic = 8.0 * (-PI * PI / (0.001f64).sqrt()).exp();
    let ratio = closedform::inverse_corr_length(&params, 1e-15).value / asymptotic;
    checks.push(Check::leq(
        "asymptotic_ratio_near_4",
        (ratio - 1.0).abs(),
        0.0,
        0.05,
    ));

    let params = params_from_q(10.0)?;
    let fe = closedform::free_energy(&params, 1e-15);
    checks.push(Check::leq("free_energy_tail", fe.tail_bound, 0.0, 1e-15));
    let estimate = bethe::free_energy_estimate(128, &params)?;
    checks.push(Check::leq(
        "free_energy_vs_row_estimate_n128",
        (fe.value - estimate).abs(),
        0.0,
        1e-4,
    ));
    Ok(())
}
