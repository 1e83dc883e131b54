//! Acceptance suite: one test per headline requirement of the laboratory,
//! each printing a single `[PASS]`/`[FAIL]` line with the measured worst
//! case. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria too.

use num_complex::Complex64;
use std::f64::consts::PI;
use vertexlab_core::params::params_from_q;
use vertexlab_core::{bethe, closedform, continuum, fkloop, icelab, xfermat};

/// Print the verdict line and fail the test if `ok` is false.
fn report(index: u32, ok: bool, label: &str, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("[{index:>2}] {verdict} {label}: {detail}");
    assert!(ok, "[{index}] {label}: {detail}");
}

#[test]
fn criterion_01_bethe_eigenvalue_matches_exact_diagonalization() {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for q in [5.0, 10.0] {
        let params = params_from_q(q).unwrap();
        for n_sites in [8u32, 12, 16] {
            for r in [0u32, 1, 2] {
                let n_up = n_sites / 2 - r;
                let block = xfermat::build_block(n_sites, n_up, params.c).unwrap();
                let pf = xfermat::pf_eigenvalue(&block).unwrap();
                let roots =
                    bethe::solve(n_sites, r, params.delta, 1e-12 * f64::from(n_sites)).unwrap();
                let lam = bethe::eigenvalue(&roots, &params).unwrap();
                worst = worst.max((lam / pf.value - 1.0).abs());
                cases += 1;
            }
        }
    }
    report(
        1,
        worst <= 1e-10,
        "Bethe eigenvalue vs exact block diagonalization",
        &format!("{cases} cases (N ≤ 16, r ≤ 2, q ∈ {{5,10}}), worst relative {worst:.2e}"),
    );
}

#[test]
fn criterion_02_bethe_eigenvector_residual() {
    let params = params_from_q(10.0).unwrap();
    let roots = bethe::solve(8, 0, params.delta, 8e-12).unwrap();
    let lam = bethe::eigenvalue(&roots, &params).unwrap();
    let psi = bethe::eigenvector(&roots, &params).unwrap();
    let block = xfermat::build_block(8, 4, params.c).unwrap();
    let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
    let mut vre = vec![0.0; re.len()];
    let mut vim = vec![0.0; im.len()];
    block.matvec(&re, &mut vre);
    block.matvec(&im, &mut vim);
    let residual = psi
        .iter()
        .zip(vre.iter().zip(&vim))
        .map(|(z, (wr, wi))| (Complex64::new(*wr, *wi) - lam * z).norm_sqr())
        .sum::<f64>()
        .sqrt();
    report(
        2,
        residual <= 1e-9,
        "transfer-block residual of the Bethe eigenvector",
        &format!("N=8, n=4, q=10: ‖Vψ − Λψ‖/‖ψ‖ = {residual:.2e}"),
    );
}

#[test]
fn criterion_03_trace_matches_brute_force_enumeration() {
    let mut worst: f64 = 0.0;
    for (n_cols, n_rows) in [(2u32, 2u32), (2, 4), (4, 2)] {
        for c in [2.2, 3.0, 5.0] {
            let z_enum = icelab::enumerate(n_cols, n_rows, c).unwrap().z;
            let z_trace =
                xfermat::trace_power(n_cols, n_rows, c, xfermat::TraceMode::Full).unwrap();
            worst = worst.max((z_trace / z_enum - 1.0).abs());
        }
    }
    report(
        3,
        worst <= 1e-12,
        "transfer-matrix trace vs arrow enumeration",
        &format!("9 torus/weight cases, worst relative {worst:.2e}"),
    );
}

#[test]
fn criterion_04_cluster_loop_arrow_correspondence() {
    let mut worst: f64 = 0.0;
    let mut inequalities = true;
    for (n_cols, n_rows) in [(2u32, 2u32), (2, 4)] {
        for q in [5.0, 10.0] {
            let params = params_from_q(q).unwrap();
            let rep = fkloop::correspondence_check(n_cols, n_rows, &params).unwrap();
            worst = worst.max(rep.rel_err_i);
            inequalities &= rep.ok_ii && rep.ok_iii_r1 && rep.ok_iii_r2;
        }
    }
    report(
        4,
        worst <= 1e-12 && inequalities,
        "cluster↔arrow partition-function correspondence",
        &format!(
            "equality worst relative {worst:.2e}; sector inequalities {}",
            if inequalities { "hold" } else { "VIOLATED" }
        ),
    );
}

#[test]
fn criterion_05_euler_relation_exhaustive() {
    // Construction asserts 2k = ℓ − o + 2s + NM/2 with exact integers;
    // reaching the count below means every configuration satisfied it.
    let mut configs = 0u32;
    for (n_cols, n_rows) in [(2u32, 2u32), (2, 4)] {
        let torus = fkloop::DiamondTorus::new(n_cols, n_rows, 0).unwrap();
        for mask in 0..(1u32 << torus.edge_count()) {
            let _ = fkloop::RcTorusConfig::from_mask(torus, mask);
            configs += 1;
        }
    }
    report(
        5,
        configs == 16 + 256,
        "Euler relation on every torus configuration",
        &format!("{configs} configurations checked exactly"),
    );
}

#[test]
fn criterion_06_free_energy_convergence() {
    let params = params_from_q(10.0).unwrap();
    let target = closedform::free_energy(&params, 1e-15).value;
    let errs: Vec<f64> = [64u32, 128, 256]
        .iter()
        .map(|&n| (bethe::free_energy_estimate(n, &params).unwrap() - target).abs())
        .collect();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    report(
        6,
        decreasing && errs[2] <= 1e-2,
        "row free energy converges to the closed form",
        &format!("q=10, |error| over N∈{{64,128,256}}: {:.1e}, {:.1e}, {:.1e}", errs[0], errs[1], errs[2]),
    );
}

#[test]
fn criterion_07_eigenvalue_ratio_gives_correlation_length() {
    let params = params_from_q(10.0).unwrap();
    let r_closed = closedform::inverse_corr_length(&params, 1e-13).value;
    let ratio1: Vec<f64> = [64u32, 128, 256, 512]
        .iter()
        .map(|&n| bethe::ratio_log(n, 1, &params).unwrap())
        .collect();
    let errs: Vec<f64> = ratio1.iter().map(|v| (v + r_closed).abs() / r_closed).collect();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let ratio2 = bethe::ratio_log(512, 2, &params).unwrap();
    let linearity = (ratio2 - 2.0 * ratio1[3]).abs() / (2.0 * ratio1[3]).abs();
    report(
        7,
        decreasing && errs[3] <= 0.02 && linearity <= 0.05,
        "sector gap approaches the inverse correlation length",
        &format!(
            "relative error over N∈{{64..512}}: {:.3}, {:.3}, {:.3}, {:.4}; r=2 linearity {:.4}",
            errs[0], errs[1], errs[2], errs[3], linearity
        ),
    );
}

#[test]
fn criterion_08_series_forms_and_small_gap_asymptotics() {
    let mut worst_gap: f64 = 0.0;
    for q in [4.5, 5.0, 10.0, 25.0] {
        let params = params_from_q(q).unwrap();
        let a = closedform::inverse_corr_length_by_method(
            &params,
            closedform::SeriesMethod::TanhSplit,
            1e-14,
        )
        .unwrap();
        let b = closedform::inverse_corr_length_by_method(
            &params,
            closedform::SeriesMethod::SinhSeries,
            1e-14,
        )
        .unwrap();
        worst_gap = worst_gap.max((a.value - b.value).abs());
    }
    let deviations: Vec<f64> = [4.1, 4.01, 4.001]
        .iter()
        .map(|&q| {
            let params = params_from_q(q).unwrap();
            let value = closedform::inverse_corr_length(&params, 1e-15).value;
            let asymptotic = 8.0 * (-PI * PI / (q - 4.0).sqrt()).exp();
            (value / asymptotic - 1.0).abs()
        })
        .collect();
    let monotone = deviations.windows(2).all(|w| w[1] < w[0]);
    report(
        8,
        worst_gap <= 1e-12 && monotone && deviations[2] <= 0.05,
        "dual series for the inverse correlation length",
        &format!(
            "forms agree to {worst_gap:.1e}; asymptotic-ratio deviation {:.3} → {:.3} → {:.3}",
            deviations[0], deviations[1], deviations[2]
        ),
    );
}

#[test]
fn criterion_09_continuum_residuals_and_fourier_laws() {
    let mut worst_residual: f64 = 0.0;
    let mut worst_fourier: f64 = 0.0;
    for q in [5.0, 10.0, 25.0] {
        let params = params_from_q(q).unwrap();
        worst_residual = worst_residual
            .max(continuum::sup_residual_cbe(&params, 2048))
            .max(continuum::sup_residual_coe(&params, 2048));
        for name in [
            continuum::FourierName::Xi,
            continuum::FourierName::R,
            continuum::FourierName::T,
            continuum::FourierName::Psi,
            continuum::FourierName::P,
        ] {
            for m in -16i32..=16 {
                let (numeric, closed) = continuum::fourier_check(name, &params, m);
                worst_fourier = worst_fourier.max((numeric - closed).norm());
            }
        }
    }
    report(
        9,
        worst_residual <= 1e-8 && worst_fourier <= 1e-8,
        "integral-equation residuals and Fourier identities",
        &format!(
            "sup residual {worst_residual:.2e} (grid 2048); worst Fourier gap {worst_fourier:.2e} (5 laws, |m| ≤ 16)"
        ),
    );
}

#[test]
fn criterion_10_density_distance_scales_like_one_over_n() {
    let params = params_from_q(10.0).unwrap();
    let mut worst_ratio: f64 = 0.0;
    for r in [0u32, 1] {
        let scaled: Vec<f64> = [32u32, 64, 128, 256]
            .iter()
            .map(|&n| {
                let roots = bethe::solve(n, r, params.delta, 1e-12 * f64::from(n)).unwrap();
                f64::from(n) * bethe::norm_distance(&roots, &params, 1024)
            })
            .collect();
        let ratio = scaled.iter().cloned().fold(f64::MIN, f64::max)
            / scaled.iter().cloned().fold(f64::MAX, f64::min);
        worst_ratio = worst_ratio.max(ratio);
    }
    report(
        10,
        worst_ratio <= 4.0,
        "root density approaches the continuum density at rate 1/N",
        &format!("max/min of N·distance over N∈{{32..256}}, r∈{{0,1}}: {worst_ratio:.3}"),
    );
}

#[test]
fn criterion_11_offset_function_converges_to_tau() {
    let params = params_from_q(10.0).unwrap();
    let mut all_decreasing = true;
    let mut summary = String::new();
    for r in [1u32, 2] {
        let sups: Vec<f64> = [64u32, 128, 256, 512]
            .iter()
            .map(|&n| bethe::offset_check(n, r, &params).unwrap())
            .collect();
        all_decreasing &= sups.windows(2).all(|w| w[1] < w[0]);
        summary.push_str(&format!(
            " r={r}: {:.3}→{:.3}→{:.3}→{:.3};",
            sups[0], sups[1], sups[2], sups[3]
        ));
    }
    report(
        11,
        all_decreasing,
        "inter-sector offset converges to the displacement function",
        &format!("sup|ρ·f − r·τ| over N∈{{64..512}}:{summary}"),
    );
}

#[test]
fn criterion_12_limit_block_eigenvalue_equals_closed_form() {
    let mut worst_eq: f64 = 0.0;
    let mut worst_bethe: f64 = 0.0;
    for (n_sites, r) in [(8u32, 1u32), (8, 2), (12, 1), (12, 2)] {
        let n_up = n_sites / 2 - r;
        let limit = xfermat::v_infinity_block(n_sites, n_up).unwrap();
        worst_eq = worst_eq.max((limit.lambda_max - limit.bound).abs() / limit.bound.max(1.0));
        let delta = -1.0e6;
        let roots = bethe::solve(n_sites, r, delta, 1e-12 * f64::from(n_sites)).unwrap();
        let params = vertexlab_core::params::params_from_c((2.0 - 2.0 * delta).sqrt()).unwrap();
        let log_scaled = bethe::log_eigenvalue(&roots, &params).unwrap()
            - f64::from(n_up) * (-2.0 * delta).ln();
        let scaled = log_scaled.exp();
        let target = bethe::limit_eigenvalue_scaled(n_sites, r);
        worst_bethe = worst_bethe.max((scaled / target - 1.0).abs());
    }
    report(
        12,
        worst_eq <= 1e-10 && worst_bethe <= 1e-4,
        "frozen-weight block eigenvalue equals its closed-form bound",
        &format!(
            "equality gap {worst_eq:.2e}; deep-anisotropy Bethe match {worst_bethe:.2e}"
        ),
    );
}

#[test]
fn criterion_13_spin_cluster_coupling_identity() {
    let graph = fkloop::grid_graph(2, 2);
    let beta = (1.0 + 3.0f64.sqrt()).ln();
    let rep = fkloop::potts_coupling_check(&graph, 3, beta, &[]).unwrap();
    report(
        13,
        rep.pairs.len() == 6 && rep.max_pair_err <= 1e-13,
        "spin agreement equals the cluster connectivity law",
        &format!(
            "2×2 grid, q=3, critical coupling: {} pairs, worst error {:.2e}",
            rep.pairs.len(),
            rep.max_pair_err
        ),
    );
}
