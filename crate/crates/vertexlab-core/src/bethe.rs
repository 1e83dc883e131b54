//! Discrete Bethe system: symmetric root solver, eigenvalues, diagnostics.
//!
//! Purpose
//! - Solve the coupled root equations N·p_j = 2π I_j − Σ_k Θ(p_j, p_k) with
//!   the symmetric index choice I_j = j − (n+1)/2, n = N/2 − r roots, and
//!   derive everything the root set certifies: transfer-matrix eigenvalues
//!   (with eigenvectors at small n), the step density built on the roots and
//!   its distance to the continuum density, diagonal-dominance evidence for
//!   the linearized system, eigenvalue ratios between sectors, and the
//!   offset diagnostics comparing shifted sectors to the offset density τ.
//!
//! Why this design
//! - The fixed-point map p ↦ (2πI − ΣΘ)/N is provably contractive only for
//!   very negative anisotropy, so the solver is a hybrid: damped fixed-point
//!   steps to enter the basin, then Newton with the analytic Jacobian (the
//!   same matrix whose diagonal dominance is reported separately). If the
//!   direct attempt fails, the solver falls back to continuation in Δ along
//!   a geometric ladder from −50 to the target, warm-starting each stage.
//! - Symmetry p_{n+1−j} = −p_j is enforced by construction: every iterate is
//!   antisymmetrized, Newton acts only on the ⌊n/2⌋ free coordinates, and an
//!   odd-n central root is pinned to exactly 0. This halves the system and
//!   makes the symmetric-sector invariants exact rather than approximate.
//! - Eigenvalue products are accumulated as complex log-sums: the plain
//!   products overflow doubles near N ≈ 700, and the sector-ratio and
//!   free-energy estimates only ever need logs anyway.
//!
//! Notes
//! - The residual is the unnormalized max_j |N p_j − 2π I_j + Σ Θ(p_j,p_k)|;
//!   tolerances scale with N.
//! - The anisotropy −∞ sentinel flows through the kernels: the seed
//!   p_j = 2π I_j/(N−n) is then already the exact solution.

// Guards below are written `if !(x <= tol)` on purpose: comparisons with NaN
// are false, so the negated form routes NaN into the failure branch, while
// the "equivalent" `x > tol` would silently accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use crate::error::{Error, Result};
use crate::kernel::{d1_theta, d2_theta, k_inverse, theta, xi, Angle};
use crate::params::{decimal17, ModelParams};
use crate::xfermat::{binomial, ArrowState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

/// A solved symmetric root configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct BetheRoots {
    /// Sites per row N (even).
    pub n_sites: u32,
    /// Sector offset r ≥ 0; the configuration has n = N/2 − r roots.
    pub r: u32,
    /// Anisotropy Δ < −1, or −∞ (sentinel).
    pub delta: f64,
    /// Roots, strictly increasing in (−π, π), exactly antisymmetric.
    pub p: Vec<f64>,
    /// max_j |N p_j − 2π I_j + Σ_k Θ(p_j, p_k)| at the returned roots.
    pub residual: f64,
    /// Iterations consumed across all continuation stages.
    pub iterations: usize,
}

impl BetheRoots {
    /// Number of roots n = N/2 − r.
    pub fn n_roots(&self) -> usize {
        self.p.len()
    }

    /// The symmetric index choice I_j = j − (n+1)/2 (1-based j), ascending.
    pub fn indices(&self) -> Vec<f64> {
        symmetric_indices(self.p.len())
    }

    /// Check the membership invariants: strict increase inside (−π, π),
    /// exact antisymmetry, and residual ≤ tol.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.p.len();
        for j in 0..n {
            if !(self.p[j] > -PI && self.p[j] < PI) {
                return Err(Error::Degenerate(format!(
                    "root {} = {} outside (−π, π)",
                    j, self.p[j]
                )));
            }
            if j + 1 < n && self.p[j] >= self.p[j + 1] {
                return Err(Error::Degenerate(format!(
                    "roots not strictly increasing at {j}"
                )));
            }
            if self.p[j] != -self.p[n - 1 - j] {
                return Err(Error::Degenerate(format!("root {j} breaks antisymmetry")));
            }
        }
        if !(self.residual <= tol) {
            return Err(Error::NoConvergence {
                residual: self.residual,
                iterations: self.iterations,
            });
        }
        Ok(())
    }
}

fn symmetric_indices(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 - (n as f64 - 1.0) / 2.0).collect()
}

/// max_j |N p_j − 2π I_j + Σ_k Θ(p_j, p_k)|.
fn system_residual(n_sites: f64, delta: f64, idx: &[f64], p: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (j, &pj) in p.iter().enumerate() {
        let s: f64 = p.iter().map(|&pk| theta(delta, pj, pk)).sum();
        worst = worst.max((n_sites * pj - 2.0 * PI * idx[j] + s).abs());
    }
    worst
}

/// One full fixed-point image T(p)_j = (2π I_j − Σ_k Θ(p_j, p_k))/N.
fn fixed_point_image(n_sites: f64, delta: f64, idx: &[f64], p: &[f64], out: &mut [f64]) {
    for (j, &pj) in p.iter().enumerate() {
        let s: f64 = p.iter().map(|&pk| theta(delta, pj, pk)).sum();
        out[j] = (2.0 * PI * idx[j] - s) / n_sites;
    }
}

/// Exact antisymmetrization p_j ← (p_j − p_{n−1−j})/2; pins an odd-n
/// central root to exactly 0.
fn antisymmetrize(p: &mut [f64]) {
    let n = p.len();
    for j in 0..n.div_ceil(2) {
        let v = (p[j] - p[n - 1 - j]) / 2.0;
        p[j] = v;
        p[n - 1 - j] = -v;
    }
}

/// The reduced Newton matrix on the ⌊n/2⌋ free coordinates: the derivative
/// of G_j = (N p_j − 2π I_j + Σ_k Θ(p_j,p_k))/N after eliminating the
/// mirrored half via p_{n−1−k} = −p_k. Also the matrix whose diagonal
/// dominance is reported by [`jacobian_dominance`].
fn reduced_jacobian(n_sites: f64, delta: f64, p: &[f64]) -> DMatrix<f64> {
    let n = p.len();
    let h = n / 2;
    let mut a = DMatrix::zeros(h, h);
    for j in 0..h {
        // Diagonal term: 1 + (1/N) Σ_ℓ ∂₁Θ(p_j, p_ℓ) — the ℓ = j entry is
        // cancelled in the residual derivative by ∂₂Θ(p_j,p_j), which the
        // column sweep below adds back with opposite sign.
        let d1_sum: f64 = p.iter().map(|&pl| d1_theta(delta, p[j], pl)).sum();
        for k in 0..h {
            let direct = d2_theta(delta, p[j], p[k]);
            let mirrored = d2_theta(delta, p[j], p[n - 1 - k]);
            a[(j, k)] = (direct - mirrored) / n_sites;
            if j == k {
                a[(j, k)] += 1.0 + d1_sum / n_sites;
            }
        }
    }
    a
}

const FP_MAX_ITER: usize = 2_000;
const NEWTON_MAX_ITER: usize = 60;

/// Damped fixed-point then Newton, refining `p` in place. Returns
/// (residual, iterations spent). The fixed-point phase switches to Newton
/// once the residual drops under 1e−3·max(1, N/64); Newton is also tried as
/// a last resort if the fixed-point budget runs out.
fn refine(n_sites: f64, delta: f64, idx: &[f64], p: &mut Vec<f64>, tol: f64) -> Result<usize> {
    let n = p.len();
    let switch = 1e-3 * (n_sites / 64.0).max(1.0);
    let mut res = system_residual(n_sites, delta, idx, p);
    let mut iters = 0usize;
    let mut damping = 1.0f64;
    let mut image = vec![0.0; n];

    while res > switch && iters < FP_MAX_ITER {
        fixed_point_image(n_sites, delta, idx, p, &mut image);
        let mut candidate: Vec<f64> = p
            .iter()
            .zip(&image)
            .map(|(&old, &new)| (1.0 - damping) * old + damping * new)
            .collect();
        antisymmetrize(&mut candidate);
        let cand_res = system_residual(n_sites, delta, idx, &candidate);
        iters += 1;
        if cand_res.is_finite() && (cand_res < res || damping <= 1.0 / 256.0) {
            *p = candidate;
            res = cand_res;
            damping = (damping * 1.5).min(1.0);
        } else {
            damping /= 2.0;
        }
    }

    for _ in 0..NEWTON_MAX_ITER {
        if res <= tol {
            break;
        }
        let h = n / 2;
        if h == 0 {
            // Single central root, pinned at 0 by symmetry; nothing to solve.
            break;
        }
        let a = reduced_jacobian(n_sites, delta, p);
        let mut f = DVector::zeros(h);
        for j in 0..h {
            let s: f64 = p.iter().map(|&pk| theta(delta, p[j], pk)).sum();
            f[j] = (n_sites * p[j] - 2.0 * PI * idx[j] + s) / n_sites;
        }
        let step = a.lu().solve(&(-f)).ok_or(Error::NoConvergence {
            residual: res,
            iterations: iters,
        })?;
        for j in 0..h {
            p[j] += step[j];
        }
        for j in 0..h {
            p[n - 1 - j] = -p[j];
        }
        if n % 2 == 1 {
            p[h] = 0.0;
        }
        iters += 1;
        let new_res = system_residual(n_sites, delta, idx, p);
        if !new_res.is_finite() || new_res > 10.0 * res.max(tol) {
            return Err(Error::NoConvergence {
                residual: new_res,
                iterations: iters,
            });
        }
        res = new_res;
    }

    if res <= tol {
        Ok(iters)
    } else {
        Err(Error::NoConvergence {
            residual: res,
            iterations: iters,
        })
    }
}

/// Solve the root system for (N, r) at anisotropy Δ to absolute residual
/// `tol`. Seeds at the −∞ solution p_j = 2π I_j/(N−n); on failure of the
/// direct attempt, continues in Δ along a geometric ladder from −50.
pub fn solve(n_sites: u32, r: u32, delta: f64, tol: f64) -> Result<BetheRoots> {
    if !n_sites.is_multiple_of(2) || n_sites < 2 * r + 2 {
        return Err(Error::InvalidParameter(format!(
            "need even N ≥ 2r+2, got N={n_sites}, r={r}"
        )));
    }
    if !(delta < -1.0) {
        return Err(Error::InvalidParameter(format!(
            "anisotropy must satisfy Δ < −1, got {delta}"
        )));
    }
    assert!(tol > 0.0);
    let n = (n_sites / 2 - r) as usize;
    let nf = f64::from(n_sites);
    let idx = symmetric_indices(n);
    let seed: Vec<f64> = idx
        .iter()
        .map(|&i| 2.0 * PI * i / (nf - n as f64))
        .collect();

    let finish = |p: Vec<f64>, iterations: usize| -> Result<BetheRoots> {
        let roots = BetheRoots {
            n_sites,
            r,
            delta,
            residual: system_residual(nf, delta, &idx, &p),
            p,
            iterations,
        };
        roots.validate(tol)?;
        Ok(roots)
    };

    // Direct attempt from the −∞ seed.
    let mut p = seed.clone();
    if let Ok(iters) = refine(nf, delta, &idx, &mut p, tol) {
        if let Ok(roots) = finish(p, iters) {
            return Ok(roots);
        }
    }

    // Continuation ladder: geometric Δ values from −50 to the target.
    if delta.is_infinite() {
        // The seed is already exact at −∞; reaching this point means the
        // residual check itself failed, which cannot be improved upon.
        return Err(Error::NoConvergence {
            residual: system_residual(nf, delta, &idx, &seed),
            iterations: 0,
        });
    }
    let stages = 8usize;
    let (start, target) = (50.0f64, -delta);
    let ratio = (target / start).powf(1.0 / (stages as f64 - 1.0));
    let mut p = seed;
    let mut total = 0usize;
    for s in 0..stages {
        let d = -(start * ratio.powi(s as i32));
        let stage_tol = if s + 1 == stages { tol } else { tol.max(1e-10 * nf) };
        total += refine(nf, d, &idx, &mut p, stage_tol)?;
    }
    if (-(target)) != delta {
        total += refine(nf, delta, &idx, &mut p, tol)?;
    }
    finish(p, total)
}

/// The smooth counting function f_p(x) = (x + (1/N) Σ_k Θ(x, p_k))/(2π);
/// at every root, f_p(p_j) = I_j/N up to residual/N.
pub fn counting_function(roots: &BetheRoots, x: Angle) -> f64 {
    let s: f64 = roots
        .p
        .iter()
        .map(|&pk| theta(roots.delta, x, pk))
        .sum();
    (x + s / f64::from(roots.n_sites)) / (2.0 * PI)
}

/// The piecewise-constant density carried by a root configuration: mass
/// 1/N between consecutive roots (the index increments by 1) and
/// (2r+1)/N across the wrap through ±π.
#[derive(Clone, Debug)]
pub struct StepDensity {
    /// The roots this density is built on.
    pub roots: BetheRoots,
    /// Interval ends: value `bulk[j]` holds on [p_j, p_{j+1}).
    pub bulk: Vec<f64>,
    /// Value on the wrap interval [p_n, π] ∪ [−π, p_1).
    pub wrap: f64,
}

impl StepDensity {
    /// Evaluate at x ∈ [−π, π].
    pub fn eval(&self, x: Angle) -> f64 {
        let p = &self.roots.p;
        let n = p.len();
        if x < p[0] || x >= p[n - 1] {
            return self.wrap;
        }
        // Largest j with p_j ≤ x.
        let j = match p.binary_search_by(|a| a.partial_cmp(&x).unwrap()) {
            Ok(j) => j,
            Err(ins) => ins - 1,
        };
        self.bulk[j.min(n - 2)]
    }
}

/// Build the step density of a root configuration.
pub fn step_density(roots: &BetheRoots) -> StepDensity {
    let p = &roots.p;
    let n = p.len();
    let nf = f64::from(roots.n_sites);
    let bulk: Vec<f64> = (0..n.saturating_sub(1))
        .map(|j| 1.0 / (nf * (p[j + 1] - p[j])))
        .collect();
    let wrap_gap = p[0] - p[n - 1] + 2.0 * PI;
    let wrap = f64::from(2 * roots.r + 1) / (nf * wrap_gap);
    assert!(bulk.iter().all(|&v| v > 0.0) && wrap > 0.0);
    StepDensity {
        roots: roots.clone(),
        bulk,
        wrap,
    }
}

/// Weighted sup distance between the root step density and the continuum
/// density: max over samples of k′(k⁻¹(x)) |ρ_p(x) − ρ(x)|, sampling every
/// step interval at its midpoint, the wrap midpoint, and `grid` extra
/// uniform points.
pub fn norm_distance(roots: &BetheRoots, params: &ModelParams, grid: usize) -> f64 {
    let sd = step_density(roots);
    let p = &roots.p;
    let n = p.len();
    let mut samples: Vec<f64> = (0..n.saturating_sub(1))
        .map(|j| 0.5 * (p[j] + p[j + 1]))
        .collect();
    // Wrap midpoint, folded back into (−π, π].
    let mut wrap_mid = 0.5 * (p[n - 1] + p[0] + 2.0 * PI);
    if wrap_mid > PI {
        wrap_mid -= 2.0 * PI;
    }
    samples.push(wrap_mid);
    samples.extend((0..grid).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / grid as f64));

    let mut worst = 0.0f64;
    for &x in &samples {
        let weight = xi(params.lambda, k_inverse(params.lambda, x));
        let diff = (sd.eval(x) - crate::continuum::rho(params, x, 1e-13).value).abs();
        worst = worst.max(weight * diff);
    }
    worst
}

/// Diagonal dominance of the gap-scaled linearization Ã = A·B, where A is
/// the reduced Newton matrix at the solved roots and B the diagonal of
/// right gaps N(p_{j+1} − p_j). Returns (min_j (Ã_jj − Σ_{k≠j}|Ã_jk|), ok);
/// the diagonal tends to 2π as N grows.
pub fn jacobian_dominance(roots: &BetheRoots) -> (f64, bool) {
    let n = roots.p.len();
    let h = n / 2;
    if h == 0 {
        return (f64::INFINITY, true);
    }
    let a = reduced_jacobian(f64::from(roots.n_sites), roots.delta, &roots.p);
    let gaps: Vec<f64> = (0..h)
        .map(|j| f64::from(roots.n_sites) * (roots.p[j + 1] - roots.p[j]))
        .collect();
    let mut min_excess = f64::INFINITY;
    for j in 0..h {
        let mut excess = a[(j, j)] * gaps[j];
        for k in 0..h {
            if k != j {
                excess -= (a[(j, k)] * gaps[k]).abs();
            }
        }
        min_excess = min_excess.min(excess);
    }
    (min_excess, min_excess > 0.0)
}

/// Gap-scaled diagonal entries Ã_jj of [`jacobian_dominance`]'s matrix.
pub fn scaled_diagonal(roots: &BetheRoots) -> Vec<f64> {
    let n = roots.p.len();
    let h = n / 2;
    let a = reduced_jacobian(f64::from(roots.n_sites), roots.delta, &roots.p);
    (0..h)
        .map(|j| a[(j, j)] * f64::from(roots.n_sites) * (roots.p[j + 1] - roots.p[j]))
        .collect()
}

/// Complex log-sums of the two amplitude products over the nonzero roots:
/// Σ log L(e^{ip_j}) and Σ log M(e^{ip_j}) with L(z) = 1 + c²z/(1−z),
/// M(z) = 1 − c²/(1−z). Roots at exactly 0 must be excluded by the caller;
/// a root within 1e−9 of 0 without being 0 sits on the pole and errors.
fn log_products(p_nonzero: &[f64], c: f64) -> Result<(Complex64, Complex64)> {
    let c2 = c * c;
    let mut sum_l = Complex64::new(0.0, 0.0);
    let mut sum_m = Complex64::new(0.0, 0.0);
    for &pj in p_nonzero {
        if pj.abs() < 1e-9 {
            return Err(Error::Degenerate(format!(
                "root {pj} sits on the amplitude pole at z = 1"
            )));
        }
        let z = Complex64::new(0.0, pj).exp();
        let one_minus = Complex64::new(1.0, 0.0) - z;
        sum_l += (Complex64::new(1.0, 0.0) + c2 * z / one_minus).ln();
        sum_m += (Complex64::new(1.0, 0.0) - c2 / one_minus).ln();
    }
    Ok((sum_l, sum_m))
}

/// Accumulated eigenvalue pieces: log magnitude and the residual phase
/// (which must vanish for a symmetric root set).
fn log_eigenvalue_parts(roots: &BetheRoots, params: &ModelParams) -> Result<f64> {
    assert!(
        roots.delta.is_finite(),
        "eigenvalue needs finite anisotropy; use the −∞ limit form instead"
    );
    assert!(
        (params.delta - roots.delta).abs() <= 1e-9 * roots.delta.abs(),
        "parameter set and roots disagree on Δ"
    );
    assert!(
        roots.residual <= 1e-10 * f64::from(roots.n_sites),
        "roots too loose for eigenvalue evaluation"
    );
    let c = params.c;
    let zero_at = roots.p.iter().position(|&x| x == 0.0);
    match zero_at {
        None => {
            let (sum_l, sum_m) = log_products(&roots.p, c)?;
            let m = sum_l.re.max(sum_m.re);
            let combined = (sum_l - m).exp() + (sum_m - m).exp();
            if !(combined.im.abs() <= 1e-9 * combined.norm()) {
                return Err(Error::Degenerate(format!(
                    "eigenvalue acquired imaginary part {:e}",
                    combined.im
                )));
            }
            if combined.re <= 0.0 {
                return Err(Error::Degenerate(
                    "eigenvalue not positive".to_string(),
                ));
            }
            Ok(m + combined.re.ln())
        }
        Some(l) => {
            // Zero-momentum branch (odd n): the two products individually
            // vanish; their combination reduces to an explicit prefactor
            // times the M-product over the remaining roots.
            let others: Vec<f64> = roots
                .p
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != l)
                .map(|(_, &x)| x)
                .collect();
            let d1_sum: f64 = others.iter().map(|&pj| d1_theta(roots.delta, 0.0, pj)).sum();
            let prefactor =
                2.0 + c * c * (f64::from(roots.n_sites) - 1.0) + c * c * d1_sum;
            if prefactor <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "zero-momentum prefactor {prefactor} not positive"
                )));
            }
            let (_, sum_m) = log_products(&others, c)?;
            let phase = sum_m.im.sin();
            if !(phase.abs() <= 1e-9) {
                return Err(Error::Degenerate(format!(
                    "eigenvalue acquired phase {phase:e}"
                )));
            }
            if sum_m.im.cos() <= 0.0 {
                return Err(Error::Degenerate(
                    "eigenvalue not positive".to_string(),
                ));
            }
            Ok(prefactor.ln() + sum_m.re)
        }
    }
}

/// log Λ(p): finite for all N, unlike Λ itself which overflows doubles for
/// N log Λ ≳ 700.
pub fn log_eigenvalue(roots: &BetheRoots, params: &ModelParams) -> Result<f64> {
    log_eigenvalue_parts(roots, params)
}

/// The transfer-matrix eigenvalue Λ(p) carried by a root configuration:
/// ∏ L + ∏ M over e^{ip_j}, with the zero-momentum branch when a root is
/// pinned at 0. Strictly positive.
pub fn eigenvalue(roots: &BetheRoots, params: &ModelParams) -> Result<f64> {
    let log = log_eigenvalue_parts(roots, params)?;
    if log >= 709.0 {
        return Err(Error::Degenerate(format!(
            "eigenvalue exp({log:.1}) overflows f64; use log_eigenvalue"
        )));
    }
    Ok(log.exp())
}

/// Bethe-ansatz eigenvector over the colex-ranked n-subsets of row sites:
/// ψ(x⃗) = Σ_σ A_σ ∏_k exp(i p_{σ(k)} x_k), normalized to unit length.
/// Limited to n ≤ 9 (n! permutation sum).
pub fn eigenvector(roots: &BetheRoots, params: &ModelParams) -> Result<Vec<Complex64>> {
    assert!(roots.delta.is_finite());
    assert!(
        (params.delta - roots.delta).abs() <= 1e-9 * roots.delta.abs(),
        "parameter set and roots disagree on Δ"
    );
    let n = roots.p.len();
    if n > 9 {
        return Err(Error::BudgetExceeded(format!(
            "eigenvector permutation sum capped at n ≤ 9, got {n}"
        )));
    }
    let delta = roots.delta;
    let z: Vec<Complex64> = roots
        .p
        .iter()
        .map(|&pj| Complex64::new(0.0, pj).exp())
        .collect();

    // All permutations with signs, via Heap's algorithm.
    let mut perms: Vec<(Vec<u8>, f64)> = Vec::new();
    let mut idx: Vec<u8> = (0..n as u8).collect();
    let mut sign = 1.0;
    let mut counters = vec![0usize; n];
    perms.push((idx.clone(), sign));
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(counters[i], i);
            }
            sign = -sign;
            perms.push((idx.clone(), sign));
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }

    // Amplitudes A_σ = ε(σ) ∏_{k<ℓ} e^{ip_{σ(k)}} (e^{−ip_{σ(k)}} + e^{ip_{σ(ℓ)}} − 2Δ).
    let amplitudes: Vec<Complex64> = perms
        .iter()
        .map(|(perm, sgn)| {
            let mut a = Complex64::new(*sgn, 0.0);
            for k in 0..n {
                for l in (k + 1)..n {
                    let zk = z[perm[k] as usize];
                    let zl = z[perm[l] as usize];
                    a *= zk * (1.0 / zk + zl - 2.0 * delta);
                }
            }
            a
        })
        .collect();
    let max_amp = amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);

    let dim = binomial(roots.n_sites, n as u32) as usize;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for (rank, entry) in psi.iter_mut().enumerate() {
        let state = ArrowState::from_rank(roots.n_sites, n as u32, rank);
        // 1-based site positions; the global shift is immaterial because
        // the symmetric roots sum to zero.
        let pos: Vec<f64> = state.positions().iter().map(|&q| f64::from(q + 1)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for ((perm, _), amp) in perms.iter().zip(&amplitudes) {
            let phase: f64 = perm
                .iter()
                .zip(&pos)
                .map(|(&s, &x)| roots.p[s as usize] * x)
                .sum();
            acc += amp * Complex64::new(0.0, phase).exp();
        }
        *entry = acc;
    }
    let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 1e-12 * max_amp) {
        return Err(Error::Degenerate(format!(
            "eigenvector vanished (norm {norm:e} vs amplitude scale {max_amp:e})"
        )));
    }
    for v in &mut psi {
        *v /= norm;
    }
    Ok(psi)
}

/// log Λ_r(N) − log Λ_0(N), both sectors solved at the given parameters.
pub fn ratio_log(n_sites: u32, r: u32, params: &ModelParams) -> Result<f64> {
    assert!(n_sites.is_multiple_of(4), "sector ratios need N divisible by 4");
    let tol = 1e-12 * f64::from(n_sites);
    let shifted = solve(n_sites, r, params.delta, tol)?;
    let base = solve(n_sites, 0, params.delta, tol)?;
    Ok(log_eigenvalue(&shifted, params)? - log_eigenvalue(&base, params)?)
}

/// (1/N) log Λ_0(N): the finite-size free-energy estimate.
pub fn free_energy_estimate(n_sites: u32, params: &ModelParams) -> Result<f64> {
    assert!(n_sites.is_multiple_of(4), "free-energy ladder uses N divisible by 4");
    let tol = 1e-12 * f64::from(n_sites);
    let base = solve(n_sites, 0, params.delta, tol)?;
    Ok(log_eigenvalue(&base, params)? / f64::from(n_sites))
}

/// Root-offset diagnostic between the base sector (r = 0) and a shifted
/// sector: the scaled displacements ε_j and the piecewise-constant
/// interpolation f carried by the shifted roots.
#[derive(Clone, Debug)]
pub struct OffsetFunction {
    /// Base configuration (r = 0).
    pub base: BetheRoots,
    /// Shifted configuration (r ≥ 1).
    pub shifted: BetheRoots,
    /// ε_j = N(p̃_j − p_{j+r/2}) for even r, the two-sided average for odd
    /// r; exactly antisymmetric, with a vanishing central entry for odd r.
    pub epsilon: Vec<f64>,
}

impl OffsetFunction {
    /// Piecewise-constant extension: ε of the last shifted root ≤ x, capped
    /// at the boundary values.
    pub fn eval(&self, x: Angle) -> f64 {
        let p = &self.shifted.p;
        let n = p.len();
        if x < p[0] {
            return self.epsilon[0];
        }
        if x >= p[n - 1] {
            return self.epsilon[n - 1];
        }
        let j = match p.binary_search_by(|a| a.partial_cmp(&x).unwrap()) {
            Ok(j) => j,
            Err(ins) => ins - 1,
        };
        self.epsilon[j]
    }
}

/// Pair a base (r = 0) and shifted (r ≥ 1) configuration into the offset
/// displacements ε.
pub fn offset_function(base: &BetheRoots, shifted: &BetheRoots) -> Result<OffsetFunction> {
    if base.r != 0 || shifted.r == 0 || base.n_sites != shifted.n_sites {
        return Err(Error::InvalidParameter(
            "offset needs a base r = 0 and a shifted r ≥ 1 at the same N".to_string(),
        ));
    }
    if base.delta != shifted.delta {
        return Err(Error::InvalidParameter(
            "offset requires both sectors at the same anisotropy".to_string(),
        ));
    }
    let nf = f64::from(base.n_sites);
    let r = shifted.r as usize;
    let nt = shifted.p.len();
    let epsilon: Vec<f64> = (0..nt)
        .map(|j| {
            if r.is_multiple_of(2) {
                nf * (shifted.p[j] - base.p[j + r / 2])
            } else {
                let lo = base.p[j + (r - 1) / 2];
                let hi = base.p[j + r.div_ceil(2)];
                nf * (shifted.p[j] - 0.5 * (lo + hi))
            }
        })
        .collect();
    if r % 2 == 1 {
        let mid = (nt - 1) / 2;
        assert_eq!(epsilon[mid], 0.0, "odd-r central offset must vanish");
    }
    Ok(OffsetFunction {
        base: base.clone(),
        shifted: shifted.clone(),
        epsilon,
    })
}

/// Solve both sectors and report sup over a uniform 1024-point grid of
/// |ρ(x)·f(x) − r·τ(x)|, the discrepancy between the scaled root offsets
/// and the continuum offset density.
pub fn offset_check(n_sites: u32, r: u32, params: &ModelParams) -> Result<f64> {
    assert!(n_sites.is_multiple_of(4) && r >= 1);
    let tol = 1e-12 * f64::from(n_sites);
    let base = solve(n_sites, 0, params.delta, tol)?;
    let shifted = solve(n_sites, r, params.delta, tol)?;
    let f = offset_function(&base, &shifted)?;
    let grid = 1024usize;
    let mut worst = 0.0f64;
    for i in 0..grid {
        let x = -PI + 2.0 * PI * (i as f64) / (grid as f64 - 1.0);
        let rho = crate::continuum::rho(params, x, 1e-13).value;
        let tau = crate::continuum::tau(params, x, 1e-13).value;
        worst = worst.max((rho * f.eval(x) - f64::from(r) * tau).abs());
    }
    Ok(worst)
}

/// Closed form of the scaled eigenvalue limit Λ/(−2Δ)^n as Δ → −∞:
/// 2^r ∏_{j=0}^{r−1} [1 + cos(π(2j+1)/(N−n))] with n = N/2 − r.
pub fn limit_eigenvalue_scaled(n_sites: u32, r: u32) -> f64 {
    assert!(n_sites.is_multiple_of(2) && n_sites >= 2 * r + 2);
    let m = n_sites - (n_sites / 2 - r); // N − n = N/2 + r
    (0..r)
        .map(|j| 2.0 * (1.0 + (PI * f64::from(2 * j + 1) / f64::from(m)).cos()))
        .product()
}

/// The same limit evaluated from its root-of-unity product form: with
/// ζ = e^{2πi/(N−n)}, 2/∏_j (1 − ζ^{I_j}) for even n, and
/// (N−n) ∏_{j≠center} (1 − ζ^{I_j})^{−1} for odd n.
pub fn limit_eigenvalue_product_form(n_sites: u32, r: u32) -> f64 {
    assert!(n_sites.is_multiple_of(2) && n_sites >= 2 * r + 2);
    let n = (n_sites / 2 - r) as usize;
    let m = f64::from(n_sites) - n as f64;
    let idx = symmetric_indices(n);
    let factor = |i: f64| -> Complex64 {
        Complex64::new(1.0, 0.0) - Complex64::new(0.0, 2.0 * PI * i / m).exp()
    };
    let value = if n.is_multiple_of(2) {
        let prod = idx.iter().fold(Complex64::new(1.0, 0.0), |a, &i| a * factor(i));
        2.0 / prod
    } else {
        let prod = idx
            .iter()
            .filter(|&&i| i != 0.0)
            .fold(Complex64::new(1.0, 0.0), |a, &i| a * factor(i));
        m / prod
    };
    assert!(value.im.abs() <= 1e-10 * value.norm());
    value.re
}

impl Serialize for BetheRoots {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("BetheRoots", 6)?;
        st.serialize_field("N", &self.n_sites)?;
        st.serialize_field("r", &self.r)?;
        if self.delta.is_finite() {
            st.serialize_field("Delta", &self.delta)?;
            st.serialize_field("c", &(2.0 - 2.0 * self.delta).sqrt())?;
        } else {
            // JSON has no infinities; the sentinel round-trips as a string.
            st.serialize_field("Delta", "-inf")?;
            st.serialize_field("c", "inf")?;
        }
        let p: Vec<String> = self.p.iter().map(|&x| decimal17(x)).collect();
        st.serialize_field("p", &p)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrText {
    Num(f64),
    Text(String),
}

fn parse_value(v: &NumOrText) -> std::result::Result<f64, String> {
    match v {
        NumOrText::Num(x) => Ok(*x),
        NumOrText::Text(s) => match s.trim() {
            "-inf" => Ok(f64::NEG_INFINITY),
            "inf" => Ok(f64::INFINITY),
            t => t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}")),
        },
    }
}

impl<'de> Deserialize<'de> for BetheRoots {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            #[serde(rename = "N")]
            n_sites: u32,
            r: u32,
            #[serde(rename = "Delta")]
            delta: NumOrText,
            c: Option<NumOrText>,
            p: Vec<NumOrText>,
            residual: f64,
        }
        let w = Wire::deserialize(deserializer)?;
        let delta = parse_value(&w.delta).map_err(D::Error::custom)?;
        if let Some(cv) = &w.c {
            let c = parse_value(cv).map_err(D::Error::custom)?;
            let expect = (2.0 - 2.0 * delta).sqrt();
            let consistent = if delta.is_finite() {
                (c - expect).abs() <= 1e-9 * expect
            } else {
                c.is_infinite()
            };
            if !consistent {
                return Err(D::Error::custom(format!(
                    "c = {c} inconsistent with Delta = {delta}"
                )));
            }
        }
        let p = w
            .p
            .iter()
            .map(parse_value)
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(D::Error::custom)?;
        if p.len() != (w.n_sites / 2 - w.r) as usize {
            return Err(D::Error::custom(format!(
                "expected {} roots, found {}",
                w.n_sites / 2 - w.r,
                p.len()
            )));
        }
        Ok(BetheRoots {
            n_sites: w.n_sites,
            r: w.r,
            delta,
            p,
            residual: w.residual,
            iterations: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::params_from_q;
    use crate::quad::trapezoid_periodic;
    use crate::xfermat::{build_block, pf_eigenvalue};

    fn q10() -> ModelParams {
        params_from_q(10.0).unwrap()
    }

    #[test]
    fn test_seed_exact_at_infinite_anisotropy() {
        for r in [0u32, 1, 2] {
            let roots = solve(16, r, f64::NEG_INFINITY, 1e-12 * 16.0).unwrap();
            let n = roots.p.len();
            let m = 16.0 - n as f64;
            for (j, &p) in roots.p.iter().enumerate() {
                let want = 2.0 * PI * (j as f64 - (n as f64 - 1.0) / 2.0) / m;
                assert!((p - want).abs() < 1e-13, "r={r}, root {j}");
            }
            assert!(roots.residual <= 1e-12 * 16.0);
        }
    }

    #[test]
    fn test_two_sites_single_root_and_eigenvalue() {
        let p = q10();
        let roots = solve(2, 0, p.delta, 1e-12 * 2.0).unwrap();
        assert_eq!(roots.p, vec![0.0]);
        let lam = eigenvalue(&roots, &p).unwrap();
        assert!((lam - (2.0 + p.c * p.c)).abs() < 1e-12);
    }

    #[test]
    fn test_solve_invariants_n64() {
        let p = q10();
        let roots = solve(64, 1, p.delta, 1e-12 * 64.0).unwrap();
        roots.validate(1e-12 * 64.0).unwrap();
        assert_eq!(roots.p.len(), 31);
        // Separation bound π/(2N sup ρ̂) with ρ̂ the unit-mass density
        // (twice the per-site ρ): sharp at the density peak where the local
        // gap is 1/(N sup ρ) and the margin is exactly 4/π.
        let sup_rho = (0..512)
            .map(|i| {
                let x = -PI + 2.0 * PI * (i as f64 + 0.5) / 512.0;
                crate::continuum::rho(&p, x, 1e-12).value
            })
            .fold(0.0, f64::max);
        let min_gap = roots
            .p
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        assert!(min_gap >= PI / (4.0 * 64.0 * sup_rho), "{min_gap}");
        // Cruder universal bound: gaps at least π/N.
        assert!(min_gap >= PI / 64.0, "{min_gap}");
    }

    #[test]
    fn test_counting_function_properties() {
        let p = q10();
        let roots = solve(32, 0, p.delta, 1e-12 * 32.0).unwrap();
        let idx = roots.indices();
        for (j, &pj) in roots.p.iter().enumerate() {
            let want = idx[j] / 32.0;
            assert!((counting_function(&roots, pj) - want).abs() < 1e-12);
        }
        // Quasi-periodicity and oddness.
        let x = 0.3;
        let jump = counting_function(&roots, x + 2.0 * PI) - counting_function(&roots, x);
        assert!((jump - (32.0 - 16.0) / 32.0).abs() < 1e-12);
        assert!(counting_function(&roots, 0.0).abs() < 1e-14);
    }

    #[test]
    fn test_step_density_matches_uniform_limit() {
        // At −∞ the roots are uniform with spacing 2π/(N−n), so the step
        // density is the constant (N−n)/(2πN) = 1/(4π) + r/(2πN) on every
        // interval, wrap included: distance exactly r/(2πN).
        let inf = ModelParams::delta_infinity();
        for r in [0u32, 1] {
            let roots = solve(32, r, f64::NEG_INFINITY, 1e-12 * 32.0).unwrap();
            let d = norm_distance(&roots, &inf, 64);
            let want = f64::from(r) / (2.0 * PI * 32.0);
            assert!((d - want).abs() < 1e-13, "r={r}: {d} vs {want}");
        }
    }

    #[test]
    fn test_norm_distance_scales_inversely_with_n() {
        let p = q10();
        let mut scaled = Vec::new();
        for n_sites in [32u32, 64] {
            let roots = solve(n_sites, 0, p.delta, 1e-12 * f64::from(n_sites)).unwrap();
            scaled.push(f64::from(n_sites) * norm_distance(&roots, &p, 64));
        }
        // N·distance stays of one scale (no growth trend).
        assert!(scaled[1] < 2.0 * scaled[0], "{scaled:?}");
        assert!(scaled[1] > 0.2 * scaled[0], "{scaled:?}");
    }

    #[test]
    fn test_jacobian_dominance_reports() {
        let p = q10();
        let roots = solve(64, 0, p.delta, 1e-12 * 64.0).unwrap();
        let (excess, ok) = jacobian_dominance(&roots);
        assert!(ok && excess > 0.0);
        // The scaled diagonal approaches 2π: the sup deviation decreases,
        // and away from the edge roots the rate is essentially 1/N.
        let mut sup_dev = Vec::new();
        let mut bulk_dev = Vec::new();
        for n_sites in [64u32, 128] {
            let roots = solve(n_sites, 0, p.delta, 1e-12 * f64::from(n_sites)).unwrap();
            let diag = scaled_diagonal(&roots);
            sup_dev.push(
                diag.iter()
                    .map(|d| (d - 2.0 * PI).abs())
                    .fold(0.0, f64::max),
            );
            bulk_dev.push(
                diag.iter()
                    .enumerate()
                    .filter(|(j, _)| roots.p[*j].abs() <= 2.0)
                    .map(|(_, d)| (d - 2.0 * PI).abs())
                    .fold(0.0, f64::max),
            );
        }
        assert!(sup_dev[1] < sup_dev[0], "{sup_dev:?}");
        assert!(bulk_dev[1] < 0.7 * bulk_dev[0], "{bulk_dev:?}");
        // At −∞ the map is exactly halving, and the scaled diagonal is 2π.
        let roots = solve(32, 1, f64::NEG_INFINITY, 1e-12 * 32.0).unwrap();
        let (excess, ok) = jacobian_dominance(&roots);
        assert!(ok);
        assert!((excess - 2.0 * PI).abs() < 1e-10, "{excess}");
    }

    #[test]
    fn test_eigenvalue_matches_exact_block() {
        for q in [5.0, 10.0] {
            let p = params_from_q(q).unwrap();
            for r in [0u32, 1, 2] {
                let roots = solve(8, r, p.delta, 1e-12 * 8.0).unwrap();
                let lam = eigenvalue(&roots, &p).unwrap();
                let block = build_block(8, 4 - r, p.c).unwrap();
                let pf = pf_eigenvalue(&block).unwrap().value;
                assert!(
                    ((lam - pf) / pf).abs() <= 1e-10,
                    "q={q}, r={r}: {lam} vs {pf}"
                );
            }
        }
    }

    #[test]
    fn test_eigenvalue_log_form_and_sector_order() {
        let p = q10();
        let mut logs = Vec::new();
        for r in [0u32, 1, 2] {
            let roots = solve(16, r, p.delta, 1e-12 * 16.0).unwrap();
            let lam = eigenvalue(&roots, &p).unwrap();
            let log = log_eigenvalue(&roots, &p).unwrap();
            assert!(lam > 0.0);
            assert!((lam.ln() - log).abs() < 1e-12);
            logs.push(log);
        }
        assert!(logs[0] > logs[1] && logs[1] > logs[2], "{logs:?}");
    }

    #[test]
    fn test_eigenvector_small_blocks() {
        let p = q10();
        // N=2, n=1: the flat vector.
        let roots = solve(2, 0, p.delta, 1e-12 * 2.0).unwrap();
        let psi = eigenvector(&roots, &p).unwrap();
        assert_eq!(psi.len(), 2);
        assert!((psi[0].norm() - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
        assert!((psi[0] - psi[1]).norm() < 1e-12);
        // N=4, n=2: residual against the exact block.
        let roots = solve(4, 0, p.delta, 1e-12 * 4.0).unwrap();
        let psi = eigenvector(&roots, &p).unwrap();
        let lam = eigenvalue(&roots, &p).unwrap();
        let block = build_block(4, 2, p.c).unwrap();
        let mut worst = 0.0f64;
        for i in 0..block.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &amp) in psi.iter().enumerate() {
                acc += block.entry(i, j) * amp;
            }
            worst = worst.max((acc - lam * psi[i]).norm());
        }
        assert!(worst <= 1e-9, "residual {worst}");
        // Realness up to a global phase.
        let lead = psi
            .iter()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        let phase = lead / lead.norm();
        let max_imag = psi
            .iter()
            .map(|v| (v / phase).im.abs())
            .fold(0.0, f64::max);
        assert!(max_imag < 1e-9, "{max_imag}");
    }

    #[test]
    fn test_limit_eigenvalue_forms_agree() {
        for (n_sites, r) in [(8u32, 0u32), (8, 1), (8, 2), (12, 1), (12, 2), (10, 1)] {
            let closed = limit_eigenvalue_scaled(n_sites, r);
            let product = limit_eigenvalue_product_form(n_sites, r);
            assert!(
                (closed - product).abs() <= 1e-12 * closed.max(1.0),
                "({n_sites},{r}): {closed} vs {product}"
            );
        }
        let want = 2.0 * (1.0 + (PI / 5.0).cos());
        assert!((limit_eigenvalue_scaled(8, 1) - want).abs() < 1e-14);
        assert!((limit_eigenvalue_scaled(8, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn test_scaled_eigenvalue_approaches_limit() {
        // Λ/(−2Δ)^n at Δ = −10⁶ against the closed-form limit.
        let delta: f64 = -1.0e6;
        let p = crate::params::params_from_c((2.0 - 2.0 * delta).sqrt()).unwrap();
        let roots = solve(8, 1, delta, 1e-12 * 8.0).unwrap();
        let log_lam = log_eigenvalue(&roots, &p).unwrap();
        let scaled = (log_lam - 3.0 * (-2.0 * delta).ln()).exp();
        let want = limit_eigenvalue_scaled(8, 1);
        assert!(
            ((scaled - want) / want).abs() < 1e-4,
            "{scaled} vs {want}"
        );
    }

    #[test]
    fn test_solver_near_isotropic_boundary() {
        // q = 4.1 sits close to Δ = −1 where the fixed point is weak; the
        // Newton/ladder path must still deliver the full residual target.
        let p = params_from_q(4.1).unwrap();
        let roots = solve(16, 0, p.delta, 1e-12 * 16.0).unwrap();
        roots.validate(1e-12 * 16.0).unwrap();
        let lam = eigenvalue(&roots, &p).unwrap();
        let pf = pf_eigenvalue(&build_block(16, 8, p.c).unwrap()).unwrap().value;
        assert!(((lam - pf) / pf).abs() <= 1e-10, "{lam} vs {pf}");
    }

    #[test]
    fn test_offset_antisymmetry_and_center() {
        let p = q10();
        let tol = 1e-12 * 32.0;
        let base = solve(32, 0, p.delta, tol).unwrap();
        for r in [1u32, 2] {
            let shifted = solve(32, r, p.delta, tol).unwrap();
            let f = offset_function(&base, &shifted).unwrap();
            let nt = f.epsilon.len();
            for j in 0..nt {
                assert_eq!(f.epsilon[j], -f.epsilon[nt - 1 - j], "r={r}, j={j}");
            }
            if r % 2 == 1 {
                assert_eq!(f.epsilon[(nt - 1) / 2], 0.0);
            }
        }
    }

    #[test]
    fn test_offset_check_shrinks_with_n() {
        let p = q10();
        let small = offset_check(64, 1, &p).unwrap();
        let large = offset_check(128, 1, &p).unwrap();
        assert!(large < small, "sup offset error grew: {small} → {large}");
        // Linear-growth bound: the fitted slope stays put as N doubles.
        let slope = |n_sites: u32| -> f64 {
            let tolr = 1e-12 * f64::from(n_sites);
            let base = solve(n_sites, 0, p.delta, tolr).unwrap();
            let shifted = solve(n_sites, 1, p.delta, tolr).unwrap();
            let f = offset_function(&base, &shifted).unwrap();
            (0..128)
                .map(|i| {
                    let x = 0.1 + (PI - 0.2) * (i as f64) / 127.0;
                    (f.eval(x).abs().max(f.eval(-x).abs())) / x
                })
                .fold(0.0, f64::max)
        };
        let (s64, s128) = (slope(64), slope(128));
        assert!(s128 < 1.5 * s64, "slope unstable: {s64} → {s128}");
    }

    #[test]
    fn test_weak_convergence_of_empirical_measure() {
        let p = q10();
        for g in [|x: f64| x.cos(), |x: f64| (2.0 * x).cos()] {
            let integral = trapezoid_periodic(2048, |x| {
                g(x) * crate::continuum::rho(&p, x, 1e-13).value
            });
            let mut errs = Vec::new();
            for n_sites in [64u32, 128] {
                let roots = solve(n_sites, 0, p.delta, 1e-12 * f64::from(n_sites)).unwrap();
                let empirical: f64 =
                    roots.p.iter().map(|&x| g(x)).sum::<f64>() / f64::from(n_sites);
                errs.push((empirical - integral).abs());
            }
            // O(1/N): halving at doubling, with slack.
            assert!(errs[1] < 0.8 * errs[0], "{errs:?}");
        }
    }

    #[test]
    fn test_roots_json_round_trip() {
        let p = q10();
        let roots = solve(16, 1, p.delta, 1e-12 * 16.0).unwrap();
        let json = serde_json::to_string(&roots).unwrap();
        assert!(json.contains("\"N\":16"));
        let back: BetheRoots = serde_json::from_str(&json).unwrap();
        assert_eq!(back.p, roots.p);
        assert_eq!(back.n_sites, roots.n_sites);
        assert_eq!(back.r, roots.r);
        assert_eq!(back.delta, roots.delta);
        // Sentinel anisotropy survives the trip through JSON strings.
        let inf = solve(8, 0, f64::NEG_INFINITY, 1e-12 * 8.0).unwrap();
        let json = serde_json::to_string(&inf).unwrap();
        let back: BetheRoots = serde_json::from_str(&json).unwrap();
        assert_eq!(back.delta, f64::NEG_INFINITY);
        assert_eq!(back.p, inf.p);
    }

    #[test]
    fn test_solve_rejects_bad_shapes() {
        assert!(matches!(
            solve(7, 0, -2.0, 1e-9),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            solve(8, 4, -2.0, 1e-9),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            solve(8, 0, -0.5, 1e-9),
            Err(Error::InvalidParameter(_))
        ));
    }
}
