//! Command-line entry point: every solver, enumeration, and verification
//! battery behind one binary.
//!
//! Purpose
//! - Make each laboratory operation scriptable and reproducible: JSON to
//!   stdout (or `--out`), diagnostics to stderr, deterministic output for
//!   identical flags.
//!
//! Why this design
//! - One subcommand per operation mirrors the library surface, so a result
//!   in a report can always be regenerated from a single command line.
//! - Nothing is stochastic; there is deliberately no seed flag. Determinism
//!   comes from fixed summation orders in the library.
//!
//! Notes
//! - `VERTEXLAB_THREADS` caps the global thread pool before first use.
//! - `verify` exits 0 only when every check passes; bad flag values exit 2
//!   (usage errors), runtime failures exit 1.

mod verify;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;
use vertexlab_core::params::{params_from_c, params_from_q};
use vertexlab_core::{bethe, closedform, continuum, fkloop, icelab, xfermat, ModelParams};

#[derive(Parser)]
#[command(
    name = "vertexlab",
    version,
    about = "Numerical laboratory for the six-vertex / random-cluster transfer-matrix analysis"
)]
struct Cli {
    /// Write the primary output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where a choice exists (`convergence` defaults to csv,
    /// everything else to json).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Model-parameter source: exactly one of q or c.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct ParamSource {
    /// Cluster weight q > 4.
    #[arg(long)]
    q: Option<f64>,
    /// Crossing weight c > 2.
    #[arg(long)]
    c: Option<f64>,
}

impl ParamSource {
    fn resolve(&self) -> Result<ModelParams> {
        match (self.q, self.c) {
            (Some(q), None) => Ok(params_from_q(q)?),
            (None, Some(c)) => Ok(params_from_c(c)?),
            _ => unreachable!("clap group guarantees exactly one"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the coupled parameter set (q, p_c, c, Δ, λ) for a given q or c.
    Params {
        #[command(flatten)]
        source: ParamSource,
    },
    /// Inverse correlation length and correlation length by series summation.
    Corrlen {
        #[command(flatten)]
        source: ParamSource,
        /// Series route: tanh, sinh, or both (cross-checked).
        #[arg(long, value_enum, default_value_t = SeriesArg::Auto)]
        series: SeriesArg,
        /// Tail tolerance for the truncation.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Free energy per site of the balanced sector.
    FreeEnergy {
        #[command(flatten)]
        source: ParamSource,
        /// Tail tolerance for the truncation.
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
    },
    /// Solve the root system for sector r and write the roots as JSON.
    BetheSolve {
        /// Sites per row (even, ≥ 2r+2).
        #[arg(long = "N")]
        n_sites: u32,
        /// Sector offset r = N/2 − n.
        #[arg(long, default_value_t = 0)]
        r: u32,
        #[command(flatten)]
        source: SolveSource,
        /// Residual target (default 1e−12·N).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluate the transfer eigenvalue of a saved root file.
    BetheEig {
        /// Path to a roots JSON file written by bethe-solve.
        #[arg(long)]
        roots: PathBuf,
    },
    /// Dominant eigenvalue of one conserved transfer-matrix block.
    XferEig {
        /// Sites per row.
        #[arg(long = "N")]
        n_sites: u32,
        /// Sector offset r = N/2 − n.
        #[arg(long, default_value_t = 0)]
        r: u32,
        #[command(flatten)]
        source: ParamSource,
        /// Also write the block in coordinate text form to this path.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Brute-force arrow enumeration of the N×M torus.
    Enumerate {
        /// Columns.
        #[arg(long = "N")]
        n_cols: u32,
        /// Rows.
        #[arg(long = "M")]
        n_rows: u32,
        #[command(flatten)]
        source: ParamSource,
    },
    /// Exhaustive cluster↔arrow correspondence report on the diagonal torus.
    RcCorrespond {
        /// Medial columns.
        #[arg(long = "N")]
        n_cols: u32,
        /// Medial rows.
        #[arg(long = "M")]
        n_rows: u32,
        /// Cluster weight q > 4.
        #[arg(long)]
        q: f64,
    },
    /// Exact spin↔cluster coupling identities on a small graph.
    CouplingCheck {
        /// Graph name: gridWxH (e.g. grid2x2) or single-edge.
        #[arg(long, default_value = "grid2x2")]
        graph: String,
        /// Number of spin states (integer 2..=5).
        #[arg(long)]
        q: u32,
        /// Inverse temperature, or `crit` for ln(1+√q).
        #[arg(long, default_value = "crit")]
        beta: String,
        /// Comma-separated wired boundary vertices (default: none).
        #[arg(long)]
        wired: Option<String>,
    },
    /// Integral-equation residuals and Fourier-law agreement.
    ContinuumReport {
        #[command(flatten)]
        source: ParamSource,
        /// Residual grid size (power of two ≥ 16).
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        /// Largest Fourier index checked.
        #[arg(long, default_value_t = 16)]
        max_m: i32,
    },
    /// Finite-size convergence table (CSV: N,value,target,abs_error).
    Convergence {
        /// Which quantity to tabulate.
        #[arg(long, value_enum)]
        kind: ConvergenceKind,
        /// Cluster weight q > 4.
        #[arg(long)]
        q: f64,
        /// Comma-separated ascending row sizes, multiples of 4.
        #[arg(long = "N")]
        n_list: String,
        /// Sector offset (used by ratio/offset/norm).
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Run a named invariant battery and report machine-readable checks.
    Verify {
        /// Which battery to run.
        #[arg(long, value_enum)]
        suite: Suite,
        /// Override the cBE sup-residual threshold.
        #[arg(long = "tol-cBE")]
        tol_cbe: Option<f64>,
        /// Override the cOE sup-residual threshold.
        #[arg(long = "tol-cOE")]
        tol_coe: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesArg {
    /// Pick the regime-appropriate series.
    Auto,
    /// Force the tanh-split form.
    Tanh,
    /// Force the sinh series.
    Sinh,
    /// Evaluate both and report the agreement.
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvergenceKind {
    /// |(1/N)·log Λ_0 − f| against the closed-form free energy.
    FreeEnergy,
    /// log(Λ_r/Λ_0)/M… the sector gap against −r·R(q).
    Ratio,
    /// sup|ρ·f − r·τ| of the offset function (target 0).
    Offset,
    /// L¹ distance between step density and continuum density (target 0).
    Norm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Kernel,
    Continuum,
    Bethe,
    Xfer,
    Correspondence,
    Coupling,
    Closedform,
    All,
}

/// Root-system parameter source: q, c, or an explicit Δ (−inf allowed).
#[derive(Args)]
#[group(required = true, multiple = false)]
struct SolveSource {
    /// Cluster weight q > 4.
    #[arg(long)]
    q: Option<f64>,
    /// Crossing weight c > 2.
    #[arg(long)]
    c: Option<f64>,
    /// Anisotropy Δ < −1, or `-inf` for the frozen limit.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
}

impl SolveSource {
    fn resolve(&self) -> Result<f64> {
        if let Some(q) = self.q {
            return Ok(params_from_q(q)?.delta);
        }
        if let Some(c) = self.c {
            return Ok(params_from_c(c)?.delta);
        }
        let text = self.delta.as_deref().expect("clap group");
        if text.eq_ignore_ascii_case("-inf") || text.eq_ignore_ascii_case("-infinity") {
            return Ok(f64::NEG_INFINITY);
        }
        let value: f64 = text
            .parse()
            .with_context(|| format!("--delta expects a number or -inf, got {text:?}"))?;
        Ok(value)
    }
}

/// One pass/fail entry of a verification report: pass ⇔ value ≤ target + tol.
#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn leq(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            value,
            target,
            tol,
            pass: value.is_finite() && value <= target + tol,
        }
    }
}

/// Machine-readable outcome of a `verify` run.
#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub params: serde_json::Value,
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    pub elapsed_ms: u128,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn main() -> Result<()> {
    if let Ok(text) = std::env::var("VERTEXLAB_THREADS") {
        if let Ok(threads) = text.parse::<usize>() {
            if threads >= 1 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global()
                    .ok();
            }
        }
    }
    let cli = Cli::parse();
    if cli.format == Some(Format::Csv) && !matches!(cli.command, Command::Convergence { .. }) {
        bail!("--format csv is only available for the convergence table");
    }
    match &cli.command {
        Command::Params { source } => {
            let params = source.resolve()?;
            emit(&cli.out, &serde_json::to_string_pretty(&params)?)
        }
        Command::Corrlen {
            source,
            series,
            tol,
        } => run_corrlen(&cli.out, source, *series, *tol),
        Command::FreeEnergy { source, tol } => {
            let params = source.resolve()?;
            let fe = closedform::free_energy(&params, *tol);
            emit_json(
                &cli.out,
                &json!({
                    "q": params.q,
                    "lambda": params.lambda,
                    "free_energy": fe.value,
                    "method": method_name(fe.method),
                    "terms_used": fe.terms_used,
                    "tail_bound": fe.tail_bound,
                }),
            )
        }
        Command::BetheSolve {
            n_sites,
            r,
            source,
            tol,
        } => {
            let delta = source.resolve()?;
            let tol = tol.unwrap_or(1e-12 * f64::from(*n_sites));
            let roots = bethe::solve(*n_sites, *r, delta, tol)?;
            emit(&cli.out, &serde_json::to_string_pretty(&roots)?)
        }
        Command::BetheEig { roots } => run_bethe_eig(&cli.out, roots),
        Command::XferEig {
            n_sites,
            r,
            source,
            dump_matrix,
        } => run_xfer_eig(&cli.out, *n_sites, *r, source, dump_matrix.as_deref()),
        Command::Enumerate {
            n_cols,
            n_rows,
            source,
        } => {
            let params = source.resolve()?;
            let result = icelab::enumerate(*n_cols, *n_rows, params.c)?;
            emit_json(
                &cli.out,
                &json!({
                    "N": n_cols,
                    "M": n_rows,
                    "c": params.c,
                    "Z": result.z,
                    "Z_by_r": result.z_by_r,
                    "histogram": result.histogram,
                }),
            )
        }
        Command::RcCorrespond { n_cols, n_rows, q } => {
            let params = params_from_q(*q)?;
            let report = fkloop::correspondence_check(*n_cols, *n_rows, &params)?;
            emit(&cli.out, &serde_json::to_string_pretty(&report)?)
        }
        Command::CouplingCheck {
            graph,
            q,
            beta,
            wired,
        } => run_coupling(&cli.out, graph, *q, beta, wired.as_deref()),
        Command::ContinuumReport {
            source,
            grid,
            max_m,
        } => run_continuum_report(&cli.out, source, *grid, *max_m),
        Command::Convergence {
            kind,
            q,
            n_list,
            r,
        } => run_convergence(&cli.out, cli.format, *kind, *q, n_list, *r),
        Command::Verify {
            suite,
            tol_cbe,
            tol_coe,
        } => {
            let started = Instant::now();
            let (checks, results) = verify::run_suite(*suite, *tol_cbe, *tol_coe)?;
            let all_pass = checks.iter().all(|c| c.pass);
            let report = RunReport {
                command: format!("verify --suite {}", suite_name(*suite)),
                params: json!({
                    "suite": suite_name(*suite),
                    "tol_cBE": tol_cbe,
                    "tol_cOE": tol_coe,
                }),
                results,
                checks,
                elapsed_ms: started.elapsed().as_millis(),
            };
            emit(&cli.out, &serde_json::to_string_pretty(&report)?)?;
            if !all_pass {
                std::process::exit(1);
            }
            Ok(())
        }
    }
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Kernel => "kernel",
        Suite::Continuum => "continuum",
        Suite::Bethe => "bethe",
        Suite::Xfer => "xfer",
        Suite::Correspondence => "correspondence",
        Suite::Coupling => "coupling",
        Suite::Closedform => "closedform",
        Suite::All => "all",
    }
}

fn method_name(method: closedform::SeriesMethod) -> &'static str {
    match method {
        closedform::SeriesMethod::TanhSplit => "tanh_split",
        closedform::SeriesMethod::SinhSeries => "sinh_series",
        closedform::SeriesMethod::Direct => "direct",
    }
}

fn corrlen_payload(params: &ModelParams, sv: &closedform::SeriesValue) -> serde_json::Value {
    json!({
        "q": params.q,
        "lambda": params.lambda,
        "inverse_xi": sv.value,
        "xi": if sv.value > 0.0 { json!(1.0 / sv.value) } else { json!(null) },
        "method": method_name(sv.method),
        "terms_used": sv.terms_used,
        "tail_bound": sv.tail_bound,
    })
}

fn run_corrlen(
    out: &Option<PathBuf>,
    source: &ParamSource,
    series: SeriesArg,
    tol: f64,
) -> Result<()> {
    let params = source.resolve()?;
    let payload = match series {
        SeriesArg::Auto => corrlen_payload(&params, &closedform::inverse_corr_length(&params, tol)),
        SeriesArg::Tanh => corrlen_payload(
            &params,
            &closedform::inverse_corr_length_by_method(
                &params,
                closedform::SeriesMethod::TanhSplit,
                tol,
            )?,
        ),
        SeriesArg::Sinh => corrlen_payload(
            &params,
            &closedform::inverse_corr_length_by_method(
                &params,
                closedform::SeriesMethod::SinhSeries,
                tol,
            )?,
        ),
        SeriesArg::Both => {
            let a = closedform::inverse_corr_length_by_method(
                &params,
                closedform::SeriesMethod::TanhSplit,
                tol,
            )?;
            let b = closedform::inverse_corr_length_by_method(
                &params,
                closedform::SeriesMethod::SinhSeries,
                tol,
            )?;
            let preferred = closedform::inverse_corr_length(&params, tol);
            let mut payload = corrlen_payload(&params, &preferred);
            payload["method"] = json!("both");
            payload["tanh_split"] = json!(a.value);
            payload["sinh_series"] = json!(b.value);
            payload["agreement"] = json!((a.value - b.value).abs());
            payload
        }
    };
    emit_json(out, &payload)
}

fn run_bethe_eig(out: &Option<PathBuf>, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let roots: bethe::BetheRoots = serde_json::from_str(&text)?;
    let n_sites = roots.n_sites;
    let r = roots.r;
    if !roots.delta.is_finite() {
        // Frozen limit: the eigenvalue itself diverges; report the scaled
        // limit Λ/(−2Δ)^n instead.
        return emit_json(
            out,
            &json!({
                "N": n_sites,
                "r": r,
                "n": roots.n_roots(),
                "Delta": "-inf",
                "scaled_limit": bethe::limit_eigenvalue_scaled(n_sites, r),
            }),
        );
    }
    let params = params_from_c((2.0 - 2.0 * roots.delta).sqrt())?;
    let log_lambda = bethe::log_eigenvalue(&roots, &params)?;
    let eigenvalue = bethe::eigenvalue(&roots, &params).ok();
    emit_json(
        out,
        &json!({
            "N": n_sites,
            "r": r,
            "n": roots.n_roots(),
            "Delta": roots.delta,
            "c": params.c,
            "q": params.q,
            "log_eigenvalue": log_lambda,
            "eigenvalue": eigenvalue,
            "residual": roots.residual,
        }),
    )
}

fn run_xfer_eig(
    out: &Option<PathBuf>,
    n_sites: u32,
    r: u32,
    source: &ParamSource,
    dump: Option<&Path>,
) -> Result<()> {
    let params = source.resolve()?;
    if !n_sites.is_multiple_of(2) || n_sites / 2 < r {
        bail!("need even N with r ≤ N/2, got N={n_sites}, r={r}");
    }
    let n_up = n_sites / 2 - r;
    let block = xfermat::build_block(n_sites, n_up, params.c)?;
    if let Some(path) = dump {
        let mut text = format!("{} {}\n", block.dim, block.nnz());
        for i in 0..block.dim {
            let mut written_diag = false;
            for (col, expo) in block.row(i) {
                if !written_diag && col as usize > i {
                    text.push_str(&format!("{i} {i} -1\n"));
                    written_diag = true;
                }
                text.push_str(&format!("{i} {col} {expo}\n"));
            }
            if !written_diag {
                text.push_str(&format!("{i} {i} -1\n"));
            }
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let pf = xfermat::pf_eigenvalue(&block)?;
    emit_json(
        out,
        &json!({
            "N": n_sites,
            "r": r,
            "c": params.c,
            "dim": block.dim,
            "pf_eigenvalue": pf.value,
            "residual": pf.residual,
            "iterations": pf.iterations,
        }),
    )
}

fn parse_graph(name: &str) -> Result<fkloop::SmallGraph> {
    if name == "single-edge" {
        return Ok(fkloop::SmallGraph {
            n_vertices: 2,
            edges: vec![(0, 1)],
        });
    }
    if let Some(dims) = name.strip_prefix("grid") {
        if let Some((w, h)) = dims.split_once('x') {
            let width: u32 = w.parse().context("grid width")?;
            let height: u32 = h.parse().context("grid height")?;
            if width == 0 || height == 0 {
                bail!("grid sides must be positive");
            }
            return Ok(fkloop::grid_graph(width, height));
        }
    }
    bail!("unknown graph {name:?}; use gridWxH (e.g. grid2x3) or single-edge")
}

fn run_coupling(
    out: &Option<PathBuf>,
    graph_name: &str,
    q: u32,
    beta_text: &str,
    wired: Option<&str>,
) -> Result<()> {
    let graph = parse_graph(graph_name)?;
    let beta = if beta_text == "crit" {
        (1.0 + f64::from(q).sqrt()).ln()
    } else {
        beta_text
            .parse()
            .with_context(|| format!("--beta expects a number or `crit`, got {beta_text:?}"))?
    };
    let boundary: Vec<u32> = match wired {
        None => Vec::new(),
        Some(list) => list
            .split(',')
            .map(|v| v.trim().parse().context("wired vertex id"))
            .collect::<Result<_>>()?,
    };
    let report = fkloop::potts_coupling_check(&graph, q, beta, &boundary)?;
    let mut payload = serde_json::to_value(&report)?;
    payload["graph"] = json!(graph_name);
    emit_json(out, &payload)
}

fn run_continuum_report(
    out: &Option<PathBuf>,
    source: &ParamSource,
    grid: usize,
    max_m: i32,
) -> Result<()> {
    let params = source.resolve()?;
    let sup_cbe = continuum::sup_residual_cbe(&params, grid);
    let sup_coe = continuum::sup_residual_coe(&params, grid);
    let mut fourier_max: f64 = 0.0;
    for name in [
        continuum::FourierName::Xi,
        continuum::FourierName::R,
        continuum::FourierName::T,
        continuum::FourierName::Psi,
        continuum::FourierName::P,
    ] {
        for m in -max_m..=max_m {
            let (numeric, closed) = continuum::fourier_check(name, &params, m);
            fourier_max = fourier_max.max((numeric - closed).norm());
        }
    }
    emit_json(
        out,
        &json!({
            "q": params.q,
            "grid": grid,
            "sup_residual_cBE": sup_cbe,
            "sup_residual_cOE": sup_coe,
            "fourier_max_error": fourier_max,
        }),
    )
}

fn run_convergence(
    out: &Option<PathBuf>,
    format: Option<Format>,
    kind: ConvergenceKind,
    q: f64,
    n_list: &str,
    r: u32,
) -> Result<()> {
    let params = params_from_q(q)?;
    let sizes: Vec<u32> = n_list
        .split(',')
        .map(|v| v.trim().parse().context("row size"))
        .collect::<Result<_>>()?;
    if sizes.is_empty() {
        bail!("empty size list");
    }
    if sizes.iter().any(|n| n % 4 != 0) {
        bail!("all row sizes must be multiples of 4");
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        bail!("row sizes must be strictly ascending");
    }
    let target = match kind {
        ConvergenceKind::FreeEnergy => closedform::free_energy(&params, 1e-15).value,
        ConvergenceKind::Ratio => {
            -f64::from(r) * closedform::inverse_corr_length(&params, 1e-13).value
        }
        ConvergenceKind::Offset | ConvergenceKind::Norm => 0.0,
    };
    let mut rows: Vec<(u32, Option<f64>)> = Vec::new();
    let mut failures = 0u32;
    for &n in &sizes {
        let value = match kind {
            ConvergenceKind::FreeEnergy => bethe::free_energy_estimate(n, &params),
            ConvergenceKind::Ratio => bethe::ratio_log(n, r, &params),
            ConvergenceKind::Offset => bethe::offset_check(n, r, &params),
            ConvergenceKind::Norm => bethe::solve(n, r, params.delta, 1e-12 * f64::from(n))
                .map(|roots| bethe::norm_distance(&roots, &params, 1024)),
        };
        match value {
            Ok(v) => rows.push((n, Some(v))),
            Err(err) => {
                eprintln!("N={n}: {err}");
                failures += 1;
                rows.push((n, None));
            }
        }
    }
    let text = match format {
        Some(Format::Json) => {
            let json_rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|(n, v)| {
                    json!({
                        "N": n,
                        "value": v,
                        "target": target,
                        "abs_error": v.map(|v| (v - target).abs()),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "rows": json_rows }))?
        }
        _ => {
            let mut csv = String::from("N,value,target,abs_error\n");
            for (n, v) in &rows {
                match v {
                    Some(v) => csv.push_str(&format!(
                        "{n},{v:.16e},{target:.16e},{:.16e}\n",
                        (v - target).abs()
                    )),
                    None => csv.push_str(&format!("{n},,{target:.16e},\n")),
                }
            }
            csv
        }
    };
    emit(out, text.trim_end())?;
    if failures > 0 {
        std::process::exit(1);
    }
    Ok(())
}
