//! The `fbschur` command line.
//!
//! Exit codes: 0 success, 1 IO or other runtime error, 2 invalid input,
//! 3 a numerical certificate (tail bound, kernel decay, quadrature
//! convergence, table validity) was not met.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use fbschur_core::finite_kernel::{lambda1_cdf, shifted_lambda1_cdf, GapOptions};
use fbschur_core::limit::{f_goe, f_gue, limit_cdf, GapQuadrature, ScalingMap};
use fbschur_core::measure::lambda1_law_exact;
use fbschur_core::stats::{dkw_epsilon, empirical_pmf, ks_distance, tv_distance, Comparison, EmpiricalCdf};
use fbschur_core::table::{Cdf, DistributionTable, Interp};
use fbschur_core::Error as CoreError;
use serde::Serialize;

use crate::config::{invalid, Invalid, RunConfig};
use crate::io::{self, read_artifact, write_artifact};
use crate::plot::{self, Series};
use crate::pool::{with_threads, Rayon};

/// Tolerance of the monotonicity and range check applied before writing a table.
const TABLE_TOL: f64 = 1e-8;
/// Largest acceptable imaginary part of a real probability.
const IMAG_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "fbschur", version, about = "Free-boundary Schur measures: sampling, exact laws, kernels and limits")]
pub struct Cli {
    /// JSON file with default values for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample L, kappa_1 and lambda_1 = L + kappa_1 from last passage percolation on a tie
    Simulate(RunConfig),
    /// Exact law of lambda_1 by enumeration with a certified tail bound
    Enumerate(RunConfig),
    /// Limiting CDF from the hypergeometric Airy kernels on an s grid
    Dist(RunConfig),
    /// CDF of lambda_1 (or of the shifted first row) from the finite pfaffian kernel
    FiniteDist(RunConfig),
    /// Tracy-Widom GUE or GOE reference CDF
    Baseline(RunConfig),
    /// KS or TV distance between a sample file and a CDF table
    Compare(RunConfig),
}

impl Command {
    fn parts(self) -> (&'static str, RunConfig) {
        match self {
            Command::Simulate(c) => ("simulate", c),
            Command::Enumerate(c) => ("enumerate", c),
            Command::Dist(c) => ("dist", c),
            Command::FiniteDist(c) => ("finite-dist", c),
            Command::Baseline(c) => ("baseline", c),
            Command::Compare(c) => ("compare", c),
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if cause.is::<Invalid>() {
            return 2;
        }
        if let Some(c) = cause.downcast_ref::<CoreError>() {
            return match c {
                CoreError::Diagnostic { .. } => 3,
                _ => 2,
            };
        }
        if cause.is::<csv::Error>() || cause.is::<std::num::ParseFloatError>() {
            return 2;
        }
    }
    1
}

pub fn execute(cli: Cli) -> Result<()> {
    let (name, flags) = cli.command.parts();
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &base.command {
        if c != name {
            bail!(Invalid(format!("config is for {c}, not {name}")));
        }
    }
    let mut cfg = base.overlay(&flags)?;
    cfg.command = Some(name.into());
    let threads = cfg.threads();
    with_threads(threads, || match name {
        "simulate" => simulate(cfg),
        "enumerate" => enumerate(cfg),
        "dist" => dist(cfg),
        "finite-dist" => finite_dist(cfg),
        "baseline" => baseline(cfg),
        "compare" => compare(cfg),
        _ => unreachable!("clap only yields known subcommands"),
    })?
}

fn out_path(cfg: &mut RunConfig, default: &str) -> PathBuf {
    cfg.out.get_or_insert_with(|| default.into()).clone()
}

fn meta(cfg: &RunConfig, extra_inputs: &[&[u8]], extra: Vec<(String, String)>) -> Vec<(String, String)> {
    let json = cfg.to_json();
    let mut parts: Vec<&[u8]> = vec![json.as_bytes()];
    parts.extend_from_slice(extra_inputs);
    let mut m = vec![
        ("generator".into(), format!("fbschur {}", env!("CARGO_PKG_VERSION"))),
        ("command".into(), cfg.command.clone().unwrap_or_default()),
        ("config".into(), json.clone()),
        ("input-hash".into(), io::git_hash(&parts)),
    ];
    m.extend(extra);
    m
}

/// Writes the resolved config as `<out>.config.json`.
fn write_config(cfg: &RunConfig, out: &Path) -> Result<()> {
    let mut p = out.as_os_str().to_owned();
    p.push(".config.json");
    let text = serde_json::to_string_pretty(cfg)? + "\n";
    std::fs::write(&p, text).with_context(|| format!("writing {}", PathBuf::from(&p).display()))
}

fn write_table(cfg: &RunConfig, out: &Path, x: &str, table: &DistributionTable, extra: Vec<(String, String)>) -> Result<()> {
    table.validate(TABLE_TOL)?;
    let body = io::table_body(x, table)?;
    let mut extra = extra;
    extra.push(("interp".into(), io::interp_name(table.interp).into()));
    write_artifact(out, &meta(cfg, &[], extra), &body)?;
    write_config(cfg, out)
}

fn write_plot(path: &Path, title: &str, series: &[Series]) -> Result<()> {
    std::fs::write(path, plot::render(title, series)).with_context(|| format!("writing {}", path.display()))
}

fn table_series(label: &str, t: &DistributionTable) -> Series {
    let pts = t.grid.iter().copied().zip(t.cdf.iter().copied()).collect();
    match t.interp {
        Interp::Step => Series::steps(label, pts),
        Interp::Linear => Series::curve(label, pts),
    }
}

fn simulate(mut cfg: RunConfig) -> Result<()> {
    let spec = cfg.tie_spec()?;
    let samples = cfg.samples();
    let seed = cfg.seed();
    let out = out_path(&mut cfg, "samples.csv");
    let draws = crate::sim::simulate(&spec, samples, seed)?;
    let body = io::samples_body(&draws)?;
    write_artifact(&out, &meta(&cfg, &[], vec![]), &body)?;
    write_config(&cfg, &out)?;
    if let Some(p) = &cfg.plot {
        let l: Vec<f64> = draws.iter().map(|s| s.lambda1 as f64).collect();
        write_plot(p, "lambda_1", &[Series::empirical("empirical lambda_1", &l, 2000)])?;
    }
    Ok(())
}

fn enumerate(mut cfg: RunConfig) -> Result<()> {
    let spec = cfg.measure_spec()?;
    let tol = *cfg.tail_tol.get_or_insert(1e-6);
    let out = out_path(&mut cfg, "law.csv");
    let law = lambda1_law_exact(&spec, tol)?;
    let table = law.table();
    let extra = vec![
        ("cap".into(), law.cap.to_string()),
        ("tail-bound".into(), format!("{:e}", law.tail_bound)),
    ];
    write_table(&cfg, &out, "k", &table, extra)?;
    if let Some(p) = &cfg.plot {
        write_plot(p, "exact law of lambda_1", &[table_series("exact", &table)])?;
    }
    Ok(())
}

fn dist(mut cfg: RunConfig) -> Result<()> {
    let params = cfg.limit_params()?;
    let quad = cfg.gap_quadrature();
    let s = cfg.s_grid()?;
    let out = out_path(&mut cfg, "cdf.csv");
    let (vals, imag) = limit_cdf(&params, &s, quad, &Rayon)?;
    if imag > IMAG_TOL {
        bail!(CoreError::Diagnostic { what: "imaginary residue", value: imag, limit: IMAG_TOL });
    }
    let table = DistributionTable::new(s, vals, Interp::Linear)?;
    write_table(&cfg, &out, "s", &table, vec![("imag".into(), format!("{imag:e}"))])?;
    if let Some(p) = &cfg.plot {
        write_plot(p, "limiting CDF", &[table_series("F", &table)])?;
    }
    Ok(())
}

fn finite_dist(mut cfg: RunConfig) -> Result<()> {
    let spec = cfg.measure_spec()?;
    let hi = cfg.hi.ok_or_else(|| invalid("missing required key hi"))?;
    if hi < 0 {
        bail!(Invalid("hi must be nonnegative".into()));
    }
    let d = GapOptions::default();
    let opts = GapOptions {
        nodes: *cfg.nodes.get_or_insert(d.nodes),
        tol: *cfg.tol.get_or_insert(d.tol),
        edge_tol: *cfg.edge_tol.get_or_insert(d.edge_tol),
        max_nodes: d.max_nodes,
    };
    let shifted = *cfg.shifted.get_or_insert(false);
    let out = out_path(&mut cfg, "finite.csv");
    let (table, law) = if shifted {
        let law = shifted_lambda1_cdf(&spec, 0, hi, opts, &Rayon)?;
        (DistributionTable::lattice(0, law.cdf.clone())?, law)
    } else {
        lambda1_cdf(&spec, hi, opts, &Rayon)?
    };
    if law.imag > IMAG_TOL {
        bail!(CoreError::Diagnostic { what: "imaginary residue", value: law.imag, limit: IMAG_TOL });
    }
    let extra = vec![
        ("contour-nodes".into(), law.nodes.to_string()),
        ("self-convergence".into(), format!("{:e}", law.self_convergence)),
        ("window-end".into(), law.window_end.to_string()),
        ("imag".into(), format!("{:e}", law.imag)),
    ];
    write_table(&cfg, &out, "m", &table, extra)?;
    if let Some(p) = &cfg.plot {
        write_plot(p, "finite-kernel CDF", &[table_series("kernel", &table)])?;
    }
    Ok(())
}

fn baseline(mut cfg: RunConfig) -> Result<()> {
    let kernel = cfg.kernel.get_or_insert_with(|| "gue".into()).clone();
    let quad = cfg.gap_quadrature();
    let s = cfg.s_grid()?;
    let out = out_path(&mut cfg, "baseline.csv");
    let f: fn(f64, GapQuadrature) -> f64 = match kernel.as_str() {
        "gue" => f_gue,
        "goe" => f_goe,
        other => bail!(Invalid(format!("unknown kernel {other}"))),
    };
    let vals = s.iter().map(|&x| f(x, quad)).collect();
    let table = DistributionTable::new(s, vals, Interp::Linear)?;
    write_table(&cfg, &out, "s", &table, vec![])?;
    if let Some(p) = &cfg.plot {
        write_plot(p, &format!("Tracy-Widom {}", kernel.to_uppercase()), &[table_series(&kernel, &table)])?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Report {
    metric: &'static str,
    value: f64,
    threshold: f64,
    samples: usize,
    dkw_epsilon_0_01: f64,
    passed: bool,
}

fn compare(mut cfg: RunConfig) -> Result<()> {
    let left_path = cfg.left.clone().ok_or_else(|| invalid("missing required key left"))?;
    let right_path = cfg.right.clone().ok_or_else(|| invalid("missing required key right"))?;
    let metric = cfg.metric.get_or_insert_with(|| "ks".into()).clone();
    let column = cfg.column.get_or_insert_with(|| "lambda1".into()).clone();
    let left = read_artifact(&left_path)?;
    let right = read_artifact(&right_path)?;
    let mut sample = left.column(&column)?;
    let reference = right.table()?;
    if let Some(n) = cfg.rescale_n {
        let eta = *cfg.eta.get_or_insert(1.0);
        let k = *cfg.k.get_or_insert(2);
        let map = ScalingMap::geometric(n, eta, k);
        for x in &mut sample {
            *x = map.rescale(*x);
        }
    }
    let n = sample.len();
    let dkw = dkw_epsilon(n.max(1), 0.01);
    let cmp = match metric.as_str() {
        "ks" => {
            let emp = EmpiricalCdf::new(sample.clone())?;
            Comparison { metric: "ks", value: ks_distance(&emp, &reference), threshold: *cfg.threshold.get_or_insert(dkw) }
        }
        "tv" => {
            if sample.iter().any(|&x| x < 0.0 || x.fract() != 0.0) {
                bail!(Invalid("tv needs nonnegative integer samples".into()));
            }
            let ints: Vec<u64> = sample.iter().map(|&x| x as u64).collect();
            let p = empirical_pmf(&ints)?;
            let q = lattice_pmf(&reference)?;
            Comparison { metric: "tv", value: tv_distance(&p, &q)?, threshold: *cfg.threshold.get_or_insert(0.01) }
        }
        other => bail!(Invalid(format!("unknown metric {other}"))),
    };
    let report = Report {
        metric: cmp.metric,
        value: cmp.value,
        threshold: cmp.threshold,
        samples: n,
        dkw_epsilon_0_01: dkw,
        passed: cmp.passed(),
    };
    println!(
        "metric={} value={:.6} threshold={:.6} samples={} dkw={:.6} result={}",
        report.metric,
        report.value,
        report.threshold,
        n,
        dkw,
        if report.passed { "pass" } else { "fail" }
    );
    let inputs = [&left.body[..], &right.body[..]];
    let input_hash = io::git_hash(&[cfg.to_json().as_bytes(), inputs[0], inputs[1]]);
    if let Some(p) = &cfg.report {
        let doc = serde_json::json!({ "config": cfg, "input-hash": input_hash, "report": report });
        std::fs::write(p, serde_json::to_string_pretty(&doc)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &cfg.plot {
        let emp = Series::empirical(format!("empirical {column}"), &sample, 2000);
        write_plot(p, &format!("{} = {:.4}", report.metric, report.value), &[table_series("reference", &reference), emp])?;
    }
    Ok(())
}

/// pmf on 0, 1, ... of an integer step table starting at a nonnegative knot.
fn lattice_pmf(t: &DistributionTable) -> Result<Vec<f64>> {
    if t.interp != Interp::Step || t.grid.iter().any(|g| g.fract() != 0.0) || t.grid[0] < 0.0 {
        bail!(Invalid("tv needs an integer step table".into()));
    }
    let hi = *t.grid.last().unwrap() as usize;
    Ok((0..=hi)
        .map(|k| t.at(k as f64) - if k == 0 { 0.0 } else { t.at(k as f64 - 1.0) })
        .collect())
}
