//! Run configuration shared by every subcommand.
//!
//! Keys can come from a JSON file (`--config`) and from flags; flags win.
//! Unknown JSON keys are rejected. Resolving a config fills in every default
//! that was used, and the resolved form is what gets written next to results.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use fbschur_core::limit::{GapQuadrature, LimitParams, ShiftSign};
use fbschur_core::measure::{BoundaryParams, Kind, Label, MeasureSpec, Variant};
use fbschur_core::tie::TieSpec;
use serde::{Deserialize, Serialize};

/// A configuration problem; maps to the validation exit code.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Invalid(msg.into()))
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    /// updown or upwards
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// geometric or plancherel
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Block size, or number of geometric specializations
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    /// Common value of all geometric parameters
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Border parameters x_1..x_n of the tie (comma separated)
    #[arg(long, value_delimiter = ',', help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    /// aa, ab, bb or -
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b2: Option<f64>,
    /// Parameter of the theta-distributed shift
    #[arg(long, help_heading = "Measure")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,

    /// Number of free boundaries, 1 or 2
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u8>,
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_prime: Option<f64>,
    /// plus or minus: side of the log 2 offset for the simplified kernels
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<String>,
    /// lo:hi:step
    #[arg(long, allow_hyphen_values = true, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<String>,
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_nodes: Option<usize>,
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_length: Option<f64>,
    /// gue or goe
    #[arg(long, help_heading = "Limit")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,

    #[arg(long, help_heading = "Run")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long, help_heading = "Run")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads; defaults to $FBSCHUR_THREADS or the core count
    #[arg(long, help_heading = "Run")]
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    /// Largest m of a finite-kernel CDF
    #[arg(long, help_heading = "Run")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<i64>,
    /// Write the law of lambda_1 + 2 D instead of lambda_1
    #[arg(long, num_args = 0..=1, default_missing_value = "true", help_heading = "Run")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifted: Option<bool>,
    /// Starting contour node count of the finite kernel
    #[arg(long, help_heading = "Run")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    /// Quadrature self-convergence tolerance
    #[arg(long, help_heading = "Run")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long, help_heading = "Run")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_tol: Option<f64>,
    /// Bound on the mass omitted by enumeration
    #[arg(long, help_heading = "Run")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,

    #[arg(long, help_heading = "Compare")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<PathBuf>,
    #[arg(long, help_heading = "Compare")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<PathBuf>,
    /// ks or tv
    #[arg(long, help_heading = "Compare")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    /// Sample column to compare
    #[arg(long, help_heading = "Compare")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    /// Rescale samples by the geometric-regime map of this size n
    #[arg(long, help_heading = "Compare")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rescale_n: Option<f64>,
    #[arg(long, help_heading = "Compare")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,

    #[arg(long, help_heading = "Output")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Optional SVG overlay
    #[arg(long, help_heading = "Output")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    /// JSON report of a comparison
    #[arg(long, help_heading = "Output")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

impl RunConfig {
    /// Parses a JSON config, rejecting unknown keys.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    /// Keys set in `over` replace those in `self`.
    pub fn overlay(self, over: &RunConfig) -> Result<Self> {
        let mut base = serde_json::to_value(self)?;
        let top = serde_json::to_value(over)?;
        if let (Some(b), Some(t)) = (base.as_object_mut(), top.as_object()) {
            for (k, v) in t {
                b.insert(k.clone(), v.clone());
            }
        }
        Ok(serde_json::from_value(base)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn variant(&mut self) -> Result<Variant> {
        match self.variant.get_or_insert_with(|| "updown".into()).as_str() {
            "updown" | "up-down" => Ok(Variant::UpDown),
            "upwards" => Ok(Variant::Upwards),
            other => Err(invalid(format!("unknown variant {other}"))),
        }
    }

    pub fn label(&mut self) -> Result<Label> {
        let s = self.label.get_or_insert_with(|| "-".into());
        Label::parse(s).ok_or_else(|| invalid(format!("unknown label {s}")))
    }

    pub fn boundary(&mut self) -> BoundaryParams {
        BoundaryParams {
            a1: *self.a1.get_or_insert(1.0),
            a2: *self.a2.get_or_insert(1.0),
            b1: *self.b1.get_or_insert(1.0),
            b2: *self.b2.get_or_insert(1.0),
        }
    }

    pub fn seed(&mut self) -> u64 {
        *self.seed.get_or_insert(0)
    }

    pub fn samples(&mut self) -> usize {
        *self.samples.get_or_insert(10_000)
    }

    /// Threads are an execution detail and stay out of the resolved config.
    pub fn threads(&self) -> usize {
        self.threads.unwrap_or_else(crate::pool::default_threads)
    }

    pub fn tie_spec(&mut self) -> Result<TieSpec> {
        let variant = self.variant()?;
        let n = need(self.n, "n")? as usize;
        let u = need(self.u, "u")?;
        let v = match variant {
            Variant::UpDown => need(self.v, "v")?,
            Variant::Upwards => 1.0,
        };
        let mut spec = TieSpec::geometric(variant, n, u, v, 0.0);
        match (&self.x, &self.y, self.q) {
            (_, Some(y), _) => {
                spec.y = y.clone();
                spec.x = match (&self.x, variant) {
                    (Some(x), _) => x.clone(),
                    (None, Variant::Upwards) => vec![0.0; n],
                    (None, Variant::UpDown) => return Err(invalid("x is required with y")),
                };
            }
            (None, None, Some(q)) => {
                spec.x = vec![q; n];
                spec.y = vec![q; n];
            }
            _ => return Err(invalid("either q or the border lists x, y are required")),
        }
        let label = self.label()?;
        let spec = spec.with_label(label, self.boundary());
        spec.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(spec)
    }

    pub fn measure_spec(&mut self) -> Result<MeasureSpec> {
        let variant = self.variant()?;
        let kind = match self.kind.get_or_insert_with(|| "geometric".into()).as_str() {
            "geometric" => Kind::Geometric { q: need(self.q, "q")?, n: need(self.n, "n")? },
            "plancherel" => Kind::Plancherel { eps: need(self.eps, "eps")? },
            other => return Err(invalid(format!("unknown kind {other}"))),
        };
        let u = need(self.u, "u")?;
        let mut spec = match variant {
            Variant::UpDown => MeasureSpec::updown(kind, u, need(self.v, "v")?),
            Variant::Upwards => MeasureSpec::upwards(kind, u),
        };
        let label = self.label()?;
        spec = spec.with_label(label, self.boundary());
        spec.t = *self.t.get_or_insert(1.0);
        spec.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(spec)
    }

    pub fn limit_params(&mut self) -> Result<LimitParams> {
        let k = need(self.k, "k")?;
        let eta = need(self.eta, "eta")?;
        let label = self.label()?;
        let a1 = *self.alpha1.get_or_insert(0.0);
        let a2 = *self.alpha2.get_or_insert(0.0);
        let mut p = LimitParams::for_label(k, label, a1, a2, eta).map_err(|e| invalid(e.to_string()))?;
        p.shift = match self.shift.get_or_insert_with(|| "minus".into()).as_str() {
            "minus" => ShiftSign::Minus,
            "plus" => ShiftSign::Plus,
            other => return Err(invalid(format!("unknown shift {other}"))),
        };
        let tau = *self.tau.get_or_insert(p.tau);
        let tau_prime = *self.tau_prime.get_or_insert(p.tau_prime);
        p.set_abscissas(tau, tau_prime).map_err(|e| invalid(e.to_string()))?;
        Ok(p)
    }

    pub fn gap_quadrature(&mut self) -> GapQuadrature {
        let d = GapQuadrature::default();
        GapQuadrature {
            nodes: *self.gap_nodes.get_or_insert(d.nodes),
            length: *self.gap_length.get_or_insert(d.length),
        }
    }

    pub fn s_grid(&mut self) -> Result<Vec<f64>> {
        parse_grid(self.s_grid.get_or_insert_with(|| "-4:4:0.25".into()))
    }
}

fn need<T: Copy>(x: Option<T>, name: &str) -> Result<T> {
    x.ok_or_else(|| invalid(format!("missing required key {name}")))
}

/// Parses `lo:hi:step` into lo, lo + step, ... up to hi inclusive.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| invalid(format!("bad grid {s}")))?;
    let [lo, hi, step] = parts[..] else { bail!(Invalid(format!("grid must be lo:hi:step, got {s}"))) };
    if !(step > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        bail!(Invalid(format!("bad grid {s}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        bail!(Invalid("grid too long".into()));
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}
