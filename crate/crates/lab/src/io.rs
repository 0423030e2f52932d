//! CSV artifacts with a `#`-prefixed metadata header.
//!
//! A file looks like
//!
//! ```text
//! # command: simulate
//! # config: {"n":2,"q":0.4,...}
//! # input-hash: 3f1c...
//! # body-sha256: 9a0b...
//! sample_index,L,kappa1,lambda1
//! 0,3,0,3
//! ```
//!
//! The body (header row and records) depends only on the inputs. The input
//! hash is a git-style blob hash over everything the run read.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fbschur_core::table::{DistributionTable, Interp};
use fbschur_core::tie::TieSample;
use sha2::{Digest, Sha256};

/// sha256 of `blob <len>\0<content>` over the concatenated parts.
pub fn git_hash(parts: &[&[u8]]) -> String {
    let len: usize = parts.iter().map(|p| p.len()).sum();
    let mut h = Sha256::new();
    h.update(format!("blob {len}\0").as_bytes());
    for p in parts {
        h.update(p);
    }
    hex::encode(h.finalize())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Serializes the CSV body in memory.
pub fn csv_body<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes metadata lines followed by the body; returns the body hash.
pub fn write_artifact(path: &Path, meta: &[(String, String)], body: &[u8]) -> Result<String> {
    let digest = sha256_hex(body);
    let mut out = String::new();
    for (k, v) in meta {
        if v.contains('\n') {
            bail!("metadata value for {k} spans lines");
        }
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out.push_str(&format!("# body-sha256: {digest}\n"));
    let mut bytes = out.into_bytes();
    bytes.extend_from_slice(body);
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(digest)
}

/// A parsed artifact.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub body: Vec<u8>,
}

impl Artifact {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("no column named {name}"))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows
            .iter()
            .map(|r| r[i].parse::<f64>().with_context(|| format!("bad number {:?} in column {name}", r[i])))
            .collect()
    }

    /// The table stored in the first column and the `cdf` column.
    pub fn table(&self) -> Result<DistributionTable> {
        let name = self.header.first().context("empty header")?;
        let grid = self.column(name)?;
        let cdf = self.column("cdf")?;
        let interp = match self.meta("interp") {
            Some("step") => Interp::Step,
            Some("linear") | None => Interp::Linear,
            Some(other) => bail!("unknown interpolation {other}"),
        };
        Ok(DistributionTable::new(grid, cdf, interp)?)
    }
}

pub fn read_artifact(path: &Path) -> Result<Artifact> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).context("artifact is not UTF-8")?;
    let mut meta = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.strip_prefix('#') else { break };
        offset += line.len();
        if let Some((k, v)) = rest.trim().split_once(": ") {
            meta.push((k.to_string(), v.to_string()));
        }
    }
    let body = bytes[offset..].to_vec();
    let mut rdr = csv::ReaderBuilder::new().from_reader(&body[..]);
    let header = rdr.headers()?.iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(Artifact { meta, header, rows, body })
}

pub const SAMPLE_HEADER: [&str; 4] = ["sample_index", "L", "kappa1", "lambda1"];

pub fn samples_body(samples: &[TieSample]) -> Result<Vec<u8>> {
    csv_body(
        &SAMPLE_HEADER,
        samples.iter().enumerate().map(|(i, s)| {
            [i.to_string(), s.l.to_string(), s.kappa1.to_string(), s.lambda1.to_string()]
        }),
    )
}

/// Body of a CDF table; `x` names the abscissa column.
pub fn table_body(x: &str, table: &DistributionTable) -> Result<Vec<u8>> {
    let integer = table.interp == Interp::Step;
    csv_body(
        &[x, "cdf"],
        table.grid.iter().zip(&table.cdf).map(|(g, c)| {
            let g = if integer { format!("{}", *g as i64) } else { format!("{g}") };
            [g, format!("{c}")]
        }),
    )
}

pub fn interp_name(i: Interp) -> &'static str {
    match i {
        Interp::Step => "step",
        Interp::Linear => "linear",
    }
}
