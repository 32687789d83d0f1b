//! File formats: the operator text format used by the CLI, the TOML protocol
//! description, machine-readable verdict reports, and CSV scan output.
//!
//! Operator text format: a `dim N` header followed by N^2 whitespace
//! separated (re, im) pairs in row-major order; `#` starts a comment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BracketScan, IntervalType};
use crate::op::{BipartiteDims, Operator, C64};
use crate::qm::{DensityMatrix, Observable};
use crate::signal::ProtocolSpec;

/// Parses the operator text format.
pub fn parse_operator_text(text: &str) -> Result<Operator> {
    let mut tokens = text
        .lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split_whitespace())
        .peekable();
    match tokens.next() {
        Some("dim") => {}
        other => {
            return Err(Error::Parse(format!(
                "expected 'dim' header, got {other:?}"
            )))
        }
    }
    let dim: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("missing dimension after 'dim'".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad dimension: {e}")))?;
    if dim == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    while entries.len() < dim * dim {
        let re = next_float(&mut tokens, "real part")?;
        let im = next_float(&mut tokens, "imaginary part")?;
        entries.push((re, im));
    }
    if tokens.next().is_some() {
        return Err(Error::Parse(format!(
            "trailing data after {} entries",
            dim * dim
        )));
    }
    Operator::from_row_major(dim, &entries)
}

fn next_float<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
    what: &str,
) -> Result<f64> {
    let tok = tokens
        .next()
        .ok_or_else(|| Error::Parse(format!("unexpected end of file reading {what}")))?;
    tok.parse()
        .map_err(|e| Error::Parse(format!("bad {what} {tok:?}: {e}")))
}

/// Writes the operator text format with full round-trip precision.
pub fn format_operator_text(op: &Operator) -> String {
    let mut out = format!("dim {}\n", op.dim());
    for i in 0..op.dim() {
        let row: Vec<String> = (0..op.dim())
            .map(|j| {
                let e = op.entry(i, j);
                format!("{:e} {:e}", e.re, e.im)
            })
            .collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out
}

/// Machine-readable verdict document shared by the CLI commands.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub operation: String,
    pub dims: Option<(usize, usize)>,
    pub verdict: String,
    pub witness: Option<String>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub seed: Option<u64>,
}

impl VerdictReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Matrix block of a protocol file: row-major interleaved re, im floats.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl MatrixSpec {
    pub fn to_operator(&self) -> Result<Operator> {
        if self.entries.len() != 2 * self.dim * self.dim {
            return Err(Error::Parse(format!(
                "matrix of dim {} needs {} floats, got {}",
                self.dim,
                2 * self.dim * self.dim,
                self.entries.len()
            )));
        }
        let pairs: Vec<(f64, f64)> = self
            .entries
            .chunks_exact(2)
            .map(|c| (c[0], c[1]))
            .collect();
        Operator::from_row_major(self.dim, &pairs)
    }

    pub fn from_operator(op: &Operator) -> Self {
        let mut entries = Vec::with_capacity(2 * op.dim() * op.dim());
        for i in 0..op.dim() {
            for j in 0..op.dim() {
                let e = op.entry(i, j);
                entries.push(e.re);
                entries.push(e.im);
            }
        }
        Self {
            dim: op.dim(),
            entries,
        }
    }
}

/// TOML protocol file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub d1: usize,
    pub d2: usize,
    pub shots: u64,
    pub seed: u64,
    pub initial_state: MatrixSpec,
    pub alice_observable: MatrixSpec,
    pub joint_unitary: MatrixSpec,
    pub bob_observable: MatrixSpec,
}

impl ProtocolFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("protocol file: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("protocol serialization cannot fail")
    }

    pub fn into_spec(self) -> Result<ProtocolSpec> {
        let spec = ProtocolSpec {
            dims: BipartiteDims::new(self.d1, self.d2)?,
            initial_state: DensityMatrix::new(self.initial_state.to_operator()?)?,
            alice_observable: Observable::new(self.alice_observable.to_operator()?)?,
            joint_unitary: self.joint_unitary.to_operator()?,
            bob_observable: Observable::new(self.bob_observable.to_operator()?)?,
            shots: self.shots,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &ProtocolSpec) -> Self {
        Self {
            d1: spec.dims.d1,
            d2: spec.dims.d2,
            shots: spec.shots,
            seed: spec.seed,
            initial_state: MatrixSpec::from_operator(spec.initial_state.op()),
            alice_observable: MatrixSpec::from_operator(spec.alice_observable.op()),
            joint_unitary: MatrixSpec::from_operator(&spec.joint_unitary),
            bob_observable: MatrixSpec::from_operator(spec.bob_observable.op()),
        }
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.12e}")
}

/// CSV of the two Bob outcome distributions.
pub fn signal_csv(p0: &[f64], p1: &[f64]) -> String {
    let mut out = String::from("outcome,p0,p1\n");
    for (i, (a, b)) in p0.iter().zip(p1).enumerate() {
        out.push_str(&format!("{i},{},{}\n", fmt_float(*a), fmt_float(*b)));
    }
    out
}

fn interval_name(i: IntervalType) -> &'static str {
    match i {
        IntervalType::Spacelike => "spacelike",
        IntervalType::Timelike => "timelike",
        IntervalType::Lightlike => "lightlike",
    }
}

/// CSV of a bracket scan, one row per separation. Operator-level columns are
/// empty for c-number-only scans.
pub fn scan_csv(scan: &BracketScan) -> String {
    let mut out = String::from(
        "t,x,interval,re_delta_plus_fwd,im_delta_plus_fwd,\
         re_delta_plus_bwd,im_delta_plus_bwd,re_c_bracket,im_c_bracket,\
         bracket_residual,operator_bracket_norm\n",
    );
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    let c = |v: C64| format!("{},{}", fmt_float(v.re), fmt_float(v.im));
    for r in &scan.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_float(r.sep.t),
            fmt_float(r.sep.x),
            interval_name(r.interval),
            c(r.delta_plus_forward),
            c(r.delta_plus_backward),
            c(r.c_number_bracket),
            opt(r.bracket_residual),
            opt(r.operator_bracket_norm),
        ));
    }
    out
}
