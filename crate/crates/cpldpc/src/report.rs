//! JSON documents and CSV tables emitted by the command line.

use std::path::Path;

use cpldpc_core::errprob::{BlockError, SplitReport};
use cpldpc_core::pde::{ExpansionAuditRow, PointClassification, ResidualMonomial, ResidualReport, Window};
use cpldpc_core::rational::{to_f64, to_pq, Rational};
use cpldpc_core::sim::SimResult;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(CliError::from)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowDto {
    pub vmax: u32,
    pub tmax: u32,
    pub smax: u32,
}

impl From<Window> for WindowDto {
    fn from(w: Window) -> Self {
        WindowDto { vmax: w.vmax, tmax: w.tmax, smax: w.smax }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialDto {
    pub v: u32,
    pub t: u32,
    pub s: u32,
    pub value: String,
}

impl From<&ResidualMonomial> for MonomialDto {
    fn from(r: &ResidualMonomial) -> Self {
        MonomialDto { v: r.v, t: r.t, s: r.s, value: to_pq(&r.value) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualDto {
    pub m: u32,
    pub base: String,
    pub window: WindowDto,
    pub interior_monomials_checked: usize,
    pub interior_pass: bool,
    pub nonzero_monomials: Vec<MonomialDto>,
    pub excluded_monomials_count: usize,
    pub excluded_monomials: Vec<MonomialDto>,
}

impl ResidualDto {
    pub fn new(m: u32, base: &str, report: &ResidualReport) -> Self {
        ResidualDto {
            m,
            base: base.to_string(),
            window: report.window.into(),
            interior_monomials_checked: report.interior_checked,
            interior_pass: report.is_clean(),
            nonzero_monomials: report.nonzero.iter().map(Into::into).collect(),
            excluded_monomials_count: report.excluded.len(),
            excluded_monomials: report.excluded.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimDto {
    pub format: String,
    pub n: u64,
    pub r: String,
    pub m: u32,
    pub epsilon: String,
    pub trials: u64,
    pub seed: u64,
    pub rng: String,
    pub failures: u64,
    pub p_hat: f64,
    pub ci95: [f64; 2],
}

impl From<&SimResult> for SimDto {
    fn from(r: &SimResult) -> Self {
        SimDto {
            format: "cpsim/1".into(),
            n: r.params.n(),
            r: to_pq(r.params.rate()),
            m: r.params.m(),
            epsilon: to_pq(&r.epsilon),
            trials: r.trials,
            seed: r.seed,
            rng: r.rng.into(),
            failures: r.failures,
            p_hat: r.p_hat,
            ci95: [r.ci95.0, r.ci95.1],
        }
    }
}

pub fn write_region_csv(path: &Path, points: &[PointClassification]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["y", "z", "discriminant", "label"])?;
    for p in points {
        w.write_record([to_pq(&p.y), to_pq(&p.z), to_pq(&p.discriminant), p.nature.as_str().into()])?;
    }
    w.flush().map_err(|e| CliError::io("flushing region csv", e))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "equal"
    } else {
        "unequal"
    }
}

pub fn write_audit_csv(path: &Path, rows: &[ExpansionAuditRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "y",
        "z",
        "exact_4disc",
        "printed_first_line",
        "printed_expansion",
        "printed_alpha_form",
        "first_line_verdict",
        "expansion_verdict",
        "alpha_form_verdict",
    ])?;
    for r in rows {
        w.write_record([
            to_pq(&r.y),
            to_pq(&r.z),
            to_pq(&r.exact),
            to_pq(&r.first_line),
            to_pq(&r.expansion),
            r.alpha_form.as_ref().map(to_pq).unwrap_or_default(),
            verdict(r.first_line_agrees()).into(),
            verdict(r.expansion_agrees()).into(),
            r.alpha_form_agrees().map_or("undefined", verdict).into(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io("flushing audit csv", e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub samples: usize,
    pub seed: u64,
    pub first_line_equal: usize,
    pub expansion_equal: usize,
    pub alpha_form_equal: usize,
    pub alpha_form_undefined: usize,
}

impl AuditSummary {
    pub fn new(rows: &[ExpansionAuditRow], seed: u64) -> Self {
        AuditSummary {
            samples: rows.len(),
            seed,
            first_line_equal: rows.iter().filter(|r| r.first_line_agrees()).count(),
            expansion_equal: rows.iter().filter(|r| r.expansion_agrees()).count(),
            alpha_form_equal: rows.iter().filter(|r| r.alpha_form_agrees() == Some(true)).count(),
            alpha_form_undefined: rows.iter().filter(|r| r.alpha_form.is_none()).count(),
        }
    }
}

pub fn write_radius_csv(path: &Path, reports: &[SplitReport]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "s", "series_id", "v_window", "root_test_estimate", "verdict"])?;
    for report in reports {
        for row in &report.rows {
            let rt = &row.root_test;
            w.write_record([
                report.t.to_string(),
                report.s.to_string(),
                row.series.id().into(),
                format!("{}-{}", rt.window.0, rt.window.1),
                format!("{:e}", rt.estimate),
                rt.verdict.as_str().into(),
            ])?;
        }
    }
    w.flush().map_err(|e| CliError::io("flushing radius csv", e))
}

pub fn write_sweep_csv(path: &Path, rows: &[(Rational, Rational)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["epsilon", "value", "float_value"])?;
    for (eps, value) in rows {
        w.write_record([to_pq(eps), to_pq(value), format!("{:e}", to_f64(value))])?;
    }
    w.flush().map_err(|e| CliError::io("flushing sweep csv", e))
}

pub fn write_terms_csv(path: &Path, block: &BlockError) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["v", "term", "float_term"])?;
    for (v, term) in &block.terms {
        w.write_record([v.to_string(), to_pq(term), format!("{:e}", to_f64(term))])?;
    }
    w.flush().map_err(|e| CliError::io("flushing terms csv", e))
}

/// `index,numerator,denominator` rows of a coefficient list.
pub fn write_series_csv(path: &Path, coeffs: &[Rational]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["index", "numerator", "denominator"])?;
    for (i, c) in coeffs.iter().enumerate() {
        w.write_record([i.to_string(), c.numer().to_string(), c.denom().to_string()])?;
    }
    w.flush().map_err(|e| CliError::io("flushing series csv", e))
}
