//! CSV tables and a gnuplot script for the exponential factors `g^(t)(v)`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cpldpc_core::table::LogBase;
use cpldpc_core::CoeffTable;

use crate::error::{CliError, Result};

pub const DEFAULT_T_LIST: [u32; 10] = [1, 2, 3, 4, 5, 10, 20, 30, 40, 50];
pub const SCRIPT_NAME: &str = "appendix.gp";

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCurve {
    pub t: u32,
    /// `(v, g)` for `v = 1..=vmax`; `None` where `A(v,t,0) = 0`.
    pub points: Vec<(u32, Option<f64>)>,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Appendix {
    pub curves: Vec<GrowthCurve>,
    pub script: PathBuf,
}

impl Appendix {
    pub fn max_g(&self) -> Option<f64> {
        self.curves
            .iter()
            .flat_map(|c| c.points.iter().filter_map(|p| p.1))
            .reduce(f64::max)
    }

    pub fn files(&self) -> Vec<PathBuf> {
        self.curves.iter().map(|c| c.path.clone()).chain([self.script.clone()]).collect()
    }
}

pub fn curve_file_name(t: u32) -> String {
    format!("g_t{t}.csv")
}

/// `g^(t)(v)` for every `v` of the table, in the requested base.
pub fn growth_curve(table: &CoeffTable, t: u32, base: LogBase) -> Result<Vec<(u32, Option<f64>)>> {
    (1..=table.vmax())
        .map(|v| match table.growth_exponent(v, t, base) {
            Ok(g) => Ok((v, Some(g))),
            Err(cpldpc_core::Error::UndefinedValue(_)) => Ok((v, None)),
            Err(e) => Err(e.into()),
        })
        .collect()
}

/// Writes one `v,g` CSV per `t` and a gnuplot script plotting them all.
/// Each run of vanishing coefficients becomes a single blank line, which
/// gnuplot draws as a gap.
pub fn reproduce_appendix(table: &CoeffTable, t_list: &[u32], out_dir: &Path) -> Result<Appendix> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(format!("creating {}", out_dir.display()), e))?;
    let mut curves = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if t == 0 || t > table.m() {
            return Err(CliError::Validation(format!("t = {t} outside 1..={}", table.m())));
        }
        let points = growth_curve(table, t, LogBase::Ten)?;
        let path = out_dir.join(curve_file_name(t));
        let mut text = String::from("v,g\n");
        let mut in_gap = false;
        for (v, g) in &points {
            match g {
                Some(g) => {
                    writeln!(text, "{v},{g}").unwrap();
                    in_gap = false;
                }
                None if !in_gap => {
                    text.push('\n');
                    in_gap = true;
                }
                None => {}
            }
        }
        std::fs::write(&path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
        curves.push(GrowthCurve { t, points, path });
    }
    let script = out_dir.join(SCRIPT_NAME);
    std::fs::write(&script, plot_script(table.m(), t_list))
        .map_err(|e| CliError::io(format!("writing {}", script.display()), e))?;
    Ok(Appendix { curves, script })
}

fn plot_script(m: u32, t_list: &[u32]) -> String {
    let mut s = String::new();
    writeln!(s, "# gnuplot script: exponential factors g^(t)(v) = log10(A(v,t,0)/C(m,t)) for m = {m}").unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set terminal pngcairo size 1200,800").unwrap();
    writeln!(s, "set output 'appendix.png'").unwrap();
    writeln!(s, "set xlabel 'v'").unwrap();
    writeln!(s, "set ylabel 'g^{{(t)}}(v), log10'").unwrap();
    writeln!(s, "set key left top").unwrap();
    let plots: Vec<String> = t_list
        .iter()
        .map(|t| format!("'{}' using 1:2 skip 1 with lines title 't={t}'", curve_file_name(*t)))
        .collect();
    writeln!(s, "plot {}", plots.join(", \\\n     ")).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use cpldpc_core::rational::frac;
    use cpldpc_core::{BaseConfig, EnsembleParams};

    #[test]
    fn gaps_and_first_row() {
        let dir = tempfile::tempdir().unwrap();
        let table = CoeffTable::fill(EnsembleParams::new(10, frac(1, 2)).unwrap(), 6, BaseConfig::Default).unwrap();
        let appendix = reproduce_appendix(&table, &[1, 3], dir.path()).unwrap();
        let t1 = std::fs::read_to_string(dir.path().join("g_t1.csv")).unwrap();
        let first: f64 = t1.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!((first - 0.5f64.log10()).abs() < 1e-12);
        // A(v,3,0) vanishes for v < 3: one gap marker, then data.
        let t3 = std::fs::read_to_string(dir.path().join("g_t3.csv")).unwrap();
        assert!(t3.starts_with("v,g\n\n3,"));
        assert_eq!(appendix.files().len(), 3);
        assert!(std::fs::read_to_string(&appendix.script).unwrap().contains("g_t3.csv"));
    }
}
