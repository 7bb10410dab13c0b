//! The CPTABLE text format.
//!
//! ```text
//! CPTABLE 1
//! m=<m> vmax=<vmax> base=<config-name>
//! <v> <t> <s> <numerator>/<denominator>
//! ...
//! ```
//!
//! Entries are nonzero, in lowest terms and sorted by `(v, t, s)`. Levels
//! are written one at a time and flushed, so an interrupted build leaves a
//! prefix that [`load_partial`] can resume from.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use cpldpc_core::rational::{to_pq, Rational};
use cpldpc_core::table::Level;
use cpldpc_core::{BaseConfig, CoeffTable, EnsembleParams};
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{CliError, Result};

pub const MAGIC: &str = "CPTABLE 1";

/// Header line 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub m: u32,
    pub vmax: u32,
    pub base: String,
}

impl Header {
    pub fn of(table: &CoeffTable) -> Self {
        Header { m: table.m(), vmax: table.vmax(), base: table.base().name().to_string() }
    }

    fn line(&self) -> String {
        format!("m={} vmax={} base={}", self.m, self.vmax, self.base)
    }
}

fn entry_line(v: u32, t: u32, s: u32, value: &Rational) -> String {
    format!("{v} {t} {s} {}", to_pq(value))
}

/// The canonical text of `table`.
pub fn format_table(table: &CoeffTable) -> String {
    let mut out = format!("{MAGIC}\n{}\n", Header::of(table).line());
    for (v, t, s, a) in table.nonzero_entries() {
        out.push_str(&entry_line(v, t, s, a));
        out.push('\n');
    }
    out
}

pub fn save_table(table: &CoeffTable, path: &Path) -> Result<()> {
    std::fs::write(path, format_table(table)).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

/// Streams a table level by level, flushing after each one.
pub struct TableWriter {
    out: BufWriter<File>,
    path: PathBuf,
}

impl TableWriter {
    pub fn create(path: &Path, header: &Header) -> Result<Self> {
        let file = File::create(path).map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
        let mut writer = TableWriter { out: BufWriter::new(file), path: path.to_path_buf() };
        writer.write_raw(&format!("{MAGIC}\n{}\n", header.line()))?;
        Ok(writer)
    }

    pub fn write_level(&mut self, v: u32, level: &Level) -> Result<()> {
        let mut chunk = String::new();
        for (t, s, a) in level.iter() {
            if !a.is_zero() {
                chunk.push_str(&entry_line(v, t, s, a));
                chunk.push('\n');
            }
        }
        self.write_raw(&chunk)
    }

    fn write_raw(&mut self, text: &str) -> Result<()> {
        let context = || format!("writing {}", self.path.display());
        self.out.write_all(text.as_bytes()).map_err(|e| CliError::io(context(), e))?;
        self.out.flush().map_err(|e| CliError::io(context(), e))
    }
}

/// Parameters used when a file is loaded without explicit ones: the
/// table depends on `m` only, so any `n >= max(m, vmax)` with
/// `r = 1 - m/n` reproduces it.
pub fn default_params(m: u32, vmax: u32) -> Result<EnsembleParams> {
    let n = u64::from(m.max(vmax).max(1));
    let rate = Rational::one() - Rational::new(BigInt::from(m), BigInt::from(n));
    Ok(EnsembleParams::new(n, rate)?)
}

struct Parsed {
    header: Header,
    entries: Vec<((u32, u32, u32), Rational)>,
    /// The text did not end in a newline; the unterminated line was dropped.
    truncated_line: bool,
}

fn parse(text: &str, path: &Path, lenient: bool) -> Result<Parsed> {
    let err = |line: usize, message: String| CliError::Format { path: path.to_path_buf(), line, message };
    let truncated_line = !text.is_empty() && !text.ends_with('\n');
    if truncated_line && !lenient {
        let last = text.lines().count();
        return Err(err(last, "unterminated final line (truncated file?)".into()));
    }
    let mut lines: Vec<&str> = text.split('\n').collect();
    // Either the empty string after the final LF or an unterminated line.
    lines.pop();
    if lines.first() != Some(&MAGIC) {
        return Err(err(1, format!("expected header `{MAGIC}`")));
    }
    let header = lines
        .get(1)
        .and_then(|l| parse_header(l))
        .ok_or_else(|| err(2, "expected `m=<m> vmax=<vmax> base=<name>`".into()))?;
    if header.m == 0 {
        return Err(err(2, "m must be at least 1".into()));
    }
    let mut entries: Vec<((u32, u32, u32), Rational)> = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(2) {
        let number = i + 1;
        let (key, value) = parse_entry(line).map_err(|m| err(number, m))?;
        let (v, t, s) = key;
        if v > header.vmax {
            return Err(err(number, format!("v = {v} exceeds vmax = {}", header.vmax)));
        }
        if t > header.m || s > header.m - t {
            return Err(err(number, format!("index ({v},{t},{s}) outside 0 <= t <= m, 0 <= s <= m - t")));
        }
        if let Some((previous, _)) = entries.last() {
            if *previous >= key {
                return Err(err(number, "entries are not strictly sorted by (v, t, s)".into()));
            }
        }
        entries.push((key, value));
    }
    Ok(Parsed { header, entries, truncated_line })
}

fn parse_header(line: &str) -> Option<Header> {
    let mut fields = line.split(' ');
    let m = fields.next()?.strip_prefix("m=")?;
    let vmax = fields.next()?.strip_prefix("vmax=")?;
    let base = fields.next()?.strip_prefix("base=")?;
    if fields.next().is_some() || !is_canonical_natural(m) || !is_canonical_natural(vmax) || base.is_empty() {
        return None;
    }
    Some(Header { m: m.parse().ok()?, vmax: vmax.parse().ok()?, base: base.to_string() })
}

fn is_canonical_natural(text: &str) -> bool {
    !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit()) && (text == "0" || !text.starts_with('0'))
}

fn parse_entry(line: &str) -> std::result::Result<((u32, u32, u32), Rational), String> {
    let fields: Vec<&str> = line.split(' ').collect();
    if fields.len() != 4 {
        return Err("expected `<v> <t> <s> <numerator>/<denominator>`".into());
    }
    let index = |text: &str| -> std::result::Result<u32, String> {
        if !is_canonical_natural(text) {
            return Err(format!("malformed index `{text}`"));
        }
        text.parse().map_err(|_| format!("index `{text}` out of range"))
    };
    let key = (index(fields[0])?, index(fields[1])?, index(fields[2])?);
    let (p, q) = fields[3].split_once('/').ok_or("rational must be written `p/q`")?;
    let digits = p.strip_prefix('-').unwrap_or(p);
    if !is_canonical_natural(digits) || !is_canonical_natural(q) {
        return Err(format!("malformed rational `{}`", fields[3]));
    }
    let numer: BigInt = p.parse().map_err(|_| format!("malformed numerator `{p}`"))?;
    let denom: BigInt = q.parse().map_err(|_| format!("malformed denominator `{q}`"))?;
    if denom.is_zero() {
        return Err("denominator is zero".into());
    }
    if numer.is_zero() {
        return Err("zero entries must be omitted".into());
    }
    let value = Rational::new(numer.clone(), denom.clone());
    if *value.numer() != numer || *value.denom() != denom {
        return Err(format!("`{}` is not in lowest terms", fields[3]));
    }
    Ok((key, value))
}

fn base_config(header: &Header, entries: &[((u32, u32, u32), Rational)], path: &Path) -> Result<BaseConfig> {
    if header.base == "custom" {
        let map: BTreeMap<_, _> = entries
            .iter()
            .filter(|((v, t, _), _)| *v == 0 || *t == 0)
            .cloned()
            .collect();
        return Ok(BaseConfig::Custom(map));
    }
    BaseConfig::from_name(&header.base).ok_or_else(|| CliError::Format {
        path: path.to_path_buf(),
        line: 2,
        message: format!("unknown base config `{}`", header.base),
    })
}

fn levels_from(m: u32, upto: u32, entries: &[((u32, u32, u32), Rational)]) -> Result<Vec<Level>> {
    let mut levels: Vec<Level> = (0..=upto).map(|_| Level::zero(m)).collect();
    for ((v, t, s), value) in entries {
        if *v <= upto {
            levels[*v as usize].set(*t, *s, value.clone())?;
        }
    }
    Ok(levels)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))
}

/// Strict load: the file must be complete up to its declared `vmax`.
pub fn load_table(path: &Path, params: Option<EnsembleParams>) -> Result<CoeffTable> {
    parse_table(&read(path)?, path, params)
}

pub fn parse_table(text: &str, path: &Path, params: Option<EnsembleParams>) -> Result<CoeffTable> {
    let parsed = parse(text, path, false)?;
    let header = &parsed.header;
    let last_v = parsed.entries.last().map_or(0, |((v, _, _), _)| *v);
    if last_v != header.vmax && header.vmax > 0 {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            line: parsed.entries.len() + 2,
            message: format!("file ends at level {last_v} but declares vmax = {} (truncated?)", header.vmax),
        });
    }
    let params = resolve_params(params, header)?;
    let base = base_config(header, &parsed.entries, path)?;
    let levels = levels_from(header.m, header.vmax, &parsed.entries)?;
    Ok(CoeffTable::from_levels(params, base, levels)?)
}

fn resolve_params(params: Option<EnsembleParams>, header: &Header) -> Result<EnsembleParams> {
    match params {
        Some(p) if p.m() != header.m => Err(CliError::Validation(format!(
            "file is for m = {} but the parameters give m = {}",
            header.m,
            p.m()
        ))),
        Some(p) => Ok(p),
        None => default_params(header.m, header.vmax),
    }
}

/// Result of a lenient load.
#[derive(Debug, Clone)]
pub struct PartialTable {
    /// Complete levels only.
    pub table: CoeffTable,
    pub header: Header,
    /// Last complete level (the resume point).
    pub last_complete_v: u32,
    /// Level found in the file but discarded as incomplete.
    pub dropped_level: Option<u32>,
    pub truncated_line: bool,
}

/// Lenient load for resuming: drops an unterminated last line, then keeps
/// the last level present only if recomputing it from the level below
/// reproduces it exactly.
pub fn load_partial(path: &Path, params: Option<EnsembleParams>) -> Result<PartialTable> {
    let text = read(path)?;
    let parsed = parse(&text, path, true)?;
    let header = parsed.header.clone();
    let params = resolve_params(params, &header)?;
    let base = base_config(&header, &parsed.entries, path)?;
    let last_v = parsed.entries.last().map(|((v, _, _), _)| *v);
    let mut dropped_level = None;
    let table = match last_v {
        None => CoeffTable::with_base_level(params, base)?,
        Some(last) => {
            let levels = levels_from(header.m, last, &parsed.entries)?;
            let candidate = levels[last as usize].clone();
            let mut table = if last == 0 {
                CoeffTable::with_base_level(params, base)?
            } else {
                let mut below = levels;
                below.pop();
                let mut table = CoeffTable::from_levels(params, base, below)?;
                table.extend_to(last)?;
                table
            };
            if table.level(last) != Some(&candidate) {
                dropped_level = Some(last);
                if last > 0 {
                    let levels = table.levels()[..last as usize].to_vec();
                    table = CoeffTable::from_levels(table.params().clone(), table.base().clone(), levels)?;
                }
            }
            table
        }
    };
    Ok(PartialTable {
        last_complete_v: table.vmax(),
        table,
        header,
        dropped_level,
        truncated_line: parsed.truncated_line,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cpldpc_core::rational::frac;

    fn sample() -> CoeffTable {
        CoeffTable::fill(EnsembleParams::new(6, frac(1, 2)).unwrap(), 4, BaseConfig::Default).unwrap()
    }

    #[test]
    fn canonical_round_trip() {
        let table = sample();
        let text = format_table(&table);
        assert!(text.starts_with("CPTABLE 1\nm=3 vmax=4 base=default\n0 0 0 1/1\n1 1 0 3/2\n"));
        let back = parse_table(&text, Path::new("t"), Some(table.params().clone())).unwrap();
        assert_eq!(back, table);
        assert_eq!(format_table(&back), text);
    }

    #[test]
    fn rejects_malformed_rationals() {
        let base = "CPTABLE 1\nm=3 vmax=1 base=default\n0 0 0 1/1\n";
        for (bad, why) in [
            ("1 1 0 3/0\n", "zero"),
            ("1 1 0 6/4\n", "lowest"),
            ("1 1 0 03/2\n", "malformed"),
            ("1 1 0 0/1\n", "omitted"),
            ("1 1 0 3\n", "p/q"),
            ("1 4 0 3/2\n", "outside"),
        ] {
            let text = format!("{base}{bad}");
            match parse_table(&text, Path::new("t"), None) {
                Err(CliError::Format { line, message, .. }) => {
                    assert_eq!(line, 4);
                    assert!(message.contains(why), "{message}");
                }
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_disorder_and_bad_header() {
        let text = "CPTABLE 1\nm=3 vmax=1 base=default\n1 1 0 3/2\n0 0 0 1/1\n";
        assert!(matches!(parse_table(text, Path::new("t"), None), Err(CliError::Format { line: 4, .. })));
        let text = "CPTABLE 2\nm=3 vmax=1 base=default\n";
        assert!(matches!(parse_table(text, Path::new("t"), None), Err(CliError::Format { line: 1, .. })));
        let text = "CPTABLE 1\nm=3 vmax=1 base=weird\n0 0 0 1/1\n1 1 0 3/2\n";
        assert!(matches!(parse_table(text, Path::new("t"), None), Err(CliError::Format { line: 2, .. })));
    }

    #[test]
    fn strict_load_rejects_truncation() {
        let text = format_table(&sample());
        let cut = &text[..text.len() - 1];
        assert!(parse_table(cut, Path::new("t"), None).is_err());
        let header_only = "CPTABLE 1\nm=3 vmax=4 base=default\n0 0 0 1/1\n";
        assert!(parse_table(header_only, Path::new("t"), None).is_err());
    }

    #[test]
    fn default_params_cover_depth() {
        let p = default_params(5, 6).unwrap();
        assert_eq!((p.n(), p.m()), (6, 5));
        assert_eq!(default_params(5, 2).unwrap().n(), 5);
    }
}
