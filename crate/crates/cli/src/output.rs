use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use contagg::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::args::Common;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] contagg::Error),
    #[error("report contains a non-finite number at {0}")]
    NonFinite(String),
    #[error("certificate rejected")]
    Rejected,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_input_error() => 2,
            CliError::Core(_) | CliError::NonFinite(_) | CliError::Rejected => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub enum Sink {
    Stdout,
    File(PathBuf),
}

/// Where and how to write, from `--out`.
pub fn destination(common: &Common, default: Format) -> (Format, Sink) {
    match common.out.as_deref() {
        None => (default, Sink::Stdout),
        Some("json") => (Format::Json, Sink::Stdout),
        Some("csv") => (Format::Csv, Sink::Stdout),
        Some(path) => {
            let p = PathBuf::from(path);
            let fmt = match p.extension().and_then(|e| e.to_str()) {
                Some("csv") => Format::Csv,
                Some("json") => Format::Json,
                _ => default,
            };
            (fmt, Sink::File(p))
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    config: &'a C,
    result: &'a R,
}

/// Rejects `null` anywhere in the tree. Reports never emit `null` on
/// purpose (optional fields are skipped), so a `null` is a NaN or infinity
/// that serde_json could not represent.
fn check_finite(v: &Value, path: &mut String) -> CliResult<()> {
    match v {
        Value::Null => Err(CliError::NonFinite(if path.is_empty() { "/".into() } else { path.clone() })),
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                let len = path.len();
                path.push_str(&format!("/{i}"));
                check_finite(x, path)?;
                path.truncate(len);
            }
            Ok(())
        }
        Value::Object(map) => {
            for (k, x) in map {
                let len = path.len();
                path.push('/');
                path.push_str(k);
                check_finite(x, path)?;
                path.truncate(len);
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn write_out(sink: &Sink, text: &str) -> CliResult<()> {
    match sink {
        Sink::Stdout => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
        Sink::File(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        }),
    }
}

fn timestamp(common: &Common) -> Option<u64> {
    if common.no_timestamp {
        None
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    }
}

/// Renders the JSON envelope; fails on non-finite numbers.
pub fn render_json<C: Serialize, R: Serialize>(
    common: &Common,
    command: &str,
    config: &C,
    result: &R,
) -> CliResult<String> {
    let env = Envelope {
        tool: "contagg",
        version: env!("CARGO_PKG_VERSION"),
        command,
        timestamp: timestamp(common),
        config,
        result,
    };
    let value = serde_json::to_value(&env).map_err(contagg::Error::from)?;
    check_finite(&value, &mut String::new())?;
    let mut text = serde_json::to_string_pretty(&value).map_err(contagg::Error::from)?;
    text.push('\n');
    Ok(text)
}

pub fn emit_json<C: Serialize, R: Serialize>(
    common: &Common,
    command: &str,
    config: &C,
    result: &R,
) -> CliResult<()> {
    let (fmt, sink) = destination(common, Format::Json);
    if fmt == Format::Csv {
        return Err(CliError::Usage(format!("{command} has no CSV output")));
    }
    write_out(&sink, &render_json(common, command, config, result)?)
}

/// CSV with a comment preamble carrying the same metadata as the JSON
/// envelope.
pub fn emit_csv_or_json<C: Serialize, R: Serialize>(
    common: &Common,
    command: &str,
    config: &C,
    result: &R,
    notes: &[String],
    header: &[&str],
    rows: &[Vec<f64>],
) -> CliResult<()> {
    let (fmt, sink) = destination(common, Format::Csv);
    if fmt == Format::Json {
        return write_out(&sink, &render_json(common, command, config, result)?);
    }
    let mut text = format!("# contagg {} {command}\n", env!("CARGO_PKG_VERSION"));
    let cfg = serde_json::to_string(config).map_err(contagg::Error::from)?;
    text.push_str(&format!("# config {cfg}\n"));
    if let Some(t) = timestamp(common) {
        text.push_str(&format!("# timestamp {t}\n"));
    }
    for n in notes {
        text.push_str(&format!("# {n}\n"));
    }
    text.push_str(&header.join(","));
    text.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(CliError::NonFinite(format!("row {} column {}", i + 1, header[j])));
        }
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_out(&sink, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn common(out: Option<&str>) -> Common {
        Common {
            out: out.map(String::from),
            no_timestamp: true,
            seed: None,
        }
    }

    #[test]
    fn nan_is_rejected() {
        let r = render_json(&common(None), "t", &serde_json::json!({}), &vec![1.0, f64::NAN]);
        match r {
            Err(CliError::NonFinite(p)) => assert_eq!(p, "/result/1"),
            other => panic!("{other:?}"),
        }
        assert!(render_json(&common(None), "t", &serde_json::json!({}), &Cx { re: 1.0, im: 2.0 }).is_ok());
    }

    #[test]
    fn out_flag() {
        assert!(matches!(destination(&common(Some("csv")), Format::Json), (Format::Csv, Sink::Stdout)));
        assert!(matches!(destination(&common(Some("a.csv")), Format::Json), (Format::Csv, Sink::File(_))));
        assert!(matches!(destination(&common(Some("a.txt")), Format::Json), (Format::Json, Sink::File(_))));
        assert!(matches!(destination(&common(None), Format::Csv), (Format::Csv, Sink::Stdout)));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Rejected.exit_code(), 1);
        let parse = contagg::parse_graph("p edge x").unwrap_err();
        assert_eq!(CliError::Core(parse).exit_code(), 2);
        let dom = contagg::InteriorPoint::new(vec![2.0]).unwrap_err();
        assert_eq!(CliError::Core(dom).exit_code(), 1);
    }
}
