//! Coefficient files: a header `kind=maass|half t=<real> [parity=odd]`
//! followed by records `n value`, with `#` comments.

use std::fmt::Write as _;
use std::path::Path;

use thetalift::automorphic::{AutomorphicError, CoefficientSeries, Parity};
use thetalift::special::SpectralParam;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("missing header line `kind=maass|half t=<real>`")]
    MissingHeader,
    #[error("invariant violated ({invariant}): {detail}")]
    Invariant { invariant: &'static str, detail: String },
    #[error(transparent)]
    Series(AutomorphicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Maass,
    Half,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Maass => "maass",
            Kind::Half => "half",
        }
    }
}

/// One data line, keeping its original spelling for re-serialization.
#[derive(Clone, Debug, PartialEq)]
struct Record {
    n: i64,
    value: f64,
    text: String,
}

/// A parsed coefficient file.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffFile {
    pub kind: Kind,
    pub t: SpectralParam,
    pub parity: Parity,
    header: String,
    records: Vec<Record>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim_end()
}

fn parse_header(line: &str, no: usize) -> Result<(Kind, SpectralParam, Parity), IngestError> {
    let bad = |msg: String| IngestError::Malformed { line: no, msg };
    let (mut kind, mut t, mut parity) = (None, None, Parity::Even);
    for field in line.split_whitespace() {
        let (key, val) = field.split_once('=').ok_or_else(|| bad(format!("header field `{field}` is not key=value")))?;
        match key {
            "kind" => {
                kind = Some(match val {
                    "maass" => Kind::Maass,
                    "half" => Kind::Half,
                    _ => return Err(bad(format!("unknown kind `{val}`"))),
                })
            }
            "t" => {
                // `t=<s>i` for an imaginary parameter
                let (num, imag) = match val.strip_suffix('i') {
                    Some(s) => (s, true),
                    None => (val, false),
                };
                let v: f64 = num.parse().map_err(|_| bad(format!("t = `{val}` is not a real number")))?;
                let param = if imag { SpectralParam::imaginary(v) } else { SpectralParam::real(v) };
                t = Some(param.map_err(|e| bad(e.to_string()))?);
            }
            "parity" => {
                parity = match val {
                    "even" => Parity::Even,
                    "odd" => Parity::Odd,
                    _ => return Err(bad(format!("unknown parity `{val}`"))),
                }
            }
            _ => return Err(bad(format!("unknown header key `{key}`"))),
        }
    }
    let kind = kind.ok_or_else(|| bad("header lacks kind=".into()))?;
    let t = t.ok_or_else(|| bad("header lacks t=".into()))?;
    Ok((kind, t, parity))
}

impl CoeffFile {
    pub fn parse(src: &str) -> Result<Self, IngestError> {
        let mut header = None;
        let mut records: Vec<Record> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in src.lines().enumerate() {
            let no = i + 1;
            let line = strip_comment(raw);
            if line.trim().is_empty() {
                continue;
            }
            if header.is_none() {
                let parsed = parse_header(line, no)?;
                header = Some((parsed, line.to_string()));
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(n), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(IngestError::Malformed { line: no, msg: format!("expected `n value`, got `{}`", line.trim()) });
            };
            let n: i64 = n
                .parse()
                .map_err(|_| IngestError::Malformed { line: no, msg: format!("index `{n}` is not an integer") })?;
            let value: f64 = v
                .parse()
                .map_err(|_| IngestError::Malformed { line: no, msg: format!("value `{v}` is not a decimal real") })?;
            if !value.is_finite() {
                return Err(IngestError::Malformed { line: no, msg: format!("value `{v}` is not finite") });
            }
            if !seen.insert(n) {
                return Err(IngestError::Malformed { line: no, msg: format!("index {n} repeated") });
            }
            records.push(Record { n, value, text: line.to_string() });
        }
        let ((kind, t, parity), header) = header.ok_or(IngestError::MissingHeader)?;
        let file = CoeffFile { kind, t, parity, header, records };
        file.to_series()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, IngestError> {
        let src = std::fs::read_to_string(path)
            .map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
        CoeffFile::parse(&src)
    }

    /// Canonical file for a series; values use the shortest round-trip
    /// spelling.
    pub fn from_series(series: &CoefficientSeries) -> Self {
        let kind = match series.kind() {
            thetalift::automorphic::SeriesKind::MaassIntegral => Kind::Maass,
            thetalift::automorphic::SeriesKind::HalfIntegral => Kind::Half,
        };
        let t = match series.t() {
            SpectralParam::Real(t) => format!("{t:?}"),
            SpectralParam::Imaginary(s) => format!("{s:?}i"),
        };
        let mut header = format!("kind={} t={t}", kind.as_str());
        if series.parity() == Parity::Odd {
            header.push_str(" parity=odd");
        }
        let records = series
            .coefficients()
            .iter()
            .map(|(&n, &value)| Record { n, value, text: format!("{n} {value:?}") })
            .collect();
        CoeffFile { kind, t: series.t(), parity: series.parity(), header, records }
    }

    /// Header and data lines, comments and blank lines dropped.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.header).expect("writing to a String");
        for r in &self.records {
            writeln!(out, "{}", r.text).expect("writing to a String");
        }
        out
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_series(&self) -> Result<CoefficientSeries, IngestError> {
        let t = self.t;
        let series = match self.kind {
            Kind::Maass => {
                let mut pairs = Vec::with_capacity(self.records.len());
                for r in &self.records {
                    if r.n < 1 {
                        return Err(IngestError::Invariant {
                            invariant: "Maass indices are positive",
                            detail: format!("index {}", r.n),
                        });
                    }
                    pairs.push((r.n as u64, r.value));
                }
                CoefficientSeries::maass(t, pairs).and_then(|s| s.with_parity(self.parity))
            }
            Kind::Half => {
                if self.parity == Parity::Odd {
                    return Err(IngestError::Invariant {
                        invariant: "parity applies to Maass series only",
                        detail: "parity=odd on a half file".into(),
                    });
                }
                CoefficientSeries::half_integral(t, self.records.iter().map(|r| (r.n, r.value)))
            }
        };
        series.map_err(|e| match e {
            AutomorphicError::InvalidSeries { invariant, detail } => IngestError::Invariant { invariant, detail },
            other => IngestError::Series(other),
        })
    }
}

/// `src` with comments and blank lines removed, as [`CoeffFile::serialize`]
/// would print it.
pub fn strip_comments(src: &str) -> String {
    src.lines()
        .map(strip_comment)
        .filter(|l| !l.trim().is_empty())
        .fold(String::new(), |mut out, l| {
            out.push_str(l);
            out.push('\n');
            out
        })
}
