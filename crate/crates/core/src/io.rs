//! CSV formats: edge lists, panels, metric matrices and significance tables.
//!
//! Edge list: header `src,dst`, 0-based ids, one undirected edge per row.
//!
//! Panel, wide: header `region_0,...,region_{n-1}`, then one row of `n`
//! reals per time. Panel, long: header `region,time,value` with 0-based
//! integer region and time ids; every `(region, time)` pair exactly once.
//!
//! Significance table:
//! `region,statistic,centered_deviation,sign,p_raw,p_mc,p_adj,sig_05,sig_01`
//! with `p_mc` empty when no Monte Carlo p-values were computed.

use std::io::{Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};

use crate::error::{Error, Result};
use crate::graph::WeightGraph;
use crate::linalg::MetricMatrix;
use crate::panel::PanelMatrix;

pub const SIGNIFICANCE_HEADER: [&str; 9] = [
    "region",
    "statistic",
    "centered_deviation",
    "sign",
    "p_raw",
    "p_mc",
    "p_adj",
    "sig_05",
    "sig_01",
];

struct Source<'a> {
    name: &'a str,
}

impl Source<'_> {
    fn err(&self, line: u64, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.name.to_string(),
            line,
            msg: msg.into(),
        }
    }

    fn record_line(record: &StringRecord) -> u64 {
        record.position().map(|p| p.line()).unwrap_or(0)
    }

    fn read_all(&self, reader: impl Read, has_headers: bool) -> Result<(Vec<String>, Vec<StringRecord>)> {
        let mut rdr = ReaderBuilder::new()
            .has_headers(has_headers)
            .trim(Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let header = if has_headers {
            rdr.headers()
                .map_err(|e| self.csv_err(e))?
                .iter()
                .map(str::to_string)
                .collect()
        } else {
            Vec::new()
        };
        let mut records = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| self.csv_err(e))?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            records.push(rec);
        }
        Ok((header, records))
    }

    fn csv_err(&self, e: csv::Error) -> Error {
        let line = e.position().map(|p| p.line()).unwrap_or(0);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            kind => self.err(line, format!("{kind:?}")),
        }
    }

    fn field<T: std::str::FromStr>(&self, rec: &StringRecord, idx: usize, what: &str) -> Result<T> {
        let line = Self::record_line(rec);
        let raw = rec
            .get(idx)
            .ok_or_else(|| self.err(line, format!("missing {what}")))?;
        raw.parse()
            .map_err(|_| self.err(line, format!("invalid {what} '{raw}'")))
    }
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

/// Reads `src,dst` rows. Returns the edges and `1 + max id` (0 when empty).
pub fn read_edge_list(reader: impl Read, name: &str) -> Result<(Vec<(usize, usize)>, usize)> {
    let src = Source { name };
    let (header, records) = src.read_all(reader, true)?;
    if header != ["src", "dst"] {
        return Err(src.err(1, format!("expected header 'src,dst', found '{}'", header.join(","))));
    }
    let mut edges = Vec::with_capacity(records.len());
    let mut max_id = None;
    for rec in &records {
        let line = Source::record_line(rec);
        if rec.len() != 2 {
            return Err(src.err(line, format!("expected 2 fields, found {}", rec.len())));
        }
        let a: usize = src.field(rec, 0, "src id")?;
        let b: usize = src.field(rec, 1, "dst id")?;
        if a == b {
            return Err(src.err(line, format!("self-loop at vertex {a}")));
        }
        max_id = Some(max_id.unwrap_or(0).max(a).max(b));
        edges.push((a, b));
    }
    Ok((edges, max_id.map_or(0, |m| m + 1)))
}

/// Reads an edge list and builds a graph on `n` vertices (or `1 + max id`).
pub fn load_graph(path: &Path, n: Option<usize>) -> Result<WeightGraph> {
    let name = path.display().to_string();
    let (edges, inferred) = read_edge_list(open(path)?, &name)?;
    let n = n.unwrap_or(inferred);
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(Error::Parse {
            path: name,
            line: 0,
            msg: format!("edge ({a}, {b}) references a vertex outside 0..{n}"),
        });
    }
    WeightGraph::from_edge_list(n, &edges)
}

pub fn write_edge_list(g: &WeightGraph, mut out: impl Write) -> Result<()> {
    writeln!(out, "src,dst")?;
    for (a, b) in g.edges() {
        writeln!(out, "{a},{b}")?;
    }
    Ok(())
}

/// Reads a panel in wide or long format, detected from the header.
pub fn read_panel(reader: impl Read, name: &str) -> Result<PanelMatrix> {
    let src = Source { name };
    let (header, records) = src.read_all(reader, true)?;
    if records.is_empty() {
        return Err(src.err(1, "panel has no data rows"));
    }
    let values = |rec: &StringRecord| -> Result<Vec<f64>> {
        (0..rec.len()).map(|k| src.field(rec, k, "value")).collect()
    };
    if header == ["region", "time", "value"] {
        let mut cells = Vec::with_capacity(records.len());
        let (mut n, mut t) = (0, 0);
        for rec in &records {
            let region: usize = src.field(rec, 0, "region id")?;
            let time: usize = src.field(rec, 1, "time id")?;
            let v: f64 = src.field(rec, 2, "value")?;
            n = n.max(region + 1);
            t = t.max(time + 1);
            cells.push((region, time, v, Source::record_line(rec)));
        }
        let mut rows = vec![vec![f64::NAN; n]; t];
        let mut filled = 0;
        for (region, time, v, line) in cells {
            if !rows[time][region].is_nan() {
                return Err(src.err(line, format!("duplicate cell (region {region}, time {time})")));
            }
            if !v.is_finite() {
                return Err(src.err(line, "non-finite value"));
            }
            rows[time][region] = v;
            filled += 1;
        }
        if filled != n * t {
            return Err(src.err(0, format!("long panel covers {filled} of {n} x {t} cells")));
        }
        return PanelMatrix::from_rows(&rows);
    }
    let n = header.len();
    let mut rows = Vec::with_capacity(records.len());
    for rec in &records {
        let line = Source::record_line(rec);
        if rec.len() != n {
            return Err(src.err(line, format!("expected {n} values, found {}", rec.len())));
        }
        let row = values(rec)?;
        if let Some(k) = row.iter().position(|v| !v.is_finite()) {
            return Err(src.err(line, format!("non-finite value in column {k}")));
        }
        rows.push(row);
    }
    PanelMatrix::from_rows(&rows)
}

pub fn load_panel(path: &Path) -> Result<PanelMatrix> {
    read_panel(open(path)?, &path.display().to_string())
}

pub fn write_panel(data: &PanelMatrix, mut out: impl Write) -> Result<()> {
    let header: Vec<String> = (0..data.regions()).map(|i| format!("region_{i}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in data.to_rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Reads a headerless square matrix of reals as a metric matrix.
pub fn read_metric_matrix(reader: impl Read, name: &str) -> Result<MetricMatrix> {
    let src = Source { name };
    let (_, records) = src.read_all(reader, false)?;
    let dim = records.len();
    let mut values = Vec::with_capacity(dim * dim);
    for rec in &records {
        if rec.len() != dim {
            return Err(src.err(
                Source::record_line(rec),
                format!("metric matrix row has {} entries, expected {dim}", rec.len()),
            ));
        }
        for k in 0..dim {
            values.push(src.field::<f64>(rec, k, "matrix entry")?);
        }
    }
    MetricMatrix::new(dim, values)
}

pub fn load_metric_matrix(path: &Path) -> Result<MetricMatrix> {
    read_metric_matrix(open(path)?, &path.display().to_string())
}

/// One output row of a local test.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceRecord {
    pub region: usize,
    pub statistic: f64,
    pub centered_deviation: f64,
    pub sign: i8,
    pub p_raw: f64,
    pub p_mc: Option<f64>,
    pub p_adj: f64,
    pub sig_05: bool,
    pub sig_01: bool,
}

pub fn write_significance(records: &[SignificanceRecord], mut out: impl Write) -> Result<()> {
    writeln!(out, "{}", SIGNIFICANCE_HEADER.join(","))?;
    for r in records {
        let p_mc = r.p_mc.map(|p| p.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.region,
            r.statistic,
            r.centered_deviation,
            r.sign,
            r.p_raw,
            p_mc,
            r.p_adj,
            u8::from(r.sig_05),
            u8::from(r.sig_01)
        )?;
    }
    Ok(())
}

pub fn read_significance(reader: impl Read, name: &str) -> Result<Vec<SignificanceRecord>> {
    let src = Source { name };
    let (header, records) = src.read_all(reader, true)?;
    if header != SIGNIFICANCE_HEADER {
        return Err(src.err(
            1,
            format!("expected header '{}'", SIGNIFICANCE_HEADER.join(",")),
        ));
    }
    let flag = |rec: &StringRecord, idx: usize, what: &str| -> Result<bool> {
        match src.field::<u8>(rec, idx, what)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(src.err(Source::record_line(rec), format!("{what} must be 0 or 1, got {v}"))),
        }
    };
    records
        .iter()
        .map(|rec| {
            let p_mc = match rec.get(5) {
                Some("") | None => None,
                Some(_) => Some(src.field(rec, 5, "p_mc")?),
            };
            Ok(SignificanceRecord {
                region: src.field(rec, 0, "region")?,
                statistic: src.field(rec, 1, "statistic")?,
                centered_deviation: src.field(rec, 2, "centered_deviation")?,
                sign: src.field(rec, 3, "sign")?,
                p_raw: src.field(rec, 4, "p_raw")?,
                p_mc,
                p_adj: src.field(rec, 6, "p_adj")?,
                sig_05: flag(rec, 7, "sig_05")?,
                sig_01: flag(rec, 8, "sig_01")?,
            })
        })
        .collect()
}

pub fn load_significance(path: &Path) -> Result<Vec<SignificanceRecord>> {
    read_significance(open(path)?, &path.display().to_string())
}
