//! Reading graphs and features, writing dumps.
//!
//! Floats are written in Rust's shortest round-trip form, so a value read
//! back parses to the same bits; infinite deaths are written as `inf`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{Filtration, FiltrationEntry, Metric, WeightedGraph};
use crate::error::{Error, Result};
use crate::linalg::Field;
use crate::local_sheaf::LocalStalk;
use crate::persistence::{Diagram, PersistentCocycle};

/// Shortest round-trip text of a float; `inf` for positive infinity.
pub fn fmt_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_owned()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        format!("{x:?}")
    }
}

/// JSON number, or the string `"inf"` for infinite values.
pub fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(fmt_float(x)), Value::Number)
}

/// Nonblank, non-comment rows of a comma separated file with their 1-based
/// line numbers and trimmed fields.
fn csv_rows(path: &Path) -> Result<Vec<(u64, Vec<String>)>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| (i as u64 + 1, l.split(',').map(|x| x.trim().to_owned()).collect()))
        .collect())
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), line, message: message.into() }
}

/// Reads `u,v,w` rows. The vertex count is one more than the largest id.
pub fn read_edge_csv(path: &Path) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (line, rec) in csv_rows(path)? {
        if rec.len() != 3 {
            return Err(parse_error(path, line, format!("expected 3 fields u,v,w, found {}", rec.len())));
        }
        let id = |i: usize| {
            rec[i].parse::<usize>().map_err(|_| parse_error(path, line, format!("bad vertex id {:?}", rec[i])))
        };
        let (u, v) = (id(0)?, id(1)?);
        let w: f64 = rec[2].parse().map_err(|_| parse_error(path, line, format!("bad weight {:?}", rec[2])))?;
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    WeightedGraph::new(n, edges).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Reads one point per row, all rows with the same number of coordinates.
pub fn read_point_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in csv_rows(path)? {
        let p = rec
            .iter()
            .map(|x| x.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| parse_error(path, line, "coordinates must be finite numbers"))?;
        if let Some(first) = points.first() {
            if first.len() != p.len() {
                return Err(parse_error(path, line, format!("expected {} coordinates, found {}", first.len(), p.len())));
            }
        }
        points.push(p);
    }
    Ok(points)
}

pub fn read_point_graph(path: &Path, metric: Metric, knn: Option<usize>) -> Result<WeightedGraph> {
    let points = read_point_csv(path)?;
    WeightedGraph::from_points(&points, metric, knn).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// One JSON object per line inside a top-level array.
fn json_lines<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::from("[\n");
    for (i, item) in items.iter().enumerate() {
        out.push_str("  ");
        out.push_str(&serde_json::to_string(item)?);
        out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    Ok(out)
}

pub fn filtration_json(filtration: &Filtration) -> Result<String> {
    json_lines(&filtration.to_entries())
}

pub fn read_filtration_json(path: &Path, dim_cap: Option<usize>) -> Result<Filtration> {
    let text = std::fs::read_to_string(path)?;
    let entries: Vec<FiltrationEntry> =
        serde_json::from_str(&text).map_err(|e| parse_error(path, e.line() as u64, e.to_string()))?;
    Filtration::from_entries(&entries, dim_cap)
}

#[derive(Serialize)]
struct CoeffDump {
    simplex_index: usize,
    coeff: f64,
}

#[derive(Serialize)]
struct CocycleDump {
    k: usize,
    birth: Value,
    death: Value,
    birth_index: usize,
    death_index: Option<usize>,
    representative: Vec<CoeffDump>,
}

fn cocycle_dump<F: Field>(c: &PersistentCocycle<F>) -> CocycleDump {
    CocycleDump {
        k: c.order,
        birth: float_value(c.birth),
        death: float_value(c.death),
        birth_index: c.birth_index,
        death_index: c.death_index,
        representative: c.representative.iter().map(|(i, x)| CoeffDump { simplex_index: *i, coeff: x.to_f64() }).collect(),
    }
}

pub fn diagram_json<F: Field>(diagram: &Diagram<F>) -> Result<String> {
    json_lines(&diagram.cocycles.iter().map(cocycle_dump).collect::<Vec<_>>())
}

/// `k,birth,death` rows with a header line.
pub fn diagram_csv<F: Field>(diagram: &Diagram<F>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "birth", "death"]).map_err(csv_io)?;
    for c in &diagram.cocycles {
        w.write_record([c.order.to_string(), fmt_float(c.birth), fmt_float(c.death)]).map_err(csv_io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Serialize)]
struct StalkDump {
    vertex: usize,
    cocycles: Vec<CocycleDump>,
}

pub fn stalks_json<F: Field>(stalks: &[LocalStalk<F>]) -> Result<String> {
    let dumps: Vec<StalkDump> = stalks
        .iter()
        .map(|s| StalkDump { vertex: s.vertex, cocycles: s.cocycles.iter().map(cocycle_dump).collect() })
        .collect();
    json_lines(&dumps)
}

/// Per-channel features: `vertex -> cocycle index -> value`.
pub type FeatureFile = Vec<BTreeMap<usize, BTreeMap<usize, f64>>>;

pub fn read_features(path: &Path) -> Result<FeatureFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e.line() as u64, e.to_string()))
}

pub fn features_json(features: &FeatureFile) -> Result<String> {
    json_lines(features)
}

/// `step,energy` rows with a header line.
pub fn trace_csv(energies: &[f64]) -> String {
    let mut out = String::from("step,energy\n");
    for (i, e) in energies.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_float(*e)));
    }
    out
}

/// Parameter file: u64 little-endian header length, JSON header, then the
/// parameters as little-endian f64.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamHeader {
    pub widths: Vec<usize>,
    pub activation: String,
    pub seed: Option<u64>,
    pub count: usize,
}

pub fn write_params(path: &Path, header: &ParamHeader, params: &[f64]) -> Result<()> {
    if header.count != params.len() {
        return Err(Error::contract(format!("header declares {} parameters, got {}", header.count, params.len())));
    }
    let head = serde_json::to_vec(header)?;
    let mut bytes = Vec::with_capacity(8 + head.len() + 8 * params.len());
    bytes.extend_from_slice(&(head.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&head);
    for p in params {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn read_params(path: &Path) -> Result<(ParamHeader, Vec<f64>)> {
    let bytes = std::fs::read(path)?;
    let bad = |m: &str| Error::Config(format!("{}: {m}", path.display()));
    let len = bytes.get(..8).ok_or_else(|| bad("truncated header length"))?;
    let len = u64::from_le_bytes(len.try_into().expect("8 bytes")) as usize;
    let head = bytes.get(8..8 + len).ok_or_else(|| bad("truncated header"))?;
    let header: ParamHeader = serde_json::from_slice(head)?;
    let body = &bytes[8 + len..];
    if body.len() != 8 * header.count {
        return Err(bad("parameter count does not match the header"));
    }
    let params = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((header, params))
}
