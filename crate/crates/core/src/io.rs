//! JSON exchange formats for sets, halfspaces and graphs.
//!
//! ```text
//! set:       {"dim": n, "center": [..], "indep_generators": [[..], ..],
//!             "dep_generators": [[..], ..], "exponents": [[..], ..]}
//! halfspace: {"normal": [..], "offset": x}
//! graph:     {"n": n, "edges": [[i, j], ..]}   (1-based, i < j)
//! ```

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PzError, Result};
use crate::hardness::Graph;
use crate::sets::{Halfspace, PolyZonotope, RawPolyZonotope};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetIn {
    dim: usize,
    center: Vec<f64>,
    #[serde(default)]
    indep_generators: Vec<Vec<f64>>,
    #[serde(default)]
    dep_generators: Vec<Vec<f64>>,
    #[serde(default)]
    exponents: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct SetOut<'a> {
    dim: usize,
    center: &'a [f64],
    indep_generators: &'a [Vec<f64>],
    dep_generators: &'a [Vec<f64>],
    exponents: &'a [Vec<u32>],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfspaceFile {
    normal: Vec<f64>,
    offset: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

fn json_err(e: serde_json::Error) -> PzError {
    PzError::Representation(format!("line {} column {}: {e}", e.line(), e.column()))
}

fn exponent(i: usize, k: usize, x: f64) -> Result<u32> {
    if !(x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= i32::MAX as f64) {
        return Err(PzError::Representation(format!(
            "field `exponents[{i}][{k}]`: {x} is not a nonnegative integer"
        )));
    }
    Ok(x as u32)
}

pub fn parse_set(text: &str) -> Result<PolyZonotope> {
    let raw: SetIn = serde_json::from_str(text).map_err(json_err)?;
    if raw.center.len() != raw.dim {
        return Err(PzError::Representation(format!(
            "field `center`: length {} does not match dim {}",
            raw.center.len(),
            raw.dim
        )));
    }
    let exponents = raw
        .exponents
        .iter()
        .enumerate()
        .map(|(i, col)| {
            col.iter()
                .enumerate()
                .map(|(k, &x)| exponent(i, k, x))
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    RawPolyZonotope {
        center: raw.center,
        indep_generators: raw.indep_generators,
        dep_generators: raw.dep_generators,
        exponents,
    }
    .canonicalize()
}

/// Serialize in canonical form.
pub fn set_to_json(pz: &PolyZonotope) -> String {
    serde_json::to_string_pretty(&SetOut {
        dim: pz.dim(),
        center: pz.center(),
        indep_generators: pz.indep_generators(),
        dep_generators: pz.dep_generators(),
        exponents: pz.exponents(),
    })
    .expect("set serializes")
}

pub fn parse_halfspace(text: &str) -> Result<Halfspace> {
    let h: HalfspaceFile = serde_json::from_str(text).map_err(json_err)?;
    Halfspace::new(h.normal, h.offset)
}

pub fn halfspace_to_json(hs: &Halfspace) -> String {
    serde_json::to_string_pretty(&HalfspaceFile {
        normal: hs.normal().to_vec(),
        offset: hs.offset(),
    })
    .expect("halfspace serializes")
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let g: GraphFile = serde_json::from_str(text).map_err(json_err)?;
    let edges = g
        .edges
        .iter()
        .enumerate()
        .map(|(idx, &[i, j])| {
            if i == 0 || j == 0 {
                return Err(PzError::Representation(format!(
                    "field `edges[{idx}]`: vertices are 1-based"
                )));
            }
            Ok((i - 1, j - 1))
        })
        .collect::<Result<Vec<_>>>()?;
    Graph::new(g.n, edges)
}

pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string(&GraphFile {
        n: g.vertex_count(),
        edges: g.edges().map(|(i, j)| [i + 1, j + 1]).collect(),
    })
    .expect("graph serializes")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| PzError::Io(format!("{}: {e}", path.display())))
}

pub fn read_set(path: &Path) -> Result<PolyZonotope> {
    parse_set(&read(path)?).map_err(|e| annotate(path, e))
}

pub fn read_halfspace(path: &Path) -> Result<Halfspace> {
    parse_halfspace(&read(path)?).map_err(|e| annotate(path, e))
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    parse_graph(&read(path)?).map_err(|e| annotate(path, e))
}

fn annotate(path: &Path, e: PzError) -> PzError {
    match e {
        PzError::Representation(msg) => {
            PzError::Representation(format!("{}: {msg}", path.display()))
        }
        other => other,
    }
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| PzError::Io(format!("{}: {e}", path.display())))?;
    tmp.write_all(contents)?;
    tmp.persist(path)
        .map_err(|e| PzError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}
