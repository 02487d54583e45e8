//! On-disk formats: point clouds and graphs as JSON, a binary graph format,
//! result JSON and CSV tables.

use std::cmp::Ordering;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nibblepack_core::graph::Graph;
use nibblepack_core::pointproc::{Domain, DomainKind, PointCloud};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Version string embedded in every JSON artifact.
pub const VERSION: &str = concat!("nibblepack ", env!("CARGO_PKG_VERSION"));

/// Seed, parameters and version of the run that wrote an artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub params: Value,
}

impl Provenance {
    pub fn new(seed: u64, params: Value) -> Self {
        Provenance {
            version: VERSION.to_string(),
            seed,
            params,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKindTag {
    Box,
    Ball,
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainJson {
    pub kind: DomainKindTag,
    /// Side of the box or radius of the ball; `null` for the sphere.
    pub param: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudFile {
    pub dim: usize,
    pub domain: DomainJson,
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// The same cloud with its points in lexicographic order.
pub fn sort_cloud(cloud: PointCloud) -> PointCloud {
    let mut order: Vec<u32> = (0..cloud.len() as u32).collect();
    order.sort_by(|&i, &j| lexicographic(cloud.point(i as usize), cloud.point(j as usize)));
    if order.iter().enumerate().all(|(k, &i)| k == i as usize) {
        return cloud;
    }
    cloud.subset(&order)
}

impl CloudFile {
    /// Points are written in lexicographic order.
    pub fn from_cloud(cloud: &PointCloud, provenance: Option<Provenance>) -> Self {
        let domain = cloud.domain();
        let (kind, param) = match domain.kind {
            DomainKind::PeriodicBox { side } => (DomainKindTag::Box, Some(side)),
            DomainKind::Ball { radius } => (DomainKindTag::Ball, Some(radius)),
            DomainKind::UnitSphere => (DomainKindTag::Sphere, None),
        };
        let mut points: Vec<Vec<f64>> = cloud.points().map(<[f64]>::to_vec).collect();
        points.sort_by(|a, b| lexicographic(a, b));
        CloudFile {
            dim: domain.dim,
            domain: DomainJson { kind, param },
            seed: cloud.seed,
            points,
            provenance,
        }
    }

    pub fn to_cloud(&self) -> std::result::Result<PointCloud, String> {
        let param = |what| self.domain.param.ok_or(format!("{what} needs a param"));
        let domain = match self.domain.kind {
            DomainKindTag::Box => Domain::periodic_box(self.dim, param("box")?),
            DomainKindTag::Ball => Domain::ball(self.dim, param("ball")?),
            DomainKindTag::Sphere => Domain::unit_sphere(self.dim),
        }
        .map_err(|e| e.to_string())?;
        if let Some(p) = self.points.iter().find(|p| p.len() != self.dim) {
            return Err(format!("point {p:?} does not have {} coordinates", self.dim));
        }
        let coords = self.points.concat();
        PointCloud::new(domain, coords, self.seed).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    /// `u < v`, sorted.
    pub edges: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl GraphFile {
    pub fn from_graph(g: &Graph, provenance: Option<Provenance>) -> Self {
        GraphFile {
            n: g.n(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            provenance,
        }
    }

    pub fn to_graph(&self) -> std::result::Result<Graph, String> {
        let edges: Vec<(u32, u32)> = self.edges.iter().map(|&[u, v]| (u, v)).collect();
        Graph::from_edges(self.n, &edges).map_err(|e| e.to_string())
    }
}

/// Magic bytes of the binary graph format: `NPG1`, then little-endian `u32`
/// vertex and edge counts, then one little-endian `u32` pair per edge.
pub const BINARY_MAGIC: &[u8; 4] = b"NPG1";

pub fn write_graph_binary(path: &Path, g: &Graph) -> Result<()> {
    let io = |e| CliError::io(path, e);
    let too_big = |what| CliError::Config(format!("{what} does not fit the binary format's u32 counts"));
    let n = u32::try_from(g.n()).map_err(|_| too_big("vertex count"))?;
    let m = u32::try_from(g.edge_count()).map_err(|_| too_big("edge count"))?;
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(BINARY_MAGIC).map_err(io)?;
    w.write_all(&n.to_le_bytes()).map_err(io)?;
    w.write_all(&m.to_le_bytes()).map_err(io)?;
    for (u, v) in g.edges() {
        w.write_all(&u.to_le_bytes()).map_err(io)?;
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn parse_binary(path: &Path, bytes: &[u8]) -> Result<Graph> {
    let bad = |message: String| CliError::Format {
        what: "binary graph",
        path: path.to_path_buf(),
        message,
    };
    let words: Vec<u32> = bytes
        .get(4..)
        .filter(|rest| rest.len() % 4 == 0 && rest.len() >= 8)
        .ok_or_else(|| bad("truncated header or body".into()))?
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let (n, m) = (words[0] as usize, words[1] as usize);
    if words.len() != 2 + 2 * m {
        return Err(bad(format!(
            "header announces {m} edges, body holds {}",
            (words.len() - 2) / 2
        )));
    }
    let edges: Vec<(u32, u32)> = words[2..].chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Graph::from_edges(n, &edges).map_err(|e| bad(e.to_string()))
}

/// Reads either format, recognising the binary one by its magic bytes.
pub fn read_graph(path: &Path) -> Result<Graph> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(BINARY_MAGIC) {
        return parse_binary(path, &bytes);
    }
    let file: GraphFile = parse_json(path, "graph JSON", &bytes)?;
    file.to_graph().map_err(|message| CliError::Format {
        what: "graph JSON",
        path: path.to_path_buf(),
        message,
    })
}

pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_json(path, "graph JSON", &bytes)
}

pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let file: CloudFile = parse_json(path, "point cloud JSON", &bytes)?;
    file.to_cloud().map_err(|message| CliError::Format {
        what: "point cloud JSON",
        path: path.to_path_buf(),
        message,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &'static str, bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Format {
        what,
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Compact JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_json_with(path, value, false)
}

/// Indented JSON with a trailing newline.
pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_json_with(path, value, true)
}

fn write_json_with<T: Serialize>(path: &Path, value: &T, pretty: bool) -> Result<()> {
    let io = |e| CliError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let written = if pretty {
        serde_json::to_writer_pretty(&mut w, value)
    } else {
        serde_json::to_writer(&mut w, value)
    };
    written.map_err(|e| CliError::io(path, e.into()))?;
    w.write_all(b"\n").map_err(io)?;
    w.flush().map_err(io)
}

/// Writes `header` even when there are no rows.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let csv_err = |e: csv::Error| CliError::io(path, e.into());
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// The result of `pack`, `code` and `nibble`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    /// Point indices into the written cloud, or vertices of the input graph.
    pub independent_set: Vec<u32>,
    pub size: usize,
    pub verified: bool,
    pub seed: u64,
    pub params: Value,
    pub version: String,
    pub report: Value,
}

pub const TRACE_HEADER: [&str; 9] = [
    "i", "n_i", "delta_i", "delta2_i", "A_i", "eGA_i", "I_i", "retries", "ms",
];

/// One row of the trace CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub i: usize,
    pub n_i: usize,
    pub delta_i: usize,
    pub delta2_i: usize,
    #[serde(rename = "A_i")]
    pub a_i: usize,
    #[serde(rename = "eGA_i")]
    pub e_ga_i: usize,
    #[serde(rename = "I_i")]
    pub i_i: usize,
    pub retries: usize,
    pub ms: u64,
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e.into()))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::Format {
            what: "CSV",
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}
