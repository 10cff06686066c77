//! Graph-based FR codes, built-in fixtures, and multi-record code databases.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::incidence::{self, validate_fr, FrCode, FrParams, IncidenceStructure, NotRegular};

/// An undirected multigraph. Parallel edges are allowed; loops are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Self {
        GraphSpec {
            num_vertices,
            edges,
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Edge-list text: the vertex count on the first line, then one `a b`
    /// pair per line. `#` lines and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (no, first) = lines
            .next()
            .ok_or_else(|| Error::format(1, "missing vertex count"))?;
        let num_vertices: usize = first
            .parse()
            .map_err(|_| Error::format(no, format!("bad vertex count `{first}`")))?;
        let mut edges = Vec::new();
        for (no, line) in lines {
            let ends: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::format(no, format!("bad edge `{line}`")))?;
            let [a, b] = ends[..] else {
                return Err(Error::format(no, format!("edge needs two endpoints: `{line}`")));
            };
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::format(no, format!("endpoint out of range in `{line}`")));
            }
            edges.push((a, b));
        }
        Ok(GraphSpec::new(num_vertices, edges))
    }
}

/// One block per edge, incident with its two endpoints. A `ρ`-regular graph
/// on `v` vertices with `n` edges gives an `(n, 2, v, ρ)` code.
pub fn from_regular_graph(g: &GraphSpec) -> Result<FrCode> {
    if g.edges.is_empty() {
        return Err(Error::Argument("graph has no edges".into()));
    }
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        if a >= g.num_vertices || b >= g.num_vertices {
            return Err(Error::Argument(format!("edge {i} ({a},{b}) has an endpoint out of range")));
        }
        if a == b {
            return Err(Error::Argument(format!("edge {i} is a self-loop at vertex {a}")));
        }
    }
    let deg = g.degrees();
    if let Some(bad) = deg.iter().position(|&d| d != deg[0]) {
        return Err(Error::Argument(format!(
            "graph is not regular: vertex {bad} has degree {}, vertex 0 has degree {}",
            deg[bad], deg[0]
        )));
    }
    let s = IncidenceStructure::from_rows(g.num_vertices, g.edges.iter().map(|&(a, b)| [a, b]))?;
    Ok(validate_fr(&s).expect("regular loopless graph yields an FR code"))
}

/// Edges of `K_t` in lexicographic order of `(min, max)` endpoint.
pub fn complete_graph_edges(t: usize) -> Vec<(usize, usize)> {
    (0..t)
        .flat_map(|a| (a + 1..t).map(move |b| (a, b)))
        .collect()
}

/// Blocks are the `t` vertices of `K_t`, points its edges; a
/// `(t, t−1, t(t−1)/2, 2)` code.
pub fn complete_graph_code(t: usize) -> Result<FrCode> {
    if t < 3 {
        return Err(Error::Argument(format!("complete graph code needs t >= 3, got {t}")));
    }
    let edges = complete_graph_edges(t);
    let rows = (0..t).map(|vtx| {
        edges
            .iter()
            .enumerate()
            .filter(move |(_, &(a, b))| a == vtx || b == vtx)
            .map(|(j, _)| j)
            .collect::<Vec<_>>()
    });
    let s = IncidenceStructure::from_rows(edges.len(), rows)?;
    Ok(validate_fr(&s).expect("K_t edge incidence is regular"))
}

/// The codes printed as worked examples, shipped verbatim.
pub mod fixtures {
    use super::*;

    pub const NAMES: [&str; 3] = ["example2", "example2-dual", "example3-petersen"];

    const EXAMPLE2: [&str; 5] = [
        "1111000000",
        "1000111000",
        "0100100110",
        "0010010101",
        "0001001011",
    ];

    const EXAMPLE2_DUAL: [&str; 10] = [
        "11000", "10100", "10010", "10001", "01100", "01010", "01001", "00110", "00101", "00011",
    ];

    const EXAMPLE3: [&str; 15] = [
        "1100000000",
        "1010000000",
        "1001000000",
        "0100100000",
        "0100010000",
        "0010001000",
        "0010000100",
        "0001000010",
        "0001000001",
        "0000110000",
        "0000101000",
        "0000010100",
        "0000001010",
        "0000000101",
        "0000000011",
    ];

    /// Edge order that regenerates the `example3-petersen` matrix row by row.
    pub const EXAMPLE3_EDGES: [(usize, usize); 15] = [
        (0, 1),
        (0, 2),
        (0, 3),
        (1, 4),
        (1, 5),
        (2, 6),
        (2, 7),
        (3, 8),
        (3, 9),
        (4, 5),
        (4, 6),
        (5, 7),
        (6, 8),
        (7, 9),
        (8, 9),
    ];

    fn literal(rows: &[&str]) -> IncidenceStructure {
        let matrix: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| r.bytes().map(|b| b - b'0').collect())
            .collect();
        IncidenceStructure::from_matrix(&matrix).expect("fixture is well formed")
    }

    /// `(5,4,10,2)`: vertices of `K_5` against its edges.
    pub fn example2() -> IncidenceStructure {
        literal(&EXAMPLE2)
    }

    /// `(10,2,5,4)`: the transpose of [`example2`].
    pub fn example2_dual() -> IncidenceStructure {
        literal(&EXAMPLE2_DUAL)
    }

    /// `(15,2,10,3)`: edges of a cubic graph on ten vertices.
    pub fn example3_petersen() -> IncidenceStructure {
        literal(&EXAMPLE3)
    }

    pub fn by_name(name: &str) -> Option<IncidenceStructure> {
        match name {
            "example2" => Some(example2()),
            "example2-dual" => Some(example2_dual()),
            "example3-petersen" => Some(example3_petersen()),
            _ => None,
        }
    }
}

/// One labelled matrix from a database file.
#[derive(Debug, Clone)]
pub struct DatabaseRecord {
    pub label: String,
    pub structure: IncidenceStructure,
    pub validation: std::result::Result<FrParams, NotRegular>,
}

#[derive(Debug, Clone, Default)]
pub struct Database {
    pub records: Vec<DatabaseRecord>,
    /// Records skipped in lenient mode, with the reason.
    pub skipped: Vec<Error>,
}

/// Parses blank-line-separated records, each a `# label: <name>` comment
/// followed by an incidence matrix. Without `lenient`, the first bad record
/// aborts; with it, bad records are collected in [`Database::skipped`].
pub fn parse_database(text: &str, lenient: bool) -> Result<Database> {
    let mut db = Database::default();
    let lines: Vec<(usize, &str)> = text.split('\n').enumerate().map(|(i, l)| (i + 1, l)).collect();
    let chunks = lines
        .split(|(_, l)| l.is_empty())
        .filter(|c| !c.is_empty());
    for (index, chunk) in chunks.enumerate() {
        let label = chunk
            .iter()
            .take_while(|(_, l)| l.starts_with('#'))
            .find_map(|(_, l)| l.strip_prefix('#')?.trim_start().strip_prefix("label:"))
            .map(|l| l.trim().to_string())
            .unwrap_or_else(|| format!("record-{index}"));
        let mut it = chunk.iter().copied();
        let parsed = incidence::parse_lines(&mut it).and_then(|s| match it.next() {
            Some((no, _)) => Err(Error::format(no, "unexpected line after matrix")),
            None => Ok(s),
        });
        match parsed {
            Ok(structure) => {
                let validation = validate_fr(&structure).map(|c| c.params());
                db.records.push(DatabaseRecord {
                    label,
                    structure,
                    validation,
                });
            }
            Err(e) => {
                let err = Error::Record {
                    record: index,
                    label,
                    source: Box::new(e),
                };
                if !lenient {
                    return Err(err);
                }
                db.skipped.push(err);
            }
        }
    }
    Ok(db)
}

pub fn load_database(path: impl AsRef<std::path::Path>, lenient: bool) -> Result<Database> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    parse_database(&text, lenient)
}

/// Inverse of [`parse_database`] up to comment normalization.
pub fn serialize_database<'a>(records: impl IntoIterator<Item = (&'a str, &'a IncidenceStructure)>) -> String {
    records
        .into_iter()
        .map(|(label, s)| format!("# label: {label}\n{}", s.to_text()))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Summary of one record, for structured output.
#[derive(Debug, Clone, Serialize)]
pub struct RecordSummary {
    pub label: String,
    pub n: usize,
    pub v: usize,
    pub params: Option<FrParams>,
}

impl From<&DatabaseRecord> for RecordSummary {
    fn from(r: &DatabaseRecord) -> Self {
        RecordSummary {
            label: r.label.clone(),
            n: r.structure.num_blocks(),
            v: r.structure.num_points(),
            params: r.validation.as_ref().ok().copied(),
        }
    }
}
