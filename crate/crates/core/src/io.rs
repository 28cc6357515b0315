//! Text and binary file formats.
//!
//! * density field: header `field <d> <n1> <n2> [<n3>]`, then one value per line,
//!   first axis fastest. The binary form keeps the header in a `<path>.hdr`
//!   sidecar and stores little-endian `f64`s in the payload.
//! * graph: `v <id> <x> <y> [<z>]` lines then `e <id> <id>` lines.
//! * mask: header `mask <d> <n1> <n2> [<n3>]`, then one `0`/`1` per line.
//! * hidden graph: `n <x> <y> [<z>]` node lines then `a <i> <j>` arc lines.
//!
//! Blank lines and lines starting with `#` are ignored by every reader.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::complex::{GridSpec, ScalarField, SimplicialComplex};
use crate::error::{Error, Result};
use crate::noise_model::{HiddenGraph, NeighborhoodMask, RasterizedGraph};
use crate::persistence::PairingSet;
use crate::reconstruct::ReconstructedGraph;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))
}

fn parse_header(line: usize, text: &str, tag: &str) -> Result<GridSpec> {
    let mut toks = text.split_whitespace();
    if toks.next() != Some(tag) {
        return Err(parse_err(line, format!("expected '{tag}' header")));
    }
    let d: usize = parse_num(line, toks.next(), "dimension")?;
    let extents = (0..d)
        .map(|_| parse_num(line, toks.next(), "extent"))
        .collect::<Result<Vec<usize>>>()?;
    if toks.next().is_some() {
        return Err(parse_err(line, "trailing tokens in header"));
    }
    GridSpec::new(&extents)
}

fn header(tag: &str, grid: &GridSpec) -> String {
    let mut s = format!("{tag} {}", grid.dimension());
    for n in grid.extents() {
        let _ = write!(s, " {n}");
    }
    s
}

pub fn parse_field(text: &str) -> Result<(GridSpec, ScalarField)> {
    let mut lines = content_lines(text);
    let (hl, h) = lines.next().ok_or_else(|| parse_err(1, "empty field file"))?;
    let grid = parse_header(hl, h, "field")?;
    let values = lines
        .map(|(l, s)| parse_num::<f64>(l, Some(s), "value"))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != grid.vertex_count() {
        return Err(Error::InvalidField(format!(
            "expected {} values, found {}",
            grid.vertex_count(),
            values.len()
        )));
    }
    Ok((grid, ScalarField::new(values)?))
}

pub fn format_field(grid: &GridSpec, field: &ScalarField) -> String {
    let mut s = header("field", grid);
    s.push('\n');
    for v in field.values() {
        let _ = writeln!(s, "{v}");
    }
    s
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".hdr");
    PathBuf::from(name)
}

/// Reads a density field; binary when a `<path>.hdr` sidecar exists, text otherwise.
pub fn read_field(path: &Path) -> Result<(GridSpec, ScalarField)> {
    let hdr = sidecar(path);
    if hdr.exists() {
        let head = fs::read_to_string(&hdr)?;
        let (hl, h) = content_lines(&head)
            .next()
            .ok_or_else(|| parse_err(1, "empty header sidecar"))?;
        let grid = parse_header(hl, h, "field")?;
        let bytes = fs::read(path)?;
        if bytes.len() != grid.vertex_count() * 8 {
            return Err(Error::InvalidField(format!(
                "binary payload has {} bytes, expected {}",
                bytes.len(),
                grid.vertex_count() * 8
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        return Ok((grid, ScalarField::new(values)?));
    }
    parse_field(&fs::read_to_string(path)?)
}

pub fn write_field(path: &Path, grid: &GridSpec, field: &ScalarField) -> Result<()> {
    fs::write(path, format_field(grid, field))?;
    Ok(())
}

pub fn write_field_binary(path: &Path, grid: &GridSpec, field: &ScalarField) -> Result<()> {
    fs::write(sidecar(path), header("field", grid) + "\n")?;
    let bytes: Vec<u8> = field.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(path, bytes)?;
    Ok(())
}

/// A graph read back from a graph file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GraphFile {
    pub vertices: Vec<(usize, Vec<f64>)>,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn vertex_ids(&self) -> Vec<usize> {
        self.vertices.iter().map(|(id, _)| *id).collect()
    }

    pub fn betti1(&self) -> usize {
        crate::reconstruct::graph_betti1(&self.vertex_ids(), &self.edges)
    }
}

fn write_graph_lines(
    out: &mut String,
    complex: &SimplicialComplex,
    vertices: &[usize],
    edges: &[[usize; 2]],
) {
    for &v in vertices {
        let _ = write!(out, "v {v}");
        for x in complex.position(v) {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    let mut edges = edges.to_vec();
    edges.sort_unstable();
    for [a, b] in edges {
        let _ = writeln!(out, "e {a} {b}");
    }
}

/// Graph file text; vertex ids are complex vertex indices, lines sorted.
pub fn format_graph(complex: &SimplicialComplex, graph: &ReconstructedGraph) -> String {
    let mut s = String::new();
    write_graph_lines(&mut s, complex, &graph.vertices, graph.endpoints());
    s
}

pub fn format_truth(complex: &SimplicialComplex, truth: &RasterizedGraph) -> String {
    let mut s = String::new();
    write_graph_lines(&mut s, complex, &truth.vertices, &truth.edges);
    s
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut g = GraphFile::default();
    let mut ids = std::collections::HashSet::new();
    for (l, line) in content_lines(text) {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => {
                if !g.edges.is_empty() {
                    return Err(parse_err(l, "vertex line after edge lines"));
                }
                let id: usize = parse_num(l, toks.next(), "vertex id")?;
                let coords = toks
                    .map(|t| parse_num::<f64>(l, Some(t), "coordinate"))
                    .collect::<Result<Vec<_>>>()?;
                if !ids.insert(id) {
                    return Err(parse_err(l, format!("duplicate vertex {id}")));
                }
                g.vertices.push((id, coords));
            }
            Some("e") => {
                let a: usize = parse_num(l, toks.next(), "edge endpoint")?;
                let b: usize = parse_num(l, toks.next(), "edge endpoint")?;
                if !ids.contains(&a) || !ids.contains(&b) {
                    return Err(parse_err(l, format!("edge ({a}, {b}) references unknown vertex")));
                }
                g.edges.push([a.min(b), a.max(b)]);
            }
            Some(other) => return Err(parse_err(l, format!("unknown record '{other}'"))),
            None => unreachable!("content lines are non-empty"),
        }
    }
    Ok(g)
}

pub fn format_mask(grid: &GridSpec, mask: &NeighborhoodMask) -> String {
    let mut s = header("mask", grid);
    s.push('\n');
    for &b in mask.flags() {
        s.push(if b { '1' } else { '0' });
        s.push('\n');
    }
    s
}

pub fn parse_mask(text: &str) -> Result<(GridSpec, NeighborhoodMask)> {
    let mut lines = content_lines(text);
    let (hl, h) = lines.next().ok_or_else(|| parse_err(1, "empty mask file"))?;
    let grid = parse_header(hl, h, "mask")?;
    let flags = lines
        .map(|(l, s)| match s {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(parse_err(l, format!("bad mask flag '{s}'"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if flags.len() != grid.vertex_count() {
        return Err(parse_err(hl, format!(
            "expected {} flags, found {}",
            grid.vertex_count(),
            flags.len()
        )));
    }
    Ok((grid, NeighborhoodMask::new(flags)))
}

pub fn parse_hidden_graph(text: &str) -> Result<HiddenGraph> {
    let mut nodes = Vec::new();
    let mut arcs = Vec::new();
    for (l, line) in content_lines(text) {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("n") => {
                if !arcs.is_empty() {
                    return Err(parse_err(l, "node line after arc lines"));
                }
                let p = toks
                    .map(|t| parse_num::<f64>(l, Some(t), "coordinate"))
                    .collect::<Result<Vec<_>>>()?;
                if !(2..=3).contains(&p.len()) {
                    return Err(parse_err(l, "node needs 2 or 3 coordinates"));
                }
                nodes.push(p);
            }
            Some("a") => {
                let i: usize = parse_num(l, toks.next(), "node index")?;
                let j: usize = parse_num(l, toks.next(), "node index")?;
                arcs.push([i, j]);
            }
            Some(other) => return Err(parse_err(l, format!("unknown record '{other}'"))),
            None => unreachable!("content lines are non-empty"),
        }
    }
    HiddenGraph::new(nodes, arcs)
}

pub fn format_hidden_graph(graph: &HiddenGraph) -> String {
    let mut s = String::new();
    for p in &graph.nodes {
        s.push('n');
        for x in p {
            let _ = write!(s, " {x}");
        }
        s.push('\n');
    }
    for [i, j] in &graph.arcs {
        let _ = writeln!(s, "a {i} {j}");
    }
    s
}

/// One `pair ...` line per persistence pair, sorted by (dimension,
/// persistence, death position).
pub fn format_pairs(pairs: &PairingSet) -> String {
    let mut s = String::new();
    for p in pairs.pairs() {
        let (dd, di) = match p.death {
            Some(d) => (d.dim.to_string(), d.index.to_string()),
            None => ("inf".to_string(), "-".to_string()),
        };
        let pers = if p.persistence.is_infinite() {
            "inf".to_string()
        } else {
            p.persistence.to_string()
        };
        let _ = writeln!(
            s,
            "pair {} {} {} {dd} {di} {pers}",
            p.dim(),
            p.birth.dim,
            p.birth.index
        );
    }
    s
}
