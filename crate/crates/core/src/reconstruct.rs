//! Forest-based reconstruction: no gradient field, no explicit cancellation.
//!
//! The vertex-edge pairs with persistence at most `δ` span a forest whose tree
//! roots (sinks) are exactly the vertices of persistence above `δ`. The
//! 1-unstable manifold of a high-persistence edge `⟨u, v⟩` is then the edge plus
//! the tree paths from `u` and `v` to their sinks.

use crate::complex::{Filtration, ScalarField, SimplicialComplex};
use crate::error::{Error, Result};
use crate::persistence::{compute_pairs, PairingSet};

const ROOT: usize = usize::MAX;

/// Spanning forest on all vertices, each tree oriented toward its sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forest {
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    sink_of: Vec<usize>,
    tree_edges: Vec<usize>,
}

impl Forest {
    /// Parent vertex and connecting edge, `None` at a sink.
    pub fn parent(&self, v: usize) -> Option<(usize, usize)> {
        (self.parent[v] != ROOT).then(|| (self.parent[v], self.parent_edge[v]))
    }

    pub fn sink_of(&self, v: usize) -> usize {
        self.sink_of[v]
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.parent[v] == ROOT
    }

    /// Sinks in ascending vertex order.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&v| self.is_sink(v)).collect()
    }

    /// Sorted edge indices of the forest.
    pub fn tree_edges(&self) -> &[usize] {
        &self.tree_edges
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn tree_count(&self) -> usize {
        self.parent.iter().filter(|&&p| p == ROOT).count()
    }
}

/// An element of a traced path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    Vertex(usize),
    Edge(usize),
}

/// Builds the forest of vertex-edge pairs with persistence `≤ delta`, rooting
/// each tree at its lowest vertex in the filtration.
pub fn build_forest(
    complex: &SimplicialComplex,
    filtration: &Filtration,
    pairs: &PairingSet,
    delta: f64,
) -> Result<Forest> {
    check_delta(delta)?;
    let nv = complex.vertex_count();
    let mut in_tree = vec![false; complex.edge_count()];
    let mut tree_edges = Vec::new();
    for (_, e, pers) in pairs.vertex_edge_pairs() {
        if pers <= delta {
            in_tree[e] = true;
            tree_edges.push(e);
        }
    }
    tree_edges.sort_unstable();

    let mut parent = vec![ROOT; nv];
    let mut parent_edge = vec![ROOT; nv];
    let mut sink_of = vec![ROOT; nv];
    let mut stack = Vec::new();
    // The first unvisited vertex in filtration order is its tree's minimum.
    for &g in filtration.order() {
        if g >= nv || sink_of[g] != ROOT {
            continue;
        }
        sink_of[g] = g;
        stack.push(g);
        while let Some(v) = stack.pop() {
            for &e in complex.vertex_edges(v) {
                if !in_tree[e] {
                    continue;
                }
                let w = complex.other_endpoint(e, v);
                if sink_of[w] == ROOT {
                    sink_of[w] = g;
                    parent[w] = v;
                    parent_edge[w] = e;
                    stack.push(w);
                }
            }
        }
    }
    Ok(Forest {
        parent,
        parent_edge,
        sink_of,
        tree_edges,
    })
}

/// The tree path from `v` to its sink as alternating vertices and edges.
pub fn trace_path(forest: &Forest, v: usize) -> Vec<PathStep> {
    let mut path = vec![PathStep::Vertex(v)];
    let mut cur = v;
    while let Some((p, e)) = forest.parent(cur) {
        path.push(PathStep::Edge(e));
        path.push(PathStep::Vertex(p));
        cur = p;
    }
    path
}

/// Subgraph of the complex's 1-skeleton produced by a reconstruction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReconstructedGraph {
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    /// Sorted edge indices.
    pub edges: Vec<usize>,
    /// Sorted indices of the high-persistence edges that seeded the output.
    pub generator_edges: Vec<usize>,
    endpoints: Vec<[usize; 2]>,
}

impl ReconstructedGraph {
    pub(crate) fn from_marks(
        complex: &SimplicialComplex,
        vertex_marked: &[bool],
        edge_marked: &[bool],
        mut generator_edges: Vec<usize>,
    ) -> Self {
        let vertices = (0..vertex_marked.len()).filter(|&v| vertex_marked[v]).collect();
        let edges: Vec<usize> = (0..edge_marked.len()).filter(|&e| edge_marked[e]).collect();
        let endpoints = edges.iter().map(|&e| complex.edge(e)).collect();
        generator_edges.sort_unstable();
        Self {
            vertices,
            edges,
            generator_edges,
            endpoints,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Endpoints of each edge, parallel to `edges`.
    pub fn endpoints(&self) -> &[[usize; 2]] {
        &self.endpoints
    }

    pub fn betti1(&self) -> usize {
        graph_betti1(&self.vertices, &self.endpoints)
    }

    pub fn component_count(&self) -> usize {
        graph_components(&self.vertices, &self.endpoints)
    }
}

/// `|E| − |V| + #components` of a graph given by vertex ids and edge endpoints.
pub fn graph_betti1(vertices: &[usize], edges: &[[usize; 2]]) -> usize {
    (edges.len() + graph_components(vertices, edges)) - vertices.len()
}

fn graph_components(vertices: &[usize], edges: &[[usize; 2]]) -> usize {
    let mut ids = vertices.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let local = |v: usize| ids.binary_search(&v).expect("edge endpoint is a graph vertex");
    let mut uf = crate::union_find::UnionFind::new(ids.len());
    let mut components = ids.len();
    for &[a, b] in edges {
        if uf.union(local(a), local(b)).is_some() {
            components -= 1;
        }
    }
    components
}

/// First Betti number of a reconstructed graph.
pub fn betti1(graph: &ReconstructedGraph) -> usize {
    graph.betti1()
}

/// Union of the 1-unstable manifolds of every edge with persistence `> delta`,
/// traced through `forest`. Each vertex's path is walked at most once.
pub fn collect_output(
    complex: &SimplicialComplex,
    pairs: &PairingSet,
    forest: &Forest,
    delta: f64,
) -> ReconstructedGraph {
    let nv = complex.vertex_count();
    let mut vertex_marked = vec![false; nv];
    let mut edge_marked = vec![false; complex.edge_count()];
    let mut generators = Vec::new();
    for (e, &[a, b]) in complex.edges().iter().enumerate() {
        if pairs.persistence_global(nv + e) <= delta {
            continue;
        }
        generators.push(e);
        edge_marked[e] = true;
        for start in [a, b] {
            let mut v = start;
            while !vertex_marked[v] {
                vertex_marked[v] = true;
                match forest.parent(v) {
                    Some((p, pe)) => {
                        edge_marked[pe] = true;
                        v = p;
                    }
                    None => break,
                }
            }
        }
    }
    ReconstructedGraph::from_marks(complex, &vertex_marked, &edge_marked, generators)
}

/// Forest-based reconstruction from precomputed pairs.
pub fn reconstruct_with_pairs(
    complex: &SimplicialComplex,
    filtration: &Filtration,
    pairs: &PairingSet,
    delta: f64,
) -> Result<ReconstructedGraph> {
    let forest = build_forest(complex, filtration, pairs, delta)?;
    Ok(collect_output(complex, pairs, &forest, delta))
}

/// Reconstructs the graph hidden in density `rho` at persistence threshold `delta`.
pub fn reconstruct(
    complex: &SimplicialComplex,
    rho: &ScalarField,
    delta: f64,
) -> Result<ReconstructedGraph> {
    check_delta(delta)?;
    let filtration = Filtration::lower_star(complex, rho, true)?;
    let pairs = compute_pairs(complex, &filtration)?;
    reconstruct_with_pairs(complex, &filtration, &pairs, delta)
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidParameter(format!("delta must be >= 0, got {delta}")));
    }
    Ok(())
}
