//! Explicit discrete Morse cancellation, restricted to vertex-edge pairs.
//!
//! Starting from the trivial gradient field, every vertex-edge persistence pair
//! with persistence at most `δ` is cancelled in increasing (persistence, death
//! position) order by reversing the unique gradient path from the edge down to
//! the vertex. The output is the union of the 1-unstable manifolds of the
//! remaining critical edges of persistence above `δ`.

use std::collections::BTreeSet;

use crate::complex::{Filtration, ScalarField, SimplicialComplex};
use crate::error::{Error, Result};
use crate::persistence::{compute_pairs, PairingSet};
use crate::reconstruct::{check_delta, ReconstructedGraph};

const NONE: usize = usize::MAX;

/// A discrete gradient field made of vertex-edge vectors only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientField {
    vertex_to_edge: Vec<usize>,
    edge_to_vertex: Vec<usize>,
}

impl GradientField {
    /// The trivial field: every simplex critical.
    pub fn trivial(complex: &SimplicialComplex) -> Self {
        Self {
            vertex_to_edge: vec![NONE; complex.vertex_count()],
            edge_to_vertex: vec![NONE; complex.edge_count()],
        }
    }

    /// Edge that `v` is paired with, if any.
    pub fn vector_from(&self, v: usize) -> Option<usize> {
        let e = self.vertex_to_edge[v];
        (e != NONE).then_some(e)
    }

    /// Vertex paired with edge `e`, if any.
    pub fn vector_into(&self, e: usize) -> Option<usize> {
        let v = self.edge_to_vertex[e];
        (v != NONE).then_some(v)
    }

    pub fn is_critical_vertex(&self, v: usize) -> bool {
        self.vertex_to_edge[v] == NONE
    }

    pub fn is_critical_edge(&self, e: usize) -> bool {
        self.edge_to_vertex[e] == NONE
    }

    pub fn critical_vertices(&self) -> Vec<usize> {
        (0..self.vertex_to_edge.len())
            .filter(|&v| self.is_critical_vertex(v))
            .collect()
    }

    pub fn critical_edges(&self) -> Vec<usize> {
        (0..self.edge_to_vertex.len())
            .filter(|&e| self.is_critical_edge(e))
            .collect()
    }

    /// All gradient vectors `(vertex, edge)`.
    pub fn vectors(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertex_to_edge
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != NONE)
            .map(|(v, &e)| (v, e))
    }

    /// Number of critical vertices plus critical edges.
    pub fn critical_count(&self) -> usize {
        self.vertex_to_edge.iter().filter(|&&e| e == NONE).count()
            + self.edge_to_vertex.iter().filter(|&&v| v == NONE).count()
    }

    /// Follows gradient vectors from `v` to a critical vertex, returning the
    /// visited vertices and edges. Fails after `limit` steps, which can only
    /// happen if a cyclic V-path exists.
    fn descend(
        &self,
        complex: &SimplicialComplex,
        v: usize,
        limit: usize,
    ) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut vertices = vec![v];
        let mut edges = Vec::new();
        let mut cur = v;
        while let Some(e) = self.vector_from(cur) {
            if edges.len() > limit {
                return Err(Error::InvariantViolation(format!(
                    "cyclic V-path through vertex {v}"
                )));
            }
            cur = complex.other_endpoint(e, cur);
            edges.push(e);
            vertices.push(cur);
        }
        Ok((vertices, edges))
    }

    /// Checks that no V-path returns to its starting vertex.
    pub fn check_acyclic(&self, complex: &SimplicialComplex) -> Result<()> {
        for (v, e) in self.vectors() {
            if self.edge_to_vertex[e] != v {
                return Err(Error::InvariantViolation(format!(
                    "vector ({v}, {e}) is not mirrored"
                )));
            }
        }
        for v in 0..self.vertex_to_edge.len() {
            self.descend(complex, v, self.vertex_to_edge.len())?;
        }
        Ok(())
    }

    /// Cancels critical pair `(vertex, edge)` by reversing the unique gradient
    /// path from `edge` to `vertex`.
    pub fn cancel(&mut self, complex: &SimplicialComplex, vertex: usize, edge: usize) -> Result<()> {
        if !self.is_critical_vertex(vertex) || !self.is_critical_edge(edge) {
            return Err(Error::InvariantViolation(format!(
                "cancelling non-critical pair (v{vertex}, e{edge})"
            )));
        }
        let limit = self.vertex_to_edge.len();
        let [a, b] = complex.edge(edge);
        let (va, ea) = self.descend(complex, a, limit)?;
        let (vb, eb) = self.descend(complex, b, limit)?;
        let hits_a = *va.last().expect("path has a vertex") == vertex;
        let hits_b = *vb.last().expect("path has a vertex") == vertex;
        let (path_vertices, path_edges) = match (hits_a, hits_b) {
            (true, false) => (va, ea),
            (false, true) => (vb, eb),
            (true, true) => {
                return Err(Error::InvariantViolation(format!(
                    "two gradient paths from e{edge} to v{vertex}"
                )))
            }
            (false, false) => {
                return Err(Error::InvariantViolation(format!(
                    "no gradient path from e{edge} to v{vertex}"
                )))
            }
        };
        // path: edge, u1, e1, u2, e2, ..., u_{l+1} = vertex; reversed vectors
        // become (u1, edge), (u2, e1), ..., (u_{l+1}, e_l).
        let mut incoming = edge;
        for (i, &u) in path_vertices.iter().enumerate() {
            self.vertex_to_edge[u] = incoming;
            self.edge_to_vertex[incoming] = u;
            if let Some(&next) = path_edges.get(i) {
                incoming = next;
            }
        }
        Ok(())
    }
}

/// Cancels every vertex-edge pair with persistence `≤ delta`, in increasing
/// (persistence, death position) order.
pub fn cancel_all(
    complex: &SimplicialComplex,
    filtration: &Filtration,
    pairs: &PairingSet,
    delta: f64,
) -> Result<GradientField> {
    cancel_all_checked(complex, filtration, pairs, delta, |_| Ok(()))
}

/// As [`cancel_all`], running `check` on the field after every cancellation.
pub fn cancel_all_checked(
    complex: &SimplicialComplex,
    filtration: &Filtration,
    pairs: &PairingSet,
    delta: f64,
    mut check: impl FnMut(&GradientField) -> Result<()>,
) -> Result<GradientField> {
    check_delta(delta)?;
    let nv = complex.vertex_count();
    let mut queue: Vec<(usize, usize, f64)> = pairs
        .vertex_edge_pairs()
        .filter(|&(_, _, pers)| pers <= delta)
        .collect();
    queue.sort_by(|x, y| {
        x.2.total_cmp(&y.2)
            .then(filtration.position(nv + x.1).cmp(&filtration.position(nv + y.1)))
    });
    let mut field = GradientField::trivial(complex);
    for (v, e, _) in queue {
        field.cancel(complex, v, e)?;
        check(&field)?;
    }
    Ok(field)
}

/// Vertices and edges of the 1-unstable manifold of a critical edge.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnstableManifold {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

/// `{e}` plus the gradient paths descending from both endpoints of `e`.
pub fn unstable_manifold(
    complex: &SimplicialComplex,
    field: &GradientField,
    edge: usize,
) -> Result<UnstableManifold> {
    if edge >= complex.edge_count() || !field.is_critical_edge(edge) {
        return Err(Error::InvalidArgument(format!("edge {edge} is not critical")));
    }
    let mut m = UnstableManifold::default();
    m.edges.insert(edge);
    for v in complex.edge(edge) {
        let (vs, es) = field.descend(complex, v, complex.vertex_count())?;
        m.vertices.extend(vs);
        m.edges.extend(es);
    }
    Ok(m)
}

/// Union of the unstable manifolds of the critical edges with persistence `> delta`.
pub fn collect_output(
    complex: &SimplicialComplex,
    pairs: &PairingSet,
    field: &GradientField,
    delta: f64,
) -> Result<ReconstructedGraph> {
    let nv = complex.vertex_count();
    let mut vertex_marked = vec![false; nv];
    let mut edge_marked = vec![false; complex.edge_count()];
    let mut generators = Vec::new();
    for e in 0..complex.edge_count() {
        if !field.is_critical_edge(e) || pairs.persistence_global(nv + e) <= delta {
            continue;
        }
        generators.push(e);
        let m = unstable_manifold(complex, field, e)?;
        for v in m.vertices {
            vertex_marked[v] = true;
        }
        for x in m.edges {
            edge_marked[x] = true;
        }
    }
    Ok(ReconstructedGraph::from_marks(
        complex,
        &vertex_marked,
        &edge_marked,
        generators,
    ))
}

/// Cancellation-based reconstruction from precomputed pairs.
pub fn oracle_reconstruct_with_pairs(
    complex: &SimplicialComplex,
    filtration: &Filtration,
    pairs: &PairingSet,
    delta: f64,
) -> Result<ReconstructedGraph> {
    let field = cancel_all(complex, filtration, pairs, delta)?;
    collect_output(complex, pairs, &field, delta)
}

/// Reconstructs the graph in density `rho` through explicit Morse cancellation.
pub fn oracle_reconstruct(
    complex: &SimplicialComplex,
    rho: &ScalarField,
    delta: f64,
) -> Result<ReconstructedGraph> {
    check_delta(delta)?;
    let filtration = Filtration::lower_star(complex, rho, true)?;
    let pairs = compute_pairs(complex, &filtration)?;
    oracle_reconstruct_with_pairs(complex, &filtration, &pairs, delta)
}
