use std::collections::HashSet;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// A simplex addressed by dimension and its dense index within that dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexId {
    pub dim: u8,
    pub index: usize,
}

impl SimplexId {
    pub fn vertex(index: usize) -> Self {
        Self { dim: 0, index }
    }

    pub fn edge(index: usize) -> Self {
        Self { dim: 1, index }
    }

    pub fn triangle(index: usize) -> Self {
        Self { dim: 2, index }
    }
}

impl std::fmt::Display for SimplexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = ["v", "e", "t"][self.dim as usize];
        write!(f, "{tag}{}", self.index)
    }
}

/// Compressed adjacency lists: `targets[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Csr {
    fn from_pairs(rows: usize, pairs: impl Iterator<Item = (usize, usize)> + Clone) -> Self {
        let mut offsets = vec![0usize; rows + 1];
        for (r, _) in pairs.clone() {
            offsets[r + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[rows]];
        for (r, t) in pairs {
            targets[fill[r]] = t;
            fill[r] += 1;
        }
        Self { offsets, targets }
    }

    fn row(&self, r: usize) -> &[usize] {
        &self.targets[self.offsets[r]..self.offsets[r + 1]]
    }
}

/// A simplicial 2-complex with boundary and coboundary incidence.
///
/// Simplices are indexed lexicographically by their ascending vertex tuple within
/// each dimension. A global index space `[vertices | edges | triangles]` is used by
/// the filtration and persistence layers.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    grid: Option<GridSpec>,
    ambient_dim: usize,
    coords: Vec<f64>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    triangle_edges: Vec<[usize; 3]>,
    /// Edges keyed by their lower vertex; since `edges` is sorted this is a range.
    edge_start: Vec<usize>,
    vertex_edges: Csr,
    edge_triangles: Csr,
}

impl SimplicialComplex {
    /// Builds a complex from explicit simplices. Vertex `i` sits at `coords[i]`
    /// when coordinates are given and at `(i, 0)` otherwise.
    pub fn from_simplices(
        vertex_count: usize,
        coords: Option<Vec<Vec<f64>>>,
        edges: &[[usize; 2]],
        triangles: &[[usize; 3]],
    ) -> Result<Self> {
        let (ambient_dim, flat) = match coords {
            Some(c) => {
                if c.len() != vertex_count {
                    return Err(Error::InvalidArgument(format!(
                        "{} coordinates for {vertex_count} vertices",
                        c.len()
                    )));
                }
                let d = c.first().map_or(2, Vec::len);
                if c.iter().any(|p| p.len() != d) {
                    return Err(Error::InvalidArgument("ragged coordinates".into()));
                }
                (d, c.into_iter().flatten().collect())
            }
            None => (2, (0..vertex_count).flat_map(|i| [i as f64, 0.0]).collect()),
        };

        let mut edge_list: Vec<[usize; 2]> = Vec::with_capacity(edges.len());
        for &[a, b] in edges {
            if a == b || a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidArgument(format!("bad edge ({a}, {b})")));
            }
            edge_list.push([a.min(b), a.max(b)]);
        }
        edge_list.sort_unstable();
        if edge_list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate edge".into()));
        }

        let mut tri_list: Vec<[usize; 3]> = Vec::with_capacity(triangles.len());
        for t in triangles {
            let mut s = *t;
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] || s[2] >= vertex_count {
                return Err(Error::InvalidArgument(format!("bad triangle {t:?}")));
            }
            tri_list.push(s);
        }
        tri_list.sort_unstable();
        if tri_list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate triangle".into()));
        }

        Self::assemble(None, ambient_dim, flat, vertex_count, edge_list, tri_list)
    }

    fn assemble(
        grid: Option<GridSpec>,
        ambient_dim: usize,
        coords: Vec<f64>,
        vertex_count: usize,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self> {
        let mut edge_start = vec![0usize; vertex_count + 1];
        for e in &edges {
            edge_start[e[0] + 1] += 1;
        }
        for i in 0..vertex_count {
            edge_start[i + 1] += edge_start[i];
        }

        let vertex_edges = Csr::from_pairs(
            vertex_count,
            edges
                .iter()
                .enumerate()
                .flat_map(|(i, e)| [(e[0], i), (e[1], i)]),
        );

        let mut complex = Self {
            grid,
            ambient_dim,
            coords,
            edges,
            triangles: Vec::new(),
            triangle_edges: Vec::new(),
            edge_start,
            vertex_edges,
            edge_triangles: Csr::default(),
        };

        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let find = |a, b| {
                complex.edge_index(a, b).ok_or_else(|| {
                    Error::InvalidArgument(format!("triangle {t:?} is missing edge ({a}, {b})"))
                })
            };
            triangle_edges.push([find(t[0], t[1])?, find(t[0], t[2])?, find(t[1], t[2])?]);
        }
        complex.edge_triangles = Csr::from_pairs(
            complex.edges.len(),
            triangle_edges
                .iter()
                .enumerate()
                .flat_map(|(i, es)| es.iter().map(move |&e| (e, i))),
        );
        complex.triangles = triangles;
        complex.triangle_edges = triangle_edges;
        Ok(complex)
    }

    /// Triangulates a regular grid: 2D cells split along the `(i,j)→(i+1,j+1)`
    /// diagonal, 3D cubes split into the six Freudenthal tetrahedra around the
    /// main diagonal, of which only the 2-skeleton is kept.
    ///
    /// Every simplex is a chain `p, p+a, p+a+b` of cube corners where `a`, `b` are
    /// disjoint non-empty axis subsets.
    pub fn from_grid(grid: &GridSpec) -> Self {
        let dim = grid.dimension();
        let extents = grid.extents();
        let strides = grid.strides();
        let n = grid.vertex_count();
        let full: usize = (1 << dim) - 1;

        let offset = |mask: usize| -> usize {
            (0..dim)
                .filter(|ax| mask & (1 << ax) != 0)
                .map(|ax| strides[ax])
                .sum()
        };
        let offsets: Vec<usize> = (0..=full).map(offset).collect();

        let mut edges = Vec::with_capacity(n * full);
        let mut triangles = Vec::with_capacity(n * 12);
        let mut group_e: Vec<[usize; 2]> = Vec::with_capacity(7);
        let mut group_t: Vec<[usize; 3]> = Vec::with_capacity(12);
        let mut coords = vec![0usize; dim];
        for p in 0..n {
            // Axes along which p has a forward neighbour.
            let room: usize = (0..dim)
                .filter(|&ax| coords[ax] + 1 < extents[ax])
                .map(|ax| 1 << ax)
                .sum();

            group_e.clear();
            group_t.clear();
            for a in 1..=full {
                if a & !room != 0 {
                    continue;
                }
                let q = p + offsets[a];
                group_e.push([p, q]);
                let rest = room & !a;
                // Non-empty submasks of `rest`.
                let mut b = rest;
                while b != 0 {
                    group_t.push([p, q, q + offsets[b]]);
                    b = (b - 1) & rest;
                }
            }
            group_e.sort_unstable();
            group_t.sort_unstable();
            edges.extend_from_slice(&group_e);
            triangles.extend_from_slice(&group_t);

            for ax in 0..dim {
                coords[ax] += 1;
                if coords[ax] < extents[ax] {
                    break;
                }
                coords[ax] = 0;
            }
        }

        let flat = (0..n).flat_map(|v| grid.position_of(v)).collect();
        Self::assemble(Some(grid.clone()), dim, flat, n, edges, triangles)
            .expect("grid triangulation is closed under faces")
    }

    pub fn grid(&self) -> Option<&GridSpec> {
        self.grid.as_ref()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertex_count(&self) -> usize {
        self.edge_start.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn simplex_count(&self) -> usize {
        self.vertex_count() + self.edge_count() + self.triangle_count()
    }

    pub fn count(&self, dim: u8) -> usize {
        match dim {
            0 => self.vertex_count(),
            1 => self.edge_count(),
            2 => self.triangle_count(),
            _ => 0,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    pub fn position(&self, v: usize) -> &[f64] {
        &self.coords[v * self.ambient_dim..(v + 1) * self.ambient_dim]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    /// The three edges of a triangle, ordered `(v0v1, v0v2, v1v2)`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        self.vertex_edges.row(v)
    }

    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        self.edge_triangles.row(e)
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_endpoint(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let (lo, hi) = (a.min(b), a.max(b));
        if hi >= self.vertex_count() {
            return None;
        }
        let range = self.edge_start[lo]..self.edge_start[lo + 1];
        self.edges[range.clone()]
            .binary_search_by_key(&hi, |e| e[1])
            .ok()
            .map(|i| range.start + i)
    }

    /// Vertices of a simplex in ascending order.
    pub fn vertices_of(&self, s: SimplexId) -> Vec<usize> {
        match s.dim {
            0 => vec![s.index],
            1 => self.edges[s.index].to_vec(),
            _ => self.triangles[s.index].to_vec(),
        }
    }

    pub fn contains(&self, s: SimplexId) -> bool {
        s.dim <= 2 && s.index < self.count(s.dim)
    }

    /// Position of `s` in the global `[vertices | edges | triangles]` index space.
    pub fn global_index(&self, s: SimplexId) -> usize {
        match s.dim {
            0 => s.index,
            1 => self.vertex_count() + s.index,
            _ => self.vertex_count() + self.edge_count() + s.index,
        }
    }

    pub fn simplex_at(&self, global: usize) -> SimplexId {
        let nv = self.vertex_count();
        let ne = self.edge_count();
        if global < nv {
            SimplexId::vertex(global)
        } else if global < nv + ne {
            SimplexId::edge(global - nv)
        } else {
            SimplexId::triangle(global - nv - ne)
        }
    }

    /// Facets of a simplex as global indices.
    pub fn boundary_global(&self, global: usize) -> Vec<usize> {
        let s = self.simplex_at(global);
        match s.dim {
            0 => Vec::new(),
            1 => self.edges[s.index].to_vec(),
            _ => {
                let nv = self.vertex_count();
                self.triangle_edges[s.index].iter().map(|&e| nv + e).collect()
            }
        }
    }

    /// Number of connected components of the 1-skeleton.
    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &e in self.vertex_edges(v) {
                    let w = self.other_endpoint(e, v);
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }

    /// Checks that boundary and coboundary maps agree and no simplex repeats.
    pub fn check_consistency(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvariantViolation(msg));
        let mut seen = HashSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !seen.insert(*e) {
                return bad(format!("duplicate edge {e:?}"));
            }
            for &v in e {
                if !self.vertex_edges(v).contains(&i) {
                    return bad(format!("edge {i} missing from coboundary of {v}"));
                }
            }
        }
        let mut seen = HashSet::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if !seen.insert(*tri) {
                return bad(format!("duplicate triangle {tri:?}"));
            }
            for &e in &self.triangle_edges[t] {
                let [a, b] = self.edges[e];
                if !tri.contains(&a) || !tri.contains(&b) {
                    return bad(format!("edge {e} is not a face of triangle {t}"));
                }
                if !self.edge_triangles(e).contains(&t) {
                    return bad(format!("triangle {t} missing from coboundary of edge {e}"));
                }
            }
        }
        Ok(())
    }
}
