use super::field::ScalarField;
use super::simplicial::{SimplexId, SimplicialComplex};
use crate::error::{Error, Result};

/// Simplex-wise lower-star filtration of a vertex function.
///
/// All per-simplex arrays are indexed by the complex's global simplex index.
#[derive(Debug, Clone)]
pub struct Filtration {
    order: Vec<usize>,
    position: Vec<usize>,
    value: Vec<f64>,
    owner: Vec<usize>,
    vertex_rank: Vec<usize>,
}

/// Vertices of a simplex sorted by descending rank, padded with zeros.
fn rank_key(ranks: &[usize], vertices: &[usize]) -> [usize; 3] {
    let mut key = [0usize; 3];
    for (k, &v) in key.iter_mut().zip(vertices) {
        *k = ranks[v];
    }
    key[..vertices.len()].sort_unstable_by(|a, b| b.cmp(a));
    key
}

impl Filtration {
    /// Lower-star filtration of `field` (or of `-field` when `negate` is set).
    ///
    /// Vertices are ranked by ascending value, ties broken by vertex index. Each
    /// simplex joins the block of its highest-ranked vertex; inside a block,
    /// simplices are ordered by dimension, then by their descending vertex-rank
    /// tuple.
    pub fn lower_star(complex: &SimplicialComplex, field: &ScalarField, negate: bool) -> Result<Self> {
        let nv = complex.vertex_count();
        if field.len() != nv {
            return Err(Error::InvalidField(format!(
                "field has {} values, complex has {nv} vertices",
                field.len()
            )));
        }
        let f: Vec<f64> = if negate {
            field.values().iter().map(|v| -v).collect()
        } else {
            field.values().to_vec()
        };

        let mut by_value: Vec<usize> = (0..nv).collect();
        by_value.sort_unstable_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
        let mut vertex_rank = vec![0usize; nv];
        for (r, &v) in by_value.iter().enumerate() {
            vertex_rank[v] = r;
        }

        let n = complex.simplex_count();
        let mut keys: Vec<([usize; 3], u8, usize)> = Vec::with_capacity(n);
        keys.extend(vertex_rank.iter().enumerate().map(|(v, &r)| ([r, 0, 0], 0, v)));
        let ne = complex.edge_count();
        for (i, e) in complex.edges().iter().enumerate() {
            keys.push((rank_key(&vertex_rank, e), 1, nv + i));
        }
        for (i, t) in complex.triangles().iter().enumerate() {
            keys.push((rank_key(&vertex_rank, t), 2, nv + ne + i));
        }
        keys.sort_unstable_by(|a, b| {
            (a.0[0], a.1, a.0[1], a.0[2]).cmp(&(b.0[0], b.1, b.0[1], b.0[2]))
        });

        let order: Vec<usize> = keys.iter().map(|k| k.2).collect();
        let mut owner = vec![0usize; n];
        for k in &keys {
            owner[k.2] = by_value[k.0[0]];
        }
        let value = owner.iter().map(|&v| f[v]).collect();
        let mut position = vec![0usize; n];
        for (p, &g) in order.iter().enumerate() {
            position[g] = p;
        }
        Ok(Self {
            order,
            position,
            value,
            owner,
            vertex_rank,
        })
    }

    /// Builds a filtration from an explicit simplex order and vertex function,
    /// rejecting orders where a face follows one of its cofaces or where the
    /// simplex values decrease.
    pub fn from_order(
        complex: &SimplicialComplex,
        vertex_values: &[f64],
        order: Vec<SimplexId>,
    ) -> Result<Self> {
        let n = complex.simplex_count();
        if vertex_values.len() != complex.vertex_count() {
            return Err(Error::InvalidField("vertex value count mismatch".into()));
        }
        if order.len() != n {
            return Err(Error::InvalidFiltration(format!(
                "order lists {} simplices, complex has {n}",
                order.len()
            )));
        }
        let mut position = vec![usize::MAX; n];
        let mut global_order = Vec::with_capacity(n);
        for (p, s) in order.iter().enumerate() {
            if !complex.contains(*s) {
                return Err(Error::InvalidFiltration(format!("unknown simplex {s}")));
            }
            let g = complex.global_index(*s);
            if position[g] != usize::MAX {
                return Err(Error::InvalidFiltration(format!("simplex {s} listed twice")));
            }
            position[g] = p;
            global_order.push(g);
        }
        let mut owner = vec![0usize; n];
        let mut value = vec![0.0; n];
        for g in 0..n {
            let verts = complex.vertices_of(complex.simplex_at(g));
            let top = *verts
                .iter()
                .max_by(|&&a, &&b| vertex_values[a].total_cmp(&vertex_values[b]).then(position[a].cmp(&position[b])))
                .expect("simplex has vertices");
            owner[g] = top;
            value[g] = vertex_values[top];
        }
        let mut vertices: Vec<usize> = (0..complex.vertex_count()).collect();
        vertices.sort_unstable_by_key(|&v| position[v]);
        let mut vertex_rank = vec![0; vertices.len()];
        for (r, &v) in vertices.iter().enumerate() {
            vertex_rank[v] = r;
        }
        let filtration = Self {
            order: global_order,
            position,
            value,
            owner,
            vertex_rank,
        };
        filtration.validate(complex)?;
        Ok(filtration)
    }

    /// Checks face-before-coface and monotone simplex values.
    pub fn validate(&self, complex: &SimplicialComplex) -> Result<()> {
        if self.order.len() != complex.simplex_count() {
            return Err(Error::InvalidFiltration("size mismatch with complex".into()));
        }
        for (p, &g) in self.order.iter().enumerate() {
            for face in complex.boundary_global(g) {
                if self.position[face] >= p {
                    return Err(Error::InvalidFiltration(format!(
                        "face {} does not precede {}",
                        complex.simplex_at(face),
                        complex.simplex_at(g)
                    )));
                }
            }
            if p > 0 && self.value[g] < self.value[self.order[p - 1]] {
                return Err(Error::InvalidFiltration(format!(
                    "value decreases at position {p}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Global simplex indices in filtration order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, global: usize) -> usize {
        self.position[global]
    }

    /// `f̄(σ)`, the maximum working-function value over the simplex's vertices.
    pub fn value(&self, global: usize) -> f64 {
        self.value[global]
    }

    pub fn values(&self) -> &[f64] {
        &self.value
    }

    /// Vertex whose lower star contains the simplex.
    pub fn owner(&self, global: usize) -> usize {
        self.owner[global]
    }

    /// Rank of a vertex in the ascending vertex order.
    pub fn vertex_rank(&self, v: usize) -> usize {
        self.vertex_rank[v]
    }

    pub fn vertex_ranks(&self) -> &[usize] {
        &self.vertex_rank
    }
}
