//! Persistence pairing of a lower-star filtration over ℤ₂.
//!
//! Vertex-edge pairs come from a union-find sweep (elder rule); edge-triangle
//! pairs from a sparse column reduction of the triangle boundaries. An
//! all-dimensions reduction with the twist (clearing) optimization is also
//! available and must agree with the sweep.

use crate::complex::{Filtration, SimplexId, SimplicialComplex};
use crate::error::{Error, Result};
use crate::union_find::UnionFind;

const UNPAIRED: usize = usize::MAX;
const NO_COLUMN: u32 = u32::MAX;

/// A persistence pair `(birth, death)`; `death` is `None` for an essential class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub birth: SimplexId,
    pub death: Option<SimplexId>,
    pub persistence: f64,
}

impl PersistencePair {
    /// Homological dimension of the class, i.e. the dimension of its birth simplex.
    pub fn dim(&self) -> u8 {
        self.birth.dim
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_none()
    }
}

/// The full pairing: every simplex lies in exactly one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingSet {
    pairs: Vec<PersistencePair>,
    by_simplex: Vec<usize>,
    partner: Vec<usize>,
    persistence: Vec<f64>,
}

impl PairingSet {
    fn from_partners(
        complex: &SimplicialComplex,
        filtration: &Filtration,
        partner: Vec<usize>,
    ) -> Result<Self> {
        let n = partner.len();
        let mut persistence = vec![f64::INFINITY; n];
        let mut raw: Vec<(usize, usize)> = Vec::with_capacity(n / 2 + 1);
        for (g, &p) in partner.iter().enumerate() {
            if p == UNPAIRED {
                raw.push((g, UNPAIRED));
                continue;
            }
            if partner[p] != g {
                return Err(Error::InvariantViolation(format!(
                    "asymmetric pairing between {} and {}",
                    complex.simplex_at(g),
                    complex.simplex_at(p)
                )));
            }
            if filtration.position(g) < filtration.position(p) {
                let pers = filtration.value(p) - filtration.value(g);
                persistence[g] = pers;
                persistence[p] = pers;
                raw.push((g, p));
            }
        }
        raw.sort_unstable_by(|a, b| {
            let key = |&(birth, death): &(usize, usize)| {
                let dp = if death == UNPAIRED {
                    usize::MAX
                } else {
                    filtration.position(death)
                };
                (complex.simplex_at(birth).dim, persistence[birth], dp, filtration.position(birth))
            };
            let (ka, kb) = (key(a), key(b));
            ka.0.cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then(ka.2.cmp(&kb.2))
                .then(ka.3.cmp(&kb.3))
        });
        let mut by_simplex = vec![0usize; n];
        let pairs = raw
            .iter()
            .enumerate()
            .map(|(i, &(b, d))| {
                by_simplex[b] = i;
                if d != UNPAIRED {
                    by_simplex[d] = i;
                }
                PersistencePair {
                    birth: complex.simplex_at(b),
                    death: (d != UNPAIRED).then(|| complex.simplex_at(d)),
                    persistence: persistence[b],
                }
            })
            .collect();
        Ok(Self {
            pairs,
            by_simplex,
            partner,
            persistence,
        })
    }

    /// All pairs sorted by (dimension, persistence, death position).
    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair_of(&self, complex: &SimplicialComplex, s: SimplexId) -> Result<&PersistencePair> {
        if !complex.contains(s) || complex.global_index(s) >= self.by_simplex.len() {
            return Err(Error::NotFound(s.to_string()));
        }
        Ok(&self.pairs[self.by_simplex[complex.global_index(s)]])
    }

    /// Persistence of the pair containing `s`.
    pub fn persistence_of(&self, complex: &SimplicialComplex, s: SimplexId) -> Result<f64> {
        self.pair_of(complex, s).map(|p| p.persistence)
    }

    /// Persistence by global simplex index.
    pub fn persistence_global(&self, global: usize) -> f64 {
        self.persistence[global]
    }

    /// Partner of a simplex by global index, `None` when unpaired.
    pub fn partner_global(&self, global: usize) -> Option<usize> {
        let p = self.partner[global];
        (p != UNPAIRED).then_some(p)
    }

    /// Vertex-edge pairs as `(vertex, edge, persistence)`.
    pub fn vertex_edge_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.pairs.iter().filter_map(|p| match p.death {
            Some(d) if p.birth.dim == 0 => Some((p.birth.index, d.index, p.persistence)),
            _ => None,
        })
    }

    pub fn essential(&self) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(|p| p.is_essential())
    }
}

/// Computes the persistence pairing of `filtration`: union-find for dimension 0,
/// sparse ℤ₂ column reduction of triangle boundaries for dimension 1.
pub fn compute_pairs(complex: &SimplicialComplex, filtration: &Filtration) -> Result<PairingSet> {
    filtration.validate(complex)?;
    let mut partner = vec![UNPAIRED; complex.simplex_count()];
    pair_components(complex, filtration, &mut partner);
    pair_cycles(complex, filtration, &mut partner);
    PairingSet::from_partners(complex, filtration, partner)
}

/// Computes the pairing by reducing the full boundary matrix, higher dimensions
/// first, skipping edge columns already known to be positive (twist).
pub fn compute_pairs_by_reduction(
    complex: &SimplicialComplex,
    filtration: &Filtration,
) -> Result<PairingSet> {
    filtration.validate(complex)?;
    let mut partner = vec![UNPAIRED; complex.simplex_count()];
    pair_cycles(complex, filtration, &mut partner);

    let nv = complex.vertex_count();
    let mut reducer = Reducer::new(filtration.len());
    for &g in filtration.order() {
        if complex.simplex_at(g).dim != 1 || partner[g] != UNPAIRED {
            continue;
        }
        let [a, b] = complex.edge(g - nv);
        let mut column = vec![filtration.position(a) as u32, filtration.position(b) as u32];
        column.sort_unstable();
        if let Some(low) = reducer.reduce(column) {
            let v = filtration.order()[low as usize];
            partner[g] = v;
            partner[v] = g;
        }
    }
    PairingSet::from_partners(complex, filtration, partner)
}

/// Elder-rule sweep: an edge joining two components kills the younger one.
fn pair_components(complex: &SimplicialComplex, filtration: &Filtration, partner: &mut [usize]) {
    let nv = complex.vertex_count();
    let mut uf = UnionFind::new(nv);
    // Oldest vertex of each component, stored at its root.
    let mut birth: Vec<usize> = (0..nv).collect();
    for &g in filtration.order() {
        if g < nv || g >= nv + complex.edge_count() {
            continue;
        }
        let [a, b] = complex.edge(g - nv);
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            continue;
        }
        let (ba, bb) = (birth[ra], birth[rb]);
        let (elder, younger) = if filtration.position(ba) < filtration.position(bb) {
            (ba, bb)
        } else {
            (bb, ba)
        };
        partner[younger] = g;
        partner[g] = younger;
        let root = uf.union(ra, rb).expect("distinct roots");
        birth[root] = elder;
    }
}

/// Reduces triangle columns in filtration order; a non-zero column's lowest
/// edge is paired with the triangle.
fn pair_cycles(complex: &SimplicialComplex, filtration: &Filtration, partner: &mut [usize]) {
    let nv = complex.vertex_count();
    let base = nv + complex.edge_count();
    let mut reducer = Reducer::new(filtration.len());
    for &g in filtration.order() {
        if g < base {
            continue;
        }
        let mut column: Vec<u32> = complex
            .triangle_edges(g - base)
            .iter()
            .map(|&e| filtration.position(nv + e) as u32)
            .collect();
        column.sort_unstable();
        if let Some(low) = reducer.reduce(column) {
            let e = filtration.order()[low as usize];
            partner[g] = e;
            partner[e] = g;
        }
    }
}

/// Rank over ℤ₂ of the boundary map restricted to the given triangles.
pub(crate) fn triangle_boundary_rank(
    complex: &SimplicialComplex,
    triangles: impl IntoIterator<Item = usize>,
) -> usize {
    let mut reducer = Reducer::new(complex.edge_count());
    let mut rank = 0;
    for t in triangles {
        let mut column: Vec<u32> = complex.triangle_edges(t).iter().map(|&e| e as u32).collect();
        column.sort_unstable();
        if reducer.reduce(column).is_some() {
            rank += 1;
        }
    }
    rank
}

/// Sparse ℤ₂ column reduction keyed by pivot row.
struct Reducer {
    column_by_low: Vec<u32>,
    columns: Vec<Vec<u32>>,
    scratch: Vec<u32>,
}

impl Reducer {
    fn new(rows: usize) -> Self {
        Self {
            column_by_low: vec![NO_COLUMN; rows],
            columns: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// Reduces a sorted column against the stored ones. Returns its pivot row if
    /// it survives, storing it for later columns.
    fn reduce(&mut self, mut column: Vec<u32>) -> Option<u32> {
        while let Some(&low) = column.last() {
            let owner = self.column_by_low[low as usize];
            if owner == NO_COLUMN {
                self.column_by_low[low as usize] = self.columns.len() as u32;
                self.columns.push(column);
                return Some(low);
            }
            symmetric_difference(&column, &self.columns[owner as usize], &mut self.scratch);
            std::mem::swap(&mut column, &mut self.scratch);
        }
        None
    }
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
