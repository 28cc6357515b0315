//! Synthetic `(β, ν, w)`-approximation densities around a known graph, and
//! checks of the reconstruction against that ground truth.
//!
//! A density is a `(β, ν, w)`-approximation of a connected graph `G` when it
//! lies in `[β, β+ν]` on a `w`-neighbourhood `G_w` of `G` whose topology matches
//! `G`, in `[0, ν]` elsewhere, and `β > 2ν`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{GridSpec, ScalarField, SimplicialComplex};
use crate::error::{Error, Result};
use crate::morse_oracle::GradientField;
use crate::persistence::triangle_boundary_rank;
use crate::reconstruct::{graph_betti1, ReconstructedGraph};
use crate::union_find::UnionFind;

/// An abstract graph embedded in the grid's geometric domain.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenGraph {
    pub nodes: Vec<Vec<f64>>,
    pub arcs: Vec<[usize; 2]>,
}

impl HiddenGraph {
    pub fn new(nodes: Vec<Vec<f64>>, arcs: Vec<[usize; 2]>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidGraph("no nodes".into()));
        }
        let d = nodes[0].len();
        if nodes.iter().any(|n| n.len() != d) {
            return Err(Error::InvalidGraph("nodes have mixed dimensions".into()));
        }
        if let Some(a) = arcs.iter().find(|a| a[0] >= nodes.len() || a[1] >= nodes.len()) {
            return Err(Error::InvalidGraph(format!("arc {a:?} references a missing node")));
        }
        Ok(Self { nodes, arcs })
    }

    /// Rectangular lattice of `cols × rows` square cells of side `cell`, lower
    /// corner at `origin`, lying in the plane of the first two axes. Its first
    /// Betti number is `cols · rows`.
    pub fn lattice(origin: &[f64], cell: f64, cols: usize, rows: usize) -> Self {
        let mut nodes = Vec::with_capacity((cols + 1) * (rows + 1));
        for j in 0..=rows {
            for i in 0..=cols {
                let mut p = origin.to_vec();
                p[0] += i as f64 * cell;
                p[1] += j as f64 * cell;
                nodes.push(p);
            }
        }
        let id = |i: usize, j: usize| j * (cols + 1) + i;
        let mut arcs = Vec::new();
        for j in 0..=rows {
            for i in 0..=cols {
                if i < cols {
                    arcs.push([id(i, j), id(i + 1, j)]);
                }
                if j < rows {
                    arcs.push([id(i, j), id(i, j + 1)]);
                }
            }
        }
        Self { nodes, arcs }
    }
}

/// The hidden graph snapped onto the grid's 1-skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterizedGraph {
    /// Sorted grid vertices on the graph.
    pub vertices: Vec<usize>,
    /// Sorted grid edges `(a, b)`, `a < b`, traversed by the arcs.
    pub edges: Vec<[usize; 2]>,
}

impl RasterizedGraph {
    pub fn betti1(&self) -> usize {
        graph_betti1(&self.vertices, &self.edges)
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        let local = |v| self.vertices.binary_search(&v).expect("edge vertex listed");
        let mut components = self.vertices.len();
        for &[a, b] in &self.edges {
            if uf.union(local(a), local(b)).is_some() {
                components -= 1;
            }
        }
        components == 1
    }
}

/// Walks each arc along grid lines (axis-aligned unit steps), always advancing
/// the axis with the largest remaining fraction of its displacement.
pub fn rasterize(grid: &GridSpec, graph: &HiddenGraph) -> Result<RasterizedGraph> {
    let dim = grid.dimension();
    let snap = |p: &[f64]| -> Result<Vec<usize>> {
        if p.len() != dim {
            return Err(Error::InvalidGraph(format!(
                "node {p:?} has {} coordinates, grid has {dim}",
                p.len()
            )));
        }
        p.iter()
            .zip(grid.spacing())
            .zip(grid.extents())
            .map(|((&x, &s), &n)| {
                let c = (x / s).round();
                if c < 0.0 || c > (n - 1) as f64 || !c.is_finite() {
                    Err(Error::InvalidGraph(format!("node {p:?} lies outside the grid")))
                } else {
                    Ok(c as usize)
                }
            })
            .collect()
    };
    let snapped: Vec<Vec<usize>> = graph.nodes.iter().map(|p| snap(p)).collect::<Result<_>>()?;

    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for node in &snapped {
        vertices.push(grid.index_of(node).expect("snapped inside grid"));
    }
    for &[s, t] in &graph.arcs {
        let (from, to) = (&snapped[s], &snapped[t]);
        let total: Vec<usize> = from.iter().zip(to).map(|(&a, &b)| a.abs_diff(b)).collect();
        let mut remaining = total.clone();
        let mut cur = from.clone();
        let mut prev = grid.index_of(&cur).expect("inside grid");
        while remaining.iter().any(|&r| r > 0) {
            let axis = (0..dim)
                .filter(|&ax| remaining[ax] > 0)
                .max_by(|&a, &b| {
                    // remaining[a]/total[a] vs remaining[b]/total[b], lowest axis on ties
                    (remaining[a] * total[b])
                        .cmp(&(remaining[b] * total[a]))
                        .then(b.cmp(&a))
                })
                .expect("some axis remains");
            if to[axis] > cur[axis] {
                cur[axis] += 1;
            } else {
                cur[axis] -= 1;
            }
            remaining[axis] -= 1;
            let next = grid.index_of(&cur).expect("inside grid");
            vertices.push(next);
            edges.push([prev.min(next), prev.max(next)]);
            prev = next;
        }
    }
    vertices.sort_unstable();
    vertices.dedup();
    edges.sort_unstable();
    edges.dedup();
    Ok(RasterizedGraph { vertices, edges })
}

/// Noise-model parameters: density offset `beta`, noise amplitude `nu`,
/// neighbourhood radius `w` (in the grid's length units) and RNG seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub beta: f64,
    pub nu: f64,
    pub w: f64,
    pub seed: u64,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("nu must be >= 0, got {}", self.nu)));
        }
        if !(self.w > 0.0 && self.w.is_finite()) {
            return Err(Error::InvalidParameter(format!("w must be > 0, got {}", self.w)));
        }
        if !(self.beta > 2.0 * self.nu && self.beta.is_finite()) {
            return Err(Error::NoiseModelViolation(format!(
                "beta = {} must exceed 2 nu = {}",
                self.beta,
                2.0 * self.nu
            )));
        }
        Ok(())
    }

    /// Whether `delta` lies in the guaranteed range `[ν, β − ν)`.
    pub fn delta_in_range(&self, delta: f64) -> bool {
        delta >= self.nu && delta < self.beta - self.nu
    }
}

/// Per-vertex membership in the thickened neighbourhood `G_w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodMask {
    inside: Vec<bool>,
}

impl NeighborhoodMask {
    pub fn new(inside: Vec<bool>) -> Self {
        Self { inside }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.inside[v]
    }

    pub fn flags(&self) -> &[bool] {
        &self.inside
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Whether an edge lies in the mask subcomplex (both endpoints inside).
    pub fn contains_edge(&self, complex: &SimplicialComplex, e: usize) -> bool {
        complex.edge(e).iter().all(|&v| self.inside[v])
    }
}

/// A generated density together with its ground truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub field: ScalarField,
    pub mask: NeighborhoodMask,
    pub truth: RasterizedGraph,
}

/// Vertices within Euclidean distance `w` of a rasterized graph vertex.
pub fn neighborhood_mask(grid: &GridSpec, truth: &RasterizedGraph, w: f64) -> NeighborhoodMask {
    let dim = grid.dimension();
    let extents = grid.extents();
    let spacing = grid.spacing();
    let reach: Vec<usize> = spacing.iter().map(|s| (w / s).floor() as usize).collect();
    let mut inside = vec![false; grid.vertex_count()];
    let mut offset = vec![0usize; dim];
    for &v in &truth.vertices {
        let c = grid.coords_of(v);
        let lo: Vec<usize> = (0..dim).map(|ax| c[ax].saturating_sub(reach[ax])).collect();
        let hi: Vec<usize> = (0..dim).map(|ax| (c[ax] + reach[ax]).min(extents[ax] - 1)).collect();
        offset.copy_from_slice(&lo);
        loop {
            let d2: f64 = (0..dim)
                .map(|ax| {
                    let d = (offset[ax] as f64 - c[ax] as f64) * spacing[ax];
                    d * d
                })
                .sum();
            if d2 <= w * w {
                inside[grid.index_of(&offset).expect("inside grid")] = true;
            }
            let mut ax = 0;
            loop {
                if ax == dim {
                    break;
                }
                if offset[ax] < hi[ax] {
                    offset[ax] += 1;
                    break;
                }
                offset[ax] = lo[ax];
                ax += 1;
            }
            if ax == dim {
                break;
            }
        }
    }
    NeighborhoodMask { inside }
}

/// Samples `ρ = β·1[G_w] + u` with `u ~ U[0, ν]` i.i.d. per vertex.
pub fn generate_instance(grid: &GridSpec, graph: &HiddenGraph, params: &NoiseParams) -> Result<Instance> {
    params.validate()?;
    let truth = rasterize(grid, graph)?;
    if !truth.is_connected() {
        return Err(Error::InvalidGraph("rasterized graph is disconnected".into()));
    }
    let mask = neighborhood_mask(grid, &truth, params.w);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let values = mask
        .inside
        .iter()
        .map(|&m| {
            let u = if params.nu > 0.0 {
                rng.gen_range(0.0..=params.nu)
            } else {
                0.0
            };
            if m {
                params.beta + u
            } else {
                u
            }
        })
        .collect();
    Ok(Instance {
        field: ScalarField::new(values)?,
        mask,
        truth,
    })
}

/// Independent RNG seed for the `index`-th instance of a batch.
pub fn instance_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the combined input
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Connectivity and first Betti number of the full subcomplex on `inside`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubcomplexTopology {
    pub vertices: usize,
    pub components: usize,
    pub betti1: usize,
}

pub fn subcomplex_topology(complex: &SimplicialComplex, inside: &[bool]) -> SubcomplexTopology {
    let nv = complex.vertex_count();
    let mut uf = UnionFind::new(nv);
    let vertices = inside.iter().filter(|&&b| b).count();
    let mut components = vertices;
    let mut edges = 0usize;
    for &[a, b] in complex.edges() {
        if inside[a] && inside[b] {
            edges += 1;
            if uf.union(a, b).is_some() {
                components -= 1;
            }
        }
    }
    let triangles = (0..complex.triangle_count())
        .filter(|&t| complex.triangle(t).iter().all(|&v| inside[v]));
    let rank = triangle_boundary_rank(complex, triangles);
    SubcomplexTopology {
        vertices,
        components,
        betti1: edges + components - vertices - rank,
    }
}

/// Outcome of checking a field against the noise model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Vertices whose value breaks the density bands.
    pub density_violations: Vec<usize>,
    pub mask_connected: bool,
    pub mask_betti1: usize,
    pub expected_betti1: usize,
}

impl ValidationReport {
    pub fn density_ok(&self) -> bool {
        self.density_violations.is_empty()
    }

    /// Connectivity and Betti-1 agreement, the checkable part of the
    /// retraction condition.
    pub fn topology_ok(&self) -> bool {
        self.mask_connected && self.mask_betti1 == self.expected_betti1
    }

    pub fn passed(&self) -> bool {
        self.density_ok() && self.topology_ok()
    }
}

/// Checks the density bands at every vertex and the topology of the mask
/// subcomplex against the hidden graph's Betti number.
pub fn validate_instance(
    complex: &SimplicialComplex,
    field: &ScalarField,
    mask: &NeighborhoodMask,
    params: &NoiseParams,
    expected_betti1: usize,
) -> ValidationReport {
    let NoiseParams { beta, nu, .. } = *params;
    let density_violations = field
        .values()
        .iter()
        .zip(&mask.inside)
        .enumerate()
        .filter(|(_, (&v, &m))| {
            if m {
                !(beta..=beta + nu).contains(&v)
            } else {
                !(0.0..=nu).contains(&v)
            }
        })
        .map(|(i, _)| i)
        .collect();
    let topo = subcomplex_topology(complex, &mask.inside);
    ValidationReport {
        density_violations,
        mask_connected: topo.components == 1,
        mask_betti1: topo.betti1,
        expected_betti1,
    }
}

/// Whether every vertex and edge of `ghat` lies in the mask subcomplex.
pub fn check_containment(ghat: &ReconstructedGraph, mask: &NeighborhoodMask) -> bool {
    contains_graph(&ghat.vertices, ghat.endpoints(), mask)
}

/// [`check_containment`] for a graph given by vertex ids and edge endpoints.
pub fn contains_graph(vertices: &[usize], edges: &[[usize; 2]], mask: &NeighborhoodMask) -> bool {
    let inside = |v: usize| v < mask.len() && mask.inside[v];
    vertices.iter().all(|&v| inside(v)) && edges.iter().all(|&[a, b]| inside(a) && inside(b))
}

/// Gradient vectors `(v, e)` with `v` inside the mask and `e` leaving it.
pub fn crossing_vectors(
    complex: &SimplicialComplex,
    field: &GradientField,
    mask: &NeighborhoodMask,
) -> Vec<(usize, usize)> {
    field
        .vectors()
        .filter(|&(v, e)| mask.inside[v] && !mask.contains_edge(complex, e))
        .collect()
}

/// Superlevel set `{v : ρ(v) ≥ t}` with its topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdResult {
    pub inside: Vec<bool>,
    pub components: usize,
    pub betti1: usize,
}

pub fn threshold_baseline(complex: &SimplicialComplex, field: &ScalarField, t: f64) -> ThresholdResult {
    let inside: Vec<bool> = field.values().iter().map(|&v| v >= t).collect();
    let topo = subcomplex_topology(complex, &inside);
    ThresholdResult {
        inside,
        components: topo.components,
        betti1: topo.betti1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta: f64, nu: f64, w: f64) -> NoiseParams {
        NoiseParams { beta, nu, w, seed: 7 }
    }

    fn square_loop() -> HiddenGraph {
        HiddenGraph::lattice(&[8.0, 8.0], 16.0, 1, 1)
    }

    #[test]
    fn rejects_weak_signal() {
        let grid = GridSpec::new(&[32, 32]).unwrap();
        let err = generate_instance(&grid, &square_loop(), &params(2.0, 1.0, 2.0)).unwrap_err();
        assert!(matches!(err, Error::NoiseModelViolation(_)));
        assert!(matches!(
            generate_instance(&grid, &square_loop(), &params(10.0, 1.0, 0.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn rejects_disconnected_graph() {
        let grid = GridSpec::new(&[32, 32]).unwrap();
        let g = HiddenGraph::new(
            vec![vec![2.0, 2.0], vec![6.0, 2.0], vec![20.0, 20.0], vec![25.0, 20.0]],
            vec![[0, 1], [2, 3]],
        )
        .unwrap();
        assert!(matches!(
            generate_instance(&grid, &g, &params(10.0, 1.0, 2.0)),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn diagonal_arc_stays_on_grid_lines() {
        let grid = GridSpec::new(&[10, 10]).unwrap();
        let g = HiddenGraph::new(vec![vec![1.0, 1.0], vec![4.0, 7.0]], vec![[0, 1]]).unwrap();
        let r = rasterize(&grid, &g).unwrap();
        assert_eq!(r.edges.len(), 9);
        assert_eq!(r.vertices.len(), 10);
        for &[a, b] in &r.edges {
            let (ca, cb) = (grid.coords_of(a), grid.coords_of(b));
            let steps: usize = ca.iter().zip(&cb).map(|(x, y)| x.abs_diff(*y)).sum();
            assert_eq!(steps, 1);
        }
        assert!(r.is_connected());
        assert_eq!(r.betti1(), 0);
    }

    #[test]
    fn noiseless_field_is_two_valued() {
        let grid = GridSpec::new(&[32, 32]).unwrap();
        let inst = generate_instance(&grid, &square_loop(), &params(10.0, 0.0, 2.0)).unwrap();
        for (v, &x) in inst.field.values().iter().enumerate() {
            assert_eq!(x, if inst.mask.contains(v) { 10.0 } else { 0.0 });
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let grid = GridSpec::new(&[64, 64]).unwrap();
        let g = HiddenGraph::lattice(&[10.0, 10.0], 20.0, 2, 1);
        let a = generate_instance(&grid, &g, &params(10.0, 1.0, 2.0)).unwrap();
        let b = generate_instance(&grid, &g, &params(10.0, 1.0, 2.0)).unwrap();
        let bits = |f: &ScalarField| f.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.field), bits(&b.field));
        assert_eq!(a.mask, b.mask);
    }

    #[test]
    fn bands_are_separated() {
        let grid = GridSpec::new(&[40, 40]).unwrap();
        let p = params(10.0, 1.0, 2.0);
        let inst = generate_instance(&grid, &square_loop(), &p).unwrap();
        let vals = inst.field.values();
        let min_in = (0..vals.len()).filter(|&v| inst.mask.contains(v)).map(|v| vals[v]).fold(f64::INFINITY, f64::min);
        let max_out = (0..vals.len()).filter(|&v| !inst.mask.contains(v)).map(|v| vals[v]).fold(0.0, f64::max);
        assert!(min_in - max_out >= p.beta - p.nu);
        assert!(p.beta - p.nu > p.nu);
    }

    #[test]
    fn generator_output_validates() {
        let grid = GridSpec::new(&[40, 40]).unwrap();
        let k = SimplicialComplex::from_grid(&grid);
        let p = params(10.0, 1.0, 2.0);
        let inst = generate_instance(&grid, &square_loop(), &p).unwrap();
        let report = validate_instance(&k, &inst.field, &inst.mask, &p, inst.truth.betti1());
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.mask_betti1, 1);
    }

    #[test]
    fn raised_background_vertex_is_reported() {
        let grid = GridSpec::new(&[40, 40]).unwrap();
        let k = SimplicialComplex::from_grid(&grid);
        let p = params(10.0, 1.0, 2.0);
        let inst = generate_instance(&grid, &square_loop(), &p).unwrap();
        let outside = (0..inst.mask.len()).find(|&v| !inst.mask.contains(v)).unwrap();
        let mut vals = inst.field.values().to_vec();
        vals[outside] = p.beta;
        let field = ScalarField::new(vals).unwrap();
        let report = validate_instance(&k, &field, &inst.mask, &p, 1);
        assert_eq!(report.density_violations, vec![outside]);
        assert!(report.topology_ok());
    }

    #[test]
    fn oversized_neighbourhood_fills_holes() {
        // Two 4×4 loops side by side; a radius-3 thickening closes both holes.
        let grid = GridSpec::new(&[24, 16]).unwrap();
        let k = SimplicialComplex::from_grid(&grid);
        let g = HiddenGraph::lattice(&[6.0, 6.0], 4.0, 2, 1);
        let p = params(10.0, 1.0, 3.0);
        let inst = generate_instance(&grid, &g, &p).unwrap();
        assert_eq!(inst.truth.betti1(), 2);
        let report = validate_instance(&k, &inst.field, &inst.mask, &p, inst.truth.betti1());
        assert!(report.density_ok());
        assert!(!report.topology_ok());
        assert!(report.mask_betti1 < 2);
    }

    #[test]
    fn containment_checks() {
        let mask = NeighborhoodMask::new(vec![true, true, false]);
        assert!(contains_graph(&[], &[], &mask));
        assert!(contains_graph(&[0, 1], &[[0, 1]], &mask));
        assert!(!contains_graph(&[0, 1, 2], &[[0, 1]], &mask));
        assert!(check_containment(&ReconstructedGraph::default(), &mask));
    }

    #[test]
    fn thresholds() {
        let grid = GridSpec::new(&[40, 40]).unwrap();
        let k = SimplicialComplex::from_grid(&grid);
        let p = params(10.0, 1.0, 2.0);
        let inst = generate_instance(&grid, &square_loop(), &p).unwrap();
        let all = threshold_baseline(&k, &inst.field, inst.field.min());
        assert!(all.inside.iter().all(|&b| b));
        assert_eq!((all.components, all.betti1), (1, 0));
        let none = threshold_baseline(&k, &inst.field, inst.field.max() + 1.0);
        assert!(none.inside.iter().all(|&b| !b));
        assert_eq!(none.components, 0);
        let at_beta = threshold_baseline(&k, &inst.field, p.beta);
        assert!(at_beta.inside.iter().enumerate().all(|(v, &b)| !b || inst.mask.contains(v)));
        assert_eq!(at_beta.betti1, 1);
    }

    #[test]
    fn seeds_differ_per_instance() {
        let seeds: std::collections::HashSet<u64> = (0..100).map(|i| instance_seed(42, i)).collect();
        assert_eq!(seeds.len(), 100);
    }
}
