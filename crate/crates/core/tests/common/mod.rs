//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use morse_graph::{Filtration, GridSpec, PairingSet, ScalarField, SimplicialComplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Faces of the triangulated grid found by enumerating every cell (2D: two
/// triangles per square; 3D: the six tetrahedra of each cube, one per axis
/// permutation) and deduplicating their faces.
pub fn enumerate_cell_faces(extents: &[usize]) -> (BTreeSet<[usize; 2]>, BTreeSet<[usize; 3]>) {
    let idx = |c: &[usize]| -> usize {
        let mut i = 0;
        for ax in (0..extents.len()).rev() {
            i = i * extents[ax] + c[ax];
        }
        i
    };
    let mut edges = BTreeSet::new();
    let mut tris = BTreeSet::new();
    let mut add_simplex = |verts: &[usize]| {
        let mut v = verts.to_vec();
        v.sort_unstable();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                edges.insert([v[i], v[j]]);
                for k in j + 1..v.len() {
                    tris.insert([v[i], v[j], v[k]]);
                }
            }
        }
    };
    match extents.len() {
        2 => {
            for j in 0..extents[1] - 1 {
                for i in 0..extents[0] - 1 {
                    let a = idx(&[i, j]);
                    let b = idx(&[i + 1, j]);
                    let c = idx(&[i, j + 1]);
                    let d = idx(&[i + 1, j + 1]);
                    add_simplex(&[a, b, d]);
                    add_simplex(&[a, c, d]);
                }
            }
        }
        3 => {
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            for k in 0..extents[2] - 1 {
                for j in 0..extents[1] - 1 {
                    for i in 0..extents[0] - 1 {
                        for p in perms {
                            let mut c = [i, j, k];
                            let mut tet = vec![idx(&c)];
                            for ax in p {
                                c[ax] += 1;
                                tet.push(idx(&c));
                            }
                            add_simplex(&tet);
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    (edges, tris)
}

/// Textbook left-to-right boundary-matrix reduction over ℤ₂ with dense bit
/// columns and no clearing. Returns, per global simplex index, its partner.
pub fn naive_partners(complex: &SimplicialComplex, filtration: &Filtration) -> Vec<Option<usize>> {
    let n = complex.simplex_count();
    let words = n.div_ceil(64);
    let order = filtration.order();
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(n);
    for &g in order {
        let mut col = vec![0u64; words];
        for face in complex.boundary_global(g) {
            let r = filtration.position(face);
            col[r / 64] ^= 1 << (r % 64);
        }
        cols.push(col);
    }
    let low = |c: &[u64]| -> Option<usize> {
        c.iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    };
    for j in 0..n {
        while let Some(lj) = low(&cols[j]) {
            let Some(i) = (0..j).find(|&i| low(&cols[i]) == Some(lj)) else { break };
            let (left, right) = cols.split_at_mut(j);
            for (a, b) in right[0].iter_mut().zip(&left[i]) {
                *a ^= *b;
            }
        }
    }
    let mut partner = vec![None; n];
    for j in 0..n {
        if let Some(l) = low(&cols[j]) {
            let (birth, death) = (order[l], order[j]);
            partner[birth] = Some(death);
            partner[death] = Some(birth);
        }
    }
    partner
}

pub fn partners_of(pairs: &PairingSet, n: usize) -> Vec<Option<usize>> {
    (0..n).map(|g| pairs.partner_global(g)).collect()
}

/// Random grid extents with every side in `lo..=hi`.
pub fn random_extents(rng: &mut ChaCha8Rng, three_d: bool, lo: usize, hi: usize) -> Vec<usize> {
    let d = if three_d { 3 } else { 2 };
    (0..d).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Random field; half the time drawn from a handful of integers to force ties.
pub fn random_field(rng: &mut ChaCha8Rng, n: usize) -> ScalarField {
    let tied = rng.gen_bool(0.5);
    let values = (0..n)
        .map(|_| {
            if tied {
                rng.gen_range(0..6) as f64
            } else {
                rng.gen_range(0.0..10.0)
            }
        })
        .collect();
    ScalarField::new(values).unwrap()
}

pub fn grid_complex(extents: &[usize]) -> (GridSpec, SimplicialComplex) {
    let grid = GridSpec::new(extents).unwrap();
    let k = SimplicialComplex::from_grid(&grid);
    (grid, k)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest finite persistence, or 0.
pub fn max_finite_persistence(pairs: &PairingSet) -> f64 {
    pairs
        .pairs()
        .iter()
        .map(|p| p.persistence)
        .filter(|p| p.is_finite())
        .fold(0.0, f64::max)
}

/// Structural checks on the δ-forest: spanning, acyclic, sinks are exactly the
/// vertices of persistence above δ, and only low-persistence edges are used.
pub fn check_forest(
    complex: &SimplicialComplex,
    filtration: &Filtration,
    pairs: &PairingSet,
    forest: &morse_graph::Forest,
    delta: f64,
) -> Result<(), String> {
    let nv = complex.vertex_count();
    if forest.vertex_count() != nv {
        return Err(format!("forest has {} vertices, complex {nv}", forest.vertex_count()));
    }
    let expected_sinks: Vec<usize> = (0..nv)
        .filter(|&v| pairs.persistence_global(v) > delta)
        .collect();
    if forest.sinks() != expected_sinks {
        return Err(format!("sinks {:?} != {:?}", forest.sinks(), expected_sinks));
    }
    for &e in forest.tree_edges() {
        if pairs.persistence_global(nv + e) > delta {
            return Err(format!("tree edge e{e} has persistence above delta"));
        }
    }
    if forest.tree_edges().len() + forest.tree_count() != nv {
        return Err("edge count inconsistent with a forest".into());
    }
    for v in 0..nv {
        let mut cur = v;
        let mut steps = 0;
        while let Some((p, e)) = forest.parent(cur) {
            let [a, b] = complex.edge(e);
            if !((a == cur && b == p) || (a == p && b == cur)) {
                return Err(format!("parent edge e{e} does not join v{cur} and v{p}"));
            }
            if forest.tree_edges().binary_search(&e).is_err() {
                return Err(format!("parent edge e{e} is not a tree edge"));
            }
            cur = p;
            steps += 1;
            if steps > nv {
                return Err(format!("cycle reached from v{v}"));
            }
        }
        if cur != forest.sink_of(v) {
            return Err(format!("v{v} walks to v{cur}, sink_of says v{}", forest.sink_of(v)));
        }
        if filtration.position(v) < filtration.position(cur) {
            return Err(format!("v{v} precedes its sink v{cur} in the filtration"));
        }
    }
    Ok(())
}
