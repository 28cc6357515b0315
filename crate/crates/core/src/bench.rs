//! Stage timings for comparing the two reconstruction routes.
//!
//! Persistence (filtration plus pairing) is shared by both routes and timed
//! separately from the reconstruction stage proper.

use std::time::{Duration, Instant};

use crate::complex::{Filtration, GridSpec, ScalarField, SimplicialComplex};
use crate::error::Result;
use crate::morse_oracle::oracle_reconstruct_with_pairs;
use crate::noise_model::{generate_instance, HiddenGraph, Instance, NoiseParams};
use crate::persistence::compute_pairs;
use crate::reconstruct::reconstruct_with_pairs;

/// Median stage times over a number of runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTimes {
    pub persistence: Duration,
    pub oracle: Duration,
    pub simplified: Duration,
}

impl StageTimes {
    /// Oracle time over simplified time.
    pub fn speedup(&self) -> f64 {
        self.oracle.as_secs_f64() / self.simplified.as_secs_f64().max(1e-12)
    }
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

/// Times both routes `runs` times (at least once) and reports median stage times.
/// Fails if the two routes ever disagree.
pub fn time_stages(
    complex: &SimplicialComplex,
    field: &ScalarField,
    delta: f64,
    negate: bool,
    runs: usize,
) -> Result<StageTimes> {
    let runs = runs.max(1);
    let (mut pers, mut oracle, mut simplified) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..runs {
        let t = Instant::now();
        let filtration = Filtration::lower_star(complex, field, negate)?;
        let pairs = compute_pairs(complex, &filtration)?;
        pers.push(t.elapsed());

        let t = Instant::now();
        let slow = oracle_reconstruct_with_pairs(complex, &filtration, &pairs, delta)?;
        oracle.push(t.elapsed());

        let t = Instant::now();
        let fast = reconstruct_with_pairs(complex, &filtration, &pairs, delta)?;
        simplified.push(t.elapsed());

        if fast != slow {
            return Err(crate::Error::InvariantViolation(
                "reconstruction routes disagree".into(),
            ));
        }
    }
    Ok(StageTimes {
        persistence: median(pers),
        oracle: median(oracle),
        simplified: median(simplified),
    })
}

/// Noise-model instance over a lattice of 16-unit cells filling the grid, so the
/// amount of structure per unit area is the same at every grid size.
pub fn lattice_instance(extents: &[usize], seed: u64) -> Result<(GridSpec, Instance)> {
    const CELL: usize = 16;
    let grid = GridSpec::new(extents)?;
    let cells = |n: usize| (n.saturating_sub(CELL) / CELL).max(1);
    let mut origin = vec![(CELL / 2) as f64; extents.len()];
    if extents.len() == 3 {
        origin[2] = (extents[2] / 2) as f64;
    }
    let graph = HiddenGraph::lattice(&origin, CELL as f64, cells(extents[0]), cells(extents[1]));
    let params = NoiseParams {
        beta: 10.0,
        nu: 1.0,
        w: 2.0,
        seed,
    };
    let inst = generate_instance(&grid, &graph, &params)?;
    Ok((grid, inst))
}
