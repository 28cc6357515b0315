//! Triangulated grids, scalar fields and their lower-star filtrations.

mod field;
mod filtration;
mod grid;
mod simplicial;

pub use field::ScalarField;
pub use filtration::Filtration;
pub use grid::GridSpec;
pub use simplicial::{SimplexId, SimplicialComplex};

use crate::error::Result;

/// Triangulates a regular grid into its simplicial 2-complex.
pub fn build_grid_complex(grid: &GridSpec) -> SimplicialComplex {
    SimplicialComplex::from_grid(grid)
}

/// Lower-star filtration of `field`, or of `-field` when `negate` is set.
pub fn lower_star_filtration(
    complex: &SimplicialComplex,
    field: &ScalarField,
    negate: bool,
) -> Result<Filtration> {
    Filtration::lower_star(complex, field, negate)
}
