use crate::error::{Error, Result};

/// A regular grid of density samples on `[0, n₁-1] × … ` in 2 or 3 dimensions.
///
/// Vertices are indexed row-major with the first axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    extents: Vec<usize>,
    spacing: Vec<f64>,
}

impl GridSpec {
    pub fn new(extents: &[usize]) -> Result<Self> {
        Self::with_spacing(extents, &vec![1.0; extents.len()])
    }

    pub fn with_spacing(extents: &[usize], spacing: &[f64]) -> Result<Self> {
        if !(2..=3).contains(&extents.len()) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 2 or 3, got {}",
                extents.len()
            )));
        }
        if let Some(axis) = extents.iter().position(|&n| n < 2) {
            return Err(Error::InvalidGrid(format!(
                "axis {axis} has extent {} (< 2)",
                extents[axis]
            )));
        }
        if spacing.len() != extents.len() {
            return Err(Error::InvalidGrid(format!(
                "{} spacings given for {} axes",
                spacing.len(),
                extents.len()
            )));
        }
        if spacing.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidGrid("spacing must be positive and finite".into()));
        }
        let total = extents
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidGrid("too many vertices".into()))?;
        debug_assert!(total >= 4);
        Ok(Self {
            extents: extents.to_vec(),
            spacing: spacing.to_vec(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn vertex_count(&self) -> usize {
        self.extents.iter().product()
    }

    /// Index stride of each axis.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = Vec::with_capacity(self.extents.len());
        let mut s = 1;
        for &n in &self.extents {
            strides.push(s);
            s *= n;
        }
        strides
    }

    /// Integer grid coordinates of a vertex.
    pub fn coords_of(&self, mut index: usize) -> Vec<usize> {
        self.extents
            .iter()
            .map(|&n| {
                let c = index % n;
                index /= n;
                c
            })
            .collect()
    }

    pub fn index_of(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.extents.len() {
            return None;
        }
        let mut index = 0;
        for (&c, &n) in coords.iter().zip(&self.extents).rev() {
            if c >= n {
                return None;
            }
            index = index * n + c;
        }
        Some(index)
    }

    /// Geometric position of a vertex (grid coordinates times spacing).
    pub fn position_of(&self, index: usize) -> Vec<f64> {
        self.coords_of(index)
            .into_iter()
            .zip(&self.spacing)
            .map(|(c, s)| c as f64 * s)
            .collect()
    }
}
