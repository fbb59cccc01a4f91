use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform cell-centred grid on `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub length: f64,
    pub n: usize,
    pub dx: f64,
}

impl Grid1D {
    pub const MIN_CELLS: usize = 16;

    pub fn new(length: f64, n: usize) -> Result<Self> {
        if n < Self::MIN_CELLS {
            return Err(Error::Invalid(format!(
                "grid needs at least {} cells, got {n}",
                Self::MIN_CELLS
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Invalid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        Ok(Grid1D {
            length,
            n,
            dx: length / n as f64,
        })
    }

    /// `7 pi`, the reference domain.
    pub fn reference(n: usize) -> Result<Self> {
        Self::new(7.0 * std::f64::consts::PI, n)
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.center(i)).collect()
    }

    /// Cell-average integral `sum(u) dx`.
    pub fn integrate(&self, u: &[f64]) -> f64 {
        u.iter().sum::<f64>() * self.dx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let g = Grid1D::new(2.0, 16).unwrap();
        assert_eq!(g.dx, 0.125);
        assert_eq!(g.center(0), 0.0625);
        assert!(Grid1D::new(1.0, 15).is_err());
        assert!(Grid1D::new(0.0, 32).is_err());
    }
}
