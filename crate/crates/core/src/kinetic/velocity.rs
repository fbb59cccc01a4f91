use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric midpoint nodes on `[-V, V]`; `v = 0` is never a node, so every
/// node has a direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityGrid {
    pub v_cap: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Measure of the velocity set, `2 V`.
    pub omega: f64,
}

impl VelocityGrid {
    pub fn new(v_cap: f64, m: usize) -> Result<Self> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::param(
                "velocities",
                format!("need an even count >= 2, got {m}"),
            ));
        }
        if !(v_cap > 0.0 && v_cap.is_finite()) {
            return Err(Error::param(
                "V_cap",
                format!("must be positive, got {v_cap}"),
            ));
        }
        let w = 2.0 * v_cap / m as f64;
        let nodes = (0..m).map(|j| -v_cap + (j as f64 + 0.5) * w).collect();
        Ok(VelocityGrid {
            v_cap,
            nodes,
            weights: vec![w; m],
            omega: 2.0 * v_cap,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node with the opposite velocity.
    #[inline]
    pub fn mirror(&self, j: usize) -> usize {
        self.len() - 1 - j
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    pub fn first_moment(&self, f: &[f64]) -> f64 {
        f.iter()
            .zip(&self.weights)
            .zip(&self.nodes)
            .map(|((f, w), v)| f * w * v)
            .sum()
    }

    /// `sum w v^2`, the discrete `int v^2 dv`.
    pub fn second_moment(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.nodes)
            .map(|(w, v)| w * v * v)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_normalised() {
        let g = VelocityGrid::new(1.5, 16).unwrap();
        assert!((g.weights.iter().sum::<f64>() - 3.0).abs() < 1e-14);
        for j in 0..16 {
            assert_eq!(g.nodes[j], -g.nodes[g.mirror(j)]);
            assert!(g.nodes[j] != 0.0);
        }
        assert!(VelocityGrid::new(1.0, 7).is_err());
    }

    #[test]
    fn moments_of_simple_densities() {
        let g = VelocityGrid::new(2.0, 8).unwrap();
        assert!((g.integrate(&[0.25; 8]) - 1.0).abs() < 1e-14);
        assert!(g.first_moment(&[0.25; 8]).abs() < 1e-14);
        let odd: Vec<f64> = g.nodes.iter().map(|v| 1.0 + v).collect();
        assert!((g.integrate(&odd) - 4.0).abs() < 1e-13);
        // the midpoint rule misses h^3 / 12 per cell for v^2
        let exact = 2.0 * 8.0 / 3.0;
        assert!((g.second_moment() - exact * (1.0 - 1.0 / 64.0)).abs() < 1e-12);
    }
}
