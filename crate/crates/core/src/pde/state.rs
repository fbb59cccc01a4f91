use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use crate::error::{Error, Result};
use crate::model::{equilibrium, ModelParams};

pub const FIELD_NAMES: [&str; 5] = ["A", "S", "R", "C", "E"];

/// Cell averages of the five unknowns at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    pub a: Vec<f64>,
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub c: Vec<f64>,
    pub e: Vec<f64>,
}

impl FieldState {
    pub fn zeros(n: usize) -> Self {
        FieldState {
            t: 0.0,
            a: vec![0.0; n],
            s: vec![0.0; n],
            r: vec![0.0; n],
            c: vec![0.0; n],
            e: vec![0.0; n],
        }
    }

    pub fn uniform(n: usize, values: [f64; 5]) -> Self {
        FieldState {
            t: 0.0,
            a: vec![values[0]; n],
            s: vec![values[1]; n],
            r: vec![values[2]; n],
            c: vec![values[3]; n],
            e: vec![values[4]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn fields(&self) -> [&Vec<f64>; 5] {
        [&self.a, &self.s, &self.r, &self.c, &self.e]
    }

    pub fn fields_mut(&mut self) -> [&mut Vec<f64>; 5] {
        [
            &mut self.a,
            &mut self.s,
            &mut self.r,
            &mut self.c,
            &mut self.e,
        ]
    }

    pub fn cell(&self, i: usize) -> [f64; 5] {
        [self.a[i], self.s[i], self.r[i], self.c[i], self.e[i]]
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        FIELD_NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name))
            .map(|i| self.fields()[i].as_slice())
    }

    /// `self = x + h * k` field by field; `t` is left alone.
    pub(crate) fn set_axpy(&mut self, x: &FieldState, h: f64, k: &FieldState) {
        for ((dst, xs), ks) in self
            .fields_mut()
            .into_iter()
            .zip(x.fields())
            .zip(k.fields())
        {
            for ((d, &xv), &kv) in dst.iter_mut().zip(xs.iter()).zip(ks.iter()) {
                *d = xv + h * kv;
            }
        }
    }

    pub fn max_abs_diff(&self, other: &FieldState) -> f64 {
        self.fields()
            .iter()
            .zip(other.fields())
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// Counts cells violating `u >= -neg_tol` (any field) and
    /// `R <= 1 + r_tol`.
    pub fn bound_violations(&self, neg_tol: f64, r_tol: f64) -> (usize, usize) {
        let neg = self
            .fields()
            .iter()
            .map(|f| f.iter().filter(|v| **v < -neg_tol).count())
            .sum();
        let over = self.r.iter().filter(|v| **v > 1.0 + r_tol).count();
        (neg, over)
    }
}

/// Multiplicative random perturbation of the equilibrium in `A, S, R, C`,
/// `E = 0`. Draws are uniform on `[-1, 1]`, field by field in the order
/// `A, S, R, C`, from a ChaCha stream seeded with `seed`.
pub fn init_state(p: &ModelParams, grid: &Grid1D, seed: u64, amplitude: f64) -> Result<FieldState> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::param(
            "amplitude",
            format!("must be finite and >= 0, got {amplitude}"),
        ));
    }
    let eq = equilibrium(p);
    eq.require_admissible()?;
    let base = eq.as_array();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = FieldState::zeros(grid.n);
    for (f, field) in st.fields_mut().into_iter().take(4).enumerate() {
        for v in field.iter_mut() {
            let u: f64 = rng.random_range(-1.0..=1.0);
            *v = base[f] * (1.0 + amplitude * u);
        }
    }
    for r in st.r.iter_mut() {
        *r = r.clamp(0.0, 1.0);
    }
    Ok(st)
}
