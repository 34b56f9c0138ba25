//! Sampled fields v_n(t) on rectangular lattices.

use serde::{Deserialize, Serialize};

use crate::error::{HirotaError, Result};
use crate::linalg::C;
use crate::solution::{GridSpec, Solution};

/// Row-major samples: `values[k][j]` is v at n = n_min + j, t = t[k].
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid {
    pub n_min: i64,
    pub n_max: i64,
    pub t: Vec<f64>,
    pub values: Vec<Vec<C>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxLocation {
    pub n: i64,
    pub t: f64,
    pub value: f64,
}

impl LatticeGrid {
    pub fn width(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn at(&self, n: i64, k: usize) -> C {
        self.values[k][(n - self.n_min) as usize]
    }

    pub fn max_abs(&self) -> MaxLocation {
        let mut best = MaxLocation { n: self.n_min, t: self.t.first().copied().unwrap_or(0.0), value: f64::NEG_INFINITY };
        for (k, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.norm() > best.value {
                    best = MaxLocation { n: self.n_min + j as i64, t: self.t[k], value: v.norm() };
                }
            }
        }
        best
    }

    pub fn check_finite(&self) -> Result<()> {
        for (k, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(HirotaError::Invalid(format!("non-finite value at n = {}, t = {}", self.n_min + j as i64, self.t[k])));
                }
            }
        }
        Ok(())
    }
}

fn rows<F>(ts: &[f64], f: F) -> Result<Vec<Vec<C>>>
where
    F: Fn(f64) -> Result<Vec<C>> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ts.par_iter().map(|&t| f(t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ts.iter().map(|&t| f(t)).collect()
    }
}

/// Evaluates `sol` on n_min..=n_max at each time in `ts`, fanning out over rows.
pub fn sample(sol: &Solution, n_min: i64, n_max: i64, ts: &[f64]) -> Result<LatticeGrid> {
    let values = rows(ts, |t| (n_min..=n_max).map(|n| sol.field(n, t)).collect())?;
    let g = LatticeGrid { n_min, n_max, t: ts.to_vec(), values };
    g.check_finite()?;
    Ok(g)
}

pub fn sample_spec(sol: &Solution, grid: &GridSpec) -> Result<LatticeGrid> {
    sample(sol, grid.n_min, grid.n_max, &grid.ts())
}
