//! Serializable description of a solution field and its evaluator.

use serde::{Deserialize, Serialize};

use crate::closedform::{max_amplitude, soliton1};
use crate::darboux::{nfold_solution, peak_tuned_constants, rogue_solution, DarbouxSystem};
use crate::error::{HirotaError, Result};
use crate::linalg::C;
use crate::seed::{CTilde, ElementarySpec};
use crate::spectral::{on_cut, Params, Sheet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Background,
    Soliton1 {
        z1: C,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c1: Option<C>,
    },
    Nfold {
        points: Vec<C>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cs: Option<Vec<C>>,
    },
    Rogue {
        order: usize,
        #[serde(default)]
        c_tilde: CTilde,
        #[serde(default)]
        n0: i64,
        #[serde(default)]
        t0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_min: i64,
    pub n_max: i64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_min: -30, n_max: 30, t_min: -3.0, t_max: 3.0, t_steps: 201 }
    }
}

impl GridSpec {
    pub fn ts(&self) -> Vec<f64> {
        if self.t_steps == 1 {
            return vec![self.t_min];
        }
        let span = self.t_max - self.t_min;
        let m = (self.t_steps - 1) as f64;
        (0..self.t_steps).map(|k| self.t_min + span * k as f64 / m).collect()
    }

    pub fn ns(&self) -> Vec<i64> {
        (self.n_min..=self.n_max).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSpec {
    pub family: Family,
    pub params: Params,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub sheet: Sheet,
    #[serde(default)]
    pub peak_tuned: bool,
}

fn bad(path: &str, msg: &str) -> HirotaError {
    HirotaError::Invalid(format!("{path}: {msg}"))
}

fn finite(z: &C) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl SolutionSpec {
    pub fn new(family: Family, params: Params) -> Self {
        SolutionSpec { family, params, grid: GridSpec::default(), sheet: Sheet::Principal, peak_tuned: false }
    }

    /// Structural checks; messages name the offending field.
    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| bad("params", &e.to_string()))?;
        let g = &self.grid;
        if g.n_min > g.n_max {
            return Err(bad("grid.n_min", "must not exceed grid.n_max"));
        }
        if !(g.t_min.is_finite() && g.t_max.is_finite()) || g.t_min > g.t_max {
            return Err(bad("grid.t_min", "must be finite and not exceed grid.t_max"));
        }
        if g.t_steps == 0 {
            return Err(bad("grid.t_steps", "must be at least 1"));
        }
        let p = &self.params;
        let needs_amp = !matches!(self.family, Family::Background);
        if needs_amp && p.amp <= 0.0 {
            return Err(bad("params.A", "must be positive for dressed solutions"));
        }
        let check_point = |path: String, z: &C| -> Result<()> {
            if !finite(z) {
                return Err(bad(&path, "must be finite"));
            }
            if z.norm() <= 1.0 {
                return Err(bad(&path, "|z| must exceed 1"));
            }
            Ok(())
        };
        match &self.family {
            Family::Background => {}
            Family::Soliton1 { z1, c1 } => {
                check_point("family.z1".into(), z1)?;
                match c1 {
                    None if !self.peak_tuned => return Err(bad("family.c1", "required unless peak_tuned")),
                    Some(c) if !finite(c) => return Err(bad("family.c1", "must be finite")),
                    _ => {}
                }
            }
            Family::Nfold { points, cs } => {
                if points.is_empty() {
                    return Err(bad("family.points", "must not be empty"));
                }
                for (i, z) in points.iter().enumerate() {
                    check_point(format!("family.points[{i}]"), z)?;
                    if points[..i].iter().any(|w| (w - z).norm() < 1e-12) {
                        return Err(bad(&format!("family.points[{i}]"), "repeats an earlier point"));
                    }
                }
                match cs {
                    None if !self.peak_tuned => return Err(bad("family.cs", "required unless peak_tuned")),
                    Some(v) if v.len() != points.len() => return Err(bad("family.cs", "needs one constant per point")),
                    Some(v) if !v.iter().all(finite) => return Err(bad("family.cs", "must be finite")),
                    _ => {}
                }
            }
            Family::Rogue { order, t0, .. } => {
                if *order == 0 || *order > 8 {
                    return Err(bad("family.order", "must be between 1 and 8"));
                }
                if !t0.is_finite() {
                    return Err(bad("family.t0", "must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Resolves constants (peak tuning) and returns an evaluator.
    pub fn build(&self) -> Result<Solution> {
        self.validate()?;
        let p = self.params;
        let kind = match &self.family {
            Family::Background => Kind::Background(p.amp * C::from_polar(1.0, 0.0)),
            Family::Soliton1 { z1, c1 } => {
                let c = match (c1, self.peak_tuned) {
                    (_, true) => max_amplitude(*z1, &p)?.1,
                    (Some(c), false) => *c,
                    (None, false) => unreachable!("validated"),
                };
                Kind::Soliton1 { z1: *z1, c1: c }
            }
            Family::Nfold { points, cs } => {
                let cs = if self.peak_tuned { peak_tuned_constants(points, &p)? } else { cs.clone().unwrap_or_default() };
                let mut sys = DarbouxSystem::from_points(points, &cs, p)?;
                sys.sheet = self.sheet;
                Kind::Nfold(sys)
            }
            Family::Rogue { order, c_tilde, n0, t0 } => {
                let spec = ElementarySpec { n0: *n0, t0: *t0, c_tilde: c_tilde.clone(), params: p };
                Kind::Rogue { order: *order, spec }
            }
        };
        Ok(Solution { params: p, kind })
    }

    /// Whether any spectral point sits on the branch cut.
    pub fn touches_cut(&self) -> bool {
        match &self.family {
            Family::Soliton1 { z1, .. } => on_cut(*z1, &self.params),
            Family::Nfold { points, .. } => points.iter().any(|z| on_cut(*z, &self.params)),
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Background(C),
    Soliton1 { z1: C, c1: C },
    Nfold(DarbouxSystem),
    Rogue { order: usize, spec: ElementarySpec },
}

/// Ready-to-evaluate field v_n(t).
#[derive(Debug, Clone)]
pub struct Solution {
    pub params: Params,
    kind: Kind,
}

impl Solution {
    pub fn background(params: Params) -> Self {
        Solution { params, kind: Kind::Background(C::new(params.amp, 0.0)) }
    }

    pub fn field(&self, n: i64, t: f64) -> Result<C> {
        match &self.kind {
            Kind::Background(v) => Ok(*v),
            Kind::Soliton1 { z1, c1 } => soliton1(n, t, *z1, *c1, &self.params),
            Kind::Nfold(sys) => nfold_solution(sys, n, t),
            Kind::Rogue { order, spec } => rogue_solution(n, t, *order, spec),
        }
    }

    /// Translation constants in use, when the family has any.
    pub fn constants(&self) -> Vec<C> {
        match &self.kind {
            Kind::Soliton1 { c1, .. } => vec![*c1],
            Kind::Nfold(sys) => sys.points.iter().map(|p| p.c).collect(),
            _ => Vec::new(),
        }
    }

    pub fn system(&self) -> Option<&DarbouxSystem> {
        match &self.kind {
            Kind::Nfold(sys) => Some(sys),
            _ => None,
        }
    }
}
