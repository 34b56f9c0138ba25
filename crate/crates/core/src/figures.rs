//! Registry of the published figure parameter sets and their captioned maxima.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::closedform::{max_amplitude, max_amplitude_iterated, rogue_max};
use crate::error::{HirotaError, Result};
use crate::grid::{sample_spec, LatticeGrid, MaxLocation};
use crate::linalg::{c, C};
use crate::seed::CTilde;
use crate::solution::{Family, SolutionSpec};
use crate::spectral::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    Soliton,
    TwoSoliton,
    Rogue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureDef {
    pub id: &'static str,
    /// Panels that show the same field (propagation views, caption panels).
    pub aliases: &'static [&'static str],
    pub kind: FigureKind,
    pub description: &'static str,
    /// Captioned maximum of |v|, when the caption gives one.
    pub caption_max: Option<f64>,
    pub tolerance: f64,
}

const ALL: &[FigureDef] = &[
    fig("fig2a", &["fig2c"], FigureKind::Soliton, "single soliton, z1 = 1.2, B = 0", Some(0.85), 0.01),
    fig("fig2b", &["fig2d"], FigureKind::Soliton, "single soliton, z1 = 1.8, B = 0", Some(2.33), 0.01),
    fig("fig3a", &["fig3c"], FigureKind::Soliton, "single soliton, b = 1, z1 = 1.3, B = pi/2", Some(1.07), 0.01),
    fig("fig3b", &["fig3d"], FigureKind::Soliton, "single soliton, b = 0.5, z1 = 1.6, B = pi/2", Some(1.79), 0.01),
    fig("fig4a", &["fig4c"], FigureKind::TwoSoliton, "two breathers, z = 1.3, 1.8, B = 0", Some(4.05), 0.01),
    fig("fig4b", &["fig4d"], FigureKind::TwoSoliton, "two breathers, z = 1 +- 0.9i, B = 0", Some(2.36), 0.01),
    fig("fig5a", &["fig5c"], FigureKind::TwoSoliton, "breather and soliton, z = 7/4, 7/4 - i, B = pi/2", Some(9.3), 0.1),
    fig("fig5b", &["fig5d"], FigureKind::TwoSoliton, "two solitons, z = 7/4, 9/4, B = pi/2", Some(11.6), 0.1),
    fig("fig6", &["fig6a", "fig6b"], FigureKind::TwoSoliton, "breather and periodic wave, z = 5/4, 9/4, B = pi/2", Some(5.89), 0.01),
    fig("fig7a", &[], FigureKind::Rogue, "first-order rogue wave, A = 11/60, B = pi/2", Some(0.57), 0.01),
    fig("fig7b", &["fig7c"], FigureKind::Rogue, "first-order rogue wave, A = 11/60, B = 0", Some(0.57), 0.01),
    fig("fig8a", &["fig8b"], FigureKind::Rogue, "third-order rogue wave, A = 23/60", Some(6.84), 0.01),
    fig("fig8c", &[], FigureKind::Rogue, "third-order rogue wave, triangular split, offset 400i (z - z1) eta", None, 0.0),
    fig("fig9a", &["fig9b"], FigureKind::Rogue, "fourth-order rogue wave, A = 18/55", Some(9.02), 0.01),
    fig("fig9c", &[], FigureKind::Rogue, "fourth-order rogue wave, elliptic split, offset 10i (z - z1) eta", None, 0.0),
];

const fn fig(
    id: &'static str,
    aliases: &'static [&'static str],
    kind: FigureKind,
    description: &'static str,
    caption_max: Option<f64>,
    tolerance: f64,
) -> FigureDef {
    FigureDef { id, aliases, kind, description, caption_max, tolerance }
}

pub fn all_figures() -> &'static [FigureDef] {
    ALL
}

/// Resolves an id or alias (case-insensitive, "fig" prefix optional).
pub fn lookup(id: &str) -> Result<&'static FigureDef> {
    let key = id.trim().to_ascii_lowercase();
    let key = if key.starts_with("fig") { key } else { format!("fig{key}") };
    ALL.iter()
        .find(|f| f.id == key || f.aliases.contains(&key.as_str()))
        .ok_or_else(|| HirotaError::Invalid(format!("unknown figure id '{id}'")))
}

fn params(a: f64, b: f64, amp: f64, phase: f64) -> Params {
    Params::new(a, b, amp, phase).expect("registry parameters are valid")
}

fn two(points: Vec<C>, p: Params) -> SolutionSpec {
    let mut s = SolutionSpec::new(Family::Nfold { points, cs: None }, p);
    s.peak_tuned = true;
    s
}

fn one(z1: f64, p: Params) -> SolutionSpec {
    let mut s = SolutionSpec::new(Family::Soliton1 { z1: c(z1, 0.0), c1: None }, p);
    s.peak_tuned = true;
    s
}

fn rogue(order: usize, c_tilde: CTilde, p: Params) -> SolutionSpec {
    SolutionSpec::new(Family::Rogue { order, c_tilde, n0: 0, t0: 0.0 }, p)
}

impl FigureDef {
    /// Solution spec on the default figure grid. Soliton constants are peak-tuned,
    /// since the captions do not state them.
    pub fn spec(&self) -> SolutionSpec {
        let a12 = 5.0 / 12.0;
        match self.id {
            "fig2a" => one(1.2, params(1.0, 0.5, a12, 0.0)),
            "fig2b" => one(1.8, params(1.0, 0.5, a12, 0.0)),
            "fig3a" => one(1.3, params(1.0, 1.0, a12, FRAC_PI_2)),
            "fig3b" => one(1.6, params(1.0, 0.5, a12, FRAC_PI_2)),
            "fig4a" => two(vec![c(1.3, 0.0), c(1.8, 0.0)], params(1.0, 0.5, a12, 0.0)),
            "fig4b" => two(vec![c(1.0, 0.9), c(1.0, -0.9)], params(1.0, 0.5, a12, 0.0)),
            "fig5a" => two(vec![c(1.75, 0.0), c(1.75, -1.0)], params(1.0, 0.5, a12, FRAC_PI_2)),
            "fig5b" => two(vec![c(1.75, 0.0), c(2.25, 0.0)], params(1.0, 0.5, a12, FRAC_PI_2)),
            "fig6" => two(vec![c(1.25, 0.0), c(2.25, 0.0)], params(1.0, 0.5, a12, FRAC_PI_2)),
            "fig7a" => rogue(1, CTilde::Zero, params(1.0, 1.0, 11.0 / 60.0, FRAC_PI_2)),
            "fig7b" => rogue(1, CTilde::Zero, params(1.0, 1.0, 11.0 / 60.0, 0.0)),
            "fig8a" => rogue(3, CTilde::Zero, params(1.0, 0.3, 23.0 / 60.0, 0.0)),
            "fig8c" => rogue(3, CTilde::EtaPoly(vec![c(0.0, 0.0), c(0.0, 400.0)]), params(1.0, 0.3, 23.0 / 60.0, 0.0)),
            "fig9a" => rogue(4, CTilde::Zero, params(1.0, 0.3, 18.0 / 55.0, 0.0)),
            "fig9c" => rogue(4, CTilde::EtaPoly(vec![c(0.0, 0.0), c(0.0, 10.0)]), params(1.0, 0.3, 18.0 / 55.0, 0.0)),
            other => unreachable!("no spec for {other}"),
        }
    }

    /// Independent maximum from the amplitude recursions.
    pub fn recursion_max(&self) -> Result<Option<f64>> {
        if self.caption_max.is_none() {
            return Ok(None);
        }
        let s = self.spec();
        let amp = s.params.amp;
        Ok(Some(match &s.family {
            Family::Soliton1 { z1, .. } => max_amplitude(*z1, &s.params)?.0,
            Family::Nfold { points, .. } => max_amplitude_iterated(points, amp)?,
            Family::Rogue { order, .. } => rogue_max(*order, amp)?,
            Family::Background => amp,
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureCheck {
    pub id: &'static str,
    pub max: MaxLocation,
    pub caption: Option<f64>,
    pub tolerance: f64,
    pub recursion: Option<f64>,
    /// None when there is no caption to compare with.
    pub pass: Option<bool>,
}

/// Samples the figure on its default grid and compares the maximum with the caption.
pub fn render_figure(def: &'static FigureDef) -> Result<(LatticeGrid, FigureCheck)> {
    let spec = def.spec();
    let grid = sample_spec(&spec.build()?, &spec.grid)?;
    let max = grid.max_abs();
    let pass = def.caption_max.map(|cap| (max.value - cap).abs() <= def.tolerance + 1e-12);
    let check = FigureCheck { id: def.id, max, caption: def.caption_max, tolerance: def.tolerance, recursion: def.recursion_max()?, pass };
    Ok((grid, check))
}

/// One row of the caption-versus-computed table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaptionRow {
    pub panel: &'static str,
    pub figure: &'static str,
    pub caption: f64,
    pub tolerance: f64,
    pub recursion: f64,
}

/// The twelve captioned maxima, each paired with its recursion value.
pub fn caption_table() -> Result<Vec<CaptionRow>> {
    const PANELS: [(&str, &str); 12] = [
        ("2(c)", "fig2a"),
        ("2(d)", "fig2b"),
        ("3(c)", "fig3a"),
        ("3(d)", "fig3b"),
        ("4(c)", "fig4a"),
        ("4(d)", "fig4b"),
        ("5(c)", "fig5a"),
        ("5(d)", "fig5b"),
        ("6", "fig6"),
        ("7(c)", "fig7b"),
        ("8(b)", "fig8a"),
        ("9(b)", "fig9a"),
    ];
    PANELS
        .iter()
        .map(|&(panel, id)| {
            let def = lookup(id)?;
            Ok(CaptionRow {
                panel,
                figure: def.id,
                caption: def.caption_max.expect("captioned"),
                tolerance: def.tolerance,
                recursion: def.recursion_max()?.expect("captioned"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_resolve() {
        assert_eq!(lookup("fig2c").unwrap().id, "fig2a");
        assert_eq!(lookup("5D").unwrap().id, "fig5b");
        assert_eq!(lookup("fig8b").unwrap().id, "fig8a");
        assert!(lookup("fig10").is_err());
        for f in all_figures() {
            assert_eq!(lookup(f.id).unwrap().id, f.id);
            f.spec().validate().unwrap();
        }
    }

    #[test]
    fn recursion_agrees_with_captions() {
        for row in caption_table().unwrap() {
            assert!((row.recursion - row.caption).abs() <= row.tolerance, "{row:?}");
        }
    }

    #[test]
    fn single_soliton_figures_hit_captions() {
        for id in ["fig2a", "fig2b", "fig3a", "fig3b"] {
            let (_, chk) = render_figure(lookup(id).unwrap()).unwrap();
            assert_eq!(chk.pass, Some(true), "{chk:?}");
            assert!((chk.max.value - chk.recursion.unwrap()).abs() < 1e-9, "{chk:?}");
            assert_eq!((chk.max.n, chk.max.t), (0, 0.0));
        }
    }

    #[test]
    fn uncaptioned_figures_report_no_comparison() {
        let def = lookup("fig9c").unwrap();
        assert_eq!(def.recursion_max().unwrap(), None);
        let (grid, chk) = render_figure(def).unwrap();
        assert_eq!(chk.pass, None);
        assert!(grid.max_abs().value.is_finite());
    }
}
