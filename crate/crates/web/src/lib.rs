//! wasm-bindgen front end for the demo page in `www/`.
//!
//! The plain functions do the work and are tested natively; the exported
//! wrappers only turn errors into JS exceptions.

use hirota_core::closedform::rogue_max;
use hirota_core::figures::{all_figures, lookup};
use hirota_core::grid::{sample_spec, LatticeGrid};
use hirota_core::io::palette;
use hirota_core::solution::{Family, GridSpec, SolutionSpec};
use hirota_core::spectral::eval_spectral;
use hirota_core::{Complex64, Params, Result, Sheet};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// An RGBA heatmap of |v| with t running down the rows and n across.
#[wasm_bindgen]
pub struct Heatmap {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
    summary: String,
}

#[wasm_bindgen]
impl Heatmap {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    /// JSON with the maximum, its location and the caption check when there is one.
    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> String {
        self.summary.clone()
    }
}

fn paint(grid: &LatticeGrid) -> (usize, usize, Vec<u8>) {
    let (w, h) = (grid.width(), grid.t.len());
    let (lo, hi) = grid.values.iter().flatten().map(|v| v.norm()).fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pal = palette();
    let mut rgba = Vec::with_capacity(w * h * 4);
    // Later times at the top, as in the SVG output.
    for row in grid.values.iter().rev() {
        for v in row {
            let k = (((v.norm() - lo) / span) * 255.0).round().clamp(0.0, 255.0) as usize;
            rgba.extend_from_slice(&pal[k]);
            rgba.push(255);
        }
    }
    (w, h, rgba)
}

fn heatmap(spec: &SolutionSpec, extra: serde_json::Value) -> Result<Heatmap> {
    spec.validate()?;
    let grid = sample_spec(&spec.build()?, &spec.grid)?;
    let max = grid.max_abs();
    let (width, height, rgba) = paint(&grid);
    let mut summary = json!({ "max": max, "n": [grid.n_min, grid.n_max], "t": [spec.grid.t_min, spec.grid.t_max] });
    if let (Some(obj), serde_json::Value::Object(more)) = (summary.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(Heatmap { width, height, rgba, summary: summary.to_string() })
}

pub fn figure_list() -> String {
    let ids: Vec<_> = all_figures().iter().map(|f| json!({ "id": f.id, "description": f.description })).collect();
    serde_json::Value::Array(ids).to_string()
}

pub fn figure_heatmap(id: &str, t_steps: usize) -> Result<Heatmap> {
    let def = lookup(id)?;
    let mut spec = def.spec();
    spec.grid.t_steps = t_steps;
    let extra = json!({ "id": def.id, "description": def.description, "caption": def.caption_max, "tolerance": def.tolerance });
    heatmap(&spec, extra)
}

/// Peak-tuned one-soliton at a real or complex spectral point.
pub fn soliton_heatmap(z_re: f64, z_im: f64, a: f64, b: f64, amp: f64, phase: f64, t_steps: usize) -> Result<Heatmap> {
    let mut spec = SolutionSpec::new(Family::Soliton1 { z1: Complex64::new(z_re, z_im), c1: None }, Params::new(a, b, amp, phase)?);
    spec.peak_tuned = true;
    spec.grid = GridSpec { t_steps, ..GridSpec::default() };
    heatmap(&spec, json!({}))
}

/// Rogue-wave maxima M_1..M_order.
pub fn rogue_maxima(amp: f64, order: usize) -> Result<Vec<f64>> {
    (1..=order).map(|k| rogue_max(k, amp)).collect()
}

pub fn spectral_json(z_re: f64, z_im: f64, a: f64, b: f64, amp: f64, phase: f64) -> Result<String> {
    let p = Params::new(a, b, amp, phase)?;
    let s = eval_spectral(Complex64::new(z_re, z_im), &p, Sheet::Principal, None)?;
    let pair = |c: Complex64| [c.re, c.im];
    Ok(json!({
        "zeta": pair(s.zeta),
        "abs_zeta": s.zeta.norm(),
        "xi": pair(s.xi),
        "omega": pair(s.omega),
        "delta": pair(s.delta),
        "eta": pair(s.eta),
    })
    .to_string())
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = figureList)]
pub fn figure_list_js() -> String {
    figure_list()
}

#[wasm_bindgen(js_name = figureHeatmap)]
pub fn figure_heatmap_js(id: &str, t_steps: usize) -> std::result::Result<Heatmap, JsError> {
    js(figure_heatmap(id, t_steps))
}

#[wasm_bindgen(js_name = solitonHeatmap)]
pub fn soliton_heatmap_js(z_re: f64, z_im: f64, a: f64, b: f64, amp: f64, phase: f64, t_steps: usize) -> std::result::Result<Heatmap, JsError> {
    js(soliton_heatmap(z_re, z_im, a, b, amp, phase, t_steps))
}

#[wasm_bindgen(js_name = rogueMaxima)]
pub fn rogue_maxima_js(amp: f64, order: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(rogue_maxima(amp, order))
}

#[wasm_bindgen(js_name = spectral)]
pub fn spectral_js(z_re: f64, z_im: f64, a: f64, b: f64, amp: f64, phase: f64) -> std::result::Result<String, JsError> {
    js(spectral_json(z_re, z_im, a, b, amp, phase))
}
