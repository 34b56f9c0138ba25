//! CSV, JSON and SVG artifacts for sampled grids.
//!
//! CSV columns are `n,t,re_v,im_v,abs_v`, one row per lattice cell ordered by t
//! then n. Reals are printed with 17 significant digits so that reading a file
//! back and writing it again reproduces it byte for byte.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{HirotaError, Result};
use crate::grid::{LatticeGrid, MaxLocation};
use crate::linalg::C;
use crate::solution::SolutionSpec;

pub const CSV_HEADER: [&str; 5] = ["n", "t", "re_v", "im_v", "abs_v"];

fn io_err(e: impl std::fmt::Display) -> HirotaError {
    HirotaError::Invalid(format!("i/o: {e}"))
}

/// Fixed 17-significant-digit rendering.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(grid: &LatticeGrid, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for (k, row) in grid.values.iter().enumerate() {
        let t = fmt_real(grid.t[k]);
        for (j, v) in row.iter().enumerate() {
            let n = (grid.n_min + j as i64).to_string();
            w.write_record([n.as_str(), &t, &fmt_real(v.re), &fmt_real(v.im), &fmt_real(v.norm())]).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

pub fn csv_string(grid: &LatticeGrid) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(grid, &mut buf)?;
    String::from_utf8(buf).map_err(io_err)
}

/// Reads a rectangular grid: every time row must cover the same contiguous n range.
pub fn read_csv<R: Read>(input: R) -> Result<LatticeGrid> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(io_err)?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(HirotaError::Invalid(format!("csv header must be {}", CSV_HEADER.join(","))));
    }
    let mut t: Vec<f64> = Vec::new();
    let mut values: Vec<Vec<C>> = Vec::new();
    let mut ns: Vec<Vec<i64>> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        let at = |i: usize| -> Result<&str> { rec.get(i).ok_or_else(|| HirotaError::Invalid(format!("csv row {}: missing column {}", line + 2, CSV_HEADER[i]))) };
        let real = |i: usize| -> Result<f64> {
            at(i)?.trim().parse::<f64>().map_err(|e| HirotaError::Invalid(format!("csv row {}: {}: {e}", line + 2, CSV_HEADER[i])))
        };
        let n: i64 = at(0)?.trim().parse().map_err(|e| HirotaError::Invalid(format!("csv row {}: n: {e}", line + 2)))?;
        let tk = real(1)?;
        let v = C::new(real(2)?, real(3)?);
        if t.last() != Some(&tk) {
            t.push(tk);
            values.push(Vec::new());
            ns.push(Vec::new());
        }
        values.last_mut().unwrap().push(v);
        ns.last_mut().unwrap().push(n);
    }
    if t.is_empty() {
        return Err(HirotaError::Invalid("csv has no data rows".into()));
    }
    let n_min = ns[0][0];
    let width = ns[0].len();
    for (k, row) in ns.iter().enumerate() {
        let contiguous = row.iter().enumerate().all(|(j, &n)| n == n_min + j as i64);
        if row.len() != width || !contiguous {
            return Err(HirotaError::Invalid(format!("csv time row t = {} is not the contiguous n range of the first row", t[k])));
        }
    }
    Ok(LatticeGrid { n_min, n_max: n_min + width as i64 - 1, t, values })
}

/// Machine-readable summary written next to each CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionReport {
    pub spec: SolutionSpec,
    pub max: MaxLocation,
    pub runtime_ms: f64,
    pub cells: usize,
}

// Anchor colours of the viridis map, evenly spaced.
const ANCHORS: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 122.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

/// 256-entry viridis-like palette.
pub fn palette() -> &'static [[u8; 3]; 256] {
    static TABLE: OnceLock<[[u8; 3]; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [[0u8; 3]; 256];
        let segs = (ANCHORS.len() - 1) as f64;
        for (i, px) in out.iter_mut().enumerate() {
            let x = i as f64 / 255.0 * segs;
            let k = (x.floor() as usize).min(ANCHORS.len() - 2);
            let f = x - k as f64;
            for ch in 0..3 {
                px[ch] = (ANCHORS[k][ch] * (1.0 - f) + ANCHORS[k + 1][ch] * f).round() as u8;
            }
        }
        out
    })
}

/// |v| heatmap: n runs left to right, t bottom to top, linear colour scale.
pub fn render_svg(grid: &LatticeGrid, title: &str) -> String {
    let (cols, rows) = (grid.width(), grid.t.len());
    let cell_w = (600.0 / cols as f64).max(1.0);
    let cell_h = (400.0 / rows as f64).max(1.0);
    let (pw, ph) = (cell_w * cols as f64, cell_h * rows as f64);
    let (left, top) = (60.0, 40.0);
    let (w, h) = (left + pw + 110.0, top + ph + 60.0);
    let (lo, hi) = grid.values.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), v| (l.min(v.norm()), u.max(v.norm())));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pal = palette();
    let colour = |x: f64| {
        let i = (((x - lo) / span) * 255.0).round().clamp(0.0, 255.0) as usize;
        let [r, g, b] = pal[i];
        format!("#{r:02x}{g:02x}{b:02x}")
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="20" text-anchor="middle">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for (k, row) in grid.values.iter().enumerate() {
        let y = top + ph - (k + 1) as f64 * cell_h;
        for (j, v) in row.iter().enumerate() {
            let x = left + j as f64 * cell_w;
            let _ = writeln!(s, r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#, cell_w + 0.05, cell_h + 0.05, colour(v.norm()));
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#);
    let (t0, t1) = (grid.t.first().copied().unwrap_or(0.0), grid.t.last().copied().unwrap_or(0.0));
    let _ = writeln!(s, r#"<text x="{left}" y="{:.1}" text-anchor="middle">{}</text>"#, top + ph + 16.0, grid.n_min);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + pw, top + ph + 16.0, grid.n_max);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-style="italic">n</text>"#, left + pw / 2.0, top + ph + 36.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{t0}</text>"#, left - 6.0, top + ph);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{t1}</text>"#, left - 6.0, top + 10.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-style="italic">t</text>"#, left - 30.0, top + ph / 2.0);
    // Colour bar.
    let bx = left + pw + 30.0;
    for i in 0..64 {
        let f = i as f64 / 63.0;
        let y = top + ph - (i + 1) as f64 * ph / 64.0;
        let _ = writeln!(s, r#"<rect x="{bx:.1}" y="{y:.2}" width="16" height="{:.2}" fill="{}"/>"#, ph / 64.0 + 0.05, colour(lo + f * span));
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{hi:.4}</text>"#, bx + 22.0, top + 10.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{lo:.4}</text>"#, bx + 22.0, top + ph);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">|v|</text>"#, bx, top - 6.0);
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tiny() -> LatticeGrid {
        LatticeGrid {
            n_min: -1,
            n_max: 1,
            t: vec![-0.5, 0.0, 0.5],
            values: vec![
                vec![C::new(0.1, -0.0), C::new(1.0 / 3.0, 2.0), C::new(-1e-300, 5e300)],
                vec![C::new(0.0, 0.0), C::new(std::f64::consts::PI, -1.0), C::new(7.0, 8.0)],
                vec![C::new(1.0, 1.0), C::new(-2.5, 0.25), C::new(f64::MIN_POSITIVE, 0.0)],
            ],
        }
    }

    #[test]
    fn header_and_line_endings() {
        let s = csv_string(&tiny()).unwrap();
        assert!(s.starts_with("n,t,re_v,im_v,abs_v\n"));
        assert!(!s.contains('\r'));
        assert_eq!(s.lines().count(), 10);
        let row: Vec<_> = s.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(row[0], "0");
        assert_eq!(row[2], "3.3333333333333331e-1");
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let first = csv_string(&tiny()).unwrap();
        let back = read_csv(first.as_bytes()).unwrap();
        assert_eq!(back, tiny());
        assert_eq!(csv_string(&back).unwrap(), first);
    }

    #[test]
    fn ragged_csv_rejected() {
        let bad = "n,t,re_v,im_v,abs_v\n0,0,1,0,1\n1,0,1,0,1\n0,1,1,0,1\n";
        assert!(read_csv(bad.as_bytes()).is_err());
        assert!(read_csv("a,b\n".as_bytes()).is_err());
    }

    #[test]
    fn palette_is_monotone_in_lightness() {
        let p = palette();
        let lum = |c: [u8; 3]| 0.2126 * c[0] as f64 + 0.7152 * c[1] as f64 + 0.0722 * c[2] as f64;
        assert_eq!(p[0], [68, 1, 84]);
        assert_eq!(p[255], [253, 231, 37]);
        assert!(p.windows(2).all(|w| lum(w[1]) >= lum(w[0]) - 1.0));
    }

    #[test]
    fn svg_has_axes_and_cells() {
        let svg = render_svg(&tiny(), "demo <1>");
        assert_eq!(svg.matches("<rect").count(), 9 + 1 + 64);
        assert!(svg.contains(">n</text>") && svg.contains(">t</text>"));
        assert!(svg.contains("demo &lt;1&gt;"));
    }

    proptest! {
        #[test]
        fn csv_round_trip_random(vals in proptest::collection::vec((any::<f64>(), any::<f64>()), 6), t0 in -1e3f64..1e3) {
            prop_assume!(vals.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
            let g = LatticeGrid {
                n_min: 4,
                n_max: 6,
                t: vec![t0, t0 + 0.1],
                values: vals.chunks(3).map(|ch| ch.iter().map(|&(a, b)| C::new(a, b)).collect()).collect(),
            };
            let s = csv_string(&g).unwrap();
            let back = read_csv(s.as_bytes()).unwrap();
            prop_assert_eq!(csv_string(&back).unwrap(), s);
        }
    }
}
