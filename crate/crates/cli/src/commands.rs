use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hirota_core::closedform::{max_amplitude, max_amplitude_iterated, rogue_max};
use hirota_core::figures::{all_figures, caption_table, lookup, render_figure};
use hirota_core::grid::{sample_spec, LatticeGrid};
use hirota_core::io::{csv_string, read_csv, render_svg, SolutionReport};
use hirota_core::scattering::{locate_all, locate_eigenvalues, scattering_coeffs, TruncatedPotential};
use hirota_core::seed::CTilde;
use hirota_core::solution::{Family, SolutionSpec};
use hirota_core::spectral::{classify_region, eval_spectral};
use hirota_core::verify::{verify_grid, verify_spec, VerifyOptions, VerifyReport};
use hirota_core::{Complex64 as C, CutSide, Params, Sheet};
use serde_json::{json, Value};

use crate::parse;
use crate::{
    CliError, FamilyArg, FigureArgs, MaxampArgs, Out, ParamArgs, ScatterArgs, SheetArg, SideArg, SolutionArgs, SourceArgs,
    SpectralArgs, VerifyArgs,
};

type Res<T> = Result<T, CliError>;

fn usage(flag: &str, e: String) -> CliError {
    CliError::Usage(format!("{flag}: {e}"))
}

fn fc(z: C) -> String {
    format!("{:.10}{:+.10}i", z.re, z.im)
}

fn cj(z: C) -> Value {
    json!([z.re, z.im])
}

fn sheet_of(s: SheetArg) -> Sheet {
    match s {
        SheetArg::Principal => Sheet::Principal,
        SheetArg::Other => Sheet::Other,
    }
}

fn read_file(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, body: &str) -> Res<()> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(format!(".{ext}"));
    PathBuf::from(s)
}

/// Overrides the given base parameters with whichever flags are present.
fn params_over(base: Params, a: &ParamArgs) -> Res<Params> {
    let get = |v: &Option<String>, flag: &str, d: f64| -> Res<f64> {
        v.as_deref().map(parse::real).transpose().map_err(|e| usage(flag, e)).map(|x| x.unwrap_or(d))
    };
    let p = Params {
        a: get(&a.a, "--a", base.a)?,
        b: get(&a.b, "--b", base.b)?,
        amp: get(&a.amp, "--A", base.amp)?,
        phase: get(&a.phase, "--B", base.phase)?,
        ..base
    };
    p.validate().map_err(|e| usage("params", e.to_string()))?;
    Ok(p)
}

pub fn default_params() -> Params {
    Params::new(1.0, 0.5, 5.0 / 12.0, 0.0).expect("defaults are valid")
}

fn inline_family(s: &SourceArgs) -> Res<Family> {
    let kind = match s.family {
        Some(k) => k,
        None if s.z1.is_some() => FamilyArg::Soliton1,
        None if s.zs.is_some() => FamilyArg::Nfold,
        None if s.order.is_some() => FamilyArg::Rogue,
        None => return Err(CliError::Usage("need --spec, --figure, --csv or --family".into())),
    };
    let cx = |v: &Option<String>, flag: &str| -> Res<Option<C>> { v.as_deref().map(parse::complex).transpose().map_err(|e| usage(flag, e)) };
    let cxs = |v: &Option<String>, flag: &str| -> Res<Option<Vec<C>>> {
        v.as_deref().map(parse::complex_list).transpose().map_err(|e| usage(flag, e))
    };
    Ok(match kind {
        FamilyArg::Background => Family::Background,
        FamilyArg::Soliton1 => {
            let z1 = cx(&s.z1, "--z1")?.ok_or_else(|| usage("family.z1", "required (--z1)".into()))?;
            Family::Soliton1 { z1, c1: cx(&s.c1, "--c1")? }
        }
        FamilyArg::Nfold => {
            let points = cxs(&s.zs, "--zs")?.ok_or_else(|| usage("family.points", "required (--zs)".into()))?;
            Family::Nfold { points, cs: cxs(&s.cs, "--cs")? }
        }
        FamilyArg::Rogue => {
            let order = s.order.ok_or_else(|| usage("family.order", "required (--order)".into()))?;
            let c_tilde = match cxs(&s.eta_poly, "--eta-poly")? {
                Some(p) => CTilde::EtaPoly(p),
                None => CTilde::Zero,
            };
            let t0 = s.t0.as_deref().map(parse::real).transpose().map_err(|e| usage("--t0", e))?.unwrap_or(0.0);
            Family::Rogue { order, c_tilde, n0: s.n0.unwrap_or(0), t0 }
        }
    })
}

/// Resolves a spec from --spec, --figure or inline flags, then applies overrides.
pub fn load_spec(s: &SourceArgs) -> Res<SolutionSpec> {
    let mut spec = if let Some(path) = &s.spec {
        let text = read_file(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| usage("spec", e.to_string()))?;
        let v = match v.get("spec") {
            Some(inner) => inner.clone(),
            None => v,
        };
        serde_json::from_value::<SolutionSpec>(v).map_err(|e| usage("spec", e.to_string()))?
    } else if let Some(id) = &s.figure {
        lookup(id)?.spec()
    } else {
        SolutionSpec::new(inline_family(s)?, default_params())
    };
    spec.params = params_over(spec.params, &s.params)?;
    let g = &s.grid;
    let real = |v: &Option<String>, flag: &str| -> Res<Option<f64>> { v.as_deref().map(parse::real).transpose().map_err(|e| usage(flag, e)) };
    if let Some(x) = g.n_min {
        spec.grid.n_min = x;
    }
    if let Some(x) = g.n_max {
        spec.grid.n_max = x;
    }
    if let Some(x) = real(&g.t_min, "--t-min")? {
        spec.grid.t_min = x;
    }
    if let Some(x) = real(&g.t_max, "--t-max")? {
        spec.grid.t_max = x;
    }
    if let Some(x) = g.t_steps {
        spec.grid.t_steps = x;
    }
    if let Some(sh) = s.sheet {
        spec.sheet = sheet_of(sh);
    }
    spec.peak_tuned |= s.peak_tuned;
    spec.validate()?;
    Ok(spec)
}

pub fn solution(a: SolutionArgs, out: &Out) -> Res<()> {
    let spec = load_spec(&a.source)?;
    let clock = Instant::now();
    let grid = sample_spec(&spec.build()?, &spec.grid)?;
    let runtime_ms = clock.elapsed().as_secs_f64() * 1e3;
    let max = grid.max_abs();
    let cells = grid.width() * grid.t.len();
    let report = SolutionReport { spec, max, runtime_ms, cells };
    let value = serde_json::to_value(&report).expect("report serializes");
    let summary = format!("max |v| = {:.10} at n = {}, t = {} ({cells} cells, {runtime_ms:.1} ms)", max.value, max.n, max.t);
    let csv = csv_string(&grid)?;
    if let Some(prefix) = &a.out {
        write_file(&with_ext(prefix, "csv"), &csv)?;
        write_file(&with_ext(prefix, "json"), &serde_json::to_string_pretty(&value).expect("json"))?;
        if a.svg {
            write_file(&with_ext(prefix, "svg"), &render_svg(&grid, &prefix.display().to_string()))?;
        }
        out.info(&format!("wrote {}.{{csv,json{}}}", prefix.display(), if a.svg { ",svg" } else { "" }));
    }
    out.info(&summary);
    if out.json {
        out.data("", &value);
    } else if a.out.is_none() {
        if out.piped {
            crate::stdout(&csv);
        } else {
            out.info("pipe stdout or pass --out PREFIX to get the grid");
        }
    }
    Ok(())
}

fn report_text(rep: &VerifyReport) -> String {
    let mut s = String::new();
    for c in &rep.checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        let _ = write!(s, "{:<9} {:.3e} <= {:.1e}  {verdict}", c.name, c.value, c.threshold);
        if let Some(n) = &c.note {
            let _ = write!(s, "  ({n})");
        }
        s.push('\n');
    }
    s
}

pub fn verify(a: VerifyArgs, out: &Out) -> Res<()> {
    let opts = VerifyOptions { residual: a.residual, rk4: a.rk4, lax: a.lax, scatter: a.scatter, half: a.half };
    let (rep, source) = if let Some(path) = &a.csv {
        let grid = read_csv(read_file(path)?.as_bytes())?;
        let p = params_over(default_params(), &a.source.params)?;
        (verify_grid(&grid, &p, &opts)?, json!({ "csv": path.display().to_string(), "params": p }))
    } else {
        let spec = load_spec(&a.source)?;
        (verify_spec(&spec, &opts)?, json!({ "spec": spec }))
    };
    let value = json!({ "source": source, "checks": rep.checks, "pass": rep.pass });
    out.data(&report_text(&rep), &value);
    match rep.first_failure() {
        None => Ok(()),
        Some(c) => Err(CliError::Verify(format!("{}: {:.3e} exceeds threshold {:.1e}", c.name, c.value, c.threshold))),
    }
}

pub fn maxamp(a: MaxampArgs, out: &Out) -> Res<()> {
    if a.caption_table {
        let mut rows = Vec::new();
        let mut text = String::from("panel\tfigure\tcaption\trecursion\tgrid\ttolerance\tpass\n");
        for row in caption_table()? {
            let (grid, _) = render_figure(lookup(row.figure)?)?;
            let m = grid.max_abs().value;
            let pass = (m - row.caption).abs() <= row.tolerance + 1e-12 && (row.recursion - row.caption).abs() <= row.tolerance + 1e-12;
            let _ = writeln!(text, "{}\t{}\t{}\t{:.6}\t{:.6}\t{}\t{}", row.panel, row.figure, row.caption, row.recursion, m, row.tolerance, pass);
            rows.push(json!({ "panel": row.panel, "figure": row.figure, "caption": row.caption,
                "recursion": row.recursion, "grid": m, "tolerance": row.tolerance, "pass": pass }));
        }
        out.data(&text, &json!({ "caption_table": rows }));
        return Ok(());
    }
    let amp_flag = a.params.amp.as_deref().ok_or_else(|| CliError::Usage("maxamp: --A is required".into()))?;
    parse::real(amp_flag).map_err(|e| usage("--A", e))?;
    let p = params_over(default_params(), &a.params)?;
    if let Some(order) = a.order {
        if order == 0 {
            return Err(usage("--order", "must be at least 1".into()));
        }
        let mut text = String::from("k\tM_k\n");
        let mut rows = Vec::new();
        for k in 1..=order {
            let m = rogue_max(k, p.amp)?;
            let _ = writeln!(text, "{k}\t{m:.10}");
            rows.push(json!({ "k": k, "max": m }));
        }
        out.data(&text, &json!({ "A": p.amp, "order": order, "maxima": rows }));
        return Ok(());
    }
    let zs_flag = a.zs.as_deref().ok_or_else(|| CliError::Usage("maxamp: give --order or --zs".into()))?;
    let zs = parse::complex_list(zs_flag).map_err(|e| usage("--zs", e))?;
    if zs.is_empty() {
        return Err(usage("--zs", "empty list".into()));
    }
    for (i, z) in zs.iter().enumerate() {
        if z.norm() <= 1.0 {
            return Err(usage(&format!("zs[{i}]"), format!("|z| = {} must exceed 1", z.norm())));
        }
    }
    let mut text = String::from("k\tz_k\tM_k\tc1(z_k)\n");
    let mut rows = Vec::new();
    for k in 1..=zs.len() {
        let m = max_amplitude_iterated(&zs[..k], p.amp)?;
        let c1 = max_amplitude(zs[k - 1], &p)?.1;
        let _ = writeln!(text, "{k}\t{}\t{m:.10}\t{}", fc(zs[k - 1]), fc(c1));
        rows.push(json!({ "k": k, "z": cj(zs[k - 1]), "max": m, "c1": cj(c1) }));
    }
    out.data(&text, &json!({ "params": p, "maxima": rows }));
    Ok(())
}

pub fn figure(a: FigureArgs, out: &Out) -> Res<()> {
    if a.list {
        let mut text = String::new();
        let mut rows = Vec::new();
        for f in all_figures() {
            let cap = f.caption_max.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(text, "{}\t{}\t{}\t{}", f.id, f.aliases.join(","), cap, f.description);
            rows.push(serde_json::to_value(f).expect("figure serializes"));
        }
        out.data(&text, &json!({ "figures": rows }));
        return Ok(());
    }
    let id = a.id.as_deref().ok_or_else(|| CliError::Usage("figure: an id is required (or --list)".into()))?;
    let def = lookup(id)?;
    let clock = Instant::now();
    let (grid, mut check) = render_figure(def)?;
    if let Some(cap) = a.caption {
        check.caption = Some(cap);
        check.tolerance = a.tolerance.unwrap_or(def.tolerance);
        check.pass = Some((check.max.value - cap).abs() <= check.tolerance + 1e-12);
    }
    let runtime_ms = clock.elapsed().as_secs_f64() * 1e3;
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", a.out_dir.display())))?;
    let value = json!({ "figure": def, "spec": def.spec(), "check": check, "runtime_ms": runtime_ms });
    let base = a.out_dir.join(def.id);
    write_file(&with_ext(&base, "csv"), &csv_string(&grid)?)?;
    write_file(&with_ext(&base, "svg"), &render_svg(&grid, &format!("{}: {}", def.id, def.description)))?;
    write_file(&with_ext(&base, "json"), &serde_json::to_string_pretty(&value).expect("json"))?;
    out.info(&format!("wrote {}.{{csv,svg,json}}", base.display()));
    let verdict = match check.pass {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "no caption",
    };
    let cap = check.caption.map(|c| format!("{c} +- {}", check.tolerance)).unwrap_or_else(|| "-".into());
    let text = format!(
        "{}\tmax {:.6} at n = {}, t = {}\tcaption {cap}\t{verdict}\n",
        def.id, check.max.value, check.max.n, check.max.t
    );
    out.data(&text, &value);
    if check.pass == Some(false) {
        return Err(CliError::Caption(format!("{} max {:.6} vs caption {cap}", def.id, check.max.value)));
    }
    Ok(())
}

pub fn spectral(a: SpectralArgs, out: &Out) -> Res<()> {
    let z = parse::complex(&a.z).map_err(|e| usage("--z", e))?;
    let p = params_over(default_params(), &a.params)?;
    let side = a.side.map(|s| match s {
        SideArg::Upper => CutSide::Upper,
        SideArg::Lower => CutSide::Lower,
    });
    let s = eval_spectral(z, &p, sheet_of(a.sheet), side)?;
    let region = classify_region(z, &p);
    let text = format!(
        "z\t{}\nregion\t{region:?}\nzeta\t{}\n|zeta|\t{:.15}\nxi\t{}\nomega\t{}\n",
        fc(s.z),
        fc(s.zeta),
        s.zeta.norm(),
        fc(s.xi),
        fc(s.omega)
    );
    let value = json!({
        "z": cj(s.z), "sheet": s.sheet, "region": region, "zeta": cj(s.zeta), "abs_zeta": s.zeta.norm(),
        "xi": cj(s.xi), "omega": cj(s.omega), "delta": cj(s.delta), "d": cj(s.d), "eta": cj(s.eta),
        "params": p,
    });
    out.data(&text, &value);
    Ok(())
}

fn nearest_row(grid: &LatticeGrid, t: f64) -> usize {
    (0..grid.t.len()).min_by(|&a, &b| (grid.t[a] - t).abs().total_cmp(&(grid.t[b] - t).abs())).unwrap_or(0)
}

pub fn scatter(a: ScatterArgs, out: &Out) -> Res<()> {
    let t = parse::real(&a.t).map_err(|e| usage("--t", e))?;
    let (pot, sheet, planted) = if let Some(path) = &a.csv {
        let grid = read_csv(read_file(path)?.as_bytes())?;
        let p = params_over(default_params(), &a.source.params)?;
        let k = nearest_row(&grid, t);
        let pot = TruncatedPotential::new(grid.n_min, grid.values[k].clone(), p)?;
        (pot, a.source.sheet.map(sheet_of).unwrap_or_default(), Vec::new())
    } else {
        let spec = load_spec(&a.source)?;
        let planted = match &spec.family {
            Family::Soliton1 { z1, .. } => vec![*z1],
            Family::Nfold { points, .. } => points.clone(),
            _ => Vec::new(),
        };
        (TruncatedPotential::from_solution(&spec.build()?, a.half, t)?, spec.sheet, planted)
    };
    let eigen = match &a.annulus {
        Some(s) => {
            let ann = parse::real_pair(s).map_err(|e| usage("--annulus", e))?;
            locate_eigenvalues(&pot, ann, sheet)?
        }
        None => {
            let r_max = planted.iter().map(|z| z.norm()).fold(3.0, |m: f64, r| m.max(1.5 * r));
            locate_all(&pot, r_max, sheet)?
        }
    };
    let mut text = format!("window\t[{}, {}]\nsheet\t{sheet:?}\n", pot.n_min, pot.n_max);
    for z in &eigen {
        let _ = writeln!(text, "eigenvalue\t{}", fc(*z));
    }
    let mut coeffs = Vec::new();
    if let Some(list) = &a.z {
        for z in parse::complex_list(list).map_err(|e| usage("--z", e))? {
            let d = scattering_coeffs(&pot, z, sheet)?;
            let zeta = eval_spectral(z, &pot.params, sheet, None)?.zeta;
            if (zeta.norm() - 1.0).abs() < 1e-9 {
                let _ = writeln!(
                    text,
                    "z = {}\ta {}\tb {}\ta_bar {}\tb_bar {}\tdet_s {}",
                    fc(z),
                    fc(d.a_coeff),
                    fc(d.b_coeff),
                    fc(d.a_bar),
                    fc(d.b_bar),
                    fc(d.det_s())
                );
                coeffs.push(json!({ "z": cj(z), "a": cj(d.a_coeff), "b": cj(d.b_coeff), "a_bar": cj(d.a_bar),
                    "b_bar": cj(d.b_bar), "reflection": cj(d.reflection), "det_s": cj(d.det_s()) }));
            } else {
                // Off the continuous spectrum only a-bar is built from stable columns.
                let _ = writeln!(text, "z = {}\ta_bar {}", fc(z), fc(d.a_bar));
                coeffs.push(json!({ "z": cj(z), "a_bar": cj(d.a_bar) }));
            }
        }
    }
    let value = json!({
        "window": [pot.n_min, pot.n_max], "t": t, "sheet": sheet, "params": pot.params,
        "eigenvalues": eigen.iter().map(|z| cj(*z)).collect::<Vec<_>>(), "coefficients": coeffs,
    });
    out.data(&text, &value);
    Ok(())
}
