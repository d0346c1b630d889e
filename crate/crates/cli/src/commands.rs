//! Subcommand implementations. Each one validates its flags, calls into the
//! core library and writes CSV or JSON to the primary output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use dcspec_core::deform;
use dcspec_core::fbi::{self, KappaSpec, PhaseSpec};
use dcspec_core::flow::QuadratureOptions;
use dcspec_core::lattice::{self, LatticeSpectrum, RegionSpec};
use dcspec_core::linalg::C64;
use dcspec_core::probe::{self, Extent, ProbeConfig};
use dcspec_core::singular;
use dcspec_core::symplectic::{QuadraticForm, SymbolSpec};
use dcspec_core::weyl::{self, HermiteTruncation, ResolventOptions, Window};
use dcspec_core::Error;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::error::{emit, CliError, CliResult};
use crate::svg::{self, Cell, Figure, Frame};
use crate::{Command, ExtentArgs, RunConfig};

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_symbol(path: &Path) -> CliResult<QuadraticForm> {
    Ok(read_json::<SymbolSpec>(path)?.to_form()?)
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")).into())
    }
}

fn output(cfg: &RunConfig) -> CliResult<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_file(path: &PathBuf, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(out: &mut dyn Write, v: &T) -> CliResult<()> {
    let s = serde_json::to_string(v).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn frame_of(w: [f64; 4]) -> CliResult<Frame> {
    let [re_min, re_max, im_min, im_max] = w;
    if !(w.iter().all(|v| v.is_finite()) && re_min <= re_max && im_min <= im_max) {
        return Err(CliError::Usage(format!(
            "window must be x0,x1,y0,y1 with x0 <= x1 and y0 <= y1, got {w:?}"
        )));
    }
    Ok(Frame {
        re_min,
        re_max,
        im_min,
        im_max,
    })
}

fn extent(e: &ExtentArgs) -> Extent {
    match (e.c0, e.f) {
        (Some(c0), _) => Extent::Constants { c0 },
        (None, Some(f)) => Extent::Fixed(f),
        (None, None) => unreachable!("clap requires one of --C0 and --F"),
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    match &cfg.command {
        Command::SingularSpace { symbol, t, tol } => singular_space(cfg, symbol, *t, *tol),
        Command::Spectrum { symbol, h, radius } => spectrum(cfg, symbol, *h, *radius),
        Command::Region {
            symbol,
            h,
            extent,
            res,
            window,
            summary,
            svg,
        } => region(cfg, symbol, *h, extent, *res, *window, summary.as_ref(), svg.as_ref()),
        Command::Deform { symbol, t, delta } => deform(cfg, symbol, *t, *delta),
        Command::Phase { kappa, phi } => phase(cfg, kappa.as_ref(), phi.as_ref()),
        Command::Pseudospectrum {
            symbol,
            h,
            n,
            window,
            res,
            svg,
            no_check,
        } => pseudospectrum(cfg, symbol, *h, *n, *window, *res, svg.as_ref(), *no_check),
        Command::Resolvent { symbol, h, n, z } => resolvent(cfg, symbol, *h, *n, *z),
        Command::ProbeTheorem {
            symbol,
            extent,
            h_list,
            samples,
            n_start,
            n_step,
            n_cap,
            n_tol,
        } => {
            let pcfg = ProbeConfig {
                extent: self::extent(extent),
                c1: extent.c1,
                inner: extent.inner,
                samples_per_h: *samples,
                seed: cfg.seed,
                n_start: *n_start,
                n_step: *n_step,
                n_cap: *n_cap,
                n_tol: *n_tol,
                ..ProbeConfig::default()
            };
            probe_theorem(cfg, symbol, h_list, &pcfg)
        }
    }
}

fn singular_space(cfg: &RunConfig, symbol: &Path, t: f64, tol: f64) -> CliResult<()> {
    positive("T", t)?;
    positive("tol", tol)?;
    let q = load_symbol(symbol)?;
    let s = singular::singular_space(&q.hamilton_map(), tol)?;
    let min_avg = singular::averaged_real_part(&q, t, QuadratureOptions::default())?.min_eigenvalue()?;
    let mut out = output(cfg)?;
    write_json(
        &mut out,
        &json!({
            "s_dim": s.dim(),
            "basis": s.basis(),
            "min_avg_eigenvalue": min_avg,
        }),
    )?;
    Ok(out.flush()?)
}

fn spectrum(cfg: &RunConfig, symbol: &Path, h: f64, radius: f64) -> CliResult<()> {
    positive("h", h)?;
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("radius must be nonnegative, got {radius}")).into());
    }
    let q = load_symbol(symbol)?;
    let spec = lattice::stable_eigenvalues(&q.hamilton_map())?;
    let mut out = output(cfg)?;
    writeln!(out, "re,im,multiplicity")?;
    for p in lattice::lattice_points(&spec, h, radius) {
        writeln!(out, "{},{},{}", num(p.value.re), num(p.value.im), p.multiplicity)?;
    }
    Ok(out.flush()?)
}

#[derive(Serialize)]
struct RegionSummary {
    h: f64,
    f_of_h: f64,
    outer_radius: f64,
    inner_radius: f64,
    exclusion_radius: f64,
    excluded_area_fraction: f64,
    area_method: lattice::AreaMethod,
    /// `e^{-F/C1}`, the size the excluded fraction is compared with.
    fraction_bound: f64,
    points_in_range: usize,
}

#[allow(clippy::too_many_arguments)]
fn region(
    cfg: &RunConfig,
    symbol: &Path,
    h: f64,
    ext: &ExtentArgs,
    (nx, ny): (usize, usize),
    window: Option<[f64; 4]>,
    summary: Option<&PathBuf>,
    svg_path: Option<&PathBuf>,
) -> CliResult<()> {
    let q = load_symbol(symbol)?;
    let spec = lattice::stable_eigenvalues(&q.hamilton_map())?;
    let pcfg = ProbeConfig {
        extent: extent(ext),
        c1: ext.c1,
        inner: ext.inner,
        ..ProbeConfig::default()
    };
    let region = probe::region_for(&pcfg, h, q.dim())?;
    let r = 1.1 * region.outer_radius();
    let frame = frame_of(window.unwrap_or([-r, r, -r, r]))?;

    let xs = axis(frame.re_min, frame.re_max, nx);
    let ys = axis(frame.im_min, frame.im_max, ny);
    let rows: Vec<Vec<(f64, f64, lattice::Admissibility)>> = ys
        .par_iter()
        .map(|&y| {
            xs.iter()
                .map(|&x| (x, y, lattice::admissible(&region, &spec, C64::new(x, y))))
                .collect()
        })
        .collect();

    let mut out = output(cfg)?;
    writeln!(out, "re,im,admissible,dist,reason")?;
    for (x, y, a) in rows.iter().flatten() {
        writeln!(
            out,
            "{},{},{},{},{}",
            num(*x),
            num(*y),
            a.admissible(),
            num(a.dist),
            a.verdict.as_str()
        )?;
    }
    out.flush()?;

    let area = lattice::excluded_area_fraction(&region, &spec);
    let s = RegionSummary {
        h,
        f_of_h: region.f_of_h,
        outer_radius: region.outer_radius(),
        inner_radius: region.inner(),
        exclusion_radius: region.exclusion_radius(),
        excluded_area_fraction: area.fraction,
        area_method: area.method,
        fraction_bound: (-region.f_of_h / ext.c1).exp(),
        points_in_range: area.points_in_range,
    };
    match summary {
        Some(p) => write_file(p, &format!("{}\n", json!(s)))?,
        None => {
            let mut v = json!({"level": "info", "event": "region_summary"});
            v.as_object_mut()
                .expect("object literal")
                .extend(json!(s).as_object().expect("struct").clone());
            emit(&v);
        }
    }

    if let Some(p) = svg_path {
        let fig = region_figure(&region, &spec, frame);
        write_file(p, &svg::render(&fig))?;
    }
    Ok(())
}

/// Wedge, one exclusion disc per lattice value with `|z| <= h F(h)`.
pub fn region_figure(region: &RegionSpec, spec: &LatticeSpectrum, frame: Frame) -> Figure {
    let points = lattice::lattice_points(spec, region.h, region.outer_radius())
        .into_iter()
        .map(|p| p.value)
        .collect();
    Figure {
        wedge: Some((region.inner(), region.outer_radius())),
        disc_radius: region.exclusion_radius(),
        points,
        ..Figure::empty(frame)
    }
}

fn deform(cfg: &RunConfig, symbol: &Path, t: f64, delta: f64) -> CliResult<()> {
    positive("T", t)?;
    let q = load_symbol(symbol)?;
    let report = deform::deformation_report(&q, t, delta)?;
    let mut out = output(cfg)?;
    // An unconstrained delta_max is infinite and is written as null.
    write_json(&mut out, &report)?;
    Ok(out.flush()?)
}

fn phase(cfg: &RunConfig, kappa: Option<&PathBuf>, phi: Option<&PathBuf>) -> CliResult<()> {
    let v = match (kappa, phi) {
        (Some(path), _) => {
            let map = read_json::<KappaSpec>(path)?.to_map()?;
            let conditions = fbi::canonicity_conditions(&map)?;
            let p = fbi::phase_of_kappa(&map)?;
            json!({
                "phi": PhaseSpec::from_phase(&p),
                "symplectic_defect": map.symplectic_defect(),
                "conditions": conditions,
                "levi_eigenvalues": fbi::phi_weight(&p)?.levi_eigenvalues()?,
            })
        }
        (None, Some(path)) => {
            let p = read_json::<PhaseSpec>(path)?.to_phase()?;
            let map = fbi::kappa_of_phase(&p)?;
            json!({
                "kappa": KappaSpec::from_map(&map),
                "symplectic_defect": map.symplectic_defect(),
                "conditions": fbi::canonicity_conditions(&map)?,
                "levi_eigenvalues": fbi::phi_weight(&p)?.levi_eigenvalues()?,
            })
        }
        (None, None) => unreachable!("clap requires one of --kappa and --phi"),
    };
    let mut out = output(cfg)?;
    write_json(&mut out, &v)?;
    Ok(out.flush()?)
}

#[allow(clippy::too_many_arguments)]
fn pseudospectrum(
    cfg: &RunConfig,
    symbol: &Path,
    h: f64,
    n: u32,
    window: [f64; 4],
    (nx, ny): (usize, usize),
    svg_path: Option<&PathBuf>,
    no_check: bool,
) -> CliResult<()> {
    positive("h", h)?;
    let frame = frame_of(window)?;
    let q = load_symbol(symbol)?;
    let w = Window {
        re_min: frame.re_min,
        re_max: frame.re_max,
        im_min: frame.im_min,
        im_max: frame.im_max,
    };
    let trunc = HermiteTruncation::new(q.dim(), n, h)?;
    let op = weyl::quantize_quadratic(&q, &trunc)?;
    let grid = weyl::pseudospectrum_grid(&op, w, nx, ny, ResolventOptions::default())?;

    let mut out = output(cfg)?;
    writeln!(out, "re,im,log10norm")?;
    for g in &grid {
        writeln!(out, "{},{},{}", num(g.re), num(g.im), num(g.log10norm))?;
    }
    out.flush()?;

    let cutoff = trunc.energy_cutoff();
    let outside = grid.iter().filter(|g| C64::new(g.re, g.im).norm() > cutoff).count();
    if !no_check {
        let check = weyl::quantize_quadratic(&q, &trunc.with_n(n + 10)?)?;
        let grid2 = weyl::pseudospectrum_grid(&check, w, nx, ny, ResolventOptions::default())?;
        let delta = grid
            .iter()
            .zip(&grid2)
            .filter(|(a, b)| a.log10norm.is_finite() && b.log10norm.is_finite())
            .map(|(a, b)| (a.log10norm - b.log10norm).abs())
            .fold(0.0, f64::max);
        emit(&json!({
            "level": "info",
            "event": "convergence",
            "n": n,
            "n_check": n + 10,
            "max_abs_delta_log10norm": delta,
            "energy_cutoff": cutoff,
            "points_beyond_cutoff": outside,
        }));
    }

    if let Some(p) = svg_path {
        let points = match lattice::stable_eigenvalues(&q.hamilton_map()) {
            Ok(spec) => {
                let r = [frame.re_min, frame.re_max]
                    .iter()
                    .flat_map(|&x| [frame.im_min, frame.im_max].map(|y| C64::new(x, y).norm()))
                    .fold(0.0, f64::max);
                lattice::lattice_points(&spec, h, r)
                    .into_iter()
                    .map(|p| p.value)
                    .filter(|z| {
                        (frame.re_min..=frame.re_max).contains(&z.re) && (frame.im_min..=frame.im_max).contains(&z.im)
                    })
                    .collect()
            }
            Err(_) => Vec::new(),
        };
        let fig = Figure {
            cells: grid
                .iter()
                .map(|g| Cell {
                    re: g.re,
                    im: g.im,
                    value: g.log10norm,
                })
                .collect(),
            grid: (nx, ny),
            points,
            ..Figure::empty(frame)
        };
        write_file(p, &svg::render(&fig))?;
    }
    Ok(())
}

fn resolvent(cfg: &RunConfig, symbol: &Path, h: f64, n: u32, (re, im): (f64, f64)) -> CliResult<()> {
    positive("h", h)?;
    let q = load_symbol(symbol)?;
    let trunc = HermiteTruncation::new(q.dim(), n, h)?;
    let op = weyl::quantize_quadratic(&q, &trunc)?;
    let z = C64::new(re, im);
    let norm = weyl::resolvent_norm(&op, z)?;
    let dist = lattice::stable_eigenvalues(&q.hamilton_map())
        .ok()
        .map(|s| lattice::dist_to_spectrum(&s, h, z));
    let mut out = output(cfg)?;
    // Infinite norms (z on the truncated spectrum) are written as null.
    write_json(
        &mut out,
        &json!({
            "z": [re, im],
            "h": h,
            "n": n,
            "finite": norm.is_finite(),
            "norm": norm.value(),
            "log10norm": norm.log10(),
            "dist_to_spectrum": dist,
            "energy_cutoff": trunc.energy_cutoff(),
        }),
    )?;
    Ok(out.flush()?)
}

fn probe_theorem(cfg: &RunConfig, symbol: &Path, hs: &[f64], pcfg: &ProbeConfig) -> CliResult<()> {
    let q = load_symbol(symbol)?;
    emit(&json!({
        "level": "info",
        "event": "probe_scope",
        "note": "only the quadratic operator is probed; symbols with higher-order parts are not quantized",
    }));
    let r = probe::probe_theorem(&q, hs, pcfg)?;
    let mut out = output(cfg)?;
    writeln!(out, "h,z_re,z_im,norm,admissible,n,fit_exponent")?;
    for s in &r.samples {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(s.h),
            num(s.z.re),
            num(s.z.im),
            num(s.norm),
            s.admissible,
            s.n_used,
            num(r.fit_exponent)
        )?;
    }
    Ok(out.flush()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dcspec_core::models;

    #[test]
    fn floats_round_trip_through_csv() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn fig1_panel_draws_one_disc_per_lattice_point() {
        let q = models::fig1_model();
        let spec = lattice::stable_eigenvalues(&q.hamilton_map()).unwrap();
        let region = RegionSpec::with_extent(0.05, 10.0, 10.0).unwrap().with_inner_radius(0.15);
        let r = region.outer_radius();
        let fig = region_figure(&region, &spec, frame_of([-r, r, -r, r]).unwrap());
        let s = svg::render(&fig);
        let expected = lattice::excluded_area_fraction(&region, &spec).points_in_range;
        assert!(expected > 0);
        assert_eq!(s.matches(r#"class="disc""#).count(), expected);
    }
}
