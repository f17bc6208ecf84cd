//! One function per subcommand; each returns the summary and document.

use std::fmt::Write as _;
use std::str::FromStr;

use affsurf::classify::{classify_type_a, classify_type_b, TypeAOptions};
use affsurf::geodesic::l2::l2_reachable;
use affsurf::geodesic::{
    exp_coverage, hyperbola_residual, integrate_geodesic, l2_conservation_defect, CoverageMap, CoverageOptions,
    GeodesicError, GeodesicIvp, GeodesicTrajectory, GridSpec, L2Invariants, MatchedGeodesic, Reach,
};
use affsurf::pseudosphere::{coverage_universal_cover, lift_chart_geodesic, LiftOptions};
use affsurf::spray::{
    build_spray, map_T_L2, normal_form_defect, spine_sprays, verify_isometry, Differentiation, IsometryGrid,
    IsometryMap, SpineKind, SpineOptions, SprayBase, SprayError, SprayKind,
};
use affsurf::tensor::{CurvatureComponents, Scaled, Tensor02, Tensor03};
use affsurf::{get_model, ChristoffelField, Coefficients, ModelName, Point2, Rational, TangentVector2};

use crate::config::{Format, RunConfig};
use crate::svg::{bounding_window, Plot};
use crate::{ClassifyArgs, CliError, CurvatureArgs, Output, TypeTag};

const THRESHOLD: f64 = 1e-8;

fn coefficients(items: &[String]) -> Result<Coefficients, CliError> {
    if items.len() != 6 {
        return Err(CliError::Parse(format!("expected six coefficients, got {}", items.len())));
    }
    Coefficients::parse(items).map_err(|e| CliError::Parse(e.to_string()))
}

fn model(name: &str) -> Result<ModelName, CliError> {
    ModelName::from_str(name).map_err(|e| CliError::Config(e.to_string()))
}

fn geo_err(e: GeodesicError) -> CliError {
    match e {
        GeodesicError::InvalidIvp(_) | GeodesicError::Domain(_) => CliError::Config(e.to_string()),
        _ => CliError::Integration(e.to_string()),
    }
}

fn spray_err(e: SprayError) -> CliError {
    match e {
        SprayError::UnknownMap(_) | SprayError::Catalog(_) => CliError::Config(e.to_string()),
        SprayError::Geodesic(g) => geo_err(g),
        _ => CliError::Integration(e.to_string()),
    }
}

fn relation(d: f64) -> &'static str {
    if d < THRESHOLD {
        "<"
    } else {
        ">="
    }
}

fn no_svg(what: &str) -> CliError {
    CliError::Config(format!("svg output is not available for {what}"))
}

pub fn classify(args: &ClassifyArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let c = coefficients(&args.coeffs)?;
    let nf = match args.kind {
        TypeTag::B => classify_type_b(&c),
        TypeTag::A => {
            let opts = TypeAOptions {
                starts: cfg.classify.starts,
                seed: cfg.classify.seed,
                tolerance: cfg.classify.tolerance,
                ..TypeAOptions::default()
            };
            classify_type_a(&c, &opts).map_err(|e| CliError::Inconclusive(e.to_string()))?
        }
    };
    let mut s = format!("{nf}\n");
    let _ = writeln!(s, "coefficients: {c}");
    let _ = writeln!(s, "residual: {:.3e}", nf.residual);
    Ok(Output { summary: s, document: None })
}

fn fmt_matrix(m: &[[Rational; 2]; 2]) -> String {
    format!("[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

fn fmt_matrix_f64(m: &[[f64; 2]; 2]) -> String {
    format!("[[{:.12e}, {:.12e}], [{:.12e}, {:.12e}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

fn factor(power: i32) -> String {
    if power == 0 {
        String::new()
    } else {
        format!("(x1)^{} * ", -power)
    }
}

fn fmt_tensor02(t: &Scaled<Tensor02<Rational>>) -> String {
    format!("{}{}", factor(t.power), fmt_matrix(&t.table.c))
}

fn fmt_nonzero3(t: &Scaled<Tensor03<Rational>>) -> String {
    let mut parts = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let v = &t.table.c[i][j][k];
                if *v != Rational::from_integer(0.into()) {
                    parts.push(format!("[{}{}{}]={v}", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        format!("{}{{{}}}", factor(t.power), parts.join(", "))
    }
}

fn fmt_curvature(t: &Scaled<CurvatureComponents<Rational>>) -> String {
    let mut parts = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let v = &t.table.c[i][j][k][l];
                    // R is antisymmetric in its first pair; list i < j only.
                    if i < j && *v != Rational::from_integer(0.into()) {
                        parts.push(format!("[{}{}{}{}]={v}", i + 1, j + 1, k + 1, l + 1));
                    }
                }
            }
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        format!("{}{{{}}}", factor(t.power), parts.join(", "))
    }
}

pub fn curvature(args: &CurvatureArgs) -> Result<Output, CliError> {
    let (label, field, expected) = match (&args.model, args.kind) {
        (Some(name), _) => {
            let m = get_model(&model(name)?).map_err(|e| CliError::Config(e.to_string()))?;
            (format!("model {}", m.name), m.field, Some(m.expected_ricci))
        }
        (None, Some(kind)) => {
            let c = coefficients(&args.coeffs)?;
            let f = match kind {
                TypeTag::A => ChristoffelField::TypeA(c),
                TypeTag::B => ChristoffelField::TypeB(c),
            };
            (format!("Type {kind:?} chart"), f, None)
        }
        (None, None) => return Err(CliError::Config("curvature needs --model or --type with six coefficients".into())),
    };
    let p = Point2::new(args.at[0], args.at[1]);
    let mut s = String::new();
    let _ = writeln!(s, "field: {label}");
    if let Some(c) = field.coefficients() {
        let _ = writeln!(s, "coefficients: {c}");
    }
    if let (Some(r), Some(rho), Some(sym), Some(nabla)) =
        (field.curvature_table(), field.ricci_table(), field.ricci_symmetric_table(), field.nabla_ricci_table())
    {
        let _ = writeln!(s, "curvature: {}", fmt_curvature(&r));
        let _ = writeln!(s, "ricci: {}", fmt_tensor02(&rho));
        let _ = writeln!(s, "ricci_symmetric: {}", fmt_tensor02(&sym));
        let _ = writeln!(s, "nabla_ricci: {}", fmt_nonzero3(&nabla));
    }
    let _ = writeln!(s, "locally_symmetric: {}", field.is_locally_symmetric());
    let _ = writeln!(s, "flat: {}", field.is_flat());
    let rho = field.ricci_at(p).map_err(|e| CliError::Config(e.to_string()))?;
    let nabla = field.nabla_ricci_at(p).map_err(|e| CliError::Config(e.to_string()))?;
    let _ = writeln!(s, "at: {}, {}", p.x1, p.x2);
    let _ = writeln!(s, "ricci_at: {}", fmt_matrix_f64(&rho.c));
    let _ = writeln!(s, "max_abs_nabla_ricci_at: {:.3e}", nabla.max_abs());
    if let Some(e) = expected {
        let _ = writeln!(s, "closed_form_deviation: {:.3e}", rho.max_abs_diff(&e.at(p)));
    }
    Ok(Output { summary: s, document: None })
}

/// Trajectory samples of moderate size, for framing plots.
fn framable(points: &[Point2]) -> Vec<Point2> {
    points.iter().copied().filter(|p| p.x1.abs() < 1e3 && p.x2.abs() < 1e3).collect()
}

/// Drift of the hyperbola, speed and momentum relations, each relative to
/// the size of its terms (meaningful up to blowup, unlike absolute drift).
fn relative_drift(traj: &GeodesicTrajectory, inv: L2Invariants) -> [f64; 3] {
    let k = inv.beta.filter(|_| inv.c != 0.0).map(|b| (inv.lambda / (inv.c * inv.c), b));
    traj.samples.iter().fold([0.0; 3], |acc, x| {
        let x1sq = x.p.x1 * x.p.x1;
        let (v1sq, v2sq) = (x.v.xi1 * x.v.xi1, x.v.xi2 * x.v.xi2);
        let hyper = k.map_or(0.0, |(k, b)| {
            let y = (x.p.x2 + b).powi(2);
            (x1sq - k - y).abs() / (x1sq + k.abs() + y)
        });
        let speed =
            (v2sq - v1sq - inv.lambda * x1sq).abs() / (v2sq + v1sq + inv.lambda.abs() * x1sq).max(f64::MIN_POSITIVE);
        let momentum = (x.v.xi2 - inv.c * x1sq).abs() / (x.v.xi2.abs() + inv.c.abs() * x1sq).max(f64::MIN_POSITIVE);
        [acc[0].max(hyper), acc[1].max(speed), acc[2].max(momentum)]
    })
}

pub fn geodesic(cfg: &RunConfig) -> Result<Output, CliError> {
    let g = &cfg.geodesic;
    let name = model(&g.model)?;
    let m = get_model(&name).map_err(|e| CliError::Config(e.to_string()))?;
    let (p0, v0) = (Point2::from_coords(g.p0), TangentVector2::from_coords(g.v0));
    let ivp = GeodesicIvp::new(m.field, p0, v0, (g.tspan[0], g.tspan[1])).map_err(geo_err)?;
    let traj = integrate_geodesic(&ivp, &cfg.integrator.options()).map_err(geo_err)?;

    let mut s = String::new();
    let _ = writeln!(s, "model: {name}");
    let _ = writeln!(s, "p0: {}, {}", p0.x1, p0.x2);
    let _ = writeln!(s, "v0: {}, {}", v0.xi1, v0.xi2);
    let (lo, hi) = traj.t_range();
    let _ = writeln!(s, "samples: {}", traj.samples.len());
    let _ = writeln!(s, "t_range: {lo:.12e}, {hi:.12e}");
    let _ = writeln!(s, "forward: {}", traj.status_forward);
    let _ = writeln!(s, "backward: {}", traj.status_backward);
    if let Some(inv) = traj.conserved {
        let _ = writeln!(s, "lambda: {:.12e}", inv.lambda);
        let _ = writeln!(s, "c: {:.12e}", inv.c);
        match inv.beta {
            Some(b) => _ = writeln!(s, "beta: {b:.12e}"),
            None => _ = writeln!(s, "beta: none"),
        }
        if let Ok(mg) = MatchedGeodesic::through(p0, v0) {
            let _ = writeln!(s, "family: {:?}", mg.family);
        }
        let rel = relative_drift(&traj, inv);
        match hyperbola_residual(&traj) {
            Ok(r) => _ = writeln!(s, "hyperbola_residual: {r:.3e} (relative {:.3e})", rel[0]),
            Err(GeodesicError::DegenerateFit { line_residual }) => {
                _ = writeln!(s, "line_residual: {line_residual:.3e}")
            }
            Err(e) => return Err(geo_err(e)),
        }
        let (speed, momentum) = l2_conservation_defect(&traj);
        let _ =
            writeln!(s, "conservation_defect: {speed:.3e}, {momentum:.3e} (relative {:.3e}, {:.3e})", rel[1], rel[2]);
    }
    let document = match cfg.output.format {
        Format::Csv => Some(traj.to_csv()),
        Format::Text => None,
        Format::Svg => {
            let pts: Vec<Point2> = traj.samples.iter().map(|x| x.p).collect();
            let mut plot = Plot::new(g.window.unwrap_or_else(|| bounding_window(&framable(&pts))));
            plot.polyline(&pts, "#1f4e9c");
            plot.marker(p0, "#b22222");
            Some(plot.finish())
        }
    };
    Ok(Output { summary: s, document })
}

fn coverage_counts(s: &mut String, map: &CoverageMap) {
    let _ = writeln!(s, "cells: {}x{}", map.grid.nx, map.grid.ny);
    let _ = writeln!(s, "reachable: {}", map.count(Reach::Reachable));
    let _ = writeln!(s, "unreachable: {}", map.count(Reach::Unreachable));
    let _ = writeln!(s, "unknown: {}", map.count(Reach::Unknown));
}

fn direction(k: usize, n: usize) -> TangentVector2 {
    let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    TangentVector2::new(phi.cos(), phi.sin())
}

pub fn expmap(cfg: &RunConfig) -> Result<Output, CliError> {
    let e = &cfg.expmap;
    let name = model(&e.model)?;
    let grid = GridSpec::new(e.window, e.cells, e.cells).map_err(geo_err)?;
    let base = Point2::from_coords(e.base);
    let mut s = String::new();
    let _ = writeln!(s, "model: {name}");
    let _ = writeln!(s, "base: {}, {}", base.x1, base.x2);
    let mut rays: Vec<Vec<Point2>> = Vec::new();
    let map = if name == ModelName::PseudosphereChart {
        // The universal cover is traced from its origin.
        if base != Point2::new(0.0, 0.0) {
            return Err(CliError::Config("pseudosphere coverage is computed from base 0,0".into()));
        }
        let opts = LiftOptions::default();
        let cov = coverage_universal_cover(&grid, e.angles, &opts).map_err(|e| CliError::Integration(e.to_string()))?;
        coverage_counts(&mut s, &cov.map);
        let _ = writeln!(s, "focal_defect: {:.3e}", cov.focal_defect);
        let _ = writeln!(s, "exact_disagreements: {}", cov.disagreements);
        if cfg.output.format == Format::Svg {
            let (du, dv) = grid.cell_size();
            for k in 0..e.plot_rays {
                let ray = lift_chart_geodesic(direction(k, e.plot_rays), opts.max_parameter, 0.5 * du.min(dv), &opts)
                    .map_err(|e| CliError::Integration(e.to_string()))?;
                rays.push(ray.iter().map(|&(_, u, v)| Point2::new(u, v)).collect());
            }
        }
        cov.map
    } else {
        let m = get_model(&name).map_err(|e| CliError::Config(e.to_string()))?;
        let opts = CoverageOptions {
            integrator: cfg.integrator.options(),
            angles: e.angles,
            ray_length: e.ray_length,
            ..CoverageOptions::default()
        };
        let map = exp_coverage(&m.field, base, &grid, &opts).map_err(geo_err)?;
        coverage_counts(&mut s, &map);
        if name == ModelName::L2 {
            let disagree = (0..grid.ny)
                .flat_map(|j| (0..grid.nx).map(move |i| (i, j)))
                .filter(|&(i, j)| {
                    let exact = l2_reachable(base, grid.center(i, j));
                    (map.get(i, j) == Reach::Reachable) != exact
                })
                .count();
            let _ = writeln!(s, "exact_disagreements: {disagree}");
        }
        if cfg.output.format == Format::Svg {
            for k in 0..e.plot_rays {
                let ivp = GeodesicIvp::new(m.field.clone(), base, direction(k, e.plot_rays), (0.0, e.ray_length))
                    .map_err(geo_err)?;
                let traj = integrate_geodesic(&ivp, &cfg.integrator.options()).map_err(geo_err)?;
                rays.push(traj.samples.iter().map(|x| x.p).collect());
            }
        }
        map
    };
    let document = match cfg.output.format {
        Format::Csv => Some(map.to_csv()),
        Format::Text => None,
        Format::Svg => {
            let mut plot = Plot::new(e.window);
            plot.coverage(&map);
            for r in &rays {
                plot.polyline(r, "#1f4e9c");
            }
            plot.marker(base, "#b22222");
            Some(plot.finish())
        }
    };
    Ok(Output { summary: s, document })
}

pub fn spray(cfg: &RunConfig) -> Result<Output, CliError> {
    let sp = &cfg.spray;
    let n = sp.grid;
    let mut s = String::new();
    if let Some(chart) = &sp.chart {
        let (base, s_range, t_range) = match chart.as_str() {
            "L2" => (SprayBase::l2_null(1.0), (0.5, 2.5), (-2.0, 0.7)),
            "pseudosphere" => (SprayBase::pseudosphere_null(), (-2.0, 2.0), (-2.0, 2.0)),
            other => {
                return Err(CliError::Config(format!("unknown spray chart {other:?} (expected L2 or pseudosphere)")))
            }
        };
        let spray = build_spray(base, s_range, t_range, &cfg.integrator.options()).map_err(spray_err)?;
        let (d, at) = normal_form_defect(&spray, n).map_err(spray_err)?;
        let _ = writeln!(s, "chart: {chart}");
        let _ = writeln!(s, "grid: {n}x{n}");
        let _ = writeln!(s, "normal form defect: {d:.3e} {} 1e-8 (worst at s={:.6}, t={:.6})", relation(d), at.0, at.1);
        let document = match cfg.output.format {
            Format::Csv => Some(spray.to_csv(n)),
            Format::Text => None,
            Format::Svg => {
                let SprayKind::Chart(c) = &spray.kind else { return Err(no_svg("the ambient pseudosphere spray")) };
                let mut curves = Vec::new();
                for (s0, _) in spray.grid(n).into_iter().step_by(n) {
                    curves.push(c.ray(s0, t_range).map_err(spray_err)?.into_iter().map(|(_, p)| p).collect::<Vec<_>>());
                }
                let all: Vec<Point2> = curves.iter().flatten().copied().collect();
                let mut plot = Plot::new(bounding_window(&framable(&all)));
                for cv in &curves {
                    plot.polyline(cv, "#1f4e9c");
                }
                Some(plot.finish())
            }
        };
        return Ok(Output { summary: s, document });
    }
    let map = IsometryMap::from_str(&sp.verify).map_err(spray_err)?;
    let diff = Differentiation::from_str(&sp.differentiation).map_err(spray_err)?;
    let grid = IsometryGrid::default_for(map, n);
    let report = verify_isometry(map, &grid, diff).map_err(spray_err)?;
    let _ = writeln!(s, "map: {map}");
    let _ = writeln!(s, "differentiation: {}", sp.differentiation);
    let _ = writeln!(s, "nodes: {}", report.rows.len());
    let _ = writeln!(s, "max defect: {:.3e} {} 1e-8", report.max_defect, relation(report.max_defect));
    let document = match cfg.output.format {
        Format::Csv => Some(report.to_csv()),
        Format::Text => None,
        Format::Svg => {
            if map != IsometryMap::TL2 {
                return Err(no_svg(&format!("{map} (its image is not in a plane chart)")));
            }
            // Coordinate net of T_L2 in the L2 half plane.
            let nodes = grid.nodes(map);
            let mut plot = Plot::new([0.0, 4.0, -4.0, 4.0]);
            for row in nodes.chunks(n) {
                let pts: Vec<Point2> = row.iter().filter_map(|&(a, b)| map_T_L2(a, b).ok()).collect();
                plot.polyline(&pts, "#1f4e9c");
            }
            for j in 0..n {
                let pts: Vec<Point2> =
                    nodes.iter().skip(j).step_by(n).filter_map(|&(a, b)| map_T_L2(a, b).ok()).collect();
                plot.polyline(&pts, "#9c1f4e");
            }
            Some(plot.finish())
        }
    };
    Ok(Output { summary: s, document })
}

pub fn spines(cfg: &RunConfig) -> Result<Output, CliError> {
    let sp = &cfg.spines;
    let kind =
        SpineKind::from_str(&sp.kind).map_err(|_| CliError::Config(format!("unknown spine kind {:?}", sp.kind)))?;
    let opts = SpineOptions {
        rays: sp.rays,
        n: sp.nodes,
        window: sp.window,
        cells: sp.cells,
        integrator: cfg.integrator.options(),
        ..SpineOptions::default_for(kind)
    };
    let report = spine_sprays(kind, &opts).map_err(spray_err)?;
    let mut s = String::new();
    let _ = writeln!(s, "spine: {}", sp.kind);
    let _ = writeln!(
        s,
        "metric defect: {:.3e} over {} nodes ({} undefined)",
        report.metric_defect, report.nodes_checked, report.nodes_undefined
    );
    let _ = writeln!(s, "ray crossings in window: {}", report.crossings);
    let _ = writeln!(s, "unreached cells: {} of {}", report.unreached_cells(), report.coverage.cells.len());
    let document = match cfg.output.format {
        Format::Csv => Some(report.coverage.to_csv()),
        Format::Text => None,
        Format::Svg => {
            let mut plot = Plot::new(sp.window);
            plot.coverage(&report.coverage);
            let n = sp.rays;
            for i in 0..n {
                let f = if n < 2 { 0.0 } else { i as f64 / (n - 1) as f64 };
                let s0 = opts.s_range.0 + f * (opts.s_range.1 - opts.s_range.0);
                let ray = report.chart.ray(s0, (-50.0, 50.0)).map_err(spray_err)?;
                plot.polyline(&ray.into_iter().map(|(_, p)| p).collect::<Vec<_>>(), "#1f4e9c");
            }
            plot.marker(report.chart.p0, "#b22222");
            Some(plot.finish())
        }
    };
    Ok(Output { summary: s, document })
}
