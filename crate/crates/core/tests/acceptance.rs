//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;
use std::process::Command;

use ghgeom::entropy::{
    equivalence_residual, mu_independence_check, sigma_closed, sigma_solve, GaussianFamily, GeneralizedLog,
};
use ghgeom::geodesic::{diagonal_phi, integrate_geodesic, shoot, GeodesicState};
use ghgeom::ghsurface::{
    closed_christoffel, closed_forms, closed_ricci, closed_riemann, entropy, gh_field, intersection_curve,
    nu_patch, principal_curvatures, scalar_curvature, LevelSetSpec, NuFunction,
};
use ghgeom::monge::{curvature_report, CurvatureReport, Orientation, ScalarField, StatePoint};
use ghgeom::numerics::{OdeSettings, QuadratureRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + stream)
}

fn random_point(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> StatePoint {
    StatePoint::new(r.random_range(lo..hi), r.random_range(lo..hi), r.random_range(lo..hi))
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn report(field: &ScalarField, x: &StatePoint) -> Result<CurvatureReport, String> {
    curvature_report(field, x, Orientation::Downward).map_err(|e| format!("{x}: {e}"))
}

/// Max abs deviation between a generic report and the closed forms.
fn closed_form_deviation(r: &CurvatureReport) -> f64 {
    let x = r.point;
    let f = closed_forms(&x);
    let normal = r
        .forms
        .normal
        .iter()
        .zip(f.normal)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    [
        r.forms.g.max_abs_diff(&f.g),
        r.forms.h.max_abs_diff(&f.h),
        normal,
        r.christoffel.max_abs_diff(&closed_christoffel(&x)),
        r.riemann.max_abs_diff(&closed_riemann(&x)),
        (r.riemann.get(0, 2, 0, 2) + 1.0 / (f.a * f.a)).abs(),
        r.ricci.max_abs_diff(&closed_ricci(&x)),
        (r.scalar + 4.0 / f.a.powi(4)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn criterion_1(points: &[StatePoint]) -> Outcome {
    let analytic = gh_field();
    let fd = analytic.finite_differences();
    let (mut worst_a, mut worst_fd) = (0.0_f64, 0.0_f64);
    for x in points {
        worst_a = worst_a.max(closed_form_deviation(&report(&analytic, x)?));
        worst_fd = worst_fd.max(closed_form_deviation(&report(&fd, x)?));
    }
    check(worst_a <= 1e-8, format!("analytic deviation {worst_a:e} > 1e-8"))?;
    check(worst_fd <= 1e-5, format!("finite-difference deviation {worst_fd:e} > 1e-5"))?;
    Ok(format!("analytic {worst_a:.1e}, finite differences {worst_fd:.1e}"))
}

fn criterion_2(points: &[StatePoint]) -> Outcome {
    let field = gh_field();
    let mut worst_l3 = 0.0_f64;
    for x in points {
        let r = report(&field, x)?;
        let [l1, l3, l2] = r.principal();
        let closed = principal_curvatures(x);
        worst_l3 = worst_l3.max(l3.abs()).max(closed[2].abs());
        for (a, b) in [(l1, l2), (closed[0], closed[1])] {
            check(
                a > 0.0 && a <= FRAC_1_SQRT_2 && (-FRAC_1_SQRT_2..0.0).contains(&b),
                format!("{x}: lambda1 = {a}, lambda2 = {b}"),
            )?;
        }
    }
    check(worst_l3 <= 1e-10, format!("|lambda3| up to {worst_l3:e}"))?;
    let mut worst_axis = 0.0_f64;
    for x2 in [-7.0, 0.0, 0.5, 3.0, 1e3] {
        let x = StatePoint::new(0.0, x2, 0.0);
        let generic = report(&field, &x)?.principal()[0];
        for l1 in [generic, principal_curvatures(&x)[0]] {
            worst_axis = worst_axis.max((l1 - FRAC_1_SQRT_2).abs());
        }
    }
    check(worst_axis <= 1e-12, format!("lambda1 on the x2 axis off by {worst_axis:e}"))?;
    Ok(format!("|lambda3| <= {worst_l3:.1e}, axis lambda1 error {worst_axis:.1e}"))
}

fn criterion_3(points: &[StatePoint]) -> Outcome {
    let field = gh_field();
    let mut worst_rel = 0.0_f64;
    for x in points {
        let r = report(&field, x)?;
        check(r.scalar >= -1.0 && r.scalar < 0.0, format!("{x}: rho = {}", r.scalar))?;
        check(scalar_curvature(x) >= -1.0 && scalar_curvature(x) < 0.0, format!("{x}: closed rho out of range"))?;
        worst_rel = worst_rel
            .max((r.scalar - 6.0 * r.mean()[1]).abs())
            .max((r.scalar - 2.0 / 3.0 * r.mean_paper()[1]).abs());
    }
    check(worst_rel <= 1e-9, format!("rho vs H2 off by {worst_rel:e}"))?;
    for x2 in [-2.0, 0.0, 9.0] {
        let rho = report(&field, &StatePoint::new(0.0, x2, 0.0))?.scalar;
        check((rho + 1.0).abs() <= 1e-12, format!("rho(0,{x2},0) = {rho}"))?;
    }
    let mut r = rng(3);
    for _ in 0..8 {
        let phi = r.random_range(0.0..std::f64::consts::TAU);
        let x2 = r.random_range(-5.0..5.0);
        let mut prev = -1.0 - 1e-15;
        let mut last = 0.0;
        for i in 0..=60 {
            let dist = 10f64.powf(3.0 * i as f64 / 60.0) - 1.0;
            let x = StatePoint::new(dist * phi.cos(), x2, dist * phi.sin());
            let rho = report(&field, &x)?.scalar;
            check(rho > prev && rho < 0.0, format!("rho not increasing to 0 along ray at {x}"))?;
            prev = rho;
            last = rho;
        }
        check(last.abs() < 1e-11, format!("rho = {last:e} at distance 1e3"))?;
    }
    Ok(format!("rho = 6 H2 within {worst_rel:.1e}; rays monotone to 0"))
}

fn criterion_4(points: &[StatePoint]) -> Outcome {
    let field = gh_field();
    let mut worst_h3 = 0.0_f64;
    for x in points {
        worst_h3 = worst_h3.max(report(&field, x)?.mean()[2].abs());
    }
    check(worst_h3 <= 1e-10, format!("|H3| up to {worst_h3:e}"))?;
    let mut worst = 0.0_f64;
    for x in points.iter().take(20) {
        let r = report(&field, x)?;
        let a2 = 2.0 + x.x1 * x.x1 + x.x3 * x.x3;
        let h1 = 6.0 * x.x1 * x.x3 / a2.powf(1.5);
        let h2 = -6.0 / (a2 * a2);
        let [p1, p2, p3] = r.mean_paper();
        let [m1, m2, _] = r.mean();
        worst = worst
            .max((p1 - h1).abs())
            .max((p2 - h2).abs())
            .max((p1 - 9.0 * m1).abs())
            .max((p2 - 9.0 * m2).abs())
            .max(p3.abs());
    }
    check(worst <= 1e-9, format!("printed mean curvatures off by {worst:e}"))?;
    Ok(format!("|H3| <= {worst_h3:.1e}; H_paper = 9 H within {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let ode = OdeSettings::adaptive(1e-10);
    let mut r = rng(5);
    let mut inits = vec![
        GeodesicState::new(0.0, StatePoint::new(1.0, 1.0, 1.0), [1.0, 10.0, 1.0]),
        GeodesicState::new(0.0, StatePoint::new(1.0, 1.0, 1.0), [10.0, 1.0, 10.0]),
    ];
    for _ in 0..10 {
        let p = random_point(&mut r, -2.0, 2.0);
        let v = [0, 1, 2].map(|_| r.random_range(-1.0..1.0));
        inits.push(GeodesicState::new(0.0, p, v));
    }
    let mut worst_drift = 0.0_f64;
    for init in &inits {
        let path = integrate_geodesic(init, 10.0, &ode).map_err(|e| format!("{e}"))?;
        worst_drift = worst_drift.max(path.max_energy_drift() / path.energy[0]);
    }
    check(worst_drift <= 1e-6, format!("relative energy drift {worst_drift:e}"))?;

    let mut worst_line = 0.0_f64;
    for (p, v, zero_axis) in [
        ([0.5, -1.0, 0.0], [1.5, 0.7, 0.0], 2usize),
        ([-2.0, 3.0, 0.0], [-0.3, -2.0, 0.0], 2),
        ([0.0, 1.0, -1.0], [0.0, 0.4, 2.0], 0),
        ([0.0, -2.0, 2.0], [0.0, 1.0, -0.5], 0),
    ] {
        let path = integrate_geodesic(&GeodesicState::new(0.0, StatePoint::from(p), v), 10.0, &ode)
            .map_err(|e| format!("{e}"))?;
        for s in &path.samples {
            let x = s.position.to_array();
            for i in 0..3 {
                let expect = if i == zero_axis { 0.0 } else { p[i] + v[i] * s.t };
                worst_line = worst_line.max((x[i] - expect).abs());
            }
        }
    }
    check(worst_line <= 1e-9, format!("line families deviate by {worst_line:e}"))?;

    let mut worst_fit = 0.0_f64;
    let mut worst_sym = 0.0_f64;
    for init in [
        GeodesicState::new(0.0, StatePoint::new(1.0, 1.0, 1.0), [1.0, 1.0, 1.0]),
        GeodesicState::new(0.0, StatePoint::new(1.0, 1.0, 1.0), [1.0, 10.0, 1.0]),
        GeodesicState::new(0.0, StatePoint::new(1.0, 1.0, 1.0), [10.0, 1.0, 10.0]),
        GeodesicState::new(0.0, StatePoint::new(-0.5, 2.0, -0.5), [0.8, -1.0, 0.8]),
    ] {
        let path = integrate_geodesic(&init, 10.0, &ode).map_err(|e| format!("{e}"))?;
        let ts: Vec<f64> = path.samples.iter().map(|s| s.t).collect();
        let ys: Vec<f64> = path.samples.iter().map(|s| diagonal_phi(s.position.x1)).collect();
        worst_fit = worst_fit.max(line_fit_residual(&ts, &ys));
        for s in &path.samples {
            worst_sym = worst_sym.max((s.position.x1 - s.position.x3).abs());
        }
    }
    check(worst_fit <= 1e-6, format!("diagonal implicit equation residual {worst_fit:e}"))?;
    check(worst_sym <= 1e-8, format!("diagonal symmetry broken by {worst_sym:e}"))?;
    Ok(format!(
        "drift {worst_drift:.1e}, lines {worst_line:.1e}, implicit fit {worst_fit:.1e}, symmetry {worst_sym:.1e}"
    ))
}

/// Max residual from the least-squares line through `(t, y)`.
fn line_fit_residual(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let sxx: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    let slope = sxy / sxx;
    t.iter()
        .zip(y)
        .map(|(a, b)| (b - (my + slope * (a - mt))).abs())
        .fold(0.0, f64::max)
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut converged = 0;
    let mut worst_iter = 0;
    let mut failures = Vec::new();
    for _ in 0..20 {
        let target = random_point(&mut r, -2.0, 2.0);
        match shoot(&StatePoint::ORIGIN, &target, 1e-8) {
            Ok(res) if res.converged && res.miss <= 1e-8 && res.iterations <= 50 => {
                converged += 1;
                worst_iter = worst_iter.max(res.iterations);
            }
            Ok(res) => failures.push(format!("{target} miss {:e}", res.miss)),
            Err(e) => failures.push(format!("{target}: {e}")),
        }
    }
    check(converged >= 19, format!("{converged}/20 converged; {}", failures.join("; ")))?;
    Ok(format!("{converged}/20 converged, at most {worst_iter} Newton iterations"))
}

fn criterion_7() -> Outcome {
    let logs = [
        GeneralizedLog::Natural,
        GeneralizedLog::tsallis(0.5).unwrap(),
        GeneralizedLog::tsallis(1.5).unwrap(),
        GeneralizedLog::kaniadakis(0.25).unwrap(),
        GeneralizedLog::kaniadakis(-0.25).unwrap(),
        GeneralizedLog::kaniadakis(0.5).unwrap(),
        GeneralizedLog::kaniadakis(-0.5).unwrap(),
    ];
    let rule = QuadratureRule::default();
    let mut r = rng(7);
    let (mut worst_res, mut worst_solve, mut worst_spread) = (0.0_f64, 0.0_f64, 0.0_f64);
    for phi in &logs {
        let family = GaussianFamily::solving(phi, |x: &StatePoint| x.x1 - 2.0 * x.x2);
        let mut accepted = 0;
        while accepted < 50 {
            let x = random_point(&mut r, -3.0, 3.0);
            let s = entropy(&x);
            let Ok(closed) = sigma_closed(phi, s) else { continue };
            accepted += 1;
            let res = equivalence_residual(phi, &family, &x, &rule).map_err(|e| format!("{phi:?} {x}: {e}"))?;
            worst_res = worst_res.max(res.residual.abs());
            let solved = sigma_solve(phi, s, 1e-12).map_err(|e| format!("{phi:?} S={s}: {e}"))?;
            worst_solve = worst_solve.max((solved - closed).abs() / closed);
        }
        for s in [-1.0, 0.0, 0.7] {
            let spread = mu_independence_check(phi, s, &[-100.0, -3.5, 0.0, 1.0, 42.0, 100.0])
                .map_err(|e| format!("{phi:?}: {e}"))?;
            worst_spread = worst_spread.max(spread);
        }
    }
    check(worst_res <= 1e-6, format!("residual {worst_res:e}"))?;
    check(worst_solve <= 1e-6, format!("sigma_solve relative error {worst_solve:e}"))?;
    check(worst_spread <= 1e-8, format!("mean-shift spread {worst_spread:e}"))?;
    let q25 = GeneralizedLog::tsallis(2.5).unwrap();
    match sigma_closed(&q25, 0.0) {
        Err(e) if e.name() == "DomainError" => {}
        other => return Err(format!("q = 2.5 not rejected: {other:?}")),
    }
    Ok(format!(
        "residual {worst_res:.1e}, solve {worst_solve:.1e}, mean spread {worst_spread:.1e}, q=2.5 rejected"
    ))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut count = 0;
    let mut worst = 0.0_f64;
    while count < 10_000 {
        let radius = r.random_range(std::f64::consts::SQRT_2..10.0);
        let level = r.random_range(-10.0..10.0);
        let spec = LevelSetSpec::new(level, radius, 100).map_err(|e| e.to_string())?;
        for s in intersection_curve(&spec) {
            let p = s.point;
            check(p.x3 > 0.0, format!("x3 = {} not positive", p.x3))?;
            worst = worst
                .max((entropy(&p) - level).abs())
                .max((p.x1 * p.x1 + p.x3 * p.x3 - radius * radius).abs())
                .max((s.mate * s.mate + (p.x2 + level).powi(2) - radius.powi(4) / 4.0).abs());
            count += 1;
        }
    }
    check(worst <= 1e-10, format!("intersection identities off by {worst:e}"))?;
    Ok(format!("{count} samples, max deviation {worst:.1e}"))
}

fn criterion_9(points: &[StatePoint]) -> Outcome {
    let id = nu_patch(&NuFunction::identity());
    let gh = gh_field();
    for x in points {
        for (a, b) in [(&id, &gh), (&id.finite_differences(), &gh.finite_differences())] {
            let (ra, rb) = (report(a, x)?, report(b, x)?);
            // serialized form distinguishes ±0, unlike ==
            let (sa, sb) = (serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
            check(sa == sb, format!("identity nu report differs at {x}"))?;
        }
    }
    let mut r = rng(9);
    let mut worst = 0.0_f64;
    for alpha in [0.5, 2.0] {
        let field = nu_patch(&NuFunction::power(alpha).unwrap());
        for _ in 0..100 {
            let x = StatePoint::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0), r.random_range(0.1..3.0));
            let rep = report(&field, &x)?;
            let p = rep.principal();
            let e2 = p[0] * p[1] + p[0] * p[2] + p[1] * p[2];
            worst = worst.max((rep.scalar - 2.0 * e2).abs());
        }
    }
    check(worst <= 1e-8, format!("Gauss consistency off by {worst:e}"))?;
    Ok(format!("identity bitwise equal; rho = 2 e2 within {worst:.1e}"))
}

fn run_cli(dir: &Path, name: &str, args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_ghgeom"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .env("GHGEOM_THREADS", threads)
        .status()
        .map_err(|e| e.to_string())?;
    check(status.success(), format!("`{}` exited with {status}", args.join(" ")))?;
    std::fs::read(&out).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let grid = "x1=-5:5:21,x3=-5:5:21";
    let commands: Vec<Vec<&str>> = vec![
        vec!["map", "--field", "entropy", "--grid", grid],
        vec!["map", "--field", "H1", "--grid", grid],
        vec!["map", "--field", "H2", "--grid", grid],
        vec!["map", "--field", "lambda1", "--grid", grid],
        vec!["map", "--field", "lambda2", "--grid", grid],
        vec!["map", "--field", "rho", "--grid", grid],
        vec!["map", "--field", "rho", "--grid", grid, "--format", "json"],
        vec!["geodesic", "--preset", "fig6", "--tmax", "5"],
        vec!["geodesic", "--preset", "fig7", "--tmax", "5"],
        vec!["levelset", "--entropy-level", "1", "--radius", "2"],
        vec!["curvature", "--point", "0,0,0", "--format", "json"],
    ];
    for (i, args) in commands.iter().enumerate() {
        let first = run_cli(dir.path(), &format!("{i}a"), args, "1")?;
        let second = run_cli(dir.path(), &format!("{i}b"), args, "4")?;
        check(!first.is_empty(), format!("`{}` wrote nothing", args.join(" ")))?;
        check(first == second, format!("`{}` is not byte-identical across runs", args.join(" ")))?;
    }
    Ok(format!("{} commands byte-identical across runs and thread counts", commands.len()))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let mut r = rng(1);
    let mut points: Vec<StatePoint> = (0..200).map(|_| random_point(&mut r, -5.0, 5.0)).collect();
    points[0] = StatePoint::ORIGIN;

    let criteria: Vec<Criterion> = vec![
        ("closed forms vs generic engine", Box::new(|| criterion_1(&points))),
        ("principal curvature bounds", Box::new(|| criterion_2(&points))),
        ("scalar curvature", Box::new(|| criterion_3(&points))),
        ("mean curvature scaling", Box::new(|| criterion_4(&points))),
        ("geodesic integration", Box::new(criterion_5)),
        ("geodesic shooting", Box::new(criterion_6)),
        ("entropy equivalence", Box::new(criterion_7)),
        ("level-set intersection", Box::new(criterion_8)),
        ("nu-deformed surfaces", Box::new(|| criterion_9(&points))),
        ("CLI determinism", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
