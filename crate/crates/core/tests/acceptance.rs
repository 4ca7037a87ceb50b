//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances and seeds are fixed here and never tuned per run.

mod common;

use std::time::{Duration, Instant};

use rotnum_core::circle::normalize_lift;
use rotnum_core::compare::{verify_orbit_identity, verify_lift_comparison, StreamMode, SweepAxis};
use rotnum_core::estimate::{orbit_rotation, rho_estimate, rho_nonuniform, OffsetLaw};
use rotnum_core::fixtures::{build_example1, build_intro, build_north_south, perturbed_family};
use rotnum_core::sde::{or_sampling_counterexample, sampling_experiment, VectorFieldSet};
use rotnum_core::{staircase_sweep, Angle, CircleMap, Error, LiftParams, RandomSystem};

const SEED: u64 = 1;
const SUBSTEPS: usize = 20;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("01 example1 exactness", Duration::from_secs(1), example1),
        ("02 intro system average", Duration::from_secs(5), intro),
        ("03 deviation bounds and periodicity", Duration::from_secs(5), deviation_bounds),
        ("04 start-point independence", Duration::from_secs(30), start_point),
        ("05 nonuniform telescoping", Duration::from_secs(30), telescoping),
        ("06 comparison identity across lifts", Duration::from_secs(60), comparison),
        ("07 orbit/lift identity", Duration::from_secs(30), orbit_identity),
        ("08 staircase structure", Duration::from_secs(30), staircase),
        ("09 sampling theorem", Duration::from_secs(120), sampling),
        ("10 north-south counterexample", Duration::from_secs(30), north_south),
        ("11 hypothesis gate", Duration::from_secs(1), gate),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= budget;
        if !ok {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.2}s / {}s]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn example1() -> Outcome {
    let sys = build_example1().unwrap();
    let rho = rho_estimate(&sys, LiftParams::ORIGIN, 0.0, 4000).unwrap().value;
    let or_eighth = orbit_rotation(&sys, Angle::new(0.125), 4000).unwrap().0.value;
    let or_zero = orbit_rotation(&sys, Angle::ZERO, 4000).unwrap().0.value;
    check(
        rho.abs() <= 1e-9 && (or_eighth - 0.25).abs() <= 1e-12 && or_zero.abs() <= 1e-12,
        format!("rho={rho} OR(1/8)={or_eighth} OR(0)={or_zero}"),
    )
}

fn intro() -> Outcome {
    let sys = build_intro(0.5, 0.3, SEED).unwrap();
    let rho = rho_estimate(&sys, LiftParams::ORIGIN, 0.0, 1_000_000).unwrap().value;
    check((rho - 0.15).abs() <= 7e-4, format!("rho={rho} (target 0.15 ± 7e-4)"))
}

fn deviation_bounds() -> Outcome {
    let mut rng = common::rng(3);
    let (mut bound_violations, mut worst_periodicity) = (0, 0.0_f64);
    for _ in 0..10_000 {
        let map = common::random_map(&mut rng);
        let params = common::random_params(&mut rng);
        let x: f64 = rand::Rng::random_range(&mut rng, -3.0..3.0);
        let d = normalize_lift(&map, params).eval(x);
        let (lo, hi) = params.deviation_bounds();
        if !(lo < d && d < hi) {
            bound_violations += 1;
        }
        let (k, l) = (rand::Rng::random_range(&mut rng, -3..4), rand::Rng::random_range(&mut rng, -3..4));
        let shifted = normalize_lift(&map, params.shifted(k, l)).eval(x);
        worst_periodicity = worst_periodicity.max((shifted - d - (l - k) as f64).abs());
    }
    check(
        bound_violations == 0 && worst_periodicity <= 1e-12,
        format!("bound violations={bound_violations} max periodicity error={worst_periodicity:e}"),
    )
}

fn start_point() -> Outcome {
    let mut rng = common::rng(4);
    let n = 10_000;
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let sys = common::random_system(&mut rng, 100 + i);
        let params = common::random_params(&mut rng);
        let (x0, y0) = (rand::Rng::random::<f64>(&mut rng), rand::Rng::random::<f64>(&mut rng));
        let a = rho_estimate(&sys, params, x0, n).unwrap().value;
        let b = rho_estimate(&sys, params, y0, n).unwrap().value;
        worst = worst.max((a - b).abs());
    }
    check(worst <= 2.0 / n as f64, format!("max |rho(x0) - rho(y0)| = {worst:e} (bound {:e})", 2.0 / n as f64))
}

fn telescoping() -> Outcome {
    let law = OffsetLaw::Discrete {
        values: vec![-1, 0, 2],
        probs: vec![0.25, 0.5, 0.25],
    };
    let n = 10_000;
    let fixtures: Vec<(RandomSystem, LiftParams)> = vec![
        (build_example1().unwrap(), LiftParams::ORIGIN),
        (build_intro(0.5, 0.3, SEED).unwrap(), LiftParams::new(0.2, -0.4)),
        (perturbed_family(0.3, 0.2, 0.05, SEED).unwrap(), LiftParams::new(0.6, 1.3)),
        (build_north_south(0.1).unwrap().with_seed(SEED), LiftParams::new(0.0, -0.5)),
    ];
    let (mut worst_path, mut worst_mean) = (0.0_f64, 0.0_f64);
    for (sys, params) in &fixtures {
        let run = rho_nonuniform(sys, *params, &law, 0.3, n).unwrap();
        worst_path = worst_path.max(run.max_telescoping_residual);
        worst_mean = worst_mean.max((run.report.value - run.uniform.value - run.offset_mean).abs());
    }
    // Random systems drive the raw lifts to |x| ~ 10^4, where double spacing
    // alone is ~10^-12 per step; reported, not gated.
    let mut rng = common::rng(5);
    let mut random_path = 0.0_f64;
    for i in 0..20 {
        let sys = common::random_system(&mut rng, 200 + i);
        let params = common::random_params(&mut rng);
        let run = rho_nonuniform(&sys, params, &law, 0.3, n).unwrap();
        random_path = random_path.max(run.max_telescoping_residual);
        worst_mean = worst_mean.max((run.report.value - run.uniform.value - run.offset_mean).abs());
    }
    check(
        worst_path <= 1e-9 && worst_mean <= 1e-12,
        format!(
            "fixture path residual={worst_path:e} mean residual={worst_mean:e} \
             (random systems path residual={random_path:e}, informational)"
        ),
    )
}

fn comparison() -> Outcome {
    let sys = perturbed_family(0.3, 0.2, 0.05, SEED).unwrap();
    let mut rng = common::rng(6);
    let n = 100_000;
    let mut worst_z = 0.0_f64;
    for _ in 0..20 {
        let base = common::random_params(&mut rng);
        let target = common::random_params(&mut rng);
        let c = verify_lift_comparison(&sys, base, target, n, n, StreamMode::Independent).unwrap();
        worst_z = worst_z.max(c.residual.residual / c.residual.combined_se());
    }
    let mut worst_shift = 0.0_f64;
    for (k, l) in [(1, 0), (0, 1), (-2, 3), (2, 2), (-1, -3)] {
        let base = LiftParams::new(0.2, -0.4);
        let c = verify_lift_comparison(&sys, base, base.shifted(k, l), n, n, StreamMode::Shared).unwrap();
        worst_shift = worst_shift.max(c.residual.residual);
    }
    check(
        worst_z <= 3.0 && worst_shift <= 2.0 / n as f64,
        format!("max residual/SE={worst_z:.3} translation residual={worst_shift:e}"),
    )
}

fn orbit_identity() -> Outcome {
    let n = 100_000;
    let cases: Vec<(RandomSystem, LiftParams, f64)> = vec![
        (build_example1().unwrap(), LiftParams::ORIGIN, 0.125),
        (build_example1().unwrap(), LiftParams::new(0.3, 1.1), 0.125),
        (perturbed_family(0.3, 0.2, 0.05, SEED).unwrap(), LiftParams::ORIGIN, 0.4),
        (perturbed_family(0.3, 0.2, 0.05, SEED).unwrap(), LiftParams::new(0.6, -0.2), 0.4),
        (perturbed_family(0.3, 0.2, 0.05, SEED).unwrap(), LiftParams::new(-0.4, 0.9), 0.0),
    ];
    let (mut worst, mut worst_origin, mut outside) = (0.0_f64, 0.0_f64, 0);
    for (sys, params, s0) in &cases {
        let c = verify_orbit_identity(sys, *params, Angle::new(*s0), n).unwrap();
        worst = worst.max(c.residual.residual);
        outside += c.out_of_range;
        if let Some(r) = c.origin_form {
            worst_origin = worst_origin.max(r.residual);
        }
    }
    let tol = 2.0 / n as f64;
    check(
        worst <= tol && worst_origin <= tol && outside == 0,
        format!("max residual={worst:e} origin form={worst_origin:e} off-cell steps={outside}"),
    )
}

fn staircase() -> Outcome {
    let base = LiftParams::new(0.1, 0.0);
    let grid: Vec<f64> = (0..=200).map(|i| base.q + i as f64 / 200.0).collect();
    let atomic = RandomSystem::finite_iid(vec![CircleMap::rotation(0.25)], vec![1.0], SEED).unwrap();
    let rows = staircase_sweep(&atomic, base, SweepAxis::Q, &grid, 1000).unwrap();
    let unit_jumps = rows.windows(2).all(|w| matches!(w[1].level - w[0].level, 0 | 1));
    let binary = rows.iter().all(|r| r.prob == 0.0 || r.prob == 1.0);
    let period = rows[200].level - rows[0].level == 1;
    let at_base = rows[0].prob == 1.0;

    let atomless = perturbed_family(0.3, 0.2, 0.05, SEED).unwrap();
    let rows2 = staircase_sweep(&atomless, base, SweepAxis::Q, &grid, 20_000).unwrap();
    let decreasing = rows2
        .windows(2)
        .all(|w| w[1].level != w[0].level || w[1].prob <= w[0].prob);
    let jumps2 = rows2.windows(2).all(|w| matches!(w[1].level - w[0].level, 0 | 1));
    let at_base2 = rows2[0].prob == 1.0;
    check(
        unit_jumps && binary && period && at_base && decreasing && jumps2 && at_base2,
        format!(
            "atomic: unit jumps={unit_jumps} binary={binary} period={period} P at q={}; \
             atomless: per-cell decrease={decreasing} unit jumps={jumps2} P at q={}",
            rows[0].prob, rows2[0].prob
        ),
    )
}

fn sampling() -> Outcome {
    let vf = VectorFieldSet::constant(0.7, 0.5);
    let dts = [0.2, 0.1, 0.05, 0.025];
    let rows = sampling_experiment(&vf, LiftParams::new(0.0, -0.5), &dts, 100_000, SEED, SUBSTEPS).unwrap();
    let errors: Vec<f64> = rows.iter().map(|r| (r.rho_rescaled - 0.7).abs()).collect();
    let diag: Vec<f64> = rows.iter().map(|r| r.crossing_diag).collect();
    let error_decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let diag_decreasing = diag.windows(2).all(|w| w[1] < w[0]);
    let final_ok = errors[3] <= 0.02;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(",");
    check(
        error_decreasing && diag_decreasing && final_ok,
        format!(
            "|err|=[{}] se=[{}] E|N|/dt=[{}]",
            fmt(&errors),
            fmt(&rows.iter().map(|r| r.se).collect::<Vec<_>>()),
            fmt(&diag)
        ),
    )
}

fn north_south() -> Outcome {
    let n = 10_000;
    let sys = build_north_south(0.1).unwrap();
    let rot = rho_estimate(&sys, LiftParams::new(0.0, -0.5), 0.25, 10_000_000).unwrap().value / 0.1;
    let coarse = or_sampling_counterexample(0.1, &[0.25, 0.75], n).unwrap();
    let fine = or_sampling_counterexample(0.01, &[0.25, 0.75], n).unwrap();
    let tol = 1.0 / n as f64;
    let near = |x: f64, t: f64| (x - t).abs() <= tol;
    let ok = rot.abs() <= 1e-6
        && near(coarse[0].or, 0.0)
        && near(coarse[1].or, 1.0)
        && coarse.iter().zip(&fine).all(|(a, b)| a.or.round() == b.or.round() && near(b.or, b.or.round()));
    check(
        ok,
        format!(
            "rot={rot:e} OR(0.25)={} OR(0.75)={} at dt=0.1; {} {} at dt=0.01",
            coarse[0].or, coarse[1].or, fine[0].or, fine[1].or
        ),
    )
}

fn gate() -> Outcome {
    let vf = VectorFieldSet::constant(0.7, 0.5);
    let q = 0.2;
    let results: Vec<bool> = [q + 0.3, q - 1.3]
        .iter()
        .map(|&alpha| {
            matches!(
                sampling_experiment(&vf, LiftParams::new(q, alpha), &[0.1], 10, SEED, SUBSTEPS),
                Err(Error::Hypothesis { .. })
            )
        })
        .collect();
    check(results.iter().all(|&r| r), format!("rejected: {results:?}"))
}
