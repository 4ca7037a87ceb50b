//! `rotnum`: batch driver for the rotation-number estimators.
//!
//! Every command reads its system (or vector field) from `--fixture`/`--vf` or
//! a TOML `--config`, writes CSV or JSON to `--out` (stdout otherwise), and
//! prints one summary line per estimate. Exit codes: 2 for invalid input,
//! 3 for a violated theorem hypothesis, 4 for numeric failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rotnum_core::compare::{staircase_sweep, verify_orbit_identity, verify_lift_comparison, Residual, SweepAxis};
use rotnum_core::estimate::{ergodic_formula_check, orbit_rotation, rho_estimate, rho_nonuniform};
use rotnum_core::estimate::{EstimateReport, Estimator};
use rotnum_core::report::{self, fmt_num};
use rotnum_core::rng::streams;
use rotnum_core::sde::{
    or_sampling_counterexample, rot_continuous, rot_formula_estimate, sampling_experiment, BrownianStream,
};
use rotnum_core::plfile::write_pl;
use rotnum_core::{Angle, Error, Model, RandomSystem};

use config::{ExperimentConfig, Format, Params};

#[derive(Debug, Parser)]
#[command(name = "rotnum", version, about = "Rotation numbers of random circle maps and their time discretizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Built-in system: example1, intro, north-south, rotation, perturbed.
    #[arg(long, global = true)]
    fixture: Option<String>,
    /// TOML experiment file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Topological rotation number ρ_{q,α}.
    Rho(Common),
    /// Orbit rotation number from --s0.
    Orbit(Common),
    /// Rotation number of the lifts F_{q,α} + N for an offset law.
    Nonuniform(Common),
    /// Birkhoff estimate against the integral over the occupation measure.
    ErgodicCheck(Common),
    /// Compares ρ at (q, α) and (q2, alpha2) through the crossing probabilities.
    Compare(Common),
    /// Staircase levels along a q′ or α′ grid.
    Staircase(Common),
    /// Orbit rotation number against ρ and the deviation-cell frequencies.
    Cor33(Common),
    /// Rotation number of a circle SDE, by trajectory and by the drift formula.
    SdeRot(Common),
    /// Rescaled rotation numbers of time-Δt discretizations.
    Sampling(Common),
    /// Orbit rotation numbers of the discretized North–South flow.
    NsCounterexample(Common),
    /// Runs the command named in the config file.
    Run(Common),
    /// Writes the piecewise-linear maps of a system as `map<i>.pl` files into
    /// the `--out` directory.
    ExportPl(Common),
}

const COMMANDS: [&str; 10] = [
    "rho",
    "orbit",
    "nonuniform",
    "ergodic-check",
    "compare",
    "staircase",
    "cor33",
    "sde-rot",
    "sampling",
    "ns-counterexample",
];

/// Resolved inputs for one command.
struct Ctx {
    fixture: Option<String>,
    cfg: ExperimentConfig,
    seed: u64,
    params: Params,
}

struct Output {
    summaries: Vec<String>,
    csv: String,
    json: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match cli.command {
        Command::Rho(c) => ("rho", c),
        Command::Orbit(c) => ("orbit", c),
        Command::Nonuniform(c) => ("nonuniform", c),
        Command::ErgodicCheck(c) => ("ergodic-check", c),
        Command::Compare(c) => ("compare", c),
        Command::Staircase(c) => ("staircase", c),
        Command::Cor33(c) => ("cor33", c),
        Command::SdeRot(c) => ("sde-rot", c),
        Command::Sampling(c) => ("sampling", c),
        Command::NsCounterexample(c) => ("ns-counterexample", c),
        Command::Run(c) => ("run", c),
        Command::ExportPl(c) => ("export-pl", c),
    };
    match execute(name, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Hypothesis { .. } => 3,
        Error::Numeric(_) => 4,
        _ => 2,
    }
}

fn execute(name: &str, common: Common) -> rotnum_core::Result<()> {
    let cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let command = if name == "run" {
        let c = cfg
            .command
            .clone()
            .ok_or_else(|| Error::Config("`run` needs `command` in the config file".into()))?;
        if !COMMANDS.contains(&c.as_str()) {
            return Err(Error::Config(format!("unknown command {c:?} in config")));
        }
        c
    } else {
        name.to_string()
    };
    if let Some(threads) = common.threads.or(cfg.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    if command == "export-pl" {
        let sys = config::system(common.fixture.as_deref(), &cfg, common.seed.unwrap_or(1))?;
        let dir = common
            .out
            .or(cfg.out)
            .ok_or_else(|| Error::Config("export-pl needs --out DIR".into()))?;
        return export_pl(&sys, &dir);
    }
    let format = common.format.or(cfg.format).unwrap_or(Format::Csv);
    let out = common.out.clone().or(cfg.out.clone());
    let ctx = Ctx {
        fixture: common.fixture,
        seed: common.seed.or(cfg.seed).unwrap_or(1),
        params: common.params.overlay(cfg.params.clone()),
        cfg,
    };
    let output = dispatch(&command, &ctx)?;
    let body = match format {
        Format::Csv => output.csv,
        Format::Json => output.json + "\n",
    };
    match out {
        Some(path) => {
            std::fs::write(&path, body)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            for line in &output.summaries {
                println!("{line}");
            }
        }
        None => {
            for line in &output.summaries {
                eprintln!("{line}");
            }
            print!("{body}");
        }
    }
    Ok(())
}

fn export_pl(sys: &RandomSystem, dir: &std::path::Path) -> rotnum_core::Result<()> {
    let maps = match sys.model() {
        Model::FiniteIid { maps, .. } | Model::FiniteCyclic { maps, .. } => maps,
        Model::ParametricIid { .. } => {
            return Err(Error::UnsupportedModel {
                operation: "export-pl",
                reason: "a parametric family has no finite list of maps".into(),
            })
        }
    };
    let io = |e: std::io::Error| Error::Config(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for (i, map) in maps.iter().enumerate() {
        let text = write_pl(map).ok_or_else(|| Error::UnsupportedModel {
            operation: "export-pl",
            reason: format!("map {} is not piecewise linear", i + 1),
        })?;
        let path = dir.join(format!("map{}.pl", i + 1));
        std::fs::write(&path, text).map_err(io)?;
        println!("export-pl wrote {}", path.display());
    }
    Ok(())
}

fn summary(r: &EstimateReport) -> String {
    format!(
        "{} value={} se={} n={} seed={}",
        r.estimator.name(),
        fmt_num(r.value),
        fmt_num(r.se_proxy),
        r.n,
        r.seed
    )
}

fn estimates(rows: Vec<EstimateReport>) -> Output {
    Output {
        summaries: rows.iter().map(summary).collect(),
        csv: report::estimates_csv(&rows),
        json: report::to_json(&rows),
    }
}

fn residual_output(command: &str, r: &Residual, seed: u64, n: usize) -> Output {
    Output {
        summaries: vec![format!(
            "{command} lhs={} rhs={} residual={} se={} n={n} seed={seed}",
            fmt_num(r.lhs),
            fmt_num(r.rhs),
            fmt_num(r.residual),
            fmt_num(r.combined_se())
        )],
        csv: report::residual_csv(r),
        json: report::to_json(r),
    }
}

fn dispatch(command: &str, ctx: &Ctx) -> rotnum_core::Result<Output> {
    let p = &ctx.params;
    let system = || config::system(ctx.fixture.as_deref(), &ctx.cfg, ctx.seed);
    let n = p.n();
    Ok(match command {
        "rho" => estimates(vec![rho_estimate(&system()?, p.lift(), p.x0.unwrap_or(0.0), n)?]),
        "orbit" => {
            let (r, _) = orbit_rotation(&system()?, Angle::new(p.s0.unwrap_or(0.0)), n)?;
            estimates(vec![r])
        }
        "nonuniform" => {
            let run = rho_nonuniform(&system()?, p.lift(), &p.offsets()?, p.x0.unwrap_or(0.0), n)?;
            let mut out = estimates(vec![run.report, run.uniform]);
            out.summaries.push(format!(
                "nonuniform offset_mean={} telescoping_residual={}",
                fmt_num(run.offset_mean),
                fmt_num(run.max_telescoping_residual)
            ));
            out
        }
        "ergodic-check" => {
            let n_fresh = p.n_prob.unwrap_or(n);
            let c = ergodic_formula_check(&system()?, p.lift(), n, n_fresh, p.bins.unwrap_or(100))?;
            let cross = EstimateReport {
                estimator: Estimator::ErgodicCross,
                value: c.cross,
                n: n_fresh as u64,
                se_proxy: c.cross_se,
                ..c.direct.clone()
            };
            estimates(vec![c.direct, cross])
        }
        "compare" => {
            let c = verify_lift_comparison(
                &system()?,
                p.lift(),
                p.target(),
                n,
                p.n_prob.unwrap_or(n),
                p.streams.map(Into::into).unwrap_or_default(),
            )?;
            let mut out = residual_output("compare", &c.residual, ctx.seed, n);
            out.summaries.push(format!(
                "compare k={} l={} P(A_k)={} P(B_l)={}",
                c.stats.k,
                c.stats.l,
                fmt_num(c.stats.p_a()),
                fmt_num(c.stats.p_b())
            ));
            out
        }
        "staircase" => {
            let base = p.lift();
            let axis: SweepAxis = p.axis.map(Into::into).unwrap_or(SweepAxis::Q);
            let start = p.from.unwrap_or(match axis {
                SweepAxis::Q => base.q,
                SweepAxis::Alpha => base.alpha,
            });
            let end = p.to.unwrap_or(start + 1.0);
            let points = p.points.unwrap_or(201).max(2);
            let grid: Vec<f64> = (0..points)
                .map(|i| start + (end - start) * i as f64 / (points - 1) as f64)
                .collect();
            let rows = staircase_sweep(&system()?, base, axis, &grid, n)?;
            let jumps = rows.windows(2).filter(|w| w[1].level != w[0].level).count();
            Output {
                summaries: vec![format!(
                    "staircase points={points} levels={}..{} jumps={jumps} n={n} seed={}",
                    rows[0].level,
                    rows[rows.len() - 1].level,
                    ctx.seed
                )],
                csv: report::staircase_csv(&rows),
                json: report::to_json(&rows),
            }
        }
        "cor33" => {
            let c = verify_orbit_identity(&system()?, p.lift(), Angle::new(p.s0.unwrap_or(0.0)), n)?;
            let mut out = residual_output("cor33", &c.residual, ctx.seed, n);
            out.summaries.push(format!(
                "cor33 or={} rho={} k={} weights={},{},{}",
                fmt_num(c.or),
                fmt_num(c.rho),
                c.k,
                fmt_num(c.weights[0]),
                fmt_num(c.weights[1]),
                fmt_num(c.weights[2])
            ));
            out
        }
        "sde-rot" => {
            let vf = config::vector_field(p, &ctx.cfg)?;
            let dt = p.dt.unwrap_or(0.005);
            let t = p.t.unwrap_or(1000.0);
            let x0 = p.x0.unwrap_or(0.0);
            let mut path = BrownianStream::new(ctx.seed, streams::PATH, dt, vf.dim())?;
            let rot = rot_continuous(&vf, &mut path, x0, t)?;
            let mut occupation = BrownianStream::new(ctx.seed, streams::OCCUPATION, dt, vf.dim())?;
            let formula = rot_formula_estimate(&vf, &mut occupation, t, p.bins.unwrap_or(100))?;
            let steps = (rot.t / dt).round() as u64;
            let base = EstimateReport {
                estimator: Estimator::SdeRot,
                value: rot.value,
                n: steps,
                // half-horizon drift as a crude convergence proxy
                se_proxy: (rot.value - rot.tail).abs(),
                q: None,
                alpha: None,
                s0: Some(x0),
                seed: ctx.seed,
            };
            let f = EstimateReport {
                estimator: Estimator::SdeFormula,
                value: formula.value,
                se_proxy: 0.0,
                s0: Some(0.0),
                ..base.clone()
            };
            estimates(vec![base, f])
        }
        "sampling" => {
            let vf = config::vector_field(p, &ctx.cfg)?;
            let dts = p.dts.clone().unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]);
            let rows = sampling_experiment(&vf, p.lift(), &dts, n, ctx.seed, p.substeps.unwrap_or(20))?;
            Output {
                summaries: rows
                    .iter()
                    .map(|r| {
                        format!(
                            "sampling dt={} value={} se={} n={} seed={}",
                            fmt_num(r.delta_t),
                            fmt_num(r.rho_rescaled),
                            fmt_num(r.se),
                            r.n_steps,
                            ctx.seed
                        )
                    })
                    .collect(),
                csv: report::sampling_csv(&rows),
                json: report::to_json(&rows),
            }
        }
        "ns-counterexample" => {
            let s0s = p.s0s.clone().unwrap_or_else(|| vec![0.0, 0.25, 0.75]);
            let rows = or_sampling_counterexample(p.dt.unwrap_or(0.1), &s0s, n)?;
            Output {
                summaries: rows
                    .iter()
                    .map(|r| format!("ns-counterexample s0={} value={} n={n}", fmt_num(r.s0), fmt_num(r.or)))
                    .collect(),
                csv: report::counterexample_csv(&rows),
                json: report::to_json(&rows),
            }
        }
        other => return Err(Error::Config(format!("unknown command {other:?}"))),
    })
}
