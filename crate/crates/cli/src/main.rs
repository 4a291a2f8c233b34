//! `fixtcp` — plan smooth end-effector trajectories that keep the
//! operation point of a moving part at a spatially fixed TCP.
//!
//! Exit codes: 0 all checks pass, 1 a tolerance check failed, 2 input or
//! configuration error. Set `PLANNER_LOG=debug` (or any `env_logger`
//! filter) for verbose logging.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fixtcp_core::io;
use fixtcp_core::trajectory::{
    generate_path, run_pipeline, PlannerConfig, SpeedFrame, TrajectorySample,
};

#[derive(Parser)]
#[command(name = "fixtcp", version, about = "Fixed-TCP trajectory planner")]
struct Cli {
    /// Planner configuration JSON. Omitted: a built-in example setup.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized spot checks (`validate` only).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a B-spline to an input point polygon; writes `curve.json`.
    Fit {
        /// Input points, CSV (`x,y,z[,nx,ny,nz][,w]`) or JSON.
        #[arg(long)]
        input: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute process orientation frames along the fitted path; writes
    /// `frames.csv`.
    Frames {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Map the path to end-effector poses around the fixed TCP; writes
    /// `robot_path.csv`.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full pipeline; writes `trajectory.csv`, `profile.csv` and
    /// `report.json`.
    Plan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recheck an existing trajectory CSV for internal consistency.
    Validate {
        /// Trajectory CSV produced by `plan`.
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PLANNER_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<PlannerConfig> {
    match path {
        Some(p) => io::read_config(p).with_context(|| format!("reading config {}", p.display())),
        None => {
            log::info!("no --config given, using the built-in example setup");
            Ok(PlannerConfig::example())
        }
    }
}

fn out_file(dir: &Path, name: &str) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir.join(name))
}

/// Ok(true) = success, Ok(false) = tolerance failure (exit 1),
/// Err = input/config problem (exit 2).
fn run(cli: Cli) -> anyhow::Result<bool> {
    let config = load_config(&cli.config)?;
    match cli.command {
        Command::Fit { input, out } => {
            let polygon = io::read_polygon(&input)?;
            let path = generate_path(&polygon, &config)?;
            let file = out_file(&out, "curve.json")?;
            io::write_curve_json(&file, &path.curve)?;
            println!(
                "fit: {} points -> {} control points, residual rms {:.3e} m, max {:.3e} m",
                polygon.len(),
                config.num_ctrl,
                path.path_residual_rms,
                path.path_residual_max
            );
            println!("wrote {}", file.display());
            Ok(true)
        }
        Command::Frames { input, out } => {
            let polygon = io::read_polygon(&input)?;
            let path = generate_path(&polygon, &config)?;
            let file = out_file(&out, "frames.csv")?;
            io::write_frames_csv(&file, &path.frames)?;
            println!(
                "frames: {} process frames over {:.4} m of path",
                path.frames.len(),
                path.arc.length()
            );
            println!("wrote {}", file.display());
            Ok(true)
        }
        Command::Transform { input, out } => {
            let polygon = io::read_polygon(&input)?;
            let path = generate_path(&polygon, &config)?;
            let file = out_file(&out, "robot_path.csv")?;
            io::write_robot_path_csv(&file, &path.robot_path)?;
            println!("transform: {} end-effector poses", path.robot_path.len());
            println!("wrote {}", file.display());
            Ok(true)
        }
        Command::Plan { input, out } => {
            let polygon = io::read_polygon(&input)?;
            let output = run_pipeline(&polygon, &config)?;

            let traj = out_file(&out, "trajectory.csv")?;
            io::write_trajectory_csv(&traj, &output.samples)?;
            let prof = out.join("profile.csv");
            io::write_profile_csv(&prof, &output.profile, config.output_rate)?;
            let rep = out.join("report.json");
            io::write_report_json(&rep, &output.report)?;

            let r = &output.report;
            println!(
                "plan: {} samples over {:.3} s, path length {:.4} m",
                output.samples.len(),
                r.duration,
                r.path_length
            );
            println!(
                "fixed-TCP drift: {:.3e} m / {:.3e} rad",
                r.fixed_tcp.max_position_drift, r.fixed_tcp.max_orientation_drift
            );
            println!(
                "process speed error {:.3e} m/s (cruise: {}), jerk proxy peak {:.3e} m/s^3",
                r.tcp_speed.max_error, r.tcp_speed.has_cruise, r.jerk_proxy_peak
            );
            if !r.cusps.is_empty() {
                println!("robot-path cusps at sigma = {:?}", r.cusps);
            }
            for f in &r.failures {
                println!("tolerance failure: {f}");
            }
            println!("wrote {}, {}, {}", traj.display(), prof.display(), rep.display());
            println!("result: {}", if r.passed { "PASS" } else { "FAIL" });
            Ok(r.passed)
        }
        Command::Validate { input } => {
            let samples = io::read_trajectory_csv(&input)?;
            let failures = validate_trajectory(&samples, &config, cli.seed)?;
            for f in &failures {
                println!("validate failure: {f}");
            }
            println!(
                "validate: {} samples, {}",
                samples.len(),
                if failures.is_empty() { "PASS" } else { "FAIL" }
            );
            Ok(failures.is_empty())
        }
    }
}

/// Consistency checks that only need the trajectory file itself plus the
/// config limits: monotone time grid, rest boundaries, finite-difference
/// agreement between pose and velocity, and the process-speed bound.
fn validate_trajectory(
    samples: &[TrajectorySample],
    config: &PlannerConfig,
    seed: u64,
) -> anyhow::Result<Vec<String>> {
    anyhow::ensure!(samples.len() >= 3, "trajectory needs at least 3 samples");
    let mut failures = Vec::new();

    if !samples.windows(2).all(|w| w[1].t > w[0].t) {
        failures.push("time stamps are not strictly increasing".into());
    }

    let first = &samples[0];
    let last = &samples[samples.len() - 1];
    for (name, v) in [
        ("initial velocity", first.velocity.norm()),
        ("final velocity", last.velocity.norm()),
        ("initial TCP velocity", first.tcp_velocity.norm()),
        ("final TCP velocity", last.tcp_velocity.norm()),
    ] {
        if v > 1e-12 {
            failures.push(format!("{name} is {v:.3e}, expected rest"));
        }
    }

    // Spot-check velocity against a central difference of the pose on a
    // random subset of interior samples (uniform spacing only; the final
    // step may be shorter).
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior = samples.len() - 2;
    let picks = sample_indices(&mut rng, interior, interior.min(200));
    let mut worst = 0.0_f64;
    for k in picks.iter().map(|i| i + 1) {
        let (hm, hp) = (samples[k].t - samples[k - 1].t, samples[k + 1].t - samples[k].t);
        if (hp - hm).abs() > 1e-9 * hm {
            continue;
        }
        let fd = (samples[k + 1].pose - samples[k - 1].pose) / (hp + hm);
        let scale = samples[k].velocity.norm().max(0.1 * config.limits.v_max);
        worst = worst.max((fd - samples[k].velocity).norm() / scale);
    }
    if worst > 1e-3 {
        failures.push(format!(
            "pose/velocity finite-difference mismatch: {worst:.3e} relative (limit 1e-3)"
        ));
    }

    // Process-speed bound from the config.
    let bound = config.limits.v_max + config.tolerances.tcp_speed;
    let speed = |s: &TrajectorySample| match config.speed_frame {
        SpeedFrame::Tcp => s.tcp_velocity.norm(),
        SpeedFrame::EndEffector => s.velocity.fixed_rows::<3>(0).norm(),
    };
    let peak = samples.iter().map(speed).fold(0.0_f64, f64::max);
    if peak > bound {
        failures.push(format!(
            "process speed peak {peak:.6} m/s exceeds bound {bound:.6} m/s"
        ));
    }

    Ok(failures)
}
