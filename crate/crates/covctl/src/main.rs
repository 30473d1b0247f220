//! Command-line front end: run scenarios, validate them, and replay
//! trajectory files with descent checking.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use covctl::geometry::voronoi_diagram;
use covctl::scenario::{
    emit_svg, emit_trajectory, parse_scenario, parse_trajectory, run_scenario, RunOutput,
};

#[derive(Parser)]
#[command(
    name = "covctl",
    about = "Coverage control: Lloyd descent, vehicle models, and asynchronous distributed agents",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and stream its trajectory records.
    Run(RunArgs),
    /// Parse and validate a scenario file.
    Validate { scenario: PathBuf },
    /// Re-read a trajectory file, optionally checking monotone descent.
    Replay {
        trajectory: PathBuf,
        /// Verify that the cost column never rises beyond tolerance.
        #[arg(long)]
        check_descent: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    scenario: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write trajectory records here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit an SVG snapshot every K records.
    #[arg(long, value_name = "K")]
    svg_every: Option<usize>,
    /// Print the terminal summary.
    #[arg(long)]
    summary: bool,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn dispatch() -> Result<ExitCode, String> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Validate { scenario } => cmd_validate(&scenario),
        Command::Replay {
            trajectory,
            check_descent,
        } => cmd_replay(&trajectory, check_descent),
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, String> {
    let text = fs::read_to_string(&args.scenario)
        .map_err(|e| format!("{}: {e}", args.scenario.display()))?;
    let mut cfg = parse_scenario(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let output = run_scenario(&cfg).map_err(|e| e.to_string())?;

    let rendered = emit_trajectory(&output.records);
    match &args.out {
        Some(path) => {
            fs::write(path, rendered).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for line in rendered.lines() {
                writeln!(lock, "{line}").map_err(|e| e.to_string())?;
            }
        }
    }

    if let Some(every) = args.svg_every {
        if every == 0 {
            return Err("--svg-every takes a positive interval".into());
        }
        write_svg_frames(&cfg.polygon, &cfg.density, &output, every, &args)?;
    }

    if args.summary {
        let s = &output.summary;
        println!(
            "algorithm={} converged={} residual={:.3e} final_cost={:.6e} steps={}",
            s.algorithm.name(),
            s.converged,
            s.residual,
            s.final_cost,
            s.steps
        );
        for note in &s.notes {
            println!("note: {note}");
        }
    }

    Ok(if output.summary.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn write_svg_frames(
    polygon: &covctl::ConvexPolygon,
    phi: &covctl::density::DensityField,
    output: &RunOutput,
    every: usize,
    args: &RunArgs,
) -> Result<(), String> {
    let stem: PathBuf = match &args.out {
        Some(path) => path.with_extension(""),
        None => Path::new(
            args.scenario
                .file_stem()
                .unwrap_or_else(|| args.scenario.as_os_str()),
        )
        .to_path_buf(),
    };
    for (k, record) in output.records.iter().enumerate().step_by(every) {
        let diagram = voronoi_diagram(polygon, &record.positions)
            .map_err(|e| format!("svg frame {k}: {e}"))?;
        let svg = emit_svg(polygon, Some(&diagram), &record.positions, Some(phi), &[]);
        let path = stem.with_file_name(format!(
            "{}_frame_{k:06}.svg",
            stem.file_name().unwrap_or_default().to_string_lossy()
        ));
        fs::write(&path, svg).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<ExitCode, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let cfg = parse_scenario(&text).map_err(|e| e.to_string())?;
    println!(
        "ok: {} agents, algorithm {}, horizon {}, seed {}",
        cfg.n,
        cfg.algorithm.name(),
        cfg.horizon,
        cfg.seed
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_replay(path: &Path, check_descent: bool) -> Result<ExitCode, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let records = parse_trajectory(&text).map_err(|e| e.to_string())?;
    println!("parsed {} records", records.len());
    for w in records.windows(2) {
        if w[1].time < w[0].time {
            return Err(format!(
                "time went backwards: {} after {}",
                w[1].time, w[0].time
            ));
        }
    }
    if check_descent {
        // absolute slack for asynchronous traces plus a relative term for
        // large costs
        for (k, w) in records.windows(2).enumerate() {
            let slack = 1e-6 + 1e-9 * (1.0 + w[0].cost.total.abs());
            if w[1].cost.total > w[0].cost.total + slack {
                println!(
                    "descent violated at record {}: {} -> {}",
                    k + 1,
                    w[0].cost.total,
                    w[1].cost.total
                );
                return Ok(ExitCode::from(2));
            }
        }
        println!("descent ok");
    }
    Ok(ExitCode::SUCCESS)
}
