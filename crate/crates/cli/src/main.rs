use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use afrelay_cli::config::parse_engines;
use afrelay_cli::{exit, load_preset, parse_config, preset_text, run_sweep, RunConfig, PRESETS};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "afrelay",
    version,
    about = "Outage probability of fixed-gain AF multihop relay links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the selected engines over an SNR sweep and write CSV.
    Run(RunArgs),
    /// List the bundled parameter sets, or print one of them.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file.
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled parameter set, e.g. fig2.
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated engines: contour, residue, asymptotic_full, asymptotic_leading, monte_carlo.
    #[arg(long, value_delimiter = ',')]
    engines: Option<Vec<String>>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo trials per grid point.
    #[arg(long)]
    trials: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    workers: Option<usize>,
    /// Exit with status 3 when Monte Carlo and the contour disagree beyond 3 stderr + 0.1%.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run(args),
        Command::Presets { name } => presets(name.as_deref()),
    };
    ExitCode::from(code as u8)
}

fn presets(name: Option<&str>) -> i32 {
    match name {
        None => {
            for (name, _) in PRESETS {
                println!("{name}");
            }
            exit::SUCCESS
        }
        Some(name) => match preset_text(name) {
            Some(text) => {
                print!("{text}");
                exit::SUCCESS
            }
            None => {
                eprintln!("error: unknown preset `{name}`");
                exit::CONFIG
            }
        },
    }
}

fn load(args: &RunArgs) -> Result<RunConfig, String> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        (None, Some(name)) => load_preset(name).map_err(|e| e.to_string())?,
        (None, None) => unreachable!("clap requires --config or --preset"),
    };
    if let Some(names) = &args.engines {
        cfg.engines = parse_engines(names.iter().map(String::as_str)).map_err(|e| format!("--engines: {e}"))?;
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err("--trials: must be >= 1".into());
        }
        cfg.mc.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    if args.check {
        use afrelay::Method::{Contour, MonteCarlo};
        if !(cfg.engines.contains(&Contour) && cfg.engines.contains(&MonteCarlo)) {
            return Err("--check needs both the contour and monte_carlo engines".into());
        }
    }
    Ok(cfg)
}

fn run(args: RunArgs) -> i32 {
    let cfg = match load(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::CONFIG;
        }
    };
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: worker pool: {e}");
            return exit::CONFIG;
        }
    };
    let out = pool.install(|| run_sweep(&cfg));
    let breaches = if args.check { out.check_breaches() } else { Vec::new() };
    let mut diagnostics = out.diagnostics.clone();
    diagnostics.extend(breaches.iter().map(|b| format!("check: {b}")));

    let csv = out.to_csv();
    match &cfg.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &csv) {
                eprintln!("error: {}: {e}", path.display());
                return exit::CONFIG;
            }
            let sidecar = diag_path(path);
            if diagnostics.is_empty() {
                let _ = fs::remove_file(&sidecar);
            } else {
                let text: String = diagnostics.iter().map(|d| format!("{d}\n")).collect();
                if let Err(e) = fs::write(&sidecar, text) {
                    eprintln!("error: {}: {e}", sidecar.display());
                }
            }
        }
        None => {
            print!("{csv}");
            for d in &diagnostics {
                eprintln!("{d}");
            }
        }
    }

    if out.failures > 0 {
        eprintln!("{} engine evaluation(s) failed", out.failures);
        exit::ENGINE
    } else if !breaches.is_empty() {
        eprintln!("{} grid point(s) outside the Monte Carlo tolerance", breaches.len());
        exit::CHECK
    } else {
        exit::SUCCESS
    }
}

/// `<out>.diag.txt` next to the CSV.
fn diag_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".diag.txt");
    PathBuf::from(name)
}
