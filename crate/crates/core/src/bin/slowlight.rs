use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use slowlight::scenario::report::error_json;
use slowlight::scenario::{run_with_threads, write_output, OutputFormat, ScenarioConfig, ScenarioKind};
use slowlight::Error;

#[derive(Parser)]
#[command(name = "slowlight", version, about = "Slow-light polarization soliton scenarios")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// JSON scenario config; defaults are used for anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the PDE and mode kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Artifact format: csv, json or bin.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Dotted override, e.g. --set grid.n_tau=8192. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,

    /// Print the resolved config and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Verb {
    /// Closed-form strip with Stokes parameters.
    Figure1,
    /// PDE march against the closed form: error table, velocity, conservation.
    Oracle,
    /// Ramped control: frozen coherences and retrieval position.
    StopRetrieve,
    /// Zero-curvature residual refinement.
    Lax,
    /// Fluctuation modes and their bracket matrix.
    Modes,
    /// Velocity, length, loss and excited population from atomic data.
    Feasibility,
}

impl Verb {
    fn kind(self) -> ScenarioKind {
        match self {
            Verb::Figure1 => ScenarioKind::Figure1,
            Verb::Oracle => ScenarioKind::Oracle,
            Verb::StopRetrieve => ScenarioKind::StopRetrieve,
            Verb::Lax => ScenarioKind::Lax,
            Verb::Modes => ScenarioKind::Modes,
            Verb::Feasibility => ScenarioKind::Feasibility,
        }
    }
}

fn load(cli: &Cli) -> Result<ScenarioConfig, Error> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut sets = vec![format!("scenario={}", cli.verb.kind())];
    sets.extend(cli.sets.iter().cloned());
    let mut cfg = ScenarioConfig::from_json_with_overrides(&text, &sets)?;
    if let Some(out) = &cli.out {
        cfg.output.dir = out.display().to_string();
    }
    if let Some(f) = &cli.format {
        cfg.output.format = f.parse::<OutputFormat>()?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.print_config {
        println!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }
    let dir = PathBuf::from(&cfg.output.dir);
    match run_with_threads(&cfg, cli.threads) {
        Ok(out) => {
            for c in &out.report.checks {
                println!("{c}");
            }
            for w in &out.report.warnings {
                println!("WARN {w}");
            }
            match write_output(&out, &dir) {
                Ok(paths) => {
                    for p in paths {
                        println!("wrote {}", p.display());
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let doc = error_json(Some(cfg.scenario), Some(&cfg.hash()), &e);
            if std::fs::create_dir_all(&dir).is_ok() {
                let path = dir.join("failure.json");
                if let Err(w) = std::fs::write(&path, doc) {
                    eprintln!("error: {}: {w}", path.display());
                }
            }
            ExitCode::from(2)
        }
    }
}
