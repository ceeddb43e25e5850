use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nfkit_cli::manifest::MANIFEST_NAME;
use nfkit_cli::{parse_config, run_scenario, CliError, ExperimentKind, ScenarioConfig};

#[derive(Parser)]
#[command(name = "nfkit", version, about = "Near-field analysis experiments from TOML scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSVs plus manifest.json
    Run {
        config: PathBuf,
        /// output directory, overriding `output_dir` in the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// overrides `seed` in the config
        #[arg(long)]
        seed: Option<u64>,
        /// worker threads; 0 or unset uses one per core
        #[arg(long, env = "NFKIT_THREADS")]
        threads: Option<usize>,
    },
    /// Check a config and print it with every default filled in
    Validate { config: PathBuf },
    /// List the experiment kinds
    ListExperiments,
}

fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

fn run(path: &Path, out: Option<PathBuf>, seed: Option<u64>, threads: Option<usize>) -> Result<(), CliError> {
    let mut config = load(path)?;
    if let Some(dir) = out {
        config.output_dir = Some(dir.to_string_lossy().into_owned());
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    // reparse so overrides go through the same validation
    let config = parse_config(&config.to_toml())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::io("thread pool", e))?;
    let manifest = pool.install(|| run_scenario(&config))?;
    let dir = Path::new(config.output_dir());
    for o in &manifest.outputs {
        println!("{}  {}", o.sha256, dir.join(&o.file).display());
    }
    println!("wrote {}", dir.join(MANIFEST_NAME).display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, threads } => run(&config, out, seed, threads),
        Command::Validate { config } => load(&config).map(|c| print!("{}", c.to_toml())),
        Command::ListExperiments => {
            for k in ExperimentKind::ALL {
                println!("{:<10} {}", k.name(), k.summary());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::json!({ "category": e.category(), "message": e.to_string() });
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
