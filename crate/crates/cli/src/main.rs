use clap::{Parser, Subcommand};
use hulllab::{exit_code, preset, preset_names, run, ExportConfig, Scenario};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "hulllab")]
#[command(about = "Builds explicit surfaces in C^2/C^3 and certifies their analytic hypotheses")]
#[command(version)]
struct Cli {
    /// Force single-threaded, timestamp-free runs (runs are deterministic
    /// either way; the flag pins it in the manifest).
    #[arg(long, global = true, default_value_t = false)]
    deterministic: bool,

    /// Random seed override (point samples, randomized case batteries).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (HULLLAB_OUT overrides the default ./hulllab-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Build a scenario's surface and write exports + manifest (no checks).
    Build { target: String },
    /// Build, run the scenario's checks, write reports + manifest.
    Verify {
        target: String,
        /// Comma-separated check-list override.
        #[arg(long)]
        checks: Option<String>,
    },
    /// Build and export one artifact.
    Export {
        target: String,
        #[arg(long)]
        format: String,
        /// Three comma-separated real-coordinate indices for obj.
        #[arg(long, default_value = "0,1,2")]
        proj: String,
    },
    /// List the named presets.
    Presets,
}

fn load_scenario(target: &str) -> Result<Scenario, String> {
    if let Some(p) = preset(target) {
        return Ok(p);
    }
    let path = PathBuf::from(target);
    if path.exists() {
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let s: Scenario = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        return Ok(s);
    }
    Err(format!(
        "'{target}' is neither a preset ({}) nor a config file",
        preset_names().join(", ")
    ))
}

fn out_dir(cli: &Cli, scenario: &Scenario) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os("HULLLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hulllab-out"))
        .join(&scenario.name)
}

fn main() {
    let cli = Cli::parse();
    let code = dispatch(&cli);
    std::process::exit(code);
}

fn dispatch(cli: &Cli) -> i32 {
    let target = match &cli.command {
        Commands::Presets => {
            for p in preset_names() {
                println!("{p}");
            }
            return exit_code::OK;
        }
        Commands::Build { target } | Commands::Verify { target, .. } | Commands::Export { target, .. } => {
            target.clone()
        }
    };
    let mut scenario = match load_scenario(&target) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return exit_code::CONFIG_ERROR;
        }
    };
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    match &cli.command {
        Commands::Build { .. } => {
            scenario.checks.clear();
        }
        Commands::Verify { checks, .. } => {
            if let Some(list) = checks {
                scenario.checks = list.split(',').map(|s| s.trim().to_string()).collect();
            }
        }
        Commands::Export { format, proj, .. } => {
            let projection: Vec<usize> = proj
                .split(',')
                .filter_map(|s| s.trim().parse().ok())
                .collect();
            if projection.len() != 3 {
                eprintln!("--proj needs three indices");
                return exit_code::CONFIG_ERROR;
            }
            scenario.checks.clear();
            scenario.exports = vec![ExportConfig {
                format: format.clone(),
                projection: [projection[0], projection[1], projection[2]],
            }];
        }
        Commands::Presets => unreachable!(),
    }
    let dir = out_dir(cli, &scenario);
    match run(&scenario, &dir, cli.deterministic) {
        Ok(output) => {
            for r in &output.reports {
                println!("{}", r.summary_line());
            }
            println!(
                "manifest: {} ({})",
                output.out_dir.join("manifest.json").display(),
                if output.manifest.pass { "pass" } else { "FAIL" }
            );
            if output.manifest.pass {
                exit_code::OK
            } else {
                exit_code::CHECK_FAILURE
            }
        }
        Err(hulllab::runner::RunError::Config(m)) => {
            eprintln!("config error: {m}");
            exit_code::CONFIG_ERROR
        }
        Err(hulllab::runner::RunError::Io(e)) => {
            eprintln!("io error: {e}");
            exit_code::IO_ERROR
        }
    }
}
