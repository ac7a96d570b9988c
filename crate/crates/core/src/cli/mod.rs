//! Batch experiment runner: reads a configuration, runs it and writes
//! `results.csv`, `manifest.txt`, `plotdata.tsv` (survival-type runs) or
//! `error.json` (failures) into the output directory.

pub mod config;
pub mod output;
pub mod run;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use serde::Serialize;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind, FieldError, Overrides};
pub use output::{emit_plot_data, results_csv};
pub use run::{run_experiment, PlotGroup, Results, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, Parser)]
#[command(name = "levy-passage", version, about = "Survival-exponent experiments for Lévy processes")]
pub struct Args {
    /// Experiment configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "./out")]
    pub out: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `run.threads`.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Print nothing on success.
    #[arg(long)]
    pub quiet: bool,
}

/// Machine-readable failure record written to `error.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub exit_code: i32,
    pub category: &'static str,
    pub errors: Vec<FieldError>,
}

impl ErrorRecord {
    fn config(e: ConfigError) -> Self {
        Self { exit_code: EXIT_CONFIG, category: "config", errors: e.errors }
    }

    fn runtime(field: &str, message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_RUNTIME,
            category: "runtime",
            errors: vec![FieldError { field: field.into(), message: message.into() }],
        }
    }
}

/// Files produced by a successful run, as text.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub csv: String,
    pub manifest: String,
    pub plot: Option<String>,
    pub summary: Vec<String>,
}

/// Parses, runs and renders one experiment without touching the disk.
pub fn execute_text(config_text: &str, overrides: Overrides) -> Result<Outputs, ErrorRecord> {
    let cfg = ExperimentConfig::parse(config_text, overrides).map_err(ErrorRecord::config)?;
    let start = Instant::now();
    let results = run_experiment(&cfg).map_err(|e| ErrorRecord::runtime("run", e.to_string()))?;
    let plot = match cfg.kind {
        ExperimentKind::Survival | ExperimentKind::Exponent | ExperimentKind::DiscreteSurvival => {
            Some(emit_plot_data(&results.plot).map_err(|e| ErrorRecord {
                exit_code: EXIT_CONFIG,
                ..ErrorRecord::runtime("plotdata", e.to_string())
            })?)
        }
        _ => None,
    };
    Ok(Outputs {
        csv: results_csv(&results.rows),
        manifest: output::manifest(&cfg.to_text(), start.elapsed().as_secs_f64(), &results.summary),
        plot,
        summary: results.summary,
    })
}

fn write_outputs(dir: &Path, out: &Outputs) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("results.csv"), &out.csv)?;
    std::fs::write(dir.join("manifest.txt"), &out.manifest)?;
    if let Some(p) = &out.plot {
        std::fs::write(dir.join("plotdata.tsv"), p)?;
    }
    Ok(())
}

fn report_error(dir: &Path, rec: &ErrorRecord) {
    for e in &rec.errors {
        eprintln!("error: {}: {}", e.field, e.message);
    }
    let json = serde_json::to_string_pretty(rec).expect("error record serializes");
    if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join("error.json"), json + "\n")) {
        eprintln!("error: cannot write error.json: {e}");
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with(args: &Args) -> i32 {
    let overrides = Overrides { seed: args.seed, threads: args.threads };
    let result = std::fs::read_to_string(&args.config)
        .map_err(|e| ErrorRecord {
            exit_code: EXIT_CONFIG,
            category: "config",
            errors: vec![FieldError { field: "--config".into(), message: format!("{}: {e}", args.config.display()) }],
        })
        .and_then(|text| execute_text(&text, overrides))
        .and_then(|out| {
            write_outputs(&args.out, &out).map_err(|e| ErrorRecord::runtime("--out", e.to_string()))?;
            Ok(out)
        });
    match result {
        Ok(out) => {
            let _ = std::fs::remove_file(args.out.join("error.json"));
            if !args.quiet {
                for line in &out.summary {
                    println!("{line}");
                }
                println!("wrote {}", args.out.display());
            }
            EXIT_OK
        }
        Err(rec) => {
            report_error(&args.out, &rec);
            rec.exit_code
        }
    }
}
