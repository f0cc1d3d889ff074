use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use monoslicer::graph::{build_graph, export_dot};
use monoslicer::pipeline::{load_model, run_pipeline, PipelineError};
use monoslicer::{partition_tables, render, Format};

#[derive(Parser)]
#[command(version, about = "Find microservice candidates in a monolith's fact model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis and print one report per subsystem.
    Analyze {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        areas: PathBuf,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(long, env = "MONOSLICER_CONFIG")]
        config: Option<PathBuf>,
        /// Restrict the analysis to these subsystems (repeatable).
        #[arg(long = "subsystem")]
        subsystems: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Directory receiving one DOT file per reported subsystem.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Command::Analyze {
        model,
        areas,
        annotations,
        config,
        subsystems,
        format,
        dot,
    } = Cli::parse().command;

    let reports = match run_pipeline(&model, &areas, annotations.as_deref(), config.as_deref(), &subsystems) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };

    if let Some(dir) = dot {
        if let Err(e) = write_dot(&dir, &model, &areas, reports.iter().map(|r| r.subsystem.as_str())) {
            return fail(&e);
        }
    }

    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(&render(&reports, format)).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn write_dot<'a>(
    dir: &Path,
    model_path: &Path,
    areas_path: &Path,
    subsystems: impl Iterator<Item = &'a str>,
) -> Result<(), PipelineError> {
    let io = |source| PipelineError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let (model, areas) = load_model(model_path, areas_path)?;
    let partition = partition_tables(&model, &areas);
    let graph = build_graph(&model);
    std::fs::create_dir_all(dir).map_err(io)?;
    for ss in subsystems {
        let dot = export_dot(&graph, Some((&partition, ss)))?;
        std::fs::write(dir.join(format!("{ss}.dot")), dot).map_err(io)?;
    }
    Ok(())
}

fn fail(err: &PipelineError) -> ExitCode {
    eprintln!("error: {err}");
    if let PipelineError::Validation(report) = err {
        for v in &report.violations {
            eprintln!("  {:?}: {}", v.code, v.message);
        }
    }
    ExitCode::from(err.exit_code() as u8)
}
