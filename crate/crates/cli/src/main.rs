use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chanwit::OptimizerConfig;
use chanwit_cli::{
    analyze_state, classify_channel, geometry_report, witness_report, CliError, CliResult, FlipFactors,
    Options, Report,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chanwit", version, about = "Witness analysis of bipartite states and quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optimizer restarts for numerical bounds.
    #[arg(long, global = true, default_value_t = 32)]
    restarts: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory for the report and any data files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Margin an expectation value must clear before a verdict flag is raised.
    #[arg(long, global = true, default_value_t = chanwit::witness::VERDICT_EPS)]
    tolerance: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Schmidt data, geometry and self-witness bounds of a pure state, or
    /// unitality, PPT and a witness verdict for a density matrix.
    AnalyzeState {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        observable: Option<PathBuf>,
    },
    /// Which of the random-unitary and random-projective descriptions a
    /// channel's Choi state rules out.
    ClassifyChannel {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        observable: Option<PathBuf>,
    },
    /// Bounds of an observable and, given a state, the verdict.
    Witness {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        state: Option<PathBuf>,
        /// Factor A of a flip-type observable (A (x) B) F (A (x) B)^dagger.
        #[arg(long, requires = "flip_b")]
        flip_a: Option<PathBuf>,
        #[arg(long, requires = "flip_a")]
        flip_b: Option<PathBuf>,
    },
    /// Witness surfaces over Schmidt vectors (d = 2, 3) or a norms table.
    Geometry {
        #[arg(long = "dim")]
        d: usize,
        #[arg(long, default_value_t = 16)]
        resolution: usize,
    },
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_opt(path: &Option<PathBuf>) -> CliResult<Option<String>> {
    path.as_deref().map(read).transpose()
}

fn write(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(dir.join(name), contents))
        .map_err(|e| CliError::Input(format!("cannot write to {}: {e}", dir.display())))
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if cli.tolerance.is_nan() || cli.tolerance < 0.0 {
        return Err(CliError::Input("tolerance must be non-negative".into()));
    }
    let opts = Options {
        optimizer: OptimizerConfig {
            seed: cli.seed,
            restarts: cli.restarts,
            ..OptimizerConfig::default()
        },
        tolerance: cli.tolerance,
    };
    let (mut report, files) = match &cli.command {
        Command::AnalyzeState { input, observable } => {
            (analyze_state(&read(input)?, read_opt(observable)?.as_deref(), &opts)?, vec![])
        }
        Command::ClassifyChannel { input, observable } => {
            (classify_channel(&read(input)?, read_opt(observable)?.as_deref(), &opts)?, vec![])
        }
        Command::Witness { observable, state, flip_a, flip_b } => {
            let (a, b) = (read_opt(flip_a)?, read_opt(flip_b)?);
            let flip = a.as_deref().zip(b.as_deref()).map(|(a, b)| FlipFactors { a, b });
            (witness_report(&read(observable)?, read_opt(state)?.as_deref(), flip, &opts)?, vec![])
        }
        Command::Geometry { d, resolution } => {
            let out = geometry_report(*d, *resolution, cli.format == Format::Csv)?;
            (out.report, out.files)
        }
    };
    if cli.out.is_none() && cli.format == Format::Json {
        for (_, contents) in &files {
            let data: serde_json::Value = serde_json::from_str(contents).expect("generated JSON");
            report.results["data"] = data;
        }
    }
    let text = render(&report, cli.format);
    match &cli.out {
        Some(dir) => {
            let ext = if cli.format == Format::Csv { "csv" } else { "json" };
            write(dir, &format!("report.{ext}"), &text)?;
            for (name, contents) in &files {
                write(dir, name, contents)?;
            }
            print!("{text}");
        }
        None if cli.format == Format::Csv && !files.is_empty() => {
            files.iter().for_each(|(_, contents)| print!("{contents}"));
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
