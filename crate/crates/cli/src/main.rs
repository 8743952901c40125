use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use hocd::{CentralityMeasure, DetectionReport, Error, IdMode, PipelineOptions, Verdict};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;
const EXIT_SUSPECT: u8 = 5;

#[derive(Parser)]
#[command(name = "hocd", version, about = "Hierarchical overlapping community detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the detection pipeline on an edge-list file.
    Detect(DetectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Centrality {
    Degree,
    Eigenvector,
}

#[derive(clap::Args)]
struct DetectArgs {
    /// Edge list, one `u v` pair per line. Relative paths are looked up in
    /// HOCD_DATA_DIR when it is set.
    #[arg(long)]
    input: PathBuf,

    #[arg(long, value_enum, default_value = "degree")]
    centrality: Centrality,

    /// Stop label propagation after this many steps.
    #[arg(long)]
    tmax: Option<u32>,

    /// Compare against size-matched random graphs.
    #[arg(long)]
    falsify: bool,

    #[arg(long, default_value_t = hocd::falsify::DEFAULT_REPLICATES)]
    replicates: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Exit with a distinct code when the verdict is suspect.
    #[arg(long)]
    strict: bool,

    /// Where to write the JSON report; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Where to write the per-level curves as CSV.
    #[arg(long)]
    curves: Option<PathBuf>,

    /// Where to write the cumulative propagation timing as CSV.
    #[arg(long)]
    timing_csv: Option<PathBuf>,

    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,

    /// Compute hub distances while propagation runs.
    #[arg(long)]
    overlap: bool,

    /// Add the propagation timing normalised to the unit square.
    #[arg(long)]
    normalize_timing: bool,

    /// Treat node ids as opaque strings instead of integers.
    #[arg(long)]
    string_ids: bool,

    /// Name recorded in the report; defaults to the file name.
    #[arg(long)]
    name: Option<String>,
}

fn resolve_input(input: &Path, data_dir: Option<&Path>) -> PathBuf {
    match data_dir {
        Some(dir) if input.is_relative() && !input.exists() => dir.join(input),
        _ => input.to_path_buf(),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Parse { .. }) => EXIT_PARSE,
        Some(Error::EmptyGraph | Error::NoHubs | Error::EmptyHierarchy) => EXIT_DEGENERATE,
        _ => EXIT_FAILURE,
    }
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn detect(args: &DetectArgs) -> anyhow::Result<DetectionReport> {
    let data_dir = std::env::var_os("HOCD_DATA_DIR").map(PathBuf::from);
    let input = resolve_input(&args.input, data_dir.as_deref());
    let opts = PipelineOptions {
        centrality: match args.centrality {
            Centrality::Degree => CentralityMeasure::Degree,
            Centrality::Eigenvector => CentralityMeasure::Eigenvector,
        },
        t_max: args.tmax,
        id_mode: if args.string_ids { IdMode::Text } else { IdMode::Numeric },
        falsify: args.falsify,
        replicates: args.replicates,
        seed: args.seed,
        overlap_steps: args.overlap,
        normalize_timing: args.normalize_timing,
        network_name: args.name.clone(),
    };
    let run = || hocd::run_pipeline(&input, &opts);
    let report = match args.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .context("starting worker pool")?
            .install(run)?,
        None => run()?,
    };

    let json = report.to_json()?;
    match &args.out {
        Some(path) => write(path, &json)?,
        None => println!("{json}"),
    }
    if let Some(path) = &args.curves {
        write(path, &report.curves_csv())?;
    }
    if let Some(path) = &args.timing_csv {
        write(path, &report.timing_csv())?;
    }
    Ok(report)
}

fn summary(r: &DetectionReport) -> String {
    let phi = match r.phi.applicable_value() {
        Some(v) => format!("{v:.3}"),
        None => "n/a".into(),
    };
    let mut line = format!(
        "{}: N={} E={} hubs={} t_fin={} m_h={:.3} m_x={:.3} phi={}",
        r.network_name, r.nodes, r.edges, r.roles.hub, r.t_fin, r.m_h, r.m_x, phi
    );
    if let Some(v) = &r.falsifiability {
        line += &format!(" verdict={:?}", v.verdict);
    }
    line
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Detect(args) = cli.command;
    match detect(&args) {
        Ok(report) => {
            eprintln!("{}", summary(&report));
            let suspect = report
                .falsifiability
                .as_ref()
                .is_some_and(|v| v.verdict == Verdict::Suspect);
            if args.strict && suspect {
                ExitCode::from(EXIT_SUSPECT)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            // library errors already carry their cause in the message
            match err.downcast_ref::<Error>() {
                Some(e) => eprintln!("error: {e}"),
                None => eprintln!("error: {err:#}"),
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
