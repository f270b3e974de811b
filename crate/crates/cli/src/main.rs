use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hitq_core::{Command, Error, Format, JobSpec, MInterpretation, Settings, Template, WeightVector, Workbench};

#[derive(Parser)]
#[command(name = "hitq", version, about = "Cohit dimensions, admissible bases and reductions")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Dimension of the cohits in one degree.
    Dim(JobArgs),
    /// Admissible monomial basis.
    Basis(JobArgs),
    /// Dimensions of one weight block.
    Omega(JobArgs),
    /// Split into the zero part and the positive part.
    Split(JobArgs),
    /// Kameko image, kernel accounting and induced classes; `-n` is the source degree d.
    Kameko(JobArgs),
    /// Reduction plan.
    Plan(JobArgs),
    /// General linear invariants and transfer comparison.
    Invariants(JobArgs),
    /// Dimensions over a degree range.
    Table(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    #[arg(short)]
    k: usize,
    #[arg(short)]
    n: Option<u64>,
    #[arg(long, value_parser = parse_omega)]
    omega: Option<WeightVector>,
    /// `a=A,b=B`, the degree A(2^S - 1) + 2^S B.
    #[arg(long, value_parser = parse_template, requires = "s")]
    template: Option<(u64, u64)>,
    #[arg(long, requires = "template")]
    s: Option<u32>,
    #[arg(long)]
    from: Option<u64>,
    #[arg(long)]
    to: Option<u64>,
    #[arg(long, env = "HITQ_CACHE")]
    cache_dir: Option<PathBuf>,
    /// Memory cap in GiB.
    #[arg(long, default_value_t = 8.0)]
    mem_cap: f64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: Format,
    #[arg(long, default_value = "set", value_parser = parse_interpretation)]
    m_interpretation: MInterpretation,
    #[arg(long)]
    ext_data: Option<PathBuf>,
}

fn parse_omega(s: &str) -> Result<WeightVector, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_interpretation(s: &str) -> Result<MInterpretation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_template(s: &str) -> Result<(u64, u64), String> {
    let (mut a, mut b) = (None, None);
    for part in s.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got {part:?}"))?;
        let value: u64 = value.trim().parse().map_err(|e| format!("{key}: {e}"))?;
        match key.trim() {
            "a" => a = Some(value),
            "b" => b = Some(value),
            other => return Err(format!("unknown template key {other:?}")),
        }
    }
    Ok((a.ok_or("template needs a")?, b.ok_or("template needs b")?))
}

fn job_of(command: Command, args: &JobArgs) -> JobSpec {
    JobSpec {
        n: args.n,
        omega: args.omega.clone(),
        template: args.template.zip(args.s).map(|((a, b), s)| Template { a, b, s }),
        range: match (args.from, args.to) {
            (None, None) => None,
            (from, to) => Some((from.unwrap_or(0), to.unwrap_or(from.unwrap_or(0)))),
        },
        interpretation: args.m_interpretation,
        ext_data: args.ext_data.clone(),
        ..JobSpec::new(command, args.k)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::LengthMismatch { .. } | Error::Precondition(_) => 2,
        Error::ResourceLimit(_) => 3,
        Error::CorruptCache(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Sub::Dim(a) => (Command::Dim, a),
        Sub::Basis(a) => (Command::Basis, a),
        Sub::Omega(a) => (Command::Omega, a),
        Sub::Split(a) => (Command::Split, a),
        Sub::Kameko(a) => (Command::Kameko, a),
        Sub::Plan(a) => (Command::Plan, a),
        Sub::Invariants(a) => (Command::Invariants, a),
        Sub::Table(a) => (Command::Table, a),
    };
    if !(args.mem_cap > 0.0) {
        eprintln!("error: --mem-cap must be positive");
        return ExitCode::from(2);
    }
    let settings = Settings {
        cache_dir: args.cache_dir.clone(),
        mem_cap: (args.mem_cap * (1u64 << 30) as f64) as u64,
        jobs: args.jobs.max(1),
    };
    let job = job_of(command, args);
    let mut bench = Workbench::new(settings);
    let result = bench.run(&job).and_then(|rec| Ok((hitq_core::workbench::render(&rec.output, args.format)?, rec)));
    match result {
        Ok((text, rec)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            eprintln!("wall {} ms, cache hits {}", rec.wall_ms, rec.cache_hits);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
