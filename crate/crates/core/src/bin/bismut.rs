use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bismut::models::{ModelSpec, Variant};
use bismut::report::{run_job, JobError, JobKind, JobSpec, Window};

#[derive(Parser)]
#[command(name = "bismut", version, about = "Verify Hermitian structures with torsion and report JSON")]
struct Cli {
    /// Print the shipped model names and exit.
    #[arg(long)]
    list_models: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise SKT/CYT/BTP/BKL checks on a chart model.
    Verify {
        model: String,
        #[command(flatten)]
        common: Common,
    },
    /// Generalized Kähler checks on a ± pair sharing one metric.
    Gk {
        model: String,
        #[command(flatten)]
        common: Common,
    },
    /// Exact checks on a Lie algebra file.
    Lie {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Mapping-torus cohomology from a job file.
    Cohomology {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// E₂ dimensions from a file of base and fiber Hodge tables.
    Borel {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Integral of the torsion over 3-spheres, with the Kähler control.
    SphereIntegral {
        #[command(flatten)]
        common: Common,
    },
    /// Run a TOML job description.
    Run {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a threshold, e.g. `--tol SKT=1e-9`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Declare a check as expected to fail (replaces the model defaults).
    #[arg(long = "expect-fail", value_name = "NAME")]
    expect_fail: Vec<String>,
    #[arg(long)]
    variant: Option<Variant>,
    /// Index window `p0..p1,q0..q1`.
    #[arg(long)]
    window: Option<Window>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the timing block out of the report.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn spec(&self, kind: JobKind, target: Option<String>) -> Result<JobSpec, JobError> {
        let mut spec = JobSpec::new(kind);
        spec.target = target;
        spec.variant = self.variant;
        if let Some(p) = self.points {
            spec.points = p;
        } else if kind == JobKind::SphereIntegral {
            spec.points = 5;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        for t in &self.tol {
            let (name, value) = t
                .split_once('=')
                .ok_or_else(|| JobError::input("--tol", format!("`{t}` is not NAME=VALUE")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| JobError::input(format!("--tol {name}"), format!("`{value}` is not a number")))?;
            spec.tolerances.insert(name.to_uppercase(), value);
        }
        if !self.expect_fail.is_empty() {
            spec.expected_fail = Some(self.expect_fail.iter().map(|s| s.to_uppercase()).collect());
        }
        spec.window = self.window;
        Ok(spec)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_models {
        for name in ModelSpec::NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("no subcommand given; see --help");
        return ExitCode::from(2);
    };
    match execute(command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<u8, JobError> {
    let path = |p: PathBuf| Some(p.display().to_string());
    let (spec, out, no_timing) = match command {
        Command::Verify { model, common } => (common.spec(JobKind::VerifyModel, Some(model))?, common.out, common.no_timing),
        Command::Gk { model, common } => (common.spec(JobKind::GkCheck, Some(model))?, common.out, common.no_timing),
        Command::Lie { file, common } => (common.spec(JobKind::LieAlgebra, path(file))?, common.out, common.no_timing),
        Command::Cohomology { file, common } => (common.spec(JobKind::Cohomology, path(file))?, common.out, common.no_timing),
        Command::Borel { file, common } => (common.spec(JobKind::BorelE2, path(file))?, common.out, common.no_timing),
        Command::SphereIntegral { common } => (common.spec(JobKind::SphereIntegral, None)?, common.out, common.no_timing),
        Command::Run { file, out, no_timing } => {
            let text = std::fs::read_to_string(&file).map_err(|e| JobError::input(file.display().to_string(), e.to_string()))?;
            let mut spec = JobSpec::parse(&text)?;
            // relative file targets resolve against the job file
            if matches!(spec.kind, JobKind::LieAlgebra | JobKind::Cohomology | JobKind::BorelE2) {
                if let (Some(t), Some(dir)) = (&spec.target, file.parent()) {
                    if PathBuf::from(t).is_relative() {
                        spec.target = Some(dir.join(t).display().to_string());
                    }
                }
            }
            (spec, out, no_timing)
        }
    };
    let report = run_job(&spec)?;
    let text = report.to_json(!no_timing);
    match out {
        Some(path) => {
            std::fs::write(&path, text + "\n").map_err(|e| JobError::input("--out", format!("{}: {e}", path.display())))?
        }
        None => {
            // a closed pipe downstream is not an error of the job
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
    }
    Ok(report.exit_code() as u8)
}
