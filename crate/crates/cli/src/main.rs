//! `rigidity`: run a comparison-geometry scenario and print its report.
//!
//! Exit codes: 0 all checks pass, 1 an inequality is violated, 2 invalid
//! input, 3 only hypotheses are unmet.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rigidity_core::report::{emit_table, run_scenario, Command, OutputFormat, ScenarioConfig, EXIT_INVALID};

#[derive(Parser)]
#[command(name = "rigidity", version, about = "Curvature, volume comparison and rigidity checks for warped metrics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate f_a, λ_a, A_a and V_a of a space form.
    ModelTable(Opts),
    /// Curvatures of a profile with the finite-difference and Gauss equation checks.
    Curvature(Opts),
    /// Extract the curvature band and run the comparison chain.
    PinchVerify(Opts),
    /// Randomized check of the plane-operator eigenvalue bounds.
    Lemma1Fuzz(Opts),
    /// Build and verify the nonnegatively curved counterexample.
    Counterexample(Opts),
    /// Classify a pinch function against the decay conditions.
    RigidityClassify(Opts),
    /// Local rigidity on a ball: K <= a inside, K = a on the boundary.
    TheoremB(Opts),
}

#[derive(Args)]
struct Opts {
    /// File of `key = value` lines; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    output: Option<String>,
    /// euclid, sphere|sin, hyperbolic|sinh, model:<a>, perturbed:<base>:<eps>:<beta>.
    #[arg(long)]
    profile: Option<String>,
    /// Manifold dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Curvature bound of the comparison model.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    grid: Option<usize>,
    /// Outer radius of the grid.
    #[arg(long)]
    r_max: Option<f64>,
    /// Tolerance of the identity and equality checks.
    #[arg(long)]
    tol: Option<f64>,
    /// RNG seed for lemma1-fuzz.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest operator dimension for lemma1-fuzz.
    #[arg(long)]
    n_max: Option<usize>,
    /// Number of lemma1-fuzz trials.
    #[arg(long)]
    trials: Option<usize>,
    /// zero, exp:<c>:<alpha> or power:<c>:<p>.
    #[arg(long)]
    pinch: Option<String>,
    /// A or 1.
    #[arg(long)]
    theorem: Option<String>,
    /// Ball radius for theorem-b.
    #[arg(long)]
    radius: Option<f64>,
    /// Bridge half-width for counterexample.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Dump the counterexample profile table.
    #[arg(long)]
    dump: bool,
}

impl Opts {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut p = Vec::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                p.push((k, v));
            }
        };
        put("output", self.output.clone());
        put("profile", self.profile.clone());
        put("n", self.n.map(|v| v.to_string()));
        put("a", self.a.map(|v| v.to_string()));
        put("grid", self.grid.map(|v| v.to_string()));
        put("r-max", self.r_max.map(|v| v.to_string()));
        put("tol", self.tol.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("n-max", self.n_max.map(|v| v.to_string()));
        put("trials", self.trials.map(|v| v.to_string()));
        put("pinch", self.pinch.clone());
        put("theorem", self.theorem.clone());
        put("radius", self.radius.map(|v| v.to_string()));
        put("epsilon", self.epsilon.map(|v| v.to_string()));
        put("dump", self.dump.then(|| "true".to_string()));
        p
    }
}

fn split(cmd: Cmd) -> (Command, Opts) {
    match cmd {
        Cmd::ModelTable(o) => (Command::ModelTable, o),
        Cmd::Curvature(o) => (Command::Curvature, o),
        Cmd::PinchVerify(o) => (Command::PinchVerify, o),
        Cmd::Lemma1Fuzz(o) => (Command::Lemma1Fuzz, o),
        Cmd::Counterexample(o) => (Command::Counterexample, o),
        Cmd::RigidityClassify(o) => (Command::RigidityClassify, o),
        Cmd::TheoremB(o) => (Command::TheoremB, o),
    }
}

fn config(command: Command, opts: &Opts) -> Result<ScenarioConfig, String> {
    let mut cfg = ScenarioConfig::new(command);
    if let Some(path) = &opts.config {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_file(&text).map_err(|e| e.to_string())?;
    }
    for (k, v) in opts.pairs() {
        cfg.set(k, &v).map_err(|e| e.to_string())?;
    }
    Ok(cfg)
}

fn run(command: Command, opts: &Opts) -> Result<i32, String> {
    let cfg = config(command, opts)?;
    let report = run_scenario(&cfg).map_err(|e| e.to_string())?;
    let format: OutputFormat = cfg.output;
    match &opts.out {
        Some(path) => {
            let mut file = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            emit_table(&report, format, &mut file).map_err(|e| e.to_string())?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            emit_table(&report, format, &mut stdout).map_err(|e| e.to_string())?;
            stdout.flush().map_err(|e| e.to_string())?;
        }
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = split(cli.command);
    match run(command, &opts) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("rigidity {command}: {msg}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
