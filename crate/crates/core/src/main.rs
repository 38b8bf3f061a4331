use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use anticyclo::evaluate::report::Tolerances;
use anticyclo::evaluate::RingCharacter;
use anticyclo::pipeline::verify::verify;
use anticyclo::pipeline::{parse_characters, Mode, Pipeline, RunConfig};
use anticyclo::{Error, Result};

#[derive(Parser)]
#[command(name = "anticyclo", version, about = "Anticyclotomic theta elements and L-values at an additive prime")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify E at p and describe the quaternionic setting.
    Analyze(Common),
    /// Print theta_n and L_n in the group ring.
    Theta {
        #[command(flatten)]
        common: Common,
        /// Level (defaults to --nmax).
        #[arg(long)]
        n: Option<u32>,
    },
    /// Evaluate characters on theta_n and L_n.
    Eval(Common),
    /// Run the invariant suite.
    Verify(Common),
    /// Compare chi(L) with L(E, chi, 1) over a list of characters.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct Common {
    /// Weierstrass coefficients a1,a2,a3,a4,a6.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    curve: Vec<i64>,
    #[arg(long)]
    p: u64,
    /// Fundamental discriminant of K.
    #[arg(long, allow_hyphen_values = true)]
    disc: i64,
    #[arg(long, default_value_t = 1)]
    c: i64,
    #[arg(long, default_value_t = 2)]
    nmax: u32,
    /// p-adic precision N (values live in Z/p^N).
    #[arg(long, default_value_t = 20)]
    prec: u32,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    /// JSON list of characters, each {"n": level, "k": exponents}.
    #[arg(long)]
    chars: Option<PathBuf>,
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Ratio tolerance; the oracle runs at a tenth of it.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Bound for the Hecke eigenvalues used to cut out g.
    #[arg(long, default_value_t = 50)]
    eig_bound: u64,
    /// Choice of prime above p for the embedding of Q(zeta_d).
    #[arg(long, default_value_t = 1)]
    prime_choice: u64,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let curve: [i64; 5] = self
            .curve
            .clone()
            .try_into()
            .map_err(|_| Error::InvalidInput("--curve needs five coefficients".into()))?;
        let mut cfg = RunConfig::new(curve, self.p, self.disc);
        cfg.c = self.c;
        cfg.n_max = self.nmax;
        cfg.prec = self.prec;
        cfg.mode = self.mode;
        cfg.cache = self.cache.clone();
        cfg.tol = Tolerances { ratio: self.tol, oracle: self.tol / 10.0, ..Tolerances::default() };
        cfg.eig_bound = self.eig_bound;
        cfg.prime_choice = self.prime_choice;
        cfg.seed = self.seed;
        Ok(cfg)
    }

    fn characters(&self) -> Result<Option<Vec<RingCharacter>>> {
        match &self.chars {
            Some(path) => Ok(Some(parse_characters(&std::fs::read_to_string(path)?)?)),
            None => Ok(None),
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze(c) => {
            let pl = Pipeline::build(&c.config()?).map_err(|e| stage("analyze", e))?;
            json(&pl.analysis())?;
            Ok(0)
        }
        Command::Theta { common, n } => {
            let pl = Pipeline::build(&common.config()?).map_err(|e| stage("build", e))?;
            json(&pl.theta_output(n.unwrap_or(common.nmax)).map_err(|e| stage("theta", e))?)?;
            Ok(0)
        }
        Command::Eval(c) => {
            let pl = Pipeline::build(&c.config()?).map_err(|e| stage("build", e))?;
            let chars = c.characters()?.unwrap_or_else(|| pl.all_characters());
            let out = pl.eval(&chars).map_err(|e| stage("eval", e))?;
            json(&out)?;
            Ok(if out.iter().all(|o| o.factorization.holds && o.factorization.symmetric) { 0 } else { 3 })
        }
        Command::Verify(c) => {
            let pl = Pipeline::build(&c.config()?).map_err(|e| stage("build", e))?;
            let rep = verify(&pl);
            json(&rep)?;
            Ok(if rep.pass { 0 } else { 3 })
        }
        Command::Report { common, format } => {
            let pl = Pipeline::build(&common.config()?).map_err(|e| stage("build", e))?;
            let chars = match common.characters()? {
                Some(c) => c,
                None => pl.default_report_characters()?,
            };
            let rep = pl.report(&chars).map_err(|e| stage("report", e))?;
            match format {
                Format::Json => json(&rep)?,
                Format::Table => print!("{}", rep.to_table()),
            }
            Ok(if rep.pass {
                0
            } else if rep.rows.iter().any(|r| r.oracle_error.is_some()) {
                4
            } else {
                3
            })
        }
    }
}

fn stage(name: &str, e: Error) -> Error {
    let tag = |s: String| format!("[{name}] {s}");
    match e {
        Error::Hypothesis(s) => Error::Hypothesis(tag(s)),
        Error::Verification(s) => Error::Verification(tag(s)),
        Error::OracleNonConvergence(s) => Error::OracleNonConvergence(tag(s)),
        Error::InvalidInput(s) => Error::InvalidInput(tag(s)),
        Error::Unsupported(s) => Error::Unsupported(tag(s)),
        Error::Cache(s) => Error::Cache(tag(s)),
        Error::Io(s) => Error::Io(tag(s)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
