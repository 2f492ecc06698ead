//! Batch command-line front end.
//!
//! Every command prints tab-separated rows with a header; floats use six
//! decimals and exact rationals print as `p/q`.

pub mod config;
pub mod parse;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;

use crate::dynsys::{DynamicalSystem, Point};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::extension::{classify_ext, lift_point, verify_transfer, Property};
use crate::norms::{semicrossed_norm, witness_family};
use crate::repr::{rep_matrix, RepSpec};
use crate::verify::{self, Check, Corpus, Row};

pub use config::{parse_config, Config, ElementSpec};
pub use parse::{parse_chooser, parse_element, parse_point, parse_rep_spec, parse_scalar};

/// Exit code when every row passes.
pub const EXIT_OK: i32 = 0;
/// Exit code when some check row fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for malformed input or a hard error.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "semicrossed", version, about = "Natural extensions, semicrossed products and certified norms")]
pub struct Cli {
    /// Config file; the doubling map with default budgets when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest orbit truncation.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Number of `λ` grid points per periodic orbit.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Bilateral window half-width.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Output file (standard output by default).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Stop at the first failing row.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Periodicity class of a point.
    Classify { point: String },
    /// Lift a point to the extension with a preimage chooser.
    Lift { point: String, chooser: String },
    /// Dynamical properties of the system and of its extension.
    Properties,
    /// Representation matrix of an element.
    Repmat {
        /// A rep name from the config or an inline spec such as `orbit:1/3:8`.
        spec: String,
        /// An element name from the config or an inline expression.
        element: String,
    },
    /// Certified bracket for the semicrossed norm of an element.
    Norm {
        element: String,
        /// Also print the convergence traces.
        #[arg(long)]
        traces: bool,
    },
    /// Run a numerical check (or `all`) and print pass/fail rows.
    Verify { check: String },
}

/// Text produced by a command and its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

fn lookup_element(cfg: &Config, name: &str) -> Result<Element> {
    match cfg.elements.get(name) {
        Some(spec) => Ok(spec.element.clone()),
        None => parse_element(&cfg.system, name),
    }
}

fn lookup_rep(cfg: &Config, name: &str) -> Result<RepSpec> {
    match cfg.reps.get(name) {
        Some(spec) => Ok(spec.clone()),
        None => parse_rep_spec(&cfg.system, name),
    }
}

fn classify_steps(x: &Point) -> usize {
    match x {
        // p/q has at most q distinct images.
        Point::Rational(r) => r.denom().to_usize().map_or(usize::MAX, |q| q + 1).max(64),
        _ => 4096,
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Cycle structure of a permutation: (single cycle, every point periodic).
fn permutation_properties(perm: &[usize]) -> [bool; 4] {
    let mut x = 0;
    let mut len = 0;
    loop {
        x = perm[x];
        len += 1;
        if x == 0 {
            break;
        }
    }
    let one_cycle = len == perm.len();
    [one_cycle, true, one_cycle, true]
}

fn properties(sys: &DynamicalSystem) -> Result<String> {
    let mut out = String::from("property\tbase\textension\tsource\n");
    match sys {
        DynamicalSystem::Sft(_) => {
            for p in Property::ALL {
                let (base, ext) = verify_transfer(sys, p)?;
                writeln!(out, "{}\t{}\t{}\tcomputed", p.name(), flag(base), flag(ext)).unwrap();
            }
        }
        DynamicalSystem::Permutation(perm) => {
            // A permutation is its own extension.
            for (p, v) in Property::ALL.iter().zip(permutation_properties(perm)) {
                writeln!(out, "{}\t{}\t{}\tcomputed", p.name(), flag(v), flag(v)).unwrap();
            }
        }
        DynamicalSystem::CircleTimesK { .. } => {
            // ×k is mixing with dense periodic points and a fixed point at 0.
            for (p, v) in Property::ALL.iter().zip([true, true, false, true]) {
                writeln!(out, "{}\t{}\t{}\tknown", p.name(), flag(v), flag(v)).unwrap();
            }
        }
    }
    Ok(out)
}

fn norm(cfg: &Config, element: &str, traces: bool) -> Result<String> {
    let f = lookup_element(cfg, element)?;
    let est = semicrossed_norm(&cfg.system, &f, &cfg.budget)?;
    let b = &est.bracket;
    let mut out = format!(
        "lower\t{:.6}\tupper\t{:.6}\twitness\t{}\tbudget\t{}\n",
        b.lower,
        b.upper,
        witness_family(&est),
        cfg.budget.describe()
    );
    if traces {
        out.push('\n');
        out.push_str(&est.traces_tsv());
    }
    Ok(out)
}

fn run_verify(cfg: &Config, name: &str, strict: bool) -> Result<Outcome> {
    let checks = Check::parse(name).ok_or_else(|| Error::BadInput(format!("unknown check {name:?}")))?;
    let mut corpus = Corpus::new(cfg.system.clone(), cfg.budget.clone())?;
    corpus.tol = cfg.tolerances.clone();
    corpus.cases = cfg.cases;
    corpus.elements.extend(cfg.elements.iter().map(|(n, s)| (n.clone(), s.element.clone())));
    let mut out = format!("{}\n", Row::header());
    let mut code = EXIT_OK;
    for check in checks {
        let rows = match verify::run(check, &corpus) {
            Ok(rows) => rows,
            Err(e) => {
                writeln!(out, "{}\t-\terror\t{e}\terror", check.name()).unwrap();
                return Ok(Outcome { code: EXIT_ERROR, output: out });
            }
        };
        for row in rows {
            writeln!(out, "{}", row.to_tsv()).unwrap();
            if !row.pass {
                code = EXIT_FAIL;
                if strict {
                    return Ok(Outcome { code, output: out });
                }
            }
        }
    }
    Ok(Outcome { code, output: out })
}

/// Runs one command against a parsed config.
pub fn run_command(cfg: &Config, command: &Command, strict: bool) -> Result<Outcome> {
    let sys = &cfg.system;
    let output = match command {
        Command::Classify { point } => {
            let x = parse_point(sys, point)?;
            let class = sys.classify(&x, classify_steps(&x))?;
            format!("point\tclass\tperiod\tpreperiod\n{x}\t{class}\n")
        }
        Command::Lift { point, chooser } => {
            let x = parse_point(sys, point)?;
            let chooser = parse_chooser(chooser)?;
            let lift = lift_point(sys, &x, chooser.clone())?;
            let class = classify_ext(sys, &lift, 128)?;
            format!("point\tchooser\tlift\tclass\tperiod\tsteps\n{x}\t{chooser}\t{}\t{class}\n", lift.describe(sys, 8)?)
        }
        Command::Properties => properties(sys)?,
        Command::Repmat { spec, element } => {
            let spec = lookup_rep(cfg, spec)?;
            let f = lookup_element(cfg, element)?;
            rep_matrix(sys, &spec, &f)?.to_tsv()
        }
        Command::Norm { element, traces } => norm(cfg, element, *traces)?,
        Command::Verify { check } => return run_verify(cfg, check, strict),
    };
    Ok(Outcome { code: EXIT_OK, output })
}

/// Loads the config and applies command-line overrides.
pub fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::BadInput(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.budget.seed = s;
    }
    if let Some(n) = cli.nmax {
        cfg.budget.n_max = n;
    }
    if let Some(g) = cli.grid {
        cfg.budget.grid = g;
    }
    if let Some(w) = cli.window {
        cfg.budget.window = w;
    }
    Ok(cfg)
}

/// Parses, runs and reports; hard errors become a diagnostic row.
pub fn run(cli: &Cli) -> Outcome {
    let result = load_config(cli).and_then(|cfg| run_command(&cfg, &cli.command, cli.strict));
    result.unwrap_or_else(|e| Outcome { code: EXIT_ERROR, output: format!("error\t{e}\n") })
}
