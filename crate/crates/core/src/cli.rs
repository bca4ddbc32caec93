//! `qdc` command line.
//!
//! Exit codes: 0 success, 1 failed assertion inside `report`, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::discovery::{ic_star, ic_star_from_relations, reference_pattern, DistributionOracle, Pattern};
use crate::distributions::{CiSet, DEFAULT_CI_TOL};
use crate::enumeration::{enumerate_structures, CausalStructure, DetectionOrdering, OrderingGroup};
use crate::json::{format_float, to_canonical_string};
use crate::qsim::{self, CircuitParams};
use crate::report::{self, ReportConfig};

pub const SEED_ENV: &str = "QDC_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Dot,
    Text,
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub eta: f64,
    pub alpha: f64,
    pub phi: f64,
    pub tol: f64,
    pub ordering: Option<String>,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let (eta, alpha, phi) = report::BASE;
        Self {
            eta,
            alpha,
            phi,
            tol: DEFAULT_CI_TOL,
            ordering: None,
            format: OutputFormat::Text,
            seed: report::DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<CircuitParams, String> {
        CircuitParams::new(self.eta, self.alpha, self.phi).map_err(|e| e.to_string())
    }

    pub fn detection_ordering(&self) -> Result<Option<DetectionOrdering>, String> {
        self.ordering.as_deref().map(|s| s.parse::<DetectionOrdering>().map_err(|e| e.to_string())).transpose()
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qdc",
    version,
    about = "Delayed-choice interferometer: simulation, CI analysis, IC* discovery, causal-structure enumeration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Entanglement parameter in [0, 1]
    #[arg(long, allow_negative_numbers = true)]
    eta: f64,
    /// Rotation of C, radians
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Interferometer phase, radians
    #[arg(long, allow_negative_numbers = true)]
    phi: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Joint detection table from the closed form, with the circuit cross-check
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Conditional-independence relations, closed under the semi-graphoid axioms
    Ci {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = DEFAULT_CI_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// IC* pattern from simulated statistics or a relation file
    Discover {
        #[arg(long, allow_negative_numbers = true, required_unless_present = "ci_file", conflicts_with = "ci_file")]
        eta: Option<f64>,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "ci_file", conflicts_with = "ci_file")]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "ci_file", conflicts_with = "ci_file")]
        phi: Option<f64>,
        /// JSON file: {"variables": [...], "relations": [{"x": [..], "y": [..], "given": [..]}]}
        #[arg(long)]
        ci_file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CI_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Causal structures compatible with one detection ordering
    Enumerate {
        /// Permutation of ABC, earliest first (e.g. ACB or A<C<B)
        #[arg(long)]
        ordering: String,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Full reproduction report over the generic grid and degenerate points
    Report {
        /// Directory for report.json and the DOT bundle
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CI_TOL)]
        tol: f64,
        /// Seed of the randomized soundness sweep (QDC_SEED overrides)
        #[arg(long)]
        seed: Option<u64>,
        /// Random parameterizations per 3-node DAG
        #[arg(long, default_value_t = report::DEFAULT_TRIALS_PER_DAG)]
        trials: usize,
    },
}

/// Relation file accepted by `discover --ci-file`.
#[derive(Debug, Deserialize)]
pub struct CiFile {
    pub variables: Vec<String>,
    pub relations: CiSet,
}

enum Failure {
    Usage(String),
    Assertion,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Runs the CLI, reading `QDC_SEED` from the environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_seed_env(args, std::env::var(SEED_ENV).ok(), out, err)
}

pub fn run_with_seed_env<I, T>(args: I, seed_env: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let to_out = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            let _ = if to_out { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if to_out { 0 } else { 2 };
        }
    };
    match dispatch(cli.command, seed_env, out) {
        Ok(()) => 0,
        Err(Failure::Assertion) => 1,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            2
        }
    }
}

fn dispatch(cmd: Command, seed_env: Option<String>, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Simulate { params, format } => {
            let cfg = RunConfig { eta: params.eta, alpha: params.alpha, phi: params.phi, format, ..Default::default() };
            simulate(&cfg, out)
        }
        Command::Ci { params, tol, format } => {
            let cfg =
                RunConfig { eta: params.eta, alpha: params.alpha, phi: params.phi, tol, format, ..Default::default() };
            ci(&cfg, out)
        }
        Command::Discover { eta, alpha, phi, ci_file, tol, format } => {
            let pattern = match ci_file {
                Some(path) => discover_from_file(&path)?,
                None => {
                    let cfg = RunConfig {
                        eta: eta.unwrap_or_default(),
                        alpha: alpha.unwrap_or_default(),
                        phi: phi.unwrap_or_default(),
                        tol,
                        ..Default::default()
                    };
                    let dist = qsim::joint_distribution(&qsim::closed_form_state(&cfg.params()?));
                    ic_star(&DistributionOracle::new(&dist, cfg.tol), &["A", "B", "C"])?
                }
            };
            match format {
                OutputFormat::Json => out.write_all(to_canonical_string(&pattern)?.as_bytes())?,
                _ => writeln!(out, "{pattern}")?,
            }
            Ok(())
        }
        Command::Enumerate { ordering, format } => {
            let cfg = RunConfig { ordering: Some(ordering), format, ..Default::default() };
            enumerate(&cfg, out)
        }
        Command::Report { out: dir, tol, seed, trials } => {
            let seed = match seed_env {
                Some(s) => {
                    s.trim().parse::<u64>().map_err(|_| format!("{SEED_ENV} is not an unsigned integer: {s}"))?
                }
                None => seed.unwrap_or(report::DEFAULT_SEED),
            };
            let cfg = ReportConfig { tol, seed, trials_per_dag: trials };
            run_report(&cfg, dir.as_deref(), out)
        }
    }
}

#[derive(Serialize)]
struct SimulateOutput {
    params: CircuitParams,
    joint: crate::distributions::JointDistribution,
    state: Vec<[f64; 2]>,
    circuit_residual: f64,
    literal_amplitude_discrepancy: f64,
}

fn simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let params = cfg.params()?;
    let state = qsim::closed_form_state(&params);
    let joint = qsim::joint_distribution(&state);
    let residual = qsim::circuit_residual(&params);
    match cfg.format {
        OutputFormat::Json => {
            let o = SimulateOutput {
                params,
                state: state.to_pairs(),
                joint,
                circuit_residual: residual,
                literal_amplitude_discrepancy: qsim::literal_amplitude_discrepancy(&params),
            };
            out.write_all(to_canonical_string(&o)?.as_bytes())?;
        }
        OutputFormat::Text => {
            writeln!(out, "eta={} alpha={} phi={}", params.eta, params.alpha, params.phi)?;
            writeln!(out, "A B C  P")?;
            for (i, p) in joint.probabilities().iter().enumerate() {
                writeln!(out, "{} {} {}  {}", i >> 2 & 1, i >> 1 & 1, i & 1, format_float(*p))?;
            }
            writeln!(out, "circuit residual: {}", format_float(residual))?;
        }
        OutputFormat::Dot => return Err(Failure::Usage("simulate supports --format json|text".into())),
    }
    Ok(())
}

fn ci(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let params = cfg.params()?;
    let dist = qsim::joint_distribution(&qsim::closed_form_state(&params));
    let relations = dist.all_ci_relations(cfg.tol)?.semigraphoid_closure();
    match cfg.format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct CiOutput<'a> {
                params: CircuitParams,
                tol: f64,
                relations: &'a CiSet,
            }
            out.write_all(to_canonical_string(&CiOutput { params, tol: cfg.tol, relations: &relations })?.as_bytes())?;
        }
        OutputFormat::Text => {
            if relations.is_empty() {
                writeln!(out, "no conditional independence relations")?;
            }
            for r in &relations {
                writeln!(out, "{r}")?;
                writeln!(out, "{}", r.display_swapped())?;
            }
        }
        OutputFormat::Dot => return Err(Failure::Usage("ci supports --format json|text".into())),
    }
    Ok(())
}

fn discover_from_file(path: &Path) -> Result<Pattern, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: CiFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let vars: Vec<&str> = file.variables.iter().map(String::as_str).collect();
    if let Some(v) = file.relations.variables().into_iter().find(|v| !file.variables.contains(v)) {
        return Err(Failure::Usage(format!("relation mentions undeclared variable `{v}`")));
    }
    Ok(ic_star_from_relations(&file.relations, &vars)?)
}

/// Group of structures for one ordering, built from the reference pattern.
pub fn ordering_group(ord: &DetectionOrdering) -> Result<(OrderingGroup, Vec<CausalStructure>), String> {
    let report = crate::enumeration::no_go_report(&reference_pattern()).map_err(|e| e.to_string())?;
    let group = report.group(&ord.tag()).cloned().ok_or_else(|| format!("unknown ordering {ord}"))?;
    let structures = enumerate_structures(&reference_pattern(), ord).map_err(|e| e.to_string())?;
    Ok((group, structures))
}

fn enumerate(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let ord = cfg.detection_ordering()?.expect("set by caller");
    let (group, structures) = ordering_group(&ord)?;
    match cfg.format {
        OutputFormat::Json => out.write_all(to_canonical_string(&group)?.as_bytes())?,
        OutputFormat::Dot => {
            if structures.is_empty() {
                writeln!(out, "// {ord}: no causal structures")?;
            }
            for (i, s) in structures.iter().enumerate() {
                writeln!(out, "// {ord} #{i}: {}", s.label())?;
                out.write_all(s.graph().to_dot().as_bytes())?;
            }
        }
        OutputFormat::Text => {
            if structures.is_empty() {
                writeln!(out, "{ord}: no causal structures")?;
            } else {
                writeln!(out, "{ord}: {} causal structures", structures.len())?;
            }
            for (i, e) in group.structures.iter().enumerate() {
                writeln!(
                    out,
                    "  #{i} {}  hidden={} superluminal_free={} objective={}",
                    e.label, e.flags.hidden_count, e.flags.superluminal_free, e.flags.objective
                )?;
            }
        }
    }
    Ok(())
}

fn run_report(cfg: &ReportConfig, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let rep = report::build_report(cfg)?;
    let json = to_canonical_string(&rep)?;
    match dir {
        Some(dir) => {
            write_bundle(&rep, &json, dir)?;
            writeln!(out, "wrote {}", dir.join("report.json").display())?;
            for f in &rep.failures {
                writeln!(out, "FAILED: {f}")?;
            }
            writeln!(out, "counts per ordering: {:?}", rep.no_go.counts())?;
            writeln!(out, "report {}", if rep.passed { "passed" } else { "failed" })?;
        }
        None => out.write_all(json.as_bytes())?,
    }
    if rep.passed {
        Ok(())
    } else {
        Err(Failure::Assertion)
    }
}

/// Writes `report.json` and one `<ordering>_<index>.dot` per structure.
pub fn write_bundle(rep: &report::ReproductionReport, json: &str, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), json)?;
    let dot_dir = dir.join("dot");
    fs::create_dir_all(&dot_dir)?;
    for g in &rep.no_go.groups {
        for (i, s) in g.structures.iter().enumerate() {
            fs::write(dot_dir.join(format!("{}_{}.dot", g.tag, i)), s.graph.to_dot())?;
        }
    }
    Ok(())
}
