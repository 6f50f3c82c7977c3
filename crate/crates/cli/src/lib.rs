//! Command-line front end: problem files, subcommands and tabular output.
//!
//! Exit codes: 0 success, 1 validation error, 2 usage error.

pub mod output;
pub mod problem;

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use regcomp::engine::{self, EngineError, Target};
use regcomp::rootsys::SimpleSet;
use regcomp::{LatticeChoice, MultiplicityReport, PLFunction, RootDatum, Weight};

use output::{Document, Format, Table};
use problem::{parse_lattice, parse_problem, parse_weight, root_datum, weight_from_numbers, Problem, ProblemMode};

#[derive(Debug, Parser)]
#[command(name = "regcomp", version, about = "Multiplicities in line-bundle cohomology of regular group compactifications")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TypeArgs {
    /// Series letter (with --rank) or a full type such as A2 or A1xA1.
    #[arg(long = "type")]
    pub ty: String,
    #[arg(long)]
    pub rank: Option<usize>,
    /// adjoint or simply_connected.
    #[arg(long, default_value = "adjoint")]
    pub lattice: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// m^i_h(μ) by the general formula, with its breakdown over W.
    Mult {
        problem: PathBuf,
        /// Dominant weight, comma-separated fundamental-weight coordinates.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// Cohomological degree; all degrees when omitted.
        #[arg(long)]
        i: Option<usize>,
    },
    /// Nonzero multiplicities over a box of weights, with dimensions.
    Table {
        problem: PathBuf,
        #[arg(long)]
        i_min: Option<usize>,
        #[arg(long)]
        i_max: Option<usize>,
        /// Radius of the μ box (sup norm).
        #[arg(long)]
        mu_box: Option<i64>,
    },
    /// Closed-form multiplicity on the wonderful compactification.
    Wonderful {
        /// Optional problem file in wonderful mode (supplies type and λ).
        problem: Option<PathBuf>,
        #[arg(long = "type")]
        ty: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long)]
        i: Option<usize>,
    },
    /// Torus-mode multiplicity on a complete fan.
    Toric {
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long)]
        i: Option<usize>,
    },
    /// General formula on the one-cone fan against the closed form.
    CheckOracle {
        #[command(flatten)]
        ty: TypeArgs,
        /// Radius of the λ box.
        #[arg(long = "box")]
        radius: i64,
        /// Radius of the μ box (defaults to the λ radius).
        #[arg(long)]
        mu_box: Option<i64>,
        #[arg(long)]
        i_max: Option<usize>,
    },
    /// Weights λ whose closed-form multiplicities at μ meet a target.
    Search {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// Conditions such as m5=3 or m10>0,m11>0.
        #[arg(long)]
        target: String,
        #[arg(long = "box")]
        radius: i64,
        /// Print at most this many hits.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Weights t * μ carrying cohomology of the wonderful bundle λ.
    Support {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
    },
    /// Parse and validate a problem file.
    Validate { problem: PathBuf },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) => m,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `argv` (program name first).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if let Some(n) = cli.threads {
        // a second configuration attempt in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut warnings = String::new();
    match execute(&cli.command, &mut warnings) {
        Ok(doc) => Outcome {
            code: 0,
            stdout: doc.render(cli.format),
            stderr: warnings,
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("{warnings}error: {}\n", e.message()),
        },
    }
}

fn load(path: &PathBuf) -> Result<Problem, CliError> {
    parse_problem(path).map_err(|e| CliError::Validation(e.to_string()))
}

fn weight_arg(flag: &str, value: Option<&str>, default: Option<Weight>, rank: usize) -> Result<Weight, CliError> {
    let w = match (value, default) {
        (Some(v), _) => parse_weight(v).map_err(|m| CliError::Usage(format!("--{flag}: {m}")))?,
        (None, Some(w)) => w,
        (None, None) => return Err(CliError::Usage(format!("--{flag} is required"))),
    };
    if w.rank() != rank {
        return Err(CliError::Usage(format!("--{flag} needs {rank} coordinates, got {}", w.rank())));
    }
    Ok(w)
}

fn query_mu(p: &Problem) -> Result<Option<Weight>, CliError> {
    p.query
        .mu
        .as_ref()
        .map(|row| weight_from_numbers(row).map_err(|m| CliError::Validation(format!("query.mu: {m}"))))
        .transpose()
}

fn datum_from_args(args: &TypeArgs) -> Result<Arc<RootDatum>, CliError> {
    let lattice: LatticeChoice = parse_lattice(&args.lattice).map_err(CliError::Usage)?;
    root_datum(&args.ty, args.rank, lattice).map(Arc::new).map_err(CliError::Usage)
}

fn execute(command: &Command, warnings: &mut String) -> Result<Document, CliError> {
    match command {
        Command::Mult { problem, mu, i } => {
            let p = load(problem)?;
            if p.mode == ProblemMode::Toric {
                return Err(CliError::Validation("mult needs a fan in the dominant chamber; use `toric`".into()));
            }
            let mu = weight_arg("mu", mu.as_deref(), query_mu(&p)?, p.fan.rank())?;
            let reports = engine::multiplicities(&p.h, &mu)?;
            match i.or(p.query.i) {
                Some(i) => {
                    let report = reports.into_iter().nth(i).unwrap_or_else(|| empty_report(&p.h, &mu, i));
                    Ok(report_document(&report, &format!("{}", p.h)))
                }
                None => Ok(degrees_document(&mu, reports.iter().map(|r| r.value))),
            }
        }
        Command::Table { problem, i_min, i_max, mu_box } => {
            let p = load(problem)?;
            let radius = mu_box.or(p.query.mu_box).unwrap_or(3);
            if radius < 0 {
                return Err(CliError::Usage("--mu-box must be nonnegative".into()));
            }
            let lo = i_min.or(p.query.i_min).unwrap_or(0);
            warnings.push_str(&format!("warning: {}\n", engine::BOX_WARNING));
            if p.mode == ProblemMode::Toric {
                let hi = i_max.or(p.query.i_max).unwrap_or(p.fan.rank());
                return toric_table(&p.h, lo, hi, radius);
            }
            let hi = i_max
                .or(p.query.i_max)
                .unwrap_or_else(|| p.root_datum.as_ref().expect("chamber mode").group_dimension());
            if lo > hi {
                return Err(CliError::Usage("--i-min exceeds --i-max".into()));
            }
            let table = engine::decomposition_table(&p.h, lo..=hi, radius)?;
            let mut rows = Table::new("multiplicities", &["i", "mu", "m", "dim_endo"]);
            for r in &table.rows {
                rows.push(vec![
                    r.degree.to_string(),
                    r.mu.to_string(),
                    r.value.to_string(),
                    r.dim_endo.as_ref().expect("table rows carry dimensions").to_string(),
                ]);
            }
            let mut totals = Table::new("totals", &["i", "dimension"]);
            for (i, t) in &table.totals {
                totals.push(vec![i.to_string(), t.to_string()]);
            }
            Ok(Document::default()
                .summary("h", &p.h)
                .summary("mu_box", radius)
                .table(rows)
                .table(totals))
        }
        Command::Wonderful { problem, ty, rank, lambda, mu, i } => {
            let (rd, default_lambda, default_mu, default_i) = match problem {
                Some(path) => {
                    let p = load(path)?;
                    if p.mode != ProblemMode::Wonderful {
                        return Err(CliError::Validation(format!("{}: not a wonderful-mode problem", path.display())));
                    }
                    let mu = query_mu(&p)?;
                    (p.root_datum.clone().expect("wonderful mode"), Some(p.lambda().clone()), mu, p.query.i)
                }
                None => {
                    let ty = ty.clone().ok_or_else(|| CliError::Usage("--type is required without a problem file".into()))?;
                    let args = TypeArgs { ty, rank: *rank, lattice: "adjoint".into() };
                    (datum_from_args(&args)?, None, None, None)
                }
            };
            let r = rd.rank();
            let lambda = weight_arg("lambda", lambda.as_deref(), default_lambda, r)?;
            let mu = weight_arg("mu", mu.as_deref(), default_mu, r)?;
            match i.or(default_i) {
                Some(i) => {
                    let report = engine::wonderful_multiplicity(&rd, &lambda, &mu, i)?;
                    Ok(report_document(&report, &lambda.to_string()))
                }
                None => {
                    engine::wonderful_multiplicity(&rd, &lambda, &mu, 0)?;
                    Ok(degrees_document(&mu, engine::wonderful_degree_vector(&rd, &lambda, &mu).into_iter()))
                }
            }
        }
        Command::Toric { problem, mu, i } => {
            let p = load(problem)?;
            if p.mode != ProblemMode::Toric {
                return Err(CliError::Validation("toric needs a complete fan (mode \"toric\")".into()));
            }
            let mu = weight_arg("mu", mu.as_deref(), query_mu(&p)?, p.fan.rank())?;
            match i.or(p.query.i) {
                Some(i) => {
                    let report = engine::toric_multiplicity(&p.h, &mu, i)?;
                    Ok(report_document(&report, &format!("{}", p.h)))
                }
                None => Ok(degrees_document(&mu, engine::toric_degree_vector(&p.h, &mu)?.into_iter())),
            }
        }
        Command::CheckOracle { ty, radius, mu_box, i_max } => {
            let rd = datum_from_args(ty)?;
            if !matches!(rd.lattice(), LatticeChoice::Adjoint) {
                return Err(CliError::Usage("the closed form is for the adjoint lattice".into()));
            }
            let mu_radius = mu_box.unwrap_or(*radius);
            if *radius < 0 || mu_radius < 0 {
                return Err(CliError::Usage("box radii must be nonnegative".into()));
            }
            let top = i_max.unwrap_or(rd.group_dimension());
            let report = engine::check_wonderful_oracle(&rd, *radius, mu_radius, top)?;
            let mut table = Table::new("mismatches", &["lambda", "mu", "i", "general", "closed_form"]);
            for m in &report.mismatches {
                table.push(vec![
                    m.lambda.to_string(),
                    m.mu.to_string(),
                    m.degree.to_string(),
                    m.general.to_string(),
                    m.closed_form.to_string(),
                ]);
            }
            Ok(Document::default()
                .summary("type", rd.cartan_type())
                .summary("triples", report.triples)
                .summary("result", format!("{} mismatches", report.mismatches.len()))
                .table(table))
        }
        Command::Search { ty, mu, target, radius, limit } => {
            let rd = datum_from_args(ty)?;
            let target: Target = target.parse().map_err(|e: engine::TargetParseError| CliError::Usage(e.to_string()))?;
            let mu = weight_arg("mu", mu.as_deref(), Some(Weight::zero(rd.rank())), rd.rank())?;
            let hits = engine::search_wonderful(&rd, &mu, &target, *radius)?;
            let degrees: Vec<usize> = {
                let mut d: Vec<usize> = target.0.iter().map(|c| c.degree).collect();
                d.sort();
                d.dedup();
                d
            };
            let mut columns = vec!["lambda".to_string()];
            columns.extend(degrees.iter().map(|d| format!("m{d}")));
            columns.push("nonzero".to_string());
            let mut table = Table { name: "hits", columns, rows: Vec::new() };
            for hit in hits.iter().take(limit.unwrap_or(usize::MAX)) {
                let mut row = vec![Weight::from_ints(&hit.lambda).to_string()];
                row.extend(degrees.iter().map(|&d| hit.multiplicities.get(d).copied().unwrap_or(0).to_string()));
                row.push(
                    hit.multiplicities
                        .iter()
                        .enumerate()
                        .filter(|(_, &m)| m > 0)
                        .map(|(i, m)| format!("{i}:{m}"))
                        .collect::<Vec<_>>()
                        .join(" "),
                );
                table.push(row);
            }
            Ok(Document::default()
                .summary("type", rd.cartan_type())
                .summary("mu", &mu)
                .summary("box", radius)
                .summary("hits", hits.len())
                .table(table))
        }
        Command::Support { ty, lambda, mu } => {
            let rd = datum_from_args(ty)?;
            let lambda = weight_arg("lambda", Some(lambda), None, rd.rank())?;
            let mu = weight_arg("mu", Some(mu), None, rd.rank())?;
            let support = engine::wonderful_support(&rd, &mu, &lambda)?;
            let mut table = Table::new("support", &["nu", "element", "degree"]);
            for nu in &support {
                let t = rd
                    .weyl_elements()
                    .iter()
                    .find(|t| &rd.dot_action(t, &mu) == nu)
                    .expect("support lies in the dot orbit");
                table.push(vec![nu.to_string(), t.word_string(), t.wonderful_degree().to_string()]);
            }
            Ok(Document::default()
                .summary("lambda", &lambda)
                .summary("mu", &mu)
                .summary("size", support.len())
                .table(table))
        }
        Command::Validate { problem } => {
            let p = load(problem)?;
            let mut cones = Table::new("cones", &["cone", "generators", "h"]);
            for (k, cone) in p.fan.cones().iter().enumerate() {
                let gens: Vec<String> = cone
                    .iter()
                    .map(|&r| regcomp::Coweight::new(p.fan.rays()[r].clone()).to_string())
                    .collect();
                cones.push(vec![k.to_string(), gens.join(" "), p.h.piece(k).to_string()]);
            }
            let kind = match &p.root_datum {
                Some(rd) => rd.cartan_type().to_string(),
                None => format!("torus of rank {}", p.fan.rank()),
            };
            Ok(Document::default()
                .summary("status", "valid")
                .summary("mode", format!("{:?}", p.mode).to_lowercase())
                .summary("type", kind)
                .summary("rays", p.fan.rays().len())
                .summary("cones", p.fan.cones().len())
                .table(cones))
        }
    }
}

fn empty_report(h: &PLFunction, mu: &Weight, i: usize) -> MultiplicityReport {
    MultiplicityReport {
        mode: engine::mode_of(h.fan()),
        mu: mu.clone(),
        degree: i,
        value: 0,
        in_lattice: h.in_h_plus_x(mu),
        terms: Vec::new(),
        chamber_term: 0,
        dim_endo: None,
    }
}

fn report_document(report: &MultiplicityReport, h: &str) -> Document {
    let mut table = Table::new("breakdown", &["term", "length", "descent", "nu", "degree", "value"]);
    let (chamber_label, chamber_degree) = match report.mode {
        engine::Mode::Wonderful => ("1", 0),
        _ => ("chamber", report.degree),
    };
    table.push(vec![
        chamber_label.to_string(),
        "0".to_string(),
        SimpleSet::empty().to_string(),
        report.mu.to_string(),
        chamber_degree.to_string(),
        report.chamber_term.to_string(),
    ]);
    for t in &report.terms {
        table.push(vec![
            t.word.clone(),
            t.length.to_string(),
            t.descent.to_string(),
            t.nu.to_string(),
            t.degree.to_string(),
            t.value.to_string(),
        ]);
    }
    Document::default()
        .summary("mode", report.mode)
        .summary("h", h)
        .summary("mu", &report.mu)
        .summary("i", report.degree)
        .summary("in_lattice", report.in_lattice)
        .summary("m", report.value)
        .table(table)
}

fn degrees_document(mu: &Weight, values: impl Iterator<Item = usize>) -> Document {
    let mut table = Table::new("degrees", &["i", "m"]);
    for (i, m) in values.enumerate() {
        table.push(vec![i.to_string(), m.to_string()]);
    }
    Document::default().summary("mu", mu).table(table)
}

fn toric_table(h: &PLFunction, lo: usize, hi: usize, radius: i64) -> Result<Document, CliError> {
    if lo > hi {
        return Err(CliError::Usage("--i-min exceeds --i-max".into()));
    }
    let r = h.fan().rank();
    let mut rows = Table::new("multiplicities", &["i", "mu", "m"]);
    let mut totals = vec![0usize; hi + 1];
    let mut per_mu = Vec::new();
    for c in engine::integer_box(r, -radius, radius) {
        let mu = Weight::from_ints(&c);
        per_mu.push((engine::toric_degree_vector(h, &mu)?, mu));
    }
    for i in lo..=hi {
        for (dims, mu) in &per_mu {
            let m = dims.get(i).copied().unwrap_or(0);
            if m > 0 {
                rows.push(vec![i.to_string(), mu.to_string(), m.to_string()]);
                totals[i] += m;
            }
        }
    }
    let mut total_table = Table::new("totals", &["i", "dimension"]);
    for (i, t) in totals.iter().enumerate().skip(lo) {
        total_table.push(vec![i.to_string(), t.to_string()]);
    }
    Ok(Document::default()
        .summary("h", h)
        .summary("mu_box", radius)
        .table(rows)
        .table(total_table))
}
