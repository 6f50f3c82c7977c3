//! Problem files: a root system (or a torus rank), a fan in
//! fundamental-coweight coordinates and one weight per maximal cone.
//!
//! ```json
//! {
//!   "root_system": {"series": "A", "rank": 2, "lattice": "adjoint"},
//!   "mode": "regular",
//!   "fan": [[[1, 0], [1, 1]], [[1, 1], [0, 1]]],
//!   "h": [[-5, 4], [4, -5]],
//!   "query": {"mu": [0, 0], "i": 3}
//! }
//! ```
//!
//! `lattice` is `"adjoint"`, `"simply_connected"` or a list of generator
//! rows. Weight entries are integers or `"p/q"` strings. In wonderful mode
//! `fan` is omitted and `h` is a single row, read as `λ`. In toric mode
//! `root_system` is omitted.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use regcomp::fan::FanError;
use regcomp::rootsys::CartanType;
use num_traits::{One, Signed, Zero};
use regcomp::{BigInt, ChamberFan, Coweight, Matrix, LatticeChoice, PLFunction, Rat, RootDatum, Weight};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("{path}: cannot read file: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{path}: `{field}`: {message}")]
    Invalid { path: String, field: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemMode {
    Regular,
    Wonderful,
    Toric,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LatticeSpec {
    Named(String),
    Generators(Vec<Vec<Number>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    fn to_rat(&self) -> Result<Rat, String> {
        match self {
            Number::Int(i) => Ok(Rat::from_integer((*i).into())),
            Number::Text(s) => Rat::from_str(s.trim()).map_err(|_| format!("`{s}` is not a rational number")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootSystemSpec {
    series: String,
    rank: Option<usize>,
    #[serde(default)]
    lattice: Option<LatticeSpec>,
}

/// Defaults for command-line flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryDefaults {
    pub mu: Option<Vec<Number>>,
    pub i: Option<usize>,
    pub i_min: Option<usize>,
    pub i_max: Option<usize>,
    pub mu_box: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    root_system: Option<RootSystemSpec>,
    mode: ProblemMode,
    rank: Option<usize>,
    fan: Option<Vec<Vec<Vec<i64>>>>,
    h: Vec<Vec<Number>>,
    #[serde(default)]
    query: QueryDefaults,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mode: ProblemMode,
    pub root_datum: Option<Arc<RootDatum>>,
    pub fan: Arc<ChamberFan>,
    pub h: PLFunction,
    pub query: QueryDefaults,
}

impl Problem {
    /// `λ` of a wonderful problem.
    pub fn lambda(&self) -> &Weight {
        self.h.piece(0)
    }
}

/// Parses a weight written as comma-separated integers or `p/q`.
pub fn parse_weight(s: &str) -> Result<Weight, String> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    s.split(',')
        .map(|c| Rat::from_str(c.trim()).map_err(|_| format!("`{}` is not a rational number", c.trim())))
        .collect::<Result<Vec<_>, _>>()
        .map(Weight::new)
}

pub fn weight_from_numbers(row: &[Number]) -> Result<Weight, String> {
    row.iter().map(Number::to_rat).collect::<Result<Vec<_>, _>>().map(Weight::new)
}

pub fn root_datum(series: &str, rank: Option<usize>, lattice: LatticeChoice) -> Result<RootDatum, String> {
    let ty = match rank {
        Some(r) if !series.chars().any(|c| c.is_ascii_digit()) => CartanType::from_series_rank(series, r),
        _ => CartanType::parse(series),
    }
    .map_err(|e| e.to_string())?;
    if let Some(r) = rank {
        if ty.rank() != r {
            return Err(format!("type {ty} has rank {}, not {r}", ty.rank()));
        }
    }
    RootDatum::new(ty, lattice).map_err(|e| e.to_string())
}

pub fn parse_lattice(s: &str) -> Result<LatticeChoice, String> {
    match s {
        "adjoint" => Ok(LatticeChoice::Adjoint),
        "simply_connected" | "simply-connected" => Ok(LatticeChoice::SimplyConnected),
        other => Err(format!("unknown lattice `{other}` (expected adjoint or simply_connected)")),
    }
}

/// Generators in a file must be unimodular as written; the fan builder
/// itself only sees their primitive representatives.
fn check_written_smoothness(cones: &[Vec<Coweight>], rank: usize) -> Result<(), (String, String)> {
    for (ci, cone) in cones.iter().enumerate() {
        if cone.len() != rank || cone.iter().any(|g| g.coords.len() != rank) {
            continue;
        }
        let cols: Vec<Vec<BigInt>> = cone.iter().map(|g| g.coords.clone()).collect();
        let det = Matrix::from_cols(&cols).determinant().abs();
        if !det.is_one() && !det.is_zero() {
            return Err((format!("fan[{ci}]"), format!("cone {ci} is not smooth (|det| = {det})")));
        }
    }
    Ok(())
}

fn fan_error_field(e: &FanError) -> String {
    match e {
        FanError::GeneratorLength { cone, generator, .. }
        | FanError::ZeroGenerator { cone, generator }
        | FanError::OutsideChamber { cone, generator, .. } => format!("fan[{cone}][{generator}]"),
        FanError::GeneratorCount { cone, .. } | FanError::NonSmooth { cone, .. } | FanError::CoverageGap { cone, .. } => {
            format!("fan[{cone}]")
        }
        FanError::DuplicateCone { second, .. } => format!("fan[{second}]"),
        FanError::WeightLength { cone, .. } | FanError::NonIntegral { cone, .. } => format!("h[{cone}]"),
        FanError::AssignmentCount { .. } | FanError::Discontinuous { .. } => "h".to_string(),
        _ => "fan".to_string(),
    }
}

pub fn parse_problem(path: &Path) -> Result<Problem, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_str(&text, &path.display().to_string())
}

pub fn parse_problem_str(text: &str, path: &str) -> Result<Problem, ProblemError> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| ProblemError::Syntax {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let invalid = |field: &str, message: String| ProblemError::Invalid {
        path: path.to_string(),
        field: field.to_string(),
        message,
    };
    let pieces = raw
        .h
        .iter()
        .enumerate()
        .map(|(k, row)| weight_from_numbers(row).map_err(|m| invalid(&format!("h[{k}]"), m)))
        .collect::<Result<Vec<_>, _>>()?;
    let cones: Option<Vec<Vec<Coweight>>> = raw
        .fan
        .as_ref()
        .map(|f| f.iter().map(|c| c.iter().map(|g| Coweight::from_ints(g)).collect()).collect());

    let (root_datum, fan) = match raw.mode {
        ProblemMode::Toric => {
            // a root system only fixes the rank of the torus
            let system_rank = match &raw.root_system {
                Some(spec) => Some(
                    root_datum(&spec.series, spec.rank, LatticeChoice::Adjoint)
                        .map_err(|m| invalid("root_system", m))?
                        .rank(),
                ),
                None => None,
            };
            if let (Some(a), Some(b)) = (system_rank, raw.rank) {
                if a != b {
                    return Err(invalid("rank", format!("rank {b} disagrees with the root system rank {a}")));
                }
            }
            let cones = cones.ok_or_else(|| invalid("fan", "toric problems need a fan".into()))?;
            let rank = raw
                .rank
                .or(system_rank)
                .or_else(|| cones.first().and_then(|c| c.first()).map(|g| g.coords.len()))
                .ok_or_else(|| invalid("fan", "cannot infer the rank from an empty fan".into()))?;
            check_written_smoothness(&cones, rank).map_err(|(f, m)| invalid(&f, m))?;
            let fan = ChamberFan::build_complete_fan(rank, &cones).map_err(|e| invalid(&fan_error_field(&e), e.to_string()))?;
            (None, fan)
        }
        ProblemMode::Regular | ProblemMode::Wonderful => {
            let spec = raw
                .root_system
                .as_ref()
                .ok_or_else(|| invalid("root_system", "missing root system".into()))?;
            let lattice = match &spec.lattice {
                None => LatticeChoice::Adjoint,
                Some(LatticeSpec::Named(s)) => parse_lattice(s).map_err(|m| invalid("root_system.lattice", m))?,
                Some(LatticeSpec::Generators(rows)) => LatticeChoice::Generators(
                    rows.iter()
                        .enumerate()
                        .map(|(k, row)| {
                            row.iter()
                                .map(Number::to_rat)
                                .collect::<Result<Vec<_>, _>>()
                                .map_err(|m| invalid(&format!("root_system.lattice[{k}]"), m))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
            };
            let rd = Arc::new(root_datum(&spec.series, spec.rank, lattice).map_err(|m| invalid("root_system", m))?);
            if raw.rank.is_some_and(|r| r != rd.rank()) {
                return Err(invalid("rank", format!("root system has rank {}", rd.rank())));
            }
            let fan = if raw.mode == ProblemMode::Wonderful {
                if cones.is_some() {
                    return Err(invalid("fan", "wonderful problems use the one-cone fan; omit `fan`".into()));
                }
                if pieces.len() != 1 {
                    return Err(invalid("h", "wonderful problems take a single row λ".into()));
                }
                ChamberFan::wonderful(rd.clone())
            } else {
                let cones = cones.ok_or_else(|| invalid("fan", "regular problems need a fan".into()))?;
                check_written_smoothness(&cones, rd.rank()).map_err(|(f, m)| invalid(&f, m))?;
                ChamberFan::build_chamber_fan(rd.clone(), &cones).map_err(|e| invalid(&fan_error_field(&e), e.to_string()))?
            };
            (Some(rd), fan)
        }
    };
    let fan = Arc::new(fan);
    let h = PLFunction::build(fan.clone(), pieces).map_err(|e| invalid(&fan_error_field(&e), e.to_string()))?;
    Ok(Problem {
        mode: raw.mode,
        root_datum,
        fan,
        h,
        query: raw.query,
    })
}
