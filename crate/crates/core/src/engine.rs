//! Multiplicity formulas.
//!
//! - [`multiplicity`]: the general formula on a fan subdividing the
//!   dominant chamber, one refinement and one pair computation per `t ∈ W`.
//! - [`wonderful_multiplicity`]: the closed form on the wonderful
//!   compactification (two lattice conditions per `t`).
//! - [`toric_multiplicity`]: the torus specialization on a complete fan.
//!
//! Searches and oracle sweeps run in parallel over independent work items
//! and merge results in input order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cohomology::{chamber_rel_dims, pair_dims_v_w};
use crate::fan::{Ambient, ChamberFan, PLFunction};
use crate::linalg::Matrix;
use crate::refine::{refine, RefineError};
use crate::rootsys::{weight_to_i64, RootDatum, RootSystemError, SimpleSet, Weight};
use crate::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error("operation needs a fan {expected}")]
    ModeMismatch { expected: &'static str },
    #[error("the two support computations disagree: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Regular,
    Wonderful,
    Toric,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Regular => "regular",
            Mode::Wonderful => "wonderful",
            Mode::Toric => "toric",
        })
    }
}

/// Contribution of one `t ≠ 1` to a multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermContribution {
    /// Reduced word, `s1s2…`.
    pub word: String,
    pub length: usize,
    pub descent: SimpleSet,
    /// `t * μ`.
    pub nu: Weight,
    /// Cohomological degree of the pair read off (`i − 2l(t) − 1` in the
    /// general formula, `2l(t) + |J_t|` in the closed form).
    pub degree: i64,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub mode: Mode,
    pub mu: Weight,
    pub degree: usize,
    pub value: usize,
    /// `μ ∈ h + 𝓧`; when false every term is zero.
    pub in_lattice: bool,
    pub terms: Vec<TermContribution>,
    /// `dim H^i(C⁺, V(h,μ))`, or the `t = 1` condition in the closed form.
    pub chamber_term: usize,
    /// `(dim L(μ))²`, when requested.
    pub dim_endo: Option<BigInt>,
}

impl MultiplicityReport {
    /// Sum of the breakdown; equals `value`.
    pub fn breakdown_total(&self) -> usize {
        self.chamber_term + self.terms.iter().map(|t| t.value).sum::<usize>()
    }

    /// Terms with nonzero value.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = &TermContribution> {
        self.terms.iter().filter(|t| t.value > 0)
    }
}

fn chamber_datum(h: &PLFunction) -> Result<Arc<RootDatum>, EngineError> {
    h.fan()
        .root_datum()
        .cloned()
        .ok_or(EngineError::ModeMismatch { expected: "subdividing the dominant chamber" })
}

fn check_dominant_integral(rd: &RootDatum, mu: &Weight) -> Result<(), EngineError> {
    rd.check_rank(mu)?;
    if !mu.is_integral() {
        return Err(RootSystemError::NotIntegral(mu.clone()).into());
    }
    if !rd.is_dominant(mu) {
        return Err(RootSystemError::NotDominant(mu.clone()).into());
    }
    Ok(())
}

/// `m^i_h(μ)` for every `0 ≤ i ≤ dim X`, sharing one refinement per `t`.
pub fn multiplicities(h: &PLFunction, mu: &Weight) -> Result<Vec<MultiplicityReport>, EngineError> {
    let rd = chamber_datum(h)?;
    check_dominant_integral(&rd, mu)?;
    let top = rd.group_dimension();
    let rank = rd.rank();
    if !h.in_h_plus_x(mu) {
        return Ok((0..=top)
            .map(|i| MultiplicityReport {
                mode: Mode::Regular,
                mu: mu.clone(),
                degree: i,
                value: 0,
                in_lattice: false,
                terms: Vec::new(),
                chamber_term: 0,
                dim_endo: None,
            })
            .collect());
    }
    let pairs = rd.weyl_elements()[1..]
        .par_iter()
        .map(|t| {
            let nu = rd.dot_action(t, mu);
            let lc = refine(h, &nu)?;
            Ok((t, nu, pair_dims_v_w(&lc, t.descent_set(), rank)))
        })
        .collect::<Result<Vec<_>, RefineError>>()?;
    let chamber = chamber_rel_dims(&refine(h, mu)?, top);
    Ok((0..=top)
        .map(|i| {
            let terms: Vec<TermContribution> = pairs
                .iter()
                .map(|(t, nu, dims)| {
                    let degree = i as i64 - 2 * t.length() as i64 - 1;
                    TermContribution {
                        word: t.word_string(),
                        length: t.length(),
                        descent: t.descent_set(),
                        nu: nu.clone(),
                        degree,
                        value: dims.get(degree),
                    }
                })
                .collect();
            let chamber_term = chamber.get(i as i64);
            let value = chamber_term + terms.iter().map(|t| t.value).sum::<usize>();
            MultiplicityReport {
                mode: Mode::Regular,
                mu: mu.clone(),
                degree: i,
                value,
                in_lattice: true,
                terms,
                chamber_term,
                dim_endo: None,
            }
        })
        .collect())
}

/// `m^i_h(μ)` by the general formula; zero outside `0 ≤ i ≤ dim X`.
pub fn multiplicity(h: &PLFunction, mu: &Weight, i: usize) -> Result<MultiplicityReport, EngineError> {
    let rd = chamber_datum(h)?;
    check_dominant_integral(&rd, mu)?;
    if i > rd.group_dimension() {
        return Ok(MultiplicityReport {
            mode: Mode::Regular,
            mu: mu.clone(),
            degree: i,
            value: 0,
            in_lattice: h.in_h_plus_x(mu),
            terms: Vec::new(),
            chamber_term: 0,
            dim_endo: None,
        });
    }
    Ok(multiplicities(h, mu)?.swap_remove(i))
}

/// `m^i_λ(μ)` on the wonderful compactification: the number of `t ∈ W`
/// with `2l(t) + |J_t| = i` and `t * μ − λ ∈ Q_t`.
pub fn wonderful_multiplicity(rd: &RootDatum, lambda: &Weight, mu: &Weight, i: usize) -> Result<MultiplicityReport, EngineError> {
    check_dominant_integral(rd, mu)?;
    rd.check_rank(lambda)?;
    if !lambda.is_integral() {
        return Err(RootSystemError::NotIntegral(lambda.clone()).into());
    }
    let mut chamber_term = 0;
    let mut terms = Vec::new();
    for t in rd.weyl_elements() {
        let nu = rd.dot_action(t, mu);
        let value = usize::from(t.wonderful_degree() == i && rd.in_qt(&nu.sub(lambda), t));
        if t.is_identity() {
            chamber_term = value;
        } else {
            terms.push(TermContribution {
                word: t.word_string(),
                length: t.length(),
                descent: t.descent_set(),
                nu,
                degree: t.wonderful_degree() as i64,
                value,
            });
        }
    }
    let value = chamber_term + terms.iter().map(|t| t.value).sum::<usize>();
    Ok(MultiplicityReport {
        mode: Mode::Wonderful,
        mu: mu.clone(),
        degree: i,
        value,
        in_lattice: rd.in_lattice(&mu.sub(lambda), crate::rootsys::LatticeKind::Root),
        terms,
        chamber_term,
        dim_endo: None,
    })
}

/// The closed-form multiplicities `m^i_λ(μ)` for all `0 ≤ i ≤ dim X`.
pub fn wonderful_degree_vector(rd: &RootDatum, lambda: &Weight, mu: &Weight) -> Vec<usize> {
    let mut out = vec![0; rd.group_dimension() + 1];
    for t in rd.weyl_elements() {
        if rd.in_qt(&rd.dot_action(t, mu).sub(lambda), t) {
            out[t.wonderful_degree()] += 1;
        }
    }
    out
}

/// `m^i_h(μ) = dim H^i(ℝ^r, V(h,μ))` on a complete fan.
pub fn toric_multiplicity(h: &PLFunction, mu: &Weight, i: usize) -> Result<MultiplicityReport, EngineError> {
    let r = h.fan().rank();
    if !h.fan().is_full_space() {
        return Err(EngineError::ModeMismatch { expected: "covering the whole space" });
    }
    if mu.rank() != r {
        return Err(RootSystemError::WrongRank { expected: r, got: mu.rank() }.into());
    }
    let in_lattice = h.in_h_plus_x(mu);
    let value = if in_lattice {
        chamber_rel_dims(&refine(h, mu)?, r).get(i as i64)
    } else {
        0
    };
    Ok(MultiplicityReport {
        mode: Mode::Toric,
        mu: mu.clone(),
        degree: i,
        value,
        in_lattice,
        terms: Vec::new(),
        chamber_term: value,
        dim_endo: None,
    })
}

/// All toric multiplicities `dim H^i(ℝ^r, V(h,μ))`, `0 ≤ i ≤ r`.
pub fn toric_degree_vector(h: &PLFunction, mu: &Weight) -> Result<Vec<usize>, EngineError> {
    let r = h.fan().rank();
    if !h.fan().is_full_space() {
        return Err(EngineError::ModeMismatch { expected: "covering the whole space" });
    }
    if !h.in_h_plus_x(mu) {
        return Ok(vec![0; r + 1]);
    }
    Ok(chamber_rel_dims(&refine(h, mu)?, r).dims)
}

/// Whether `m^0_h(μ) = 1`: `⟨μ, n⟩ ≤ h(n)` on every generator of every
/// maximal cone, and `μ ∈ h + 𝓧`.
pub fn m0_characterization(h: &PLFunction, mu: &Weight) -> bool {
    let fan = h.fan();
    h.in_h_plus_x(mu)
        && fan.cones().iter().enumerate().all(|(ci, cone)| {
            cone.iter().all(|&r| {
                let n = crate::Coweight::new(fan.rays()[r].clone());
                fan.ambient().pairing(mu, &n) <= crate::fan::dot(h.functional(ci), &n.coords)
            })
        })
}

/// Dominant integral weights with every coordinate at most `radius`.
pub fn dominant_box(rank: usize, radius: i64) -> Vec<Weight> {
    integer_box(rank, 0, radius).into_iter().map(|c| Weight::from_ints(&c)).collect()
}

/// All integer vectors in `[lo, hi]^rank`, lexicographically ordered.
pub fn integer_box(rank: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

pub const BOX_WARNING: &str = "only weights inside the box were examined; multiplicities outside it are not reported";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTable {
    /// Nonzero entries ordered by degree, then by `μ`.
    pub rows: Vec<MultiplicityReport>,
    /// `(i, Σ m · dim_endo)` for each degree in range.
    pub totals: Vec<(usize, BigInt)>,
    pub warning: &'static str,
}

/// Nonzero `m^i_h(μ)` for `i` in range and dominant `μ` in the box, with
/// `(dim L(μ))²` and the dimension total per degree.
pub fn decomposition_table(
    h: &PLFunction,
    degrees: std::ops::RangeInclusive<usize>,
    mu_radius: i64,
) -> Result<DecompositionTable, EngineError> {
    let rd = chamber_datum(h)?;
    let mus = dominant_box(rd.rank(), mu_radius);
    let per_mu = mus
        .par_iter()
        .map(|mu| multiplicities(h, mu).map(|r| (mu, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for i in degrees.clone() {
        for (mu, reports) in &per_mu {
            if let Some(rep) = reports.get(i).filter(|r| r.value > 0) {
                let mut rep = rep.clone();
                rep.dim_endo = Some(rd.weyl_dimension(mu)?.pow(2));
                rows.push(rep);
            }
        }
    }
    let totals = degrees
        .map(|i| {
            let total = rows
                .iter()
                .filter(|r| r.degree == i)
                .fold(BigInt::zero(), |acc, r| acc + BigInt::from(r.value) * r.dim_endo.as_ref().expect("set above"));
            (i, total)
        })
        .collect();
    Ok(DecompositionTable { rows, totals, warning: BOX_WARNING })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub lambda: Weight,
    pub mu: Weight,
    pub degree: usize,
    pub general: usize,
    pub closed_form: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub triples: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Compares the general formula on the one-cone fan `{C⁺}` with `h = λ`
/// against the closed form, for integral `λ` with `‖λ‖∞ ≤ lambda_radius`,
/// dominant `μ` with `‖μ‖∞ ≤ mu_radius` and `i ≤ max_degree`.
pub fn check_wonderful_oracle(rd: &Arc<RootDatum>, lambda_radius: i64, mu_radius: i64, max_degree: usize) -> Result<OracleReport, EngineError> {
    let fan = Arc::new(ChamberFan::wonderful(rd.clone()));
    let lambdas = integer_box(rd.rank(), -lambda_radius, lambda_radius);
    let mus = dominant_box(rd.rank(), mu_radius);
    let work: Vec<(&Vec<i64>, &Weight)> = lambdas.iter().flat_map(|l| mus.iter().map(move |m| (l, m))).collect();
    let results = work
        .par_iter()
        .map(|(l, mu)| {
            let lambda = Weight::from_ints(l);
            let h = PLFunction::linear(fan.clone(), lambda.clone()).expect("integral λ is a valid linear function");
            let general = multiplicities(&h, mu)?;
            let closed = wonderful_degree_vector(rd, &lambda, mu);
            let mismatches: Vec<Mismatch> = (0..=max_degree)
                .filter_map(|i| {
                    let g = general.get(i).map_or(0, |r| r.value);
                    let c = closed.get(i).copied().unwrap_or(0);
                    (g != c).then(|| Mismatch {
                        lambda: lambda.clone(),
                        mu: (*mu).clone(),
                        degree: i,
                        general: g,
                        closed_form: c,
                    })
                })
                .collect();
            Ok(mismatches)
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(OracleReport {
        triples: work.len() * (max_degree + 1),
        mismatches: results.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// `m<degree> <op> <value>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Condition {
    pub degree: usize,
    pub op: Comparison,
    pub value: usize,
}

/// A conjunction of conditions on the closed-form multiplicities, parsed
/// from text such as `m5=3` or `m10>0,m11>0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target(pub Vec<Condition>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse target condition `{0}` (expected e.g. m5=3 or m10>0,m11>0)")]
pub struct TargetParseError(pub String);

impl FromStr for Condition {
    type Err = TargetParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TargetParseError(s.to_string());
        let body = s.trim().strip_prefix('m').ok_or_else(err)?;
        let split = body.find(|c: char| !c.is_ascii_digit()).ok_or_else(err)?;
        let (degree, rest) = body.split_at(split);
        let (op, value) = [
            (">=", Comparison::Ge),
            ("<=", Comparison::Le),
            ("!=", Comparison::Ne),
            ("==", Comparison::Eq),
            ("=", Comparison::Eq),
            (">", Comparison::Gt),
            ("<", Comparison::Lt),
        ]
        .iter()
        .find_map(|(tok, op)| rest.strip_prefix(tok).map(|v| (*op, v)))
        .ok_or_else(err)?;
        Ok(Condition {
            degree: degree.parse().map_err(|_| err())?,
            op,
            value: value.trim().parse().map_err(|_| err())?,
        })
    }
}

impl FromStr for Target {
    type Err = TargetParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',').map(str::parse).collect::<Result<Vec<_>, _>>().map(Target)
    }
}

impl Condition {
    pub fn holds(&self, multiplicities: &[usize]) -> bool {
        let m = multiplicities.get(self.degree).copied().unwrap_or(0);
        match self.op {
            Comparison::Eq => m == self.value,
            Comparison::Ne => m != self.value,
            Comparison::Lt => m < self.value,
            Comparison::Le => m <= self.value,
            Comparison::Gt => m > self.value,
            Comparison::Ge => m >= self.value,
        }
    }
}

impl Target {
    pub fn holds(&self, multiplicities: &[usize]) -> bool {
        self.0.iter().all(|c| c.holds(multiplicities))
    }
}

/// Closed-form multiplicity vectors in integer arithmetic: root
/// coordinates are scaled by `d = |det A|` so that `t * μ − λ ∈ Q_t`
/// becomes divisibility and sign tests on `i64`.
#[derive(Debug, Clone)]
pub struct WonderfulCounter {
    scale: i64,
    /// `d · A⁻¹`.
    to_roots: Vec<Vec<i64>>,
    /// `(degree, J_t, d · root coordinates of t * μ)`.
    elements: Vec<(usize, SimpleSet, Vec<i64>)>,
    top: usize,
}

impl WonderfulCounter {
    pub fn new(rd: &RootDatum, mu: &Weight) -> Result<Self, EngineError> {
        check_dominant_integral(rd, mu)?;
        let r = rd.rank();
        let a: Matrix<Rat> = rd.cartan().map(|&x| crate::rat(x));
        let inv = a.inverse().expect("Cartan matrices are invertible");
        let scale = a.determinant().to_integer().to_i64().expect("small determinant").abs();
        let to_roots: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let x = &inv[(i, j)] * crate::rat(scale);
                        debug_assert!(x.is_integer());
                        x.to_integer().to_i64().expect("small entry")
                    })
                    .collect()
            })
            .collect();
        let elements = rd
            .weyl_elements()
            .iter()
            .map(|t| {
                let nu = weight_to_i64(&rd.dot_action(t, mu)).expect("integral");
                (t.wonderful_degree(), t.descent_set(), mat_vec(&to_roots, &nu))
            })
            .collect();
        Ok(WonderfulCounter { scale, to_roots, elements, top: rd.group_dimension() })
    }

    /// `m^i_λ(μ)` for `0 ≤ i ≤ dim X`.
    pub fn degree_vector(&self, lambda: &[i64]) -> Vec<usize> {
        let l = mat_vec(&self.to_roots, lambda);
        let mut out = vec![0; self.top + 1];
        for (degree, j, tmu) in &self.elements {
            let ok = tmu.iter().zip(&l).enumerate().all(|(k, (a, b))| {
                let c = a - b;
                c % self.scale == 0 && if j.contains(k) { c >= self.scale } else { c <= 0 }
            });
            if ok {
                out[*degree] += 1;
            }
        }
        out
    }
}

fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchHit {
    pub lambda: Vec<i64>,
    pub multiplicities: Vec<usize>,
}

/// All integral `λ` with `‖λ‖∞ ≤ radius` whose closed-form multiplicity
/// vector at `μ` satisfies `target`, in lexicographic order of `λ`.
pub fn search_wonderful(rd: &RootDatum, mu: &Weight, target: &Target, radius: i64) -> Result<Vec<SearchHit>, EngineError> {
    let counter = WonderfulCounter::new(rd, mu)?;
    let lambdas = integer_box(rd.rank(), -radius, radius);
    Ok(lambdas
        .into_par_iter()
        .filter_map(|lambda| {
            let m = counter.degree_vector(&lambda);
            target.holds(&m).then_some(SearchHit { lambda, multiplicities: m })
        })
        .collect())
}

/// `{t * μ : t ∈ W, t * μ ∈ (λ + Q_{J_t}) ∩ P_{J_t}}`, computed by
/// enumerating `t` and, independently, as `⋃_J (λ + Q_J) ∩ P_J`
/// restricted to `W * μ`. The two must agree.
pub fn wonderful_support(rd: &RootDatum, mu: &Weight, lambda: &Weight) -> Result<BTreeSet<Weight>, EngineError> {
    check_dominant_integral(rd, mu)?;
    rd.check_rank(lambda)?;
    let by_element: BTreeSet<Weight> = rd
        .weyl_elements()
        .iter()
        .map(|t| (t, rd.dot_action(t, mu)))
        .filter(|(t, nu)| rd.in_qj(&nu.sub(lambda), t.descent_set()) && rd.in_pj(nu, t.descent_set()))
        .map(|(_, nu)| nu)
        .collect();
    let orbit: BTreeSet<Weight> = rd.weyl_elements().iter().map(|t| rd.dot_action(t, mu)).collect();
    let by_subset: BTreeSet<Weight> = SimpleSet::subsets(rd.rank())
        .flat_map(|j| {
            orbit
                .iter()
                .filter(move |nu| rd.in_qj(&nu.sub(lambda), j) && rd.in_pj(nu, j))
                .cloned()
        })
        .collect();
    if by_element != by_subset {
        return Err(EngineError::Inconsistent(format!(
            "{} weights by element, {} by subset",
            by_element.len(),
            by_subset.len()
        )));
    }
    Ok(by_element)
}

/// The ambient of a fan as a mode.
pub fn mode_of(fan: &ChamberFan) -> Mode {
    match fan.ambient() {
        Ambient::FullSpace(_) => Mode::Toric,
        Ambient::DominantChamber(_) => Mode::Regular,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Coweight;
    use proptest::prelude::*;

    fn rd(ty: &str) -> Arc<RootDatum> {
        Arc::new(RootDatum::adjoint(ty).unwrap())
    }

    fn blowup_h() -> PLFunction {
        let fan = ChamberFan::build_chamber_fan(
            rd("A2"),
            &[
                vec![Coweight::from_ints(&[1, 0]), Coweight::from_ints(&[1, 1])],
                vec![Coweight::from_ints(&[1, 1]), Coweight::from_ints(&[0, 1])],
            ],
        )
        .unwrap();
        PLFunction::build(Arc::new(fan), vec![Weight::from_ints(&[-5, 4]), Weight::from_ints(&[4, -5])]).unwrap()
    }

    fn wonderful_h(rd: &Arc<RootDatum>, lambda: &[i64]) -> PLFunction {
        PLFunction::linear(Arc::new(ChamberFan::wonderful(rd.clone())), Weight::from_ints(lambda)).unwrap()
    }

    #[test]
    fn blowup_m3_at_zero() {
        let rep = multiplicity(&blowup_h(), &Weight::zero(2), 3).unwrap();
        assert_eq!(rep.value, 2);
        assert_eq!(rep.chamber_term, 0);
        let nonzero: Vec<(&str, usize)> = rep.nonzero_terms().map(|t| (t.word.as_str(), t.value)).collect();
        assert_eq!(nonzero, vec![("s1", 1), ("s2", 1)]);
        assert_eq!(rep.breakdown_total(), rep.value);
    }

    #[test]
    fn blowup_off_lattice_is_zero() {
        let h = blowup_h();
        for i in 0..=8 {
            let rep = multiplicity(&h, &Weight::from_ints(&[1, 0]), i).unwrap();
            assert_eq!(rep.value, 0);
            assert!(!rep.in_lattice);
        }
    }

    #[test]
    fn projective_space_h3() {
        let a1 = rd("A1");
        assert_eq!(multiplicity(&wonderful_h(&a1, &[-4]), &Weight::zero(1), 3).unwrap().value, 1);
        assert_eq!(wonderful_multiplicity(&a1, &Weight::from_ints(&[-4]), &Weight::zero(1), 3).unwrap().value, 1);
    }

    #[test]
    fn degrees_out_of_range() {
        let a1 = rd("A1");
        let h = wonderful_h(&a1, &[-4]);
        assert_eq!(multiplicity(&h, &Weight::zero(1), 9).unwrap().value, 0);
        assert_eq!(multiplicities(&h, &Weight::zero(1)).unwrap().len(), 4);
    }

    #[test]
    fn preconditions() {
        let h = blowup_h();
        assert!(matches!(
            multiplicity(&h, &Weight::from_ints(&[-1, 0]), 0),
            Err(EngineError::RootSystem(RootSystemError::NotDominant(_)))
        ));
        let p1 = ChamberFan::build_complete_fan(1, &[vec![Coweight::from_ints(&[1])], vec![Coweight::from_ints(&[-1])]]).unwrap();
        let t = PLFunction::linear(Arc::new(p1), Weight::zero(1)).unwrap();
        assert!(matches!(multiplicity(&t, &Weight::zero(1), 0), Err(EngineError::ModeMismatch { .. })));
        assert!(matches!(toric_multiplicity(&h, &Weight::zero(2), 0), Err(EngineError::ModeMismatch { .. })));
    }

    #[test]
    fn trivial_bundle() {
        for ty in ["A1", "A2", "B2", "G2", "A3"] {
            let rd = rd(ty);
            let z = Weight::zero(rd.rank());
            assert_eq!(wonderful_multiplicity(&rd, &z, &z, 0).unwrap().value, 1, "{ty}");
        }
    }

    #[test]
    fn toric_projective_line() {
        let p1 = Arc::new(
            ChamberFan::build_complete_fan(1, &[vec![Coweight::from_ints(&[1])], vec![Coweight::from_ints(&[-1])]]).unwrap(),
        );
        let o2 = PLFunction::build(p1.clone(), vec![Weight::from_ints(&[2]), Weight::from_ints(&[0])]).unwrap();
        assert_eq!(toric_multiplicity(&o2, &Weight::from_ints(&[1]), 0).unwrap().value, 1);
        let om2 = PLFunction::build(p1, vec![Weight::from_ints(&[-2]), Weight::from_ints(&[0])]).unwrap();
        assert_eq!(toric_multiplicity(&om2, &Weight::from_ints(&[-1]), 1).unwrap().value, 1);
    }

    #[test]
    fn toric_canonical_p2() {
        let fan = ChamberFan::build_complete_fan(
            2,
            &[
                vec![Coweight::from_ints(&[1, 0]), Coweight::from_ints(&[0, 1])],
                vec![Coweight::from_ints(&[0, 1]), Coweight::from_ints(&[-1, -1])],
                vec![Coweight::from_ints(&[-1, -1]), Coweight::from_ints(&[1, 0])],
            ],
        )
        .unwrap();
        // h(u_ρ) = −1 on all three rays
        let h = PLFunction::build(
            Arc::new(fan),
            vec![Weight::from_ints(&[-1, -1]), Weight::from_ints(&[2, -1]), Weight::from_ints(&[-1, 2])],
        )
        .unwrap();
        assert_eq!(toric_multiplicity(&h, &Weight::zero(2), 2).unwrap().value, 1);
        let mut total = 0;
        for mu in integer_box(2, -3, 3) {
            total += toric_degree_vector(&h, &Weight::from_ints(&mu)).unwrap().iter().sum::<usize>();
        }
        assert_eq!(total, 1);
    }

    #[test]
    fn m0_examples() {
        let a1 = rd("A1");
        assert!(m0_characterization(&wonderful_h(&a1, &[2]), &Weight::zero(1)));
        assert!(!m0_characterization(&wonderful_h(&a1, &[2]), &Weight::from_ints(&[1])));
        assert!(!m0_characterization(&blowup_h(), &Weight::zero(2)));
    }

    #[test]
    fn m0_matches_general_degree_zero() {
        let h = blowup_h();
        for mu in dominant_box(2, 2) {
            let m0 = multiplicity(&h, &mu, 0).unwrap().value;
            assert_eq!(m0, usize::from(m0_characterization(&h, &mu)), "μ = {mu}");
        }
        let a2 = rd("A2");
        for l in integer_box(2, -2, 2) {
            let h = wonderful_h(&a2, &l);
            for mu in dominant_box(2, 2) {
                let m0 = multiplicity(&h, &mu, 0).unwrap().value;
                assert_eq!(m0, usize::from(m0_characterization(&h, &mu)));
            }
        }
    }

    #[test]
    fn decomposition_of_projective_space_sections() {
        let a1 = rd("A1");
        let t = decomposition_table(&wonderful_h(&a1, &[2]), 0..=0, 4).unwrap();
        let rows: Vec<(Weight, usize, BigInt)> = t.rows.iter().map(|r| (r.mu.clone(), r.value, r.dim_endo.clone().unwrap())).collect();
        assert_eq!(
            rows,
            vec![(Weight::zero(1), 1, BigInt::from(1)), (Weight::from_ints(&[2]), 1, BigInt::from(9))]
        );
        assert_eq!(t.totals, vec![(0, BigInt::from(10))]);
        let t = decomposition_table(&wonderful_h(&a1, &[1]), 0..=0, 4).unwrap();
        assert_eq!(t.totals, vec![(0, BigInt::from(4))]);
        assert_eq!(t.warning, BOX_WARNING);
    }

    #[test]
    fn blowup_table_contains_m3_at_zero() {
        let t = decomposition_table(&blowup_h(), 3..=3, 2).unwrap();
        assert!(t.rows.iter().any(|r| r.mu == Weight::zero(2) && r.value == 2));
    }

    #[test]
    fn small_oracle_sweep() {
        let report = check_wonderful_oracle(&rd("A2"), 1, 1, 8).unwrap();
        assert_eq!(report.triples, 9 * 4 * 9);
        assert!(report.mismatches.is_empty(), "{:?}", report.mismatches);
    }

    #[test]
    fn target_parsing() {
        let t: Target = "m10>0,m11>0".parse().unwrap();
        assert_eq!(t.0.len(), 2);
        assert_eq!(t.0[0], Condition { degree: 10, op: Comparison::Gt, value: 0 });
        assert_eq!("m5=3".parse::<Condition>().unwrap().op, Comparison::Eq);
        assert_eq!("m3>=1".parse::<Condition>().unwrap().op, Comparison::Ge);
        assert!("x5=3".parse::<Target>().is_err());
        assert!("m=3".parse::<Target>().is_err());
    }

    #[test]
    fn a1_search() {
        let a1 = rd("A1");
        let hits = search_wonderful(&a1, &Weight::zero(1), &"m3>=1".parse().unwrap(), 6).unwrap();
        let lambdas: Vec<i64> = hits.iter().map(|h| h.lambda[0]).collect();
        assert_eq!(lambdas, vec![-6, -4]);
    }

    #[test]
    fn support_two_paths() {
        let a1 = rd("A1");
        assert_eq!(
            wonderful_support(&a1, &Weight::zero(1), &Weight::zero(1)).unwrap(),
            BTreeSet::from([Weight::zero(1)])
        );
        assert_eq!(
            wonderful_support(&a1, &Weight::zero(1), &Weight::from_ints(&[-4])).unwrap(),
            BTreeSet::from([Weight::from_ints(&[-2])])
        );
        assert_eq!(
            wonderful_support(&rd("A2"), &Weight::zero(2), &Weight::zero(2)).unwrap(),
            BTreeSet::from([Weight::zero(2)])
        );
    }

    #[test]
    fn scaled_fan_gives_same_multiplicities() {
        let h = blowup_h();
        let scaled = ChamberFan::build_chamber_fan(rd("A2"), &h.fan().scaled_input(3)).unwrap();
        let h3 = PLFunction::build(Arc::new(scaled), h.pieces().to_vec()).unwrap();
        for mu in dominant_box(2, 1) {
            let a: Vec<usize> = multiplicities(&h, &mu).unwrap().iter().map(|r| r.value).collect();
            let b: Vec<usize> = multiplicities(&h3, &mu).unwrap().iter().map(|r| r.value).collect();
            assert_eq!(a, b);
        }
    }

    fn types() -> impl Strategy<Value = &'static str> {
        prop::sample::select(vec!["A1", "A1xA1", "A2", "B2", "G2", "A3", "B3", "C3"])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fast_counter_matches_rational_route(
            ty in types(),
            lambda in prop::collection::vec(-6i64..=6, 3),
            mu in prop::collection::vec(0i64..=3, 3),
        ) {
            let rd = rd(ty);
            let r = rd.rank();
            let (l, m) = (Weight::from_ints(&lambda[..r]), Weight::from_ints(&mu[..r]));
            let counter = WonderfulCounter::new(&rd, &m).unwrap();
            prop_assert_eq!(counter.degree_vector(&lambda[..r]), wonderful_degree_vector(&rd, &l, &m));
        }

        #[test]
        fn closed_form_invariants(
            ty in types(),
            lambda in prop::collection::vec(-5i64..=5, 3),
            mu in prop::collection::vec(0i64..=3, 3),
        ) {
            let rd = rd(ty);
            let r = rd.rank();
            let v = wonderful_degree_vector(&rd, &Weight::from_ints(&lambda[..r]), &Weight::from_ints(&mu[..r]));
            prop_assert!(v.iter().sum::<usize>() as u64 <= rd.cartan_type().weyl_order());
            prop_assert_eq!(v[1] + v[2] + v.get(4).copied().unwrap_or(0), 0);
            prop_assert!(v[3] <= 1);
            if r <= 2 {
                prop_assert!(v.iter().all(|&m| m <= 1));
            }
        }

        #[test]
        fn report_breakdown_sums(lambda in prop::collection::vec(-3i64..=3, 2), mu in prop::collection::vec(0i64..=2, 2), i in 0usize..=8) {
            let rd = rd("B2");
            let rep = wonderful_multiplicity(&rd, &Weight::from_ints(&lambda), &Weight::from_ints(&mu), i).unwrap();
            prop_assert_eq!(rep.breakdown_total(), rep.value);
            let h = wonderful_h(&rd, &lambda);
            let rep = multiplicity(&h, &Weight::from_ints(&mu), i).unwrap();
            prop_assert_eq!(rep.breakdown_total(), rep.value);
        }
    }
}
