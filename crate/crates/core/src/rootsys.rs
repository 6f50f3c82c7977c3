//! Root data of finite type, Weyl group enumeration, the dot action and
//! the lattice cones `Q_t`, `P_J`, `Q_J`.
//!
//! Conventions: the Cartan matrix is `A[i][j] = ⟨α_i^∨, α_j⟩` with
//! Bourbaki numbering. Weights live in fundamental-weight coordinates, so
//! `⟨λ, α_i^∨⟩` is simply the `i`-th coordinate and the simple root `α_j`
//! is column `j` of `A`. Coweights live in fundamental-coweight
//! coordinates, so the dominant chamber is the nonnegative orthant and
//! `⟨α_i, n⟩ = n_i`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{solve_integral, Matrix};
use crate::{rat, Rat};

/// Largest Weyl group we are willing to enumerate.
pub const MAX_WEYL_ORDER: u64 = 51_840;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    #[error("invalid Cartan type {0}")]
    InvalidType(String),
    #[error("Weyl group of {0} has order {1}, above the supported limit {MAX_WEYL_ORDER}")]
    TooLarge(String, u64),
    #[error("lattice generator {0} is not integral on the coroots")]
    NonIntegralGenerator(usize),
    #[error("simple root {0} is not in the span of the lattice generators")]
    RootNotInLattice(usize),
    #[error("lattice generators must have {expected} coordinates, got {got}")]
    GeneratorLength { expected: usize, got: usize },
    #[error("weight {0} is not dominant")]
    NotDominant(Weight),
    #[error("weight {0} is not integral")]
    NotIntegral(Weight),
    #[error("weight has {got} coordinates, expected {expected}")]
    WrongRank { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl FromStr for Series {
    type Err = RootSystemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "A" => Series::A,
            "B" => Series::B,
            "C" => Series::C,
            "D" => Series::D,
            "E" => Series::E,
            "F" => Series::F,
            "G" => Series::G,
            other => return Err(RootSystemError::InvalidType(other.to_string())),
        })
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A (possibly reducible) Cartan type such as `A2` or `A1xA1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CartanType {
    components: Vec<(Series, usize)>,
}

impl CartanType {
    pub fn simple(series: Series, rank: usize) -> Result<Self, RootSystemError> {
        let valid = match series {
            Series::A => rank >= 1,
            Series::B | Series::C => rank >= 2,
            Series::D => rank >= 4,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        };
        if !valid {
            return Err(RootSystemError::InvalidType(format!("{series}{rank}")));
        }
        let ty = CartanType {
            components: vec![(series, rank)],
        };
        ty.check_size()?;
        Ok(ty)
    }

    pub fn product(factors: Vec<CartanType>) -> Result<Self, RootSystemError> {
        let ty = CartanType {
            components: factors.into_iter().flat_map(|f| f.components).collect(),
        };
        if ty.components.is_empty() {
            return Err(RootSystemError::InvalidType("empty product".into()));
        }
        ty.check_size()?;
        Ok(ty)
    }

    /// Parses `"A2"`, `"g2"`, `"A1xA1"`, `"B3 x A1"`.
    pub fn parse(s: &str) -> Result<Self, RootSystemError> {
        let factors = s
            .split(['x', 'X', '×'])
            .map(|part| {
                let part = part.trim();
                let bad = || RootSystemError::InvalidType(s.to_string());
                let series: Series = part.get(..1).ok_or_else(bad)?.parse()?;
                let rank: usize = part[1..].trim().parse().map_err(|_| bad())?;
                CartanType::simple(series, rank)
            })
            .collect::<Result<Vec<_>, _>>()?;
        CartanType::product(factors)
    }

    /// Parses a series letter plus rank, or a full type string whose rank
    /// must then match.
    pub fn from_series_rank(series: &str, rank: usize) -> Result<Self, RootSystemError> {
        if series.trim().len() == 1 {
            return CartanType::simple(series.parse()?, rank);
        }
        let ty = CartanType::parse(series)?;
        if ty.rank() != rank {
            return Err(RootSystemError::InvalidType(format!(
                "{series} has rank {}, not {rank}",
                ty.rank()
            )));
        }
        Ok(ty)
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.1).sum()
    }

    pub fn components(&self) -> &[(Series, usize)] {
        &self.components
    }

    /// Order of the Weyl group from the classical formulas.
    pub fn weyl_order(&self) -> u64 {
        self.components
            .iter()
            .map(|&(s, n)| {
                let fact = |k: usize| (1..=k as u64).product::<u64>();
                match s {
                    Series::A => fact(n + 1),
                    Series::B | Series::C => (1u64 << n) * fact(n),
                    Series::D => (1u64 << (n - 1)) * fact(n),
                    Series::E => match n {
                        6 => 51_840,
                        7 => 2_903_040,
                        _ => 696_729_600,
                    },
                    Series::F => 1152,
                    Series::G => 12,
                }
            })
            .fold(1u64, |a, b| a.saturating_mul(b))
    }

    fn check_size(&self) -> Result<(), RootSystemError> {
        let order = self.weyl_order();
        if order > MAX_WEYL_ORDER {
            return Err(RootSystemError::TooLarge(self.to_string(), order));
        }
        Ok(())
    }

    /// Block-diagonal Cartan matrix, `A[i][j] = ⟨α_i^∨, α_j⟩`.
    pub fn cartan_matrix(&self) -> Matrix<i64> {
        let r = self.rank();
        let mut a = Matrix::zeros(r, r);
        let mut offset = 0;
        for &(series, n) in &self.components {
            let block = simple_cartan(series, n);
            for i in 0..n {
                for j in 0..n {
                    a[(offset + i, offset + j)] = block[(i, j)];
                }
            }
            offset += n;
        }
        a
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(s, n)| format!("{s}{n}"))
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

fn simple_cartan(series: Series, n: usize) -> Matrix<i64> {
    let mut a = Matrix::<i64>::identity(n).map(|x| 2 * x);
    let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
        a[(i, j)] = aij;
        a[(j, i)] = aji;
    };
    match series {
        Series::A => (0..n - 1).for_each(|i| link(i, i + 1, -1, -1)),
        Series::B => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            // α_n short
            link(n - 2, n - 1, -1, -2);
        }
        Series::C => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            // α_n long
            link(n - 2, n - 1, -2, -1);
        }
        Series::D => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 3, n - 1, -1, -1);
        }
        Series::E => {
            // Bourbaki: 1-3-4-5-6-7-8 with 2 attached to 4.
            link(0, 2, -1, -1);
            link(1, 3, -1, -1);
            (2..n - 1).for_each(|i| link(i, i + 1, -1, -1));
        }
        Series::F => {
            link(0, 1, -1, -1);
            // α1, α2 long; α3, α4 short
            link(1, 2, -1, -2);
            link(2, 3, -1, -1);
        }
        Series::G => {
            // α1 short, α2 long
            link(0, 1, -3, -1);
        }
    }
    a
}

/// Which lattice a weight is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    /// Root lattice `Q`.
    Root,
    /// The character lattice `𝓧` of the root datum.
    Character,
    /// Weight lattice `P`.
    Weight,
}

/// Choice of character lattice `Q ⊆ 𝓧 ⊆ P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeChoice {
    Adjoint,
    SimplyConnected,
    /// Generators in fundamental-weight coordinates.
    Generators(Vec<Vec<Rat>>),
}

/// A weight in fundamental-weight coordinates (or standard coordinates of
/// `ℤ^r` in the torus case).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub coords: Vec<Rat>,
}

impl Weight {
    pub fn new(coords: Vec<Rat>) -> Self {
        Weight { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Weight {
            coords: coords.iter().map(|&c| rat(c)).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        Weight {
            coords: vec![Rat::zero(); rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rat) -> Weight {
        Weight::new(self.coords.iter().map(|a| a * k).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A coweight in fundamental-coweight coordinates (standard coordinates in
/// the torus case).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coweight {
    pub coords: Vec<BigInt>,
}

impl Coweight {
    pub fn new(coords: Vec<BigInt>) -> Self {
        Coweight { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Coweight {
            coords: coords.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A set of simple roots, as a bitmask over their indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SimpleSet(pub u32);

impl SimpleSet {
    pub fn empty() -> Self {
        SimpleSet(0)
    }

    pub fn all(rank: usize) -> Self {
        SimpleSet(((1u64 << rank) - 1) as u32)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        SimpleSet(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersects(self, other: SimpleSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// All subsets of `{0, …, rank-1}`.
    pub fn subsets(rank: usize) -> impl Iterator<Item = SimpleSet> {
        (0..1u32 << rank).map(SimpleSet)
    }
}

impl fmt::Display for SimpleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// An element of the Weyl group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    index: usize,
    word: Vec<usize>,
    matrix: Matrix<i64>,
    inverse: Matrix<i64>,
    descent: SimpleSet,
}

impl WeylElement {
    /// Position in the enumeration order (identity is 0).
    pub fn index(&self) -> usize {
        self.index
    }

    /// Lexicographically smallest reduced word, 0-based simple indices.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Action on fundamental-weight coordinates.
    pub fn matrix(&self) -> &Matrix<i64> {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &Matrix<i64> {
        &self.inverse
    }

    /// `J_t = {α ∈ Δ : t⁻¹(α) < 0}`.
    pub fn descent_set(&self) -> SimpleSet {
        self.descent
    }

    /// Degree `2 l(t) + |J_t|` at which `t` contributes on the wonderful
    /// compactification.
    pub fn wonderful_degree(&self) -> usize {
        2 * self.length() + self.descent.len()
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        Weight::new(apply_int(&self.matrix, &w.coords))
    }

    /// `s1s2…` with 1-based indices, `1` for the identity.
    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "1".to_string()
        } else {
            self.word.iter().map(|i| format!("s{}", i + 1)).collect()
        }
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word_string())
    }
}

fn apply_int(m: &Matrix<i64>, v: &[Rat]) -> Vec<Rat> {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .zip(v)
                .filter(|(a, _)| **a != 0)
                .fold(Rat::zero(), |acc, (a, b)| acc + b * rat(*a))
        })
        .collect()
}

/// Combinatorial data of a connected reductive group with maximal torus.
#[derive(Debug)]
pub struct RootDatum {
    cartan_type: CartanType,
    cartan: Matrix<i64>,
    cartan_inv: Matrix<Rat>,
    lattice: LatticeChoice,
    /// Columns generate 𝓧 in fundamental-weight coordinates.
    lattice_gens: Matrix<Rat>,
    /// Positive roots in simple-root coordinates, ordered by height then
    /// lexicographically.
    positive_roots: Vec<Vec<i64>>,
    /// `d_i` with `d_i A[i][j]` symmetric; proportional to `(α_i, α_i)`.
    symmetrizer: Vec<Rat>,
    weyl: OnceLock<WeylGroup>,
}

#[derive(Debug)]
struct WeylGroup {
    elements: Vec<WeylElement>,
    lookup: HashMap<Matrix<i64>, usize>,
}

impl RootDatum {
    pub fn new(cartan_type: CartanType, lattice: LatticeChoice) -> Result<Self, RootSystemError> {
        let r = cartan_type.rank();
        let cartan = cartan_type.cartan_matrix();
        let cartan_rat = cartan.map(|&x| rat(x));
        let cartan_inv = cartan_rat.inverse().expect("Cartan matrices are invertible");
        let lattice_gens = match &lattice {
            LatticeChoice::Adjoint => cartan_rat.clone(),
            LatticeChoice::SimplyConnected => Matrix::identity(r),
            LatticeChoice::Generators(rows) => {
                for row in rows {
                    if row.len() != r {
                        return Err(RootSystemError::GeneratorLength {
                            expected: r,
                            got: row.len(),
                        });
                    }
                }
                if let Some(i) = rows.iter().position(|g| g.iter().any(|c| !c.is_integer())) {
                    return Err(RootSystemError::NonIntegralGenerator(i));
                }
                let gens = Matrix::from_cols(rows);
                for j in 0..r {
                    if solve_integral(&gens, &cartan_rat.col(j)).is_none() {
                        return Err(RootSystemError::RootNotInLattice(j));
                    }
                }
                gens
            }
        };
        let positive_roots = positive_roots(&cartan);
        let symmetrizer = symmetrizer(&cartan);
        Ok(RootDatum {
            cartan_type,
            cartan,
            cartan_inv,
            lattice,
            lattice_gens,
            positive_roots,
            symmetrizer,
            weyl: OnceLock::new(),
        })
    }

    /// `build_root_datum(series, rank, lattice_choice)`.
    pub fn build(series: &str, rank: usize, lattice: LatticeChoice) -> Result<Self, RootSystemError> {
        RootDatum::new(CartanType::from_series_rank(series, rank)?, lattice)
    }

    /// Adjoint root datum of the given type string, e.g. `"A2"`.
    pub fn adjoint(ty: &str) -> Result<Self, RootSystemError> {
        RootDatum::new(CartanType::parse(ty)?, LatticeChoice::Adjoint)
    }

    pub fn cartan_type(&self) -> &CartanType {
        &self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan.rows()
    }

    pub fn cartan(&self) -> &Matrix<i64> {
        &self.cartan
    }

    pub fn lattice(&self) -> &LatticeChoice {
        &self.lattice
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    /// `dim G = |Φ| + r`, which is also the dimension of any
    /// compactification.
    pub fn group_dimension(&self) -> usize {
        2 * self.positive_roots.len() + self.rank()
    }

    pub fn simple_root(&self, i: usize) -> Weight {
        Weight::new(self.cartan.col(i).into_iter().map(rat).collect())
    }

    pub fn fundamental_weight(&self, i: usize) -> Weight {
        let mut c = vec![Rat::zero(); self.rank()];
        c[i] = Rat::one();
        Weight::new(c)
    }

    pub fn rho(&self) -> Weight {
        Weight::new(vec![Rat::one(); self.rank()])
    }

    /// A root given in simple-root coordinates, as a weight.
    pub fn root_weight(&self, root_coords: &[i64]) -> Weight {
        Weight::new(apply_int(&self.cartan, &root_coords.iter().map(|&c| rat(c)).collect::<Vec<_>>()))
    }

    /// Coordinates of `λ` in the basis of simple roots.
    pub fn root_coords(&self, w: &Weight) -> Vec<Rat> {
        self.cartan_inv.mul_vec(&w.coords)
    }

    pub fn from_root_coords(&self, gamma: &[Rat]) -> Weight {
        Weight::new(apply_int(&self.cartan, gamma))
    }

    /// `⟨λ, n⟩` for a weight and a coweight.
    pub fn pairing(&self, w: &Weight, n: &Coweight) -> Rat {
        self.root_coords(w)
            .iter()
            .zip(&n.coords)
            .fold(Rat::zero(), |acc, (g, x)| acc + g * Rat::from_integer(x.clone()))
    }

    pub fn is_dominant(&self, w: &Weight) -> bool {
        w.coords.iter().all(|c| !c.is_negative())
    }

    pub fn in_lattice(&self, w: &Weight, which: LatticeKind) -> bool {
        match which {
            LatticeKind::Weight => w.is_integral(),
            LatticeKind::Root => self.root_coords(w).iter().all(|c| c.is_integer()),
            LatticeKind::Character => match self.lattice {
                LatticeChoice::Adjoint => self.in_lattice(w, LatticeKind::Root),
                LatticeChoice::SimplyConnected => w.is_integral(),
                LatticeChoice::Generators(_) => {
                    w.is_integral() && solve_integral(&self.lattice_gens, &w.coords).is_some()
                }
            },
        }
    }

    fn weyl_group(&self) -> &WeylGroup {
        self.weyl.get_or_init(|| enumerate_weyl(&self.cartan, &self.cartan_inv))
    }

    /// All elements of `W`, identity first, ordered by length and then by
    /// lexicographically smallest reduced word.
    pub fn weyl_elements(&self) -> &[WeylElement] {
        &self.weyl_group().elements
    }

    pub fn identity(&self) -> &WeylElement {
        &self.weyl_elements()[0]
    }

    pub fn simple_reflection(&self, i: usize) -> &WeylElement {
        &self.weyl_elements()[i + 1]
    }

    pub fn longest_element(&self) -> &WeylElement {
        self.weyl_elements().last().expect("W is nonempty")
    }

    /// The product `w · v`.
    pub fn compose(&self, w: &WeylElement, v: &WeylElement) -> &WeylElement {
        let g = self.weyl_group();
        let m = &w.matrix * &v.matrix;
        &g.elements[g.lookup[&m]]
    }

    /// `w * λ = w(λ + ρ) − ρ`.
    pub fn dot_action(&self, w: &WeylElement, lambda: &Weight) -> Weight {
        let rho = self.rho();
        w.apply(&lambda.add(&rho)).sub(&rho)
    }

    pub fn descent_set(&self, t: &WeylElement) -> SimpleSet {
        t.descent
    }

    /// Whether `ν ∈ Q_t`: `ν ∈ Q` with simple-root coefficients `≥ 1` on
    /// `J_t` and `≤ 0` off it.
    pub fn in_qt(&self, nu: &Weight, t: &WeylElement) -> bool {
        self.in_qj(nu, t.descent)
    }

    /// `ν ∈ Q_J`: integral root coordinates, positive exactly on `J`.
    pub fn in_qj(&self, nu: &Weight, j: SimpleSet) -> bool {
        self.root_coords(nu).iter().enumerate().all(|(i, g)| {
            g.is_integer() && (g.is_positive() == j.contains(i))
        })
    }

    /// `ν ∈ P_J`: integral weight coordinates, `< −1` exactly on `J`.
    pub fn in_pj(&self, nu: &Weight, j: SimpleSet) -> bool {
        let minus_one = -Rat::one();
        nu.coords
            .iter()
            .enumerate()
            .all(|(i, p)| p.is_integer() && ((p < &minus_one) == j.contains(i)))
    }

    /// `⟨λ, γ^∨⟩` for a positive root `γ` in simple-root coordinates.
    pub fn coroot_pairing(&self, w: &Weight, gamma: &[i64]) -> Rat {
        let r = self.rank();
        let num = (0..r).fold(Rat::zero(), |acc, j| {
            acc + &w.coords[j] * rat(gamma[j]) * &self.symmetrizer[j]
        });
        let mut norm = Rat::zero();
        for i in 0..r {
            for j in 0..r {
                norm += rat(gamma[i] * gamma[j] * self.cartan[(i, j)]) * &self.symmetrizer[i];
            }
        }
        rat(2) * num / norm
    }

    /// Weyl dimension formula `∏ ⟨μ+ρ, γ^∨⟩ / ⟨ρ, γ^∨⟩`.
    pub fn weyl_dimension(&self, mu: &Weight) -> Result<BigInt, RootSystemError> {
        self.check_rank(mu)?;
        if !mu.is_integral() {
            return Err(RootSystemError::NotIntegral(mu.clone()));
        }
        if !self.is_dominant(mu) {
            return Err(RootSystemError::NotDominant(mu.clone()));
        }
        let rho = self.rho();
        let shifted = mu.add(&rho);
        let dim = self.positive_roots.iter().fold(Rat::one(), |acc, g| {
            acc * self.coroot_pairing(&shifted, g) / self.coroot_pairing(&rho, g)
        });
        debug_assert!(dim.is_integer());
        Ok(dim.to_integer())
    }

    pub fn check_rank(&self, w: &Weight) -> Result<(), RootSystemError> {
        if w.rank() != self.rank() {
            return Err(RootSystemError::WrongRank {
                expected: self.rank(),
                got: w.rank(),
            });
        }
        Ok(())
    }

    /// Whether the positive root `γ` (simple-root coordinates) is sent to a
    /// negative root by `w`.
    pub fn sends_negative(&self, w: &WeylElement, gamma: &[i64]) -> bool {
        let image = w.apply(&self.root_weight(gamma));
        self.root_coords(&image).iter().any(|c| c.is_negative())
    }

    /// The set `{2 l(t) + |J_t| : t ∈ W}`.
    pub fn wonderful_degrees(&self) -> BTreeSet<usize> {
        self.weyl_elements().iter().map(|t| t.wonderful_degree()).collect()
    }
}

fn positive_roots(cartan: &Matrix<i64>) -> Vec<Vec<i64>> {
    let r = cartan.rows();
    let simple: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut seen: BTreeSet<Vec<i64>> = simple.iter().cloned().collect();
    let mut queue: VecDeque<Vec<i64>> = simple.into_iter().collect();
    while let Some(beta) = queue.pop_front() {
        for i in 0..r {
            let pairing: i64 = (0..r).map(|j| cartan[(i, j)] * beta[j]).sum();
            let mut image = beta.clone();
            image[i] -= pairing;
            if seen.insert(image.clone()) {
                queue.push_back(image);
            }
        }
    }
    let mut pos: Vec<Vec<i64>> = seen.into_iter().filter(|b| b.iter().all(|&c| c >= 0)).collect();
    pos.sort_by_key(|b| (b.iter().sum::<i64>(), b.clone()));
    pos
}

fn symmetrizer(cartan: &Matrix<i64>) -> Vec<Rat> {
    let r = cartan.rows();
    let mut d: Vec<Option<Rat>> = vec![None; r];
    for start in 0..r {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Rat::one());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..r {
                if i != j && cartan[(i, j)] != 0 && d[j].is_none() {
                    let di = d[i].clone().expect("visited");
                    d[j] = Some(di * rat(cartan[(i, j)]) / rat(cartan[(j, i)]));
                    stack.push(j);
                }
            }
        }
    }
    d.into_iter().map(|x| x.expect("all visited")).collect()
}

fn reflection_matrix(cartan: &Matrix<i64>, i: usize) -> Matrix<i64> {
    let r = cartan.rows();
    Matrix::from_fn(r, r, |k, l| i64::from(k == l) - if l == i { cartan[(k, i)] } else { 0 })
}

fn enumerate_weyl(cartan: &Matrix<i64>, cartan_inv: &Matrix<Rat>) -> WeylGroup {
    let r = cartan.rows();
    let gens: Vec<Matrix<i64>> = (0..r).map(|i| reflection_matrix(cartan, i)).collect();
    let id = Matrix::<i64>::identity(r);
    let mut lookup = HashMap::new();
    lookup.insert(id.clone(), 0);
    let mut raw: Vec<(Vec<usize>, Matrix<i64>, Matrix<i64>)> = vec![(vec![], id.clone(), id)];
    let mut level_start = 0;
    // Breadth-first by length; within a level, elements are discovered in
    // lexicographic order of their smallest reduced words.
    loop {
        let level_end = raw.len();
        for idx in level_start..level_end {
            for (j, s) in gens.iter().enumerate() {
                let m = &raw[idx].1 * s;
                if lookup.contains_key(&m) {
                    continue;
                }
                let inv = s * &raw[idx].2;
                let mut word = raw[idx].0.clone();
                word.push(j);
                lookup.insert(m.clone(), raw.len());
                raw.push((word, m, inv));
            }
        }
        if raw.len() == level_end {
            break;
        }
        level_start = level_end;
    }
    let simple_roots: Vec<Vec<Rat>> = (0..r).map(|i| cartan.col(i).into_iter().map(rat).collect()).collect();
    let elements = raw
        .into_iter()
        .enumerate()
        .map(|(index, (word, matrix, inverse))| {
            let descent = SimpleSet::from_indices((0..r).filter(|&i| {
                let image = apply_int(&inverse, &simple_roots[i]);
                cartan_inv.mul_vec(&image).iter().any(|c| c.is_negative())
            }));
            WeylElement {
                index,
                word,
                matrix,
                inverse,
                descent,
            }
        })
        .collect();
    WeylGroup { elements, lookup }
}

/// Integer vector helper for tests and callers: `ν.coords` as `i64`.
pub fn weight_to_i64(w: &Weight) -> Option<Vec<i64>> {
    w.coords
        .iter()
        .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
        .collect()
}
