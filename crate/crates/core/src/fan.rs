//! Smooth fans subdividing the dominant chamber (or all of `𝓨_ℝ` in the
//! torus case) and piecewise-linear functions adapted to them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::rootsys::{LatticeKind, RootDatum, Weight};
use crate::{Coweight, Rat};

/// A primitive integer generator in coweight coordinates.
pub type Ray = Vec<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("fan has no cones")]
    NoCones,
    #[error("cone {cone}: expected {expected} generators, got {got}")]
    GeneratorCount { cone: usize, expected: usize, got: usize },
    #[error("cone {cone}: generator {generator} has {got} coordinates, expected {expected}")]
    GeneratorLength { cone: usize, generator: usize, expected: usize, got: usize },
    #[error("cone {cone}: generator {generator} is zero")]
    ZeroGenerator { cone: usize, generator: usize },
    #[error("cone {cone}: generator {generator} {ray} lies outside the dominant chamber")]
    OutsideChamber { cone: usize, generator: usize, ray: Coweight },
    #[error("cone {cone} is not smooth (|det| = {det})")]
    NonSmooth { cone: usize, det: BigInt },
    #[error("cones {first} and {second} are equal")]
    DuplicateCone { first: usize, second: usize },
    #[error("coverage gap: facet {facet} of cone {cone} is not shared with another cone")]
    CoverageGap { cone: usize, facet: String },
    #[error("overlap: {detail}")]
    Overlap { detail: String },
    #[error("expected {expected} assignments (one per maximal cone), got {got}")]
    AssignmentCount { expected: usize, got: usize },
    #[error("cone {cone}: weight has {got} coordinates, expected {expected}")]
    WeightLength { cone: usize, expected: usize, got: usize },
    #[error("cone {cone}: h_σ = {weight} is not integral")]
    NonIntegral { cone: usize, weight: Weight },
    #[error("h is discontinuous across the face {face} shared by cones {first} and {second}")]
    Discontinuous { first: usize, second: usize, face: String },
    #[error("coweight {0} lies outside the support of the fan")]
    OutsideSupport(Coweight),
    #[error("fan mode mismatch: {0}")]
    ModeMismatch(String),
}

/// Where the fan lives.
#[derive(Debug, Clone)]
pub enum Ambient {
    /// Subdivision of the dominant chamber of a root datum.
    DominantChamber(Arc<RootDatum>),
    /// Complete fan in `ℝ^r` (the torus case).
    FullSpace(usize),
}

impl Ambient {
    pub fn rank(&self) -> usize {
        match self {
            Ambient::DominantChamber(rd) => rd.rank(),
            Ambient::FullSpace(r) => *r,
        }
    }

    pub fn root_datum(&self) -> Option<&Arc<RootDatum>> {
        match self {
            Ambient::DominantChamber(rd) => Some(rd),
            Ambient::FullSpace(_) => None,
        }
    }

    /// Coefficients `c` with `⟨λ, n⟩ = Σ c_i n_i`.
    pub fn functional(&self, w: &Weight) -> Vec<Rat> {
        match self {
            Ambient::DominantChamber(rd) => rd.root_coords(w),
            Ambient::FullSpace(_) => w.coords.clone(),
        }
    }

    pub fn pairing(&self, w: &Weight, n: &Coweight) -> Rat {
        dot(&self.functional(w), &n.coords)
    }

    /// `ν ∈ 𝓧` (`ℤ^r` in the torus case).
    pub fn in_character_lattice(&self, w: &Weight) -> bool {
        match self {
            Ambient::DominantChamber(rd) => rd.in_lattice(w, LatticeKind::Character),
            Ambient::FullSpace(_) => w.is_integral(),
        }
    }

    /// Integrality of a linear piece `h_σ`: integer values on the
    /// cocharacter lattice of the simply connected cover (`h_σ ∈ P`), or
    /// `h_σ ∈ ℤ^r` in the torus case.
    pub fn is_integral_piece(&self, w: &Weight) -> bool {
        w.is_integral()
    }

    /// Simple-root indices `α` with `⟨α, n⟩ = 0` for the ray (empty in the
    /// torus case, where there are no walls).
    pub fn walls_of(&self, ray: &[BigInt]) -> u32 {
        match self {
            Ambient::DominantChamber(_) => ray
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_zero())
                .fold(0, |m, (i, _)| m | (1 << i)),
            Ambient::FullSpace(_) => 0,
        }
    }
}

pub(crate) fn dot(f: &[Rat], n: &[BigInt]) -> Rat {
    f.iter()
        .zip(n)
        .filter(|(_, x)| !x.is_zero())
        .fold(Rat::zero(), |acc, (a, x)| acc + a * Rat::from_integer(x.clone()))
}

/// Divide by the gcd of the entries. The zero vector is returned as is.
pub fn primitive(v: &[BigInt]) -> Ray {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Primitive integer vector on the ray through a rational vector.
pub fn primitive_from_rat(v: &[Rat]) -> Ray {
    let l = v.iter().fold(BigInt::from(1), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    primitive(&ints)
}

fn ray_string(rays: &[Ray], ids: &[usize]) -> String {
    let parts: Vec<String> = ids
        .iter()
        .map(|&i| Coweight::new(rays[i].clone()).to_string())
        .collect();
    format!("⟨{}⟩", parts.join(", "))
}

/// A validated smooth simplicial fan.
#[derive(Debug, Clone)]
pub struct ChamberFan {
    ambient: Ambient,
    rays: Vec<Ray>,
    cones: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
}

impl PartialEq for ChamberFan {
    fn eq(&self, other: &Self) -> bool {
        let canon = |f: &ChamberFan| -> BTreeSet<Vec<Ray>> {
            f.cones
                .iter()
                .map(|c| c.iter().map(|&i| f.rays[i].clone()).collect())
                .collect()
        };
        self.ambient.rank() == other.ambient.rank()
            && matches!(
                (&self.ambient, &other.ambient),
                (Ambient::DominantChamber(_), Ambient::DominantChamber(_))
                    | (Ambient::FullSpace(_), Ambient::FullSpace(_))
            )
            && canon(self) == canon(other)
    }
}

impl ChamberFan {
    /// Validates a subdivision of the dominant chamber.
    pub fn build_chamber_fan(rd: Arc<RootDatum>, cones: &[Vec<Coweight>]) -> Result<Self, FanError> {
        Self::build(Ambient::DominantChamber(rd), cones)
    }

    /// Validates a complete fan in `ℝ^rank`.
    pub fn build_complete_fan(rank: usize, cones: &[Vec<Coweight>]) -> Result<Self, FanError> {
        Self::build(Ambient::FullSpace(rank), cones)
    }

    /// The trivial subdivision `{C⁺}` (wonderful compactification).
    pub fn wonderful(rd: Arc<RootDatum>) -> Self {
        let r = rd.rank();
        let cone: Vec<Coweight> = (0..r)
            .map(|i| Coweight::new((0..r).map(|j| BigInt::from(i64::from(i == j))).collect()))
            .collect();
        Self::build_chamber_fan(rd, &[cone]).expect("the chamber itself is a valid fan")
    }

    pub fn build(ambient: Ambient, cones: &[Vec<Coweight>]) -> Result<Self, FanError> {
        let r = ambient.rank();
        if cones.is_empty() {
            return Err(FanError::NoCones);
        }
        let mut canonical: Vec<Vec<Ray>> = Vec::with_capacity(cones.len());
        for (ci, cone) in cones.iter().enumerate() {
            if cone.len() != r {
                return Err(FanError::GeneratorCount { cone: ci, expected: r, got: cone.len() });
            }
            let mut rays = Vec::with_capacity(r);
            for (gi, g) in cone.iter().enumerate() {
                if g.coords.len() != r {
                    return Err(FanError::GeneratorLength {
                        cone: ci,
                        generator: gi,
                        expected: r,
                        got: g.coords.len(),
                    });
                }
                if g.coords.iter().all(Zero::is_zero) {
                    return Err(FanError::ZeroGenerator { cone: ci, generator: gi });
                }
                if matches!(ambient, Ambient::DominantChamber(_)) && g.coords.iter().any(Signed::is_negative) {
                    return Err(FanError::OutsideChamber { cone: ci, generator: gi, ray: g.clone() });
                }
                rays.push(primitive(&g.coords));
            }
            let det = Matrix::from_cols(&rays).determinant();
            if det.abs() != BigInt::from(1) {
                return Err(FanError::NonSmooth { cone: ci, det: det.abs() });
            }
            rays.sort();
            canonical.push(rays);
        }
        for i in 0..canonical.len() {
            for j in i + 1..canonical.len() {
                if canonical[i] == canonical[j] {
                    return Err(FanError::DuplicateCone { first: i, second: j });
                }
            }
        }
        let ray_set: BTreeSet<Ray> = canonical.iter().flatten().cloned().collect();
        let rays: Vec<Ray> = ray_set.into_iter().collect();
        let index: HashMap<&Ray, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let cone_ids: Vec<Vec<usize>> = canonical
            .iter()
            .map(|c| {
                let mut ids: Vec<usize> = c.iter().map(|r| index[r]).collect();
                ids.sort();
                ids
            })
            .collect();
        let fan = ChamberFan {
            faces: all_faces(&cone_ids),
            ambient,
            rays,
            cones: cone_ids,
        };
        fan.check_subdivision()?;
        Ok(fan)
    }

    fn check_subdivision(&self) -> Result<(), FanError> {
        let r = self.rank();
        // facet -> [(cone, opposite ray)]
        let mut facets: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        for (ci, cone) in self.cones.iter().enumerate() {
            for k in 0..r {
                let mut f = cone.clone();
                let opposite = f.remove(k);
                facets.entry(f).or_default().push((ci, opposite));
            }
        }
        let mut normals: Vec<Vec<Rat>> = Vec::new();
        let mut sorted: Vec<_> = facets.into_iter().collect();
        sorted.sort();
        for (facet, owners) in &sorted {
            let normal = self.facet_normal(facet);
            let in_wall = self.ambient.walls_of_set(facet.iter().map(|&i| &self.rays[i])) != 0;
            match (in_wall, owners.len()) {
                (true, 1) => {}
                (true, _) => {
                    return Err(FanError::Overlap {
                        detail: format!(
                            "wall facet {} is shared by {} cones",
                            ray_string(&self.rays, facet),
                            owners.len()
                        ),
                    })
                }
                (false, 1) => {
                    return Err(FanError::CoverageGap {
                        cone: owners[0].0,
                        facet: ray_string(&self.rays, facet),
                    })
                }
                (false, 2) => {
                    let s0 = dot(&normal, &self.rays[owners[0].1]).is_positive();
                    let s1 = dot(&normal, &self.rays[owners[1].1]).is_positive();
                    if s0 == s1 {
                        return Err(FanError::Overlap {
                            detail: format!(
                                "cones {} and {} lie on the same side of their common facet {}",
                                owners[0].0,
                                owners[1].0,
                                ray_string(&self.rays, facet)
                            ),
                        });
                    }
                }
                (false, n) => {
                    return Err(FanError::Overlap {
                        detail: format!("facet {} is shared by {n} cones", ray_string(&self.rays, facet)),
                    })
                }
            }
            normals.push(normal);
        }
        // With the facet conditions above, the number of cones containing
        // a point is locally constant off the codimension-2 skeleton, so a
        // single generic point certifies a proper subdivision.
        let p = generic_point(&self.ambient, &normals);
        let count = self
            .cones
            .iter()
            .filter(|c| {
                self.cone_coefficients(c, &p)
                    .is_some_and(|x| x.iter().all(Signed::is_positive))
            })
            .count();
        match count {
            1 => Ok(()),
            0 => Err(FanError::CoverageGap {
                cone: 0,
                facet: format!("point {} is not covered", Coweight::new(p)),
            }),
            n => Err(FanError::Overlap {
                detail: format!("point {} is covered by {n} cones", Coweight::new(p)),
            }),
        }
    }

    /// Linear functional vanishing on the facet (nonzero).
    fn facet_normal(&self, facet: &[usize]) -> Vec<Rat> {
        let rows: Vec<Vec<Rat>> = facet
            .iter()
            .map(|&i| self.rays[i].iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        let m = if rows.is_empty() {
            Matrix::zeros(0, self.rank())
        } else {
            Matrix::from_rows(&rows)
        };
        m.kernel().into_iter().next().expect("facet spans a hyperplane")
    }

    /// Coefficients of `p` in the basis of the cone's generators.
    fn cone_coefficients(&self, cone: &[usize], p: &[BigInt]) -> Option<Vec<Rat>> {
        let cols: Vec<Vec<Rat>> = cone
            .iter()
            .map(|&i| self.rays[i].iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        let m = Matrix::from_cols(&cols);
        m.solve(&p.iter().map(|x| Rat::from_integer(x.clone())).collect::<Vec<_>>())
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn rank(&self) -> usize {
        self.ambient.rank()
    }

    pub fn root_datum(&self) -> Option<&Arc<RootDatum>> {
        self.ambient.root_datum()
    }

    pub fn is_full_space(&self) -> bool {
        matches!(self.ambient, Ambient::FullSpace(_))
    }

    /// Canonical (sorted, primitive) rays.
    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    /// Maximal cones as sorted ray indices, in input order.
    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone_rays(&self, cone: usize) -> Vec<&Ray> {
        self.cones[cone].iter().map(|&i| &self.rays[i]).collect()
    }

    /// Every nonzero face of every maximal cone, as sorted ray indices,
    /// ordered by dimension then lexicographically.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Index of a maximal cone containing `n`, if any.
    pub fn containing_cone(&self, n: &Coweight) -> Option<usize> {
        (0..self.cones.len()).find(|&c| {
            self.cone_coefficients(&self.cones[c], &n.coords)
                .is_some_and(|x| x.iter().all(|v| !v.is_negative()))
        })
    }

    /// The same fan with every generator multiplied by `k`; the result is
    /// canonicalized back to primitive generators.
    pub fn scaled_input(&self, k: i64) -> Vec<Vec<Coweight>> {
        self.cones
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&i| Coweight::new(self.rays[i].iter().map(|x| x * k).collect()))
                    .collect()
            })
            .collect()
    }
}

impl Ambient {
    fn walls_of_set<'a>(&self, rays: impl Iterator<Item = &'a Ray>) -> u32 {
        rays.fold(u32::MAX, |m, r| m & self.walls_of(r))
            & match self {
                Ambient::DominantChamber(rd) => ((1u64 << rd.rank()) - 1) as u32,
                Ambient::FullSpace(_) => 0,
            }
    }
}

fn all_faces(cones: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut set: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for cone in cones {
        for mask in 1u32..(1 << cone.len()) {
            let face: Vec<usize> = cone
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &r)| r)
                .collect();
            set.insert((face.len(), face));
        }
    }
    set.into_iter().map(|(_, f)| f).collect()
}

/// A point of the ambient support lying on none of the given hyperplanes.
fn generic_point(ambient: &Ambient, normals: &[Vec<Rat>]) -> Vec<BigInt> {
    let r = ambient.rank();
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    loop {
        let p: Vec<BigInt> = (0..r)
            .map(|_| {
                state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
                let v = ((state >> 33) % 97) as i64;
                match ambient {
                    Ambient::DominantChamber(_) => BigInt::from(v + 1),
                    Ambient::FullSpace(_) => BigInt::from(v - 48),
                }
            })
            .collect();
        if p.iter().any(|x| !x.is_zero()) && normals.iter().all(|n| !dot(n, &p).is_zero()) {
            return p;
        }
    }
}

/// A piecewise-linear function adapted to a fan: one linear piece per
/// maximal cone.
#[derive(Debug, Clone)]
pub struct PLFunction {
    fan: Arc<ChamberFan>,
    pieces: Vec<Weight>,
    functionals: Vec<Vec<Rat>>,
}

impl PartialEq for PLFunction {
    fn eq(&self, other: &Self) -> bool {
        *self.fan == *other.fan && self.pieces == other.pieces
    }
}

impl PLFunction {
    /// Validates continuity and integrality; `assignments[i]` is the
    /// piece on `fan.cones()[i]`.
    pub fn build(fan: Arc<ChamberFan>, assignments: Vec<Weight>) -> Result<Self, FanError> {
        let r = fan.rank();
        if assignments.len() != fan.cones.len() {
            return Err(FanError::AssignmentCount {
                expected: fan.cones.len(),
                got: assignments.len(),
            });
        }
        for (ci, w) in assignments.iter().enumerate() {
            if w.rank() != r {
                return Err(FanError::WeightLength { cone: ci, expected: r, got: w.rank() });
            }
            if !fan.ambient.is_integral_piece(w) {
                return Err(FanError::NonIntegral { cone: ci, weight: w.clone() });
            }
        }
        let functionals: Vec<Vec<Rat>> = assignments.iter().map(|w| fan.ambient.functional(w)).collect();
        for i in 0..fan.cones.len() {
            for j in i + 1..fan.cones.len() {
                let common: Vec<usize> = fan.cones[i]
                    .iter()
                    .filter(|x| fan.cones[j].contains(x))
                    .copied()
                    .collect();
                let agrees = common
                    .iter()
                    .all(|&k| dot(&functionals[i], &fan.rays[k]) == dot(&functionals[j], &fan.rays[k]));
                if !agrees {
                    return Err(FanError::Discontinuous {
                        first: i,
                        second: j,
                        face: ray_string(&fan.rays, &common),
                    });
                }
            }
        }
        Ok(PLFunction {
            fan,
            pieces: assignments,
            functionals,
        })
    }

    /// The function with the given values on [`ChamberFan::rays`], extended
    /// linearly on each cone.
    pub fn from_ray_values(fan: Arc<ChamberFan>, values: &[Rat]) -> Result<Self, FanError> {
        if values.len() != fan.rays.len() {
            return Err(FanError::AssignmentCount {
                expected: fan.rays.len(),
                got: values.len(),
            });
        }
        let pieces = fan
            .cones
            .iter()
            .map(|cone| {
                let rows: Vec<Vec<Rat>> = cone
                    .iter()
                    .map(|&k| fan.rays[k].iter().map(|x| Rat::from_integer(x.clone())).collect())
                    .collect();
                let rhs: Vec<Rat> = cone.iter().map(|&k| values[k].clone()).collect();
                let f = Matrix::from_rows(&rows).solve(&rhs).expect("cone generators are independent");
                match &fan.ambient {
                    Ambient::DominantChamber(rd) => rd.from_root_coords(&f),
                    Ambient::FullSpace(_) => Weight::new(f),
                }
            })
            .collect();
        Self::build(fan, pieces)
    }

    /// The linear function `λ` on every cone.
    pub fn linear(fan: Arc<ChamberFan>, lambda: Weight) -> Result<Self, FanError> {
        let n = fan.cones.len();
        Self::build(fan, vec![lambda; n])
    }

    pub fn fan(&self) -> &Arc<ChamberFan> {
        &self.fan
    }

    pub fn pieces(&self) -> &[Weight] {
        &self.pieces
    }

    pub fn piece(&self, cone: usize) -> &Weight {
        &self.pieces[cone]
    }

    /// Coefficients of `h_σ` against coweight coordinates.
    pub fn functional(&self, cone: usize) -> &[Rat] {
        &self.functionals[cone]
    }

    /// Whether all pieces coincide (h is linear).
    pub fn is_linear(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0] == w[1])
    }

    /// `h(n)`.
    pub fn eval(&self, n: &Coweight) -> Result<Rat, FanError> {
        let cone = self
            .fan
            .containing_cone(n)
            .ok_or_else(|| FanError::OutsideSupport(n.clone()))?;
        Ok(dot(&self.functionals[cone], &n.coords))
    }

    /// `μ ∈ h + 𝓧`: `μ − h_σ ∈ 𝓧` for every maximal cone.
    pub fn in_h_plus_x(&self, mu: &Weight) -> bool {
        self.pieces
            .iter()
            .all(|h| self.fan.ambient.in_character_lattice(&mu.sub(h)))
    }
}

impl fmt::Display for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pieces.iter().map(|w| w.to_string()).collect();
        write!(f, "[{}]", parts.join(" | "))
    }
}
