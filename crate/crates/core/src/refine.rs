//! Simplicial refinement of a fan along the zero set of
//! `g(n) = ⟨ν, n⟩ − h(n)`.
//!
//! Every maximal cone whose generators take both signs under its own
//! linear piece of `g` is cut by the hyperplane `g = 0`. The new rays are
//! the primitive points where edges with opposite-sign endpoints cross
//! the hyperplane; each half is re-triangulated by a placing triangulation
//! over its rays in lexicographic order. Since `g` agrees on shared faces
//! and placing triangulations restrict to placing triangulations of faces,
//! both sides of a shared face get the same subdivision.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fan::{dot, primitive_from_rat, Ambient, ChamberFan, PLFunction, Ray};
use crate::linalg::Matrix;
use crate::rootsys::{SimpleSet, Weight};
use crate::{Coweight, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefineError {
    #[error("the piecewise-linear function is not adapted to this fan")]
    FanMismatch,
    #[error("weight has {got} coordinates, expected {expected}")]
    WrongRank { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: &Rat) -> Sign {
        if x.is_positive() {
            Sign::Positive
        } else if x.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        })
    }
}

/// A nonzero simplicial cone of the refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    /// Sorted indices into [`LabeledComplex::rays`].
    pub rays: Vec<usize>,
    /// Sign of `g` on the relative interior.
    pub sign: Sign,
    /// Simple roots `α` with the cell contained in `α^⊥`.
    pub walls: SimpleSet,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.rays.len()
    }
}

/// A simplicial fan refining the input fan, labelled by the sign of `g`
/// and by wall membership. The apex is not a cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledComplex {
    rank: usize,
    rays: Vec<Ray>,
    ray_values: Vec<Rat>,
    cells: Vec<Cell>,
    /// Proper nonzero faces of each cell, as cell indices.
    faces: Vec<Vec<usize>>,
    /// Cells strictly containing each cell.
    cofaces: Vec<Vec<usize>>,
    /// Maximal cells with the input cone they subdivide.
    maximal: Vec<(usize, usize)>,
}

/// Placing triangulation of vectors spanning a pointed cone, processed in
/// the given order. Returns index sets of the maximal simplicial cones.
pub fn placing_triangulation(points: &[Vec<Rat>]) -> Vec<Vec<usize>> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let r = first.len();
    let mut simplices: Vec<Vec<usize>> = vec![vec![0]];
    let mut basis: Vec<Vec<Rat>> = vec![first.clone()];
    for (k, p) in points.iter().enumerate().skip(1) {
        let mut extended = basis.clone();
        extended.push(p.clone());
        if Matrix::from_rows(&extended).rank() > basis.len() {
            basis = extended;
            for s in &mut simplices {
                s.push(k);
            }
            continue;
        }
        let d = basis.len();
        // boundary facets of the current triangulation
        let mut facets: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (si, s) in simplices.iter().enumerate() {
            for drop in 0..d {
                let mut f = s.clone();
                let v = f.remove(drop);
                facets.entry(f).or_default().push((si, v));
            }
        }
        let mut added = Vec::new();
        for (f, owners) in facets {
            if owners.len() != 1 {
                continue;
            }
            let opposite = owners[0].1;
            let mut rows: Vec<Vec<Rat>> = f.iter().map(|&i| points[i].clone()).collect();
            rows.push(points[opposite].clone());
            let mut rhs = vec![Rat::zero(); rows.len()];
            *rhs.last_mut().expect("nonempty") = Rat::one();
            let normal = Matrix::from_rows(&rows)
                .solve(&rhs)
                .expect("simplex vertices are independent");
            let side = p.iter().zip(&normal).fold(Rat::zero(), |acc, (a, b)| acc + a * b);
            if side.is_negative() {
                let mut s = f;
                s.push(k);
                added.push(s);
            }
        }
        debug_assert!(!added.is_empty(), "point {k} is inside the current hull");
        debug_assert!(d == r || !added.is_empty());
        simplices.extend(added);
    }
    for s in &mut simplices {
        s.sort();
    }
    simplices.sort();
    simplices
}

fn to_rat(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

/// Refines `fan` so that `g = ⟨ν,·⟩ − h` has constant sign on every
/// open cell.
pub fn graph_refinement(fan: &ChamberFan, h: &PLFunction, nu: &Weight) -> Result<LabeledComplex, RefineError> {
    if !std::ptr::eq(fan, Arc::as_ptr(h.fan())) && fan != h.fan().as_ref() {
        return Err(RefineError::FanMismatch);
    }
    refine(h, nu)
}

/// [`graph_refinement`] on the fan `h` is adapted to.
pub fn refine(h: &PLFunction, nu: &Weight) -> Result<LabeledComplex, RefineError> {
    let fan = h.fan();
    let r = fan.rank();
    if nu.rank() != r {
        return Err(RefineError::WrongRank { expected: r, got: nu.rank() });
    }
    let nu_f = fan.ambient().functional(nu);
    let mut values: BTreeMap<Ray, Rat> = BTreeMap::new();
    // (input cone, sorted rays of one maximal simplex)
    let mut pieces: Vec<(usize, Vec<Ray>)> = Vec::new();

    for (ci, cone) in fan.cones().iter().enumerate() {
        let g: Vec<Rat> = nu_f.iter().zip(h.functional(ci)).map(|(a, b)| a - b).collect();
        let gens: Vec<(&Ray, Rat)> = cone
            .iter()
            .map(|&i| {
                let ray = &fan.rays()[i];
                (ray, dot(&g, ray))
            })
            .collect();
        for (ray, v) in &gens {
            values.entry((*ray).clone()).or_insert_with(|| v.clone());
        }
        let pos: Vec<&(&Ray, Rat)> = gens.iter().filter(|(_, v)| v.is_positive()).collect();
        let neg: Vec<&(&Ray, Rat)> = gens.iter().filter(|(_, v)| v.is_negative()).collect();
        if pos.is_empty() || neg.is_empty() {
            let mut rays: Vec<Ray> = gens.iter().map(|(ray, _)| (*ray).clone()).collect();
            rays.sort();
            pieces.push((ci, rays));
            continue;
        }
        let mut cuts: BTreeSet<Ray> = BTreeSet::new();
        for (p, gp) in &pos {
            for (q, gq) in &neg {
                let w: Vec<Rat> = p
                    .iter()
                    .zip(q.iter())
                    .map(|(pi, qi)| gp * Rat::from_integer(qi.clone()) - gq * Rat::from_integer(pi.clone()))
                    .collect();
                cuts.insert(primitive_from_rat(&w));
            }
        }
        for c in &cuts {
            values.entry(c.clone()).or_insert_with(Rat::zero);
        }
        let zero: Vec<Ray> = gens
            .iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(ray, _)| (*ray).clone())
            .collect();
        for side in [&pos, &neg] {
            let mut rays: Vec<Ray> = side.iter().map(|(ray, _)| (*ray).clone()).collect();
            rays.extend(zero.iter().cloned());
            rays.extend(cuts.iter().cloned());
            rays.sort();
            let pts: Vec<Vec<Rat>> = rays.iter().map(|x| to_rat(x)).collect();
            for simplex in placing_triangulation(&pts) {
                pieces.push((ci, simplex.iter().map(|&i| rays[i].clone()).collect()));
            }
        }
    }

    let rays: Vec<Ray> = values.keys().cloned().collect();
    let ray_values: Vec<Rat> = values.into_values().collect();
    let index: HashMap<&Ray, usize> = rays.iter().enumerate().map(|(i, x)| (x, i)).collect();

    let mut cell_set: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    let mut maximal_raw: Vec<(Vec<usize>, usize)> = Vec::new();
    for (ci, simplex) in &pieces {
        let mut ids: Vec<usize> = simplex.iter().map(|x| index[x]).collect();
        ids.sort();
        for mask in 1u32..(1 << ids.len()) {
            let face: Vec<usize> = ids
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &x)| x)
                .collect();
            cell_set.insert((face.len(), face));
        }
        maximal_raw.push((ids, *ci));
    }
    let ambient = fan.ambient();
    let cells: Vec<Cell> = cell_set
        .into_iter()
        .map(|(_, ids)| {
            let signs: BTreeSet<Sign> = ids.iter().map(|&i| Sign::of(&ray_values[i])).collect();
            let sign = if signs.contains(&Sign::Positive) {
                Sign::Positive
            } else if signs.contains(&Sign::Negative) {
                Sign::Negative
            } else {
                Sign::Zero
            };
            debug_assert!(!(signs.contains(&Sign::Positive) && signs.contains(&Sign::Negative)));
            let walls = ids
                .iter()
                .fold(full_wall_mask(ambient), |m, &i| m & ambient.walls_of(&rays[i]));
            Cell {
                rays: ids,
                sign,
                walls: SimpleSet(walls),
            }
        })
        .collect();
    let cell_index: HashMap<&[usize], usize> = cells.iter().enumerate().map(|(i, c)| (c.rays.as_slice(), i)).collect();
    let mut faces: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
    let mut cofaces: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
    for (ci, cell) in cells.iter().enumerate() {
        let n = cell.rays.len();
        for mask in 1u32..((1 << n) - 1) {
            let face: Vec<usize> = cell
                .rays
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &x)| x)
                .collect();
            let fi = cell_index[face.as_slice()];
            faces[ci].push(fi);
            cofaces[fi].push(ci);
        }
        faces[ci].sort();
    }
    for c in &mut cofaces {
        c.sort();
    }
    let mut maximal: Vec<(usize, usize)> = maximal_raw
        .into_iter()
        .map(|(ids, origin)| (cell_index[ids.as_slice()], origin))
        .collect();
    maximal.sort();

    Ok(LabeledComplex {
        rank: r,
        rays,
        ray_values,
        cells,
        faces,
        cofaces,
        maximal,
    })
}

fn full_wall_mask(ambient: &Ambient) -> u32 {
    match ambient {
        Ambient::DominantChamber(rd) => SimpleSet::all(rd.rank()).0,
        Ambient::FullSpace(_) => 0,
    }
}

impl LabeledComplex {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    /// `g` at each ray.
    pub fn ray_values(&self) -> &[Rat] {
        &self.ray_values
    }

    /// Cells ordered by dimension, then lexicographically by ray indices.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn faces_of(&self, cell: usize) -> &[usize] {
        &self.faces[cell]
    }

    pub fn cofaces_of(&self, cell: usize) -> &[usize] {
        &self.cofaces[cell]
    }

    /// `(maximal cell, input cone)` pairs.
    pub fn maximal_cells(&self) -> &[(usize, usize)] {
        &self.maximal
    }

    /// Whether `V = {g > 0}` is empty.
    pub fn positive_region_is_empty(&self) -> bool {
        self.cells.iter().all(|c| c.sign != Sign::Positive)
    }

    pub fn cell_rays(&self, cell: usize) -> Vec<&Ray> {
        self.cells[cell].rays.iter().map(|&i| &self.rays[i]).collect()
    }

    /// Structural checks: label closure, face matching and exact volume
    /// preservation per input cone. Returns a description of the first
    /// violation.
    pub fn check_invariants(&self, h: &PLFunction, nu: &Weight) -> Result<(), String> {
        let fan = h.fan();
        let ambient = fan.ambient();
        // label closure and wall monotonicity
        for (ci, cell) in self.cells.iter().enumerate() {
            for &f in &self.faces[ci] {
                let face = &self.cells[f];
                if cell.sign != Sign::Positive && face.sign == Sign::Positive {
                    return Err(format!("cell {ci} is nonpositive but its face {f} is positive"));
                }
                if face.walls.0 & cell.walls.0 != cell.walls.0 {
                    return Err(format!("wall set of face {f} does not contain that of cell {ci}"));
                }
            }
            let expected_walls = SimpleSet(
                cell.rays
                    .iter()
                    .fold(full_wall_mask(ambient), |m, &i| m & ambient.walls_of(&self.rays[i])),
            );
            if expected_walls != cell.walls {
                return Err(format!("cell {ci} has wrong wall set"));
            }
        }
        // sign at the generator-sum barycenter, via the fan's own h
        for (ci, cell) in self.cells.iter().enumerate() {
            let mut bary = vec![BigInt::zero(); self.rank];
            for &i in &cell.rays {
                for (b, x) in bary.iter_mut().zip(&self.rays[i]) {
                    *b += x;
                }
            }
            let n = Coweight::new(bary);
            let g = ambient.pairing(nu, &n) - h.eval(&n).map_err(|e| e.to_string())?;
            if Sign::of(&g) != cell.sign {
                return Err(format!("cell {ci}: barycenter sign {} but label {}", Sign::of(&g), cell.sign));
            }
            let opposite = cell.rays.iter().any(|&i| match cell.sign {
                Sign::Positive => self.ray_values[i].is_negative(),
                Sign::Negative => self.ray_values[i].is_positive(),
                Sign::Zero => !self.ray_values[i].is_zero(),
            });
            if opposite {
                return Err(format!("cell {ci} has a generator of the opposite sign"));
            }
        }
        // every maximal cell is full-dimensional and simplicial
        for &(m, _) in &self.maximal {
            if self.cells[m].dim() != self.rank {
                return Err(format!("maximal cell {m} is not full-dimensional"));
            }
        }
        // face matching on codimension-one cells
        let maximal_ids: BTreeSet<usize> = self.maximal.iter().map(|&(m, _)| m).collect();
        for (ci, cell) in self.cells.iter().enumerate() {
            if cell.dim() + 1 != self.rank {
                continue;
            }
            let owners = self.cofaces[ci].iter().filter(|c| maximal_ids.contains(c)).count();
            let interior = cell.walls.is_empty();
            let ok = if interior { owners == 2 } else { owners == 1 };
            if !ok {
                return Err(format!(
                    "codimension-one cell {ci} ({}) is a face of {owners} maximal cells",
                    if interior { "interior" } else { "boundary" }
                ));
            }
        }
        // exact volume per input cone
        for (ci, cone) in fan.cones().iter().enumerate() {
            let gens: Vec<Vec<Rat>> = cone.iter().map(|&i| to_rat(&fan.rays()[i])).collect();
            // ℓ with ℓ(v) = 1 on the generators of the input cone
            let ell = Matrix::from_rows(&gens)
                .solve(&vec![Rat::one(); gens.len()])
                .expect("cone generators are independent");
            let measure = |rays: &[&Ray]| -> Rat {
                let det = Matrix::from_cols(&rays.iter().map(|x| to_rat(x)).collect::<Vec<_>>()).determinant();
                rays.iter().fold(det.abs(), |acc, x| acc / dot(&ell, x))
            };
            let input_rays: Vec<&Ray> = cone.iter().map(|&i| &fan.rays()[i]).collect();
            let total = self
                .maximal
                .iter()
                .filter(|&&(_, o)| o == ci)
                .fold(Rat::zero(), |acc, &(m, _)| acc + measure(&self.cell_rays(m)));
            if total != measure(&input_rays) {
                return Err(format!("input cone {ci}: refined measure {total} differs from {}", measure(&input_rays)));
            }
        }
        Ok(())
    }

    /// Samples random points in the relative interiors of random cells and
    /// compares the sign of `⟨ν, n⟩ − h(n)` (evaluated through the fan) to
    /// the cell label.
    pub fn check_sign_soundness(&self, h: &PLFunction, nu: &Weight, samples: usize, seed: u64) -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ambient = h.fan().ambient();
        for _ in 0..samples {
            let ci = rng.gen_range(0..self.cells.len());
            let cell = &self.cells[ci];
            let mut n = vec![BigInt::zero(); self.rank];
            for &i in &cell.rays {
                let k = BigInt::from(rng.gen_range(1..=20i64));
                for (a, x) in n.iter_mut().zip(&self.rays[i]) {
                    *a += &k * x;
                }
            }
            let n = Coweight::new(n);
            let g = ambient.pairing(nu, &n) - h.eval(&n).map_err(|e| e.to_string())?;
            if Sign::of(&g) != cell.sign {
                return Err(format!("point {n} in cell {ci}: sign {} but label {}", Sign::of(&g), cell.sign));
            }
        }
        Ok(())
    }
}
