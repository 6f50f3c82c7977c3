//! Relative simplicial cohomology of sign regions.
//!
//! An open region `V` of a refined fan (the union of open cells of one
//! sign) is modelled by the full subcomplex of the order complex of the
//! nonzero-cell poset spanned by those cells. Dimensions are ranks of
//! relative coboundary matrices over the rationals.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::refine::{Cell, LabeledComplex, Sign};
use crate::rootsys::SimpleSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("simplex {0:?} of the subcomplex is not a simplex of the complex")]
    NotSubcomplex(Vec<usize>),
}

/// A finite abstract simplicial complex, closed under taking faces.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    /// Sorted vertex tuples ordered by size, then lexicographically.
    simplices: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex::default()
    }

    /// The closure of the given simplices under faces.
    pub fn from_maximal(maximal: &[Vec<usize>]) -> Self {
        let mut all = std::collections::BTreeSet::new();
        for s in maximal {
            let mut s = s.clone();
            s.sort();
            s.dedup();
            for mask in 1u64..(1 << s.len()) {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                all.insert((face.len(), face));
            }
        }
        SimplicialComplex {
            simplices: all.into_iter().map(|(_, s)| s).collect(),
        }
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.simplices.iter().filter(|s| s.len() == 1).map(|s| s[0]).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.last().map(|s| s.len() - 1)
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.simplices
            .binary_search_by(|s| (s.len(), s.as_slice()).cmp(&(simplex.len(), simplex)))
            .is_ok()
    }

    /// Number of simplices of each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dimension().map_or(0, |d| d + 1)];
        for s in &self.simplices {
            f[s.len() - 1] += 1;
        }
        f
    }
}

/// Dimensions of a cohomology group in each degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairDims {
    pub dims: Vec<usize>,
}

impl PairDims {
    pub fn zeros(len: usize) -> Self {
        PairDims { dims: vec![0; len] }
    }

    /// Dimension in degree `j`; zero for negative or out-of-range degrees.
    pub fn get(&self, j: i64) -> usize {
        usize::try_from(j).ok().and_then(|j| self.dims.get(j).copied()).unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(j, &d)| if j % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }
}

/// Full subcomplex of the order complex of the nonzero cells of `lc`,
/// spanned by the cells accepted by `filter`. Vertices are cell indices.
pub fn order_complex(lc: &LabeledComplex, filter: impl Fn(&Cell) -> bool) -> SimplicialComplex {
    let cells = lc.cells();
    let keep: Vec<bool> = cells.iter().map(&filter).collect();
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    // cells are ordered by dimension, so chains listed bottom-up are sorted
    let mut stack: Vec<Vec<usize>> = (0..cells.len()).filter(|&c| keep[c]).map(|c| vec![c]).collect();
    while let Some(chain) = stack.pop() {
        let top = *chain.last().expect("chains are nonempty");
        for &up in lc.cofaces_of(top) {
            if keep[up] {
                let mut longer = chain.clone();
                longer.push(up);
                stack.push(longer);
            }
        }
        simplices.push(chain);
    }
    simplices.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    SimplicialComplex { simplices }
}

/// Combinatorial Euler characteristic of `K ∖ L`.
pub fn relative_euler_characteristic(k: &SimplicialComplex, l: &SimplicialComplex) -> i64 {
    k.simplices
        .iter()
        .filter(|s| !l.contains(s))
        .map(|s| if s.len() % 2 == 1 { 1 } else { -1 })
        .sum()
}

/// `dim H^j(K, L; ℚ)` for `0 ≤ j ≤ max_degree`.
pub fn relative_dims(k: &SimplicialComplex, l: &SimplicialComplex, max_degree: usize) -> Result<PairDims, CohomologyError> {
    if let Some(s) = l.simplices.iter().find(|s| !k.contains(s)) {
        return Err(CohomologyError::NotSubcomplex(s.clone()));
    }
    let top = k.dimension().map_or(0, |d| d + 1);
    // relative cochain bases, by dimension
    let mut basis: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); top];
    for s in k.simplices.iter().filter(|s| !l.contains(s)) {
        basis[s.len() - 1].push(s);
    }
    // rank of the coboundary C^j → C^{j+1}
    let mut ranks = vec![0usize; top];
    for j in 0..top.saturating_sub(1) {
        let (lower, upper) = (&basis[j], &basis[j + 1]);
        if lower.is_empty() || upper.is_empty() {
            continue;
        }
        let index: HashMap<&[usize], usize> = lower.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let mut m = vec![vec![BigInt::zero(); lower.len()]; upper.len()];
        for (row, s) in upper.iter().enumerate() {
            for drop in 0..s.len() {
                let mut face = (*s).clone();
                face.remove(drop);
                if let Some(&col) = index.get(face.as_slice()) {
                    m[row][col] = BigInt::from(if drop % 2 == 0 { 1 } else { -1 });
                }
            }
        }
        ranks[j] = Matrix::from_rows(&m).rank();
    }
    let dims = (0..=max_degree)
        .map(|j| {
            if j >= top {
                return 0;
            }
            let before = if j == 0 { 0 } else { ranks[j - 1] };
            basis[j].len() - ranks[j] - before
        })
        .collect();
    Ok(PairDims { dims })
}

fn positive(cell: &Cell) -> bool {
    cell.sign == Sign::Positive
}

/// `dim H^j(V, V ∩ ⋃_{α∈J} α^⊥)` where `V` is the positive region of `lc`.
pub fn pair_dims_v_w(lc: &LabeledComplex, j: SimpleSet, max_degree: usize) -> PairDims {
    let n = order_complex(lc, positive);
    if n.is_empty() {
        return PairDims::zeros(max_degree + 1);
    }
    let nw = order_complex(lc, |c| positive(c) && c.walls.intersects(j));
    relative_dims(&n, &nw, max_degree).expect("a filtered full subcomplex is a subcomplex")
}

/// `dim H^i(A, V)` where `A` is the (contractible) support of the fan and
/// `V` its positive region.
pub fn chamber_rel_dims(lc: &LabeledComplex, max_degree: usize) -> PairDims {
    let n = order_complex(lc, positive);
    let mut dims = vec![0; max_degree + 1];
    if n.is_empty() {
        dims[0] = 1;
        return PairDims { dims };
    }
    let absolute = relative_dims(&n, &SimplicialComplex::empty(), max_degree).expect("empty subcomplex");
    for i in 1..=max_degree {
        let reduced = absolute.dims[i - 1] - usize::from(i == 1);
        dims[i] = reduced;
    }
    PairDims { dims }
}

/// Euler consistency of a computed pair: the alternating sum of the
/// dimensions equals the alternating simplex count of `K ∖ L`.
pub fn check_euler(k: &SimplicialComplex, l: &SimplicialComplex) -> Result<(), String> {
    let top = k.dimension().unwrap_or(0);
    let dims = relative_dims(k, l, top).map_err(|e| e.to_string())?;
    let expected = relative_euler_characteristic(k, l);
    if dims.euler_characteristic() == expected {
        Ok(())
    } else {
        Err(format!("Euler mismatch: dims {:?} give {}, simplices give {expected}", dims.dims, dims.euler_characteristic()))
    }
}

/// Euler consistency for every pair the multiplicity formula builds from
/// `lc`: `(N, ∅)` and `(N, N_J)` for each nonempty `J ⊆ Δ` of the given rank.
pub fn check_euler_all(lc: &LabeledComplex, rank: usize) -> Result<(), String> {
    let n = order_complex(lc, positive);
    check_euler(&n, &SimplicialComplex::empty())?;
    for j in SimpleSet::subsets(rank).filter(|j| !j.is_empty()) {
        let nw = order_complex(lc, |c| positive(c) && c.walls.intersects(j));
        check_euler(&n, &nw)?;
    }
    Ok(())
}
