//! Exact dense matrices over integral domains and fields.
//!
//! Everything here is generic over the scalar through `num-traits`; the
//! crate root fixes the concrete choices (`Rat`, `IntMatrix`, ...). Ranks
//! and determinants use fraction-free (Bareiss) elimination, so they are
//! exact for `BigInt` as well as for rational scalars.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Exact, ExactField};
use crate::Rat;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = (0..self.rows)
            .map(|r| &self.data[r * self.cols..(r + 1) * self.cols])
            .collect();
        f.debug_struct("Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("entries", &rows)
            .finish()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<T>]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }
}

impl<T: Clone + Zero + One> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        Matrix::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).fold(T::zero(), |acc, k| {
                acc + self[(r, k)].clone() * rhs[(k, c)].clone()
            })
        })
    }
}

impl<T: Exact> Matrix<T> {
    /// Fraction-free forward elimination. Returns the echelon form, the
    /// pivot columns and the parity of the row swaps performed.
    fn bareiss(&self) -> (Matrix<T>, Vec<usize>, bool) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut prev = T::one();
        let mut swapped = false;
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..a.cols {
                    a.data.swap(p * a.cols + c, row * a.cols + c);
                }
                swapped = !swapped;
            }
            let pivot = a[(row, col)].clone();
            for r in row + 1..a.rows {
                let factor = a[(r, col)].clone();
                for c in col + 1..a.cols {
                    let v = (a[(r, c)].clone() * pivot.clone()
                        - factor.clone() * a[(row, c)].clone())
                        / prev.clone();
                    a[(r, c)] = v;
                }
                a[(r, col)] = T::zero();
            }
            prev = pivot;
            pivots.push(col);
            row += 1;
        }
        (a, pivots, swapped)
    }

    /// Rank over the fraction field of `T`.
    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return T::one();
        }
        let (a, pivots, swapped) = self.bareiss();
        if pivots.len() < self.rows {
            return T::zero();
        }
        let d = a[(self.rows - 1, self.cols - 1)].clone();
        if swapped {
            T::zero() - d
        } else {
            d
        }
    }
}

impl<T: ExactField> Matrix<T> {
    /// Some solution `x` of `self · x = v`, or `None` if the system is
    /// inconsistent. Free variables are set to zero.
    pub fn solve(&self, v: &[T]) -> Option<Vec<T>> {
        assert_eq!(v.len(), self.rows, "dimension mismatch in solve");
        let mut aug = Matrix::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                v[r].clone()
            }
        });
        let pivots = aug.reduce_rows();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                T::one()
            } else {
                T::zero()
            }
        });
        let pivots = aug.reduce_rows();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(n, n, |r, c| aug[(r, c + n)].clone()))
    }

    /// Basis of the right kernel `{x : self · x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let mut a = self.clone();
        let pivots = a.reduce_rows();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![T::zero(); self.cols];
                x[f] = T::one();
                for (r, &p) in pivots.iter().enumerate() {
                    x[p] = T::zero() - a[(r, f)].clone();
                }
                x
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns pivot columns.
    fn reduce_rows(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            for c in 0..self.cols {
                self.data.swap(p * self.cols + c, row * self.cols + c);
            }
            let inv = T::one() / self[(row, col)].clone();
            for c in col..self.cols {
                self[(row, c)] = self[(row, c)].clone() * inv.clone();
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let factor = self[(r, col)].clone();
                for c in col..self.cols {
                    let v = self[(r, c)].clone() - factor.clone() * self[(row, c)].clone();
                    self[(r, c)] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }
}

/// Integer solution `x` of `m · x = v`, if one exists.
///
/// Works for any `m` (not only full column rank): the columns are brought
/// to Hermite-style echelon form by unimodular column operations, the
/// echelon system is solved by forward substitution, and the transform is
/// applied back.
pub fn solve_integral(m: &Matrix<Rat>, v: &[Rat]) -> Option<Vec<BigInt>> {
    assert_eq!(v.len(), m.rows(), "dimension mismatch in solve_integral");
    let denom = m
        .data
        .iter()
        .chain(v)
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scale = |q: &Rat| (q * Rat::from_integer(denom.clone())).to_integer();
    let mut a: Matrix<BigInt> = m.map(scale);
    let target: Vec<BigInt> = v.iter().map(scale).collect();
    let (rows, cols) = (a.rows(), a.cols());
    let mut u: Matrix<BigInt> = Matrix::identity(cols);

    // Column echelon: pivot (row, col) pairs with zeros to the right of
    // each pivot in its row.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut col = 0;
    for row in 0..rows {
        if col == cols {
            break;
        }
        loop {
            let nonzero: Vec<usize> = (col..cols).filter(|&c| !a[(row, c)].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero
                .iter()
                .min_by_key(|&&c| a[(row, c)].abs())
                .expect("nonempty");
            swap_cols(&mut a, col, best);
            swap_cols(&mut u, col, best);
            if a[(row, col)].is_negative() {
                negate_col(&mut a, col);
                negate_col(&mut u, col);
            }
            let mut done = true;
            for c in col + 1..cols {
                if a[(row, c)].is_zero() {
                    continue;
                }
                let q = a[(row, c)].div_floor(&a[(row, col)]);
                axpy_col(&mut a, c, col, &q);
                axpy_col(&mut u, c, col, &q);
                if !a[(row, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                pivots.push((row, col));
                col += 1;
                break;
            }
        }
    }

    // Forward substitution on the echelon columns.
    let mut y = vec![BigInt::zero(); cols];
    let mut residual = target;
    for &(row, c) in &pivots {
        let (q, rem) = residual[row].div_rem(&a[(row, c)]);
        if !rem.is_zero() {
            return None;
        }
        for r in 0..rows {
            residual[r] -= &q * &a[(r, c)];
        }
        y[c] = q;
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(u.mul_vec(&y))
}

fn swap_cols(a: &mut Matrix<BigInt>, i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in 0..a.rows {
        a.data.swap(r * a.cols + i, r * a.cols + j);
    }
}

fn negate_col(a: &mut Matrix<BigInt>, i: usize) {
    for r in 0..a.rows {
        let v = -&a[(r, i)];
        a[(r, i)] = v;
    }
}

/// column `target` -= q * column `source`
fn axpy_col(a: &mut Matrix<BigInt>, target: usize, source: usize, q: &BigInt) {
    for r in 0..a.rows {
        let v = &a[(r, target)] - q * &a[(r, source)];
        a[(r, target)] = v;
    }
}
