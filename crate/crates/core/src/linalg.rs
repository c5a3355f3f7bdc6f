//! Small dense complex linear algebra.
//!
//! Matrices here are square, row-major and tiny (N ≲ 100), so everything is
//! plain loops. The heavy lifting (non-Hermitian eigensolver, SVD, pivoted
//! LU) is delegated to `faer` through the bridge functions at the bottom.

use std::fmt;
use std::ops::{Index, IndexMut};

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| {
            if r == c {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let dim = columns.len();
        assert!(
            columns.iter().all(|c| c.len() == dim),
            "columns must form a square matrix"
        );
        Self::from_fn(dim, |r, c| columns[c][r])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn product_of_diagonal(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).product()
    }

    pub(crate) fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.dim, self.dim, |r, c| self[(r, c)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Vector helpers.

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Hermitian inner product ⟨a, b⟩ = Σ conj(a_i) b_i.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|z| z / n).collect()
}

pub fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Rotates `v` so that its first component with modulus above `floor` is
/// real and positive.
pub fn fix_phase(v: &mut [C64], floor: f64) {
    if let Some(idx) = v.iter().position(|z| z.norm() > floor) {
        let pivot = v[idx];
        let rot = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
        v[idx] = C64::new(v[idx].re, 0.0);
    }
}

// faer bridge.

/// Right eigenpairs of a general complex matrix, eigenvectors as columns.
pub(crate) fn eigen(m: &CMatrix) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
    let evd = m.to_faer().eigen().map_err(|_| Error::EigenSolverFailed)?;
    let n = m.dim();
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..n).map(|i| s[i]).collect();
    let vectors = (0..n)
        .map(|c| (0..n).map(|r| u[(r, c)]).collect())
        .collect();
    Ok((values, vectors))
}

/// 2-norm condition number σ_max / σ_min.
pub fn condition_number(m: &CMatrix) -> f64 {
    match m.to_faer().singular_values() {
        Ok(sv) => {
            let max = sv.iter().copied().fold(0.0, f64::max);
            let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
            if min == 0.0 {
                f64::INFINITY
            } else {
                max / min
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Solves `m x = b` by partial-pivoted LU.
pub fn solve(m: &CMatrix, b: &[C64]) -> Vec<C64> {
    let lu = m.to_faer().partial_piv_lu();
    let rhs = Mat::from_fn(b.len(), 1, |r, _| b[r]);
    let x = lu.solve(&rhs);
    (0..b.len()).map(|r| x[(r, 0)]).collect()
}

/// Determinant by partial-pivoted LU; independent of any closed form.
pub fn determinant(m: &CMatrix) -> C64 {
    m.to_faer().determinant()
}
