//! Gluing matrices of log transforms on the first homology of the 3-torus.
//!
//! A [`Gluing`] acts on column vectors written in the ordered basis
//! `(a, b, c)`; column `j` is the image of the `j`-th basis vector.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("matrix has determinant {0}, not a unit")]
    NotUnimodular(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gluing<T> {
    rows: [[T; 3]; 3],
}

impl<T: Scalar> Gluing<T> {
    pub fn new(rows: [[T; 3]; 3]) -> Self {
        Gluing { rows }
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        Gluing { rows: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    /// The log transform with multiplicity `p`: rows `(1,0,0)`, `(0,p,-1)`, `(0,1,0)`.
    pub fn log_transform(p: T) -> Self {
        let (z, o) = (T::zero(), T::one());
        Gluing { rows: [[o.clone(), z.clone(), z.clone()], [z.clone(), p, -o.clone()], [z, o, T::zero()]] }
    }

    pub fn rows(&self) -> &[[T; 3]; 3] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &T {
        &self.rows[i][j]
    }

    /// `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_fn(|i, j| {
            (0..3).fold(T::zero(), |acc, k| acc + self.rows[i][k].clone() * other.rows[k][j].clone())
        })
    }

    pub fn apply(&self, v: &[T; 3]) -> [T; 3] {
        std::array::from_fn(|i| (0..3).fold(T::zero(), |acc, k| acc + self.rows[i][k].clone() * v[k].clone()))
    }

    fn minor(&self, i: usize, j: usize) -> T {
        let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        self.rows[r[0]][c[0]].clone() * self.rows[r[1]][c[1]].clone()
            - self.rows[r[0]][c[1]].clone() * self.rows[r[1]][c[0]].clone()
    }

    fn cofactor(&self, i: usize, j: usize) -> T {
        if (i + j) % 2 == 0 {
            self.minor(i, j)
        } else {
            -self.minor(i, j)
        }
    }

    /// Cofactor expansion along the first row.
    pub fn determinant(&self) -> T {
        (0..3).fold(T::zero(), |acc, j| acc + self.rows[0][j].clone() * self.cofactor(0, j))
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// Adjugate divided by the determinant; only defined when the determinant is ±1.
    pub fn invert(&self) -> Result<Self, SurgeryError> {
        let det = self.determinant();
        if !det.abs().is_one() {
            return Err(SurgeryError::NotUnimodular(det.to_string()));
        }
        Ok(Self::from_fn(|i, j| self.cofactor(j, i) * det.clone()))
    }
}

impl<T: Scalar> fmt::Display for Gluing<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.rows.iter().flatten().map(|v| v.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for row in cells.chunks(3) {
            let row: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// The p = ±1 transforms are the Luttinger surgeries.
pub fn is_luttinger(p: i64) -> bool {
    p == 1 || p == -1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogTransform<T> {
    pub p: T,
    pub matrix: Gluing<T>,
    pub determinant: T,
    pub luttinger: bool,
}

pub fn log_transform_matrix<T: Scalar>(p: T) -> LogTransform<T> {
    let matrix = Gluing::log_transform(p.clone());
    let determinant = matrix.determinant();
    let luttinger = p.abs().is_one();
    LogTransform { p, matrix, determinant, luttinger }
}
