//! Abelianization through the Smith normal form of the relation matrix.
//!
//! Matrices are generic over [`Scalar`]; the crate root exposes the
//! arbitrary-precision instance as `IntMatrix`, which is what every public
//! entry point in this module uses by default.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::presentation::Presentation;
use crate::scalar::{from_i64, Scalar};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width when there are no rows.
    /// Returns `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Option<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| from_i64(v)).collect()).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// `None` when the inner dimensions differ.
    pub fn mul(&self, other: &Self) -> Option<Self> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        Some(out)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination. `None` unless square.
    pub fn determinant(&self) -> Option<T> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(T::one());
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&r| !a.get(r, k).is_zero()) {
                    Some(r) => {
                        a.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return Some(T::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a.get(i, j).clone() * a.get(k, k).clone() - a.get(i, k).clone() * a.get(k, j).clone();
                    a.set(i, j, v / prev.clone());
                }
            }
            prev = a.get(k, k).clone();
        }
        Some(sign * a.get(n - 1, n - 1).clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &T) {
        for c in 0..self.cols {
            let v = self.get(dst, c).clone() + k.clone() * self.get(src, c).clone();
            self.set(dst, c, v);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &T) {
        for r in 0..self.rows {
            let v = self.get(r, dst).clone() + k.clone() * self.get(r, src).clone();
            self.set(r, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|v| v.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{:>width$}", cells[r * self.cols + c])).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// `s = u · m · v` with `u`, `v` unimodular and `s` diagonal, nonnegative,
/// each diagonal entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm<T> {
    pub s: Matrix<T>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: Scalar> SmithForm<T> {
    pub fn rank(&self) -> usize {
        self.s.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

fn min_pivot<T: Scalar>(a: &Matrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in t..a.rows {
        for c in t..a.cols {
            let v = a.get(r, c);
            if !v.is_zero() && best.map_or(true, |(br, bc)| v.abs() < a.get(br, bc).abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}

pub fn smith_normal_form<T: Scalar>(m: &Matrix<T>) -> SmithForm<T> {
    let mut a = m.clone();
    let mut u = Matrix::identity(m.rows);
    let mut v = Matrix::identity(m.cols);
    let mut t = 0;
    while t < a.rows.min(a.cols) {
        let Some((pr, pc)) = min_pivot(&a, t) else { break };
        a.swap_rows(t, pr);
        u.swap_rows(t, pr);
        a.swap_cols(t, pc);
        v.swap_cols(t, pc);
        loop {
            let mut clean = true;
            for r in t + 1..a.rows {
                if !a.get(r, t).is_zero() {
                    let q = -a.get(r, t).div_floor(a.get(t, t));
                    a.add_row(r, t, &q);
                    u.add_row(r, t, &q);
                    clean &= a.get(r, t).is_zero();
                }
            }
            for c in t + 1..a.cols {
                if !a.get(t, c).is_zero() {
                    let q = -a.get(t, c).div_floor(a.get(t, t));
                    a.add_col(c, t, &q);
                    v.add_col(c, t, &q);
                    clean &= a.get(t, c).is_zero();
                }
            }
            if !clean {
                // A remainder smaller than the pivot survived in row or column t.
                let mut best = (t, t);
                for r in t + 1..a.rows {
                    if !a.get(r, t).is_zero() && a.get(r, t).abs() < a.get(best.0, best.1).abs() {
                        best = (r, t);
                    }
                }
                for c in t + 1..a.cols {
                    if !a.get(t, c).is_zero() && a.get(t, c).abs() < a.get(best.0, best.1).abs() {
                        best = (t, c);
                    }
                }
                a.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
                a.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
                continue;
            }
            let offender = (t + 1..a.rows).find(|&r| (t + 1..a.cols).any(|c| !a.get(r, c).is_multiple_of(a.get(t, t))));
            match offender {
                Some(r) => {
                    let one = T::one();
                    a.add_row(t, r, &one);
                    u.add_row(t, r, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithForm { s: a, u, v }
}

/// Exponent sums: one row per relator, one column per generator.
pub fn relation_matrix_with<T: Scalar>(p: &Presentation) -> Matrix<T> {
    let n = p.generator_count();
    let rows = p.relators().iter().map(|r| (0..n).map(|g| from_i64(r.exponent_sum(g))).collect()).collect();
    Matrix::from_rows(rows, n).expect("rows have one entry per generator")
}

pub fn relation_matrix(p: &Presentation) -> Matrix<BigInt> {
    relation_matrix_with(p)
}

/// A finitely generated abelian group `Z^free_rank ⊕ Z/d1 ⊕ ... ⊕ Z/dk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianInvariants<T = BigInt> {
    pub torsion: Vec<T>,
    pub free_rank: usize,
}

impl<T: Scalar> AbelianInvariants<T> {
    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }
}

impl<T: Scalar> fmt::Display for AbelianInvariants<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn abelianize_with<T: Scalar>(p: &Presentation) -> AbelianInvariants<T> {
    let snf = smith_normal_form(&relation_matrix_with::<T>(p));
    let diag = snf.s.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    AbelianInvariants {
        torsion: diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect(),
        free_rank: p.generator_count() - rank,
    }
}

pub fn abelianize(p: &Presentation) -> AbelianInvariants<BigInt> {
    abelianize_with(p)
}

/// Whether `w` maps to zero in the abelianization of `p`, i.e. its exponent
/// vector lies in the row lattice of the relation matrix.
pub fn in_relation_lattice(p: &Presentation, w: &Word) -> bool {
    let n = p.generator_count();
    let snf = smith_normal_form(&relation_matrix(p));
    let x = Matrix::from_rows(vec![(0..n).map(|g| BigInt::from(w.exponent_sum(g))).collect()], n)
        .expect("one entry per generator");
    let y = x.mul(&snf.v).expect("dimensions agree");
    let diag = snf.s.diagonal();
    (0..n).all(|j| {
        let yj = y.get(0, j);
        match diag.get(j) {
            Some(d) if !d.is_zero() => yj.is_multiple_of(d),
            _ => yj.is_zero(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_presentation, parse_word};
    use num_traits::Signed as _;

    type M = Matrix<BigInt>;

    fn check_snf(m: &M) -> SmithForm<BigInt> {
        let f = smith_normal_form(m);
        assert_eq!(f.u.mul(m).unwrap().mul(&f.v).unwrap(), f.s);
        assert!(f.s.is_diagonal());
        let d = f.s.diagonal();
        for w in d.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]) || (w[0].is_zero() && w[1].is_zero()));
        }
        assert!(d.iter().all(|x| !x.is_negative()));
        assert_eq!(f.u.determinant().unwrap().abs(), BigInt::from(1));
        assert_eq!(f.v.determinant().unwrap().abs(), BigInt::from(1));
        f
    }

    #[test]
    fn coprime_diagonal() {
        let f = check_snf(&M::from_i64_rows(&[&[2, 0], &[0, 3]]).unwrap());
        assert_eq!(f.s, M::from_i64_rows(&[&[1, 0], &[0, 6]]).unwrap());
    }

    #[test]
    fn zero_matrix() {
        let z = M::zeros(2, 3);
        let f = check_snf(&z);
        assert_eq!(f.s, z);
        assert_eq!(f.u, M::identity(2));
        assert_eq!(f.v, M::identity(3));
    }

    #[test]
    fn empty_dimensions() {
        let f = check_snf(&M::zeros(0, 3));
        assert_eq!(f.s.rows(), 0);
        check_snf(&M::zeros(2, 0));
    }

    #[test]
    fn mixed_signs() {
        check_snf(&M::from_i64_rows(&[&[-4, 6, 2], &[10, -3, 7], &[0, 8, -12], &[1, 1, 1]]).unwrap());
        let f = check_snf(&M::from_i64_rows(&[&[4, 6], &[6, 4]]).unwrap());
        assert_eq!(f.s.diagonal(), vec![BigInt::from(2), BigInt::from(10)]);
    }

    #[test]
    fn determinant_values() {
        assert_eq!(M::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap().determinant(), Some(BigInt::from(-1)));
        assert_eq!(M::from_i64_rows(&[&[2, 1, 3], &[0, 4, 5], &[1, 0, 6]]).unwrap().determinant(), Some(BigInt::from(41)));
        assert_eq!(M::from_i64_rows(&[&[1, 2], &[2, 4]]).unwrap().determinant(), Some(BigInt::from(0)));
        assert_eq!(M::zeros(2, 3).determinant(), None);
    }

    #[test]
    fn machine_integers_work_too() {
        let m = Matrix::<i64>::from_i64_rows(&[&[2, 0], &[0, 3]]).unwrap();
        assert_eq!(smith_normal_form(&m).s.diagonal(), vec![1, 6]);
    }

    #[test]
    fn small_groups() {
        let p = parse_presentation("< a | a^3 >").unwrap();
        assert_eq!(relation_matrix(&p), M::from_i64_rows(&[&[3]]).unwrap());
        let inv = abelianize(&parse_presentation("< a | a^4 >").unwrap());
        assert_eq!(inv.torsion, vec![BigInt::from(4)]);
        assert_eq!(inv.free_rank, 0);
        assert_eq!(inv.to_string(), "Z/4");
        let comm = parse_presentation("< a, e | [a, e] >").unwrap();
        assert_eq!(relation_matrix(&comm), M::zeros(1, 2));
        assert_eq!(abelianize(&comm).to_string(), "Z^2");
        assert!(abelianize(&parse_presentation("< a | a >").unwrap()).is_trivial());
    }

    #[test]
    fn lattice_membership() {
        let p = parse_presentation("< a, b | a^2 b^-2, a^4 >").unwrap();
        let w = |s: &str| parse_word(s, p.alphabet()).unwrap();
        assert!(in_relation_lattice(&p, &w("a b a^-1 b^-1")));
        assert!(in_relation_lattice(&p, &w("b^4")));
        assert!(!in_relation_lattice(&p, &w("a^2")));
        assert!(!in_relation_lattice(&p, &w("b")));
    }
}
