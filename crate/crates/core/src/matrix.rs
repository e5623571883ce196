//! Exact dense matrices over the crate's coefficient rings.
//!
//! Entries are abstracted by [`Entry`] (ring operations plus the involution)
//! and [`FieldEntry`] (adds inversion), so the same elimination code runs
//! over `K` and `K(x)`. Pivots are chosen by least [`FieldEntry::complexity`]
//! (total polynomial degree for rational functions), breaking ties by row
//! order, which keeps coefficient growth and output deterministic.

use std::fmt;

use crate::scalar::{FieldSpec, LaurentPoly, RationalFunction, Scalar};

/// Ring operations required of a matrix entry.
pub trait Entry: Clone + PartialEq + fmt::Display {
    fn zero(spec: FieldSpec) -> Self;
    fn one(spec: FieldSpec) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn star(&self) -> Self;
}

/// Field operations: inversion plus a pivot preference.
pub trait FieldEntry: Entry {
    fn inv(&self) -> Option<Self>;
    /// Pivot preference; lower is preferred.
    fn complexity(&self) -> usize {
        0
    }
}

impl Entry for Scalar {
    fn zero(spec: FieldSpec) -> Self {
        Scalar::zero(spec)
    }
    fn one(spec: FieldSpec) -> Self {
        Scalar::one(spec)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn star(&self) -> Self {
        Scalar::star(self)
    }
}

impl FieldEntry for Scalar {
    fn inv(&self) -> Option<Self> {
        Scalar::inv(self).ok()
    }
}

impl Entry for LaurentPoly {
    fn zero(spec: FieldSpec) -> Self {
        LaurentPoly::zero(spec)
    }
    fn one(spec: FieldSpec) -> Self {
        LaurentPoly::one(spec)
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn star(&self) -> Self {
        LaurentPoly::star(self)
    }
}

impl Entry for RationalFunction {
    fn zero(spec: FieldSpec) -> Self {
        RationalFunction::zero(spec)
    }
    fn one(spec: FieldSpec) -> Self {
        RationalFunction::one(spec)
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn star(&self) -> Self {
        RationalFunction::star(self)
    }
}

impl FieldEntry for RationalFunction {
    fn inv(&self) -> Option<Self> {
        RationalFunction::inv(self).ok()
    }
    fn complexity(&self) -> usize {
        RationalFunction::complexity(self)
    }
}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    spec: FieldSpec,
    n_rows: usize,
    n_cols: usize,
    data: Vec<T>,
}

impl<T: Entry> Matrix<T> {
    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<T>>) -> Matrix<T> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Matrix {
            spec,
            n_rows,
            n_cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zero(spec: FieldSpec, n_rows: usize, n_cols: usize) -> Matrix<T> {
        Matrix {
            spec,
            n_rows,
            n_cols,
            data: vec![T::zero(spec); n_rows * n_cols],
        }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Matrix<T> {
        let mut m = Matrix::zero(spec, n, n);
        for i in 0..n {
            m.set(i, i, T::one(spec));
        }
        m
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.n_cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.n_cols + c] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.n_rows == self.n_cols && *self == Matrix::identity(self.spec, self.n_rows)
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.n_rows, self.n_cols), (rhs.n_rows, rhs.n_cols));
        Matrix {
            spec: self.spec,
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Matrix<T> {
        Matrix {
            spec: self.spec,
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(Entry::neg).collect(),
        }
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n_cols, rhs.n_rows, "dimension mismatch");
        let mut out: Matrix<T> = Matrix::zero(self.spec, self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let sum = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, sum);
                }
            }
        }
        out
    }

    /// Conjugate transpose: entry-wise involution and transposition.
    pub fn star(&self) -> Matrix<T> {
        let mut out = Matrix::zero(self.spec, self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(j, i, self.get(i, j).star());
            }
        }
        out
    }

    pub fn map<U: Entry>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            spec: self.spec,
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: FieldEntry> Matrix<T> {
    /// Row-reduces to reduced row echelon form, returning `(U, B, pivots)`
    /// with `U` invertible, `B = U * self` in RREF, and the pivot columns.
    fn rref_with_transform(&self) -> (Matrix<T>, Matrix<T>, Vec<usize>) {
        let mut b = self.clone();
        let mut u: Matrix<T> = Matrix::identity(self.spec, self.n_rows);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.n_cols {
            if row == self.n_rows {
                break;
            }
            let pivot = (row..self.n_rows)
                .filter(|&r| !b.get(r, col).is_zero())
                .min_by_key(|&r| (b.get(r, col).complexity(), r));
            let Some(pivot) = pivot else { continue };
            if pivot != row {
                for c in 0..b.n_cols {
                    b.data.swap(pivot * b.n_cols + c, row * b.n_cols + c);
                }
                for c in 0..u.n_cols {
                    u.data.swap(pivot * u.n_cols + c, row * u.n_cols + c);
                }
            }
            let scale = b.get(row, col).inv().expect("pivot is nonzero");
            for c in 0..b.n_cols {
                b.set(row, c, b.get(row, c).mul(&scale));
            }
            for c in 0..u.n_cols {
                u.set(row, c, u.get(row, c).mul(&scale));
            }
            for r in 0..self.n_rows {
                if r == row || b.get(r, col).is_zero() {
                    continue;
                }
                let factor = b.get(r, col).clone();
                for c in 0..b.n_cols {
                    let v = b.get(r, c).add(&factor.mul(b.get(row, c)).neg());
                    b.set(r, c, v);
                }
                for c in 0..u.n_cols {
                    let v = u.get(r, c).add(&factor.mul(u.get(row, c)).neg());
                    u.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (u, b, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref_with_transform().2.len()
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert_eq!(self.n_rows, self.n_cols, "inverse of a non-square matrix");
        let (u, _, pivots) = self.rref_with_transform();
        (pivots.len() == self.n_rows).then_some(u)
    }

    /// Completes the nonzero RREF rows to an invertible matrix with
    /// standard basis rows at the non-pivot columns.
    fn rref_completion(&self, b: &Matrix<T>, pivots: &[usize]) -> Matrix<T> {
        let mut rows: Vec<Vec<T>> = (0..pivots.len())
            .map(|i| (0..self.n_cols).map(|c| b.get(i, c).clone()).collect())
            .collect();
        for c in 0..self.n_cols {
            if !pivots.contains(&c) {
                let mut e = vec![T::zero(self.spec); self.n_cols];
                e[c] = T::one(self.spec);
                rows.push(e);
            }
        }
        Matrix::from_rows(self.spec, rows)
    }

    /// Rank factorization `self = P * D * R` with `P`, `R` invertible and
    /// `D` the rank-`r` partial identity. Returns `(P, r, R)`.
    pub fn rank_factorization(&self) -> (Matrix<T>, usize, Matrix<T>) {
        let (u, b, pivots) = self.rref_with_transform();
        let p = u.inverse().expect("row transform is invertible");
        let rmat = self.rref_completion(&b, &pivots);
        (p, pivots.len(), rmat)
    }

    /// A unit `u` with `self * u * self = self`, from the rank
    /// factorization `self = P D R` as `u = R^{-1} diag(I_r, I) P^{-1}
    /// = R^{-1} U` where `U` is the row transform.
    pub fn regularity_partner(&self) -> Matrix<T> {
        let (u, b, pivots) = self.rref_with_transform();
        let rmat = self.rref_completion(&b, &pivots);
        rmat.inverse()
            .expect("RREF completion is invertible")
            .mul(&u)
    }

    /// The rank-`r` partial identity of shape `n_rows x n_cols`.
    pub fn partial_identity(spec: FieldSpec, n_rows: usize, n_cols: usize, r: usize) -> Matrix<T> {
        let mut d = Matrix::zero(spec, n_rows, n_cols);
        for i in 0..r.min(n_rows).min(n_cols) {
            d.set(i, i, T::one(spec));
        }
        d
    }
}

impl<T: Entry> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.n_rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.n_cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn mat_i64(rows: &[&[i64]]) -> Matrix<Scalar> {
        Matrix::from_rows(
            q(),
            rows.iter()
                .map(|r| r.iter().map(|v| Scalar::from_i64(q(), *v)).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let a = mat_i64(&[&[1, 2], &[3, 4]]);
        let id = Matrix::identity(q(), 2);
        assert_eq!(a.mul(&id), a);
        assert_eq!(id.mul(&a), a);
        assert!(id.is_identity());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mat_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(mat_i64(&[&[1, 2], &[3, 4]]).rank(), 2);
        assert_eq!(Matrix::<Scalar>::zero(q(), 3, 3).rank(), 0);
    }

    #[test]
    fn inverse_round_trip() {
        let a = mat_i64(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(inv.mul(&a).is_identity());
        assert!(mat_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn inverse_over_rational_functions() {
        let spec = q();
        let x = RationalFunction::x(spec);
        let one = RationalFunction::one(spec);
        let zero = RationalFunction::zero(spec);
        let a = Matrix::from_rows(
            spec,
            vec![vec![x.clone(), one.clone()], vec![zero, one.clone()]],
        );
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
    }

    #[test]
    fn rank_factorization_reconstructs() {
        for a in [
            mat_i64(&[&[1, 2], &[2, 4]]),
            mat_i64(&[&[0, 0], &[0, 0]]),
            mat_i64(&[&[1, 0], &[0, 1]]),
            mat_i64(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]),
        ] {
            let (p, r, rm) = a.rank_factorization();
            let d = Matrix::partial_identity(q(), a.n_rows(), a.n_cols(), r);
            assert_eq!(p.mul(&d).mul(&rm), a);
            assert!(p.inverse().is_some());
            assert!(rm.inverse().is_some());
            assert_eq!(r, a.rank());
        }
    }

    #[test]
    fn star_is_conjugate_transpose() {
        let qi = FieldSpec::gaussian_rationals();
        let i = Scalar::i(qi);
        let a = Matrix::from_rows(
            qi,
            vec![
                vec![i.clone(), Scalar::zero(qi)],
                vec![Scalar::one(qi), i.clone()],
            ],
        );
        let s = a.star();
        assert_eq!(s.get(0, 0), &-i.clone());
        assert_eq!(s.get(0, 1), &Scalar::one(qi));
        assert_eq!(s.get(1, 0), &Scalar::zero(qi));
        assert_eq!(a.star().star(), a);
    }
}
