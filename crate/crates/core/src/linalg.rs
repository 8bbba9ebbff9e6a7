//! Exact dense linear algebra: maps, bilinear forms, covectors.

use num::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::rational::Rational;

/// Dense vector of rationals.
pub type DVec = Vec<Rational>;

pub fn zero_vec(dim: usize) -> DVec {
    vec![Rational::zero(); dim]
}

/// Standard basis vector `e_i` (0-based).
pub fn basis_vec(dim: usize, i: usize) -> DVec {
    let mut v = zero_vec(dim);
    v[i] = Rational::one();
    v
}

pub fn vec_is_zero(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

pub fn vec_add_scaled(acc: &mut [Rational], v: &[Rational], c: &Rational) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x * c;
    }
}

/// Exact matrix of a linear map. Entry `[r][c]` is the `r`-th coordinate of
/// the image of the `c`-th basis vector (columns are images).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl LinearMap {
    pub fn new(rows: usize, cols: usize, data: Vec<Vec<Rational>>) -> Result<Self> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return Err(AlgebraError::ShapeMismatch(format!(
                "expected {rows}x{cols} matrix"
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![zero_vec(cols); rows],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim, dim);
        for i in 0..dim {
            m.data[i][i] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let data = (0..rows)
            .map(|r| (0..cols).map(|c| f(r, c)).collect())
            .collect();
        Self { rows, cols, data }
    }

    /// Matrix whose `c`-th column is `columns[c]`.
    pub fn from_columns(rows: usize, columns: &[DVec]) -> Result<Self> {
        if columns.iter().any(|v| v.len() != rows) {
            return Err(AlgebraError::ShapeMismatch("column length".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| {
            columns[c][r].clone()
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &Rational {
        &self.data[r][c]
    }

    pub fn set_entry(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r][c] = v;
    }

    pub fn column(&self, c: usize) -> DVec {
        (0..self.rows).map(|r| self.data[r][c].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|row| vec_is_zero(row))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn apply(&self, v: &[Rational]) -> Result<DVec> {
        if v.len() != self.cols {
            return Err(AlgebraError::ShapeMismatch(format!(
                "applying {}x{} map to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = zero_vec(self.rows);
        for (c, x) in v.iter().enumerate() {
            if !x.is_zero() {
                for r in 0..self.rows {
                    out[r] += &self.data[r][c] * x;
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.cols != other.rows {
            return Err(AlgebraError::ShapeMismatch(format!(
                "composing {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = LinearMap::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.data[r][k].is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let term = &self.data[r][k] * &other.data[k][c];
                    out.data[r][c] += term;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> LinearMap {
        Self::from_fn(self.cols, self.rows, |r, c| self.data[c][r].clone())
    }

    pub fn neg(&self) -> LinearMap {
        Self::from_fn(self.rows, self.cols, |r, c| -self.data[r][c].clone())
    }

    pub fn add(&self, other: &LinearMap) -> Result<LinearMap> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(AlgebraError::ShapeMismatch("matrix addition".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols, |r, c| {
            &self.data[r][c] + &other.data[r][c]
        }))
    }

    pub fn sub(&self, other: &LinearMap) -> Result<LinearMap> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> LinearMap {
        Self::from_fn(self.rows, self.cols, |r, k| &self.data[r][k] * c)
    }

    pub fn commutes_with(&self, other: &LinearMap) -> Result<bool> {
        Ok(self.compose(other)? == other.compose(self)?)
    }

    /// Rank by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let pivot = (rank..self.rows).find(|&r| !m[r][col].is_zero());
            let Some(p) = pivot else { continue };
            m.swap(rank, p);
            let inv = m[rank][col].recip();
            for c in col..self.cols {
                m[rank][c] = &m[rank][c] * &inv;
            }
            for r in 0..self.rows {
                if r != rank && !m[r][col].is_zero() {
                    let factor = m[r][col].clone();
                    for c in col..self.cols {
                        let sub = &m[rank][c] * &factor;
                        m[r][c] = &m[r][c] - sub;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Exact inverse via Gauss-Jordan; a singular input reports its rank.
    pub fn inverse(&self) -> Result<LinearMap> {
        if !self.is_square() {
            return Err(AlgebraError::ShapeMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        let mut m = self.data.clone();
        let mut inv = LinearMap::identity(n).data;
        let mut rank = 0;
        for col in 0..n {
            let pivot = (rank..n).find(|&r| !m[r][col].is_zero());
            let Some(p) = pivot else { continue };
            m.swap(rank, p);
            inv.swap(rank, p);
            let scale = m[rank][col].recip();
            for c in 0..n {
                m[rank][c] = &m[rank][c] * &scale;
                inv[rank][c] = &inv[rank][c] * &scale;
            }
            for r in 0..n {
                if r != rank && !m[r][col].is_zero() {
                    let factor = m[r][col].clone();
                    for c in 0..n {
                        let s1 = &m[rank][c] * &factor;
                        m[r][c] = &m[r][c] - s1;
                        let s2 = &inv[rank][c] * &factor;
                        inv[r][c] = &inv[r][c] - s2;
                    }
                }
            }
            rank += 1;
        }
        if rank < n {
            return Err(AlgebraError::Singular { rank, dim: n });
        }
        // Row echelon with unit pivots and full elimination is already the identity
        // on the left; `inv` holds the inverse.
        Ok(LinearMap {
            rows: n,
            cols: n,
            data: inv,
        })
    }

    /// Basis of the null space, as columns.
    pub fn null_space(&self) -> Vec<DVec> {
        let mut m = self.data.clone();
        let mut pivot_col_of_row = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let pivot = (rank..self.rows).find(|&r| !m[r][col].is_zero());
            let Some(p) = pivot else { continue };
            m.swap(rank, p);
            let inv = m[rank][col].recip();
            for c in col..self.cols {
                m[rank][c] = &m[rank][c] * &inv;
            }
            for r in 0..self.rows {
                if r != rank && !m[r][col].is_zero() {
                    let factor = m[r][col].clone();
                    for c in col..self.cols {
                        let sub = &m[rank][c] * &factor;
                        m[r][c] = &m[r][c] - sub;
                    }
                }
            }
            pivot_col_of_row.push(col);
            rank += 1;
        }
        let pivot_cols: std::collections::BTreeSet<usize> =
            pivot_col_of_row.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = zero_vec(self.cols);
            v[free] = Rational::one();
            for (row, &pc) in pivot_col_of_row.iter().enumerate() {
                v[pc] = -m[row][free].clone();
            }
            basis.push(v);
        }
        basis
    }
}

/// Symmetry class of a bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Skew,
}

/// Exact bilinear form `B(x, y) = x^T M y` with a declared symmetry class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearForm {
    dim: usize,
    symmetry: Symmetry,
    matrix: LinearMap,
}

impl BilinearForm {
    pub fn new(dim: usize, symmetry: Symmetry, matrix: LinearMap) -> Result<Self> {
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(AlgebraError::ShapeMismatch("bilinear form matrix".into()));
        }
        let t = matrix.transpose();
        let ok = match symmetry {
            Symmetry::Symmetric => t == matrix,
            Symmetry::Skew => t == matrix.neg(),
        };
        if !ok {
            return Err(AlgebraError::ShapeMismatch(format!(
                "matrix does not match declared {symmetry:?} symmetry"
            )));
        }
        Ok(Self {
            dim,
            symmetry,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn matrix(&self) -> &LinearMap {
        &self.matrix
    }

    pub fn eval(&self, x: &[Rational], y: &[Rational]) -> Result<Rational> {
        let my = self.matrix.apply(y)?;
        if x.len() != self.dim {
            return Err(AlgebraError::ShapeMismatch("bilinear form argument".into()));
        }
        let mut acc = Rational::zero();
        for (a, b) in x.iter().zip(&my) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        Ok(acc)
    }

    pub fn eval_basis(&self, i: usize, j: usize) -> &Rational {
        self.matrix.entry(i, j)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.rank() == self.dim
    }
}

/// Exact covector (linear functional).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covector {
    coeffs: DVec,
}

impl Covector {
    pub fn new(coeffs: DVec) -> Self {
        Self { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coeffs: zero_vec(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &DVec {
        &self.coeffs
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Rational> {
        if v.len() != self.coeffs.len() {
            return Err(AlgebraError::ShapeMismatch("covector argument".into()));
        }
        let mut acc = Rational::zero();
        for (a, b) in self.coeffs.iter().zip(v) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        Ok(acc)
    }

    pub fn apply_basis(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        vec_is_zero(&self.coeffs)
    }

    /// Pullback along a map: `(τ ∘ D)(x) = τ(D x)`.
    pub fn compose(&self, map: &LinearMap) -> Result<Covector> {
        if map.rows() != self.coeffs.len() {
            return Err(AlgebraError::ShapeMismatch("covector pullback".into()));
        }
        let coeffs = (0..map.cols())
            .map(|c| {
                let mut acc = Rational::zero();
                for r in 0..map.rows() {
                    acc += &self.coeffs[r] * map.entry(r, c);
                }
                acc
            })
            .collect();
        Ok(Covector::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn identity_inverse_is_identity() {
        let id = LinearMap::identity(4);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn diagonal_inverse() {
        let d = LinearMap::from_fn(2, 2, |r, c| {
            if r == c {
                int([2, 3][r])
            } else {
                int(0)
            }
        });
        let inv = d.inverse().unwrap();
        assert_eq!(inv.entry(0, 0), &rat(1, 2));
        assert_eq!(inv.entry(1, 1), &rat(1, 3));
    }

    #[test]
    fn inverse_multiplies_back_to_identity() {
        let m = LinearMap::new(
            3,
            3,
            vec![
                vec![int(2), int(1), int(0)],
                vec![rat(1, 3), int(4), int(-1)],
                vec![int(0), int(5), rat(7, 2)],
            ],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.compose(&inv).unwrap(), LinearMap::identity(3));
        assert_eq!(inv.compose(&m).unwrap(), LinearMap::identity(3));
        assert_eq!(inv.inverse().unwrap(), m);
    }

    #[test]
    fn singular_reports_rank() {
        let m = LinearMap::new(
            2,
            2,
            vec![vec![int(1), int(2)], vec![int(2), int(4)]],
        )
        .unwrap();
        match m.inverse() {
            Err(AlgebraError::Singular { rank, dim }) => {
                assert_eq!((rank, dim), (1, 2));
            }
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = LinearMap::new(
            2,
            2,
            vec![vec![int(1), int(2)], vec![int(2), int(4)]],
        )
        .unwrap();
        let ns = m.null_space();
        assert_eq!(ns.len(), 1);
        assert!(vec_is_zero(&m.apply(&ns[0]).unwrap()));
    }

    #[test]
    fn bilinear_form_symmetry_enforced() {
        let skew = LinearMap::new(
            2,
            2,
            vec![vec![int(0), int(1)], vec![int(-1), int(0)]],
        )
        .unwrap();
        assert!(BilinearForm::new(2, Symmetry::Skew, skew.clone()).is_ok());
        assert!(BilinearForm::new(2, Symmetry::Symmetric, skew).is_err());
    }

    #[test]
    fn covector_pullback() {
        let tau = Covector::new(vec![int(1), int(0)]);
        let d = LinearMap::new(
            2,
            2,
            vec![vec![int(0), int(3)], vec![int(1), int(0)]],
        )
        .unwrap();
        let pulled = tau.compose(&d).unwrap();
        assert_eq!(pulled.coeffs(), &vec![int(0), int(3)]);
    }
}
