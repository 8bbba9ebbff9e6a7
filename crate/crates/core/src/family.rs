//! Tuple-indexed families of matrices, used for representation actions.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::linalg::{DVec, LinearMap};
use crate::rational::Rational;
use crate::tensor::SkewPattern;

/// A multilinear family of square matrices indexed by tuples over an
/// argument space, with a declared alternation pattern. Mirrors
/// [`crate::tensor::StructureTensor`] but with matrix values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFamily {
    arg_dim: usize,
    out_dim: usize,
    pattern: SkewPattern,
    mats: BTreeMap<Vec<usize>, LinearMap>,
}

impl MatrixFamily {
    pub fn new(arg_dim: usize, out_dim: usize, pattern: SkewPattern) -> Self {
        Self {
            arg_dim,
            out_dim,
            pattern,
            mats: BTreeMap::new(),
        }
    }

    pub fn arg_dim(&self) -> usize {
        self.arg_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn arity(&self) -> usize {
        self.pattern.arity()
    }

    pub fn pattern(&self) -> &SkewPattern {
        &self.pattern
    }

    pub fn is_zero(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &LinearMap)> {
        self.mats.iter()
    }

    /// Accumulate a matrix at an arbitrary key, canonicalizing with sign.
    pub fn add_matrix(&mut self, idx: &[usize], mat: &LinearMap, scale: &Rational) -> Result<()> {
        if idx.len() != self.pattern.arity() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "tuple length {} for arity {}",
                idx.len(),
                self.pattern.arity()
            )));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.arg_dim) {
            return Err(AlgebraError::IndexOutOfRange(format!(
                "index {bad} in dimension {}",
                self.arg_dim
            )));
        }
        if mat.rows() != self.out_dim || mat.cols() != self.out_dim {
            return Err(AlgebraError::ShapeMismatch("matrix size".into()));
        }
        if scale.is_zero() || mat.is_zero() {
            return Ok(());
        }
        let Some((key, odd)) = self.pattern.canonicalize(idx) else {
            return Ok(());
        };
        let factor = if odd { -scale.clone() } else { scale.clone() };
        let scaled = mat.scale(&factor);
        let updated = match self.mats.get(&key) {
            Some(existing) => existing.add(&scaled)?,
            None => scaled,
        };
        if updated.is_zero() {
            self.mats.remove(&key);
        } else {
            self.mats.insert(key, updated);
        }
        Ok(())
    }

    /// Matrix on a basis tuple, with the canonicalization sign.
    pub fn eval_basis(&self, idx: &[usize]) -> LinearMap {
        let Some((key, odd)) = self.pattern.canonicalize(idx) else {
            return LinearMap::zero(self.out_dim, self.out_dim);
        };
        match self.mats.get(&key) {
            None => LinearMap::zero(self.out_dim, self.out_dim),
            Some(m) if !odd => m.clone(),
            Some(m) => m.neg(),
        }
    }

    /// Multilinear extension to arbitrary argument vectors.
    pub fn eval_vectors(&self, args: &[DVec]) -> Result<LinearMap> {
        if args.len() != self.pattern.arity() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "{} arguments for arity {}",
                args.len(),
                self.pattern.arity()
            )));
        }
        for a in args {
            if a.len() != self.arg_dim {
                return Err(AlgebraError::ShapeMismatch("argument length".into()));
            }
        }
        let supports: Vec<Vec<usize>> = args
            .iter()
            .map(|a| (0..self.arg_dim).filter(|&i| !a[i].is_zero()).collect())
            .collect();
        let mut out = LinearMap::zero(self.out_dim, self.out_dim);
        if supports.iter().any(|s| s.is_empty()) {
            return Ok(out);
        }
        for tuple in supports.into_iter().multi_cartesian_product() {
            let mut weight = Rational::one();
            for (k, &i) in tuple.iter().enumerate() {
                weight *= &args[k][i];
            }
            let m = self.eval_basis(&tuple);
            if !m.is_zero() {
                out = out.add(&m.scale(&weight))?;
            }
        }
        Ok(out)
    }

    /// Apply the same linear transformation to every stored matrix.
    pub fn map_matrices(&self, f: impl Fn(&LinearMap) -> LinearMap) -> MatrixFamily {
        let mut out = MatrixFamily::new(self.arg_dim, self.out_dim, self.pattern.clone());
        for (key, m) in &self.mats {
            let new = f(m);
            if !new.is_zero() {
                out.mats.insert(key.clone(), new);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vec;
    use crate::rational::int;

    #[test]
    fn alternation_and_signs() {
        let mut fam = MatrixFamily::new(3, 2, SkewPattern::fully_alternating(2));
        let m = LinearMap::identity(2);
        fam.add_matrix(&[0, 1], &m, &int(1)).unwrap();
        assert_eq!(fam.eval_basis(&[1, 0]), m.neg());
        assert!(fam.eval_basis(&[1, 1]).is_zero());
    }

    #[test]
    fn multilinear_extension() {
        let mut fam = MatrixFamily::new(2, 2, SkewPattern::fully_alternating(2));
        fam.add_matrix(&[0, 1], &LinearMap::identity(2), &int(1)).unwrap();
        let mut x = basis_vec(2, 0);
        x[1] = int(3);
        let m = fam.eval_vectors(&[x, basis_vec(2, 1)]).unwrap();
        // Only the (e0, e1) term survives.
        assert_eq!(m, LinearMap::identity(2));
    }
}
