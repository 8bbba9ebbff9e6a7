//! Sparse multilinear tensors with declared alternating slot blocks.
//!
//! A [`StructureTensor`] stores the structure constants of an n-linear map
//! on canonical multi-indices only: inside every alternating block the
//! indices are strictly increasing. Evaluation on arbitrary index tuples
//! sorts within each block and multiplies by the permutation sign; a
//! repeated index inside a block evaluates to zero.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::linalg::{zero_vec, DVec};
use crate::rational::{sort_with_sign, Rational};

/// Sparse coefficient vector: target index -> nonzero coefficient.
pub type Coeffs = BTreeMap<usize, Rational>;

pub fn coeffs_from_dense(v: &[Rational]) -> Coeffs {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

pub fn coeffs_to_dense(c: &Coeffs, dim: usize) -> DVec {
    let mut v = zero_vec(dim);
    for (&i, x) in c {
        v[i] = x.clone();
    }
    v
}

/// `acc += scale · v`, pruning zeros so emptiness means the zero vector.
pub fn coeffs_add_scaled(acc: &mut Coeffs, v: &Coeffs, scale: &Rational) {
    if scale.is_zero() {
        return;
    }
    for (&t, c) in v {
        let e = acc.entry(t).or_insert_with(Rational::zero);
        *e += c * scale;
        if e.is_zero() {
            acc.remove(&t);
        }
    }
}

/// Declares which argument slots of an n-linear map are alternating.
///
/// Blocks are disjoint contiguous slot ranges (0-based, half-open). Blocks
/// of length < 2 impose no constraint and are dropped at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewPattern {
    arity: usize,
    blocks: Vec<(usize, usize)>,
}

impl SkewPattern {
    pub fn new(arity: usize, mut blocks: Vec<(usize, usize)>) -> Result<Self> {
        blocks.retain(|&(s, e)| e > s + 1);
        blocks.sort_unstable();
        for &(s, e) in &blocks {
            if e > arity || s >= e {
                return Err(AlgebraError::InvalidPattern(format!(
                    "block {s}..{e} outside arity {arity}"
                )));
            }
        }
        for w in blocks.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(AlgebraError::InvalidPattern("overlapping blocks".into()));
            }
        }
        Ok(Self { arity, blocks })
    }

    /// All slots alternate together (n-Lie brackets).
    pub fn fully_alternating(arity: usize) -> Self {
        Self::new(arity, vec![(0, arity)]).expect("valid block")
    }

    /// The first `len` slots alternate, the rest are free (n-pre-Lie products).
    pub fn leading_alternating(arity: usize, len: usize) -> Self {
        Self::new(arity, vec![(0, len.min(arity))]).expect("valid block")
    }

    /// Slots `start..start+len` alternate, the rest are free.
    pub fn inner_alternating(arity: usize, start: usize, len: usize) -> Self {
        Self::new(arity, vec![(start, (start + len).min(arity))]).expect("valid block")
    }

    /// No alternation at all.
    pub fn unconstrained(arity: usize) -> Self {
        Self { arity, blocks: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn is_canonical(&self, idx: &[usize]) -> bool {
        self.blocks
            .iter()
            .all(|&(s, e)| idx[s..e].windows(2).all(|w| w[0] < w[1]))
    }

    /// Sort within each block; `None` when a block repeats an index
    /// (the tensor evaluates to zero there), otherwise the canonical key
    /// and whether the total sign is negative.
    pub fn canonicalize(&self, idx: &[usize]) -> Option<(Vec<usize>, bool)> {
        let mut key = idx.to_vec();
        let mut odd = false;
        for &(s, e) in &self.blocks {
            match sort_with_sign(&mut key[s..e]) {
                None => return None,
                Some(o) => odd ^= o,
            }
        }
        Some((key, odd))
    }

    /// Every canonical index tuple over `0..dim`, in lexicographic order.
    pub fn canonical_tuples(&self, dim: usize) -> Vec<Vec<usize>> {
        let mut slot_choices: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut slot = 0;
        while slot < self.arity {
            if let Some(&(s, e)) = self.blocks.iter().find(|&&(s, _)| s == slot) {
                slot_choices.push((0..dim).combinations(e - s).collect());
                slot = e;
            } else {
                slot_choices.push((0..dim).map(|i| vec![i]).collect());
                slot += 1;
            }
        }
        slot_choices
            .into_iter()
            .multi_cartesian_product()
            .map(|parts| parts.concat())
            .collect()
    }
}

/// Structure constants of an n-linear map, stored sparsely on canonical keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureTensor {
    dim: usize,
    pattern: SkewPattern,
    entries: BTreeMap<Vec<usize>, Coeffs>,
}

impl StructureTensor {
    pub fn new(dim: usize, pattern: SkewPattern) -> Self {
        Self {
            dim,
            pattern,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.pattern.arity()
    }

    pub fn pattern(&self) -> &SkewPattern {
        &self.pattern
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Coeffs)> {
        self.entries.iter()
    }

    fn check_bounds(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.pattern.arity() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "index tuple length {} for arity {}",
                idx.len(),
                self.pattern.arity()
            )));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(AlgebraError::IndexOutOfRange(format!(
                "index {bad} in dimension {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// Store a value at an already-canonical key. Rejects non-canonical keys
    /// instead of normalizing, so loaders surface sign mistakes. Zero
    /// coefficients are dropped.
    pub fn insert_canonical(&mut self, idx: Vec<usize>, value: Coeffs) -> Result<()> {
        self.check_bounds(&idx)?;
        if !self.pattern.is_canonical(&idx) {
            return Err(AlgebraError::NonCanonicalIndex(idx));
        }
        if let Some(&bad) = value.keys().find(|&&t| t >= self.dim) {
            return Err(AlgebraError::IndexOutOfRange(format!(
                "target index {bad} in dimension {}",
                self.dim
            )));
        }
        let filtered: Coeffs = value.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if filtered.is_empty() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, filtered);
        }
        Ok(())
    }

    /// Accumulate `c · e_target` at an arbitrary key, canonicalizing with sign.
    /// A repeated index inside a block contributes nothing.
    pub fn add_term(&mut self, idx: &[usize], target: usize, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let Some((key, odd)) = self.pattern.canonicalize(idx) else {
            return;
        };
        let signed = if odd { -c.clone() } else { c.clone() };
        let slot = self.entries.entry(key.clone()).or_default();
        let acc = slot.entry(target).or_insert_with(Rational::zero);
        *acc += signed;
        if acc.is_zero() {
            slot.remove(&target);
        }
        if slot.is_empty() {
            self.entries.remove(&key);
        }
    }

    /// Accumulate a whole coefficient vector at an arbitrary key.
    pub fn add_coeffs(&mut self, idx: &[usize], coeffs: &Coeffs, scale: &Rational) {
        for (&t, c) in coeffs {
            self.add_term(idx, t, &(c * scale));
        }
    }

    /// Value on a tuple of basis vectors, with the sign of canonicalization.
    pub fn eval_basis(&self, idx: &[usize]) -> Coeffs {
        let Some((key, odd)) = self.pattern.canonicalize(idx) else {
            return Coeffs::new();
        };
        match self.entries.get(&key) {
            None => Coeffs::new(),
            Some(v) if !odd => v.clone(),
            Some(v) => v.iter().map(|(&t, c)| (t, -c.clone())).collect(),
        }
    }

    /// Multilinear extension to arbitrary vectors.
    pub fn eval(&self, args: &[DVec]) -> Result<DVec> {
        if args.len() != self.pattern.arity() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "{} arguments for arity {}",
                args.len(),
                self.pattern.arity()
            )));
        }
        for a in args {
            if a.len() != self.dim {
                return Err(AlgebraError::ShapeMismatch(format!(
                    "argument length {} in dimension {}",
                    a.len(),
                    self.dim
                )));
            }
        }
        let supports: Vec<Vec<usize>> = args
            .iter()
            .map(|a| (0..self.dim).filter(|&i| !a[i].is_zero()).collect())
            .collect();
        let mut out = zero_vec(self.dim);
        if supports.iter().any(|s| s.is_empty()) {
            return Ok(out);
        }
        for tuple in supports.into_iter().multi_cartesian_product() {
            let mut weight = Rational::one();
            for (k, &i) in tuple.iter().enumerate() {
                weight *= &args[k][i];
            }
            for (&t, c) in &self.eval_basis(&tuple) {
                out[t] += c * &weight;
            }
        }
        Ok(out)
    }
}
