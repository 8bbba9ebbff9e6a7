//! n-L-dendriform algebras: two products whose combined brackets yield a
//! pair of n-pre-Lie structures with a common associated n-Lie bracket,
//! plus every dendrification construction (O-operators, Rota-Baxter
//! operators, pseudo-Hessian forms, commuting Rota-Baxter pairs).

use std::sync::atomic::{AtomicBool, Ordering};

use itertools::Itertools;
use num::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::family::MatrixFamily;
use crate::linalg::{basis_vec, vec_is_zero, BilinearForm, DVec, LinearMap, Symmetry};
use crate::nlie::{combos, NLieAlgebra, NLieRep};
use crate::nprelie::{alternating_sum_tensor, NPreLieAlgebra, NPreLieRep};
use crate::rational::{int, Rational};
use crate::report::{Report, Violation};
use crate::tensor::{
    coeffs_add_scaled, coeffs_from_dense, coeffs_to_dense, Coeffs, SkewPattern, StructureTensor,
};

/// Alternation pattern of the north-east product: slots 2..n-1 alternate,
/// the first and last slots are free.
pub fn ne_pattern(arity: usize) -> SkewPattern {
    SkewPattern::new(arity, vec![(1, arity - 1)]).expect("valid block")
}

/// Which associated n-pre-Lie product to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreLieMode {
    Horizontal,
    Vertical,
}

/// A pair of products `(↖, ↗)`; `↖` alternates in its first n-1 slots and
/// `↗` in its middle slots 2..n-1.
#[derive(Debug)]
pub struct NLDendriform {
    dim: usize,
    arity: usize,
    nw: StructureTensor,
    ne: StructureTensor,
    verified: AtomicBool,
}

impl Clone for NLDendriform {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            arity: self.arity,
            nw: self.nw.clone(),
            ne: self.ne.clone(),
            verified: AtomicBool::new(self.is_verified()),
        }
    }
}

impl PartialEq for NLDendriform {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.arity == other.arity
            && self.nw == other.nw
            && self.ne == other.ne
    }
}

impl NLDendriform {
    pub fn new(dim: usize, arity: usize, nw: StructureTensor, ne: StructureTensor) -> Result<Self> {
        if arity < 2 {
            return Err(AlgebraError::Precondition("arity must be at least 2".into()));
        }
        if nw.dim() != dim || nw.arity() != arity || ne.dim() != dim || ne.arity() != arity {
            return Err(AlgebraError::ShapeMismatch("product tensor shape".into()));
        }
        if nw.pattern() != &SkewPattern::leading_alternating(arity, arity - 1) {
            return Err(AlgebraError::InvalidPattern(
                "north-west product must alternate in the first n-1 slots".into(),
            ));
        }
        if ne.pattern() != &ne_pattern(arity) {
            return Err(AlgebraError::InvalidPattern(
                "north-east product must alternate in slots 2..n-1".into(),
            ));
        }
        Ok(Self {
            dim,
            arity,
            nw,
            ne,
            verified: AtomicBool::new(false),
        })
    }

    pub fn zero(dim: usize, arity: usize) -> Self {
        Self::new(
            dim,
            arity,
            StructureTensor::new(dim, SkewPattern::leading_alternating(arity, arity - 1)),
            StructureTensor::new(dim, ne_pattern(arity)),
        )
        .expect("zero products")
    }

    /// A verified n-pre-Lie product with zero north-east part.
    pub fn from_prelie(prelie: &NPreLieAlgebra) -> Self {
        Self::new(
            prelie.dim(),
            prelie.arity(),
            prelie.product().clone(),
            StructureTensor::new(prelie.dim(), ne_pattern(prelie.arity())),
        )
        .expect("compatible shapes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nw(&self) -> &StructureTensor {
        &self.nw
    }

    pub fn ne(&self) -> &StructureTensor {
        &self.ne
    }

    pub fn is_verified(&self) -> bool {
        self.verified.load(Ordering::Relaxed)
    }

    pub fn require_verified(&self) -> Result<()> {
        if self.is_verified() {
            Ok(())
        } else {
            Err(AlgebraError::Unverified("n-L-dendriform algebra (run check first)".into()))
        }
    }

    fn mark_verified(&self) {
        self.verified.store(true, Ordering::Relaxed);
    }

    /// Trust an unchecked value: sets the verified flag without running the
    /// checker. Downstream constructions will then build on whatever is
    /// stored, valid or not.
    pub fn assume_verified(&self) {
        self.verified.store(true, Ordering::Relaxed);
    }

    /// `{x_1,..,x_n}^h = ↖(x..) + Σ_{i<n} (-1)^{i+1} ↗(x_i,x_1,..,x̂_i,..,x_n)`.
    pub fn horizontal_basis(&self, args: &[usize]) -> Coeffs {
        let n = self.arity;
        let mut out = self.nw.eval_basis(args);
        for i in 0..n - 1 {
            let sign = if i % 2 == 0 { int(1) } else { int(-1) };
            let mut ne_args = vec![args[i]];
            ne_args.extend(args.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
            coeffs_add_scaled(&mut out, &self.ne.eval_basis(&ne_args), &sign);
        }
        out
    }

    /// `{x_1,..,x_n}^v = ↖(x..) + Σ_{i<n} (-1)^i ↗(x_n,x_1,..,x̂_i,..,x_{n-1},x_i)`.
    pub fn vertical_basis(&self, args: &[usize]) -> Coeffs {
        let n = self.arity;
        let mut out = self.nw.eval_basis(args);
        for i in 0..n - 1 {
            let sign = if i % 2 == 0 { int(-1) } else { int(1) };
            let mut ne_args = vec![args[n - 1]];
            ne_args.extend(
                args[..n - 1]
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &x)| x),
            );
            ne_args.push(args[i]);
            coeffs_add_scaled(&mut out, &self.ne.eval_basis(&ne_args), &sign);
        }
        out
    }

    fn combined_basis(&self, mode: PreLieMode, args: &[usize]) -> Coeffs {
        match mode {
            PreLieMode::Horizontal => self.horizontal_basis(args),
            PreLieMode::Vertical => self.vertical_basis(args),
        }
    }

    /// `[x_1,..,x_n]^C = Σ_i (-1)^{n-i} {x_1,..,x̂_i,..,x_n,x_i}` taken with
    /// either combined product.
    pub fn crochet_tensor(&self, mode: PreLieMode) -> StructureTensor {
        let n = self.arity;
        let d = self.dim;
        let mut out = StructureTensor::new(d, SkewPattern::fully_alternating(n));
        for tuple in combos(d, n) {
            let mut value = Coeffs::new();
            for i in 0..n {
                let sign = if (n - 1 - i) % 2 == 0 { int(1) } else { int(-1) };
                let mut args = tuple.clone();
                let moved = args.remove(i);
                args.push(moved);
                coeffs_add_scaled(&mut value, &self.combined_basis(mode, &args), &sign);
            }
            for (&t, c) in &value {
                out.add_term(&tuple, t, c);
            }
        }
        out
    }

    /// Check the six defining identities, each reported as its own family.
    pub fn check(&self) -> Report {
        let n = self.arity;
        let d = self.dim;
        let crochet = self.crochet_tensor(PreLieMode::Horizontal);
        let mut report = Report::new("n-l-dendriform");
        let minus_one = int(-1);

        // (1) ↖(x..,↖(y_1,..,y_n)) - ↖(y_1,..,y_{n-1},↖(x..,y_n))
        //     = Σ_{i<n} ↖(y_1,..,[x..,y_i]^C,..,y_n)
        for x in combos(d, n - 1) {
            for yb in combos(d, n - 1) {
                for yn in 0..d {
                    let mut y = yb.clone();
                    y.push(yn);
                    let mut residual = Coeffs::new();
                    let inner = self.nw.eval_basis(&y);
                    let mut args = x.clone();
                    args.push(0);
                    for (&t, c) in &inner {
                        args[n - 1] = t;
                        coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&args), c);
                    }
                    let mut pargs = x.clone();
                    pargs.push(yn);
                    let inner2 = self.nw.eval_basis(&pargs);
                    let mut yargs = y.clone();
                    for (&t, c) in &inner2 {
                        yargs[n - 1] = t;
                        coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&yargs), &(c * &minus_one));
                    }
                    for i in 0..n - 1 {
                        let mut bargs = x.clone();
                        bargs.push(y[i]);
                        let acted = crochet.eval_basis(&bargs);
                        let mut sub = y.clone();
                        for (&t, c) in &acted {
                            sub[i] = t;
                            coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&sub), &(c * &minus_one));
                        }
                    }
                    if !residual.is_empty() {
                        let mut full = x.clone();
                        full.extend(&y);
                        report.push(Violation::new("ldend-1", full, residual));
                    }
                }
            }
        }

        // y tails for identities quantified over y_1,..,y_{n-2}.
        let short_tails: Vec<Vec<usize>> = if n == 2 {
            vec![Vec::new()]
        } else {
            let mut out = Vec::new();
            for yb in combos(d, n - 3) {
                for ylast in 0..d {
                    let mut y = yb.clone();
                    y.push(ylast);
                    out.push(y);
                }
            }
            out
        };

        // (2) ↖([x..]^C,y_1,..,y_{n-1}) = Σ_i (-1)^{n-i} ↖(x_1,..,x̂_i,..,x_n,↖(x_i,y..))
        for xt in combos(d, n) {
            let bracket = crochet.eval_basis(&xt);
            for yb in combos(d, n - 2) {
                for ylast in 0..d {
                    let mut y = yb.clone();
                    y.push(ylast);
                    let mut residual = Coeffs::new();
                    let mut args = vec![0];
                    args.extend(&y);
                    for (&t, c) in &bracket {
                        args[0] = t;
                        coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&args), c);
                    }
                    for i in 0..n {
                        let sign = if (n - 1 - i) % 2 == 0 { int(-1) } else { int(1) };
                        let mut inner_args = vec![xt[i]];
                        inner_args.extend(&y);
                        let inner = self.nw.eval_basis(&inner_args);
                        let mut outer = xt.clone();
                        outer.remove(i);
                        outer.push(0);
                        for (&t, c) in &inner {
                            outer[n - 1] = t;
                            coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&outer), &(c * &sign));
                        }
                    }
                    if !residual.is_empty() {
                        let mut full = xt.clone();
                        full.extend(&y);
                        report.push(Violation::new("ldend-2", full, residual));
                    }
                }
            }
        }

        // (3) ↖(x..,↗(y_n,y_1,..,y_{n-1})) - ↗(y_n,y_1,..,y_{n-2},{x..,y_{n-1}}^h)
        //     = ↗({x..,y_n}^v,y_1,..,y_{n-1})
        //       + Σ_{i<=n-2} ↗(y_n,y_1,..,[x..,y_i]^C,..,y_{n-1})
        for x in combos(d, n - 1) {
            for yb in combos(d, n - 2) {
                for ylast in 0..d {
                    // y list is (y_1,..,y_{n-1}) = yb ++ [ylast].
                    let mut ylist = yb.clone();
                    ylist.push(ylast);
                    for yn in 0..d {
                        let mut residual = Coeffs::new();
                        let mut ne_args = vec![yn];
                        ne_args.extend(&ylist);
                        let inner = self.ne.eval_basis(&ne_args);
                        let mut outer = x.clone();
                        outer.push(0);
                        for (&t, c) in &inner {
                            outer[n - 1] = t;
                            coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&outer), c);
                        }
                        let mut pargs = x.clone();
                        pargs.push(ylast);
                        let h = self.horizontal_basis(&pargs);
                        let mut sub = vec![yn];
                        sub.extend(&yb);
                        sub.push(0);
                        for (&t, c) in &h {
                            sub[n - 1] = t;
                            coeffs_add_scaled(&mut residual, &self.ne.eval_basis(&sub), &(c * &minus_one));
                        }
                        let mut vargs = x.clone();
                        vargs.push(yn);
                        let v = self.vertical_basis(&vargs);
                        let mut sub = vec![0];
                        sub.extend(&ylist);
                        for (&t, c) in &v {
                            sub[0] = t;
                            coeffs_add_scaled(&mut residual, &self.ne.eval_basis(&sub), &(c * &minus_one));
                        }
                        for i in 0..n.saturating_sub(2) {
                            let mut bargs = x.clone();
                            bargs.push(ylist[i]);
                            let acted = crochet.eval_basis(&bargs);
                            let mut sub = vec![yn];
                            sub.extend(&ylist);
                            for (&t, c) in &acted {
                                sub[1 + i] = t;
                                coeffs_add_scaled(&mut residual, &self.ne.eval_basis(&sub), &(c * &minus_one));
                            }
                        }
                        if !residual.is_empty() {
                            let mut full = x.clone();
                            full.extend(&ylist);
                            full.push(yn);
                            report.push(Violation::new("ldend-3", full, residual));
                        }
                    }
                }
            }
        }

        // (4) ↗(y_{n-1},[x..]^C,y_1,..,y_{n-2})
        //     = Σ_i (-1)^{n-i} ↖(x_1,..,x̂_i,..,x_n,↗(y_{n-1},x_i,y_1,..,y_{n-2}))
        for xt in combos(d, n) {
            let bracket = crochet.eval_basis(&xt);
            for tail in &short_tails {
                for yfirst in 0..d {
                    let mut residual = Coeffs::new();
                    let mut args = vec![yfirst, 0];
                    args.extend(tail);
                    for (&t, c) in &bracket {
                        args[1] = t;
                        coeffs_add_scaled(&mut residual, &self.ne.eval_basis(&args), c);
                    }
                    for i in 0..n {
                        let sign = if (n - 1 - i) % 2 == 0 { int(-1) } else { int(1) };
                        let mut inner_args = vec![yfirst, xt[i]];
                        inner_args.extend(tail);
                        let inner = self.ne.eval_basis(&inner_args);
                        let mut outer = xt.clone();
                        outer.remove(i);
                        outer.push(0);
                        for (&t, c) in &inner {
                            outer[n - 1] = t;
                            coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&outer), &(c * &sign));
                        }
                    }
                    if !residual.is_empty() {
                        let mut full = xt.clone();
                        full.extend(tail);
                        full.push(yfirst);
                        report.push(Violation::new("ldend-4", full, residual));
                    }
                }
            }
        }

        // (5) ↗(x_{n-1},x_1,..,x_{n-2},{y..}^h) - ↖(y_1,..,y_{n-1},↗(x_{n-1},x..,y_n))
        //     = Σ_{i<n} (-1)^{i+1} ↗({x_1,..,x_{n-2},y_i,x_{n-1}}^v,y_1,..,ŷ_i,..,y_n)
        for xb in combos(d, n - 2) {
            for xlast in 0..d {
                for yb in combos(d, n - 1) {
                    for yn in 0..d {
                        let mut y = yb.clone();
                        y.push(yn);
                        let mut residual = Coeffs::new();
                        let h = self.horizontal_basis(&y);
                        let mut sub = vec![xlast];
                        sub.extend(&xb);
                        sub.push(0);
                        for (&t, c) in &h {
                            sub[n - 1] = t;
                            coeffs_add_scaled(&mut residual, &self.ne.eval_basis(&sub), c);
                        }
                        let mut inner_args = vec![xlast];
                        inner_args.extend(&xb);
                        inner_args.push(yn);
                        let inner = self.ne.eval_basis(&inner_args);
                        let mut outer = yb.clone();
                        outer.push(0);
                        for (&t, c) in &inner {
                            outer[n - 1] = t;
                            coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&outer), &(c * &minus_one));
                        }
                        for i in 0..n - 1 {
                            let sign = if i % 2 == 0 { int(-1) } else { int(1) };
                            let mut vargs = xb.clone();
                            vargs.push(y[i]);
                            vargs.push(xlast);
                            let v = self.vertical_basis(&vargs);
                            let mut rest = vec![0];
                            rest.extend(y.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &z)| z));
                            for (&t, c) in &v {
                                rest[0] = t;
                                coeffs_add_scaled(&mut residual, &self.ne.eval_basis(&rest), &(c * &sign));
                            }
                        }
                        if !residual.is_empty() {
                            let mut full = xb.clone();
                            full.push(xlast);
                            full.extend(&y);
                            report.push(Violation::new("ldend-5", full, residual));
                        }
                    }
                }
            }
        }

        // (6) ↗({x..,y_n}^v,y_1,..,y_{n-1}) - ↖(x..,↗(y_n,y_1,..,y_{n-1}))
        //     = Σ_{i<n} (-1)^i ↗(y_n,x_1,..,x̂_i,..,x_{n-1},{x_i,y..}^h)
        for x in combos(d, n - 1) {
            for yb in combos(d, n - 2) {
                for ylast in 0..d {
                    let mut ylist = yb.clone();
                    ylist.push(ylast);
                    for yn in 0..d {
                        let mut residual = Coeffs::new();
                        let mut vargs = x.clone();
                        vargs.push(yn);
                        let v = self.vertical_basis(&vargs);
                        let mut sub = vec![0];
                        sub.extend(&ylist);
                        for (&t, c) in &v {
                            sub[0] = t;
                            coeffs_add_scaled(&mut residual, &self.ne.eval_basis(&sub), c);
                        }
                        let mut ne_args = vec![yn];
                        ne_args.extend(&ylist);
                        let inner = self.ne.eval_basis(&ne_args);
                        let mut outer = x.clone();
                        outer.push(0);
                        for (&t, c) in &inner {
                            outer[n - 1] = t;
                            coeffs_add_scaled(&mut residual, &self.nw.eval_basis(&outer), &(c * &minus_one));
                        }
                        for i in 0..n - 1 {
                            // Subtracting (-1)^i terms: +1 at odd 1-based i.
                            let sign = if i % 2 == 0 { int(1) } else { int(-1) };
                            let mut hargs = vec![x[i]];
                            hargs.extend(&ylist);
                            let h = self.horizontal_basis(&hargs);
                            let mut rest = vec![yn];
                            rest.extend(x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &z)| z));
                            rest.push(0);
                            for (&t, c) in &h {
                                rest[n - 1] = t;
                                coeffs_add_scaled(&mut residual, &self.ne.eval_basis(&rest), &(c * &sign));
                            }
                        }
                        if !residual.is_empty() {
                            let mut full = x.clone();
                            full.extend(&ylist);
                            full.push(yn);
                            report.push(Violation::new("ldend-6", full, residual));
                        }
                    }
                }
            }
        }

        if report.is_empty() {
            self.mark_verified();
        }
        report
    }
}

/// Either associated n-pre-Lie product of a verified pair.
pub fn assoc_prelie(ldend: &NLDendriform, mode: PreLieMode) -> Result<NPreLieAlgebra> {
    ldend.require_verified()?;
    let n = ldend.arity();
    let d = ldend.dim();
    let mut product = StructureTensor::new(d, SkewPattern::leading_alternating(n, n - 1));
    for key in SkewPattern::leading_alternating(n, n - 1).canonical_tuples(d) {
        for (&t, c) in &ldend.combined_basis(mode, &key) {
            product.add_term(&key, t, c);
        }
    }
    NPreLieAlgebra::new(d, n, product)
}

/// The associated n-Lie bracket (the alternating sum of either combined
/// product; both give the same tensor).
pub fn assoc_nlie(ldend: &NLDendriform) -> Result<NLieAlgebra> {
    ldend.require_verified()?;
    let horizontal = ldend.crochet_tensor(PreLieMode::Horizontal);
    let vertical = ldend.crochet_tensor(PreLieMode::Vertical);
    if horizontal != vertical {
        return Err(AlgebraError::Precondition(
            "horizontal and vertical alternating sums disagree".into(),
        ));
    }
    NLieAlgebra::new(ldend.dim(), ldend.arity(), horizontal)
}

/// The multiplication operators of a dendriform pair together with their
/// verification reports.
#[derive(Debug, Clone)]
pub struct LdendReps {
    /// `(A, L_↖, R_↗)` against the horizontal product.
    pub horizontal_rep: NPreLieRep,
    pub horizontal_report: Report,
    /// `(A, L_↖, -L_↗)` against the vertical product.
    pub vertical_rep: NPreLieRep,
    pub vertical_report: Report,
    /// Mismatches between the raw `-L_↗` formula and its canonical storage;
    /// nonempty means the formula lacks the symmetry a right action needs.
    pub vertical_shape: Report,
    /// `(A, L_↖)` against the associated n-Lie bracket.
    pub left_rep: NLieRep,
    pub left_report: Report,
    /// `(A, ρ)` with `ρ(x_1,..,x_{n-1}) y = {x_1,..,x_{n-1},y}^v`.
    pub rho_rep: NLieRep,
    pub rho_report: Report,
}

/// Build and verify all multiplication-operator representations.
pub fn ldend_reps(ldend: &NLDendriform) -> Result<LdendReps> {
    ldend.require_verified()?;
    let n = ldend.arity();
    let d = ldend.dim();

    let mut l_nw = MatrixFamily::new(d, d, SkewPattern::fully_alternating(n - 1));
    for idx in combos(d, n - 1) {
        let mut m = LinearMap::zero(d, d);
        let mut args = idx.clone();
        args.push(0);
        for y in 0..d {
            args[n - 1] = y;
            for (&t, c) in &ldend.nw().eval_basis(&args) {
                m.set_entry(t, y, c.clone());
            }
        }
        if !m.is_zero() {
            l_nw.add_matrix(&idx, &m, &Rational::one())?;
        }
    }

    let r_pattern = SkewPattern::leading_alternating(n - 1, n.saturating_sub(2));
    let mut r_ne = MatrixFamily::new(d, d, r_pattern.clone());
    for idx in r_pattern.canonical_tuples(d) {
        let mut m = LinearMap::zero(d, d);
        for y in 0..d {
            let mut args = vec![y];
            args.extend(&idx);
            for (&t, c) in &ldend.ne().eval_basis(&args) {
                m.set_entry(t, y, c.clone());
            }
        }
        if !m.is_zero() {
            r_ne.add_matrix(&idx, &m, &Rational::one())?;
        }
    }

    // -L_↗ as a candidate right action; its raw formula need not have the
    // required alternation, so store canonically and keep the mismatches.
    let neg_l_ne_raw = |idx: &[usize]| -> LinearMap {
        let mut m = LinearMap::zero(d, d);
        let mut args = idx.to_vec();
        args.push(0);
        for y in 0..d {
            args[n - 1] = y;
            for (&t, c) in &ldend.ne().eval_basis(&args) {
                m.set_entry(t, y, -c.clone());
            }
        }
        m
    };
    let mut neg_l_ne = MatrixFamily::new(d, d, r_pattern.clone());
    for idx in r_pattern.canonical_tuples(d) {
        let m = neg_l_ne_raw(&idx);
        if !m.is_zero() {
            neg_l_ne.add_matrix(&idx, &m, &Rational::one())?;
        }
    }
    let mut vertical_shape = Report::new("vertical-right-action-shape");
    for idx in (0..n - 1).map(|_| 0..d).multi_cartesian_product() {
        let stored = neg_l_ne.eval_basis(&idx);
        let raw = neg_l_ne_raw(&idx);
        let diff = stored.sub(&raw)?;
        for k in 0..d {
            let col = diff.column(k);
            if !vec_is_zero(&col) {
                let mut args = idx.clone();
                args.push(k);
                vertical_shape.push(Violation::new("vertical-shape", args, coeffs_from_dense(&col)));
            }
        }
    }

    let horizontal = assoc_prelie(ldend, PreLieMode::Horizontal)?;
    let h_ok = horizontal.check();
    if !h_ok.is_empty() {
        return Err(AlgebraError::Precondition("horizontal product fails its identities".into()));
    }
    let vertical = assoc_prelie(ldend, PreLieMode::Vertical)?;
    let v_ok = vertical.check();
    if !v_ok.is_empty() {
        return Err(AlgebraError::Precondition("vertical product fails its identities".into()));
    }

    let horizontal_rep = NPreLieRep::new(horizontal, d, l_nw.clone(), r_ne)?;
    let horizontal_report = horizontal_rep.check()?;
    let vertical_rep = NPreLieRep::new(vertical.clone(), d, l_nw.clone(), neg_l_ne)?;
    let vertical_report = vertical_rep.check()?;

    let assoc = assoc_nlie(ldend)?;
    let assoc_ok = assoc.check();
    if !assoc_ok.is_empty() {
        return Err(AlgebraError::Precondition("associated bracket fails the fundamental identity".into()));
    }
    let left_rep = NLieRep::new(assoc.clone(), d, l_nw)?;
    let left_report = left_rep.check()?;

    let mut rho = MatrixFamily::new(d, d, SkewPattern::fully_alternating(n - 1));
    for idx in combos(d, n - 1) {
        let mut m = LinearMap::zero(d, d);
        let mut args = idx.clone();
        args.push(0);
        for y in 0..d {
            args[n - 1] = y;
            for (&t, c) in &ldend.vertical_basis(&args) {
                m.set_entry(t, y, c.clone());
            }
        }
        if !m.is_zero() {
            rho.add_matrix(&idx, &m, &Rational::one())?;
        }
    }
    let rho_rep = NLieRep::new(assoc, d, rho)?;
    let rho_report = rho_rep.check()?;

    Ok(LdendReps {
        horizontal_rep,
        horizontal_report,
        vertical_rep,
        vertical_report,
        vertical_shape,
        left_rep,
        left_report,
        rho_rep,
        rho_report,
    })
}

/// An O-operator induced dendriform structure with verification metadata.
#[derive(Debug, Clone)]
pub struct OInducedLdend {
    pub dendriform: NLDendriform,
    pub product_check: Report,
    /// Residuals of `T{u..}^h_V = {Tu..}` (always expected empty).
    pub horizontal_morphism: Report,
    /// Residuals of `T{u..}^v_V = {Tu..}`; informational, not implied by
    /// the construction.
    pub vertical_morphism: Report,
    /// For invertible operators, the transported compatible structure on
    /// the source algebra.
    pub compatible_on_source: Option<NLDendriform>,
}

/// `↖(u_1,..,u_n) = l(Tu_1,..,Tu_{n-1}) u_n`,
/// `↗(u_1,..,u_n) = r(Tu_2,..,Tu_n) u_1` for an O-operator `T`.
pub fn o_to_ldend(t: &LinearMap, rep: &NPreLieRep) -> Result<OInducedLdend> {
    rep.require_verified()?;
    let ok = crate::nprelie::check_o_operator(t, rep)?;
    if !ok.is_empty() {
        return Err(AlgebraError::Precondition(format!(
            "operator fails the O-operator identity on {} tuple(s)",
            ok.len()
        )));
    }
    let n = rep.algebra().arity();
    let d = rep.algebra().dim();
    let m = rep.module_dim();
    let images: Vec<DVec> = (0..m).map(|k| t.column(k)).collect();
    let mut nw = StructureTensor::new(m, SkewPattern::leading_alternating(n, n - 1));
    for block in combos(m, n - 1) {
        let mapped: Vec<DVec> = block.iter().map(|&u| images[u].clone()).collect();
        let acting = rep.left().eval_vectors(&mapped)?;
        for un in 0..m {
            let col = acting.column(un);
            if vec_is_zero(&col) {
                continue;
            }
            let mut key = block.clone();
            key.push(un);
            for (target, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    nw.add_term(&key, target, c);
                }
            }
        }
    }
    let mut ne = StructureTensor::new(m, ne_pattern(n));
    for key in ne_pattern(n).canonical_tuples(m) {
        let mapped: Vec<DVec> = key[1..].iter().map(|&u| images[u].clone()).collect();
        let col = rep.right().eval_vectors(&mapped)?.column(key[0]);
        for (target, c) in col.iter().enumerate() {
            if !c.is_zero() {
                ne.add_term(&key, target, c);
            }
        }
    }
    let dendriform = NLDendriform::new(m, n, nw, ne)?;
    let product_check = dendriform.check();

    let mut horizontal_morphism = Report::new("o-ldend-horizontal-morphism");
    let mut vertical_morphism = Report::new("o-ldend-vertical-morphism");
    for block in combos(m, n - 1) {
        for un in 0..m {
            let mut tuple = block.clone();
            tuple.push(un);
            let mapped: Vec<DVec> = tuple.iter().map(|&u| images[u].clone()).collect();
            let target = rep.algebra().product().eval(&mapped)?;
            for (mode, out) in [
                (PreLieMode::Horizontal, &mut horizontal_morphism),
                (PreLieMode::Vertical, &mut vertical_morphism),
            ] {
                let combined = dendriform.combined_basis(mode, &tuple);
                let pushed = t.apply(&coeffs_to_dense(&combined, m))?;
                let mut residual = coeffs_from_dense(&pushed);
                coeffs_add_scaled(&mut residual, &coeffs_from_dense(&target), &int(-1));
                if !residual.is_empty() {
                    out.push(Violation::new("morphism", tuple.clone(), residual));
                }
            }
        }
    }

    let compatible_on_source = if t.rows() == t.cols() {
        t.inverse().ok().map(|t_inv| {
            let transport = |tensor: &StructureTensor, pattern: SkewPattern| {
                let mut out = StructureTensor::new(d, pattern);
                for key in out.pattern().canonical_tuples(d).iter() {
                    let args: Vec<DVec> = key.iter().map(|&x| t_inv.column(x)).collect();
                    let value = tensor.eval(&args).expect("shapes agree");
                    let pushed = t.apply(&value).expect("shapes agree");
                    for (target, c) in pushed.iter().enumerate() {
                        if !c.is_zero() {
                            out.add_term(key, target, c);
                        }
                    }
                }
                out
            };
            NLDendriform::new(
                d,
                n,
                transport(dendriform.nw(), SkewPattern::leading_alternating(n, n - 1)),
                transport(dendriform.ne(), ne_pattern(n)),
            )
            .expect("transported shapes")
        })
    } else {
        None
    };

    Ok(OInducedLdend {
        dendriform,
        product_check,
        horizontal_morphism,
        vertical_morphism,
        compatible_on_source,
    })
}

/// Dendrify a pre-Lie product through a weight-zero Rota-Baxter operator:
/// `↖(x..) = {P x_1,..,P x_{n-1},x_n}`, `↗(x..) = {x_1,P x_2,..,P x_n}`.
pub fn rb_to_ldend(prelie: &NPreLieAlgebra, rb: &LinearMap) -> Result<NLDendriform> {
    prelie.require_verified()?;
    let adjoint = prelie.adjoint_pre_rep()?;
    let ok = crate::nprelie::check_o_operator(rb, &adjoint)?;
    if !ok.is_empty() {
        return Err(AlgebraError::Precondition(format!(
            "operator fails the Rota-Baxter identity on {} tuple(s)",
            ok.len()
        )));
    }
    let n = prelie.arity();
    let d = prelie.dim();
    let mut nw = StructureTensor::new(d, SkewPattern::leading_alternating(n, n - 1));
    for key in SkewPattern::leading_alternating(n, n - 1).canonical_tuples(d) {
        let mut args: Vec<DVec> = key[..n - 1].iter().map(|&x| rb.column(x)).collect();
        args.push(basis_vec(d, key[n - 1]));
        let value = prelie.product().eval(&args)?;
        for (target, c) in value.iter().enumerate() {
            if !c.is_zero() {
                nw.add_term(&key, target, c);
            }
        }
    }
    let mut ne = StructureTensor::new(d, ne_pattern(n));
    for key in ne_pattern(n).canonical_tuples(d) {
        let mut args: Vec<DVec> = vec![basis_vec(d, key[0])];
        args.extend(key[1..].iter().map(|&x| rb.column(x)));
        let value = prelie.product().eval(&args)?;
        for (target, c) in value.iter().enumerate() {
            if !c.is_zero() {
                ne.add_term(&key, target, c);
            }
        }
    }
    NLDendriform::new(d, n, nw, ne)
}

/// Residuals of the closedness law for a symmetric form:
/// `B({x..},w) + B(x_n,[x_1,..,x_{n-1},w]^C)
///  - Σ_{i<n} (-1)^{i+1} B(x_i,{w,x_1,..,x̂_i,..,x_{n-1},x_n})`.
pub fn check_pseudo_hessian(prelie: &NPreLieAlgebra, form: &BilinearForm) -> Result<Report> {
    if form.symmetry() != Symmetry::Symmetric {
        return Err(AlgebraError::ShapeMismatch("pseudo-Hessian form must be symmetric".into()));
    }
    if form.dim() != prelie.dim() {
        return Err(AlgebraError::ShapeMismatch("form dimension".into()));
    }
    let n = prelie.arity();
    let d = prelie.dim();
    let sub = alternating_sum_tensor(prelie.product());
    let mut report = Report::new("pseudo-hessian");
    for block in combos(d, n - 1) {
        for xn in 0..d {
            let mut pargs = block.clone();
            pargs.push(xn);
            let prod = prelie.product().eval_basis(&pargs);
            for w in 0..d {
                let mut residual = Rational::zero();
                for (&t, c) in &prod {
                    residual += c * form.eval_basis(t, w);
                }
                let mut bargs = block.clone();
                bargs.push(w);
                for (&t, c) in &sub.eval_basis(&bargs) {
                    residual += c * form.eval_basis(xn, t);
                }
                for i in 0..n - 1 {
                    let sign = if i % 2 == 0 { int(-1) } else { int(1) };
                    let mut wargs = vec![w];
                    wargs.extend(block.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
                    wargs.push(xn);
                    for (&t, c) in &prelie.product().eval_basis(&wargs) {
                        residual += &sign * c * form.eval_basis(block[i], t);
                    }
                }
                if !residual.is_zero() {
                    let mut full = block.clone();
                    full.push(xn);
                    full.push(w);
                    report.push(Violation::new("closed", full, Coeffs::from([(0, residual)])));
                }
            }
        }
    }
    let rank = form.rank();
    if rank < d {
        report.push(Violation::new(
            "nondegenerate",
            vec![],
            Coeffs::from([(0, int(rank as i64))]),
        ));
    }
    Ok(report)
}

/// Dendrify through a pseudo-Hessian form: solve
/// `B(↖(x..),w) = -B(x_n,[x_1,..,x_{n-1},w]^C)` and
/// `B(↗(x..),w) = B(x_1,{w,x_2,..,x_n})`, and return along with the
/// derived product
/// `B({x..}',w) = -B(x_n,[x..,w]^C) + Σ_i (-1)^i B(x_n,{w,x_1,..,x̂_i,..,x_{n-1},x_i})`.
pub fn hessian_to_ldend(
    prelie: &NPreLieAlgebra,
    form: &BilinearForm,
) -> Result<(NLDendriform, NPreLieAlgebra)> {
    prelie.require_verified()?;
    let closed = check_pseudo_hessian(prelie, form)?;
    if !closed.is_empty() {
        return Err(AlgebraError::Precondition(format!(
            "form is not pseudo-Hessian: {} violation(s)",
            closed.len()
        )));
    }
    let n = prelie.arity();
    let d = prelie.dim();
    let solve = form.matrix().inverse()?;
    let sub = alternating_sum_tensor(prelie.product());

    let mut nw = StructureTensor::new(d, SkewPattern::leading_alternating(n, n - 1));
    let mut derived = StructureTensor::new(d, SkewPattern::leading_alternating(n, n - 1));
    for block in combos(d, n - 1) {
        for xn in 0..d {
            let mut functional = vec![Rational::zero(); d];
            let mut extra = vec![Rational::zero(); d];
            let mut bargs = block.clone();
            bargs.push(0);
            for (w, slot) in functional.iter_mut().enumerate() {
                bargs[n - 1] = w;
                for (&t, c) in &sub.eval_basis(&bargs) {
                    *slot -= c * form.eval_basis(xn, t);
                }
            }
            for (w, slot) in extra.iter_mut().enumerate() {
                for i in 0..n - 1 {
                    let sign = if (i + 1) % 2 == 1 { int(-1) } else { int(1) };
                    let mut wargs = vec![w];
                    wargs.extend(block.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
                    wargs.push(block[i]);
                    for (&t, c) in &prelie.product().eval_basis(&wargs) {
                        *slot += &sign * c * form.eval_basis(xn, t);
                    }
                }
            }
            let mut key = block.clone();
            key.push(xn);
            let value = solve.apply(&functional)?;
            for (target, c) in value.iter().enumerate() {
                if !c.is_zero() {
                    nw.add_term(&key, target, c);
                }
            }
            let combined: Vec<Rational> = functional
                .iter()
                .zip(&extra)
                .map(|(a, b)| a + b)
                .collect();
            let value = solve.apply(&combined)?;
            for (target, c) in value.iter().enumerate() {
                if !c.is_zero() {
                    derived.add_term(&key, target, c);
                }
            }
        }
    }

    let mut ne = StructureTensor::new(d, ne_pattern(n));
    for key in ne_pattern(n).canonical_tuples(d) {
        let mut functional = vec![Rational::zero(); d];
        for (w, slot) in functional.iter_mut().enumerate() {
            let mut wargs = vec![w];
            wargs.extend(&key[1..]);
            for (&t, c) in &prelie.product().eval_basis(&wargs) {
                *slot += c * form.eval_basis(key[0], t);
            }
        }
        let value = solve.apply(&functional)?;
        for (target, c) in value.iter().enumerate() {
            if !c.is_zero() {
                ne.add_term(&key, target, c);
            }
        }
    }

    Ok((
        NLDendriform::new(d, n, nw, ne)?,
        NPreLieAlgebra::new(d, n, derived)?,
    ))
}

/// Dendrify an n-Lie bracket through a commuting pair of weight-zero
/// Rota-Baxter operators:
/// `↖(x..) = [P_1P_2 x_1,..,P_1P_2 x_{n-1},x_n]`,
/// `↗(x..) = [P_1 x_1,P_1P_2 x_2,..,P_1P_2 x_{n-1},P_2 x_n]`.
pub fn commuting_rb_to_ldend(
    algebra: &NLieAlgebra,
    p1: &LinearMap,
    p2: &LinearMap,
) -> Result<NLDendriform> {
    algebra.require_verified()?;
    let adjoint = algebra.adjoint_rep();
    let rep_ok = adjoint.check()?;
    if !rep_ok.is_empty() {
        return Err(AlgebraError::Precondition("adjoint action is not a representation".into()));
    }
    for (name, p) in [("first", p1), ("second", p2)] {
        if !crate::nlie::check_o_operator(p, &adjoint)?.is_empty() {
            return Err(AlgebraError::Precondition(format!(
                "{name} operator is not Rota-Baxter of weight zero"
            )));
        }
    }
    if !p1.commutes_with(p2)? {
        return Err(AlgebraError::Precondition("operators do not commute".into()));
    }
    let n = algebra.arity();
    let d = algebra.dim();
    let p12 = p1.compose(p2)?;
    let mut nw = StructureTensor::new(d, SkewPattern::leading_alternating(n, n - 1));
    for key in SkewPattern::leading_alternating(n, n - 1).canonical_tuples(d) {
        let mut args: Vec<DVec> = key[..n - 1].iter().map(|&x| p12.column(x)).collect();
        args.push(basis_vec(d, key[n - 1]));
        let value = algebra.bracket().eval(&args)?;
        for (target, c) in value.iter().enumerate() {
            if !c.is_zero() {
                nw.add_term(&key, target, c);
            }
        }
    }
    let mut ne = StructureTensor::new(d, ne_pattern(n));
    for key in ne_pattern(n).canonical_tuples(d) {
        let mut args: Vec<DVec> = vec![p1.column(key[0])];
        args.extend(key[1..n - 1].iter().map(|&x| p12.column(x)));
        args.push(p2.column(key[n - 1]));
        let value = algebra.bracket().eval(&args)?;
        for (target, c) in value.iter().enumerate() {
            if !c.is_zero() {
                ne.add_term(&key, target, c);
            }
        }
    }
    NLDendriform::new(d, n, nw, ne)
}

/// Exact solution of the closedness system for symmetric forms on a given
/// product: the null space, plus one nondegenerate solution when the
/// solution space contains any.
#[derive(Debug, Clone)]
pub struct HessianSolve {
    /// Symmetric matrices spanning the solution space.
    pub basis: Vec<LinearMap>,
    pub rank: usize,
    pub nullity: usize,
    /// A nondegenerate solution, when one exists.
    pub example: Option<BilinearForm>,
    /// Whether the nondegeneracy search was exhaustive (making a `None`
    /// example a proof that every solution is degenerate).
    pub exhaustive: bool,
}

/// Solve the closedness law as an exact linear system in the entries of a
/// symmetric form. The search for a nondegenerate element scans a grid
/// whose size exceeds the degree of the determinant, so an empty outcome
/// on a full scan is conclusive.
pub fn pseudo_hessian_solutions(prelie: &NPreLieAlgebra) -> Result<HessianSolve> {
    prelie.require_verified()?;
    let n = prelie.arity();
    let d = prelie.dim();
    let unknowns: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (i..d).map(move |j| (i, j)))
        .collect();
    let index_of = |i: usize, j: usize| -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        unknowns.iter().position(|&(p, q)| (p, q) == (a, b)).expect("valid cell")
    };
    let sub = alternating_sum_tensor(prelie.product());
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for block in combos(d, n - 1) {
        for xn in 0..d {
            let mut pargs = block.clone();
            pargs.push(xn);
            let prod = prelie.product().eval_basis(&pargs);
            for w in 0..d {
                let mut row = vec![Rational::zero(); unknowns.len()];
                for (&t, c) in &prod {
                    row[index_of(t, w)] += c;
                }
                let mut bargs = block.clone();
                bargs.push(w);
                for (&t, c) in &sub.eval_basis(&bargs) {
                    row[index_of(xn, t)] += c;
                }
                for i in 0..n - 1 {
                    let sign = if i % 2 == 0 { int(-1) } else { int(1) };
                    let mut wargs = vec![w];
                    wargs.extend(block.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
                    wargs.push(xn);
                    for (&t, c) in &prelie.product().eval_basis(&wargs) {
                        row[index_of(block[i], t)] += c * &sign;
                    }
                }
                if !vec_is_zero(&row) {
                    rows.push(row);
                }
            }
        }
    }
    let system = if rows.is_empty() {
        LinearMap::zero(1, unknowns.len())
    } else {
        LinearMap::new(rows.len(), unknowns.len(), rows)?
    };
    let rank = system.rank();
    let null = system.null_space();
    let nullity = null.len();
    let to_matrix = |coords: &[Rational]| -> LinearMap {
        LinearMap::from_fn(d, d, |i, j| coords[index_of(i, j)].clone())
    };
    let basis: Vec<LinearMap> = null.iter().map(|v| to_matrix(v)).collect();

    // det(Σ c_k B_k) has degree d in each coefficient, so scanning
    // {0,..,d}^nullity decides whether it vanishes identically.
    let grid: u128 = ((d + 1) as u128)
        .checked_pow(nullity as u32)
        .unwrap_or(u128::MAX);
    let exhaustive = grid <= 2_000_000;
    let mut example = None;
    if exhaustive && nullity > 0 {
        'outer: for coeffs in (0..nullity)
            .map(|_| 0..=d as i64)
            .multi_cartesian_product()
        {
            let mut candidate = LinearMap::zero(d, d);
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    candidate = candidate.add(&basis[k].scale(&int(c)))?;
                }
            }
            if candidate.rank() == d {
                example = Some(BilinearForm::new(d, Symmetry::Symmetric, candidate)?);
                break 'outer;
            }
        }
    }
    Ok(HessianSolve {
        basis,
        rank,
        nullity,
        example,
        exhaustive,
    })
}
