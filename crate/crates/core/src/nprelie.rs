//! n-pre-Lie algebras: products alternating in all but the last argument,
//! the sub-adjacent bracket, four-identity representations, semidirect
//! products, dual representations and O-operators.

use std::sync::atomic::{AtomicBool, Ordering};

use num::{One, Zero};
use rayon::prelude::*;

use crate::error::{AlgebraError, Result};
use crate::family::MatrixFamily;
use crate::linalg::{vec_is_zero, DVec, LinearMap};
use crate::nlie::{combos, NLieAlgebra, NLieRep};
use crate::rational::{int, Rational};
use crate::report::{Report, Violation};
use crate::tensor::{
    coeffs_add_scaled, coeffs_from_dense, Coeffs, SkewPattern, StructureTensor,
};

/// The alternating sum `[x_1,..,x_n]^C = Σ_i (-1)^{n-i} {x_1,..,x̂_i,..,x_n,x_i}`
/// of a product alternating in its first n-1 slots, as a fully alternating
/// tensor.
pub(crate) fn alternating_sum_tensor(product: &StructureTensor) -> StructureTensor {
    let n = product.arity();
    let d = product.dim();
    let mut out = StructureTensor::new(d, SkewPattern::fully_alternating(n));
    for tuple in combos(d, n) {
        let mut value = Coeffs::new();
        for i in 0..n {
            let sign = if (n - 1 - i) % 2 == 0 { int(1) } else { int(-1) };
            let mut args: Vec<usize> = tuple.clone();
            let moved = args.remove(i);
            args.push(moved);
            coeffs_add_scaled(&mut value, &product.eval_basis(&args), &sign);
        }
        for (&t, c) in &value {
            out.add_term(&tuple, t, c);
        }
    }
    out
}

/// An algebra whose n-ary product alternates in the first n-1 arguments.
#[derive(Debug)]
pub struct NPreLieAlgebra {
    dim: usize,
    arity: usize,
    product: StructureTensor,
    verified: AtomicBool,
}

impl Clone for NPreLieAlgebra {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            arity: self.arity,
            product: self.product.clone(),
            verified: AtomicBool::new(self.is_verified()),
        }
    }
}

impl PartialEq for NPreLieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.arity == other.arity && self.product == other.product
    }
}

impl Eq for NPreLieAlgebra {}

impl NPreLieAlgebra {
    pub fn new(dim: usize, arity: usize, product: StructureTensor) -> Result<Self> {
        if arity < 2 {
            return Err(AlgebraError::Precondition("arity must be at least 2".into()));
        }
        if product.dim() != dim || product.arity() != arity {
            return Err(AlgebraError::ShapeMismatch("product tensor shape".into()));
        }
        if product.pattern() != &SkewPattern::leading_alternating(arity, arity - 1) {
            return Err(AlgebraError::InvalidPattern(
                "product must alternate in the first n-1 slots".into(),
            ));
        }
        Ok(Self {
            dim,
            arity,
            product,
            verified: AtomicBool::new(false),
        })
    }

    pub fn zero(dim: usize, arity: usize) -> Self {
        Self::new(
            dim,
            arity,
            StructureTensor::new(dim, SkewPattern::leading_alternating(arity, arity - 1)),
        )
        .expect("zero product")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn product(&self) -> &StructureTensor {
        &self.product
    }

    pub fn is_verified(&self) -> bool {
        self.verified.load(Ordering::Relaxed)
    }

    pub fn require_verified(&self) -> Result<()> {
        if self.is_verified() {
            Ok(())
        } else {
            Err(AlgebraError::Unverified("n-pre-Lie algebra (run check first)".into()))
        }
    }

    pub(crate) fn mark_verified(&self) {
        self.verified.store(true, Ordering::Relaxed);
    }

    /// Trust an unchecked value: sets the verified flag without running the
    /// checker. Downstream constructions will then build on whatever is
    /// stored, valid or not.
    pub fn assume_verified(&self) {
        self.verified.store(true, Ordering::Relaxed);
    }

    /// Check both defining identities on all canonical basis tuples.
    ///
    /// The first identity reads
    /// `{x_1,..,x_{n-1},{y_1,..,y_n}} = Σ_{i<n} {y_1,..,[x..,y_i]^C,..,y_n} + {y_1,..,y_{n-1},{x..,y_n}}`,
    /// the second
    /// `{[x_1,..,x_n]^C,y_1,..,y_{n-1}} = Σ_i (-1)^{n-i} {x_1,..,x̂_i,..,x_n,{x_i,y_1,..,y_{n-1}}}`.
    pub fn check(&self) -> Report {
        let n = self.arity;
        let d = self.dim;
        let sub = alternating_sum_tensor(&self.product);

        let xs = combos(d, n - 1);
        let ybs = combos(d, n - 1);
        let mut first_instances = Vec::new();
        for x in &xs {
            for yb in &ybs {
                for yn in 0..d {
                    first_instances.push((x, yb, yn));
                }
            }
        }
        let first: Vec<Violation> = first_instances
            .par_iter()
            .filter_map(|&(x, yb, yn)| {
                let mut y = yb.clone();
                y.push(yn);
                let residual = self.first_identity_residual(&sub, x, &y);
                (!residual.is_empty()).then(|| {
                    let mut args = x.clone();
                    args.extend(&y);
                    Violation::new("pre-lie-1", args, residual)
                })
            })
            .collect();

        let xts = combos(d, n);
        let ybs2 = combos(d, n - 2);
        let mut second_instances = Vec::new();
        for xt in &xts {
            for yb in &ybs2 {
                for ylast in 0..d {
                    second_instances.push((xt, yb, ylast));
                }
            }
        }
        let second: Vec<Violation> = second_instances
            .par_iter()
            .filter_map(|&(xt, yb, ylast)| {
                let mut y = yb.clone();
                y.push(ylast);
                let residual = self.second_identity_residual(&sub, xt, &y);
                (!residual.is_empty()).then(|| {
                    let mut args = xt.clone();
                    args.extend(&y);
                    Violation::new("pre-lie-2", args, residual)
                })
            })
            .collect();

        let mut report = Report::new("n-pre-lie");
        report.violations.extend(first);
        report.violations.extend(second);
        if report.is_empty() {
            self.mark_verified();
        }
        report
    }

    fn first_identity_residual(&self, sub: &StructureTensor, x: &[usize], y: &[usize]) -> Coeffs {
        let n = self.arity;
        let mut residual = Coeffs::new();
        // LHS {x.., {y..}}
        let inner = self.product.eval_basis(y);
        let mut args = x.to_vec();
        args.push(0);
        for (&t, c) in &inner {
            args[n - 1] = t;
            coeffs_add_scaled(&mut residual, &self.product.eval_basis(&args), c);
        }
        let minus_one = int(-1);
        // - Σ_{i=1}^{n-1} {y_1,..,[x..,y_i]^C,..,y_n}
        for i in 0..n - 1 {
            let mut bargs = x.to_vec();
            bargs.push(y[i]);
            let acted = sub.eval_basis(&bargs);
            let mut yargs = y.to_vec();
            for (&t, c) in &acted {
                yargs[i] = t;
                coeffs_add_scaled(&mut residual, &self.product.eval_basis(&yargs), &(c * &minus_one));
            }
        }
        // - {y_1,..,y_{n-1},{x..,y_n}}
        let mut pargs = x.to_vec();
        pargs.push(y[n - 1]);
        let inner2 = self.product.eval_basis(&pargs);
        let mut yargs = y.to_vec();
        for (&t, c) in &inner2 {
            yargs[n - 1] = t;
            coeffs_add_scaled(&mut residual, &self.product.eval_basis(&yargs), &(c * &minus_one));
        }
        residual
    }

    fn second_identity_residual(&self, sub: &StructureTensor, xt: &[usize], y: &[usize]) -> Coeffs {
        let n = self.arity;
        let mut residual = Coeffs::new();
        // LHS {[x..]^C, y_1,..,y_{n-1}}
        let bracket = sub.eval_basis(xt);
        let mut args = vec![0];
        args.extend(y);
        for (&t, c) in &bracket {
            args[0] = t;
            coeffs_add_scaled(&mut residual, &self.product.eval_basis(&args), c);
        }
        // - Σ_i (-1)^{n-i} {x_1,..,x̂_i,..,x_n, {x_i, y..}}
        for i in 0..n {
            let sign = if (n - 1 - i) % 2 == 0 { int(-1) } else { int(1) };
            let mut inner_args = vec![xt[i]];
            inner_args.extend(y);
            let inner = self.product.eval_basis(&inner_args);
            let mut outer = xt.to_vec();
            outer.remove(i);
            outer.push(0);
            for (&t, c) in &inner {
                outer[n - 1] = t;
                coeffs_add_scaled(&mut residual, &self.product.eval_basis(&outer), &(c * &sign));
            }
        }
        residual
    }

    /// The sub-adjacent n-Lie bracket. Runs the fundamental-identity check
    /// on the result, which holds whenever `self` is verified.
    pub fn sub_adjacent(&self) -> Result<NLieAlgebra> {
        self.require_verified()?;
        let algebra = NLieAlgebra::new(self.dim, self.arity, alternating_sum_tensor(&self.product))?;
        let report = algebra.check();
        if !report.is_empty() {
            return Err(AlgebraError::Precondition(format!(
                "sub-adjacent bracket fails the fundamental identity on {} tuple(s)",
                report.len()
            )));
        }
        Ok(algebra)
    }

    /// Matrix of `y -> {x_1,..,x_{n-1},y}` for a basis tuple.
    pub fn left_mult(&self, idx: &[usize]) -> Result<LinearMap> {
        if idx.len() != self.arity - 1 {
            return Err(AlgebraError::ShapeMismatch(format!(
                "left multiplication takes {} indices",
                self.arity - 1
            )));
        }
        let mut m = LinearMap::zero(self.dim, self.dim);
        let mut args = idx.to_vec();
        args.push(0);
        for y in 0..self.dim {
            args[self.arity - 1] = y;
            for (&t, c) in &self.product.eval_basis(&args) {
                m.set_entry(t, y, c.clone());
            }
        }
        Ok(m)
    }

    /// Matrix of `y -> {y, x_1,..,x_{n-1}}` for a basis tuple.
    pub fn right_mult(&self, idx: &[usize]) -> Result<LinearMap> {
        if idx.len() != self.arity - 1 {
            return Err(AlgebraError::ShapeMismatch(format!(
                "right multiplication takes {} indices",
                self.arity - 1
            )));
        }
        let mut m = LinearMap::zero(self.dim, self.dim);
        for y in 0..self.dim {
            let mut args = vec![y];
            args.extend(idx);
            for (&t, c) in &self.product.eval_basis(&args) {
                m.set_entry(t, y, c.clone());
            }
        }
        Ok(m)
    }

    /// Left multiplication as a representation of the sub-adjacent bracket
    /// on the algebra itself.
    pub fn left_mult_rep(&self) -> Result<NLieRep> {
        let sub = self.sub_adjacent()?;
        let n = self.arity;
        let mut action = MatrixFamily::new(self.dim, self.dim, SkewPattern::fully_alternating(n - 1));
        for idx in combos(self.dim, n - 1) {
            let m = self.left_mult(&idx)?;
            if !m.is_zero() {
                action.add_matrix(&idx, &m, &Rational::one())?;
            }
        }
        NLieRep::new(sub, self.dim, action)
    }

    /// The adjoint pair (L, R) acting on the algebra itself.
    pub fn adjoint_pre_rep(&self) -> Result<NPreLieRep> {
        self.require_verified()?;
        let n = self.arity;
        let mut l = MatrixFamily::new(self.dim, self.dim, SkewPattern::fully_alternating(n - 1));
        let mut r = MatrixFamily::new(
            self.dim,
            self.dim,
            SkewPattern::leading_alternating(n - 1, n.saturating_sub(2)),
        );
        for idx in combos(self.dim, n - 1) {
            let m = self.left_mult(&idx)?;
            if !m.is_zero() {
                l.add_matrix(&idx, &m, &Rational::one())?;
            }
        }
        for idx in SkewPattern::leading_alternating(n - 1, n.saturating_sub(2)).canonical_tuples(self.dim) {
            let m = self.right_mult(&idx)?;
            if !m.is_zero() {
                r.add_matrix(&idx, &m, &Rational::one())?;
            }
        }
        NPreLieRep::new(self.clone(), self.dim, l, r)
    }

    /// Residuals of `D{x_1,..,x_n} = Σ_i {x_1,..,Dx_i,..,x_n}`.
    pub fn derivation_report(&self, d: &LinearMap) -> Result<Report> {
        if d.rows() != self.dim || d.cols() != self.dim {
            return Err(AlgebraError::ShapeMismatch("derivation matrix".into()));
        }
        let mut report = Report::new("n-pre-lie-derivation");
        for key in self.product.pattern().canonical_tuples(self.dim) {
            let value = crate::tensor::coeffs_to_dense(&self.product.eval_basis(&key), self.dim);
            let mut residual = coeffs_from_dense(&d.apply(&value)?);
            for i in 0..self.arity {
                let mut args: Vec<DVec> = key
                    .iter()
                    .map(|&j| crate::linalg::basis_vec(self.dim, j))
                    .collect();
                args[i] = d.column(key[i]);
                let term = self.product.eval(&args)?;
                coeffs_add_scaled(&mut residual, &coeffs_from_dense(&term), &int(-1));
            }
            if !residual.is_empty() {
                report.push(Violation::new("derivation", key, residual));
            }
        }
        Ok(report)
    }

    /// Restrict to the span of the first `sub_dim` basis vectors; errors when
    /// that span is not closed under the product.
    pub fn restrict(&self, sub_dim: usize) -> Result<NPreLieAlgebra> {
        let pattern = SkewPattern::leading_alternating(self.arity, self.arity - 1);
        let mut product = StructureTensor::new(sub_dim, pattern);
        for (key, value) in self.product.entries() {
            if key.iter().any(|&i| i >= sub_dim) {
                continue;
            }
            if value.keys().any(|&t| t >= sub_dim) {
                return Err(AlgebraError::Precondition(format!(
                    "span of the first {sub_dim} basis vectors is not closed"
                )));
            }
            product.insert_canonical(key.clone(), value.clone())?;
        }
        NPreLieAlgebra::new(sub_dim, self.arity, product)
    }
}

/// A representation of an n-pre-Lie algebra: a pair `(l, r)` of matrix
/// families, `l` alternating in all n-1 slots and `r` in its first n-2.
#[derive(Debug)]
pub struct NPreLieRep {
    algebra: NPreLieAlgebra,
    module_dim: usize,
    l: MatrixFamily,
    r: MatrixFamily,
    verified: AtomicBool,
}

impl Clone for NPreLieRep {
    fn clone(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            module_dim: self.module_dim,
            l: self.l.clone(),
            r: self.r.clone(),
            verified: AtomicBool::new(self.is_verified()),
        }
    }
}

impl PartialEq for NPreLieRep {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra
            && self.module_dim == other.module_dim
            && self.l == other.l
            && self.r == other.r
    }
}

impl NPreLieRep {
    pub fn new(
        algebra: NPreLieAlgebra,
        module_dim: usize,
        l: MatrixFamily,
        r: MatrixFamily,
    ) -> Result<Self> {
        let n = algebra.arity();
        let d = algebra.dim();
        if l.arity() != n - 1 || l.arg_dim() != d || l.out_dim() != module_dim {
            return Err(AlgebraError::ShapeMismatch("left action".into()));
        }
        if r.arity() != n - 1 || r.arg_dim() != d || r.out_dim() != module_dim {
            return Err(AlgebraError::ShapeMismatch("right action".into()));
        }
        if l.pattern() != &SkewPattern::fully_alternating(n - 1) {
            return Err(AlgebraError::InvalidPattern("left action must alternate".into()));
        }
        if r.pattern() != &SkewPattern::leading_alternating(n - 1, n.saturating_sub(2)) {
            return Err(AlgebraError::InvalidPattern(
                "right action must alternate in its first n-2 slots".into(),
            ));
        }
        Ok(Self {
            algebra,
            module_dim,
            l,
            r,
            verified: AtomicBool::new(false),
        })
    }

    pub fn zero(algebra: NPreLieAlgebra, module_dim: usize) -> Self {
        let n = algebra.arity();
        let d = algebra.dim();
        Self {
            l: MatrixFamily::new(d, module_dim, SkewPattern::fully_alternating(n - 1)),
            r: MatrixFamily::new(d, module_dim, SkewPattern::leading_alternating(n - 1, n.saturating_sub(2))),
            algebra,
            module_dim,
            verified: AtomicBool::new(false),
        }
    }

    /// Representation with the given left action and zero right action.
    pub fn from_left(algebra: NPreLieAlgebra, left: MatrixFamily) -> Result<Self> {
        let n = algebra.arity();
        let d = algebra.dim();
        let module_dim = left.out_dim();
        let r = MatrixFamily::new(d, module_dim, SkewPattern::leading_alternating(n - 1, n.saturating_sub(2)));
        Self::new(algebra, module_dim, left, r)
    }

    pub fn algebra(&self) -> &NPreLieAlgebra {
        &self.algebra
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn left(&self) -> &MatrixFamily {
        &self.l
    }

    pub fn right(&self) -> &MatrixFamily {
        &self.r
    }

    pub fn is_verified(&self) -> bool {
        self.verified.load(Ordering::Relaxed)
    }

    pub fn require_verified(&self) -> Result<()> {
        if self.is_verified() {
            Ok(())
        } else {
            Err(AlgebraError::Unverified(
                "n-pre-Lie representation (run check first)".into(),
            ))
        }
    }

    pub(crate) fn mark_verified(&self) {
        self.verified.store(true, Ordering::Relaxed);
    }

    /// Trust an unchecked value: sets the verified flag without running the
    /// checker. Downstream constructions will then build on whatever is
    /// stored, valid or not.
    pub fn assume_verified(&self) {
        self.verified.store(true, Ordering::Relaxed);
    }

    /// `μ(x_1,..,x_{n-1}) = l(x_1,..,x_{n-1}) + Σ_i (-1)^i r(x_1,..,x̂_i,..,x_{n-1},x_i)`.
    pub fn mu_basis(&self, idx: &[usize]) -> Result<LinearMap> {
        let n = self.algebra.arity();
        if idx.len() != n - 1 {
            return Err(AlgebraError::ShapeMismatch(format!("mu takes {} indices", n - 1)));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.algebra.dim()) {
            return Err(AlgebraError::IndexOutOfRange(format!(
                "index {bad} in dimension {}",
                self.algebra.dim()
            )));
        }
        let mut mu = self.l.eval_basis(idx);
        for i in 0..n - 1 {
            let sign = if (i + 1) % 2 == 1 { int(-1) } else { int(1) };
            let mut args: Vec<usize> = idx.to_vec();
            let moved = args.remove(i);
            args.push(moved);
            mu = mu.add(&self.r.eval_basis(&args).scale(&sign))?;
        }
        Ok(mu)
    }

    /// Check the four defining identities, plus that `l` represents the
    /// sub-adjacent bracket. Each family is reported separately.
    pub fn check(&self) -> Result<Report> {
        self.algebra.require_verified()?;
        let n = self.algebra.arity();
        let d = self.algebra.dim();
        let m = self.module_dim;
        let product = self.algebra.product();
        let sub = alternating_sum_tensor(product);
        let mut report = Report::new("n-pre-lie-rep");

        let push_matrix_residual =
            |report: &mut Report, identity: &str, args: &[usize], diff: &LinearMap| {
                for k in 0..m {
                    let col = diff.column(k);
                    if !vec_is_zero(&col) {
                        let mut full = args.to_vec();
                        full.push(k);
                        report.push(Violation::new(identity, full, coeffs_from_dense(&col)));
                    }
                }
            };

        // Identity 1:
        // l(x)r(y) = r(y)μ(x) + Σ_{i<=n-2} r(y_1,..,[x,y_i]^C,..,y_{n-1})
        //            + r(y_1,..,y_{n-2},{x,y_{n-1}})
        for x in combos(d, n - 1) {
            let lx = self.l.eval_basis(&x);
            let mux = self.mu_basis(&x)?;
            for yb in combos(d, n - 2) {
                for ylast in 0..d {
                    let mut y = yb.clone();
                    y.push(ylast);
                    let ry = self.r.eval_basis(&y);
                    let mut diff = lx.compose(&ry)?.sub(&ry.compose(&mux)?)?;
                    for i in 0..n - 2 {
                        let mut bargs = x.clone();
                        bargs.push(y[i]);
                        let acted = sub.eval_basis(&bargs);
                        let mut yargs = y.clone();
                        for (&t, c) in &acted {
                            yargs[i] = t;
                            diff = diff.sub(&self.r.eval_basis(&yargs).scale(c))?;
                        }
                    }
                    let mut pargs = x.clone();
                    pargs.push(ylast);
                    let prod = product.eval_basis(&pargs);
                    let mut yargs = y.clone();
                    for (&t, c) in &prod {
                        yargs[n - 2] = t;
                        diff = diff.sub(&self.r.eval_basis(&yargs).scale(c))?;
                    }
                    if !diff.is_zero() {
                        let mut args = x.clone();
                        args.extend(&y);
                        push_matrix_residual(&mut report, "pre-rep-1", &args, &diff);
                    }
                }
            }
        }

        // Identity 2:
        // r([x]^C, y_1,..,y_{n-2}) = Σ_i (-1)^{n-i} l(x̂_i) r(x_i, y..)
        let ytails: Vec<Vec<usize>> = if n == 2 {
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
        for xt in combos(d, n) {
            let bracket = sub.eval_basis(&xt);
            for y in &ytails {
                let mut lhs = LinearMap::zero(m, m);
                let mut rargs = vec![0];
                rargs.extend(y);
                for (&t, c) in &bracket {
                    rargs[0] = t;
                    lhs = lhs.add(&self.r.eval_basis(&rargs).scale(c))?;
                }
                for i in 0..n {
                    let sign = if (n - 1 - i) % 2 == 0 { int(-1) } else { int(1) };
                    let mut omitted = xt.clone();
                    omitted.remove(i);
                    let mut inner = vec![xt[i]];
                    inner.extend(y);
                    let term = self
                        .l
                        .eval_basis(&omitted)
                        .compose(&self.r.eval_basis(&inner))?;
                    lhs = lhs.add(&term.scale(&sign))?;
                }
                if !lhs.is_zero() {
                    let mut args = xt.clone();
                    args.extend(y);
                    push_matrix_residual(&mut report, "pre-rep-2", &args, &lhs);
                }
            }
        }

        // Identity 3:
        // r(x_1,..,x_{n-2},{y_1,..,y_n}) = l(y_1,..,y_{n-1}) r(x..,y_n)
        //   + Σ_i (-1)^{i+1} r(y_1,..,ŷ_i,..,y_n) μ(x..,y_i)
        for xb in combos(d, n - 2) {
            for yb in combos(d, n - 1) {
                let ly = self.l.eval_basis(&yb);
                for yn in 0..d {
                    let mut y = yb.clone();
                    y.push(yn);
                    let mut rargs = xb.clone();
                    rargs.push(0);
                    let prod = product.eval_basis(&y);
                    let mut diff = LinearMap::zero(m, m);
                    for (&t, c) in &prod {
                        rargs[n - 2] = t;
                        diff = diff.add(&self.r.eval_basis(&rargs).scale(c))?;
                    }
                    let mut rxyn = xb.clone();
                    rxyn.push(yn);
                    diff = diff.sub(&ly.compose(&self.r.eval_basis(&rxyn))?)?;
                    for i in 0..n - 1 {
                        let sign = if i % 2 == 0 { int(1) } else { int(-1) };
                        let mut rest = y.clone();
                        rest.remove(i);
                        let mut muargs = xb.clone();
                        muargs.push(y[i]);
                        let term = self
                            .r
                            .eval_basis(&rest)
                            .compose(&self.mu_basis(&muargs)?)?;
                        diff = diff.sub(&term.scale(&sign))?;
                    }
                    if !diff.is_zero() {
                        let mut args = xb.clone();
                        args.extend(&y);
                        push_matrix_residual(&mut report, "pre-rep-3", &args, &diff);
                    }
                }
            }
        }

        // Identity 4:
        // r(y)μ(x) = l(x)r(y) + Σ_i (-1)^i r(x_1,..,x̂_i,..,x_{n-1},{x_i,y..})
        for x in combos(d, n - 1) {
            let lx = self.l.eval_basis(&x);
            let mux = self.mu_basis(&x)?;
            for yb in combos(d, n - 2) {
                for ylast in 0..d {
                    let mut y = yb.clone();
                    y.push(ylast);
                    let ry = self.r.eval_basis(&y);
                    let mut diff = ry.compose(&mux)?.sub(&lx.compose(&ry)?)?;
                    for i in 0..n - 1 {
                        let sign = if (i + 1) % 2 == 1 { int(-1) } else { int(1) };
                        let mut pargs = vec![x[i]];
                        pargs.extend(&y);
                        let prod = product.eval_basis(&pargs);
                        let mut rest = x.clone();
                        rest.remove(i);
                        rest.push(0);
                        for (&t, c) in &prod {
                            rest[n - 2] = t;
                            diff = diff.sub(&self.r.eval_basis(&rest).scale(&(c * &sign)))?;
                        }
                    }
                    if !diff.is_zero() {
                        let mut args = x.clone();
                        args.extend(&y);
                        push_matrix_residual(&mut report, "pre-rep-4", &args, &diff);
                    }
                }
            }
        }

        // l must represent the sub-adjacent bracket.
        let sub_algebra = self.algebra.sub_adjacent()?;
        let l_rep = NLieRep::new(sub_algebra, self.module_dim, self.l.clone())?;
        report.merge_prefixed("l-subadjacent", l_rep.check()?);

        if report.is_empty() {
            self.mark_verified();
        }
        Ok(report)
    }

    /// `ρ̃ = μ` restricted to alternating tuples, as a representation of the
    /// sub-adjacent bracket.
    pub fn rho_tilde(&self) -> Result<NLieRep> {
        self.require_verified()?;
        let n = self.algebra.arity();
        let d = self.algebra.dim();
        let sub = self.algebra.sub_adjacent()?;
        let mut action = MatrixFamily::new(d, self.module_dim, SkewPattern::fully_alternating(n - 1));
        for idx in combos(d, n - 1) {
            let mu = self.mu_basis(&idx)?;
            if !mu.is_zero() {
                action.add_matrix(&idx, &mu, &Rational::one())?;
            }
        }
        NLieRep::new(sub, self.module_dim, action)
    }

    /// Dual representation `(ρ̃*, -r*)` on the dual module.
    pub fn dual(&self) -> Result<NPreLieRep> {
        self.require_verified()?;
        let n = self.algebra.arity();
        let d = self.algebra.dim();
        let mut l = MatrixFamily::new(d, self.module_dim, SkewPattern::fully_alternating(n - 1));
        for idx in combos(d, n - 1) {
            let mu = self.mu_basis(&idx)?;
            if !mu.is_zero() {
                l.add_matrix(&idx, &mu.transpose().neg(), &Rational::one())?;
            }
        }
        // -r* is plain transposition: r*(Y) = -r(Y)^T.
        let r = self.r.map_matrices(LinearMap::transpose);
        NPreLieRep::new(self.algebra.clone(), self.module_dim, l, r)
    }
}

/// Semidirect product on `A ⊕ V`:
/// `{x_1+u_1,..,x_n+u_n} = {x..} + l(x_1,..,x_{n-1})(u_n)
///  + Σ_{i<n} (-1)^{i+1} r(x_1,..,x̂_i,..,x_n)(u_i)`.
pub fn semidirect(rep: &NPreLieRep) -> Result<NPreLieAlgebra> {
    rep.require_verified()?;
    let d = rep.algebra().dim();
    let m = rep.module_dim();
    let n = rep.algebra().arity();
    let total = d + m;
    let mut product = StructureTensor::new(total, SkewPattern::leading_alternating(n, n - 1));
    for key in rep.algebra().product().pattern().canonical_tuples(d) {
        for (&t, c) in &rep.algebra().product().eval_basis(&key) {
            product.add_term(&key, t, c);
        }
    }
    for block in combos(d, n - 1) {
        let lmat = rep.left().eval_basis(&block);
        for k in 0..m {
            let col = lmat.column(k);
            if vec_is_zero(&col) {
                continue;
            }
            let mut key = block.clone();
            key.push(d + k);
            for (t, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    product.add_term(&key, d + t, c);
                }
            }
        }
    }
    // Canonical keys place a single module factor at the end of the
    // alternating block (slot n-1), where the semidirect sign is (-1)^n.
    let sign = if n % 2 == 0 { int(1) } else { int(-1) };
    for block_a in combos(d, n - 2) {
        for last in 0..d {
            let mut rargs = block_a.clone();
            rargs.push(last);
            let rmat = rep.right().eval_basis(&rargs);
            for k in 0..m {
                let col = rmat.column(k);
                if vec_is_zero(&col) {
                    continue;
                }
                let mut key = block_a.clone();
                key.push(d + k);
                key.push(last);
                for (t, c) in col.iter().enumerate() {
                    if !c.is_zero() {
                        product.add_term(&key, d + t, &(c * &sign));
                    }
                }
            }
        }
    }
    NPreLieAlgebra::new(total, n, product)
}

/// Residuals of the O-operator identity for `T: V -> A`:
/// `{Tu_1,..,Tu_n} = T(l(Tu_1,..,Tu_{n-1})(u_n)
///   + Σ_{i<n} (-1)^{i+1} r(Tu_1,..,T̂u_i,..,Tu_n)(u_i))`.
pub fn check_o_operator(t: &LinearMap, rep: &NPreLieRep) -> Result<Report> {
    let d = rep.algebra().dim();
    let m = rep.module_dim();
    let n = rep.algebra().arity();
    if t.rows() != d || t.cols() != m {
        return Err(AlgebraError::ShapeMismatch(format!(
            "operator must map the {m}-dimensional module into the {d}-dimensional algebra"
        )));
    }
    let images: Vec<DVec> = (0..m).map(|k| t.column(k)).collect();
    let mut report = Report::new("o-operator-pre-lie");
    for block in combos(m, n - 1) {
        for un in 0..m {
            let mut tuple = block.clone();
            tuple.push(un);
            let mapped: Vec<DVec> = tuple.iter().map(|&u| images[u].clone()).collect();
            let lhs = rep.algebra().product().eval(&mapped)?;
            let mut inner = vec![Rational::zero(); m];
            let acted = rep.left().eval_vectors(&mapped[..n - 1])?.column(un);
            for (slot, v) in inner.iter_mut().zip(&acted) {
                *slot += v;
            }
            for i in 0..n - 1 {
                let sign = if i % 2 == 0 { int(1) } else { int(-1) };
                let mut rest = mapped.clone();
                rest.remove(i);
                let acted = rep.right().eval_vectors(&rest)?.column(tuple[i]);
                for (slot, v) in inner.iter_mut().zip(&acted) {
                    *slot += v * &sign;
                }
            }
            let rhs = t.apply(&inner)?;
            let mut residual = coeffs_from_dense(&lhs);
            coeffs_add_scaled(&mut residual, &coeffs_from_dense(&rhs), &int(-1));
            if !residual.is_empty() {
                report.push(Violation::new("o-operator", tuple, residual));
            }
        }
    }
    Ok(report)
}

/// From a pair of commuting weight-zero Rota-Baxter operators on an n-Lie
/// algebra, build the pre-Lie product `{x..} = [P_1 x_1,..,P_1 x_{n-1},x_n]`
/// and report the Rota-Baxter condition of `P_2` on it (expected empty).
pub fn commuting_rb(
    algebra: &NLieAlgebra,
    p1: &LinearMap,
    p2: &LinearMap,
) -> Result<(NPreLieAlgebra, Report)> {
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
    let induced = crate::nlie::o_to_nprelie(p1, &adjoint)?;
    let prelie = induced.algebra;
    if !induced.product_check.is_empty() {
        return Err(AlgebraError::Precondition("induced product fails its identities".into()));
    }
    let adjoint_pre = prelie.adjoint_pre_rep()?;
    let report = check_o_operator(p2, &adjoint_pre)?;
    Ok((prelie, report))
}

/// Exhaustive search for weight-zero Rota-Baxter operators on an n-pre-Lie
/// algebra (O-operators for the adjoint pair).
pub fn rb_search(
    algebra: &NPreLieAlgebra,
    entry_set: &[Rational],
    support: &[(usize, usize)],
) -> Result<Vec<LinearMap>> {
    algebra.require_verified()?;
    let d = algebra.dim();
    if let Some(&(r, c)) = support.iter().find(|&&(r, c)| r >= d || c >= d) {
        return Err(AlgebraError::IndexOutOfRange(format!(
            "support cell ({},{}) in dimension {d}",
            r + 1,
            c + 1
        )));
    }
    if support.len() > crate::nlie::RB_SUPPORT_CAP {
        return Err(AlgebraError::Precondition(format!(
            "support of {} cells exceeds cap {}",
            support.len(),
            crate::nlie::RB_SUPPORT_CAP
        )));
    }
    let candidates = (entry_set.len() as u128)
        .checked_pow(support.len() as u32)
        .unwrap_or(u128::MAX);
    if candidates > crate::nlie::RB_CANDIDATE_CAP {
        return Err(AlgebraError::SearchSpaceExceeded {
            candidates,
            cap: crate::nlie::RB_CANDIDATE_CAP,
        });
    }
    let adjoint = algebra.adjoint_pre_rep()?;
    if support.is_empty() {
        return Ok(vec![LinearMap::zero(d, d)]);
    }
    use itertools::Itertools;
    let mut found = Vec::new();
    for assignment in (0..support.len())
        .map(|_| entry_set.iter())
        .multi_cartesian_product()
    {
        let mut map = LinearMap::zero(d, d);
        for (&(r, c), value) in support.iter().zip(&assignment) {
            map.set_entry(r, c, (*value).clone());
        }
        if check_o_operator(&map, &adjoint)?.is_empty() {
            found.push(map);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::basis_vec;
    use crate::tensor::coeffs_to_dense;
    use itertools::Itertools;

    #[test]
    fn zero_product_passes_and_has_zero_sub_adjacent() {
        let z = NPreLieAlgebra::zero(3, 3);
        assert!(z.check().is_empty());
        let sub = z.sub_adjacent().unwrap();
        assert!(sub.bracket().is_zero());
    }

    #[test]
    fn catalog_three_pre_lie_example_passes() {
        let p3 = catalog::p3();
        assert!(p3.check().is_empty());
    }

    /// The catalog's ternary example plus one stray product {e2,e3,e2} = e2.
    pub(crate) fn broken_p3() -> NPreLieAlgebra {
        let p3 = catalog::p3();
        let mut tensor = p3.product().clone();
        tensor
            .insert_canonical(vec![1, 2, 1], Coeffs::from([(1, int(1))]))
            .unwrap();
        NPreLieAlgebra::new(3, 3, tensor).unwrap()
    }

    #[test]
    fn perturbed_example_fails_with_located_tuple() {
        let bad = broken_p3();
        let report = bad.check();
        assert!(!report.is_empty());
        // Violated instance of the second identity at x = (e1,e2,e3),
        // y = (e3,e2): {[x]^C,e3,e2} = -{e2,e3,e2} = -e2 while the signed
        // sum on the right collapses to zero.
        assert!(report
            .violations
            .iter()
            .any(|v| v.identity == "pre-lie-2" && v.args == vec![0, 1, 2, 2, 1]));
    }

    #[test]
    fn sign_flipped_example_remains_valid() {
        // Flipping {e1,e3,e3} to +e3 lands on the lift of another valid
        // binary product, so it must still pass; a useful non-example.
        let mut tensor = StructureTensor::new(3, SkewPattern::leading_alternating(3, 2));
        tensor
            .insert_canonical(vec![0, 2, 1], Coeffs::from([(1, int(1))]))
            .unwrap();
        tensor
            .insert_canonical(vec![0, 2, 2], Coeffs::from([(2, int(1))]))
            .unwrap();
        let flipped = NPreLieAlgebra::new(3, 3, tensor).unwrap();
        assert!(flipped.check().is_empty());
        assert_eq!(full_range_violations(&flipped), 0);
    }

    #[test]
    fn binary_pre_lie_example_passes() {
        let pl = catalog::pl();
        assert!(pl.check().is_empty());
        // Commutator bracket: [e2,e3] = -e2.
        let sub = pl.sub_adjacent().unwrap();
        assert_eq!(
            sub.bracket().eval_basis(&[1, 2]),
            Coeffs::from([(1, int(-1))])
        );
        assert_eq!(sub.bracket().eval_basis(&[0, 1]), Coeffs::new());
        assert_eq!(sub.bracket().eval_basis(&[0, 2]), Coeffs::new());
    }

    #[test]
    fn sub_adjacent_of_catalog_example() {
        let p3 = catalog::p3();
        p3.check();
        let sub = p3.sub_adjacent().unwrap();
        // [e1,e2,e3]^C = -e2: the only canonical triple.
        assert_eq!(
            sub.bracket().eval_basis(&[0, 1, 2]),
            Coeffs::from([(1, int(-1))])
        );
        assert!(sub.check().is_empty());
    }

    /// Direct expansion of the defining identities over all (not only
    /// canonical) tuples, as a check on the canonical-range reduction.
    fn full_range_violations(p: &NPreLieAlgebra) -> usize {
        let n = p.arity();
        let d = p.dim();
        let sub = alternating_sum_tensor(p.product());
        let mut count = 0;
        let all_x: Vec<Vec<usize>> = (0..n - 1).map(|_| 0..d).multi_cartesian_product().collect();
        let all_y: Vec<Vec<usize>> = (0..n).map(|_| 0..d).multi_cartesian_product().collect();
        for x in &all_x {
            for y in &all_y {
                if !p.first_identity_residual(&sub, x, y).is_empty() {
                    count += 1;
                }
            }
        }
        let all_xt: Vec<Vec<usize>> = (0..n).map(|_| 0..d).multi_cartesian_product().collect();
        let all_yt: Vec<Vec<usize>> = (0..n - 1).map(|_| 0..d).multi_cartesian_product().collect();
        for xt in &all_xt {
            for y in &all_yt {
                if !p.second_identity_residual(&sub, xt, y).is_empty() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn canonical_ranges_agree_with_full_ranges() {
        let p3 = catalog::p3();
        assert!(p3.check().is_empty());
        assert_eq!(full_range_violations(&p3), 0);
        let bad = broken_p3();
        assert!(!bad.check().is_empty());
        assert!(full_range_violations(&bad) > 0);
    }

    #[test]
    fn left_right_multiplication_of_catalog_example() {
        let p3 = catalog::p3();
        p3.check();
        let l13 = p3.left_mult(&[0, 2]).unwrap();
        assert_eq!(l13.column(1), basis_vec(3, 1));
        let mut minus_e3 = crate::linalg::zero_vec(3);
        minus_e3[2] = int(-1);
        assert_eq!(l13.column(2), minus_e3);
        assert!(vec_is_zero(&l13.column(0)));
        // R(e1,e3): y -> {y,e1,e3}: only y = e3 acts, {e3,e1,e3} = +e3.
        let r13 = p3.right_mult(&[0, 2]).unwrap();
        assert_eq!(r13.column(2), basis_vec(3, 2));
        assert!(vec_is_zero(&r13.column(0)));
        assert!(vec_is_zero(&r13.column(1)));
        // R(e3,e2): y -> {y,e3,e2}: for y=e1: {e1,e3,e2} = e2.
        let r32 = p3.right_mult(&[2, 1]).unwrap();
        assert_eq!(r32.column(0), basis_vec(3, 1));
    }

    #[test]
    fn adjoint_pair_is_a_representation() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        assert!(adj.check().unwrap().is_empty());
        // (l, 0) with l the left multiplication is also a representation.
        let lonly = NPreLieRep::from_left(p3.clone(), adj.left().clone()).unwrap();
        assert!(lonly.check().unwrap().is_empty());
        // Zero representation always passes.
        let zero = NPreLieRep::zero(p3, 2);
        assert!(zero.check().unwrap().is_empty());
    }

    #[test]
    fn flipped_right_action_fails() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        let flipped = adj.right().map_matrices(|m| m.neg());
        let bad = NPreLieRep::new(p3, 3, adj.left().clone(), flipped).unwrap();
        assert!(!bad.check().unwrap().is_empty());
    }

    #[test]
    fn mu_of_adjoint_is_rho_tilde_and_matches_sub_adjacent_ad() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        adj.check().unwrap();
        let rho = adj.rho_tilde().unwrap();
        assert!(rho.check().unwrap().is_empty());
        let sub = p3.sub_adjacent().unwrap();
        sub.check();
        for idx in combos(3, 2) {
            assert_eq!(rho.eval_basis(&idx), sub.ad(&idx).unwrap());
            assert_eq!(adj.mu_basis(&idx).unwrap(), sub.ad(&idx).unwrap());
        }
        // With a zero right action, mu reduces to l.
        let lonly = NPreLieRep::from_left(p3.clone(), adj.left().clone()).unwrap();
        for idx in combos(3, 2) {
            assert_eq!(lonly.mu_basis(&idx).unwrap(), lonly.left().eval_basis(&idx));
        }
    }

    #[test]
    fn rho_tilde_of_left_only_rep_is_l() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        let lonly = NPreLieRep::from_left(p3, adj.left().clone()).unwrap();
        lonly.check().unwrap();
        let rho = lonly.rho_tilde().unwrap();
        assert_eq!(rho.action(), lonly.left());
    }

    #[test]
    fn dual_representation_passes() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        adj.check().unwrap();
        let dual = adj.dual().unwrap();
        assert!(dual.check().unwrap().is_empty());
        // Zero goes to zero.
        let zero = NPreLieRep::zero(catalog::p3(), 2);
        zero.algebra().check();
        zero.check().unwrap();
        let dual_zero = zero.dual().unwrap();
        assert!(dual_zero.left().is_zero() && dual_zero.right().is_zero());
    }

    #[test]
    fn binary_dual_pair_exceeds_the_semidirect_characterization() {
        // At arity 2 the second and third pair identities are strictly
        // stronger than "the semidirect product is a valid product": the
        // dual of the binary adjoint fails them while its semidirect
        // product still passes. The checker reports the identities as
        // stated instead of weakening them.
        let pl = catalog::pl();
        pl.check();
        let adj = pl.adjoint_pre_rep().unwrap();
        assert!(adj.check().unwrap().is_empty());
        let dual = adj.dual().unwrap();
        let report = dual.check().unwrap();
        assert_eq!(
            report.identities(),
            vec!["pre-rep-2".to_string(), "pre-rep-3".to_string()]
        );
        dual.assume_verified();
        let big = semidirect(&dual).unwrap();
        assert!(big.check().is_empty());
        // The left-only dual avoids the right action and passes everything.
        let lonly = NPreLieRep::from_left(pl.clone(), adj.left().clone()).unwrap();
        lonly.check().unwrap();
        let dual_l = lonly.dual().unwrap();
        assert!(dual_l.check().unwrap().is_empty());
    }

    #[test]
    fn semidirect_of_adjoint_passes_and_restricts() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        adj.check().unwrap();
        let big = semidirect(&adj).unwrap();
        assert_eq!(big.dim(), 6);
        assert!(big.check().is_empty());
        assert_eq!(big.restrict(3).unwrap(), p3);
    }

    #[test]
    fn semidirect_with_zero_rep_is_direct_sum() {
        let p3 = catalog::p3();
        p3.check();
        let zero = NPreLieRep::zero(p3.clone(), 2);
        zero.check().unwrap();
        let big = semidirect(&zero).unwrap();
        assert!(big.check().is_empty());
        assert_eq!(big.restrict(3).unwrap(), p3);
        // Products with any module factor vanish.
        assert!(big.product().eval_basis(&[0, 1, 3]).is_empty());
        assert!(big.product().eval_basis(&[0, 3, 1]).is_empty());
        assert!(big.product().eval_basis(&[3, 4, 0]).is_empty());
    }

    #[test]
    fn semidirect_sub_adjacent_agrees_with_rho_tilde_route() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        adj.check().unwrap();
        let via_prelie = semidirect(&adj).unwrap();
        via_prelie.check();
        let sub1 = via_prelie.sub_adjacent().unwrap();
        let rho = adj.rho_tilde().unwrap();
        rho.check().unwrap();
        let sub2 = crate::nlie::semidirect(&rho).unwrap();
        assert_eq!(sub1, sub2);
    }

    #[test]
    fn dual_of_left_only_matches_left_dual_semidirect() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        adj.check().unwrap();
        // (l*, 0) and (ρ̃*, -r*) give semidirect products with the same
        // sub-adjacent bracket.
        let l_rep = p3.left_mult_rep().unwrap();
        l_rep.check().unwrap();
        let l_dual = l_rep.dual().unwrap();
        l_dual.check().unwrap();
        let mut l_star_family = l_dual.action().clone();
        // Rebuild as pre-Lie rep (l*, 0) over the pre-Lie algebra.
        l_star_family = l_star_family.map_matrices(|m| m.clone());
        let prerep1 = NPreLieRep::from_left(p3.clone(), l_star_family).unwrap();
        prerep1.check().unwrap();
        let prerep2 = adj.dual().unwrap();
        prerep2.check().unwrap();
        let sub1 = semidirect(&prerep1).unwrap();
        sub1.check();
        let sub2 = semidirect(&prerep2).unwrap();
        sub2.check();
        let nl1 = sub1.sub_adjacent().unwrap();
        let nl2 = sub2.sub_adjacent().unwrap();
        assert_eq!(nl1, nl2);
        let direct = crate::nlie::semidirect(&l_dual).unwrap();
        assert_eq!(nl1, direct);
    }

    #[test]
    fn identity_is_o_operator_for_left_only_adjoint() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        let lonly = NPreLieRep::from_left(p3.clone(), adj.left().clone()).unwrap();
        let id = LinearMap::identity(3);
        assert!(check_o_operator(&id, &lonly).unwrap().is_empty());
        // Zero operator always passes.
        assert!(check_o_operator(&LinearMap::zero(3, 3), &adj).unwrap().is_empty());
    }

    #[test]
    fn identity_is_not_o_operator_for_full_adjoint() {
        // With the full adjoint pair the right-action terms each reproduce
        // the product, so the identity map fails by a factor of n.
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        let id = LinearMap::identity(3);
        let report = check_o_operator(&id, &adj).unwrap();
        assert!(!report.is_empty());
        for v in &report.violations {
            let expected = coeffs_to_dense(&p3.product().eval_basis(&v.args), 3)
                .iter()
                .map(|c| c * &int(-2))
                .collect::<Vec<_>>();
            assert_eq!(coeffs_to_dense(&v.residual, 3), expected);
        }
    }

    #[test]
    fn commuting_rb_pair_zero_case() {
        let s3 = catalog::s3();
        s3.check();
        let zero = LinearMap::zero(4, 4);
        let (prelie, report) = commuting_rb(&s3, &zero, &zero).unwrap();
        assert!(prelie.product().is_zero());
        assert!(report.is_empty());
    }

    #[test]
    fn commuting_rb_pair_searched_case() {
        let s3 = catalog::s3();
        s3.check();
        let support: Vec<(usize, usize)> = (0..4).map(|i| (i, i)).collect();
        let found = crate::nlie::rb_search(&s3, &[int(-1), int(0), int(1)], &support).unwrap();
        let nontrivial: Vec<&LinearMap> = found.iter().filter(|m| !m.is_zero()).collect();
        assert!(!nontrivial.is_empty());
        for p in nontrivial {
            let (_, report) = commuting_rb(&s3, p, p).unwrap();
            assert!(report.is_empty());
        }
    }

    #[test]
    fn non_commuting_pair_rejected() {
        let z = NLieAlgebra::zero(2, 2);
        z.check();
        // On an abelian algebra every map is Rota-Baxter, so only
        // commutativity can fail.
        let a = LinearMap::new(
            2,
            2,
            vec![vec![int(0), int(1)], vec![int(0), int(0)]],
        )
        .unwrap();
        let b = LinearMap::new(
            2,
            2,
            vec![vec![int(0), int(0)], vec![int(1), int(0)]],
        )
        .unwrap();
        assert!(matches!(
            commuting_rb(&z, &a, &b),
            Err(AlgebraError::Precondition(_))
        ));
    }

    #[test]
    fn rb_search_on_pre_lie_diagonal() {
        let p3 = catalog::p3();
        p3.check();
        let support: Vec<(usize, usize)> = (0..3).map(|i| (i, i)).collect();
        let found = rb_search(&p3, &[int(-1), int(0), int(1)], &support).unwrap();
        // b^2(a+c) = 0 and c^2(a+c) = 0 over {-1,0,1}: nine solutions with
        // a+c = 0 plus diag(1,0,0) and diag(-1,0,0).
        assert_eq!(found.len(), 11);
        let adj = p3.adjoint_pre_rep().unwrap();
        for m in &found {
            assert!(check_o_operator(m, &adj).unwrap().is_empty());
        }
        assert!(found.iter().any(|m| m.is_zero()));
    }
}
