//! n-Lie algebras: alternating brackets, the fundamental identity checker,
//! representations, semidirect products, duals and O-operators.

use std::sync::atomic::{AtomicBool, Ordering};

use itertools::Itertools;
use num::{One, Zero};
use rayon::prelude::*;

use crate::error::{AlgebraError, Result};
use crate::family::MatrixFamily;
use crate::linalg::{basis_vec, vec_is_zero, DVec, LinearMap};
use crate::nprelie::{alternating_sum_tensor, NPreLieAlgebra};
use crate::rational::{int, Rational};
use crate::report::{Report, Violation};
use crate::tensor::{
    coeffs_add_scaled, coeffs_from_dense, coeffs_to_dense, Coeffs, SkewPattern, StructureTensor,
};

/// All strictly increasing k-tuples over `0..dim`.
pub(crate) fn combos(dim: usize, k: usize) -> Vec<Vec<usize>> {
    (0..dim).combinations(k).collect()
}

/// An algebra with a fully alternating n-ary bracket.
///
/// Construction never runs the (expensive) fundamental-identity check;
/// [`NLieAlgebra::check`] does, and flags the value verified when the
/// report is empty. Consumers that require a valid bracket reject
/// unverified values.
#[derive(Debug)]
pub struct NLieAlgebra {
    dim: usize,
    arity: usize,
    bracket: StructureTensor,
    verified: AtomicBool,
}

impl Clone for NLieAlgebra {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            arity: self.arity,
            bracket: self.bracket.clone(),
            verified: AtomicBool::new(self.is_verified()),
        }
    }
}

impl PartialEq for NLieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.arity == other.arity && self.bracket == other.bracket
    }
}

impl Eq for NLieAlgebra {}

impl NLieAlgebra {
    pub fn new(dim: usize, arity: usize, bracket: StructureTensor) -> Result<Self> {
        if arity < 2 {
            return Err(AlgebraError::Precondition("arity must be at least 2".into()));
        }
        if bracket.dim() != dim || bracket.arity() != arity {
            return Err(AlgebraError::ShapeMismatch("bracket tensor shape".into()));
        }
        if bracket.pattern() != &SkewPattern::fully_alternating(arity) {
            return Err(AlgebraError::InvalidPattern(
                "bracket must alternate in all slots".into(),
            ));
        }
        Ok(Self {
            dim,
            arity,
            bracket,
            verified: AtomicBool::new(false),
        })
    }

    /// The zero bracket on `dim` generators.
    pub fn zero(dim: usize, arity: usize) -> Self {
        Self::new(dim, arity, StructureTensor::new(dim, SkewPattern::fully_alternating(arity)))
            .expect("zero bracket")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn bracket(&self) -> &StructureTensor {
        &self.bracket
    }

    pub fn is_verified(&self) -> bool {
        self.verified.load(Ordering::Relaxed)
    }

    pub fn require_verified(&self) -> Result<()> {
        if self.is_verified() {
            Ok(())
        } else {
            Err(AlgebraError::Unverified("n-Lie algebra (run check first)".into()))
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

    /// Check the fundamental identity
    /// `[x_1,..,x_{n-1},[y_1,..,y_n]] = Σ_i [y_1,..,[x_1,..,x_{n-1},y_i],..,y_n]`
    /// on all canonical basis tuples. Both sides alternate in the x-block and
    /// the y-block, so strictly increasing tuples cover all instances.
    pub fn check(&self) -> Report {
        let n = self.arity;
        let d = self.dim;
        let xs = combos(d, n - 1);
        let ys = combos(d, n);
        let instances: Vec<(&Vec<usize>, &Vec<usize>)> =
            xs.iter().cartesian_product(ys.iter()).collect();
        let violations: Vec<Violation> = instances
            .par_iter()
            .filter_map(|(x, y)| {
                let residual = self.fundamental_residual(x, y);
                (!residual.is_empty()).then(|| {
                    let mut args = (*x).clone();
                    args.extend(*y);
                    Violation::new("filippov", args, residual)
                })
            })
            .collect();
        let mut report = Report::new("n-lie");
        report.violations = violations;
        if report.is_empty() {
            self.mark_verified();
        }
        report
    }

    fn fundamental_residual(&self, x: &[usize], y: &[usize]) -> Coeffs {
        let n = self.arity;
        let inner = self.bracket.eval_basis(y);
        let mut residual = Coeffs::new();
        let mut args = x.to_vec();
        args.push(0);
        for (&t, c) in &inner {
            args[n - 1] = t;
            coeffs_add_scaled(&mut residual, &self.bracket.eval_basis(&args), c);
        }
        let minus_one = int(-1);
        for i in 0..n {
            let mut adx = x.to_vec();
            adx.push(y[i]);
            let acted = self.bracket.eval_basis(&adx);
            let mut yargs = y.to_vec();
            for (&t, c) in &acted {
                yargs[i] = t;
                coeffs_add_scaled(&mut residual, &self.bracket.eval_basis(&yargs), &(c * &minus_one));
            }
        }
        residual
    }

    /// Matrix of `y -> [x_1,..,x_{n-1}, y]` for a basis tuple.
    pub fn ad(&self, idx: &[usize]) -> Result<LinearMap> {
        if idx.len() != self.arity - 1 {
            return Err(AlgebraError::ShapeMismatch(format!(
                "ad takes {} indices",
                self.arity - 1
            )));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(AlgebraError::IndexOutOfRange(format!(
                "index {bad} in dimension {}",
                self.dim
            )));
        }
        let mut m = LinearMap::zero(self.dim, self.dim);
        let mut args = idx.to_vec();
        args.push(0);
        for y in 0..self.dim {
            args[self.arity - 1] = y;
            for (&t, c) in &self.bracket.eval_basis(&args) {
                m.set_entry(t, y, c.clone());
            }
        }
        Ok(m)
    }

    /// The adjoint action as a representation on the algebra itself.
    pub fn adjoint_rep(&self) -> NLieRep {
        let mut action = MatrixFamily::new(
            self.dim,
            self.dim,
            SkewPattern::fully_alternating(self.arity - 1),
        );
        for idx in combos(self.dim, self.arity - 1) {
            let m = self.ad(&idx).expect("in-range tuple");
            if !m.is_zero() {
                action.add_matrix(&idx, &m, &Rational::one()).expect("shapes agree");
            }
        }
        NLieRep {
            algebra: self.clone(),
            module_dim: self.dim,
            action,
            verified: AtomicBool::new(false),
        }
    }

    /// Residuals of the derivation law `D[x_1,..,x_n] = Σ_i [x_1,..,Dx_i,..,x_n]`.
    pub fn derivation_report(&self, d: &LinearMap) -> Result<Report> {
        if d.rows() != self.dim || d.cols() != self.dim {
            return Err(AlgebraError::ShapeMismatch("derivation matrix".into()));
        }
        let mut report = Report::new("n-lie-derivation");
        for tuple in combos(self.dim, self.arity) {
            let bracket = coeffs_to_dense(&self.bracket.eval_basis(&tuple), self.dim);
            let mut residual = coeffs_from_dense(&d.apply(&bracket)?);
            for i in 0..self.arity {
                let image = d.column(tuple[i]);
                let mut args: Vec<DVec> =
                    tuple.iter().map(|&j| basis_vec(self.dim, j)).collect();
                args[i] = image;
                let term = self.bracket.eval(&args)?;
                coeffs_add_scaled(&mut residual, &coeffs_from_dense(&term), &int(-1));
            }
            if !residual.is_empty() {
                report.push(Violation::new("derivation", tuple, residual));
            }
        }
        Ok(report)
    }
}

/// A representation: an alternating family of module endomorphisms
/// indexed by (n-1)-tuples of algebra basis elements.
#[derive(Debug)]
pub struct NLieRep {
    algebra: NLieAlgebra,
    module_dim: usize,
    action: MatrixFamily,
    verified: AtomicBool,
}

impl Clone for NLieRep {
    fn clone(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            module_dim: self.module_dim,
            action: self.action.clone(),
            verified: AtomicBool::new(self.is_verified()),
        }
    }
}

impl PartialEq for NLieRep {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra
            && self.module_dim == other.module_dim
            && self.action == other.action
    }
}

impl NLieRep {
    pub fn new(algebra: NLieAlgebra, module_dim: usize, action: MatrixFamily) -> Result<Self> {
        let n = algebra.arity();
        if action.arity() != n - 1
            || action.arg_dim() != algebra.dim()
            || action.out_dim() != module_dim
        {
            return Err(AlgebraError::ShapeMismatch("representation action".into()));
        }
        if action.pattern() != &SkewPattern::fully_alternating(n - 1) {
            return Err(AlgebraError::InvalidPattern(
                "representation must alternate in all slots".into(),
            ));
        }
        Ok(Self {
            algebra,
            module_dim,
            action,
            verified: AtomicBool::new(false),
        })
    }

    /// The zero action on an `m`-dimensional module.
    pub fn zero(algebra: NLieAlgebra, module_dim: usize) -> Self {
        let arity = algebra.arity() - 1;
        Self {
            action: MatrixFamily::new(algebra.dim(), module_dim, SkewPattern::fully_alternating(arity)),
            algebra,
            module_dim,
            verified: AtomicBool::new(false),
        }
    }

    pub fn algebra(&self) -> &NLieAlgebra {
        &self.algebra
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn action(&self) -> &MatrixFamily {
        &self.action
    }

    pub fn is_verified(&self) -> bool {
        self.verified.load(Ordering::Relaxed)
    }

    pub fn require_verified(&self) -> Result<()> {
        if self.is_verified() {
            Ok(())
        } else {
            Err(AlgebraError::Unverified("representation (run check first)".into()))
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

    pub fn eval_basis(&self, idx: &[usize]) -> LinearMap {
        self.action.eval_basis(idx)
    }

    /// Check both representation identities on all canonical basis tuples,
    /// reporting residual module vectors per module basis vector.
    pub fn check(&self) -> Result<Report> {
        self.algebra.require_verified()?;
        let n = self.algebra.arity();
        let d = self.algebra.dim();
        let mut report = Report::new("n-lie-rep");

        // rho([x_1..x_n], y_1..y_{n-2}) = Σ_i (-1)^{n-i} rho(..x̂_i..) rho(x_i, y..)
        let xts = combos(d, n);
        let yts = combos(d, n - 2);
        let first: Vec<Violation> = xts
            .par_iter()
            .flat_map_iter(|xt| {
                let mut out = Vec::new();
                for yt in &yts {
                    let mut lhs = LinearMap::zero(self.module_dim, self.module_dim);
                    let bracket = self.algebra.bracket().eval_basis(xt);
                    for (&t, c) in &bracket {
                        let mut args = vec![t];
                        args.extend(yt);
                        lhs = lhs.add(&self.action.eval_basis(&args).scale(c)).unwrap();
                    }
                    let mut rhs = LinearMap::zero(self.module_dim, self.module_dim);
                    for i in 0..n {
                        let sign = if (n - 1 - i) % 2 == 0 { int(1) } else { int(-1) };
                        let mut omitted = xt.clone();
                        omitted.remove(i);
                        let mut inner_args = vec![xt[i]];
                        inner_args.extend(yt);
                        let term = self
                            .action
                            .eval_basis(&omitted)
                            .compose(&self.action.eval_basis(&inner_args))
                            .unwrap();
                        rhs = rhs.add(&term.scale(&sign)).unwrap();
                    }
                    let diff = lhs.sub(&rhs).unwrap();
                    for k in 0..self.module_dim {
                        let col = diff.column(k);
                        if !vec_is_zero(&col) {
                            let mut args = xt.clone();
                            args.extend(yt);
                            args.push(k);
                            out.push(Violation::new("rep-1", args, coeffs_from_dense(&col)));
                        }
                    }
                }
                out
            })
            .collect();

        // [rho(X), rho(Y)] = Σ_i rho(y_1,..,[X,y_i],..,y_{n-1})
        let xs = combos(d, n - 1);
        let second: Vec<Violation> = xs
            .par_iter()
            .flat_map_iter(|x| {
                let mut out = Vec::new();
                let rho_x = self.action.eval_basis(x);
                for y in &xs {
                    let rho_y = self.action.eval_basis(y);
                    let mut lhs = rho_x
                        .compose(&rho_y)
                        .unwrap()
                        .sub(&rho_y.compose(&rho_x).unwrap())
                        .unwrap();
                    for i in 0..n - 1 {
                        let mut adx = x.clone();
                        adx.push(y[i]);
                        let acted = self.algebra.bracket().eval_basis(&adx);
                        let mut yargs = y.clone();
                        for (&t, c) in &acted {
                            yargs[i] = t;
                            let term = self.action.eval_basis(&yargs).scale(&(-c.clone()));
                            lhs = lhs.add(&term).unwrap();
                        }
                    }
                    for k in 0..self.module_dim {
                        let col = lhs.column(k);
                        if !vec_is_zero(&col) {
                            let mut args = x.clone();
                            args.extend(y);
                            args.push(k);
                            out.push(Violation::new("rep-2", args, coeffs_from_dense(&col)));
                        }
                    }
                }
                out
            })
            .collect();

        report.violations.extend(first);
        report.violations.extend(second);
        report
            .violations
            .sort_by(|a, b| (&a.identity, &a.args).cmp(&(&b.identity, &b.args)));
        if report.is_empty() {
            self.mark_verified();
        }
        Ok(report)
    }

    /// The dual representation on the dual module: each action matrix is
    /// replaced by its negated transpose.
    pub fn dual(&self) -> Result<NLieRep> {
        self.require_verified()?;
        Ok(NLieRep {
            algebra: self.algebra.clone(),
            module_dim: self.module_dim,
            action: self.action.map_matrices(|m| m.transpose().neg()),
            verified: AtomicBool::new(false),
        })
    }
}

/// Semidirect product bracket on `A ⊕ V`:
/// `[x_1+u_1,..,x_n+u_n] = [x_1,..,x_n] + Σ_i (-1)^{n-i} ρ(x_1,..,x̂_i,..,x_n)(u_i)`.
pub fn semidirect(rep: &NLieRep) -> Result<NLieAlgebra> {
    rep.require_verified()?;
    let d = rep.algebra().dim();
    let m = rep.module_dim();
    let n = rep.algebra().arity();
    let total = d + m;
    let mut bracket = StructureTensor::new(total, SkewPattern::fully_alternating(n));
    for tuple in combos(d, n) {
        for (&t, c) in &rep.algebra().bracket().eval_basis(&tuple) {
            bracket.add_term(&tuple, t, c);
        }
    }
    // Module indices sort above algebra indices, so a canonical mixed tuple
    // has its single module factor in the last slot, where the sign is +1.
    for xt in combos(d, n - 1) {
        let rho = rep.eval_basis(&xt);
        for k in 0..m {
            let col = rho.column(k);
            if vec_is_zero(&col) {
                continue;
            }
            let mut key = xt.clone();
            key.push(d + k);
            for (t, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    bracket.add_term(&key, d + t, c);
                }
            }
        }
    }
    NLieAlgebra::new(total, n, bracket)
}

/// Residuals of the O-operator identity for `T: V -> A` against a
/// representation:
/// `[Tu_1,..,Tu_n] = T(Σ_i (-1)^{n-i} ρ(Tu_1,..,T̂u_i,..,Tu_n) u_i)`.
pub fn check_o_operator(t: &LinearMap, rep: &NLieRep) -> Result<Report> {
    let d = rep.algebra().dim();
    let m = rep.module_dim();
    let n = rep.algebra().arity();
    if t.rows() != d || t.cols() != m {
        return Err(AlgebraError::ShapeMismatch(format!(
            "operator must map the {m}-dimensional module into the {d}-dimensional algebra"
        )));
    }
    let images: Vec<DVec> = (0..m).map(|k| t.column(k)).collect();
    let mut report = Report::new("o-operator");
    for tuple in combos(m, n) {
        let mapped: Vec<DVec> = tuple.iter().map(|&u| images[u].clone()).collect();
        let lhs = rep.algebra().bracket().eval(&mapped)?;
        let mut inner = vec![Rational::zero(); m];
        for i in 0..n {
            let sign = if (n - 1 - i) % 2 == 0 { int(1) } else { int(-1) };
            let mut rest = mapped.clone();
            rest.remove(i);
            let acted = rep.action().eval_vectors(&rest)?.column(tuple[i]);
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
    Ok(report)
}

/// An O-operator induced n-pre-Lie structure together with its
/// verification metadata.
#[derive(Debug, Clone)]
pub struct OInducedPreLie {
    pub algebra: NPreLieAlgebra,
    /// Residuals of the n-pre-Lie identities on the induced product.
    pub product_check: Report,
    /// Residuals of `T[u_1,..,u_n]^C = [Tu_1,..,Tu_n]` (T as a morphism from
    /// the sub-adjacent structure into the source algebra).
    pub morphism: Report,
}

/// The n-pre-Lie product `{u_1,..,u_n} = ρ(Tu_1,..,Tu_{n-1}) u_n` induced by
/// an O-operator.
pub fn o_to_nprelie(t: &LinearMap, rep: &NLieRep) -> Result<OInducedPreLie> {
    rep.require_verified()?;
    let ok = check_o_operator(t, rep)?;
    if !ok.is_empty() {
        return Err(AlgebraError::Precondition(format!(
            "operator fails the O-operator identity on {} tuple(s)",
            ok.len()
        )));
    }
    let m = rep.module_dim();
    let n = rep.algebra().arity();
    let images: Vec<DVec> = (0..m).map(|k| t.column(k)).collect();
    let mut product = StructureTensor::new(m, SkewPattern::leading_alternating(n, n - 1));
    for block in combos(m, n - 1) {
        let mapped: Vec<DVec> = block.iter().map(|&u| images[u].clone()).collect();
        let acting = rep.action().eval_vectors(&mapped)?;
        for last in 0..m {
            let col = acting.column(last);
            if vec_is_zero(&col) {
                continue;
            }
            let mut key = block.clone();
            key.push(last);
            for (target, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    product.add_term(&key, target, c);
                }
            }
        }
    }
    let algebra = NPreLieAlgebra::new(m, n, product)?;
    let product_check = algebra.check();
    let sub = alternating_sum_tensor(algebra.product());
    let mut morphism = Report::new("o-operator-morphism");
    for tuple in combos(m, n) {
        let mapped: Vec<DVec> = tuple.iter().map(|&u| images[u].clone()).collect();
        let lhs = t.apply(&coeffs_to_dense(&sub.eval_basis(&tuple), m))?;
        let rhs = rep.algebra().bracket().eval(&mapped)?;
        let mut residual = coeffs_from_dense(&lhs);
        coeffs_add_scaled(&mut residual, &coeffs_from_dense(&rhs), &int(-1));
        if !residual.is_empty() {
            morphism.push(Violation::new("morphism", tuple, residual));
        }
    }
    Ok(OInducedPreLie {
        algebra,
        product_check,
        morphism,
    })
}

/// Default caps for [`rb_search`].
pub const RB_SUPPORT_CAP: usize = 8;
pub const RB_CANDIDATE_CAP: u128 = 531_441; // 3^12

/// Exhaustively enumerate weight-zero Rota-Baxter operators: all maps with
/// entries from `entry_set` on the given support cells that satisfy the
/// O-operator identity for the adjoint representation.
pub fn rb_search(
    algebra: &NLieAlgebra,
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
    if support.len() > RB_SUPPORT_CAP {
        return Err(AlgebraError::Precondition(format!(
            "support of {} cells exceeds cap {RB_SUPPORT_CAP}",
            support.len()
        )));
    }
    let candidates = (entry_set.len() as u128)
        .checked_pow(support.len() as u32)
        .unwrap_or(u128::MAX);
    if candidates > RB_CANDIDATE_CAP {
        return Err(AlgebraError::SearchSpaceExceeded {
            candidates,
            cap: RB_CANDIDATE_CAP,
        });
    }
    let adjoint = algebra.adjoint_rep();
    let rep_ok = adjoint.check()?;
    debug_assert!(rep_ok.is_empty());
    if support.is_empty() {
        let zero = LinearMap::zero(d, d);
        return Ok(vec![zero]);
    }
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
