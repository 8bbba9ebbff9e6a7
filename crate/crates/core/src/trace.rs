//! Arity lifting: from an n-ary product and a trace functional, build the
//! (n+1)-ary product `φ_τ(x_1,..,x_{n+1}) = Σ_k (-1)^{k+1} τ(x_k) φ(x_1,..,x̂_k,..,x_{n+1})`.

use num::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::family::MatrixFamily;
use crate::linalg::{Covector, LinearMap};
use crate::nlie::{combos, NLieAlgebra};
use crate::nprelie::{NPreLieAlgebra, NPreLieRep};
use crate::rational::Rational;
use crate::report::{Report, Violation};
use crate::tensor::{coeffs_add_scaled, Coeffs, SkewPattern, StructureTensor};

/// List the basis tuples whose product has a nonzero value under `τ`.
pub fn check_trace(tensor: &StructureTensor, tau: &Covector) -> Result<Report> {
    if tau.dim() != tensor.dim() {
        return Err(AlgebraError::ShapeMismatch("trace functional dimension".into()));
    }
    let mut report = Report::new("trace");
    for key in tensor.pattern().canonical_tuples(tensor.dim()) {
        let mut value = Rational::zero();
        for (&t, c) in &tensor.eval_basis(&key) {
            value += c * tau.apply_basis(t);
        }
        if !value.is_zero() {
            report.push(Violation::new("trace", key, Coeffs::from([(0, value)])));
        }
    }
    Ok(report)
}

/// The lifted product on an arbitrary (n+1)-tuple, straight from the
/// defining sum. Used to cross-check the canonical storage.
pub fn lifted_eval(product: &StructureTensor, tau: &Covector, args: &[usize]) -> Coeffs {
    let n = product.arity();
    debug_assert_eq!(args.len(), n + 1);
    let mut value = Coeffs::new();
    for k in 0..n {
        let weight = tau.apply_basis(args[k]);
        if weight.is_zero() {
            continue;
        }
        let sign = if k % 2 == 0 { weight.clone() } else { -weight.clone() };
        let mut rest = args.to_vec();
        rest.remove(k);
        coeffs_add_scaled(&mut value, &product.eval_basis(&rest), &sign);
    }
    value
}

fn lift_tensor(product: &StructureTensor, tau: &Covector, pattern: SkewPattern) -> StructureTensor {
    let d = product.dim();
    let mut out = StructureTensor::new(d, pattern);
    for key in out.pattern().canonical_tuples(d).iter() {
        let value = lifted_eval(product, tau, key);
        for (&t, c) in &value {
            out.add_term(key, t, c);
        }
    }
    out
}

/// Induce an (n+1)-pre-Lie product from an n-pre-Lie product and a trace
/// functional. The result alternates in its first n slots and `τ` remains
/// a trace of it.
pub fn induce(prelie: &NPreLieAlgebra, tau: &Covector) -> Result<NPreLieAlgebra> {
    prelie.require_verified()?;
    if tau.dim() != prelie.dim() {
        return Err(AlgebraError::ShapeMismatch("trace functional dimension".into()));
    }
    let trace_ok = check_trace(prelie.product(), tau)?;
    if !trace_ok.is_empty() {
        return Err(AlgebraError::Precondition(format!(
            "functional is not a trace: {} nonzero value(s)",
            trace_ok.len()
        )));
    }
    let n = prelie.arity();
    let tensor = lift_tensor(
        prelie.product(),
        tau,
        SkewPattern::leading_alternating(n + 1, n),
    );
    NPreLieAlgebra::new(prelie.dim(), n + 1, tensor)
}

/// The same lift applied to an n-Lie bracket, summing over all n+1 slots:
/// `[x_1,..,x_{n+1}]_τ = Σ_k (-1)^{k+1} τ(x_k) [x_1,..,x̂_k,..,x_{n+1}]`.
pub fn induce_nlie(algebra: &NLieAlgebra, tau: &Covector) -> Result<NLieAlgebra> {
    algebra.require_verified()?;
    if tau.dim() != algebra.dim() {
        return Err(AlgebraError::ShapeMismatch("trace functional dimension".into()));
    }
    let trace_ok = check_trace(algebra.bracket(), tau)?;
    if !trace_ok.is_empty() {
        return Err(AlgebraError::Precondition(format!(
            "functional is not a trace: {} nonzero value(s)",
            trace_ok.len()
        )));
    }
    let n = algebra.arity();
    let d = algebra.dim();
    let mut bracket = StructureTensor::new(d, SkewPattern::fully_alternating(n + 1));
    for key in combos(d, n + 1) {
        let mut value = Coeffs::new();
        for k in 0..n + 1 {
            let weight = tau.apply_basis(key[k]);
            if weight.is_zero() {
                continue;
            }
            let sign = if k % 2 == 0 { weight.clone() } else { -weight.clone() };
            let mut rest = key.clone();
            rest.remove(k);
            coeffs_add_scaled(&mut value, &algebra.bracket().eval_basis(&rest), &sign);
        }
        for (&t, c) in &value {
            bracket.add_term(&key, t, c);
        }
    }
    NLieAlgebra::new(d, n + 1, bracket)
}

/// Lift a representation along with the product:
/// `l_τ(x_1,..,x_n) = Σ_k (-1)^{k+1} τ(x_k) l(x_1,..,x̂_k,..,x_n)`,
/// `r_τ(x_1,..,x_n) = Σ_{k<n} (-1)^k τ(x_k) r(x_1,..,x̂_k,..,x_{n-1},x_n)`.
pub fn induce_rep(rep: &NPreLieRep, tau: &Covector) -> Result<NPreLieRep> {
    rep.require_verified()?;
    let induced = induce(rep.algebra(), tau)?;
    let induced_ok = induced.check();
    if !induced_ok.is_empty() {
        return Err(AlgebraError::Precondition(format!(
            "lifted product fails its identities on {} tuple(s)",
            induced_ok.len()
        )));
    }
    let n = rep.algebra().arity();
    let d = rep.algebra().dim();
    let m = rep.module_dim();
    let mut l = MatrixFamily::new(d, m, SkewPattern::fully_alternating(n));
    for key in combos(d, n) {
        let mut mat = LinearMap::zero(m, m);
        for k in 0..n {
            let weight = tau.apply_basis(key[k]);
            if weight.is_zero() {
                continue;
            }
            let sign = if k % 2 == 0 { weight.clone() } else { -weight.clone() };
            let mut rest = key.clone();
            rest.remove(k);
            mat = mat.add(&rep.left().eval_basis(&rest).scale(&sign))?;
        }
        if !mat.is_zero() {
            l.add_matrix(&key, &mat, &Rational::one())?;
        }
    }
    let mut r = MatrixFamily::new(d, m, SkewPattern::leading_alternating(n, n - 1));
    for key in SkewPattern::leading_alternating(n, n - 1).canonical_tuples(d) {
        let mut mat = LinearMap::zero(m, m);
        for k in 0..n - 1 {
            let weight = tau.apply_basis(key[k]);
            if weight.is_zero() {
                continue;
            }
            let sign = if (k + 1) % 2 == 1 { -weight.clone() } else { weight.clone() };
            let mut rest: Vec<usize> = key[..n - 1]
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &x)| x)
                .collect();
            rest.push(key[n - 1]);
            mat = mat.add(&rep.right().eval_basis(&rest).scale(&sign))?;
        }
        if !mat.is_zero() {
            r.add_matrix(&key, &mat, &Rational::one())?;
        }
    }
    NPreLieRep::new(induced, m, l, r)
}

/// Outcome of the derivation criterion for the lifted product.
#[derive(Debug, Clone)]
pub struct DerivationCriterion {
    /// `τ ∘ D` evaluated on products (a trace whenever `D` is a derivation).
    pub pullback_trace: Report,
    /// Nonzero canonical products of the lift taken with `τ ∘ D`.
    pub vanishing: Report,
    /// Direct derivation residuals of `D` on the lifted product.
    pub direct: Report,
    /// Whether the vanishing criterion and the direct check agree.
    pub agrees: bool,
}

/// For a derivation `D` of the base product: `D` extends to a derivation of
/// the lifted product exactly when every product lifted with `τ ∘ D`
/// vanishes. Both routes are computed and compared.
pub fn derivation_induced_criterion(
    prelie: &NPreLieAlgebra,
    tau: &Covector,
    derivation: &LinearMap,
) -> Result<DerivationCriterion> {
    prelie.require_verified()?;
    let base = prelie.derivation_report(derivation)?;
    if !base.is_empty() {
        return Err(AlgebraError::Precondition(format!(
            "map fails the derivation law on {} tuple(s)",
            base.len()
        )));
    }
    let pullback = tau.compose(derivation)?;
    let pullback_trace = check_trace(prelie.product(), &pullback)?;
    let n = prelie.arity();
    let lifted_with_pullback = lift_tensor(
        prelie.product(),
        &pullback,
        SkewPattern::leading_alternating(n + 1, n),
    );
    let mut vanishing = Report::new("lift-vanishing");
    for (key, value) in lifted_with_pullback.entries() {
        vanishing.push(Violation::new("lift-vanishing", key.clone(), value.clone()));
    }
    let induced = induce(prelie, tau)?;
    let direct = induced.derivation_report(derivation)?;
    let agrees = vanishing.is_empty() == direct.is_empty();
    Ok(DerivationCriterion {
        pullback_trace,
        vanishing,
        direct,
        agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::int;
    use crate::tensor::coeffs_to_dense;
    use itertools::Itertools;

    #[test]
    fn trace_check_on_binary_example() {
        let pl = catalog::pl();
        let t1 = catalog::t1();
        assert!(check_trace(pl.product(), &t1).unwrap().is_empty());
        // τ(e2) = 1 is not a trace: e3∘e2 = e2 has value 1.
        let bad = Covector::new(vec![int(0), int(1), int(0)]);
        let report = check_trace(pl.product(), &bad).unwrap();
        assert!(!report.is_empty());
        assert!(report.violations.iter().any(|v| v.args == vec![2, 1]));
        // The zero functional is always a trace.
        assert!(check_trace(pl.product(), &Covector::zero(3)).unwrap().is_empty());
    }

    #[test]
    fn lifting_the_binary_example_gives_the_catalog_lift() {
        let pl = catalog::pl();
        pl.check();
        let induced = induce(&pl, &catalog::t1()).unwrap();
        assert_eq!(induced, catalog::p3());
        assert!(induced.check().is_empty());
        // τ stays a trace of the lift.
        assert!(check_trace(induced.product(), &catalog::t1()).unwrap().is_empty());
    }

    #[test]
    fn lifting_with_scaled_trace_scales_the_product() {
        let pl = catalog::pl();
        pl.check();
        let tau = Covector::new(vec![crate::rational::rat(3, 2), int(0), int(0)]);
        let induced = induce(&pl, &tau).unwrap();
        assert!(induced.check().is_empty());
        assert_eq!(
            induced.product().eval_basis(&[0, 2, 1]),
            Coeffs::from([(1, crate::rational::rat(3, 2))])
        );
        assert_eq!(
            induced.product().eval_basis(&[0, 2, 2]),
            Coeffs::from([(2, crate::rational::rat(-3, 2))])
        );
    }

    #[test]
    fn zero_trace_gives_zero_lift() {
        let pl = catalog::pl();
        pl.check();
        let induced = induce(&pl, &Covector::zero(3)).unwrap();
        assert!(induced.product().is_zero());
    }

    #[test]
    fn stored_lift_agrees_with_raw_formula_on_all_tuples() {
        let pl = catalog::pl();
        pl.check();
        let tau = catalog::t1();
        let induced = induce(&pl, &tau).unwrap();
        let all: Vec<Vec<usize>> = (0..3).map(|_| 0..3).multi_cartesian_product().collect();
        for args in &all {
            assert_eq!(
                induced.product().eval_basis(args),
                lifted_eval(pl.product(), &tau, args),
                "mismatch at {args:?}"
            );
        }
    }

    #[test]
    fn double_lift_is_zero() {
        let pl = catalog::pl();
        pl.check();
        let tau = catalog::t1();
        let once = induce(&pl, &tau).unwrap();
        once.check();
        let twice = induce(&once, &tau).unwrap();
        assert!(twice.product().is_zero());
        // Same with a non-unit scaling of the functional.
        let tau2 = Covector::new(vec![crate::rational::rat(3, 2), int(0), int(0)]);
        let once2 = induce(&pl, &tau2).unwrap();
        once2.check();
        let twice2 = induce(&once2, &tau2).unwrap();
        assert!(twice2.product().is_zero());
    }

    #[test]
    fn sub_adjacency_square_commutes() {
        let pl = catalog::pl();
        pl.check();
        let tau = catalog::t1();
        let induced = induce(&pl, &tau).unwrap();
        induced.check();
        let route_one = induced.sub_adjacent().unwrap();
        let commutator = pl.sub_adjacent().unwrap();
        commutator.check();
        let route_two = induce_nlie(&commutator, &tau).unwrap();
        assert_eq!(route_one, route_two);
        // Concretely: [e1,e2,e3] = τ(e1)[e2,e3] = -e2.
        assert_eq!(
            route_one.bracket().eval_basis(&[0, 1, 2]),
            Coeffs::from([(1, int(-1))])
        );
    }

    #[test]
    fn lifted_representation_passes() {
        let pl = catalog::pl();
        pl.check();
        let adj = pl.adjoint_pre_rep().unwrap();
        adj.check().unwrap();
        let lifted = induce_rep(&adj, &catalog::t1()).unwrap();
        assert!(lifted.check().unwrap().is_empty());
        // Left-only input stays left-only.
        let lonly = NPreLieRep::from_left(pl.clone(), adj.left().clone()).unwrap();
        lonly.check().unwrap();
        let lifted_lonly = induce_rep(&lonly, &catalog::t1()).unwrap();
        assert!(lifted_lonly.right().is_zero());
        assert!(lifted_lonly.check().unwrap().is_empty());
        // Zero trace kills the lifted action.
        let lifted_zero = induce_rep(&adj, &Covector::zero(3)).unwrap();
        assert!(lifted_zero.left().is_zero() && lifted_zero.right().is_zero());
    }

    #[test]
    fn derivation_criterion_routes_agree() {
        let pl = catalog::pl();
        pl.check();
        let tau = catalog::t1();
        // diag(a, b, 0) are derivations of the base product.
        let d_nontrivial = LinearMap::from_fn(3, 3, |r, c| {
            if r == c && r < 2 {
                int(1)
            } else {
                int(0)
            }
        });
        let crit = derivation_induced_criterion(&pl, &tau, &d_nontrivial).unwrap();
        assert!(crit.pullback_trace.is_empty());
        // τ∘D = τ here, so the lift with τ∘D is the nonzero lifted product.
        assert!(!crit.vanishing.is_empty());
        assert!(!crit.direct.is_empty());
        assert!(crit.agrees);

        let d_inner = LinearMap::from_fn(3, 3, |r, c| {
            if r == 1 && c == 1 {
                int(1)
            } else {
                int(0)
            }
        });
        let crit = derivation_induced_criterion(&pl, &tau, &d_inner).unwrap();
        assert!(crit.pullback_trace.is_empty());
        assert!(crit.vanishing.is_empty());
        assert!(crit.direct.is_empty());
        assert!(crit.agrees);

        let zero = LinearMap::zero(3, 3);
        let crit = derivation_induced_criterion(&pl, &tau, &zero).unwrap();
        assert!(crit.vanishing.is_empty() && crit.direct.is_empty() && crit.agrees);
    }

    #[test]
    fn criterion_rejects_non_derivations() {
        let pl = catalog::pl();
        pl.check();
        let not_derivation = LinearMap::identity(3);
        // D = id: D(e3∘e3) = -e3 but Σ {Dx,y} + {x,Dy} = -2e3.
        assert!(matches!(
            derivation_induced_criterion(&pl, &catalog::t1(), &not_derivation),
            Err(AlgebraError::Precondition(_))
        ));
    }

    #[test]
    fn lift_respects_alternation_exactly() {
        // Alternation of the stored lift, probed through raw evaluation with
        // swapped arguments.
        let pl = catalog::pl();
        pl.check();
        let tau = catalog::t1();
        let induced = induce(&pl, &tau).unwrap();
        for args in (0..3).map(|_| 0..3usize).multi_cartesian_product() {
            let mut swapped = args.clone();
            swapped.swap(0, 1);
            let a = coeffs_to_dense(&induced.product().eval_basis(&args), 3);
            let b = coeffs_to_dense(&induced.product().eval_basis(&swapped), 3);
            let neg: Vec<Rational> = b.iter().map(|c| -c.clone()).collect();
            assert_eq!(a, neg);
        }
    }
}
