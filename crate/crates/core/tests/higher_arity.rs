//! Cross-arity coverage: the machinery is generic in the arity, so the
//! quaternary bracket and a nontrivial ternary-to-quaternary lift must run
//! through the same paths as the ternary corpus.

use naryalg::catalog;
use naryalg::ldend::{self, PreLieMode};
use naryalg::linalg::Covector;
use naryalg::nlie;
use naryalg::nprelie;
use naryalg::rational::int;
use naryalg::trace;

#[test]
fn quaternary_representations_and_semidirect() {
    let s4 = catalog::s4();
    assert!(s4.check().is_empty());
    let adjoint = s4.adjoint_rep();
    assert!(adjoint.check().unwrap().is_empty());
    let coadjoint = adjoint.dual().unwrap();
    assert!(coadjoint.check().unwrap().is_empty());
    let doubled = nlie::semidirect(&coadjoint).unwrap();
    assert_eq!(doubled.dim(), 10);
    assert!(doubled.check().is_empty());
}

#[test]
fn quaternary_rota_baxter_chain() {
    let s4 = catalog::s4();
    s4.check();
    let support: Vec<(usize, usize)> = (0..5).map(|i| (i, i)).collect();
    let found = nlie::rb_search(&s4, &[int(-1), int(0), int(1)], &support).unwrap();
    let nontrivial: Vec<_> = found.iter().filter(|m| !m.is_zero()).collect();
    assert!(!nontrivial.is_empty());
    let adjoint = s4.adjoint_rep();
    adjoint.check().unwrap();
    for p in nontrivial.iter().take(3) {
        let induced = nlie::o_to_nprelie(p, &adjoint).unwrap();
        assert!(induced.product_check.is_empty());
        assert!(induced.morphism.is_empty());
        let (_, second) = nprelie::commuting_rb(&s4, p, p).unwrap();
        assert!(second.is_empty());
        let dendriform = ldend::commuting_rb_to_ldend(&s4, p, p).unwrap();
        let report = dendriform.check();
        assert!(report.is_empty(), "{report}");
        let horizontal = ldend::assoc_prelie(&dendriform, PreLieMode::Horizontal).unwrap();
        assert!(horizontal.check().is_empty());
    }
}

#[test]
fn nontrivial_lift_to_arity_four() {
    // The semidirect product of the ternary example with its adjoint pair
    // has products inside span(e2, e3, e5, e6), so the first coordinate
    // functional is a trace and the lifted quaternary product is nonzero.
    let p3 = catalog::p3();
    p3.check();
    let adj = p3.adjoint_pre_rep().unwrap();
    adj.check().unwrap();
    let big = nprelie::semidirect(&adj).unwrap();
    assert!(big.check().is_empty());
    let tau = Covector::new(vec![int(1), int(0), int(0), int(0), int(0), int(0)]);
    assert!(trace::check_trace(big.product(), &tau).unwrap().is_empty());
    let lifted = trace::induce(&big, &tau).unwrap();
    assert_eq!(lifted.arity(), 4);
    assert!(!lifted.product().is_zero());
    assert!(lifted.check().is_empty());
    // The trace survives the lift and lifting twice kills everything.
    assert!(trace::check_trace(lifted.product(), &tau).unwrap().is_empty());
    let twice = trace::induce(&lifted, &tau).unwrap();
    assert!(twice.product().is_zero());
    // The sub-adjacency square commutes at this arity too.
    let route_one = lifted.sub_adjacent().unwrap();
    let sub = big.sub_adjacent().unwrap();
    sub.check();
    let route_two = trace::induce_nlie(&sub, &tau).unwrap();
    assert_eq!(route_one, route_two);
    // The lifted adjoint pair represents the lifted product.
    let lifted_rep = trace::induce_rep(&adj, &Covector::new(vec![int(1), int(0), int(0)])).unwrap();
    assert!(lifted_rep.check().unwrap().is_empty());
}

#[test]
fn quaternary_phase_space() {
    // Phase space of the nonzero quaternary product induced by a searched
    // operator on the 5-dimensional bracket.
    let s4 = catalog::s4();
    s4.check();
    let support: Vec<(usize, usize)> = (0..5).map(|i| (i, i)).collect();
    let found = nlie::rb_search(&s4, &[int(-1), int(0), int(1)], &support).unwrap();
    let adjoint = s4.adjoint_rep();
    adjoint.check().unwrap();
    let p = found
        .iter()
        .find(|m| {
            !m.is_zero()
                && !nlie::o_to_nprelie(m, &adjoint)
                    .map(|ind| ind.algebra.product().is_zero())
                    .unwrap_or(true)
        })
        .expect("a searched operator with a nonzero induced product");
    let prelie = nlie::o_to_nprelie(p, &adjoint).unwrap().algebra;
    assert!(prelie.is_verified());
    let ps = naryalg::geometry::phase_space(&prelie).unwrap();
    assert_eq!(ps.total.algebra.dim(), 10);
    let report = naryalg::geometry::check_phase_space(&ps);
    assert!(report.is_empty(), "{report}");
    assert!(ps.perfect);
    let recovered = naryalg::geometry::symplectic_to_nprelie(&ps.total).unwrap();
    assert!(recovered.check().is_empty());
    assert_eq!(recovered.restrict(5).unwrap(), prelie);
    let form = naryalg::geometry::canonical_symplectic_form(5);
    let manin = naryalg::geometry::check_manin_triple(&recovered, &form).unwrap();
    assert!(manin.is_empty(), "{manin}");
}
