//! Built-in reference objects with stable names and stable content.

use num::One;

use crate::error::{AlgebraError, Result};
use crate::linalg::Covector;
use crate::nlie::NLieAlgebra;
use crate::nprelie::NPreLieAlgebra;
use crate::rational::{int, Rational};
use crate::tensor::{Coeffs, SkewPattern, StructureTensor};

/// `[e_{i_1},..,e_{i_n}] = ε_{i_1..i_n k} e_k` on dimension n+1.
pub fn levi_civita(arity: usize) -> NLieAlgebra {
    let dim = arity + 1;
    let mut bracket = StructureTensor::new(dim, SkewPattern::fully_alternating(arity));
    for missing in 0..dim {
        let tuple: Vec<usize> = (0..dim).filter(|&i| i != missing).collect();
        // Sign of the permutation (tuple.., missing) of 0..dim.
        let mut perm: Vec<usize> = tuple.clone();
        perm.push(missing);
        let mut inversions = 0;
        for i in 0..dim {
            for j in i + 1..dim {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { int(1) } else { int(-1) };
        bracket
            .insert_canonical(tuple, Coeffs::from([(missing, sign)]))
            .expect("canonical key");
    }
    NLieAlgebra::new(dim, arity, bracket).expect("valid shape")
}

/// The 4-dimensional 3-Lie algebra with the Levi-Civita bracket.
pub fn s3() -> NLieAlgebra {
    levi_civita(3)
}

/// The 5-dimensional 4-Lie algebra with the Levi-Civita bracket.
pub fn s4() -> NLieAlgebra {
    levi_civita(4)
}

/// Three-dimensional pre-Lie algebra with `e3∘e2 = e2`, `e3∘e3 = -e3`.
pub fn pl() -> NPreLieAlgebra {
    let mut product = StructureTensor::new(3, SkewPattern::leading_alternating(2, 1));
    product
        .insert_canonical(vec![2, 1], Coeffs::from([(1, Rational::one())]))
        .expect("canonical key");
    product
        .insert_canonical(vec![2, 2], Coeffs::from([(2, int(-1))]))
        .expect("canonical key");
    NPreLieAlgebra::new(3, 2, product).expect("valid shape")
}

/// The trace functional on [`pl`]: `τ(e1) = 1`, `τ(e2) = τ(e3) = 0`.
pub fn t1() -> Covector {
    Covector::new(vec![int(1), int(0), int(0)])
}

/// Three-dimensional 3-pre-Lie algebra with `{e1,e3,e2} = e2`,
/// `{e1,e3,e3} = -e3` (the structure induced by [`pl`] and [`t1`]).
pub fn p3() -> NPreLieAlgebra {
    let mut product = StructureTensor::new(3, SkewPattern::leading_alternating(3, 2));
    product
        .insert_canonical(vec![0, 2, 1], Coeffs::from([(1, Rational::one())]))
        .expect("canonical key");
    product
        .insert_canonical(vec![0, 2, 2], Coeffs::from([(2, int(-1))]))
        .expect("canonical key");
    NPreLieAlgebra::new(3, 3, product).expect("valid shape")
}

/// A catalog entry.
#[derive(Debug, Clone)]
pub enum CatalogObject {
    NLie(NLieAlgebra),
    NPreLie(NPreLieAlgebra),
    Covector(Covector),
}

/// Fixed catalog names; `Z(d,n)`, `Zpre(d,n)` and `Am(S3,m)`/`Am(S4,m)` are
/// parametric.
pub const FIXED_NAMES: [&str; 5] = ["S3", "S4", "PL", "T1", "P3"];

fn parse_two_args(name: &str, prefix: &str) -> Option<(String, String)> {
    let rest = name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = rest.split_once(',')?;
    Some((a.trim().to_string(), b.trim().to_string()))
}

/// Look up a catalog object by name.
pub fn lookup(name: &str) -> Result<CatalogObject> {
    match name {
        "S3" => return Ok(CatalogObject::NLie(s3())),
        "S4" => return Ok(CatalogObject::NLie(s4())),
        "PL" => return Ok(CatalogObject::NPreLie(pl())),
        "T1" => return Ok(CatalogObject::Covector(t1())),
        "P3" => return Ok(CatalogObject::NPreLie(p3())),
        _ => {}
    }
    if let Some((d, n)) = parse_two_args(name, "Zpre") {
        let (dim, arity) = parse_dims(name, &d, &n)?;
        return Ok(CatalogObject::NPreLie(NPreLieAlgebra::zero(dim, arity)));
    }
    if let Some((d, n)) = parse_two_args(name, "Z") {
        let (dim, arity) = parse_dims(name, &d, &n)?;
        return Ok(CatalogObject::NLie(NLieAlgebra::zero(dim, arity)));
    }
    if let Some((base, m)) = parse_two_args(name, "Am") {
        let algebra = match base.as_str() {
            "S3" => s3(),
            "S4" => s4(),
            _ => {
                return Err(AlgebraError::Precondition(format!(
                    "unknown catalog name `{name}` (Am accepts S3 or S4)"
                )))
            }
        };
        let m: usize = m
            .parse()
            .map_err(|_| AlgebraError::Precondition(format!("bad integer in `{name}`")))?;
        algebra.check();
        let built = crate::geometry::build_a_m(&algebra, m)?;
        return Ok(CatalogObject::NLie(built.metric.algebra));
    }
    Err(AlgebraError::Precondition(format!(
        "unknown catalog name `{name}`"
    )))
}

fn parse_dims(name: &str, d: &str, n: &str) -> Result<(usize, usize)> {
    let dim: usize = d
        .parse()
        .map_err(|_| AlgebraError::Precondition(format!("bad integer in `{name}`")))?;
    let arity: usize = n
        .parse()
        .map_err(|_| AlgebraError::Precondition(format!("bad integer in `{name}`")))?;
    if dim == 0 || arity < 2 {
        return Err(AlgebraError::Precondition(format!(
            "`{name}` needs dim >= 1 and arity >= 2"
        )));
    }
    Ok((dim, arity))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_civita_signs() {
        let s3 = s3();
        assert_eq!(
            s3.bracket().eval_basis(&[0, 1, 2]),
            Coeffs::from([(3, int(1))])
        );
        assert_eq!(
            s3.bracket().eval_basis(&[0, 1, 3]),
            Coeffs::from([(2, int(-1))])
        );
        assert_eq!(
            s3.bracket().eval_basis(&[0, 2, 3]),
            Coeffs::from([(1, int(1))])
        );
        assert_eq!(
            s3.bracket().eval_basis(&[1, 2, 3]),
            Coeffs::from([(0, int(-1))])
        );
    }

    #[test]
    fn four_lie_levi_civita_is_valid() {
        let s4 = s4();
        assert!(s4.check().is_empty());
    }

    #[test]
    fn lookup_parametric_names() {
        assert!(matches!(lookup("Z(4,3)"), Ok(CatalogObject::NLie(_))));
        assert!(matches!(lookup("Zpre(3,3)"), Ok(CatalogObject::NPreLie(_))));
        assert!(lookup("Z(0,3)").is_err());
        assert!(lookup("nope").is_err());
    }
}
