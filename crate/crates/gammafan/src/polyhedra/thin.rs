//! Strongly convex rational cones around a point.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyhedra::cone::{Cone, HomFunctional};
use crate::scalar::{dot_rs, OracleKind, Rat, Scalar};

/// Floating estimate of a/b with b > 0. None when a/b is infinitely large over a
/// lexicographic basis.
fn ratio_estimate(a: &Scalar, b: &Scalar) -> Option<f64> {
    let lex = [a, b].iter().any(|s| s.basis().is_some_and(|x| x.kind == OracleKind::Lexicographic));
    if !lex {
        return Some(a.approx() / b.approx());
    }
    let (la, lb) = (a.level(), b.level());
    if la < lb {
        Some(0.0)
    } else if la > lb {
        None
    } else {
        let lead = |s: &Scalar| if s.level() <= 0 { s.q0().clone() } else { s.sym()[s.sym().len() - 1].clone() };
        let (p, q) = (lead(a), lead(b));
        Some(crate::scalar::approx_rat(&(p / q)))
    }
}

/// Rational lo < a/b < hi (b > 0), or an exact hit when a/b is rational.
pub fn bracket(a: &Scalar, b: &Scalar, coord: usize) -> Result<(Rat, Rat)> {
    let est = ratio_estimate(a, b).ok_or(Error::BracketSearchExhausted(coord))?;
    if !est.is_finite() {
        return Err(Error::BracketSearchExhausted(coord));
    }
    let base = Rat::from_integer(num_bigint::BigInt::from(est.floor() as i64));
    let above = |q: &Rat| (a - &b.mul_rat(q)).sign();
    for shift in 0..64i64 {
        for s in [shift, -shift] {
            let lo = &base + Rat::from_integer(s.into());
            let hi = &lo + Rat::one();
            let (sl, sh) = (above(&lo), above(&hi));
            if sl == 0 {
                return Ok((&lo - Rat::one(), hi));
            }
            if sl > 0 && sh < 0 {
                return Ok((lo, hi));
            }
        }
    }
    Err(Error::BracketSearchExhausted(coord))
}

/// A strongly convex rational cone σ ⊆ R^m with w ∈ int σ and σ ∩ u^⊥ = {0}.
pub fn thin_rational_cone(u: &[Rat], w: &[Scalar]) -> Result<Cone> {
    let m = u.len();
    if w.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: w.len() });
    }
    let s = dot_rs(u, w);
    if s.sign() <= 0 {
        return Err(Error::NotInteriorSide);
    }
    let jstar = u.iter().position(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
    let uf = |v: Vec<Rat>| HomFunctional::from_rats(&v);
    let mut ineqs = vec![uf(u.to_vec())];
    for j in (0..m).filter(|&j| j != jstar) {
        let (lo, hi) = bracket(&w[j], &s, j)?;
        // z_j - lo <u,z> >= 0 and hi <u,z> - z_j >= 0
        let mut a: Vec<Rat> = u.iter().map(|x| -(x * &lo)).collect();
        a[j] += Rat::one();
        let mut b: Vec<Rat> = u.iter().map(|x| x * &hi).collect();
        b[j] -= Rat::one();
        ineqs.push(uf(a));
        ineqs.push(uf(b));
    }
    let c = Cone::from_h(m, vec![], ineqs)?;
    debug_assert!(c.contains_relint(w) && c.is_pointed());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::cone::int_point;
    use crate::scalar::{int, rat, SymbolBasis};

    #[test]
    fn sqrt_two_box() {
        let b = SymbolBasis::sqrts(&["r2"], &[2]);
        let w = vec![Scalar::one(), b.symbol(0)];
        let c = thin_rational_cone(&[int(1), int(0)], &w).unwrap();
        assert!(c.contains_relint(&w));
        assert!(c.is_rational() && c.is_pointed());
        assert!(c.contains(&int_point(&[1, 1])) && c.contains(&int_point(&[1, 2])));
        let slice = c.cut(&[HomFunctional::from_ints(&[1, 0])], &[]).unwrap();
        assert!(slice.is_zero());
    }

    #[test]
    fn rational_and_errors() {
        let w = vec![Scalar::one(), Scalar::rational(rat(1, 2))];
        let c = thin_rational_cone(&[int(1), int(0)], &w).unwrap();
        assert!(c.contains_relint(&w));
        let w = vec![Scalar::one(), Scalar::zero()];
        assert!(thin_rational_cone(&[int(1), int(0)], &w).unwrap().contains_relint(&w));
        assert_eq!(thin_rational_cone(&[int(-1), int(0)], &w), Err(Error::NotInteriorSide));
    }

    #[test]
    fn non_archimedean_fails() {
        let b = SymbolBasis::lexicographic(&["omega"]);
        let w = vec![Scalar::one(), b.symbol(0)];
        assert_eq!(thin_rational_cone(&[int(1), int(0)], &w), Err(Error::BracketSearchExhausted(1)));
        let w = vec![b.symbol(0), Scalar::one()];
        assert!(thin_rational_cone(&[int(1), int(0)], &w).unwrap().contains_relint(&w));
    }
}
