//! Separating functionals for cones meeting in a common face.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gamma::{scale_into_gamma, vertices, ValueGroup};
use crate::linalg;
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::polyhedra::cone::{basis_of, Cone, HomFunctional};
use crate::polyhedra::thin::bracket;
use crate::scalar::{dot_rs, Rat, Scalar};

/// Which branch of the separation produced the functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationCase {
    BothAtHeight,
    BothFlat,
    Mixed,
}

fn meets_height(c: &Cone) -> bool {
    c.rays().iter().any(|r| r.last().unwrap().is_positive())
}

fn height_functional(d: usize) -> HomFunctional {
    HomFunctional::new(vec![Rat::zero(); d - 1], Scalar::one())
}

/// σ ⊆ y^∨, τ ⊆ (-y)^∨ and σ ∩ y^⊥ = σ ∩ τ = τ ∩ y^⊥.
pub fn verify_separation(sigma: &Cone, tau: &Cone, y: &HomFunctional) -> bool {
    let nonneg = |c: &Cone, s: i32| {
        c.rays().iter().all(|r| y.eval(r).sign() * s >= 0) && c.lines().iter().all(|l| y.eval(l).is_zero())
    };
    if !nonneg(sigma, 1) || !nonneg(tau, -1) {
        return false;
    }
    let Ok(f) = sigma.intersect(tau) else { return false };
    let on = std::slice::from_ref(y);
    matches!((sigma.cut(on, &[]), tau.cut(on, &[])), (Ok(a), Ok(b)) if a == f && b == f)
}

/// Positive combination of the facets of σ through F plus any combination of its
/// equations, equal to minus the same for τ. Solved as a rational LP over the
/// coordinates of u and of each symbol in c. With `qgamma`, the constant term is
/// additionally forced into QΓ.
pub fn separate_cones(sigma: &Cone, tau: &Cone, qgamma: Option<&ValueGroup>) -> Result<HomFunctional> {
    let d = sigma.ambient_dim();
    if tau.ambient_dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: tau.ambient_dim() });
    }
    let f = sigma.intersect(tau)?;
    if !(sigma.has_face(&f) && tau.has_face(&f)) {
        return Err(Error::NotCommonFace);
    }
    // (functional, from σ), positive multipliers first
    let mut pos: Vec<(HomFunctional, bool)> = Vec::new();
    let mut free: Vec<(HomFunctional, bool)> = Vec::new();
    for (c, side) in [(sigma, true), (tau, false)] {
        // inside t = 0 the constant terms carry no information
        let flat = c.rays().iter().chain(c.lines()).all(|r| r[d - 1].is_zero());
        let strip = |h: &HomFunctional| if flat { HomFunctional::new(h.u.clone(), Scalar::zero()) } else { h.clone() };
        for i in c.supporting_facets(&f) {
            pos.push((strip(&c.facets()[i]), side));
        }
        free.extend(c.eqs().iter().map(|e| (strip(e), side)));
        if flat {
            free.push((height_functional(d), side));
        }
    }
    let npos = pos.len();
    let (all, side): (Vec<HomFunctional>, Vec<bool>) = pos.into_iter().chain(free).unzip();
    if all.is_empty() {
        return Ok(HomFunctional::new(vec![Rat::zero(); d - 1], Scalar::zero()));
    }
    if let Some(x) = combination(&all, &side, npos, qgamma) {
        return Ok(side_sum(&all, &side, &x));
    }
    // Incommensurable constant terms: take u from an LP on rational stand-ins,
    // then place c exactly between the two sides.
    for depth in [8u32, 16, 32, 64, 128] {
        let approx: Vec<HomFunctional> =
            all.iter().map(|h| HomFunctional::new(h.u.clone(), Scalar::rational(h.c.sample(depth)))).collect();
        let Some(x) = combination(&approx, &side, npos, None) else { continue };
        let u = side_sum(&all, &side, &x).u;
        if let Some(c) = place_constant(sigma, tau, &u, qgamma) {
            let y = HomFunctional::new(u, c);
            if verify_separation(sigma, tau, &y) {
                return Ok(y);
            }
        }
    }
    Err(Error::NotCommonFace)
}

fn side_sum(all: &[HomFunctional], side: &[bool], x: &[Scalar]) -> HomFunctional {
    let mut y = HomFunctional::new(vec![Rat::zero(); all[0].u.len()], Scalar::zero());
    for j in 0..all.len() {
        if side[j] {
            let q = x[j].to_rat().expect("rational multiplier");
            y = y.add(&all[j].scale(&q));
        }
    }
    y
}

/// Multipliers, positive (at least 1) on the first `npos`, for which the σ-side sum
/// equals minus the τ-side sum coordinatewise.
fn combination(all: &[HomFunctional], side: &[bool], npos: usize, qgamma: Option<&ValueGroup>) -> Option<Vec<Scalar>> {
    let nv = all.len();
    let basis = basis_of(all.iter().map(|h| &h.c).chain(qgamma.into_iter().flat_map(|g| g.basis())));
    let m = basis.as_ref().map(|b| b.len()).unwrap_or(0);
    let vecs: Vec<Vec<Rat>> = all
        .iter()
        .map(|h| {
            let mut v = h.u.clone();
            v.extend(h.c.coords(m));
            v
        })
        .collect();
    let n = all[0].u.len();
    let width = n + m + 1;
    let mut lp = Lp::new(nv, true);
    for k in 0..width {
        lp.add((0..nv).map(|j| vecs[j][k].clone()).collect(), Cmp::Eq, Scalar::zero());
    }
    if let Some(g) = qgamma {
        let gt: Vec<Vec<Rat>> = g.basis().iter().map(|x| x.coords(m)).collect();
        for kappa in linalg::kernel(&gt, m + 1) {
            let row = (0..nv)
                .map(|j| {
                    if side[j] {
                        (0..=m).map(|i| &kappa[i] * &vecs[j][n + i]).sum()
                    } else {
                        Rat::zero()
                    }
                })
                .collect();
            lp.add(row, Cmp::Eq, Scalar::zero());
        }
    }
    for j in 0..npos {
        let mut row = vec![Rat::zero(); nv];
        row[j] = Rat::one();
        lp.add(row, Cmp::Ge, Scalar::one());
        lp.obj[j] = Scalar::one();
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// c with -<u,v> ≤ c on the vertices of σ and c ≤ -<u,v> on those of τ, strictly
/// inside the gap when there is one; in QΓ when asked.
fn place_constant(sigma: &Cone, tau: &Cone, u: &[Rat], qgamma: Option<&ValueGroup>) -> Option<Scalar> {
    let lo = vertices(sigma).iter().map(|v| -dot_rs(u, v)).reduce(|a, b| if a.lt(&b) { b } else { a });
    let hi = vertices(tau).iter().map(|v| -dot_rs(u, v)).reduce(|a, b| if a.lt(&b) { a } else { b });
    let unit = qgamma.map(|g| g.positive_unit()).unwrap_or_else(Scalar::one);
    match (lo, hi) {
        (Some(l), Some(h)) if l == h => Some(l),
        (Some(l), Some(h)) if l.lt(&h) => strictly_between(&l, &h, &unit),
        (Some(l), None) => Some(unit.mul_rat(&bracket(&l, &unit, 0).ok()?.1)),
        (None, Some(h)) => Some(unit.mul_rat(&bracket(&h, &unit, 0).ok()?.0)),
        (None, None) => Some(Scalar::zero()),
        _ => None,
    }
}

/// q·unit with lo < q·unit < hi, searching dyadic q.
fn strictly_between(lo: &Scalar, hi: &Scalar, unit: &Scalar) -> Option<Scalar> {
    let (a, b) = (lo.approx() / unit.approx(), hi.approx() / unit.approx());
    if a.is_finite() && b.is_finite() {
        for bits in 0..60u32 {
            let den = (1u64 << bits) as f64;
            let q = ((a + b) / 2.0 * den).round();
            let q = Rat::new(num_bigint::BigInt::from(q as i64), num_bigint::BigInt::from(1u64 << bits));
            let c = unit.mul_rat(&q);
            if lo.lt(&c) && c.lt(hi) {
                return Some(c);
            }
        }
    }
    // over a lexicographic basis a rational step may be infinitesimal
    let mid = (lo + hi).mul_rat(&Rat::new(1.into(), 2.into()));
    (lo.lt(&mid) && mid.lt(hi)).then_some(mid)
}

/// y ∈ M×Γ separating σ and τ, by the three-case construction.
pub fn separate(sigma: &Cone, tau: &Cone, g: &ValueGroup) -> Result<(HomFunctional, SeparationCase)> {
    let (hs, ht) = (meets_height(sigma), meets_height(tau));
    let (y, case) = match (hs, ht) {
        (true, true) => (separate_cones(sigma, tau, Some(g))?, SeparationCase::BothAtHeight),
        (false, false) => {
            let y = separate_cones(sigma, tau, None)?;
            (HomFunctional::new(y.u, Scalar::zero()), SeparationCase::BothFlat)
        }
        (false, true) => (mixed(sigma, tau, g)?, SeparationCase::Mixed),
        (true, false) => (mixed(tau, sigma, g)?.neg(), SeparationCase::Mixed),
    };
    let (u, c) = scale_into_gamma(&y, g).ok_or_else(|| Error::NotInQGamma(y.c.to_text()))?;
    let y = HomFunctional::new(linalg::to_rat_vec(&u), g.from_int_coords(&c));
    if !verify_separation(sigma, tau, &y) {
        return Err(Error::NotCommonFace);
    }
    Ok((y, case))
}

/// σ inside N×{0}, τ meeting height 1: y = (u, -δ) with u separating σ from the
/// recession cone of P_τ, γ = max of u on the vertices of P_τ and δ ∈ Γ above γ.
fn mixed(sigma: &Cone, tau: &Cone, g: &ValueGroup) -> Result<HomFunctional> {
    let d = sigma.ambient_dim();
    let tau0 = tau.cut(&[height_functional(d)], &[])?;
    if !sigma.intersect(tau)?.eq(&sigma.intersect(&tau0)?) {
        return Err(Error::NotCommonFace);
    }
    let y0 = separate_cones(sigma, &tau0, None)?;
    let u = if y0.u.iter().all(|x| x.is_zero()) {
        y0.u.clone()
    } else {
        linalg::to_rat_vec(&linalg::primitive_rat(&y0.u)?)
    };
    let gamma = vertices(tau)
        .iter()
        .map(|v| dot_rs(&u, v))
        .reduce(|a, b| if a.lt(&b) { b } else { a })
        .ok_or(Error::EmptyPolyhedron)?;
    let unit = g.basis().iter().find(|x| !x.is_zero()).unwrap().abs();
    let (_, hi) = bracket(&gamma, &unit, 0)?;
    let delta = unit.mul_rat(&hi);
    Ok(HomFunctional::new(u, -delta))
}
