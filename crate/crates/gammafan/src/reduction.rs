//! Reduction of Γ-admissible fans to rational fans in N × R^k.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{presentation, vertices, ValueGroup};
use crate::polyhedra::cone::{Cone, HomFunctional};
use crate::polyhedra::fan::{pullback, pullback_cone, Ambient, Fan};
use crate::polyhedra::farkas::{farkas_rational, fmt_point, Ineq};
use crate::polyhedra::separate::separate;
use crate::polyhedra::thin::thin_rational_cone;
use crate::scalar::{dot_rs, Rat, Scalar};

/// ỹ = (u, f) with c = <f, γ̄>.
pub fn tilde(y: &HomFunctional, g: &ValueGroup) -> Result<Vec<Rat>> {
    let f = g.coords(&y.c).ok_or_else(|| Error::NotInQGamma(y.c.to_text()))?;
    let mut v = y.u.clone();
    v.extend(f);
    Ok(v)
}

fn rational_functional(v: Vec<Rat>) -> HomFunctional {
    HomFunctional::from_rats(&v)
}

fn pad_front(v: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    out.extend(v.iter().cloned());
    out
}

fn height(n: usize) -> HomFunctional {
    let mut t = vec![Rat::zero(); n];
    t.push(Rat::one());
    HomFunctional::from_rats(&t)
}

/// L^∨ ∩ (t ≥ 0) in N × R≥0.
pub fn dual_at_height(l: &[HomFunctional], n: usize) -> Result<Cone> {
    let mut ineqs = l.to_vec();
    ineqs.push(height(n));
    Cone::from_h(n + 1, vec![], ineqs)
}

/// 𝒫_B(L̃) = π^{-1}(B) ∩ L̃^∨ ⊆ N × R^k. The pullback along γ̄ is checked against L^∨.
pub fn lift_cone(l: &[HomFunctional], b: &Cone, g: &ValueGroup) -> Result<Cone> {
    let k = g.rank();
    if b.ambient_dim() != k {
        return Err(Error::DimensionMismatch { expected: k, found: b.ambient_dim() });
    }
    let gbar = g.gamma_bar();
    if !b.contains(&gbar) {
        return Err(Error::GammaBarNotInB);
    }
    let n = l.first().map(|y| y.u.len()).ok_or(Error::Empty)?;
    let mut ineqs = l.iter().map(|y| tilde(y, g).map(rational_functional)).collect::<Result<Vec<_>>>()?;
    let lift_b = |h: &HomFunctional| rational_functional(pad_front(&h.to_rats().expect("rational B"), n));
    ineqs.extend(b.facets().iter().map(lift_b));
    let eqs = b.eqs().iter().map(lift_b).collect();
    let c = Cone::from_h(n + k, eqs, ineqs)?;
    let back = pullback_cone(&c, &gbar)?;
    let want = dual_at_height(l, n)?;
    if back != want {
        return Err(Error::ReductionVerificationFailed(format!("lift of {:?} pulls back to {:?}", want.rays(), back.rays())));
    }
    Ok(c)
}

/// For L^∨ ⊆ y0^∨: f ∈ Q^k with <f, γ̄> ≥ 0 and L̃^∨ ∩ π^{-1}(f^∨) ⊆ ỹ0^∨.
pub fn extend_inclusion(l: &[HomFunctional], y0: &HomFunctional, g: &ValueGroup) -> Result<Vec<Rat>> {
    let sys: Vec<Ineq> = l.iter().map(|y| Ineq::new(y.u.clone(), -y.c.clone())).collect();
    let cert = match farkas_rational(&sys, &y0.u, &-y0.c.clone()) {
        Ok(c) => c,
        Err(Error::EmptyPolyhedron) => return Err(Error::HeightZeroOnly),
        Err(Error::NotValid { witness }) => return Err(Error::NotIncluded { witness }),
        Err(e) => return Err(e),
    };
    let mut delta = Scalar::zero();
    for (c, y) in cert.multipliers.iter().zip(l) {
        delta += &y.c.mul_rat(&c.to_rat().expect("rational multiplier"));
    }
    let rest = &y0.c - &delta;
    debug_assert!(rest.sign() >= 0);
    g.coords(&rest).ok_or_else(|| Error::NotInQGamma(rest.to_text()))
}

/// {f_1, ..., f_r}^∨ ⊆ R^k.
fn dual_of(k: usize, fs: &[Vec<Rat>]) -> Result<Cone> {
    let ineqs = fs.iter().filter(|f| f.iter().any(|x| !x.is_zero())).map(|f| rational_functional(f.clone())).collect();
    Cone::from_h(k, vec![], ineqs)
}

/// σ ∩ τ meets height one: four families of inclusions.
pub fn b_cone_case1(ls: &[HomFunctional], lt: &[HomFunctional], y0: &HomFunctional, g: &ValueGroup) -> Result<Cone> {
    let mut fs = vec![extend_inclusion(ls, y0, g)?, extend_inclusion(lt, &y0.neg(), g)?];
    let mut ls_neg = ls.to_vec();
    ls_neg.push(y0.neg());
    let mut lt_pos = lt.to_vec();
    lt_pos.push(y0.clone());
    for y in ls.iter().chain(lt) {
        fs.push(extend_inclusion(&ls_neg, y, g)?);
        fs.push(extend_inclusion(&lt_pos, y, g)?);
    }
    dual_of(g.rank(), &fs)
}

fn min_scalar(it: impl Iterator<Item = Scalar>) -> Option<Scalar> {
    it.reduce(|a, b| if b.lt(&a) { b } else { a })
}

/// σ ∩ τ ⊆ N × {0}: shift y0 by a margin ε and add a thin cone around γ̄.
pub fn b_cone_case2(
    sigma: &Cone,
    tau: &Cone,
    ls: &[HomFunctional],
    lt: &[HomFunctional],
    y0: &HomFunctional,
    g: &ValueGroup,
) -> Result<Cone> {
    let val = |v: &Vec<Scalar>| &dot_rs(&y0.u, v) + &y0.c;
    let ms = min_scalar(vertices(sigma).iter().map(val)).ok_or(Error::HeightZeroOnly)?;
    let mt = min_scalar(vertices(tau).iter().map(|v| -val(v))).ok_or(Error::HeightZeroOnly)?;
    let eps = min_scalar([ms, mt].into_iter()).unwrap().mul_rat(&Rat::new(BigInt::one(), BigInt::from(2)));
    if eps.sign() <= 0 {
        return Err(Error::NonPositiveMargin);
    }
    let g1 = extend_inclusion(ls, &HomFunctional::new(y0.u.clone(), &y0.c - &eps), g)?;
    let yn = y0.neg();
    let g2 = extend_inclusion(lt, &HomFunctional::new(yn.u.clone(), &yn.c - &eps), g)?;
    let h = g.coords(&eps).ok_or_else(|| Error::NotInQGamma(eps.to_text()))?;
    let thin = thin_rational_cone(&h, &g.gamma_bar())?;
    let b = dual_of(g.rank(), &[g1, g2, h])?;
    b.intersect(&thin)
}

/// B_{σ,τ} by the case split on σ ∩ τ.
pub fn b_cone(sigma: &Cone, tau: &Cone, ls: &[HomFunctional], lt: &[HomFunctional], g: &ValueGroup) -> Result<Cone> {
    let (y0, _) = separate(sigma, tau, g)?;
    let meet = sigma.intersect(tau)?;
    if meets_height(&meet) {
        b_cone_case1(ls, lt, &y0, g)
    } else {
        b_cone_case2(sigma, tau, ls, lt, &y0, g)
    }
}

fn meets_height(c: &Cone) -> bool {
    c.rays().iter().any(|r| r.last().unwrap().is_positive())
}

/// Replace each maximal σ ⊆ N × {0} by (σ × R≥0) ∩ ⋂ y_τ^∨; the input stays a subfan.
pub fn thicken_height_zero(f: &Fan, g: &ValueGroup) -> Result<Fan> {
    let d = f.ambient_dim();
    let mut cur: Vec<Cone> = f.maximal().to_vec();
    for i in 0..cur.len() {
        if meets_height(&cur[i]) {
            continue;
        }
        let sigma = cur[i].clone();
        let mut rays = sigma.rays().to_vec();
        let mut up = vec![Scalar::zero(); d];
        up[d - 1] = Scalar::one();
        rays.push(up);
        let mut thick = Cone::from_rays(d, rays, sigma.lines().to_vec())?;
        for (j, tau) in cur.iter().enumerate() {
            if j != i {
                let (y, _) = separate(&sigma, tau, g)?;
                thick = thick.cut(&[], &[y])?;
            }
        }
        cur[i] = thick;
    }
    let mut all = cur;
    all.extend(f.maximal().iter().cloned());
    Fan::from_max(d, Ambient::HalfSpace, all)
}

/// Output of the reduction: Σ̃ in N × R^k with pullback Σ.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub k: usize,
    pub gamma_bar: Vec<Scalar>,
    pub b: Cone,
    pub thickened: Fan,
    pub lifted_full: Fan,
    pub lifted: Fan,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionSummary {
    pub k: usize,
    pub gamma_bar: Vec<String>,
    pub b_rays: Vec<String>,
    pub lifted_maximal: usize,
    pub lifted_rays: Vec<String>,
}

impl ReductionResult {
    pub fn summary(&self) -> ReductionSummary {
        ReductionSummary {
            k: self.k,
            gamma_bar: self.gamma_bar.iter().map(|s| s.to_text()).collect(),
            b_rays: self.b.rays().iter().map(|r| fmt_point(r)).collect(),
            lifted_maximal: self.lifted.maximal().len(),
            lifted_rays: self.lifted.rays().iter().map(|r| fmt_point(r)).collect(),
        }
    }
}

/// A rational u* near γ̄ with <u*, γ̄> > 0.
pub fn rational_direction(gbar: &[Scalar]) -> Result<Vec<Rat>> {
    for bits in [4u32, 10, 20, 40] {
        let den = BigInt::from(1u64 << bits);
        let u: Vec<Rat> = gbar
            .iter()
            .map(|x| {
                let v = x.approx() * (1u64 << bits) as f64;
                let v = if v.is_finite() { v.round().clamp(-1e15, 1e15) } else { 0.0 };
                Rat::new(BigInt::from(v as i64), den.clone())
            })
            .collect();
        if dot_rs(&u, gbar).sign() > 0 {
            return Ok(u);
        }
    }
    Err(Error::SemanticError("no rational direction found for gamma bar".into()))
}

/// Σ ↦ Σ̃ with Σ̃ rational in N × R^k and pullback(Σ̃, γ̄) = Σ.
pub fn reduce(f: &Fan, g: &ValueGroup) -> Result<ReductionResult> {
    if f.ambient() != Ambient::HalfSpace {
        return Err(Error::WrongAmbient);
    }
    let k = g.rank();
    let gbar = g.gamma_bar();
    let d = f.ambient_dim();
    let n = d - 1;
    let thick = thicken_height_zero(f, g)?;
    let max = thick.maximal();
    let ls = max.iter().map(|c| presentation(c, g)).collect::<Result<Vec<_>>>()?;
    let mut b = Cone::from_h(k, vec![], vec![])?;
    for i in 0..max.len() {
        for j in (i + 1)..max.len() {
            let bij = b_cone(&max[i], &max[j], &ls[i], &ls[j], g)?;
            b = b.intersect(&bij)?;
        }
    }
    let ustar = rational_direction(&gbar)?;
    b = b.intersect(&thin_rational_cone(&ustar, &gbar)?)?;
    let lifts = ls.iter().map(|l| lift_cone(l, &b, g)).collect::<Result<Vec<_>>>()?;
    let full = Fan::from_max(n + k, Ambient::Full, lifts)?;
    let mut keep = Vec::new();
    for c in full.cones() {
        if f.contains_cone(&pullback_cone(c, &gbar)?) {
            keep.push(c.clone());
        }
    }
    let lifted = Fan::from_max_unchecked(n + k, Ambient::Full, keep);
    let back = pullback(&lifted, &gbar)?;
    if !back.same_as(f) {
        return Err(Error::ReductionVerificationFailed(format!(
            "pullback has {} maximal cones, input has {}",
            back.maximal().len(),
            f.maximal().len()
        )));
    }
    Ok(ReductionResult { k, gamma_bar: gbar, b, thickened: thick, lifted_full: full, lifted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polyhedra::cone::rat_point;
    use crate::scalar::int;

    #[test]
    fn tilde_coordinates() {
        let (_, a, b) = fixtures::dart_basis().unwrap();
        let g = ValueGroup::new(vec![a.clone(), b.clone()]).unwrap();
        let y = HomFunctional::new(vec![int(1), int(0)], &a.mul_rat(&int(3)) - &b);
        assert_eq!(tilde(&y, &g).unwrap(), vec![int(1), int(0), int(3), int(-1)]);
        let bad = HomFunctional::new(vec![int(1)], Scalar::one());
        assert!(matches!(tilde(&bad, &g), Err(Error::NotInQGamma(_))));
    }

    #[test]
    fn extend_inclusion_one_dim() {
        let g = ValueGroup::integers();
        // L = {w >= 0, -w + 2t >= 0}, y0 = w + t >= 0
        let l = vec![HomFunctional::from_ints(&[1, 0]), HomFunctional::from_ints(&[-1, 2])];
        let f = extend_inclusion(&l, &HomFunctional::from_ints(&[1, 1]), &g).unwrap();
        assert_eq!(f, vec![int(1)]);
        let bad = HomFunctional::from_ints(&[1, -1]);
        assert!(matches!(extend_inclusion(&l, &bad, &g), Err(Error::NotIncluded { .. })));
        let empty = vec![HomFunctional::from_ints(&[1, -1]), HomFunctional::from_ints(&[-1, 0])];
        assert_eq!(extend_inclusion(&empty, &bad, &g), Err(Error::HeightZeroOnly));
    }

    #[test]
    fn lift_requires_gamma_bar() {
        let g = ValueGroup::integers();
        let l = vec![HomFunctional::from_ints(&[1, 0])];
        let b = Cone::from_rays(1, vec![rat_point(&[int(-1)])], vec![]).unwrap();
        assert_eq!(lift_cone(&l, &b, &g), Err(Error::GammaBarNotInB));
    }

    #[test]
    fn dart_round_trip() {
        let d = fixtures::dart().unwrap();
        let r = reduce(&d.fan, &d.gamma).unwrap();
        assert_eq!(r.k, 2);
        assert!(pullback(&r.lifted, &r.gamma_bar).unwrap().same_as(&d.fan));
        let lift = fixtures::dart_lift().unwrap();
        assert!(pullback(&lift.fan, &r.gamma_bar).unwrap().same_as(&d.fan));
    }

    #[test]
    fn height_zero_cone_is_thickened() {
        let g = ValueGroup::integers();
        let flat = Cone::from_rays(2, vec![rat_point(&[int(1), int(0)])], vec![]).unwrap();
        let seg = Cone::from_rays(2, vec![rat_point(&[int(-1), int(1)]), rat_point(&[int(0), int(1)])], vec![]).unwrap();
        let f = Fan::from_max(2, Ambient::HalfSpace, vec![flat, seg]).unwrap();
        let t = thicken_height_zero(&f, &g).unwrap();
        assert!(f.is_subfan_of(&t));
        assert!(t.maximal().iter().all(meets_height));
        let r = reduce(&f, &g).unwrap();
        assert!(pullback(&r.lifted, &r.gamma_bar).unwrap().same_as(&f));
    }
}
