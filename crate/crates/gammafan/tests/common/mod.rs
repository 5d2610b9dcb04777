//! Generators, brute-force oracles and seeded suites shared by the integration
//! tests and the acceptance harness.
#![allow(dead_code)]

use std::fmt::Debug;
use std::sync::Arc;

use gammafan::completion::{complete_admissible, verify_completion, EngineConfig};
use gammafan::gamma::{is_admissible_fan, ValueGroup};
use gammafan::linalg::{kernel, rank, solve};
use gammafan::lp::{Cmp, Lp, LpOutcome};
use gammafan::polyhedra::cone::{int_point, Cone, HomFunctional, Point};
use gammafan::polyhedra::fan::{Ambient, Fan};
use gammafan::polyhedra::farkas::{farkas_rational, Ineq};
use gammafan::polyhedra::polyhedron::{boundary_edge_through, slope, Polyhedron};
use gammafan::polyhedra::separate::{separate, separate_cones, verify_separation};
use gammafan::polyhedra::thin::thin_rational_cone;
use gammafan::random::{random_1d, random_2d};
use gammafan::scalar::{dot_rs, int, is_infinitesimal, rat};
use gammafan::{Error, Rat, Scalar, SymbolBasis};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs `cases` deterministic cases; the error carries the shrunk counterexample.
pub fn run<S>(cases: u32, strat: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
{
    let cfg = Config { cases, failure_persistence: None, max_shrink_iters: 256, max_global_rejects: 100_000, ..Config::default() };
    let mut r = TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    r.run(&strat, test).map_err(|e| e.to_string())
}

fn fail(e: Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

pub fn zr2() -> (Arc<SymbolBasis>, ValueGroup) {
    let b = SymbolBasis::sqrts(&["r2"], &[2]);
    let g = ValueGroup::new(vec![Scalar::one(), b.symbol(0)]).unwrap();
    (b, g)
}

/// p + q·√2.
pub fn g_elem(b: &Arc<SymbolBasis>, p: i64, q: i64) -> Scalar {
    &Scalar::from_int(p) + &b.symbol(0).mul_rat(&int(q))
}

fn nonzero(v: &[i64]) -> bool {
    v.iter().any(|&x| x != 0)
}

fn cross(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn half(a: &[i64]) -> bool {
    a[1] > 0 || (a[1] == 0 && a[0] > 0)
}

/// Counterclockwise order starting at the positive x-axis.
fn angle_sort(vs: &mut Vec<Vec<i64>>) {
    vs.sort_by(|a, b| match (half(a), half(b)) {
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        _ => 0.cmp(&cross(a, b)),
    });
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |a, &x| gcd(a, x));
    v.iter().map(|x| x / g.max(1)).collect()
}

fn ray_cone(rays: &[Vec<i64>]) -> Cone {
    let d = rays[0].len();
    Cone::from_rays(d, rays.iter().map(|r| int_point(r)).collect(), vec![]).unwrap()
}

/// Maximal cones of a complete fan in the plane, or None if some gap is ≥ π.
pub fn planar_fan(vs: &[Vec<i64>]) -> Option<Vec<Cone>> {
    let mut v: Vec<Vec<i64>> = vs.iter().filter(|x| nonzero(x)).map(|x| primitive(x)).collect();
    v.sort();
    v.dedup();
    angle_sort(&mut v);
    if v.len() < 3 {
        return None;
    }
    let k = v.len();
    let mut out = Vec::new();
    for i in 0..k {
        let (a, b) = (&v[i], &v[(i + 1) % k]);
        if cross(a, b) <= 0 {
            return None;
        }
        out.push(ray_cone(&[a.clone(), b.clone()]));
    }
    Some(out)
}

/// Stellar subdivision of the orthant fan of R^3 at ρ.
pub fn subdivided_octants(rho: &[i64]) -> Vec<Cone> {
    let mut out = Vec::new();
    let r = int_point(rho);
    for s in 0..8 {
        let e: Vec<Vec<i64>> = (0..3)
            .map(|i| {
                let mut v = vec![0; 3];
                v[i] = if s >> i & 1 == 1 { -1 } else { 1 };
                v
            })
            .collect();
        let c = ray_cone(&e);
        if !c.contains(&r) {
            out.push(c);
            continue;
        }
        for f in c.facet_cones() {
            if f.contains(&r) {
                continue;
            }
            let mut rays = f.rays().to_vec();
            rays.push(r.clone());
            let sub = Cone::from_rays(3, rays, vec![]).unwrap();
            if sub.dim() == 3 {
                out.push(sub);
            }
        }
    }
    out
}

/// Interiors of cone(a1, a2) and cone(b1, b2) (both strictly convex, counterclockwise) are disjoint.
pub fn disjoint_interiors(a: [&[i64]; 2], b: [&[i64]; 2]) -> bool {
    let dot = |h: &[i64], v: &[i64]| h[0] * v[0] + h[1] * v[1];
    for r in [a[0], a[1], b[0], b[1]] {
        let perp = [-r[1], r[0]];
        for s in [1, -1] {
            let h = [s * perp[0], s * perp[1]];
            if a.iter().all(|v| dot(&h, v) >= 0) && b.iter().all(|v| dot(&h, v) <= 0) {
                return true;
            }
        }
    }
    false
}

fn vec_i(d: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(lo..=hi, d)
}

/// V → H → V and H → V → H on rational cones, and on Γ-rational polyhedra over ℤ ⊕ ℤ√2.
pub fn dd_round_trips(cases: u32) -> Result<(), String> {
    let strat = (2usize..=4)
        .prop_flat_map(|d| (prop::collection::vec(vec_i(d, -4, 4), 1..=d + 3), prop::collection::vec(vec_i(d, -3, 3), 1..=d + 3), prop::collection::vec((vec_i(2, -2, 2), -3i64..=3, -3i64..=3), 3..=5)));
    let (b, _) = zr2();
    run(cases, strat, |(rays, ineqs, poly)| {
        let d = rays[0].len();
        let pts: Vec<Point> = rays.iter().filter(|r| nonzero(r)).map(|r| int_point(r)).collect();
        prop_assume!(!pts.is_empty());
        let c = Cone::from_rays(d, pts.clone(), vec![]).map_err(fail)?;
        for p in &pts {
            prop_assert!(c.contains(p));
        }
        let (eqs, fs) = c.hrep();
        prop_assert_eq!(&Cone::from_h(d, eqs, fs).map_err(fail)?, &c);
        let hs: Vec<HomFunctional> = ineqs.iter().filter(|r| nonzero(r)).map(|r| HomFunctional::from_ints(r)).collect();
        let h = Cone::from_h(d, vec![], hs.clone()).map_err(fail)?;
        for f in &hs {
            prop_assert!(h.rays().iter().all(|r| f.eval(r).sign() >= 0));
            prop_assert!(h.lines().iter().all(|l| f.eval(l).is_zero()));
        }
        prop_assert_eq!(&Cone::from_rays(d, h.rays().to_vec(), h.lines().to_vec()).map_err(fail)?, &h);
        // {<u, x> >= p + q√2} in the plane, homogenized.
        let mut sym: Vec<HomFunctional> = poly
            .iter()
            .filter(|(u, _, _)| nonzero(u))
            .map(|(u, p, q)| HomFunctional::new(vec![int(u[0]), int(u[1])], -g_elem(&b, *p, *q)))
            .collect();
        sym.push(HomFunctional::new(vec![Rat::zero(), Rat::zero()], Scalar::one()));
        let s = Cone::from_h(3, vec![], sym.clone()).map_err(fail)?;
        if !s.is_zero() {
            prop_assert_eq!(&Cone::from_rays(3, s.rays().to_vec(), s.lines().to_vec()).map_err(fail)?, &s);
            for f in &sym {
                prop_assert!(s.rays().iter().all(|r| f.eval(r).sign() >= 0));
            }
        }
        Ok(())
    })
}

/// Complete planar fans, pairs of planar cones against an angular oracle, and
/// stellar subdivisions of the octants.
pub fn fan_axiom_checks(cases: u32) -> Result<(), String> {
    let strat = (prop::collection::vec(vec_i(2, -5, 5), 3..=8), [vec_i(2, -4, 4), vec_i(2, -4, 4), vec_i(2, -4, 4), vec_i(2, -4, 4)], vec_i(3, -3, 3));
    run(cases, strat, |(vs, pair, rho)| {
        if let Some(cones) = planar_fan(&vs) {
            let f = Fan::from_max(2, Ambient::Full, cones).map_err(fail)?;
            prop_assert!(f.check_axiom().map_err(fail)?.is_none());
            prop_assert!(f.is_complete());
        }
        let [a1, a2, b1, b2] = &pair;
        if cross(a1, a2) > 0 && cross(b1, b2) > 0 {
            let (a, b) = (ray_cone(&[a1.clone(), a2.clone()]), ray_cone(&[b1.clone(), b2.clone()]));
            if a != b {
                let oracle = disjoint_interiors([a1, a2], [b1, b2]);
                let f = Fan::from_max_unchecked(2, Ambient::Full, vec![a, b]);
                prop_assert_eq!(f.check_axiom().map_err(fail)?.is_none(), oracle);
            }
        }
        if nonzero(&rho) {
            let f = Fan::from_max(3, Ambient::Full, subdivided_octants(&rho)).map_err(fail)?;
            prop_assert!(f.check_axiom().map_err(fail)?.is_none());
            prop_assert!(f.is_complete());
        }
        Ok(())
    })
}

/// σ ∩ y^⊥ = σ ∩ τ = τ ∩ y^⊥ for rational pairs and for Γ-pairs of all three kinds.
pub fn separation_post_equalities(cases: u32) -> Result<(), String> {
    let strat = (prop::collection::vec(vec_i(2, -5, 5), 3..=7), vec_i(3, -3, 3), 0usize..64, 0usize..64, vec_i(6, -3, 3), 0usize..3);
    let (b, g) = zr2();
    run(cases, strat, |(vs, rho, i, j, coef, kind)| {
        let mut pairs: Vec<(Cone, Cone)> = Vec::new();
        if let Some(cones) = planar_fan(&vs) {
            let k = cones.len();
            pairs.push((cones[i % k].clone(), cones[(i + 1) % k].clone()));
            if k > 2 && i % k != j % k {
                pairs.push((cones[i % k].clone(), cones[j % k].clone()));
            }
        }
        if nonzero(&rho) {
            let cs = subdivided_octants(&rho);
            let k = cs.len();
            if i % k != j % k {
                pairs.push((cs[i % k].clone(), cs[j % k].clone()));
            }
        }
        for (s, t) in &pairs {
            let y = separate_cones(s, t, None).map_err(fail)?;
            prop_assert!(verify_separation(s, t, &y), "rational pair");
        }
        let mut xs: Vec<Scalar> = (0..3).map(|m| g_elem(&b, coef[2 * m], coef[2 * m + 1])).collect();
        xs.sort_by(|p, q| p.cmp_value(q));
        xs.dedup();
        prop_assume!(xs.len() == 3);
        let at = |x: &Scalar| vec![x.clone(), Scalar::one()];
        let seg = |p: &Scalar, q: &Scalar| Cone::from_rays(2, vec![at(p), at(q)], vec![]).unwrap();
        let (s, t) = match kind {
            0 => (seg(&xs[0], &xs[1]), seg(&xs[1], &xs[2])),
            1 => {
                let x = xs[2].abs();
                prop_assume!(x.is_positive());
                (int_cone(&[&[1, 0]]), Cone::from_rays(2, vec![int_point(&[-1, 0]), at(&-x)], vec![]).unwrap())
            }
            _ => (seg(&xs[0], &xs[1]), Cone::from_rays(2, vec![at(&xs[1]), int_point(&[1, 0])], vec![]).unwrap()),
        };
        let (y, _) = separate(&s, &t, &g).map_err(fail)?;
        prop_assert!(verify_separation(&s, &t, &y), "gamma pair");
        prop_assert!(g.membership(&y.c).is_some(), "constant term in gamma");
        prop_assert!(y.u.iter().all(|q| q.is_integer()));
        Ok(())
    })
}

fn int_cone(rays: &[&[i64]]) -> Cone {
    Cone::from_rays(rays[0].len(), rays.iter().map(|r| int_point(r)).collect(), vec![]).unwrap()
}

/// Strongly convex, rational, w in the interior and σ ∩ u^⊥ = {0}.
pub fn thin_cone_postconditions(cases: u32) -> Result<(), String> {
    let strat = (1usize..=4).prop_flat_map(|m| (vec_i(m, -4, 4), vec_i(m, -3, 3), vec_i(m, -3, 3)));
    let (b, _) = zr2();
    run(cases, strat, |(u, p, q)| {
        prop_assume!(nonzero(&u));
        let m = u.len();
        let w: Vec<Scalar> = (0..m).map(|i| g_elem(&b, p[i], q[i])).collect();
        let mut u: Vec<Rat> = u.iter().map(|&x| int(x)).collect();
        let s = dot_rs(&u, &w);
        prop_assume!(!s.is_zero());
        if s.is_negative() {
            u = u.iter().map(|x| -x).collect();
        }
        let c = thin_rational_cone(&u, &w).map_err(fail)?;
        prop_assert!(c.is_pointed());
        prop_assert!(c.is_rational());
        prop_assert_eq!(c.dim(), m);
        prop_assert!(c.contains_relint(&w));
        prop_assert!(c.rays().iter().all(|r| dot_rs(&u, r).is_positive()));
        Ok(())
    })
}

/// Σ bᵢwᵢ = w₀ with bᵢ ≥ 0: exact LP over ℚ against membership in cone(wᵢ) over the scalars.
pub fn solvability_agreement(cases: u32) -> Result<(), String> {
    let strat = (1usize..=3).prop_flat_map(|n| (prop::collection::vec(vec_i(n, -3, 3), 1..=5), vec_i(n, -3, 3)));
    run(cases, strat, |(ws, w0)| {
        let n = w0.len();
        let mut lp = Lp::new(ws.len(), false);
        for k in 0..n {
            lp.add(ws.iter().map(|w| int(w[k])).collect(), Cmp::Eq, Scalar::from_int(w0[k]));
        }
        let over_q = !matches!(lp.solve(), LpOutcome::Infeasible);
        let gens: Vec<Point> = ws.iter().filter(|w| nonzero(w)).map(|w| int_point(w)).collect();
        let over_r = if gens.is_empty() { !nonzero(&w0) } else { Cone::from_rays(n, gens, vec![]).map_err(fail)?.contains(&int_point(&w0)) };
        prop_assert_eq!(over_q, over_r);
        Ok(())
    })
}

/// One Farkas instance: {<uᵢ,x> ≥ aᵢ} and the candidate <u₀,x> ≥ a₀.
#[derive(Debug, Clone)]
pub struct FarkasCase {
    pub l: Vec<Ineq>,
    pub u0: Vec<Rat>,
    pub a0: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    NotValid,
    Empty,
}

pub fn farkas_case<R: Rng>(rng: &mut R, b: &Arc<SymbolBasis>) -> FarkasCase {
    let n = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=6);
    let elem = |rng: &mut R, r: i64| g_elem(b, rng.gen_range(-r..=r), rng.gen_range(-r..=r));
    let x: Vec<Scalar> = (0..n).map(|_| elem(rng, 2)).collect();
    let planted = rng.gen_bool(0.8);
    let mut l = Vec::new();
    for _ in 0..k {
        let u: Vec<Rat> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
        let a = if planted {
            let slack = [Scalar::zero(), Scalar::one(), b.symbol(0), g_elem(b, 1, 1), Scalar::from_int(2)][rng.gen_range(0..5)].clone();
            &dot_rs(&u, &x) - &slack
        } else {
            elem(rng, 3)
        };
        l.push(Ineq::new(u, a));
    }
    let u0: Vec<Rat> = if rng.gen_bool(0.6) {
        let mut u0 = vec![Rat::zero(); n];
        for i in &l {
            let c = int(rng.gen_range(0..=2));
            for (t, ui) in u0.iter_mut().zip(&i.u) {
                *t += &c * ui;
            }
        }
        u0
    } else {
        (0..n).map(|_| int(rng.gen_range(-3..=3))).collect()
    };
    let a0 = if planted && rng.gen_bool(0.5) { &dot_rs(&u0, &x) - &elem(rng, 2) } else { elem(rng, 4) };
    FarkasCase { l, u0, a0 }
}

fn subsets(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(i + 1, k, size, cur, out);
            cur.pop();
        }
    }
    go(0, k, size, &mut cur, &mut out);
    out
}

fn dot_r(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Brute force: P = L + P' with L the lineality space; vertices of P' from all
/// n-subsets of tight constraints, extreme rays from all (n-1)-subsets.
pub fn farkas_oracle(c: &FarkasCase) -> Verdict {
    let n = c.u0.len();
    let us: Vec<Vec<Rat>> = c.l.iter().map(|i| i.u.clone()).collect();
    let lin = kernel(&us, n);
    let e = lin.len();
    let feasible = |x: &[Scalar]| c.l.iter().all(|i| i.holds(x));
    let mut vertices: Vec<Vec<Scalar>> = Vec::new();
    if e == n {
        // every uᵢ is zero
        if feasible(&vec![Scalar::zero(); n]) {
            vertices.push(vec![Scalar::zero(); n]);
        }
    } else {
        for s in subsets(c.l.len(), n - e) {
            let mut a: Vec<Vec<Rat>> = s.iter().map(|&i| us[i].clone()).collect();
            let mut rhs: Vec<Scalar> = s.iter().map(|&i| c.l[i].a.clone()).collect();
            a.extend(lin.iter().cloned());
            rhs.extend(std::iter::repeat(Scalar::zero()).take(e));
            if rank(&a) < n {
                continue;
            }
            if let Ok(Some(x)) = solve(&a, &rhs) {
                if feasible(&x) {
                    vertices.push(x);
                }
            }
        }
    }
    if vertices.is_empty() {
        return Verdict::Empty;
    }
    if lin.iter().any(|l| !dot_r(&c.u0, l).is_zero()) {
        return Verdict::NotValid;
    }
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    if n >= e + 1 {
        for s in subsets(c.l.len(), n - e - 1) {
            let mut a: Vec<Vec<Rat>> = s.iter().map(|&i| us[i].clone()).collect();
            a.extend(lin.iter().cloned());
            if rank(&a) != n - 1 {
                continue;
            }
            let k = kernel(&a, n);
            for sign in [1, -1] {
                let d: Vec<Rat> = k[0].iter().map(|x| x * int(sign)).collect();
                if us.iter().all(|u| !dot_r(u, &d).is_negative()) {
                    rays.push(d);
                }
            }
        }
    }
    let ok_v = vertices.iter().all(|v| !(&dot_rs(&c.u0, v) - &c.a0).is_negative());
    let ok_r = rays.iter().all(|r| !dot_r(&c.u0, r).is_negative());
    if ok_v && ok_r {
        Verdict::Valid
    } else {
        Verdict::NotValid
    }
}

/// Number of agreeing instances, or the first disagreement.
pub fn farkas_suite(count: usize, seed: u64) -> Result<usize, String> {
    let (b, _) = zr2();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut valid = 0;
    for i in 0..count {
        let c = farkas_case(&mut rng, &b);
        let oracle = farkas_oracle(&c);
        let got = match farkas_rational(&c.l, &c.u0, &c.a0) {
            Ok(cert) => {
                if !cert.verify(&c.l, &c.u0, &c.a0) {
                    return Err(format!("instance {i}: certificate fails substitution: {c:?}"));
                }
                if !cert.is_rational() {
                    return Err(format!("instance {i}: irrational multiplier"));
                }
                valid += 1;
                Verdict::Valid
            }
            Err(Error::NotValid { .. }) => Verdict::NotValid,
            Err(Error::EmptyPolyhedron) => Verdict::Empty,
            Err(e) => return Err(format!("instance {i}: {e}")),
        };
        if got != oracle {
            return Err(format!("instance {i}: library {got:?}, oracle {oracle:?}: {c:?}"));
        }
    }
    Ok(valid)
}

/// δ ≪ a and |θ| ≪ a imply δ ≪ a + θ, over the basis (w1, w2) with w2 ≫ w1 ≫ 1.
pub fn infinitesimal_sums(count: usize, seed: u64) -> Result<(), String> {
    let b = SymbolBasis::lexicographic(&["w1", "w2"]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let level = rng.gen_range(1..=2usize);
        let coeffs = |rng: &mut ChaCha8Rng, top: usize, lead_pos: bool| -> Scalar {
            let mut c: Vec<Rat> = (0..=top).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
            if lead_pos {
                c[top] = rat(rng.gen_range(1..=9), rng.gen_range(1..=4));
            }
            let mut sym = vec![Rat::zero(); 2];
            for (k, q) in c.iter().enumerate().skip(1) {
                sym[k - 1] = q.clone();
            }
            Scalar::from_parts(Some(b.clone()), c[0].clone(), sym)
        };
        let a = coeffs(&mut rng, level, true);
        let lower = rng.gen_range(0..level);
        let delta = coeffs(&mut rng, lower, true);
        let tl = rng.gen_range(0..level);
        let theta = coeffs(&mut rng, tl, false);
        let hyp = is_infinitesimal(&delta, &a).map_err(|e| e.to_string())? && is_infinitesimal(&theta.abs(), &a).map_err(|e| e.to_string())?;
        if !hyp {
            return Err(format!("triple {i}: generator broke the hypotheses"));
        }
        let sum = &a + &theta;
        let concl = sum.is_positive() && is_infinitesimal(&delta, &sum).map_err(|e| e.to_string())?;
        // q·δ < a + θ for a range of rational q
        let sampled = [1i64, 10, 1_000_000, 1_000_000_000_000].iter().all(|&q| delta.mul_rat(&int(q)).lt(&sum));
        if !concl || !sampled {
            return Err(format!("triple {i}: a = {a}, delta = {delta}, theta = {theta}"));
        }
    }
    Ok(())
}

/// Triangles over (ω) with a horizontal base y = c and x = (θ, c) on it, θ ≪ ω.
pub fn slope_zero_edges(count: usize, seed: u64) -> Result<(), String> {
    let b = SymbolBasis::lexicographic(&["omega"]);
    let w = b.symbol(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let c = Scalar::rational(rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)));
        // edges must have rational directions, so every vertex shares the offset s
        let s = Scalar::rational(rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
        let (a, bb) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let e = rng.gen_range(1 - a..=bb - 1);
        let left = &s + &w.mul_rat(&int(-a));
        let right = &s + &w.mul_rat(&int(bb));
        let apex = vec![&s + &w.mul_rat(&int(e)), &c + &w.mul_rat(&int(rng.gen_range(1..=4)))];
        let p = Polyhedron::from_vertices(&[vec![left, c.clone()], vec![right, c.clone()], apex], &[]).map_err(|e| e.to_string())?;
        let theta = Scalar::rational(rat(rng.gen_range(-50..=50), rng.gen_range(1..=7)));
        let e = boundary_edge_through(&p, &[theta.clone(), c.clone()]).map_err(|e| format!("instance {i}: {e}"))?;
        let dir = e.direction().ok_or_else(|| format!("instance {i}: edge without direction"))?;
        if !e.is_bounded() || slope(&dir) != Some(Scalar::zero()) {
            return Err(format!("instance {i}: edge {:?} through ({theta}, {c})", e.vertices()));
        }
    }
    Ok(())
}

/// One completion run: label, maximal cones in and out, seconds.
#[derive(Debug, Clone)]
pub struct CompletionRun {
    pub label: String,
    pub input: usize,
    pub output: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

fn complete_one(label: String, f: &Fan, g: &ValueGroup) -> CompletionRun {
    let t = std::time::Instant::now();
    let r = complete_admissible(f, g, &EngineConfig::default());
    let seconds = t.elapsed().as_secs_f64();
    let (output, error) = match r {
        Ok(c) => {
            let v = verify_completion(f, &c.fan);
            let adm = is_admissible_fan(&c.fan, g).map(|r| r.verdict).unwrap_or(false);
            (c.fan.maximal().len(), (!(v.ok && adm && c.admissible)).then(|| format!("verification failed: {:?}", v.witness)))
        }
        Err(e) => (0, Some(e.to_string())),
    };
    CompletionRun { label, input: f.maximal().len(), output, seconds, error }
}

/// Random 1D and 2D Γ-admissible fans, then the dart.
pub fn completion_suite(n1: usize, n2: usize, seed: u64) -> Vec<CompletionRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..n1 {
        let (f, g) = random_1d(&mut rng).unwrap();
        out.push(complete_one(format!("1d-{i}"), &f, &g));
    }
    for i in 0..n2 {
        let (f, g) = random_2d(&mut rng).unwrap();
        out.push(complete_one(format!("2d-{i}"), &f, &g));
    }
    let d = gammafan::fixtures::dart().unwrap();
    out.push(complete_one("dart".into(), &d.fan, &d.gamma));
    out
}
