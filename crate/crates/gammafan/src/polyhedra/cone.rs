//! Cones in R^d whose last coordinate plays the role of the height t.
//!
//! A functional is (u, c) with u rational and c a scalar, acting on (w, t) as
//! <u,w> + c*t. Points carry scalar w and rational t, so every evaluation is a
//! rational-times-scalar product. Fully rational cones are the special case
//! where both c and all coordinates are rational.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::scalar::{Rat, Scalar, SymbolBasis};

pub type Point = Vec<Scalar>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomFunctional {
    pub u: Vec<Rat>,
    pub c: Scalar,
}

impl HomFunctional {
    pub fn new(u: Vec<Rat>, c: Scalar) -> Self {
        HomFunctional { u, c }
    }

    /// From a rational vector of length d; the last entry is the height coefficient.
    pub fn from_rats(v: &[Rat]) -> Self {
        let n = v.len() - 1;
        HomFunctional { u: v[..n].to_vec(), c: Scalar::rational(v[n].clone()) }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        let r: Vec<Rat> = v.iter().map(|&x| Rat::from_integer(x.into())).collect();
        Self::from_rats(&r)
    }

    pub fn dim(&self) -> usize {
        self.u.len() + 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.u.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.c.is_rational()
    }

    pub fn to_rats(&self) -> Option<Vec<Rat>> {
        let mut v = self.u.clone();
        v.push(self.c.to_rat()?);
        Some(v)
    }

    pub fn try_eval(&self, x: &[Scalar]) -> Result<Scalar> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        let n = self.u.len();
        let mut acc = self.c.checked_mul(&x[n])?;
        for (ui, xi) in self.u.iter().zip(x) {
            if !ui.is_zero() && !xi.is_zero() {
                acc = acc.checked_add(&xi.mul_rat(ui))?;
            }
        }
        Ok(acc)
    }

    /// Evaluate; panics if a symbolic coefficient meets a symbolic height.
    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        self.try_eval(x).expect("functional evaluation")
    }

    pub fn eval_rat(&self, x: &[Rat]) -> Scalar {
        let n = self.u.len();
        let mut acc = self.c.mul_rat(&x[n]);
        for (ui, xi) in self.u.iter().zip(x) {
            acc += &Scalar::rational(ui * xi);
        }
        acc
    }

    pub fn neg(&self) -> Self {
        HomFunctional { u: self.u.iter().map(|x| -x).collect(), c: -&self.c }
    }

    pub fn scale(&self, q: &Rat) -> Self {
        HomFunctional { u: self.u.iter().map(|x| x * q).collect(), c: self.c.mul_rat(q) }
    }

    pub fn add(&self, o: &HomFunctional) -> Self {
        HomFunctional {
            u: self.u.iter().zip(&o.u).map(|(a, b)| a + b).collect(),
            c: &self.c + &o.c,
        }
    }

    /// Positive rescaling to coprime integer coordinates (u and every coordinate of c).
    pub fn normalized(&self) -> Self {
        let m = self.c.basis().map(|b| b.len()).unwrap_or(0);
        let mut all: Vec<Rat> = self.u.clone();
        all.extend(self.c.coords(m));
        if all.iter().all(|x| x.is_zero()) {
            return self.clone();
        }
        let l = all.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let g = all
            .iter()
            .filter(|x| !x.is_zero())
            .fold(BigInt::zero(), |a, x| a.gcd(&(x * Rat::from_integer(l.clone())).to_integer()));
        self.scale(&Rat::new(l, g))
    }
}

impl fmt::Debug for HomFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u: Vec<String> = self.u.iter().map(|x| x.to_string()).collect();
        write!(f, "<({}), {}>", u.join(", "), self.c)
    }
}

/// Fixed-size bit set over constraint indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    pub(crate) fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    pub(crate) fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    pub(crate) fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    pub(crate) fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    pub(crate) fn count(&self) -> usize {
        self.0.iter().map(|x| x.count_ones() as usize).sum()
    }
    pub(crate) fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(move |&i| self.get(i))
    }
}

pub fn rat_point(v: &[Rat]) -> Point {
    v.iter().cloned().map(Scalar::rational).collect()
}

pub fn int_point(v: &[i64]) -> Point {
    v.iter().map(|&x| Scalar::from_int(x)).collect()
}

pub fn point_to_rats(p: &[Scalar]) -> Option<Vec<Rat>> {
    p.iter().map(|x| x.to_rat()).collect()
}

pub fn neg_point(p: &[Scalar]) -> Point {
    p.iter().map(|x| -x).collect()
}

pub fn add_points(a: &[Scalar], b: &[Scalar]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_point(a: &[Scalar], q: &Rat) -> Point {
    a.iter().map(|x| x.mul_rat(q)).collect()
}

pub fn cmp_points(a: &[Scalar], b: &[Scalar]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.structural_cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Canonical positive scaling of a ray: primitive integer when rational,
/// otherwise |t| = 1.
pub fn canonical_ray(v: &[Scalar]) -> Point {
    if let Some(r) = point_to_rats(v) {
        if r.iter().all(|x| x.is_zero()) {
            return v.to_vec();
        }
        let p = linalg::primitive_rat(&r).expect("nonzero");
        return p.into_iter().map(|x| Scalar::rational(Rat::from_integer(x))).collect();
    }
    let t = v.last().and_then(|x| x.to_rat()).unwrap_or_else(Rat::zero);
    if !t.is_zero() {
        return scale_point(v, &t.abs().recip());
    }
    // Symbolic direction at height zero: scale by the first nonzero rational coordinate.
    for x in v {
        if !x.is_zero() {
            let m = x.basis().map(|b| b.len()).unwrap_or(0);
            let q = x.coords(m).into_iter().find(|q| !q.is_zero()).unwrap();
            return scale_point(v, &q.abs().recip());
        }
    }
    v.to_vec()
}

pub(crate) fn basis_of<'a, I: IntoIterator<Item = &'a Scalar>>(it: I) -> Option<Arc<SymbolBasis>> {
    it.into_iter().find_map(|s| s.basis().cloned())
}

fn solve_u(u: &[Vec<Rat>], b: &[Scalar], n: usize) -> Option<Vec<Scalar>> {
    if u.is_empty() || n == 0 {
        return if b.iter().all(|x| x.is_zero()) { Some(vec![Scalar::zero(); n]) } else { None };
    }
    linalg::solve(u, b).expect("consistent bases")
}

/// Real rank of a set of functionals. Uses the independence of the symbols:
/// appending the scalar column raises the rank iff U x = c is unsolvable.
pub fn func_rank(fs: &[&HomFunctional], d: usize) -> usize {
    if fs.is_empty() {
        return 0;
    }
    let n = d - 1;
    let u: Vec<Vec<Rat>> = fs.iter().map(|f| f.u.clone()).collect();
    let c: Vec<Scalar> = fs.iter().map(|f| f.c.clone()).collect();
    let r = if n == 0 { 0 } else { linalg::rank(&u) };
    if c.iter().all(|x| x.is_zero()) {
        return r;
    }
    r + usize::from(solve_u(&u, &c, n).is_none())
}

/// The solution line of {f = 0 : f in fs}, if it is exactly one-dimensional.
pub fn kernel_line(fs: &[&HomFunctional], d: usize) -> Option<Point> {
    let n = d - 1;
    let u: Vec<Vec<Rat>> = fs.iter().map(|f| f.u.clone()).collect();
    let c: Vec<Scalar> = fs.iter().map(|f| -&f.c).collect();
    let k = if fs.is_empty() { linalg::identity(n) } else { linalg::kernel(&u, n) };
    let s = solve_u(&u, &c, n);
    match (k.len(), s) {
        (1, None) => {
            let mut p = rat_point(&k[0]);
            p.push(Scalar::zero());
            Some(p)
        }
        (0, Some(mut s)) => {
            s.push(Scalar::one());
            Some(s)
        }
        _ => None,
    }
}

/// Lineality space {f = 0 for all f} with a canonical basis, plus the coordinate
/// equalities that cut out a complement.
fn lineality(fs: &[&HomFunctional], d: usize, basis: &Option<Arc<SymbolBasis>>) -> (Vec<Point>, Vec<HomFunctional>) {
    let n = d - 1;
    let u: Vec<Vec<Rat>> = fs.iter().map(|f| f.u.clone()).collect();
    let c: Vec<Scalar> = fs.iter().map(|f| -&f.c).collect();
    let pivots = if fs.is_empty() || n == 0 { Vec::new() } else { linalg::rref(&u).1 };
    let k = if fs.is_empty() { linalg::identity(n) } else { linalg::kernel(&u, n) };
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut lines = Vec::new();
    let mut w = Vec::new();
    for (v, &f) in k.iter().zip(&free) {
        let mut p = rat_point(v);
        p.push(Scalar::zero());
        lines.push(p);
        let mut e = vec![Rat::zero(); n];
        e[f] = Rat::one();
        w.push(HomFunctional::new(e, Scalar::zero()));
    }
    if let Some(mut s) = solve_u(&u, &c, n) {
        s.push(Scalar::one());
        lines.push(s);
        w.push(HomFunctional::new(vec![Rat::zero(); n], Scalar::one()));
    }
    let _ = basis;
    (lines, w)
}

/// Double description for a pointed cone {eqs = 0, ineqs >= 0}; returns extreme rays.
fn pointed_dd(d: usize, eqs: &[&HomFunctional], ineqs: &[&HomFunctional]) -> Result<Vec<Point>> {
    let re = func_rank(eqs, d);
    if re == d {
        return Ok(Vec::new());
    }
    let m = ineqs.len();
    let mut cur: Vec<&HomFunctional> = eqs.to_vec();
    let mut chosen = Vec::new();
    let mut r = re;
    for (i, h) in ineqs.iter().enumerate() {
        if r == d {
            break;
        }
        cur.push(h);
        let nr = func_rank(&cur, d);
        if nr > r {
            chosen.push(i);
            r = nr;
        } else {
            cur.pop();
        }
    }
    if r < d {
        return Err(Error::SemanticError("double description needs a pointed cone".into()));
    }
    let mut processed = vec![false; m];
    for &i in &chosen {
        processed[i] = true;
    }
    let tight = |v: &Point, processed: &[bool]| -> Bits {
        let mut z = Bits::new(m);
        for (j, h) in ineqs.iter().enumerate() {
            if processed[j] && h.eval(v).is_zero() {
                z.set(j);
            }
        }
        z
    };
    let mut rays: Vec<(Point, Bits)> = Vec::new();
    for &i in &chosen {
        let mut rows: Vec<&HomFunctional> = eqs.to_vec();
        rows.extend(chosen.iter().filter(|&&j| j != i).map(|&j| ineqs[j]));
        let mut v = kernel_line(&rows, d).expect("independent initial constraints");
        if ineqs[i].eval(&v).sign() < 0 {
            v = neg_point(&v);
        }
        let z = tight(&v, &processed);
        rays.push((v, z));
    }
    let need = (d - re).saturating_sub(2);
    for j in 0..m {
        if processed[j] {
            continue;
        }
        let h = ineqs[j];
        let vals: Vec<i32> = rays.iter().map(|(v, _)| h.eval(v).sign()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < 0).collect();
        if neg.is_empty() {
            processed[j] = true;
            for (k, (_, z)) in rays.iter_mut().enumerate() {
                if vals[k] == 0 {
                    z.set(j);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > 0).collect();
        let mut fresh: Vec<Point> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let z12 = rays[p].1.and(&rays[q].1);
                if z12.count() < need {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, (_, z))| k != p && k != q && z12.subset_of(z));
                if blocked {
                    continue;
                }
                let mut rows: Vec<&HomFunctional> = eqs.to_vec();
                rows.extend(z12.ones().filter(|&i| i < m).map(|i| ineqs[i]));
                rows.push(h);
                let Some(mut v) = kernel_line(&rows, d) else { continue };
                let g = rays[q].1.ones().find(|&i| i < m && !rays[p].1.get(i));
                let s = match g {
                    Some(g) => ineqs[g].eval(&v).sign(),
                    None => {
                        // fall back to any processed constraint that is nonzero on v
                        let mut s = 0;
                        for (i, hh) in ineqs.iter().enumerate() {
                            if processed[i] {
                                s = hh.eval(&v).sign();
                                if s != 0 {
                                    break;
                                }
                            }
                        }
                        s
                    }
                };
                if s < 0 {
                    v = neg_point(&v);
                }
                fresh.push(v);
            }
        }
        processed[j] = true;
        let mut next: Vec<(Point, Bits)> = Vec::new();
        for (k, (v, mut z)) in rays.into_iter().enumerate() {
            if vals[k] < 0 {
                continue;
            }
            if vals[k] == 0 {
                z.set(j);
            }
            next.push((v, z));
        }
        for v in fresh {
            let z = tight(&v, &processed);
            next.push((v, z));
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|(v, _)| canonical_ray(&v)).collect())
}

/// A cone given by both descriptions.
#[derive(Clone)]
pub struct Cone {
    d: usize,
    eqs: Vec<HomFunctional>,
    facets: Vec<HomFunctional>,
    rays: Vec<Point>,
    lines: Vec<Point>,
    ints: std::sync::OnceLock<Option<IntForm>>,
}

/// Rays and functionals as machine integers, for fast exact sign tests.
#[derive(Clone, Debug)]
struct IntForm {
    rays: Vec<Vec<i64>>,
    /// Facets, then each equation with both signs.
    sides: Vec<Vec<i64>>,
}

fn small_ints(v: &[Rat]) -> Option<Vec<i64>> {
    let l = v.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer().to_i64().filter(|n| n.abs() < (1 << 60))).collect()
}

fn sign_i(h: &[i64], r: &[i64]) -> i32 {
    let s: i128 = h.iter().zip(r).map(|(a, b)| *a as i128 * *b as i128).sum();
    s.signum() as i32
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cone(d={}, dim={}, rays={:?}", self.d, self.dim(), self.rays)?;
        if !self.lines.is_empty() {
            write!(f, ", lines={:?}", self.lines)?;
        }
        write!(f, ")")
    }
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.rays == other.rays && self.lines == other.lines
    }
}

impl Eq for Cone {}

impl std::hash::Hash for Cone {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.d.hash(state);
        self.rays.hash(state);
        self.lines.hash(state);
    }
}

impl Cone {
    /// The cone {eqs = 0, ineqs >= 0} in R^d.
    pub fn from_h(d: usize, eqs: Vec<HomFunctional>, ineqs: Vec<HomFunctional>) -> Result<Cone> {
        if d == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for f in eqs.iter().chain(&ineqs) {
            if f.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: f.dim() });
            }
        }
        let basis = basis_of(eqs.iter().chain(&ineqs).map(|f| &f.c));
        let all: Vec<&HomFunctional> = eqs.iter().chain(&ineqs).collect();
        let (lines, w) = lineality(&all, d, &basis);
        let mut e: Vec<&HomFunctional> = eqs.iter().collect();
        e.extend(w.iter());
        let hs: Vec<&HomFunctional> = ineqs.iter().collect();
        let rays = pointed_dd(d, &e, &hs)?;
        Ok(Self::assemble(d, eqs, ineqs, rays, lines))
    }

    /// Build from an H-description and its known extreme rays and lineality basis.
    pub fn from_h_and_rays(
        d: usize,
        eqs: Vec<HomFunctional>,
        ineqs: Vec<HomFunctional>,
        rays: Vec<Point>,
        lines: Vec<Point>,
    ) -> Cone {
        Self::assemble(d, eqs, ineqs, rays.iter().map(|r| canonical_ray(r)).collect(), lines)
    }

    fn assemble(d: usize, eqs: Vec<HomFunctional>, ineqs: Vec<HomFunctional>, mut rays: Vec<Point>, lines: Vec<Point>) -> Cone {
        rays.sort_by(|a, b| cmp_points(a, b));
        rays.dedup();
        let mut pool: Vec<HomFunctional> = eqs;
        let mut rem: Vec<HomFunctional> = Vec::new();
        for h in ineqs {
            if h.is_zero() {
                continue;
            }
            if rays.iter().all(|r| h.eval(r).is_zero()) {
                pool.push(h);
            } else {
                rem.push(h);
            }
        }
        let mut eqb: Vec<HomFunctional> = Vec::new();
        let mut rk = 0;
        for f in pool {
            let mut refs: Vec<&HomFunctional> = eqb.iter().collect();
            refs.push(&f);
            let nr = func_rank(&refs, d);
            if nr > rk {
                rk = nr;
                eqb.push(f.normalized());
            }
        }
        let dim = d - rk;
        let tight: Vec<Bits> = rem
            .iter()
            .map(|h| {
                let mut b = Bits::new(rays.len());
                for (k, r) in rays.iter().enumerate() {
                    if h.eval(r).is_zero() {
                        b.set(k);
                    }
                }
                b
            })
            .collect();
        let mut seen: HashSet<Bits> = HashSet::new();
        let mut facets = Vec::new();
        for (i, h) in rem.iter().enumerate() {
            if seen.contains(&tight[i]) {
                continue;
            }
            let mut refs: Vec<&HomFunctional> = eqb.iter().collect();
            for (j, g) in rem.iter().enumerate() {
                if tight[i].subset_of(&tight[j]) {
                    refs.push(g);
                }
            }
            let fdim = d - func_rank(&refs, d);
            if fdim + 1 == dim {
                seen.insert(tight[i].clone());
                facets.push(h.normalized());
            }
        }
        Cone { d, eqs: eqb, facets, rays, lines, ints: Default::default() }
    }

    /// The cone generated by rays and lines.
    pub fn from_rays(d: usize, rays: Vec<Point>, lines: Vec<Point>) -> Result<Cone> {
        for p in rays.iter().chain(&lines) {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.len() });
            }
        }
        let rational = rays.iter().chain(&lines).all(|p| point_to_rats(p).is_some());
        if rational {
            let dual_in: Vec<HomFunctional> =
                rays.iter().map(|p| HomFunctional::from_rats(&point_to_rats(p).unwrap())).collect();
            let dual_eq: Vec<HomFunctional> =
                lines.iter().map(|p| HomFunctional::from_rats(&point_to_rats(p).unwrap())).collect();
            let dual = Cone::from_h(d, dual_eq, dual_in)?;
            let eqs = dual.lines.iter().map(|p| HomFunctional::from_rats(&point_to_rats(p).unwrap())).collect();
            let ineqs = dual.rays.iter().map(|p| HomFunctional::from_rats(&point_to_rats(p).unwrap())).collect();
            return Cone::from_h(d, eqs, ineqs);
        }
        Self::from_rays_symbolic(d, rays, lines)
    }

    fn from_rays_symbolic(d: usize, rays: Vec<Point>, lines: Vec<Point>) -> Result<Cone> {
        for p in rays.iter().chain(&lines) {
            if p[d - 1].to_rat().is_none() {
                return Err(Error::SemanticError("generator with symbolic height".into()));
            }
        }
        let basis = basis_of(rays.iter().chain(&lines).flatten());
        let all: Vec<&Point> = rays.iter().chain(&lines).collect();
        let eq_all = vanishing(&all, d, &basis);
        let mut eqs: Vec<HomFunctional> = Vec::new();
        let mut rk = 0;
        for f in eq_all {
            let mut refs: Vec<&HomFunctional> = eqs.iter().collect();
            refs.push(&f);
            let nr = func_rank(&refs, d);
            if nr > rk {
                rk = nr;
                eqs.push(f);
            }
        }
        let dim = d - rk;
        let nl = lines.len();
        let mut facets: Vec<HomFunctional> = Vec::new();
        if dim > nl {
            let k = dim - 1 - nl.min(dim - 1);
            let idx: Vec<usize> = (0..rays.len()).collect();
            for sub in combinations(&idx, k) {
                let mut pts: Vec<&Point> = sub.iter().map(|&i| &rays[i]).collect();
                pts.extend(lines.iter());
                let vs = vanishing(&pts, d, &basis);
                let mut refs: Vec<&HomFunctional> = eqs.iter().collect();
                refs.extend(vs.iter());
                if func_rank(&refs, d) != rk + 1 {
                    continue;
                }
                for v in &vs {
                    let mut r2: Vec<&HomFunctional> = eqs.iter().collect();
                    r2.push(v);
                    if func_rank(&r2, d) == rk {
                        continue;
                    }
                    let signs: Vec<i32> = rays.iter().map(|r| v.eval(r).sign()).collect();
                    let f = if signs.iter().all(|&s| s >= 0) {
                        v.clone()
                    } else if signs.iter().all(|&s| s <= 0) {
                        v.neg()
                    } else {
                        break;
                    };
                    facets.push(f);
                    break;
                }
            }
        }
        Cone::from_h(d, eqs, facets)
    }

    fn int_form(&self) -> Option<&IntForm> {
        self.ints
            .get_or_init(|| {
                let rays = self.rays.iter().map(|r| point_to_rats(r).and_then(|v| small_ints(&v))).collect::<Option<Vec<_>>>()?;
                let mut sides = Vec::new();
                for h in &self.facets {
                    sides.push(small_ints(&h.to_rats()?)?);
                }
                for h in &self.eqs {
                    let v = small_ints(&h.to_rats()?)?;
                    sides.push(v.iter().map(|x| -x).collect());
                    sides.push(v);
                }
                Some(IntForm { rays, sides })
            })
            .as_ref()
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d - self.eqs.len()
    }

    pub fn eqs(&self) -> &[HomFunctional] {
        &self.eqs
    }

    pub fn facets(&self) -> &[HomFunctional] {
        &self.facets
    }

    pub fn rays(&self) -> &[Point] {
        &self.rays
    }

    pub fn lines(&self) -> &[Point] {
        &self.lines
    }

    pub fn is_pointed(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn is_full_dim(&self) -> bool {
        self.eqs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.eqs.iter().chain(&self.facets).all(|f| f.is_rational())
    }

    pub fn zero(d: usize) -> Cone {
        let eqs = (0..d)
            .map(|i| {
                let mut v = vec![Rat::zero(); d];
                v[i] = Rat::one();
                HomFunctional::from_rats(&v)
            })
            .collect();
        Cone { d, eqs, facets: Vec::new(), rays: Vec::new(), lines: Vec::new(), ints: Default::default() }
    }

    /// All functionals describing the cone, equalities first.
    pub fn hrep(&self) -> (Vec<HomFunctional>, Vec<HomFunctional>) {
        (self.eqs.clone(), self.facets.clone())
    }

    /// Signs of the facets at x (integer fast path when possible), then whether the equations vanish.
    fn signs_at(&self, x: &[Scalar]) -> (Vec<i32>, bool) {
        if let (Some(f), Some(p)) = (self.int_form(), point_to_rats(x).and_then(|v| small_ints(&v))) {
            let nf = self.facets.len();
            let signs = f.sides[..nf].iter().map(|h| sign_i(h, &p)).collect();
            return (signs, f.sides[nf..].iter().all(|h| sign_i(h, &p) == 0));
        }
        (self.facets.iter().map(|f| f.eval(x).sign()).collect(), self.eqs.iter().all(|f| f.eval(x).is_zero()))
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        let (s, eq) = self.signs_at(x);
        eq && s.iter().all(|&v| v >= 0)
    }

    /// x in the relative interior.
    pub fn contains_relint(&self, x: &[Scalar]) -> bool {
        let (s, eq) = self.signs_at(x);
        eq && s.iter().all(|&v| v > 0)
    }

    pub fn contains_cone(&self, o: &Cone) -> bool {
        o.rays.iter().all(|r| self.contains(r)) && o.lines.iter().all(|l| self.contains(l) && self.contains(&neg_point(l)))
    }

    pub fn intersect(&self, o: &Cone) -> Result<Cone> {
        if self.d != o.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: o.d });
        }
        let eqs = self.eqs.iter().chain(&o.eqs).cloned().collect();
        let ineqs = self.facets.iter().chain(&o.facets).cloned().collect();
        Cone::from_h(self.d, eqs, ineqs)
    }

    /// Intersect with extra equalities and inequalities.
    pub fn cut(&self, eqs: &[HomFunctional], ineqs: &[HomFunctional]) -> Result<Cone> {
        let e = self.eqs.iter().chain(eqs).cloned().collect();
        let i = self.facets.iter().chain(ineqs).cloned().collect();
        Cone::from_h(self.d, e, i)
    }

    /// Sum of the extreme rays, a point in the relative interior of the pointed part.
    pub fn interior_point(&self) -> Point {
        let mut p = vec![Scalar::zero(); self.d];
        for r in &self.rays {
            p = add_points(&p, r);
        }
        p
    }

    fn tight_rays(&self, f: &HomFunctional) -> Vec<usize> {
        (0..self.rays.len()).filter(|&k| f.eval(&self.rays[k]).is_zero()).collect()
    }

    /// The face cut out by the given facets (as indices).
    pub fn face_by_facets(&self, idx: &[usize]) -> Cone {
        let mut eqs = self.eqs.clone();
        let mut ineqs = Vec::new();
        for (i, f) in self.facets.iter().enumerate() {
            if idx.contains(&i) {
                eqs.push(f.clone());
            } else {
                ineqs.push(f.clone());
            }
        }
        let rays = self
            .rays
            .iter()
            .filter(|r| idx.iter().all(|&i| self.facets[i].eval(r).is_zero()))
            .cloned()
            .collect();
        Cone::assemble(self.d, eqs, ineqs, rays, self.lines.clone())
    }

    /// All faces, including the cone itself and the minimal face.
    pub fn faces(&self) -> Vec<Cone> {
        let nf = self.facets.len();
        let tight: Vec<Vec<usize>> = self.facets.iter().map(|f| self.tight_rays(f)).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let all: Vec<usize> = (0..self.rays.len()).collect();
        let mut queue = vec![all.clone()];
        seen.insert(all);
        let mut out = Vec::new();
        while let Some(s) = queue.pop() {
            let idx: Vec<usize> = (0..nf).filter(|&j| s.iter().all(|k| tight[j].contains(k))).collect();
            out.push(self.face_by_facets(&idx));
            for j in 0..nf {
                if idx.contains(&j) {
                    continue;
                }
                let t: Vec<usize> = s.iter().filter(|k| tight[j].contains(k)).cloned().collect();
                if seen.insert(t.clone()) {
                    queue.push(t);
                }
            }
        }
        out.sort_by_key(|c| std::cmp::Reverse(c.dim()));
        out
    }

    /// Faces of codimension one.
    pub fn facet_cones(&self) -> Vec<Cone> {
        (0..self.facets.len()).map(|i| self.face_by_facets(&[i])).collect()
    }

    /// f is a face of self: f is contained and equals the smallest face containing it.
    pub fn has_face(&self, f: &Cone) -> bool {
        if f.d != self.d || !self.contains_cone(f) {
            return false;
        }
        let on = |h: &HomFunctional| {
            f.rays.iter().all(|r| h.eval(r).is_zero()) && f.lines.iter().all(|l| h.eval(l).is_zero())
        };
        let idx: Vec<usize> = (0..self.facets.len()).filter(|&i| on(&self.facets[i])).collect();
        let closure_ok = self
            .rays
            .iter()
            .filter(|r| idx.iter().all(|&i| self.facets[i].eval(r).is_zero()))
            .all(|r| f.contains(r));
        closure_ok && self.lines.iter().all(|l| f.contains(l) && f.contains(&neg_point(l)))
    }

    pub fn is_face_of(&self, c: &Cone) -> bool {
        c.has_face(self)
    }

    /// Is (h = 0) a supporting hyperplane? Returns the facet indices vanishing on f.
    pub fn supporting_facets(&self, f: &Cone) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| f.rays.iter().all(|r| self.facets[i].eval(r).is_zero()))
            .collect()
    }

    pub fn linear_span_eqs(&self) -> Vec<HomFunctional> {
        self.eqs.clone()
    }
}

/// The intersection is a face of both.
pub fn common_face_test(a: &Cone, b: &Cone) -> Result<bool> {
    if peel_common_face(a, b) {
        return Ok(true);
    }
    if separated_along_shared(a, b) {
        return Ok(true);
    }
    let i = a.intersect(b)?;
    Ok(a.has_face(&i) && b.has_face(&i))
}

/// Exact peeling without LPs. Keep ray sets A of `a` and B of `b` with
/// a ∩ b ⊆ cone(A) ∩ cone(B); any facet of `a` (or negated facet of `b`) that is
/// >= 0 on A and <= 0 on B cuts both down to its zero set. Ending with A = B means
/// a ∩ b = cone(A), a face of both.
fn peel_common_face(a: &Cone, b: &Cone) -> bool {
    if !a.lines.is_empty() || !b.lines.is_empty() || a.d != b.d {
        return false;
    }
    let side = |c: &Cone, s: bool| -> Vec<HomFunctional> {
        let mut out: Vec<HomFunctional> = c.facets.clone();
        out.extend(c.eqs.iter().flat_map(|h| [h.clone(), h.neg()]));
        if s {
            out
        } else {
            out.iter().map(|h| h.neg()).collect()
        }
    };
    let cands: Vec<HomFunctional> = side(a, true).into_iter().chain(side(b, false)).collect();
    let (sa, sb): (Vec<Vec<Option<i32>>>, Vec<Vec<Option<i32>>>) = match (a.int_form(), b.int_form()) {
        (Some(ia), Some(ib)) => {
            let hs: Vec<Vec<i64>> =
                ia.sides.iter().cloned().chain(ib.sides.iter().map(|h| h.iter().map(|x| -x).collect())).collect();
            (
                hs.iter().map(|h| ia.rays.iter().map(|r| Some(sign_i(h, r))).collect()).collect(),
                hs.iter().map(|h| ib.rays.iter().map(|r| Some(sign_i(h, r))).collect()).collect(),
            )
        }
        _ => {
            let sign_at = |h: &HomFunctional, r: &Point| h.try_eval(r).ok().and_then(|v| v.try_sign().ok());
            (
                cands.iter().map(|h| a.rays.iter().map(|r| sign_at(h, r)).collect()).collect(),
                cands.iter().map(|h| b.rays.iter().map(|r| sign_at(h, r)).collect()).collect(),
            )
        }
    };
    let mut ka: Vec<bool> = vec![true; a.rays.len()];
    let mut kb: Vec<bool> = vec![true; b.rays.len()];
    let same = |ka: &[bool], kb: &[bool]| {
        let la: Vec<&Point> = a.rays.iter().zip(ka).filter(|(_, k)| **k).map(|(r, _)| r).collect();
        let lb: Vec<&Point> = b.rays.iter().zip(kb).filter(|(_, k)| **k).map(|(r, _)| r).collect();
        la.len() == lb.len() && la.iter().all(|r| lb.contains(r))
    };
    loop {
        if same(&ka, &kb) {
            return true;
        }
        let mut progressed = false;
        for c in 0..cands.len() {
            let ok_a = sa[c].iter().zip(&ka).all(|(s, k)| !*k || matches!(s, Some(x) if *x >= 0));
            let ok_b = sb[c].iter().zip(&kb).all(|(s, k)| !*k || matches!(s, Some(x) if *x <= 0));
            if !ok_a || !ok_b {
                continue;
            }
            for (k, s) in ka.iter_mut().zip(&sa[c]) {
                if *k && *s != Some(0) {
                    *k = false;
                    progressed = true;
                }
            }
            for (k, s) in kb.iter_mut().zip(&sb[c]) {
                if *k && *s != Some(0) {
                    *k = false;
                    progressed = true;
                }
            }
        }
        if !progressed {
            return false;
        }
    }
}

/// For linearly independent rays `ra`: h = 0 on the shared rays and h = s on the others
/// of `ra`; accept if -s·h > 0 on the other rays of `rb`.
fn simplicial_guess(ra: &[Vec<Rat>], rb: &[Vec<Rat>], s: i64) -> bool {
    let d = ra.first().map(|r| r.len()).unwrap_or(0);
    if ra.len() > d || linalg::rank(ra) < ra.len() {
        return false;
    }
    let rhs: Vec<Rat> = ra.iter().map(|r| if rb.contains(r) { Rat::zero() } else { Rat::from_integer(s.into()) }).collect();
    let Some(h) = linalg::solve_rat(ra, &rhs) else { return false };
    rb.iter().filter(|r| !ra.contains(r)).all(|r| {
        let v: Rat = h.iter().zip(r.iter()).map(|(x, y)| x * y).sum();
        if s > 0 {
            v.is_negative()
        } else {
            v.is_positive()
        }
    })
}

/// Exact LP for rational pointed cones: some h vanishes on the shared rays, is >= 1 on
/// the other rays of `a` and <= -1 on the other rays of `b`. Then a ∩ b is the cone
/// over the shared rays.
fn separated_along_shared(a: &Cone, b: &Cone) -> bool {
    if !a.lines.is_empty() || !b.lines.is_empty() {
        return false;
    }
    let (Some(ra), Some(rb)) = (
        a.rays.iter().map(|r| point_to_rats(r)).collect::<Option<Vec<_>>>(),
        b.rays.iter().map(|r| point_to_rats(r)).collect::<Option<Vec<_>>>(),
    ) else {
        return false;
    };
    if simplicial_guess(&ra, &rb, 1) || simplicial_guess(&rb, &ra, -1) {
        return true;
    }
    let shared: Vec<Vec<Rat>> = ra.iter().filter(|r| rb.contains(r)).cloned().collect();
    for (c, s) in [(a, Rat::one()), (b, -Rat::one())] {
        let Some(fs) = c.facets.iter().map(|h| h.to_rats()).collect::<Option<Vec<_>>>() else { continue };
        let mut h = vec![Rat::zero(); a.d];
        for f in fs.iter().filter(|f| shared.iter().all(|r| crate::scalar::dot_rr(f, r).is_zero())) {
            for k in 0..a.d {
                h[k] += &f[k] * &s;
            }
        }
        if splits(&h, &ra, &rb) {
            return true;
        }
    }
    // h = K z with K spanning the functionals that vanish on the shared rays.
    let k = linalg::kernel(&shared, a.d);
    if k.is_empty() {
        return false;
    }
    let proj = |r: &Vec<Rat>| -> Vec<Rat> { k.iter().map(|kv| crate::scalar::dot_rr(kv, r)).collect() };
    let mut lp = Lp::new(k.len(), true);
    for r in ra.iter().filter(|r| !rb.contains(r)) {
        lp.add(proj(r), Cmp::Ge, Scalar::one());
    }
    for r in rb.iter().filter(|r| !ra.contains(r)) {
        lp.add(proj(r), Cmp::Le, -Scalar::one());
    }
    !matches!(lp.solve(), LpOutcome::Infeasible)
}

/// h >= 0 on `ra` and <= 0 on `rb`, vanishing exactly on the shared rays.
fn splits(h: &[Rat], ra: &[Vec<Rat>], rb: &[Vec<Rat>]) -> bool {
    ra.iter().all(|r| {
        let v = crate::scalar::dot_rr(h, r);
        if rb.contains(r) {
            v.is_zero()
        } else {
            v.is_positive()
        }
    }) && rb.iter().filter(|r| !ra.contains(r)).all(|r| crate::scalar::dot_rr(h, r).is_negative())
}

pub fn is_face(f: &Cone, c: &Cone) -> bool {
    c.has_face(f)
}

pub fn intersect(a: &Cone, b: &Cone) -> Result<Cone> {
    a.intersect(b)
}

/// All functionals (u rational, c scalar) vanishing on the points, as a rational
/// kernel over the coordinates of u and of c.
fn vanishing(pts: &[&Point], d: usize, basis: &Option<Arc<SymbolBasis>>) -> Vec<HomFunctional> {
    let n = d - 1;
    let m = basis.as_ref().map(|b| b.len()).unwrap_or(0);
    let cols = n + m + 1;
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for p in pts {
        let t = p[n].to_rat().expect("rational height");
        for s in 0..=m {
            let mut row = vec![Rat::zero(); cols];
            for j in 0..n {
                row[j] = p[j].coord(s);
            }
            row[n + s] = t.clone();
            rows.push(row);
        }
    }
    let k = if rows.is_empty() { linalg::identity(cols) } else { linalg::kernel(&rows, cols) };
    k.into_iter()
        .map(|z| {
            let c = Scalar::from_parts(basis.clone(), z[n].clone(), z[n + 1..].to_vec());
            HomFunctional::new(z[..n].to_vec(), c)
        })
        .collect()
}

pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn hf(v: &[i64]) -> HomFunctional {
        HomFunctional::from_ints(v)
    }

    #[test]
    fn quadrant_rays() {
        let c = Cone::from_h(2, vec![], vec![hf(&[1, 0]), hf(&[0, 1])]).unwrap();
        assert_eq!(c.rays(), &[int_point(&[0, 1]), int_point(&[1, 0])]);
        assert!(c.is_pointed());
        assert_eq!(c.facets().len(), 2);
        assert_eq!(c.faces().len(), 4);
    }

    #[test]
    fn halfplane_lineality() {
        let c = Cone::from_h(2, vec![], vec![hf(&[1, 0]), hf(&[-1, 0])]).unwrap();
        assert!(!c.is_pointed());
        assert_eq!(c.dim(), 1);
        assert_eq!(c.lines(), &[int_point(&[0, 1])]);
        let h = Cone::from_h(3, vec![], vec![hf(&[1, 0, 0])]).unwrap();
        assert_eq!(h.dim(), 3);
        assert_eq!(h.lines().len(), 2);
        assert_eq!(h.rays(), &[int_point(&[1, 0, 0])]);
    }

    #[test]
    fn intersect_with_lower_half() {
        let q = Cone::from_h(2, vec![], vec![hf(&[1, 0]), hf(&[0, 1])]).unwrap();
        let h = Cone::from_h(2, vec![], vec![hf(&[0, -1])]).unwrap();
        let i = q.intersect(&h).unwrap();
        assert_eq!(i.rays(), &[int_point(&[1, 0])]);
        assert_eq!(q.intersect(&q).unwrap(), q);
    }

    #[test]
    fn faces_of_quadrant() {
        let q = Cone::from_h(2, vec![], vec![hf(&[1, 0]), hf(&[0, 1])]).unwrap();
        let e1 = Cone::from_rays(2, vec![int_point(&[1, 0])], vec![]).unwrap();
        let diag = Cone::from_rays(2, vec![int_point(&[1, 1])], vec![]).unwrap();
        assert!(is_face(&e1, &q));
        assert!(!is_face(&diag, &q));
        assert!(is_face(&Cone::zero(2), &q));
        let half = Cone::from_h(2, vec![], vec![hf(&[1, 0])]).unwrap();
        assert!(!is_face(&Cone::zero(2), &half));
    }

    #[test]
    fn common_faces() {
        let q1 = Cone::from_h(2, vec![], vec![hf(&[1, 0]), hf(&[0, 1])]).unwrap();
        let q2 = Cone::from_h(2, vec![], vec![hf(&[-1, 0]), hf(&[0, 1])]).unwrap();
        let over = Cone::from_rays(2, vec![int_point(&[1, 1]), int_point(&[-1, 1])], vec![]).unwrap();
        assert!(common_face_test(&q1, &q2).unwrap());
        assert!(!common_face_test(&q1, &over).unwrap());
    }

    #[test]
    fn symbolic_segment_cone() {
        let b = SymbolBasis::sqrts(&["b"], &[2]);
        let beta = b.symbol(0);
        // {x = 0, -3 beta t <= y <= 0, t >= 0} in R^3
        let eqs = vec![hf(&[1, 0, 0])];
        let ineqs = vec![
            HomFunctional::new(vec![int(0), int(1)], beta.mul_rat(&int(3))),
            hf(&[0, -1, 0]),
            hf(&[0, 0, 1]),
        ];
        let c = Cone::from_h(3, eqs, ineqs).unwrap();
        let m3b = -(beta.mul_rat(&int(3)));
        let mut want = vec![
            vec![Scalar::zero(), Scalar::zero(), Scalar::one()],
            vec![Scalar::zero(), m3b, Scalar::one()],
        ];
        want.sort_by(|a, b| cmp_points(a, b));
        assert_eq!(c.rays(), &want[..]);
        assert_eq!(c.dim(), 2);
        let back = Cone::from_rays(3, want.clone(), vec![]).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn round_trip_rational() {
        let c = Cone::from_rays(3, vec![int_point(&[1, 0, 1]), int_point(&[0, 1, 1]), int_point(&[-1, -1, 1]), int_point(&[0, 0, 1])], vec![]).unwrap();
        assert_eq!(c.rays().len(), 3);
        let again = Cone::from_h(3, c.eqs().to_vec(), c.facets().to_vec()).unwrap();
        assert_eq!(again, c);
    }
}
