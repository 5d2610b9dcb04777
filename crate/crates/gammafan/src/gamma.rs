//! Value groups and the predicates indexed by them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyhedra::cone::{point_to_rats, Cone, HomFunctional, Point};
use crate::polyhedra::fan::Fan;
use crate::scalar::{Rat, Scalar, SymbolBasis};

/// A finitely generated Γ given by a Z-basis.
#[derive(Clone)]
pub struct ValueGroup {
    basis: Vec<Scalar>,
    sym: Option<Arc<SymbolBasis>>,
}

impl fmt::Debug for ValueGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.basis.iter().map(|s| s.to_text()).collect();
        write!(f, "Γ<{}>", v.join(", "))
    }
}

impl PartialEq for ValueGroup {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl ValueGroup {
    pub fn new(basis: Vec<Scalar>) -> Result<ValueGroup> {
        if basis.is_empty() || basis.iter().all(|g| g.is_zero()) {
            return Err(Error::TrivialGamma);
        }
        let sym = basis.iter().find_map(|g| g.basis().cloned());
        let vg = ValueGroup { basis, sym };
        let m = vg.width(&Scalar::zero());
        let cols: Vec<Vec<Rat>> = vg.basis.iter().map(|g| g.coords(m)).collect();
        if linalg::rank(&cols) != vg.basis.len() {
            return Err(Error::SemanticError("value group basis is not Q-linearly independent".into()));
        }
        Ok(vg)
    }

    /// Γ = Z.
    pub fn integers() -> ValueGroup {
        ValueGroup { basis: vec![Scalar::one()], sym: None }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_discrete(&self) -> bool {
        self.basis.len() == 1
    }

    pub fn basis(&self) -> &[Scalar] {
        &self.basis
    }

    pub fn symbols(&self) -> Option<&Arc<SymbolBasis>> {
        self.sym.as_ref()
    }

    /// γ̄ = (γ_1, ..., γ_k).
    pub fn gamma_bar(&self) -> Vec<Scalar> {
        self.basis.clone()
    }

    fn width(&self, s: &Scalar) -> usize {
        let m = self.sym.as_ref().map(|b| b.len()).unwrap_or(0);
        m.max(s.sym().len())
    }

    /// Coordinates in the Q-basis of QΓ, if s lies there.
    pub fn coords(&self, s: &Scalar) -> Option<Vec<Rat>> {
        let m = self.width(s);
        let a: Vec<Vec<Rat>> = (0..=m).map(|i| self.basis.iter().map(|g| g.coord(i)).collect()).collect();
        linalg::solve_rat(&a, &s.coords(m))
    }

    pub fn in_q_gamma(&self, s: &Scalar) -> bool {
        self.coords(s).is_some()
    }

    /// Integer coordinates of s in Γ, if s ∈ Γ.
    pub fn membership(&self, s: &Scalar) -> Option<Vec<BigInt>> {
        let f = self.coords(s)?;
        if f.iter().all(|q| q.is_integer()) {
            Some(f.iter().map(|q| q.to_integer()).collect())
        } else {
            None
        }
    }

    pub fn from_coords(&self, f: &[Rat]) -> Scalar {
        let mut s = Scalar::zero();
        for (g, q) in self.basis.iter().zip(f) {
            s += &g.mul_rat(q);
        }
        s
    }

    /// |γ_1|, a positive element of Γ.
    pub fn positive_unit(&self) -> Scalar {
        self.basis.iter().find(|x| !x.is_zero()).expect("nontrivial").abs()
    }

    pub fn from_int_coords(&self, n: &[BigInt]) -> Scalar {
        self.from_coords(&linalg::to_rat_vec(n))
    }
}

pub fn gamma_membership(s: &Scalar, g: &ValueGroup) -> Option<Vec<BigInt>> {
    g.membership(s)
}

/// A facet or equation of σ rescaled into M×Γ: integer u and Γ-coordinates of c.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetEvidence {
    pub equation: bool,
    pub given: String,
    pub u: Option<Vec<String>>,
    pub c: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub verdict: bool,
    pub pointed: bool,
    pub half_space: bool,
    pub rational_recession: bool,
    pub facets: Vec<FacetEvidence>,
}

impl AdmissibilityReport {
    fn merge(reports: Vec<AdmissibilityReport>) -> AdmissibilityReport {
        let mut out = AdmissibilityReport {
            verdict: true,
            pointed: true,
            half_space: true,
            rational_recession: true,
            facets: Vec::new(),
        };
        for r in reports {
            out.verdict &= r.verdict;
            out.pointed &= r.pointed;
            out.half_space &= r.half_space;
            out.rational_recession &= r.rational_recession;
            out.facets.extend(r.facets);
        }
        out
    }
}

fn height(p: &Point) -> Rat {
    p.last().and_then(|t| t.to_rat()).expect("rational height")
}

/// Vertices of σ ∩ {t = 1}.
pub fn vertices(c: &Cone) -> Vec<Point> {
    c.rays()
        .iter()
        .filter(|r| height(r).is_positive())
        .map(|r| {
            let t = height(r);
            r[..r.len() - 1].iter().map(|x| x.div_rat(&t)).collect()
        })
        .collect()
}

/// Rescale (u, c) to integer u and c ∈ Γ, if c ∈ QΓ.
pub fn scale_into_gamma(f: &HomFunctional, g: &ValueGroup) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let fc = g.coords(&f.c)?;
    let mut all = f.u.clone();
    all.extend(fc.iter().cloned());
    let den = all.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let num = all.iter().fold(BigInt::zero(), |acc, q| acc.gcd(&(q.numer() * (&den / q.denom()))));
    let s = if num.is_zero() { Rat::from_integer(den) } else { Rat::new(den, num) };
    let scaled: Vec<BigInt> = all.iter().map(|q| (q * &s).to_integer()).collect();
    let n = f.u.len();
    Some((scaled[..n].to_vec(), scaled[n..].to_vec()))
}

/// The functional with its constant term fixed by a vertex it vanishes on. Facets
/// touching no vertex lie in t = 0 and are represented by the height times a
/// positive element of Γ.
fn canonical(f: &HomFunctional, verts: &[Point], g: &ValueGroup) -> HomFunctional {
    if verts.is_empty() {
        return HomFunctional::new(f.u.clone(), Scalar::zero());
    }
    for v in verts {
        let uv = crate::scalar::dot_rs(&f.u, v);
        if (&uv + &f.c).is_zero() {
            return f.clone();
        }
    }
    HomFunctional::new(vec![Rat::zero(); f.u.len()], g.positive_unit())
}

/// A finite L ⊂ M_Q × QΓ with L^∨ ∩ (t ≥ 0) = σ: equations in both signs, then facets.
pub fn presentation(c: &Cone, g: &ValueGroup) -> Result<Vec<HomFunctional>> {
    let verts = vertices(c);
    let mut out = Vec::new();
    for e in c.eqs() {
        let e = canonical(e, &verts, g);
        out.push(e.clone());
        out.push(e.neg());
    }
    for f in c.facets() {
        out.push(canonical(f, &verts, g));
    }
    for y in &out {
        if !g.in_q_gamma(&y.c) {
            return Err(Error::NotInQGamma(y.c.to_text()));
        }
    }
    Ok(out)
}

pub fn is_admissible_cone(c: &Cone, g: &ValueGroup) -> Result<AdmissibilityReport> {
    let half_space = c.rays().iter().all(|r| !height(r).is_negative()) && c.lines().iter().all(|l| height(l).is_zero());
    if !half_space {
        return Err(Error::WrongAmbient);
    }
    let pointed = c.is_pointed();
    let rational_recession = c.rays().iter().filter(|r| height(r).is_zero()).all(|r| point_to_rats(r).is_some());
    let verts = vertices(c);
    let at_height = !verts.is_empty();
    let mut facets = Vec::new();
    let mut ok = pointed && rational_recession;
    for (eq, f) in c.eqs().iter().map(|f| (true, f)).chain(c.facets().iter().map(|f| (false, f))) {
        let cf = canonical(f, &verts, g);
        let sc = scale_into_gamma(&cf, g);
        ok &= sc.is_some();
        facets.push(FacetEvidence {
            equation: eq,
            given: format!("{:?}", f),
            u: sc.as_ref().map(|(u, _)| u.iter().map(|x| x.to_string()).collect()),
            c: sc.as_ref().map(|(_, c)| c.iter().map(|x| x.to_string()).collect()),
        });
    }
    if !at_height {
        ok &= c.is_rational();
    }
    Ok(AdmissibilityReport { verdict: ok, pointed, half_space, rational_recession, facets })
}

pub fn is_admissible_fan(f: &Fan, g: &ValueGroup) -> Result<AdmissibilityReport> {
    if g.rank() == 0 {
        return Err(Error::TrivialGamma);
    }
    let mut rs = Vec::new();
    for c in f.maximal() {
        rs.push(is_admissible_cone(c, g)?);
    }
    Ok(AdmissibilityReport::merge(rs))
}

/// Every vertex of every P_σ has coordinates in Γ; for discrete Γ always true.
pub fn finite_type(f: &Fan, g: &ValueGroup) -> (bool, Vec<Point>) {
    if g.is_discrete() {
        return (true, Vec::new());
    }
    let mut bad: Vec<Point> = Vec::new();
    for c in f.maximal() {
        for v in vertices(c) {
            if v.iter().any(|x| g.membership(x).is_none()) && !bad.contains(&v) {
                bad.push(v);
            }
        }
    }
    (bad.is_empty(), bad)
}

/// Γ' = Γ + Z{vertex coordinates} with its index over Γ.
pub fn minimal_extension(f: &Fan, g: &ValueGroup) -> Result<(ValueGroup, BigInt)> {
    let k = g.rank();
    let mut gens: Vec<Vec<Rat>> = (0..k).map(|i| (0..k).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    for c in f.maximal() {
        for v in vertices(c) {
            for x in &v {
                let q = g.coords(x).ok_or_else(|| Error::NotInQGamma(x.to_text()))?;
                if !gens.contains(&q) {
                    gens.push(q);
                }
            }
        }
    }
    let (basis, index) = lattice_basis(&gens);
    let vg = ValueGroup::new(basis.iter().map(|row| g.from_coords(row)).collect())?;
    Ok((vg, index))
}

/// HNF basis of the lattice spanned by full-rank rational rows containing Z^k, and
/// the index [L : Z^k] = 1 / |det basis|.
pub fn lattice_basis(gens: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, BigInt) {
    let den = gens.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let dr = Rat::from_integer(den.clone());
    let m: Vec<Vec<BigInt>> = gens.iter().map(|r| r.iter().map(|q| (q * &dr).to_integer()).collect()).collect();
    let (h, _) = linalg::hnf(&m);
    let rows: Vec<Vec<Rat>> = h
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| r.into_iter().map(|x| Rat::new(x, den.clone())).collect())
        .collect();
    let det = linalg::det(&rows).abs();
    let index = (Rat::one() / det).to_integer();
    (rows, index)
}
