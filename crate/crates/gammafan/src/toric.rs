//! Toric data of admissible fans: algebra presentations, dual complexes and
//! semistability checks.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{vertices, ValueGroup};
use crate::linalg;
use crate::polyhedra::cone::{point_to_rats, rat_point, Cone, HomFunctional, Point};
use crate::polyhedra::fan::Fan;
use crate::scalar::{Rat, Scalar};

/// Lattice points enumerated at most.
const BOX_LIMIT: u64 = 4_000_000;

fn int_vec(v: &[Rat]) -> Vec<BigInt> {
    linalg::primitive_rat(v).unwrap_or_else(|_| v.iter().map(|x| x.to_integer()).collect())
}

fn small(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().filter(|n| n.abs() < (1 << 40)))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::SemanticError("coordinates too large for lattice enumeration".into()))
}

fn dot_i(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(x, y)| *x as i128 * *y as i128).sum()
}

/// Integer inequalities (>= 0) and equations (= 0) of a rational cone.
fn int_hrep(c: &Cone) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let conv = |h: &HomFunctional| -> Result<Vec<i64>> {
        let v = h.to_rats().ok_or_else(|| Error::SemanticError("cone is not rational".into()))?;
        small(&int_vec(&v))
    };
    Ok((c.facets().iter().map(conv).collect::<Result<_>>()?, c.eqs().iter().map(conv).collect::<Result<_>>()?))
}

/// Minimal generating set of σ ∩ ℤⁿ for a rational pointed cone, ambient dim ≤ 4.
pub fn hilbert_basis(c: &Cone) -> Result<Vec<Vec<BigInt>>> {
    let d = c.ambient_dim();
    if d > 4 {
        return Err(Error::DimensionTooLarge(d));
    }
    if !c.is_pointed() {
        return Err(Error::SemanticError("hilbert_basis needs a pointed cone".into()));
    }
    if c.rays().is_empty() {
        return Ok(Vec::new());
    }
    let gens: Vec<Vec<i64>> = c
        .rays()
        .iter()
        .map(|r| point_to_rats(r).ok_or_else(|| Error::SemanticError("cone is not rational".into())).and_then(|v| small(&int_vec(&v))))
        .collect::<Result<_>>()?;
    let (ineqs, eqs) = int_hrep(c)?;
    let inside = |x: &[i64]| ineqs.iter().all(|h| dot_i(h, x) >= 0) && eqs.iter().all(|h| dot_i(h, x) == 0);
    // Positive on σ \ 0, used to order candidates.
    let grade: Vec<i64> = (0..d).map(|k| ineqs.iter().map(|h| h[k]).sum()).collect();
    let lo: Vec<i64> = (0..d).map(|k| gens.iter().map(|g| g[k].min(0)).sum()).collect();
    let hi: Vec<i64> = (0..d).map(|k| gens.iter().map(|g| g[k].max(0)).sum()).collect();
    let size: u64 = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as u64).product();
    if size > BOX_LIMIT {
        return Err(Error::SemanticError(format!("zonotope box has {size} lattice points")));
    }
    let mut cands: Vec<Vec<i64>> = Vec::new();
    let mut x = lo.clone();
    loop {
        if x.iter().any(|v| *v != 0) && inside(&x) {
            cands.push(x.clone());
        }
        let mut k = 0;
        while k < d {
            x[k] += 1;
            if x[k] <= hi[k] {
                break;
            }
            x[k] = lo[k];
            k += 1;
        }
        if k == d {
            break;
        }
    }
    cands.sort_by_key(|v| (dot_i(&grade, v), v.clone()));
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for v in cands {
        let reducible = basis.iter().any(|h| {
            let diff: Vec<i64> = v.iter().zip(h).map(|(a, b)| a - b).collect();
            inside(&diff)
        });
        if !reducible {
            basis.push(v);
        }
    }
    Ok(basis.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect())
}

/// Generators of the monoid σ ∩ ℤⁿ for a rational cone that may contain lines: a
/// lattice basis of the lineality space with both signs, then lifts of the Hilbert
/// basis of the pointed quotient.
pub fn monoid_generators(c: &Cone) -> Result<Vec<Vec<BigInt>>> {
    if c.is_pointed() {
        return hilbert_basis(c);
    }
    let d = c.ambient_dim();
    let lines: Vec<Vec<Rat>> = c
        .lines()
        .iter()
        .map(|l| point_to_rats(l).ok_or_else(|| Error::SemanticError("cone is not rational".into())))
        .collect::<Result<_>>()?;
    // Integer rows cutting out the lineality space; their integer kernel is L ∩ ℤⁿ.
    let perp: Vec<Vec<BigInt>> = linalg::kernel(&lines, d).iter().map(|v| int_vec(v)).collect();
    let (cols_of_q, v) = if perp.is_empty() {
        (Vec::new(), linalg::identity(d).iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect::<Vec<Vec<BigInt>>>())
    } else {
        let (h, v) = linalg::hnf_columns(&perp);
        let q: Vec<usize> = (0..d).filter(|&j| h.iter().any(|row| !row[j].is_zero())).collect();
        (q, v)
    };
    let col = |j: usize| -> Vec<BigInt> { v.iter().map(|row| row[j].clone()).collect() };
    let kcols: Vec<usize> = (0..d).filter(|j| !cols_of_q.contains(j)).collect();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for &j in &kcols {
        let k = col(j);
        out.push(k.iter().map(|x| -x).collect());
        out.push(k);
    }
    if cols_of_q.is_empty() {
        return Ok(out);
    }
    let vr = linalg::to_rat_matrix(&v);
    let project = |x: &[Rat]| -> Result<Point> {
        let y = linalg::solve_rat(&vr, x).ok_or_else(|| Error::SemanticError("singular lattice basis".into()))?;
        Ok(rat_point(&cols_of_q.iter().map(|&j| y[j].clone()).collect::<Vec<_>>()))
    };
    let rays: Vec<Point> = c
        .rays()
        .iter()
        .map(|r| point_to_rats(r).ok_or_else(|| Error::SemanticError("cone is not rational".into())).and_then(|x| project(&x)))
        .collect::<Result<_>>()?;
    let quotient = Cone::from_rays(cols_of_q.len(), rays, vec![])?;
    for hb in hilbert_basis(&quotient)? {
        let mut x = vec![BigInt::zero(); d];
        for (coef, &j) in hb.iter().zip(&cols_of_q) {
            for (xi, cj) in x.iter_mut().zip(col(j)) {
                *xi += coef * cj;
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// λ·χ^u with v(λ) = valuation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub u: Vec<String>,
    pub valuation: String,
    #[serde(skip)]
    pub u_int: Vec<BigInt>,
    #[serde(skip)]
    pub val: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexBlock {
    /// None for a cone at height zero.
    pub vertex: Option<Vec<String>>,
    pub generators: Vec<Generator>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraPresentation {
    pub blocks: Vec<VertexBlock>,
}

impl AlgebraPresentation {
    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.blocks.iter().flat_map(|b| b.generators.iter())
    }

    /// ⟨u, w⟩ + t·val ≥ 0 on every ray and line (both signs) of σ.
    pub fn is_sound_for(&self, c: &Cone) -> bool {
        let n = c.ambient_dim() - 1;
        let check = |g: &Generator, r: &Point| {
            let u: Vec<Rat> = g.u_int.iter().map(|x| Rat::from_integer(x.clone())).collect();
            let h = HomFunctional::new(u[..n].to_vec(), g.val.clone());
            h.try_eval(r).map(|v| v.sign() >= 0).unwrap_or(false)
        };
        self.generators().all(|g| {
            c.rays().iter().all(|r| check(g, r))
                && c.lines().iter().all(|l| check(g, l) && check(g, &l.iter().map(|x| -x).collect::<Vec<_>>()))
        })
    }
}

fn text(v: &[Scalar]) -> Vec<String> {
    v.iter().map(|x| x.to_text()).collect()
}

fn generator(u: Vec<BigInt>, w: Option<&[Scalar]>) -> Generator {
    let val = match w {
        Some(w) => -u.iter().zip(w).map(|(a, x)| x.mul_rat(&Rat::from_integer(a.clone()))).sum::<Scalar>(),
        None => Scalar::zero(),
    };
    Generator { u: u.iter().map(|x| x.to_string()).collect(), valuation: val.to_text(), u_int: u, val }
}

/// Per vertex w of P_σ the monoid generators of LC_w(P_σ)^∨ ∩ M, valued at −⟨u, w⟩.
pub fn algebra_presentation(c: &Cone, g: &ValueGroup) -> Result<AlgebraPresentation> {
    let d = c.ambient_dim();
    let n = d - 1;
    let us = |hs: &[HomFunctional]| -> Vec<Point> { hs.iter().map(|h| rat_point(&h.u)).collect() };
    if c.rays().iter().chain(c.lines()).all(|r| r[n].is_zero()) {
        // σ ⊆ N × {0}: the dual of σ ∩ N, with t free.
        let lines: Vec<Point> = us(c.eqs()).into_iter().filter(|u| u.iter().any(|x| !x.is_zero())).collect();
        let rays: Vec<Point> = c
            .facets()
            .iter()
            .filter(|h| h.u.iter().any(|x| !x.is_zero()))
            .map(|h| rat_point(&h.u))
            .collect();
        let dual = Cone::from_rays(n, rays, lines)?;
        let gens = monoid_generators(&dual)?.into_iter().map(|u| generator(u, None)).collect();
        return Ok(AlgebraPresentation { blocks: vec![VertexBlock { vertex: None, generators: gens }] });
    }
    let verts = vertices(c);
    if let Some(w) = verts.iter().find(|w| w.iter().any(|x| g.membership(x).is_none())) {
        return Err(Error::NotFiniteType(format!("({})", text(w).join(", "))));
    }
    let mut blocks = Vec::new();
    for w in &verts {
        let mut at: Point = w.clone();
        at.push(Scalar::one());
        let tight: Vec<HomFunctional> = c
            .facets()
            .iter()
            .filter(|h| h.eval(&at).is_zero() && h.u.iter().any(|x| !x.is_zero()))
            .cloned()
            .collect();
        let lines: Vec<Point> = us(c.eqs()).into_iter().filter(|u| u.iter().any(|x| !x.is_zero())).collect();
        let dual = Cone::from_rays(n, us(&tight), lines)?;
        let gens = monoid_generators(&dual)?.into_iter().map(|u| generator(u, Some(w))).collect();
        blocks.push(VertexBlock { vertex: Some(text(w)), generators: gens });
    }
    Ok(AlgebraPresentation { blocks })
}

/// A bounded face of Π = σ ∩ {t = 1} over all σ ∈ Σ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedFace {
    pub dim: usize,
    /// Indices into `DualComplexData::vertices`.
    pub vertices: Vec<usize>,
    /// Indices of the faces of dimension dim - 1 it contains.
    pub facets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualComplexData {
    pub vertices: Vec<Vec<String>>,
    pub faces: Vec<BoundedFace>,
}

impl DualComplexData {
    pub fn count(&self, dim: usize) -> usize {
        self.faces.iter().filter(|f| f.dim == dim).count()
    }
}

fn bounded(c: &Cone, n: usize) -> bool {
    !c.is_zero() && c.lines().is_empty() && c.rays().iter().all(|r| r[n].is_positive())
}

/// Poset of the bounded faces of Π.
pub fn dual_complex(f: &Fan, _g: &ValueGroup) -> DualComplexData {
    let n = f.ambient_dim() - 1;
    let mut cones: Vec<Cone> = f.cones().iter().filter(|c| bounded(c, n)).cloned().collect();
    cones.sort_by_key(|c| c.dim());
    let mut vpts: Vec<Point> = Vec::new();
    for c in &cones {
        for r in c.rays() {
            if !vpts.contains(r) {
                vpts.push(r.clone());
            }
        }
    }
    let faces: Vec<BoundedFace> = cones
        .iter()
        .map(|c| {
            let mut vs: Vec<usize> = c.rays().iter().map(|r| vpts.iter().position(|p| p == r).unwrap()).collect();
            vs.sort_unstable();
            let facets = cones
                .iter()
                .enumerate()
                .filter(|(_, o)| o.dim() + 1 == c.dim() && c.has_face(o))
                .map(|(i, _)| i)
                .collect();
            BoundedFace { dim: c.dim() - 1, vertices: vs, facets }
        })
        .collect();
    let vertices = vpts
        .iter()
        .map(|r| {
            let t = r[n].to_rat().expect("rational height");
            text(&r[..n].iter().map(|x| x.div_rat(&t)).collect::<Vec<_>>())
        })
        .collect();
    DualComplexData { vertices, faces }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Necessary {
    FailsNecessary,
    /// All bounded faces are simplices; semistability is not decided.
    PassesNecessaryInconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentModel {
    pub length: String,
    pub torus_rank: usize,
    #[serde(skip)]
    pub length_value: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemistabilityReport {
    pub verdict: Necessary,
    /// Vertices of the first bounded face that is not a simplex.
    pub witness: Option<Vec<Vec<String>>>,
    /// Segment-model recognition per maximal cone; None means unknown.
    pub models: Vec<Option<SegmentModel>>,
}

/// Every bounded face of Π must be a simplex.
pub fn semistable_necessary(f: &Fan, g: &ValueGroup) -> SemistabilityReport {
    let dc = dual_complex(f, g);
    let bad = dc.faces.iter().find(|face| face.vertices.len() != face.dim + 1);
    let witness = bad.map(|face| face.vertices.iter().map(|&i| dc.vertices[i].clone()).collect());
    let models = f.maximal().iter().map(|c| recognize_segment_model(c, g)).collect();
    SemistabilityReport {
        verdict: if bad.is_some() { Necessary::FailsNecessary } else { Necessary::PassesNecessaryInconclusive },
        witness,
        models,
    }
}

/// P_σ a segment with endpoints in N_Γ and a rational direction: its lattice length
/// and the rank of the torus factor.
pub fn recognize_segment_model(c: &Cone, g: &ValueGroup) -> Option<SegmentModel> {
    let d = c.ambient_dim();
    let n = d - 1;
    if !c.lines().is_empty() || c.rays().len() != 2 || !c.rays().iter().all(|r| r[n].is_positive()) {
        return None;
    }
    let vs = vertices(c);
    if vs.iter().flatten().any(|x| g.membership(x).is_none()) {
        return None;
    }
    let e: Vec<Scalar> = vs[1].iter().zip(&vs[0]).map(|(a, b)| a - b).collect();
    let k = e.iter().position(|x| !x.is_zero())?;
    // e = λ·e₀ with e₀ rational: every coordinate is a rational multiple of e_k.
    let ratios: Vec<Rat> = e
        .iter()
        .map(|x| {
            if x.is_zero() {
                return Some(Rat::zero());
            }
            let m = x.basis().or(e[k].basis()).map(|b| b.len()).unwrap_or(0);
            let (cx, ck) = (x.coords(m), e[k].coords(m));
            let j = ck.iter().position(|q| !q.is_zero())?;
            let q = &cx[j] / &ck[j];
            (cx.iter().zip(&ck).all(|(a, b)| *a == b * &q) && x.q0() == &(e[k].q0() * &q)).then_some(q)
        })
        .collect::<Option<Vec<_>>>()?;
    let prim = linalg::primitive_rat(&ratios).ok()?;
    let hnf = linalg::hnf(&[prim.clone()]).0;
    debug_assert!(hnf[0].iter().all(|x| !x.is_negative()));
    let scale = Rat::from_integer(prim[k].clone());
    let mut len = e[k].div_rat(&scale);
    if len.is_negative() {
        len = -len;
    }
    if g.membership(&len).is_none() && !len.is_zero() {
        return None;
    }
    Some(SegmentModel { length: len.to_text(), torus_rank: n + 1 - c.dim(), length_value: len })
}
