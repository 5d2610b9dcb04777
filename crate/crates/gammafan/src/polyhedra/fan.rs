//! Fans: finite face-closed collections of cones meeting in common faces.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cone::{common_face_test, int_point, point_to_rats, Cone, HomFunctional, Point};
use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar};

pub const SAMPLE_SEED: u64 = 0x5EED;
pub const SAMPLE_COUNT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ambient {
    Full,
    /// N x R_{>=0}, the last coordinate being the height.
    HalfSpace,
}

pub struct Fan {
    d: usize,
    ambient: Ambient,
    maximal: Vec<Cone>,
    closure: OnceLock<Vec<Cone>>,
}

impl Clone for Fan {
    fn clone(&self) -> Self {
        Fan { d: self.d, ambient: self.ambient, maximal: self.maximal.clone(), closure: OnceLock::new() }
    }
}

impl std::fmt::Debug for Fan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fan").field("d", &self.d).field("ambient", &self.ambient).field("maximal", &self.maximal).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletenessReport {
    pub complete: bool,
    pub wall_test: bool,
    pub sampling_test: bool,
    pub seed: u64,
    pub samples: usize,
    pub witness: Option<String>,
}

/// Drop cones that are faces of other cones and duplicates.
fn maximal_only(cones: Vec<Cone>) -> Vec<Cone> {
    let mut uniq: Vec<Cone> = Vec::new();
    let mut seen = HashSet::new();
    for c in cones {
        if seen.insert(c.clone()) {
            uniq.push(c);
        }
    }
    let keep: Vec<bool> = (0..uniq.len())
        .map(|i| !(0..uniq.len()).any(|j| j != i && uniq[j].dim() > uniq[i].dim() && uniq[j].has_face(&uniq[i])))
        .collect();
    uniq.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect()
}

impl Fan {
    /// Checked construction: pairwise common faces are verified.
    pub fn from_max(d: usize, ambient: Ambient, cones: Vec<Cone>) -> Result<Fan> {
        for c in &cones {
            if c.ambient_dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: c.ambient_dim() });
            }
        }
        for i in 0..cones.len() {
            for j in (i + 1)..cones.len() {
                if !common_face_test(&cones[i], &cones[j])? {
                    return Err(Error::NotPairwiseFaces(i, j));
                }
            }
        }
        Ok(Self::from_max_unchecked(d, ambient, cones))
    }

    pub fn from_max_unchecked(d: usize, ambient: Ambient, cones: Vec<Cone>) -> Fan {
        let mut maximal = maximal_only(cones);
        maximal.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| cmp_cones(a, b)));
        Fan { d, ambient, maximal, closure: OnceLock::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn maximal(&self) -> &[Cone] {
        &self.maximal
    }

    /// Face closure, materialized on first use.
    pub fn cones(&self) -> &[Cone] {
        self.closure.get_or_init(|| {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for m in &self.maximal {
                for f in m.faces() {
                    if seen.insert(f.clone()) {
                        out.push(f);
                    }
                }
            }
            out.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| cmp_cones(a, b)));
            out
        })
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.cones().iter().any(|x| x == c)
    }

    /// Every cone of self is a cone of other.
    pub fn is_subfan_of(&self, other: &Fan) -> bool {
        self.d == other.d && self.maximal.iter().all(|c| other.contains_cone(c))
    }

    pub fn same_as(&self, other: &Fan) -> bool {
        let a: HashSet<&Cone> = self.maximal.iter().collect();
        let b: HashSet<&Cone> = other.maximal.iter().collect();
        self.d == other.d && a == b
    }

    pub fn is_pure_full_dim(&self) -> bool {
        !self.maximal.is_empty() && self.maximal.iter().all(|c| c.dim() == self.d)
    }

    pub fn support_contains(&self, x: &[Scalar]) -> bool {
        self.maximal.iter().any(|c| c.contains(x))
    }

    /// Full fan-axiom check over all pairs of maximal cones.
    pub fn check_axiom(&self) -> Result<Option<(usize, usize)>> {
        for i in 0..self.maximal.len() {
            for j in (i + 1)..self.maximal.len() {
                if !common_face_test(&self.maximal[i], &self.maximal[j])? {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    /// Rays of the fan (one-dimensional cones), canonical.
    pub fn rays(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        let mut seen = HashSet::new();
        for c in &self.maximal {
            for r in c.rays() {
                if seen.insert(r.clone()) {
                    out.push(r.clone());
                }
            }
        }
        out
    }

    fn on_boundary(&self, c: &Cone) -> bool {
        self.ambient == Ambient::HalfSpace
            && c.rays().iter().all(|r| r[self.d - 1].is_zero())
            && c.lines().iter().all(|r| r[self.d - 1].is_zero())
    }

    /// Codimension-one faces of maximal cones together with how many maximal cones own them.
    fn wall_counts(&self) -> HashMap<Cone, Vec<(usize, usize)>> {
        let mut m: HashMap<Cone, Vec<(usize, usize)>> = HashMap::new();
        for (i, c) in self.maximal.iter().enumerate() {
            for (j, f) in c.facet_cones().into_iter().enumerate() {
                m.entry(f).or_default().push((i, j));
            }
        }
        m
    }

    pub fn completeness(&self) -> CompletenessReport {
        self.completeness_seeded(SAMPLE_SEED)
    }

    /// Wall test plus sampling with the given seed.
    pub fn completeness_seeded(&self, seed: u64) -> CompletenessReport {
        let mut witness = None;
        let mut wall = self.is_pure_full_dim();
        if !wall {
            witness = Some("not pure full-dimensional".to_string());
        } else {
            for (f, owners) in self.wall_counts() {
                let ok = owners.len() == 2 || (owners.len() == 1 && self.on_boundary(&f));
                if !ok {
                    wall = false;
                    witness = Some(format!("free facet with rays {:?}", f.rays()));
                    break;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampled = true;
        let mut n = 0;
        while n < SAMPLE_COUNT {
            let mut v: Vec<i64> = (0..self.d).map(|_| rng.gen_range(-1000..=1000)).collect();
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            if self.ambient == Ambient::HalfSpace {
                let t = v[self.d - 1].abs();
                v[self.d - 1] = t;
            }
            n += 1;
            let p = int_point(&v);
            if !self.support_contains(&p) {
                sampled = false;
                if witness.is_none() || wall {
                    witness = Some(format!("uncovered direction {v:?}"));
                }
                break;
            }
        }
        CompletenessReport {
            complete: wall && sampled,
            wall_test: wall,
            sampling_test: sampled,
            seed,
            samples: SAMPLE_COUNT,
            witness,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.completeness().complete
    }

    /// Codimension-one faces lying in exactly one maximal cone, with the owner and
    /// the outward normal direction. Boundary facets of the half-space are skipped.
    pub fn free_facets(&self) -> Result<Vec<FreeFacet>> {
        if !self.is_pure_full_dim() {
            return Err(Error::NotPure);
        }
        Ok(self.boundary_facets())
    }

    /// Free facets of full-dimensional cones plus both sides of codimension-one
    /// maximal cones (walls).
    pub fn boundary_facets(&self) -> Vec<FreeFacet> {
        let mut out = Vec::new();
        let counts = self.wall_counts();
        let mut keys: Vec<&Cone> = counts.keys().collect();
        keys.sort_by(|a, b| cmp_cones(a, b));
        for f in keys {
            let owners = &counts[f];
            if owners.len() != 1 || self.on_boundary(f) {
                continue;
            }
            let (i, _) = owners[0];
            let owner = &self.maximal[i];
            if owner.dim() != self.d {
                continue;
            }
            let h = owner
                .facets()
                .iter()
                .find(|h| f.rays().iter().all(|r| h.eval(r).is_zero()) && f.lines().iter().all(|r| h.eval(r).is_zero()))
                .expect("facet functional")
                .clone();
            out.push(FreeFacet { facet: f.clone(), owner: i, inner: h });
        }
        for (i, c) in self.maximal.iter().enumerate() {
            if c.dim() + 1 == self.d && !self.on_boundary(c) {
                let n = c.eqs()[0].clone();
                if self.ambient == Ambient::HalfSpace && is_height_functional(&n) {
                    continue;
                }
                out.push(FreeFacet { facet: c.clone(), owner: i, inner: n.clone() });
                out.push(FreeFacet { facet: c.clone(), owner: i, inner: n.neg() });
            }
        }
        out
    }

    pub fn with_cones(&self, extra: Vec<Cone>) -> Fan {
        let mut all = self.maximal.clone();
        all.extend(extra);
        Fan::from_max_unchecked(self.d, self.ambient, all)
    }
}

fn is_height_functional(h: &HomFunctional) -> bool {
    h.u.iter().all(|x| x.is_zero()) && !h.c.is_zero()
}

/// A free facet F of `owner`; `inner` is the owner's facet functional (>= 0 on the
/// owner), so its negation points outward.
#[derive(Debug, Clone)]
pub struct FreeFacet {
    pub facet: Cone,
    pub owner: usize,
    pub inner: HomFunctional,
}

impl FreeFacet {
    /// Outward normal as a rational direction (standard inner product).
    pub fn outward(&self) -> Option<Vec<Rat>> {
        let v = self.inner.to_rats()?;
        Some(v.into_iter().map(|x| -x).collect())
    }
}

pub fn cmp_cones(a: &Cone, b: &Cone) -> std::cmp::Ordering {
    let ka: Vec<&Point> = a.rays().iter().chain(a.lines()).collect();
    let kb: Vec<&Point> = b.rays().iter().chain(b.lines()).collect();
    for (x, y) in ka.iter().zip(&kb) {
        let o = super::cone::cmp_points(x, y);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    ka.len().cmp(&kb.len())
}

pub fn fan_from_max(d: usize, ambient: Ambient, cones: Vec<Cone>) -> Result<Fan> {
    Fan::from_max(d, ambient, cones)
}

pub fn is_complete(f: &Fan) -> bool {
    f.is_complete()
}

/// Preimage of a rational cone in N x R^k under (w, t) -> (w, t*gbar), restricted to t >= 0.
pub fn pullback_cone(c: &Cone, gbar: &[Scalar]) -> Result<Cone> {
    let k = gbar.len();
    let big = c.ambient_dim();
    let n = big - k;
    let conv = |h: &HomFunctional| -> Result<HomFunctional> {
        let v = h.to_rats().ok_or_else(|| Error::SemanticError("pullback needs a rational cone".into()))?;
        let mut g = Scalar::zero();
        for l in 0..k {
            g += &gbar[l].mul_rat(&v[n + l]);
        }
        Ok(HomFunctional::new(v[..n].to_vec(), g))
    };
    let eqs = c.eqs().iter().map(conv).collect::<Result<Vec<_>>>()?;
    let mut ineqs = c.facets().iter().map(conv).collect::<Result<Vec<_>>>()?;
    let mut t = vec![Rat::zero(); n];
    t.push(Rat::one());
    ineqs.push(HomFunctional::from_rats(&t));
    Cone::from_h(n + 1, eqs, ineqs)
}

/// Pullback of a rational fan in N x R^k along t -> t*gbar: preimages of all cones
/// and their height-zero slices.
pub fn pullback(fan: &Fan, gbar: &[Scalar]) -> Result<Fan> {
    if gbar.iter().all(|g| g.is_zero()) {
        return Err(Error::ZeroGammaBar);
    }
    let k = gbar.len();
    let n = fan.ambient_dim() - k;
    let mut t = vec![Rat::zero(); n];
    t.push(Rat::one());
    let height = HomFunctional::from_rats(&t);
    let mut out = Vec::new();
    for c in fan.maximal() {
        let p = pullback_cone(c, gbar)?;
        out.push(p.cut(&[height.clone()], &[])?);
        out.push(p);
    }
    Ok(Fan::from_max_unchecked(n + 1, Ambient::HalfSpace, out))
}

/// Integer point from rationals (helper for tests and fixtures).
pub fn rat_dir(v: &[Rat]) -> Point {
    v.iter().cloned().map(Scalar::rational).collect()
}

pub fn dir_rats(p: &[Scalar]) -> Option<Vec<Rat>> {
    point_to_rats(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::SymbolBasis;

    fn hf(v: &[i64]) -> HomFunctional {
        HomFunctional::from_ints(v)
    }

    fn quadrant(sx: i64, sy: i64) -> Cone {
        Cone::from_h(2, vec![], vec![hf(&[sx, 0]), hf(&[0, sy])]).unwrap()
    }

    #[test]
    fn four_quadrants() {
        let f = fan_from_max(2, Ambient::Full, vec![quadrant(1, 1), quadrant(-1, 1), quadrant(-1, -1), quadrant(1, -1)]).unwrap();
        assert_eq!(f.cones().len(), 9);
        assert!(f.is_complete());
        assert!(f.free_facets().unwrap().is_empty());
    }

    #[test]
    fn overlapping_rejected() {
        let over = Cone::from_rays(2, vec![int_point(&[1, 1]), int_point(&[-1, 1])], vec![]).unwrap();
        assert_eq!(fan_from_max(2, Ambient::Full, vec![quadrant(1, 1), over]).unwrap_err(), Error::NotPairwiseFaces(0, 1));
    }

    #[test]
    fn single_quadrant_free_facets() {
        let f = fan_from_max(2, Ambient::Full, vec![quadrant(1, 1)]).unwrap();
        let ff = f.free_facets().unwrap();
        assert_eq!(ff.len(), 2);
        let rep = f.completeness();
        assert!(!rep.complete && !rep.wall_test && !rep.sampling_test);
    }

    #[test]
    fn half_space_octant() {
        let c = Cone::from_h(2, vec![], vec![hf(&[1, 0]), hf(&[0, 1])]).unwrap();
        let d = Cone::from_h(2, vec![], vec![hf(&[-1, 0]), hf(&[0, 1])]).unwrap();
        let f = fan_from_max(2, Ambient::HalfSpace, vec![c, d]).unwrap();
        assert!(f.is_complete());
    }

    #[test]
    fn pullback_of_octant_fan() {
        // R^{1+1} with the positive quadrant; gbar = (sqrt 2).
        let b = SymbolBasis::sqrts(&["r"], &[2]);
        let f = fan_from_max(2, Ambient::Full, vec![quadrant(1, 1)]).unwrap();
        let p = pullback(&f, &[b.symbol(0)]).unwrap();
        assert_eq!(p.maximal().len(), 1);
        assert_eq!(p.maximal()[0], quadrant(1, 1));
        assert_eq!(pullback(&f, &[Scalar::zero()]).unwrap_err(), Error::ZeroGammaBar);
    }

    #[test]
    fn pullback_of_complete_is_complete() {
        let b = SymbolBasis::sqrts(&["r", "s"], &[2, 3]);
        // complete fan of R^3 by octants
        let mut cones = Vec::new();
        for sx in [1, -1] {
            for sy in [1, -1] {
                for sz in [1, -1] {
                    cones.push(Cone::from_h(3, vec![], vec![hf(&[sx, 0, 0]), hf(&[0, sy, 0]), hf(&[0, 0, sz])]).unwrap());
                }
            }
        }
        let f = Fan::from_max_unchecked(3, Ambient::Full, cones);
        assert!(f.is_complete());
        let p = pullback(&f, &[b.symbol(0), -b.symbol(1)]).unwrap();
        assert!(p.is_complete());
    }
}
