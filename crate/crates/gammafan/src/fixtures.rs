//! Built-in fans: the dart and its lift and completion, the bad normalization, the
//! non-archimedean pair and the model cone.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gamma::ValueGroup;
use crate::polyhedra::cone::{Cone, HomFunctional, Point};
use crate::polyhedra::fan::{Ambient, Fan};
use crate::polyhedra::polyhedron::Polyhedron;
use crate::scalar::{int, Rat, Scalar, SymbolBasis};

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub fan: Fan,
    pub gamma: ValueGroup,
    /// Names of the maximal cones, in input order.
    pub labels: Vec<String>,
    /// Input order of the maximal cones (the fan itself stores them sorted).
    pub cones: Vec<Cone>,
    pub notes: Vec<String>,
}

impl Fixture {
    fn new(name: &str, d: usize, ambient: Ambient, gamma: ValueGroup, named: Vec<(String, Cone)>) -> Result<Fixture> {
        let (labels, cones): (Vec<String>, Vec<Cone>) = named.into_iter().unzip();
        let fan = Fan::from_max(d, ambient, cones.clone())?;
        Ok(Fixture { name: name.to_string(), fan, gamma, labels, cones, notes: Vec::new() })
    }

    pub fn symbols(&self) -> Option<&Arc<SymbolBasis>> {
        self.gamma.symbols()
    }
}

pub const NAMES: &[&str] = &["dart", "dart-lift", "dart-completion", "badnorm", "thm45", "model"];

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn lin(a: &Scalar, ka: i64, b: &Scalar, kb: i64) -> Scalar {
    &a.mul_rat(&int(ka)) + &b.mul_rat(&int(kb))
}

fn at_height(p: &[Scalar]) -> Point {
    let mut v = p.to_vec();
    v.push(Scalar::one());
    v
}

fn segment(p: &[Scalar], q: &[Scalar]) -> Result<Cone> {
    Cone::from_rays(p.len() + 1, vec![at_height(p), at_height(q)], vec![])
}

/// α = √3, β = √2 with 0 < β < α < 2β.
pub fn dart_basis() -> Result<(Arc<SymbolBasis>, Scalar, Scalar)> {
    let b = SymbolBasis::sqrts(&["a", "b"], &[3, 2]);
    let (a, bb) = (b.symbol(0), b.symbol(1));
    if !(bb.is_positive() && bb.lt(&a) && a.lt(&bb.mul_rat(&int(2)))) {
        return Err(Error::SemanticError("dart needs 0 < b < a < 2b".into()));
    }
    Ok((b, a, bb))
}

/// The four corners (0,0), (-3α,0), (0,-3β), (α+2β, 2α+β).
pub fn dart_corners(a: &Scalar, b: &Scalar) -> [Vec<Scalar>; 4] {
    [
        vec![s(0), s(0)],
        vec![a.mul_rat(&int(-3)), s(0)],
        vec![s(0), b.mul_rat(&int(-3))],
        vec![lin(a, 1, b, 2), lin(a, 2, b, 1)],
    ]
}

pub fn dart() -> Result<Fixture> {
    let (_, a, b) = dart_basis()?;
    let g = ValueGroup::new(vec![a.clone(), b.clone()])?;
    let [o, pa, pb, pc] = dart_corners(&a, &b);
    let named = vec![
        ("sigma1".to_string(), segment(&o, &pa)?),
        ("sigma2".to_string(), segment(&o, &pb)?),
        ("sigma3".to_string(), segment(&pb, &pc)?),
        ("sigma4".to_string(), segment(&pa, &pc)?),
    ];
    let mut f = Fixture::new("dart", 3, Ambient::HalfSpace, g, named)?;
    f.notes.push("a = sqrt(3), b = sqrt(2)".into());
    Ok(f)
}

fn hf(v: &[i64]) -> HomFunctional {
    HomFunctional::from_ints(v)
}

/// σ̃_1..σ̃_4 in R^2 × R^2 with coordinates (x, y, a, b).
pub fn dart_lift() -> Result<Fixture> {
    let (_, a, b) = dart_basis()?;
    let g = ValueGroup::new(vec![a, b])?;
    let band = [hf(&[0, 0, -1, 2]), hf(&[0, 0, 2, -1])];
    let cone = |eq: [i64; 4], lo: [i64; 4], hi: [i64; 4]| {
        let mut ineqs = vec![hf(&lo), hf(&hi)];
        ineqs.extend(band.iter().cloned());
        Cone::from_h(4, vec![hf(&eq)], ineqs)
    };
    let named = vec![
        ("sigma1~".to_string(), cone([0, 1, 0, 0], [-1, 0, 0, 0], [1, 0, 3, 0])?),
        ("sigma2~".to_string(), cone([1, 0, 0, 0], [0, -1, 0, 0], [0, 1, 0, 3])?),
        ("sigma3~".to_string(), cone([2, -1, 0, -3], [1, 0, 0, 0], [-1, 0, 1, 2])?),
        ("sigma4~".to_string(), cone([1, -2, 3, 0], [0, 1, 0, 0], [0, -1, 2, 1])?),
    ];
    Fixture::new("dart-lift", 4, Ambient::Full, g, named)
}

fn poly(verts: &[Vec<Scalar>], rays: &[[i64; 2]]) -> Result<Cone> {
    let rays: Vec<Vec<Rat>> = rays.iter().map(|r| vec![int(r[0]), int(r[1])]).collect();
    Ok(Polyhedron::from_vertices(verts, &rays)?.homogenization().clone())
}

/// The completion of the dart with six bounded and four unbounded cells.
pub fn dart_completion() -> Result<Fixture> {
    let (_, a, b) = dart_basis()?;
    let g = ValueGroup::new(vec![a.clone(), b.clone()])?;
    let [o, pa, pb, pc] = dart_corners(&a, &b);
    let p1 = vec![lin(&b, 2, &a, -1), lin(&b, 2, &a, -1)];
    let p2 = vec![lin(&b, 2, &a, -1), lin(&b, 5, &a, -4)];
    let p3 = vec![lin(&a, 3, &b, -2), lin(&a, 4, &b, -3)];
    let p4 = vec![lin(&b, 8, &a, -7), lin(&b, 2, &a, -1)];
    let named = vec![
        ("tau1".to_string(), poly(&[o.clone(), pa.clone(), p4.clone(), p1.clone()], &[])?),
        ("tau2".to_string(), poly(&[o.clone(), pb.clone(), p2.clone(), p1.clone()], &[])?),
        ("tau3".to_string(), poly(&[pb.clone(), pc.clone(), p3.clone(), p2.clone()], &[])?),
        ("tau4".to_string(), poly(&[pa.clone(), pc.clone(), p3.clone(), p4.clone()], &[])?),
        ("tau5".to_string(), poly(&[p1.clone(), p2, p3.clone()], &[])?),
        ("tau6".to_string(), poly(&[p1, p3, p4], &[])?),
        ("rho1".to_string(), poly(&[o.clone(), pa.clone()], &[[-1, -1], [-4, -1]])?),
        ("rho2".to_string(), poly(&[o, pb.clone()], &[[-1, -1], [-1, -4]])?),
        ("rho3".to_string(), poly(&[pb, pc.clone()], &[[-1, -4], [1, 1]])?),
        ("rho4".to_string(), poly(&[pa, pc], &[[-4, -1], [1, 1]])?),
    ];
    let mut f = Fixture::new("dart-completion", 3, Ambient::HalfSpace, g, named)?;
    f.notes.push("inner quadrilateral split along the diagonal (2b-a, 2b-a) -- (3a-2b, 4a-3b)".into());
    f.notes.push("unbounded directions (-1,-1) at (0,0), (-1,-4) at (0,-3b), (-4,-1) at (-3a,0), (1,1) at (a+2b, 2a+b)".into());
    Ok(f)
}

/// Γ = Z ⊕ Z√2, the group of the normalization example.
pub fn z_sqrt2() -> Result<ValueGroup> {
    let b = SymbolBasis::sqrts(&["r2"], &[2]);
    ValueGroup::new(vec![Scalar::one(), b.symbol(0)])
}

/// The fan with maximal cones {w_j ≥ ct}, {0 ≤ w_i ≤ ct, w_i ≤ w_j}, {w_i ≤ 0, w_i ≤ w_j}
/// for c = γ/r.
pub fn bad_normalization_fan(n: usize, r: i64, gamma: &Scalar, g: &ValueGroup) -> Result<Fan> {
    Ok(badnorm(n, r, gamma, g)?.fan)
}

pub fn badnorm(n: usize, r: i64, gamma: &Scalar, g: &ValueGroup) -> Result<Fixture> {
    if n == 0 || r == 0 {
        return Err(Error::SemanticError("badnorm needs n >= 1 and r != 0".into()));
    }
    let c = gamma.div_rat(&int(r));
    if g.membership(&c).is_some() {
        return Err(Error::GammaDivisible);
    }
    let d = n + 1;
    let unit = |i: usize, k: i64| {
        let mut u = vec![Rat::zero(); n];
        u[i] = int(k);
        u
    };
    let t = HomFunctional::new(vec![Rat::zero(); n], Scalar::one());
    let below = |i: usize| -> Vec<HomFunctional> {
        (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let mut u = unit(j, 1);
                u[i] = int(-1);
                HomFunctional::new(u, Scalar::zero())
            })
            .collect()
    };
    let mut named = Vec::new();
    let mut top: Vec<HomFunctional> = (0..n).map(|j| HomFunctional::new(unit(j, 1), -c.clone())).collect();
    top.push(t.clone());
    named.push(("upper".to_string(), Cone::from_h(d, vec![], top)?));
    for i in 0..n {
        let mut mid = vec![HomFunctional::new(unit(i, 1), Scalar::zero()), HomFunctional::new(unit(i, -1), c.clone()), t.clone()];
        mid.extend(below(i));
        named.push((format!("middle{}", i + 1), Cone::from_h(d, vec![], mid)?));
    }
    for i in 0..n {
        let mut low = vec![HomFunctional::new(unit(i, -1), Scalar::zero()), t.clone()];
        low.extend(below(i));
        named.push((format!("lower{}", i + 1), Cone::from_h(d, vec![], low)?));
    }
    Fixture::new(&format!("badnorm({n},{r})"), d, Ambient::HalfSpace, g.clone(), named)
}

/// {x = 0, y = t} and {y = 0, -ωt ≤ x ≤ ωt} over the lexicographic basis (ω).
pub fn thm45() -> Result<Fixture> {
    let b = SymbolBasis::lexicographic(&["w"]);
    let w = b.symbol(0);
    let g = ValueGroup::new(vec![Scalar::one(), w.clone()])?;
    let named = vec![
        ("vertical".to_string(), Cone::from_rays(3, vec![vec![s(0), s(1), s(1)]], vec![])?),
        ("horizontal".to_string(), segment(&[-w.clone(), s(0)], &[w, s(0)])?),
    ];
    Fixture::new("thm45", 3, Ambient::HalfSpace, g, named)
}

/// {w_i ≥ 0, w_1 + ... + w_m ≤ γ t} in R^n × R≥0.
pub fn model(m: usize, n: usize, gamma: &Scalar, g: &ValueGroup) -> Result<Fixture> {
    if m == 0 || m > n {
        return Err(Error::SemanticError("model needs 1 <= m <= n".into()));
    }
    let mut ineqs: Vec<HomFunctional> = (0..n)
        .map(|i| {
            let mut u = vec![Rat::zero(); n];
            u[i] = Rat::one();
            HomFunctional::new(u, Scalar::zero())
        })
        .collect();
    let u: Vec<Rat> = (0..n).map(|i| if i < m { int(-1) } else { Rat::zero() }).collect();
    ineqs.push(HomFunctional::new(u, gamma.clone()));
    ineqs.push(HomFunctional::new(vec![Rat::zero(); n], Scalar::one()));
    let c = Cone::from_h(n + 1, vec![], ineqs)?;
    Fixture::new(&format!("model({m},{n})"), n + 1, Ambient::HalfSpace, g.clone(), vec![("model".to_string(), c)])
}

/// Look up a fixture by CLI name; `badnorm` and `model` take integer parameters.
pub fn by_name(name: &str, params: &[i64]) -> Result<Fixture> {
    let p = |i: usize, dflt: i64| params.get(i).copied().unwrap_or(dflt);
    match name {
        "dart" => dart(),
        "dart-lift" => dart_lift(),
        "dart-completion" => dart_completion(),
        "badnorm" => badnorm(p(0, 1).max(1) as usize, p(1, 2), &Scalar::one(), &z_sqrt2()?),
        "thm45" => thm45(),
        "model" => {
            let g = ValueGroup::integers();
            model(p(0, 1).max(1) as usize, p(1, 1).max(1) as usize, &s(p(2, 1)), &g)
        }
        _ => Err(Error::SemanticError(format!("unknown fixture `{name}`"))),
    }
}
