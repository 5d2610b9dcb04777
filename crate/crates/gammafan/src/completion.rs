//! Completion of rational fans, and of Γ-admissible fans through the reduction.

use std::collections::HashMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{is_admissible_fan, ValueGroup};
use crate::linalg;
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::polyhedra::cone::{common_face_test, point_to_rats, rat_point, Cone, HomFunctional, Point};
use crate::polyhedra::fan::{pullback, Ambient, CompletenessReport, Fan, FreeFacet, SAMPLE_SEED};
use crate::polyhedra::separate::separate_cones;
use crate::reduction::{reduce, ReductionSummary};
use crate::scalar::{parse_rat, Rat, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    StarJoin,
    ContactFill,
    SliverFill,
    /// Gap filling in the plane.
    Angular,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "star-join" => Ok(Strategy::StarJoin),
            "contact-fill" => Ok(Strategy::ContactFill),
            "sliver-fill" => Ok(Strategy::SliverFill),
            other => Err(Error::SemanticError(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Which rays fill_step tries before constructing a new one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolPolicy {
    None,
    ExistingRays,
    ExistingAndAxes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub order: Vec<Strategy>,
    pub cap: usize,
    pub pool: PoolPolicy,
    /// Pool candidates checked per step.
    pub max_candidates: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            order: vec![Strategy::StarJoin, Strategy::ContactFill, Strategy::SliverFill],
            cap: 10_000,
            pool: PoolPolicy::ExistingAndAxes,
            max_candidates: 64,
        }
    }
}

impl EngineConfig {
    pub fn parse_order(s: &str) -> Result<Vec<Strategy>> {
        s.split(',').map(Strategy::from_str).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(Error::SemanticError("engine cap must be at least 1".into()));
        }
        if !self.order.iter().any(|s| *s == Strategy::SliverFill || *s == Strategy::ContactFill) && !self.order.contains(&Strategy::StarJoin) {
            return Err(Error::SemanticError("empty strategy order".into()));
        }
        Ok(())
    }
}

/// One added cone: cone(facet, ray).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub strategy: Strategy,
    pub facet: Vec<Vec<String>>,
    pub ray: Vec<String>,
    pub thresholds: Vec<String>,
}

impl TraceStep {
    fn new(strategy: Strategy, facet: &[Vec<Rat>], ray: &[Rat], thresholds: Vec<String>) -> Self {
        let txt = |v: &[Rat]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>();
        TraceStep { strategy, facet: facet.iter().map(|r| txt(r)).collect(), ray: txt(ray), thresholds }
    }

    fn cone(&self, d: usize) -> Result<Cone> {
        let parse = |v: &[String]| -> Result<Vec<Rat>> {
            v.iter().map(|s| parse_rat(s).ok_or_else(|| Error::SemanticError(format!("bad number `{s}` in trace")))).collect()
        };
        let mut rays: Vec<Point> = self.facet.iter().map(|r| parse(r).map(|v| rat_point(&v))).collect::<Result<_>>()?;
        rays.push(rat_point(&parse(&self.ray)?));
        Cone::from_rays(d, rays, vec![])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletionVerdict {
    pub ok: bool,
    pub fan_axiom: bool,
    pub contains_input: bool,
    pub completeness: CompletenessReport,
    pub witness: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CompletionReport {
    pub fan: Fan,
    pub trace: Vec<TraceStep>,
    pub verdict: CompletionVerdict,
}

/// Fan axiom on the completion, Σ a subfan, and completeness by both tests.
pub fn verify_completion(sigma: &Fan, bar: &Fan) -> CompletionVerdict {
    verify_completion_seeded(sigma, bar, SAMPLE_SEED)
}

pub fn verify_completion_seeded(sigma: &Fan, bar: &Fan, seed: u64) -> CompletionVerdict {
    let fan_axiom = matches!(bar.check_axiom(), Ok(None));
    let missing = sigma.maximal().iter().find(|c| !bar.contains_cone(c));
    let contains_input = sigma.ambient_dim() == bar.ambient_dim() && missing.is_none();
    let completeness = bar.completeness_seeded(seed);
    let witness = if !fan_axiom {
        Some("two maximal cones do not meet in a common face".to_string())
    } else if let Some(c) = missing {
        Some(format!("input cone with rays {:?} is not a cone of the completion", c.rays()))
    } else {
        completeness.witness.clone()
    };
    CompletionVerdict { ok: fan_axiom && contains_input && completeness.complete, fan_axiom, contains_input, completeness, witness }
}

fn rats(p: &[Scalar]) -> Vec<Rat> {
    point_to_rats(p).expect("rational fan")
}

fn primitive(v: &[Rat]) -> Vec<Rat> {
    linalg::primitive_rat(v).map(|p| linalg::to_rat_vec(&p)).unwrap_or_else(|_| v.to_vec())
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_f64(v: &[Rat]) -> Vec<f64> {
    let f: Vec<f64> = v.iter().map(|q| q.to_f64().unwrap_or(0.0)).collect();
    let n = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    f.iter().map(|x| x / n.max(1e-300)).collect()
}

fn in_interior_of_some(cones: &[Cone], r: &Point) -> bool {
    cones.iter().any(|c| c.contains(r))
}

/// τ ∩ σ = {0} via one strictly negative facet, else the exact common-face test.
fn compatible(tau: &Cone, sigma: &Cone) -> bool {
    let strictly = |a: &Cone, b: &Cone| {
        a.facets().iter().any(|h| b.rays().iter().all(|r| h.eval(r).is_negative()) && b.lines().is_empty())
    };
    if strictly(sigma, tau) || strictly(tau, sigma) {
        return true;
    }
    common_face_test(tau, sigma).unwrap_or(false)
}

/// Working state: maximal cones and an index from facets to owners.
struct Engine {
    d: usize,
    ambient: Ambient,
    cones: Vec<Cone>,
    owners: HashMap<Cone, Vec<usize>>,
    order: Vec<Cone>,
}

impl Engine {
    fn new(f: &Fan) -> Engine {
        let mut e = Engine { d: f.ambient_dim(), ambient: f.ambient(), cones: Vec::new(), owners: HashMap::new(), order: Vec::new() };
        for c in f.maximal() {
            e.add(c.clone());
        }
        e
    }

    fn add(&mut self, c: Cone) {
        let i = self.cones.len();
        if c.dim() == self.d {
            for f in c.facet_cones() {
                let entry = self.owners.entry(f.clone()).or_default();
                if entry.is_empty() {
                    self.order.push(f);
                }
                entry.push(i);
            }
        }
        self.cones.push(c);
    }

    fn on_boundary(&self, f: &Cone) -> bool {
        self.ambient == Ambient::HalfSpace && f.rays().iter().all(|r| r[self.d - 1].is_zero())
    }

    fn free(&self) -> Vec<FreeFacet> {
        let mut out = Vec::new();
        for f in &self.order {
            let o = &self.owners[f];
            if o.len() != 1 || self.on_boundary(f) {
                continue;
            }
            let owner = &self.cones[o[0]];
            let inner = owner
                .facets()
                .iter()
                .find(|h| f.rays().iter().all(|r| h.eval(r).is_zero()))
                .expect("facet functional")
                .clone();
            out.push(FreeFacet { facet: f.clone(), owner: o[0], inner });
        }
        out
    }

    fn fits(&self, tau: &Cone) -> bool {
        if self.ambient == Ambient::HalfSpace && tau.rays().iter().any(|r| r[self.d - 1].is_negative()) {
            return false;
        }
        let mut probes = vec![tau.interior_point()];
        for r in tau.rays() {
            probes.push(r.iter().zip(&probes[0]).map(|(x, p)| &x.mul_rat(&Rat::from_integer(BigInt::from(8))) + p).collect());
        }
        let strictly_inside = |s: &Cone, p: &Point| s.dim() == self.d && s.contains_relint(p);
        if self.cones.iter().any(|s| probes.iter().any(|p| strictly_inside(s, p))) {
            return false;
        }
        let touches = |s: &Cone| s.rays().iter().any(|r| tau.rays().contains(r));
        let (near, far): (Vec<&Cone>, Vec<&Cone>) = self.cones.iter().partition(|s| touches(s));
        near.into_iter().chain(far).all(|s| compatible(tau, s))
    }

    fn fan(&self) -> Fan {
        Fan::from_max_unchecked(self.d, self.ambient, self.cones.clone())
    }

    fn rays(&self) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = Vec::new();
        for c in &self.cones {
            for r in c.rays() {
                let v = primitive(&rats(r));
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

/// Promote lower-dimensional maximal cones until every cone is a face of a
/// full-dimensional one.
pub fn purify(f: &Fan) -> Fan {
    let d = f.ambient_dim();
    let mut cur: Vec<Cone> = f.maximal().to_vec();
    loop {
        let Some(i) = cur.iter().position(|c| c.dim() < d) else { break };
        let sigma = cur[i].clone();
        let others: Vec<Cone> = cur.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.clone()).collect();
        let promoted = promotion_directions(&sigma, d, f.ambient())
            .into_iter()
            .find_map(|v| promote(&sigma, &v, &others, f.ambient()))
            .expect("some direction promotes the cone");
        cur[i] = promoted;
        cur.push(sigma);
        cur = Fan::from_max_unchecked(d, f.ambient(), cur).maximal().to_vec();
    }
    Fan::from_max_unchecked(d, f.ambient(), cur)
}

fn promotion_directions(sigma: &Cone, d: usize, ambient: Ambient) -> Vec<Point> {
    let mut out = Vec::new();
    let relint = sigma.interior_point();
    let signs: &[i64] = if ambient == Ambient::HalfSpace { &[1] } else { &[1, -1] };
    for &s in signs {
        for j in 0..d {
            let mut v = vec![Scalar::zero(); d];
            v[j] = Scalar::from_int(s);
            out.push(v.clone());
            out.push(v.iter().zip(&relint).map(|(a, b)| a + b).collect());
        }
    }
    if ambient == Ambient::HalfSpace {
        for j in 0..d - 1 {
            let mut v = vec![Scalar::zero(); d];
            v[j] = Scalar::from_int(-1);
            v[d - 1] = Scalar::one();
            out.push(v);
        }
    }
    out
}

fn promote(sigma: &Cone, v: &Point, others: &[Cone], ambient: Ambient) -> Option<Cone> {
    let d = sigma.ambient_dim();
    let mut rays = sigma.rays().to_vec();
    rays.push(v.clone());
    let mut c = Cone::from_rays(d, rays, sigma.lines().to_vec()).ok()?;
    if c.dim() != sigma.dim() + 1 || !c.is_pointed() {
        return None;
    }
    for tau in others {
        let y = separate_cones(sigma, tau, None).ok()?;
        c = c.cut(&[], &[y]).ok()?;
    }
    if c.dim() != sigma.dim() + 1 || !c.has_face(sigma) {
        return None;
    }
    if ambient == Ambient::HalfSpace && c.rays().iter().any(|r| r[d - 1].is_negative()) {
        return None;
    }
    others.iter().all(|t| compatible(&c, t)).then_some(c)
}

/// cone(F, r) for every free facet visible from r, accepted only as a whole batch.
pub fn star_join(f: &Fan, faces: &[FreeFacet], r: &[Rat]) -> Result<Vec<Cone>> {
    let e = Engine::new(f);
    star_batch(&e, faces, r)
}

fn star_batch(e: &Engine, faces: &[FreeFacet], r: &[Rat]) -> Result<Vec<Cone>> {
    let rp = rat_point(r);
    if r.iter().all(|x| x.is_zero()) || in_interior_of_some(&e.cones, &rp) {
        return Err(Error::NotStarShaped("center lies in the support".into()));
    }
    let mut batch: Vec<Cone> = Vec::new();
    for ff in faces.iter().filter(|ff| ff.inner.eval(&rp).is_negative()) {
        let mut rays = ff.facet.rays().to_vec();
        rays.push(rp.clone());
        let c = Cone::from_rays(e.d, rays, vec![])?;
        if !e.fits(&c) {
            return Err(Error::NotStarShaped(format!("cone over {:?} meets the fan badly", ff.facet.rays())));
        }
        if batch.iter().any(|b| !compatible(&c, b)) {
            return Err(Error::NotStarShaped("batch cones overlap".into()));
        }
        batch.push(c);
    }
    if batch.is_empty() {
        return Err(Error::NotStarShaped("no visible facet".into()));
    }
    Ok(batch)
}

fn star_centers(e: &Engine, free: &[FreeFacet]) -> Vec<Vec<Rat>> {
    let d = e.d;
    let mut out: Vec<Vec<Rat>> = Vec::new();
    let mut push = |v: Vec<Rat>| {
        if v.iter().any(|x| !x.is_zero()) {
            let v = primitive(&v);
            if !out.contains(&v) {
                out.push(v);
            }
        }
    };
    let mut total = vec![Rat::zero(); d];
    for c in &e.cones {
        let p = rats(&c.interior_point());
        let s: Rat = p.iter().map(|x| x.abs()).sum();
        for k in 0..d {
            total[k] += &p[k] / &s;
        }
    }
    push(total.iter().map(|x| -x).collect());
    for ff in free.iter().take(8) {
        let (p, nu) = facet_frame(ff);
        push(p.iter().zip(&nu).map(|(a, b)| a + b).collect());
    }
    for j in 0..d {
        for s in [1, -1] {
            let mut v = vec![Rat::zero(); d];
            v[j] = Rat::from_integer(BigInt::from(s));
            push(v);
        }
    }
    if e.ambient == Ambient::HalfSpace {
        out.retain(|v| !v[d - 1].is_negative());
    }
    out
}

/// A relative-interior point p of F (sum of primitive rays) and the outward normal ν.
fn facet_frame(ff: &FreeFacet) -> (Vec<Rat>, Vec<Rat>) {
    let d = ff.facet.ambient_dim();
    let mut p = vec![Rat::zero(); d];
    for r in ff.facet.rays() {
        let v = primitive(&rats(r));
        for k in 0..d {
            p[k] += &v[k];
        }
    }
    let nu = primitive(&ff.outward().expect("rational facet"));
    (p, nu)
}

/// a_σ = min{ε ≥ 0 : x + p + εν ∈ σ for some x ∈ F}; None when unreachable.
fn threshold(sigma: &Cone, facet: &Cone, p: &[Rat], nu: &[Rat]) -> Option<Rat> {
    let fr: Vec<Vec<Rat>> = facet.rays().iter().map(|r| rats(r)).collect();
    let m = fr.len();
    let mut lp = Lp::new(m + 1, false);
    lp.obj[m] = Scalar::one();
    let row = |h: &HomFunctional| -> (Vec<Rat>, Rat) {
        let hv = h.to_rats().expect("rational");
        let mut a: Vec<Rat> = fr.iter().map(|r| dot(&hv, r)).collect();
        a.push(dot(&hv, nu));
        (a, -dot(&hv, p))
    };
    for h in sigma.facets() {
        let (a, b) = row(h);
        lp.add(a, Cmp::Ge, Scalar::rational(b));
    }
    for h in sigma.eqs() {
        let (a, b) = row(h);
        lp.add(a, Cmp::Eq, Scalar::rational(b));
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => x[m].to_rat(),
        _ => None,
    }
}

fn step_cone(d: usize, facet: &Cone, r: &[Rat]) -> Result<Cone> {
    let mut rays = facet.rays().to_vec();
    rays.push(rat_point(r));
    Cone::from_rays(d, rays, vec![])
}

fn pool_candidates(e: &Engine, ff: &FreeFacet, free: &[FreeFacet], aux: &[Vec<Rat>], cfg: &EngineConfig) -> Vec<Vec<Rat>> {
    if cfg.pool == PoolPolicy::None {
        return Vec::new();
    }
    let (p, nu) = facet_frame(ff);
    let (ph, nh) = (norm_f64(&p), norm_f64(&nu));
    let target: Vec<f64> = ph.iter().zip(&nh).map(|(a, b)| a + b).collect();
    let own: Vec<Vec<Rat>> = ff.facet.rays().iter().map(|r| primitive(&rats(r))).collect();
    let ridge_neighbors: Vec<Vec<Rat>> = free
        .iter()
        .filter(|g| g.facet != ff.facet)
        .filter(|g| {
            let shared = g.facet.rays().iter().filter(|r| ff.facet.rays().contains(r)).count();
            shared + 1 >= ff.facet.rays().len().min(g.facet.rays().len()) && shared >= e.d.saturating_sub(2)
        })
        .flat_map(|g| g.facet.rays().iter().map(|r| primitive(&rats(r))).collect::<Vec<_>>())
        .collect();
    let mut all = e.rays();
    if cfg.pool == PoolPolicy::ExistingAndAxes {
        all.extend(aux.iter().cloned());
    }
    let score = |r: &Vec<Rat>| {
        let rh = norm_f64(r);
        let t: f64 = rh.iter().zip(&target).map(|(a, b)| a * b).sum();
        let near = if ridge_neighbors.contains(r) { 10.0 } else { 0.0 };
        near + t
    };
    let mut cands: Vec<(f64, Vec<Rat>)> = Vec::new();
    for r in all {
        if own.contains(&r) || !dot(&nu, &r).is_positive() || cands.iter().any(|(_, c)| *c == r) {
            continue;
        }
        if e.ambient == Ambient::HalfSpace && r[e.d - 1].is_negative() {
            continue;
        }
        cands.push((score(&r), r));
    }
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.1.cmp(&b.1)));
    cands.into_iter().take(cfg.max_candidates).map(|(_, r)| r).collect()
}

/// One cone over a free facet: a pool ray if one fits, else p + εν with the contact
/// threshold, else half of it.
pub fn fill_step(f: &Fan, ff: &FreeFacet, cfg: &EngineConfig) -> Result<Cone> {
    let e = Engine::new(f);
    let free = e.free();
    fill(&e, ff, &free, &axes(e.d), cfg).map(|(c, _)| c)
}

fn fill(e: &Engine, ff: &FreeFacet, free: &[FreeFacet], aux: &[Vec<Rat>], cfg: &EngineConfig) -> Result<(Cone, TraceStep)> {
    let facet_rays: Vec<Vec<Rat>> = ff.facet.rays().iter().map(|r| rats(r)).collect();
    if cfg.order.contains(&Strategy::ContactFill) {
        for r in pool_candidates(e, ff, free, aux, cfg) {
            let c = step_cone(e.d, &ff.facet, &r)?;
            if e.fits(&c) {
                return Ok((c, TraceStep::new(Strategy::ContactFill, &facet_rays, &r, vec!["pool".into()])));
            }
        }
    }
    let (p, nu) = facet_frame(ff);
    let mut obstacles: Vec<Cone> = e.cones.iter().filter(|s| !s.contains_cone(&ff.facet)).cloned().collect();
    if e.ambient == Ambient::HalfSpace {
        let mut t = vec![Rat::zero(); e.d];
        t[e.d - 1] = -Rat::one();
        obstacles.push(Cone::from_h(e.d, vec![], vec![HomFunctional::from_rats(&t)])?);
    }
    let ts: Vec<Rat> = obstacles.iter().filter_map(|s| threshold(s, &ff.facet, &p, &nu)).collect();
    debug_assert!(ts.iter().all(|t| t.is_positive()));
    let amin = ts.iter().min().cloned();
    let thr = vec![amin.as_ref().map(|a| a.to_string()).unwrap_or_else(|| "inf".into())];
    let ray = |eps: &Rat| primitive(&p.iter().zip(&nu).map(|(a, b)| a + b * eps).collect::<Vec<_>>());
    let Some(a) = amin else {
        let r = ray(&Rat::one());
        let c = step_cone(e.d, &ff.facet, &r)?;
        return if e.fits(&c) { Ok((c, TraceStep::new(Strategy::SliverFill, &facet_rays, &r, thr))) } else { Err(Error::NoValidRay) };
    };
    if cfg.order.contains(&Strategy::ContactFill) {
        let r = ray(&a);
        let c = step_cone(e.d, &ff.facet, &r)?;
        if e.fits(&c) {
            return Ok((c, TraceStep::new(Strategy::ContactFill, &facet_rays, &r, thr)));
        }
    }
    let r = ray(&(a / Rat::from_integer(BigInt::from(2))));
    let c = step_cone(e.d, &ff.facet, &r)?;
    if e.fits(&c) {
        Ok((c, TraceStep::new(Strategy::SliverFill, &facet_rays, &r, thr)))
    } else {
        Err(Error::NoValidRay)
    }
}

fn axes(d: usize) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    let unit = |j: usize, s: i64| {
        let mut v = vec![Rat::zero(); d];
        v[j] = Rat::from_integer(BigInt::from(s));
        v
    };
    for j in 0..d {
        for s in [1, -1] {
            out.push(unit(j, s));
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = unit(i, a);
                v[j] = Rat::from_integer(BigInt::from(b));
                out.push(v);
            }
        }
    }
    out
}

fn exhausted(steps: usize, reason: String, trace: &[TraceStep]) -> Error {
    let trace = trace.iter().map(|s| serde_json::to_string(s).unwrap_or_default()).collect();
    Error::CompletionEngineExhausted { steps, reason, trace }
}

/// Σ̄ ⊇ Σ with |Σ̄| the whole ambient space, verified before it is returned.
pub fn complete_rational(f: &Fan, cfg: &EngineConfig) -> Result<CompletionReport> {
    cfg.validate()?;
    if !f.maximal().iter().all(|c| c.is_rational()) {
        return Err(Error::SemanticError("complete_rational needs a rational fan".into()));
    }
    let d = f.ambient_dim();
    if f.is_complete() {
        return Ok(CompletionReport { fan: f.clone(), trace: Vec::new(), verdict: verify_completion(f, f) });
    }
    let (bar, trace) = if d <= 2 && f.ambient() == Ambient::Full {
        complete_2d_traced(f)?
    } else {
        run_engine(f, cfg)?
    };
    let verdict = verify_completion(f, &bar);
    if !verdict.ok {
        return Err(exhausted(trace.len(), format!("verification failed: {:?}", verdict.witness), &trace));
    }
    Ok(CompletionReport { fan: bar, trace, verdict })
}

fn run_engine(f: &Fan, cfg: &EngineConfig) -> Result<(Fan, Vec<TraceStep>)> {
    let mut e = Engine::new(&purify(f));
    let aux: Vec<Vec<Rat>> = axes(e.d).into_iter().filter(|r| !in_interior_of_some(&e.cones, &rat_point(r))).collect();
    let mut trace: Vec<TraceStep> = Vec::new();
    let mut next_star = 0usize;
    let mut iter = 0usize;
    loop {
        let free = e.free();
        if free.is_empty() {
            break;
        }
        if trace.len() >= cfg.cap {
            return Err(exhausted(trace.len(), format!("cap reached with {} free facets", free.len()), &trace));
        }
        if cfg.order.contains(&Strategy::StarJoin) && iter == next_star {
            next_star = (next_star * 2).max(1);
            let mut joined = false;
            for r in star_centers(&e, &free) {
                if let Ok(batch) = star_batch(&e, &free, &r) {
                    for c in &batch {
                        let rays: Vec<Vec<Rat>> = c.rays().iter().map(|x| rats(x)).filter(|x| primitive(x) != primitive(&r)).collect();
                        trace.push(TraceStep::new(Strategy::StarJoin, &rays, &r, Vec::new()));
                    }
                    for c in batch {
                        e.add(c);
                    }
                    joined = true;
                    break;
                }
            }
            iter += 1;
            if joined {
                continue;
            }
        }
        iter += 1;
        if !cfg.order.iter().any(|s| matches!(s, Strategy::ContactFill | Strategy::SliverFill)) {
            return Err(exhausted(trace.len(), "no fill strategy enabled".into(), &trace));
        }
        let mut done = false;
        for ff in &free {
            match fill(&e, ff, &free, &aux, cfg) {
                Ok((c, step)) => {
                    trace.push(step);
                    e.add(c);
                    done = true;
                    break;
                }
                Err(Error::NoValidRay) => continue,
                Err(err) => return Err(err),
            }
        }
        if !done {
            return Err(exhausted(trace.len(), "no free facet admits a valid ray".into(), &trace));
        }
    }
    Ok((e.fan(), trace))
}

/// Re-applies a trace after the deterministic purification and verifies the result.
pub fn replay(f: &Fan, trace: &[TraceStep]) -> Result<Fan> {
    let d = f.ambient_dim();
    let base = if d <= 2 && f.ambient() == Ambient::Full { f.clone() } else { purify(f) };
    let mut e = Engine::new(&base);
    for (i, s) in trace.iter().enumerate() {
        let c = s.cone(d)?;
        if !e.fits(&c) {
            return Err(Error::SemanticError(format!("trace step {i} does not fit")));
        }
        e.add(c);
    }
    let bar = e.fan();
    let v = verify_completion(f, &bar);
    if !v.ok {
        return Err(Error::SemanticError(format!("replayed fan fails verification: {:?}", v.witness)));
    }
    Ok(bar)
}

fn cross(a: &[Rat], b: &[Rat]) -> Rat {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn upper(a: &[Rat]) -> bool {
    a[1].is_positive() || (a[1].is_zero() && a[0].is_positive())
}

/// Exact angular gap filling in a two-dimensional ambient space.
pub fn complete_2d(f: &Fan) -> Result<Fan> {
    complete_2d_traced(f).map(|(bar, _)| bar)
}

fn complete_2d_traced(f: &Fan) -> Result<(Fan, Vec<TraceStep>)> {
    let d = f.ambient_dim();
    if d == 1 {
        let mut cones = f.maximal().to_vec();
        let mut trace = Vec::new();
        for s in [1, -1] {
            let v = vec![Rat::from_integer(BigInt::from(s))];
            if !f.support_contains(&rat_point(&v)) {
                cones.push(Cone::from_rays(1, vec![rat_point(&v)], vec![])?);
                trace.push(TraceStep::new(Strategy::Angular, &[], &v, Vec::new()));
            }
        }
        return Ok((Fan::from_max_unchecked(1, Ambient::Full, cones), trace));
    }
    if d != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: d });
    }
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    for c in f.cones() {
        if c.dim() == 1 {
            let v = primitive(&rats(&c.rays()[0]));
            if !rays.contains(&v) {
                rays.push(v);
            }
        }
    }
    let mut lines_present = false;
    for c in f.maximal() {
        for l in c.lines() {
            lines_present = true;
            for s in [Rat::one(), -Rat::one()] {
                let v = primitive(&rats(l).iter().map(|x| x * &s).collect::<Vec<_>>());
                if !rays.contains(&v) {
                    rays.push(v);
                }
            }
        }
    }
    if lines_present {
        return Err(Error::SemanticError("complete_2d expects pointed cones".into()));
    }
    rays.sort_by(|a, b| {
        let (ua, ub) = (upper(a), upper(b));
        if ua != ub {
            return ub.cmp(&ua);
        }
        0.cmp(&cross(a, b).signum().to_i32().unwrap_or(0))
    });
    let covered = |a: &[Rat], b: &[Rat]| {
        let mid: Vec<Rat> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        cross(a, b).is_positive() && f.support_contains(&rat_point(&mid))
    };
    let rot = |a: &[Rat]| vec![-a[1].clone(), a[0].clone()];
    let mut new: Vec<(Vec<Rat>, Vec<Rat>)> = Vec::new();
    if rays.is_empty() {
        let e1 = vec![Rat::one(), Rat::zero()];
        let mut a = e1.clone();
        for _ in 0..4 {
            let b = rot(&a);
            new.push((a, b.clone()));
            a = b;
        }
    }
    let n = rays.len();
    for i in 0..n {
        let a = rays[i].clone();
        let b = rays[(i + 1) % n].clone();
        if n > 1 && covered(&a, &b) {
            continue;
        }
        let mut chain = vec![a.clone()];
        loop {
            let last = chain.last().unwrap().clone();
            let cr = cross(&last, &b);
            let small = cr.is_positive() && !(n == 1 && chain.len() == 1);
            if small {
                break;
            }
            chain.push(rot(&last));
            if chain.len() > 5 {
                break;
            }
        }
        chain.push(b);
        for w in chain.windows(2) {
            new.push((w[0].clone(), w[1].clone()));
        }
    }
    let mut cones = f.maximal().to_vec();
    let mut trace = Vec::new();
    for (a, b) in new {
        cones.push(Cone::from_rays(2, vec![rat_point(&a), rat_point(&b)], vec![])?);
        trace.push(TraceStep::new(Strategy::Angular, &[a], &b, Vec::new()));
    }
    Ok((Fan::from_max_unchecked(2, Ambient::Full, cones), trace))
}

/// The full pipeline for a Γ-admissible fan.
#[derive(Debug, Clone)]
pub struct AdmissibleCompletion {
    pub fan: Fan,
    pub reduction: Option<ReductionSummary>,
    pub report: Option<CompletionReport>,
    pub verdict: CompletionVerdict,
    pub admissible: bool,
}

pub fn complete_admissible(f: &Fan, g: &ValueGroup, cfg: &EngineConfig) -> Result<AdmissibleCompletion> {
    if !is_admissible_fan(f, g)?.verdict {
        return Err(Error::SemanticError("input fan is not admissible for the given value group".into()));
    }
    if f.is_complete() {
        return Ok(AdmissibleCompletion { fan: f.clone(), reduction: None, report: None, verdict: verify_completion(f, f), admissible: true });
    }
    let red = reduce(f, g)?;
    let report = complete_rational(&red.lifted, cfg)?;
    let bar = pullback(&report.fan, &red.gamma_bar)?;
    let verdict = verify_completion(f, &bar);
    let admissible = is_admissible_fan(&bar, g)?.verdict;
    if !verdict.ok || !admissible {
        return Err(exhausted(report.trace.len(), format!("pulled-back completion fails verification: {:?}", verdict.witness), &report.trace));
    }
    Ok(AdmissibleCompletion { fan: bar, reduction: Some(red.summary()), report: Some(report), verdict, admissible })
}
