//! Polyhedra in N_R as slices of cones at height one.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polyhedra::cone::{point_to_rats, Cone, HomFunctional, Point};
use crate::polyhedra::fan::{Ambient, Fan};
use crate::polyhedra::farkas::Ineq;
use crate::scalar::{Rat, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polyhedron {
    cone: Cone,
}

fn t_of(p: &Point) -> Rat {
    p.last().and_then(|t| t.to_rat()).expect("rational height")
}

impl Polyhedron {
    /// The slice of a cone in N×R≥0 at t = 1.
    pub fn from_cone(c: Cone) -> Result<Polyhedron> {
        if !c.rays().iter().any(|r| t_of(r).is_positive()) {
            return Err(Error::Empty);
        }
        let t = HomFunctional::new(vec![Rat::zero(); c.ambient_dim() - 1], Scalar::one());
        let cone = c.cut(&[], &[t])?;
        Ok(Polyhedron { cone })
    }

    /// {<u,x> >= a} ∩ {<u,x> = a}.
    pub fn from_ineqs(n: usize, eqs: &[Ineq], ineqs: &[Ineq]) -> Result<Polyhedron> {
        let h = |i: &Ineq| HomFunctional::new(i.u.clone(), -i.a.clone());
        let mut fs: Vec<HomFunctional> = ineqs.iter().map(h).collect();
        fs.push(HomFunctional::new(vec![Rat::zero(); n], Scalar::one()));
        Polyhedron::from_cone(Cone::from_h(n + 1, eqs.iter().map(h).collect(), fs)?)
    }

    pub fn from_vertices(verts: &[Point], rays: &[Vec<Rat>]) -> Result<Polyhedron> {
        let n = verts.first().map(|v| v.len()).ok_or(Error::Empty)?;
        let mut gens: Vec<Point> = verts
            .iter()
            .map(|v| {
                let mut p = v.clone();
                p.push(Scalar::one());
                p
            })
            .collect();
        for r in rays {
            let mut p: Point = r.iter().cloned().map(Scalar::rational).collect();
            p.push(Scalar::zero());
            gens.push(p);
        }
        Polyhedron::from_cone(Cone::from_rays(n + 1, gens, vec![])?)
    }

    pub fn homogenization(&self) -> &Cone {
        &self.cone
    }

    pub fn ambient_dim(&self) -> usize {
        self.cone.ambient_dim() - 1
    }

    pub fn dim(&self) -> usize {
        self.cone.dim() - 1
    }

    pub fn vertices(&self) -> Vec<Point> {
        crate::gamma::vertices(&self.cone)
    }

    pub fn recession_rays(&self) -> Vec<Vec<Rat>> {
        self.cone
            .rays()
            .iter()
            .filter(|r| t_of(r).is_zero())
            .map(|r| point_to_rats(&r[..r.len() - 1]).expect("rational recession ray"))
            .collect()
    }

    pub fn is_bounded(&self) -> bool {
        self.cone.rays().iter().all(|r| t_of(r).is_positive()) && self.cone.lines().is_empty()
    }

    fn lift(x: &[Scalar]) -> Point {
        let mut p = x.to_vec();
        p.push(Scalar::one());
        p
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        self.cone.contains(&Self::lift(x))
    }

    pub fn contains_relint(&self, x: &[Scalar]) -> bool {
        self.cone.contains_relint(&Self::lift(x))
    }

    /// Nonempty faces, largest first.
    pub fn faces(&self) -> Vec<Polyhedron> {
        self.cone
            .faces()
            .into_iter()
            .filter(|f| f.rays().iter().any(|r| t_of(r).is_positive()))
            .map(|cone| Polyhedron { cone })
            .collect()
    }

    /// Direction of a one-dimensional polyhedron.
    pub fn direction(&self) -> Option<Point> {
        if self.dim() != 1 {
            return None;
        }
        let v = self.vertices();
        if v.len() >= 2 {
            return Some(v[1].iter().zip(&v[0]).map(|(a, b)| a - b).collect());
        }
        if let Some(r) = self.recession_rays().first() {
            return Some(r.iter().cloned().map(Scalar::rational).collect());
        }
        self.cone.lines().first().map(|l| l[..l.len() - 1].to_vec())
    }
}

pub fn homogenize(p: &Polyhedron) -> Cone {
    p.cone.clone()
}

/// Π and the recession cones of a fan in N×R≥0.
#[derive(Debug, Clone)]
pub struct PolyhedralComplex {
    pub maximal: Vec<Polyhedron>,
    pub recession: Vec<Cone>,
}

impl PolyhedralComplex {
    /// All nonempty faces of the maximal polyhedra.
    pub fn cells(&self) -> Vec<Polyhedron> {
        let mut out: Vec<Polyhedron> = Vec::new();
        for p in &self.maximal {
            for f in p.faces() {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
        out
    }

    pub fn vertices(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for p in &self.maximal {
            for v in p.vertices() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Back to cones; reconstructs every cone of the fan meeting height 1.
    pub fn homogenize(&self) -> Vec<Cone> {
        self.cells().iter().map(homogenize).collect()
    }
}

pub fn dehomogenize(f: &Fan) -> Result<PolyhedralComplex> {
    if f.ambient() != Ambient::HalfSpace {
        return Err(Error::WrongAmbient);
    }
    let mut maximal = Vec::new();
    let mut recession = Vec::new();
    for c in f.cones() {
        let meets = c.rays().iter().any(|r| t_of(r).is_positive());
        if !meets {
            recession.push(c.clone());
        }
    }
    for c in f.maximal() {
        if c.rays().iter().any(|r| t_of(r).is_positive()) {
            maximal.push(Polyhedron { cone: c.clone() });
        }
    }
    Ok(PolyhedralComplex { maximal, recession })
}

/// The unique edge of a 2-dimensional P through a boundary point x.
pub fn boundary_edge_through(p: &Polyhedron, x: &[Scalar]) -> Result<Polyhedron> {
    if p.ambient_dim() != 2 || x.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: x.len() });
    }
    if !p.contains(x) || (p.dim() == 2 && p.contains_relint(x)) {
        return Err(Error::NotOnBoundary);
    }
    let edges: Vec<Polyhedron> = p.faces().into_iter().filter(|f| f.dim() == 1 && f.contains(x)).collect();
    match edges.len() {
        0 => Err(Error::NotOnBoundary),
        1 => Ok(edges.into_iter().next().unwrap()),
        _ => Err(Error::NonUnique),
    }
}

/// Slope of a direction in the plane, None for vertical.
pub fn slope(d: &[Scalar]) -> Option<Scalar> {
    let dx = d[0].to_rat();
    match dx {
        Some(q) if q.is_zero() => None,
        Some(q) => Some(d[1].div_rat(&q)),
        None => {
            let dy = d[1].to_rat()?;
            if dy.is_zero() {
                Some(Scalar::zero())
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::cone::int_point;
    use crate::scalar::{int, rat, SymbolBasis};

    fn square() -> Polyhedron {
        Polyhedron::from_vertices(&[int_point(&[0, 0]), int_point(&[1, 0]), int_point(&[1, 1]), int_point(&[0, 1])], &[]).unwrap()
    }

    #[test]
    fn square_edges() {
        let p = square();
        assert_eq!(p.dim(), 2);
        assert!(p.is_bounded());
        assert_eq!(p.faces().len(), 9);
        let x = vec![Scalar::rational(rat(1, 2)), Scalar::zero()];
        let e = boundary_edge_through(&p, &x).unwrap();
        assert_eq!(slope(&e.direction().unwrap()), Some(Scalar::zero()));
        assert_eq!(boundary_edge_through(&p, &int_point(&[0, 0])), Err(Error::NonUnique));
        let mid = vec![Scalar::rational(rat(1, 2)); 2];
        assert_eq!(boundary_edge_through(&p, &mid), Err(Error::NotOnBoundary));
    }

    #[test]
    fn from_ineqs_matches_vertices() {
        let q = |v: &[i64]| v.iter().map(|&x| int(x)).collect::<Vec<_>>();
        let ineqs = [
            Ineq::new(q(&[1, 0]), Scalar::zero()),
            Ineq::new(q(&[0, 1]), Scalar::zero()),
            Ineq::new(q(&[-1, 0]), Scalar::from_int(-1)),
            Ineq::new(q(&[0, -1]), Scalar::from_int(-1)),
        ];
        assert_eq!(Polyhedron::from_ineqs(2, &[], &ineqs).unwrap(), square());
    }

    #[test]
    fn lexicographic_edge() {
        let b = SymbolBasis::lexicographic(&["omega"]);
        let w = b.symbol(0);
        let p = Polyhedron::from_vertices(
            &[vec![-w.clone(), Scalar::zero()], vec![w.clone(), Scalar::zero()], vec![Scalar::zero(), w.clone()]],
            &[],
        )
        .unwrap();
        let e = boundary_edge_through(&p, &[Scalar::from_int(3), Scalar::zero()]).unwrap();
        assert_eq!(slope(&e.direction().unwrap()), Some(Scalar::zero()));
    }
}
