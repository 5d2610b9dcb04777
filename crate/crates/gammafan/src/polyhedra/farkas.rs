//! Farkas certificates and rational points via exact LP.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::scalar::{dot_rs, Rat, Scalar};

/// An inequality <u, x> >= a.
#[derive(Debug, Clone, PartialEq)]
pub struct Ineq {
    pub u: Vec<Rat>,
    pub a: Scalar,
}

impl Ineq {
    pub fn new(u: Vec<Rat>, a: Scalar) -> Self {
        Ineq { u, a }
    }

    pub fn holds(&self, x: &[Scalar]) -> bool {
        (&dot_rs(&self.u, x) - &self.a).sign() >= 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarkasCertificate {
    #[serde(serialize_with = "ser_scalars")]
    pub multipliers: Vec<Scalar>,
    #[serde(skip)]
    pub combo_u: Vec<Rat>,
    #[serde(serialize_with = "ser_scalar")]
    pub combo_a: Scalar,
}

fn ser_scalars<S: serde::Serializer>(v: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_text()))
}

fn ser_scalar<S: serde::Serializer>(v: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_text())
}

impl FarkasCertificate {
    fn build(l: &[Ineq], mult: Vec<Scalar>) -> Self {
        let n = l.first().map(|i| i.u.len()).unwrap_or(0);
        let mut cu = vec![Rat::zero(); n];
        let mut ca = Scalar::zero();
        for (i, c) in l.iter().zip(&mult) {
            let q = c.to_rat().expect("rational multiplier");
            for (k, v) in cu.iter_mut().enumerate() {
                *v += &q * &i.u[k];
            }
            ca += &i.a.mul_rat(&q);
        }
        FarkasCertificate { multipliers: mult, combo_u: cu, combo_a: ca }
    }

    /// Exact substitution check.
    pub fn verify(&self, l: &[Ineq], u0: &[Rat], a0: &Scalar) -> bool {
        if self.multipliers.len() != l.len() || self.multipliers.iter().any(|c| c.sign() < 0) {
            return false;
        }
        let rebuilt = FarkasCertificate::build(l, self.multipliers.clone());
        rebuilt.combo_u == u0 && (&rebuilt.combo_a - a0).sign() >= 0
    }

    pub fn is_rational(&self) -> bool {
        self.multipliers.iter().all(|c| c.is_rational())
    }
}

fn minimize(l: &[Ineq], obj: &[Rat]) -> Result<LpOutcome> {
    let n = obj.len();
    for i in l {
        if i.u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: i.u.len() });
        }
    }
    let mut lp = Lp::new(n, true);
    lp.obj = obj.iter().cloned().map(Scalar::rational).collect();
    for i in l {
        lp.add(i.u.clone(), Cmp::Ge, i.a.clone());
    }
    Ok(lp.solve())
}

/// Minimize u0 over P and return (optimal point) or the violation witness.
fn optimum(l: &[Ineq], u0: &[Rat], a0: &Scalar) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    match minimize(l, u0)? {
        LpOutcome::Infeasible => Err(Error::EmptyPolyhedron),
        LpOutcome::Unbounded { x, ray } => {
            let gap = &dot_rs(u0, &x) - a0;
            let witness = if gap.sign() < 0 {
                x
            } else {
                let slope: Rat = -u0.iter().zip(&ray).map(|(p, q)| p * q).sum::<Rat>();
                let lam = gap.div_rat(&slope) + Scalar::one();
                x.iter().zip(&ray).map(|(xi, di)| xi + &lam.checked_mul(&Scalar::rational(di.clone())).unwrap()).collect()
            };
            Err(Error::NotValid { witness: fmt_point(&witness) })
        }
        LpOutcome::Optimal { x, duals, .. } => {
            if (&dot_rs(u0, &x) - a0).sign() < 0 {
                return Err(Error::NotValid { witness: fmt_point(&x) });
            }
            Ok((x, duals))
        }
    }
}

pub fn fmt_point(x: &[Scalar]) -> String {
    let v: Vec<String> = x.iter().map(|s| s.to_text()).collect();
    format!("({})", v.join(", "))
}

/// Multipliers c_i >= 0 with sum c_i u_i = u0 and sum c_i a_i >= a0, read off the
/// LP duals. The u_i must be rational for the simplex tableau.
pub fn farkas_classical(l: &[Ineq], u0: &[Rat], a0: &Scalar) -> Result<FarkasCertificate> {
    let (_, duals) = optimum(l, u0, a0)?;
    Ok(FarkasCertificate::build(l, duals))
}

/// Rational multipliers: find the active set at an optimum, then solve the purely
/// rational system sum_{i in I} c_i u_i = u0, c >= 0.
pub fn farkas_rational(l: &[Ineq], u0: &[Rat], a0: &Scalar) -> Result<FarkasCertificate> {
    let (x, _) = optimum(l, u0, a0)?;
    let active: Vec<usize> = (0..l.len()).filter(|&i| (&dot_rs(&l[i].u, &x) - &l[i].a).is_zero()).collect();
    let n = u0.len();
    let mut lp = Lp::new(active.len(), false);
    for k in 0..n {
        let row: Vec<Rat> = active.iter().map(|&i| l[i].u[k].clone()).collect();
        lp.add(row, Cmp::Eq, Scalar::rational(u0[k].clone()));
    }
    let c = match lp.solve() {
        LpOutcome::Optimal { x, .. } => x,
        _ => return Err(Error::SemanticError("active-set system unsolvable".into())),
    };
    let mut mult = vec![Scalar::zero(); l.len()];
    for (k, &i) in active.iter().enumerate() {
        mult[i] = c[k].clone();
    }
    Ok(FarkasCertificate::build(l, mult))
}

/// A point of {<u_i,x> >= a_i}. With rational data the point is rational.
pub fn rational_point(l: &[Ineq], n: usize) -> Result<Vec<Scalar>> {
    match minimize(l, &vec![Rat::zero(); n])? {
        LpOutcome::Optimal { x, .. } => Ok(x),
        LpOutcome::Unbounded { x, .. } => Ok(x),
        LpOutcome::Infeasible => Err(Error::Empty),
    }
}
