//! Exact rational linear algebra.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar};

pub type RatMatrix = Vec<Vec<Rat>>;
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn zeros(rows: usize, cols: usize) -> RatMatrix {
    vec![vec![Rat::zero(); cols]; rows]
}

pub fn identity(n: usize) -> RatMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_vec(a: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn mat_vec_scalar(a: &[Vec<Rat>], x: &[Scalar]) -> Vec<Scalar> {
    a.iter().map(|r| crate::scalar::dot_rs(r, x)).collect()
}

pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> RatMatrix {
    let bt = transpose(b);
    a.iter()
        .map(|r| bt.iter().map(|c| r.iter().zip(c).map(|(p, q)| p * q).sum()).collect())
        .collect()
}

fn lcm_denoms(row: &[Rat]) -> BigInt {
    row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Solve A x = b for rational A and scalar b by fraction-free elimination.
/// Free variables are set to zero. Returns None when the system is inconsistent.
pub fn solve(a: &[Vec<Rat>], b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    for i in 1..b.len() {
        b[0].checked_add(&b[i])?;
    }
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    // Integerize each row together with its right-hand side.
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(a.len());
    let mut rhs: Vec<Scalar> = Vec::with_capacity(a.len());
    for (row, bi) in a.iter().zip(b) {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        let l = lcm_denoms(row);
        let lr = Rat::from_integer(l.clone());
        m.push(row.iter().map(|x| (x * &lr).to_integer()).collect());
        rhs.push(bi.mul_rat(&lr));
    }
    let rows = m.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..n {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        rhs.swap(r, p);
        let piv = m[r][c].clone();
        let prev_r = Rat::from_integer(prev.clone());
        for i in (r + 1)..rows {
            let f = m[i][c].clone();
            for j in 0..n {
                let num = &piv * &m[i][j] - &f * &m[r][j];
                debug_assert!((&num % &prev).is_zero(), "inexact Bareiss step");
                m[i][j] = num / &prev;
            }
            let nb = rhs[i].mul_rat(&Rat::from_integer(piv.clone()))
                - rhs[r].mul_rat(&Rat::from_integer(f));
            rhs[i] = nb.div_rat(&prev_r);
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    for bi in rhs.iter().skip(r) {
        if !bi.is_zero() {
            return Ok(None);
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for (k, &c) in pivots.iter().enumerate().rev() {
        let mut acc = rhs[k].clone();
        for j in (c + 1)..n {
            if !m[k][j].is_zero() && !x[j].is_zero() {
                acc -= &x[j].mul_rat(&Rat::from_integer(m[k][j].clone()));
            }
        }
        x[c] = acc.div_rat(&Rat::from_integer(m[k][c].clone()));
    }
    Ok(Some(x))
}

/// Solve with a rational right-hand side.
pub fn solve_rat(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let bs: Vec<Scalar> = b.iter().cloned().map(Scalar::rational).collect();
    solve(a, &bs)
        .ok()
        .flatten()
        .map(|x| x.into_iter().map(|s| s.to_rat().unwrap()).collect())
}

/// Reduced row echelon form and pivot columns.
pub fn rref(a: &[Vec<Rat>]) -> (RatMatrix, Vec<usize>) {
    let mut m: RatMatrix = a.to_vec();
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in 0..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &[Vec<Rat>]) -> usize {
    rref(a).1.len()
}

/// Basis of the right null space {x : A x = 0}; `cols` is needed when A has no rows.
pub fn kernel(a: &[Vec<Rat>], cols: usize) -> RatMatrix {
    if a.is_empty() {
        return identity(cols);
    }
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -m[k][f].clone();
            }
            v
        })
        .collect()
}

/// Determinant by fraction-free elimination.
pub fn det(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    if n == 0 {
        return Rat::one();
    }
    let mut den = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = Vec::new();
    for row in a {
        let l = lcm_denoms(row);
        den *= &l;
        let lr = Rat::from_integer(l);
        m.push(row.iter().map(|x| (x * &lr).to_integer()).collect());
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else { return Rat::zero() };
        if p != k {
            m.swap(k, p);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                m[i][j] = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let d = Rat::new(m[n - 1][n - 1].clone(), den);
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Row Hermite normal form: returns (H, U) with H = U A, U unimodular, H in echelon
/// form with positive pivots and entries above each pivot reduced into [0, pivot).
pub fn hnf(a: &[Vec<BigInt>]) -> (IntMatrix, IntMatrix) {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut h: IntMatrix = a.to_vec();
    let mut u: IntMatrix = (0..rows)
        .map(|i| (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        // Euclid on column c among rows r.. until one nonzero entry remains.
        loop {
            let nz: Vec<usize> = (r..rows).filter(|&i| !h[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by(|&&i, &&j| h[i][c].abs().cmp(&h[j][c].abs())).unwrap();
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in (r + 1)..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                for j in 0..cols {
                    let v = &q * &h[r][j];
                    h[i][j] -= v;
                }
                for j in 0..rows {
                    let v = &q * &u[r][j];
                    u[i][j] -= v;
                }
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut() {
                *x = -x.clone();
            }
            for x in u[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            if !q.is_zero() {
                for j in 0..cols {
                    let v = &q * &h[r][j];
                    h[i][j] -= v;
                }
                for j in 0..rows {
                    let v = &q * &u[r][j];
                    u[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    (h, u)
}

/// Column Hermite normal form: H = A V with V unimodular, H = transpose(hnf(A^T)).
pub fn hnf_columns(a: &[Vec<BigInt>]) -> (IntMatrix, IntMatrix) {
    let (h, u) = hnf(&transpose(a));
    (transpose(&h), transpose(&u))
}

/// v / gcd(v).
pub fn primitive(v: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Clear denominators of a rational vector and make it primitive.
pub fn primitive_rat(v: &[Rat]) -> Result<Vec<BigInt>> {
    let l = lcm_denoms(v);
    let lr = Rat::from_integer(l);
    primitive(&v.iter().map(|x| (x * &lr).to_integer()).collect::<Vec<_>>())
}

pub fn to_rat_vec(v: &[BigInt]) -> Vec<Rat> {
    v.iter().cloned().map(Rat::from_integer).collect()
}

pub fn to_rat_matrix(m: &[Vec<BigInt>]) -> RatMatrix {
    m.iter().map(|r| to_rat_vec(r)).collect()
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, SymbolBasis};
    use proptest::prelude::*;

    fn rm(rows: &[&[i64]]) -> RatMatrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    fn im(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| ints(r)).collect()
    }

    #[test]
    fn solve_examples() {
        let b = SymbolBasis::sqrts(&["r"], &[2]);
        let r2 = b.symbol(0);
        let x = solve(&rm(&[&[1, 0], &[0, 1]]), &[r2.clone(), Scalar::one()]).unwrap().unwrap();
        assert_eq!(x, vec![r2.clone(), Scalar::one()]);
        let x = solve(&rm(&[&[2, 0], &[0, 3]]), &[r2.mul_rat(&int(2)), Scalar::from_int(3)]).unwrap().unwrap();
        assert_eq!(x, vec![r2.clone(), Scalar::one()]);
        let x = solve(&rm(&[&[1, 1], &[1, -1]]), &[r2.clone(), Scalar::zero()]).unwrap().unwrap();
        let half = r2.div_rat(&int(2));
        assert_eq!(x, vec![half.clone(), half]);
    }

    #[test]
    fn solve_inconsistent() {
        let x = solve(&rm(&[&[1, 1], &[2, 2]]), &[Scalar::one(), Scalar::zero()]).unwrap();
        assert!(x.is_none());
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf(&im(&[&[2, 0], &[0, 2]])).0, im(&[&[2, 0], &[0, 2]]));
        assert_eq!(hnf(&im(&[&[2], &[3]])).0, im(&[&[1], &[0]]));
        assert_eq!(hnf_columns(&im(&[&[4, 6]])).0, im(&[&[2, 0]]));
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&ints(&[2, 4])).unwrap(), ints(&[1, 2]));
        assert_eq!(primitive(&ints(&[0, -3])).unwrap(), ints(&[0, -1]));
        assert_eq!(primitive(&ints(&[6, 10, 15])).unwrap(), ints(&[6, 10, 15]));
        assert_eq!(primitive(&ints(&[0, 0])), Err(Error::ZeroVector));
    }

    #[test]
    fn kernel_and_rank() {
        let a = rm(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&a), 1);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(mat_vec(&a, &v).iter().all(|x| x.is_zero()));
        }
    }

    fn small_matrix(r: usize, c: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(proptest::collection::vec(-6i64..7, c), r)
    }

    proptest! {
        #[test]
        fn solve_round_trip(a in small_matrix(4, 3), x in proptest::collection::vec((-9i64..9, -9i64..9), 3)) {
            let a: RatMatrix = a.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            prop_assume!(rank(&a) == 3);
            let b = SymbolBasis::sqrts(&["r"], &[2]);
            let xs: Vec<Scalar> = x.iter().map(|&(p, q)| Scalar::from_parts(Some(b.clone()), int(p), vec![int(q)])).collect();
            let rhs = mat_vec_scalar(&a, &xs);
            let got = solve(&a, &rhs).unwrap().unwrap();
            prop_assert_eq!(got, xs);
        }

        #[test]
        fn hnf_invariants(a in small_matrix(3, 3)) {
            let a: IntMatrix = a.iter().map(|r| ints(r)).collect();
            let (h, u) = hnf(&a);
            let prod = mat_mul(&to_rat_matrix(&u), &to_rat_matrix(&a));
            prop_assert_eq!(prod, to_rat_matrix(&h));
            prop_assert_eq!(det(&to_rat_matrix(&u)).abs(), Rat::one());
            let mut last_pivot: Option<usize> = None;
            let mut seen_zero = false;
            for row in &h {
                match row.iter().position(|x| !x.is_zero()) {
                    None => seen_zero = true,
                    Some(p) => {
                        prop_assert!(!seen_zero);
                        prop_assert!(row[p].is_positive());
                        if let Some(l) = last_pivot { prop_assert!(p > l); }
                        last_pivot = Some(p);
                    }
                }
            }
        }
    }
}
