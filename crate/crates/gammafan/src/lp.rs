//! Dense tableau simplex with Bland's rule over scalars.
//!
//! The constraint matrix is rational; right-hand sides and objective coefficients
//! may be scalars. Every arithmetic step is rational times scalar.

use num_traits::{One, Signed, Zero};

use crate::scalar::{Rat, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub a: Vec<Rat>,
    pub cmp: Cmp,
    pub b: Scalar,
}

/// minimize obj . x subject to rows; variables flagged free or nonnegative.
#[derive(Debug, Clone)]
pub struct Lp {
    pub nvars: usize,
    pub free: Vec<bool>,
    pub rows: Vec<Row>,
    pub obj: Vec<Scalar>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Scalar>,
        /// One multiplier per row, sign-adjusted so that sum y_i a_i = obj for
        /// free columns and y_i >= 0 on Ge rows, y_i <= 0 on Le rows.
        duals: Vec<Scalar>,
        value: Option<Scalar>,
    },
    Infeasible,
    Unbounded {
        x: Vec<Scalar>,
        ray: Vec<Rat>,
    },
}

impl Lp {
    pub fn new(nvars: usize, free: bool) -> Self {
        Lp { nvars, free: vec![free; nvars], rows: Vec::new(), obj: vec![Scalar::zero(); nvars] }
    }

    pub fn add(&mut self, a: Vec<Rat>, cmp: Cmp, b: Scalar) {
        assert_eq!(a.len(), self.nvars);
        self.rows.push(Row { a, cmp, b });
    }

    pub fn solve(&self) -> LpOutcome {
        // Standard form columns: split free variables, then one slack per inequality.
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::new();
        let mut ncols = 0;
        for j in 0..self.nvars {
            if self.free[j] {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            } else {
                col_of.push((ncols, None));
                ncols += 1;
            }
        }
        let nstruct = ncols;
        let mut slack_of = vec![None; self.rows.len()];
        for (i, r) in self.rows.iter().enumerate() {
            if r.cmp != Cmp::Eq {
                slack_of[i] = Some(ncols);
                ncols += 1;
            }
        }
        let m = self.rows.len();
        let mut a = vec![vec![Rat::zero(); ncols]; m];
        let mut b = Vec::with_capacity(m);
        for (i, r) in self.rows.iter().enumerate() {
            for j in 0..self.nvars {
                let (p, n) = col_of[j];
                a[i][p] = r.a[j].clone();
                if let Some(n) = n {
                    a[i][n] = -r.a[j].clone();
                }
            }
            match (r.cmp, slack_of[i]) {
                (Cmp::Ge, Some(s)) => a[i][s] = -Rat::one(),
                (Cmp::Le, Some(s)) => a[i][s] = Rat::one(),
                _ => {}
            }
            b.push(r.b.clone());
        }
        let mut c = vec![Scalar::zero(); ncols];
        for j in 0..self.nvars {
            let (p, n) = col_of[j];
            c[p] = self.obj[j].clone();
            if let Some(n) = n {
                c[n] = -self.obj[j].clone();
            }
        }
        let rb: Option<Vec<Rat>> = b.iter().map(|x| x.to_rat()).collect();
        let rc: Option<Vec<Rat>> = c.iter().map(|x| x.to_rat()).collect();
        let res = match (rb, rc) {
            (Some(rb), Some(rc)) => standard_simplex(&a, &rb, &rc).map(Scalar::rational),
            _ => standard_simplex(&a, &b, &c),
        };
        let back = |xs: &[Scalar]| -> Vec<Scalar> {
            (0..self.nvars)
                .map(|j| {
                    let (p, n) = col_of[j];
                    match n {
                        Some(n) => &xs[p] - &xs[n],
                        None => xs[p].clone(),
                    }
                })
                .collect()
        };
        let _ = nstruct;
        match res {
            StdOutcome::Infeasible => LpOutcome::Infeasible,
            StdOutcome::Optimal { x, duals } => {
                let xo = back(&x);
                let value = self
                    .obj
                    .iter()
                    .zip(&xo)
                    .try_fold(Scalar::zero(), |acc, (p, q)| p.checked_mul(q).map(|v| acc + v))
                    .ok();
                LpOutcome::Optimal { x: xo, duals, value }
            }
            StdOutcome::Unbounded { x, ray } => {
                let xo = back(&x);
                let ro = (0..self.nvars)
                    .map(|j| {
                        let (p, n) = col_of[j];
                        match n {
                            Some(n) => &ray[p] - &ray[n],
                            None => ray[p].clone(),
                        }
                    })
                    .collect();
                LpOutcome::Unbounded { x: xo, ray: ro }
            }
        }
    }
}

/// Values carried in the right-hand side and objective.
trait Val: Clone {
    fn v_zero() -> Self;
    fn v_one() -> Self;
    fn sign(&self) -> i32;
    fn is_zero(&self) -> bool;
    fn mul_r(&self, q: &Rat) -> Self;
    fn add_v(&self, o: &Self) -> Self;
    fn sub_v(&self, o: &Self) -> Self;
    fn neg_v(&self) -> Self;
}

impl Val for Rat {
    fn v_zero() -> Self {
        Zero::zero()
    }
    fn v_one() -> Self {
        One::one()
    }
    fn sign(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul_r(&self, q: &Rat) -> Self {
        self * q
    }
    fn add_v(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_v(&self, o: &Self) -> Self {
        self - o
    }
    fn neg_v(&self) -> Self {
        -self
    }
}

impl Val for Scalar {
    fn v_zero() -> Self {
        Scalar::zero()
    }
    fn v_one() -> Self {
        Scalar::one()
    }
    fn sign(&self) -> i32 {
        Scalar::sign(self)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn mul_r(&self, q: &Rat) -> Self {
        self.mul_rat(q)
    }
    fn add_v(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_v(&self, o: &Self) -> Self {
        self - o
    }
    fn neg_v(&self) -> Self {
        -self
    }
}

enum StdOutcome<V> {
    Optimal { x: Vec<V>, duals: Vec<V> },
    Infeasible,
    Unbounded { x: Vec<V>, ray: Vec<Rat> },
}

impl<V: Val> StdOutcome<V> {
    fn map<W>(self, f: impl Fn(V) -> W) -> StdOutcome<W> {
        match self {
            StdOutcome::Optimal { x, duals } => {
                StdOutcome::Optimal { x: x.into_iter().map(&f).collect(), duals: duals.into_iter().map(&f).collect() }
            }
            StdOutcome::Infeasible => StdOutcome::Infeasible,
            StdOutcome::Unbounded { x, ray } => StdOutcome::Unbounded { x: x.into_iter().map(&f).collect(), ray },
        }
    }
}

struct Tableau<V> {
    t: Vec<Vec<Rat>>,
    rhs: Vec<V>,
    basis: Vec<usize>,
    n: usize,
}

impl<V: Val> Tableau<V> {
    fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.t[r][j].recip();
        for v in self.t[r].iter_mut() {
            if !Zero::is_zero(v) {
                *v = &*v * &inv;
            }
        }
        self.rhs[r] = self.rhs[r].mul_r(&inv);
        let prow = self.t[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&k| !Zero::is_zero(&prow[k])).collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || Zero::is_zero(&self.t[i][j]) {
                continue;
            }
            let f = self.t[i][j].clone();
            for &k in &nz {
                let d = &prow[k] * &f;
                self.t[i][k] -= d;
            }
            self.rhs[i] = self.rhs[i].sub_v(&prhs.mul_r(&f));
        }
        self.basis[r] = j;
    }

    fn reduced_cost(&self, c: &[V], j: usize) -> V {
        let mut z = c[j].clone();
        for (i, &bi) in self.basis.iter().enumerate() {
            if !Zero::is_zero(&self.t[i][j]) && !c[bi].is_zero() {
                z = z.sub_v(&c[bi].mul_r(&self.t[i][j]));
            }
        }
        z
    }

    /// Bland iterations on columns < `allowed`. Ok(()) when optimal, Err(j) when
    /// column j is an unbounded direction.
    fn run(&mut self, c: &[V], allowed: usize) -> Result<(), usize> {
        let mut in_basis = vec![false; self.t.first().map(|r| r.len()).unwrap_or(0)];
        loop {
            in_basis.iter_mut().for_each(|b| *b = false);
            for &b in &self.basis {
                in_basis[b] = true;
            }
            let Some(j) = (0..allowed).find(|&j| !in_basis[j] && self.reduced_cost(c, j).sign() < 0) else {
                return Ok(());
            };
            let mut best: Option<(usize, V)> = None;
            for i in 0..self.t.len() {
                if !self.t[i][j].is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].mul_r(&self.t[i][j].recip());
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let s = ratio.sub_v(&br).sign();
                        if s < 0 || (s == 0 && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return Err(j),
                Some((r, _)) => self.pivot(r, j),
            }
        }
    }

    fn solution(&self) -> Vec<V> {
        let mut x = vec![V::v_zero(); self.n];
        for (i, &bi) in self.basis.iter().enumerate() {
            if bi < self.n {
                x[bi] = self.rhs[i].clone();
            }
        }
        x
    }
}

fn standard_simplex<V: Val>(a: &[Vec<Rat>], b: &[V], c: &[V]) -> StdOutcome<V> {
    let m = a.len();
    let n = c.len();
    let mut flip = vec![false; m];
    let mut t = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].sign() < 0;
        flip[i] = neg;
        let mut row: Vec<Rat> = a[i].iter().map(|x| if neg { -x } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
        t.push(row);
        rhs.push(if neg { b[i].neg_v() } else { b[i].clone() });
    }
    let mut tab = Tableau { t, rhs, basis: (n..n + m).collect(), n };
    let mut c1 = vec![V::v_zero(); n + m];
    for v in c1.iter_mut().skip(n) {
        *v = V::v_one();
    }
    tab.run(&c1, n).expect("phase one is bounded");
    for i in 0..m {
        if tab.basis[i] >= n && tab.rhs[i].sign() != 0 {
            return StdOutcome::Infeasible;
        }
    }
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.basis.contains(&j) && !Zero::is_zero(&tab.t[i][j])) {
                tab.pivot(i, j);
            }
        }
    }
    let mut c2 = c.to_vec();
    c2.extend((0..m).map(|_| V::v_zero()));
    match tab.run(&c2, n) {
        Ok(()) => {
            let x = tab.solution();
            let duals = (0..m)
                .map(|i| {
                    let mut y = V::v_zero();
                    for (r, &bi) in tab.basis.iter().enumerate() {
                        let e = &tab.t[r][n + i];
                        if !Zero::is_zero(e) && !c2[bi].is_zero() {
                            y = y.add_v(&c2[bi].mul_r(e));
                        }
                    }
                    if flip[i] {
                        y.neg_v()
                    } else {
                        y
                    }
                })
                .collect();
            StdOutcome::Optimal { x, duals }
        }
        Err(j) => {
            let x = tab.solution();
            let mut ray = vec![Rat::zero(); n];
            ray[j] = Rat::one();
            for (i, &bi) in tab.basis.iter().enumerate() {
                if bi < n {
                    ray[bi] = -tab.t[i][j].clone();
                }
            }
            StdOutcome::Unbounded { x, ray }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, SymbolBasis};

    #[test]
    fn simple_min() {
        // min x + y s.t. x >= 1, y >= sqrt2, x, y free.
        let bs = SymbolBasis::sqrts(&["r"], &[2]);
        let mut lp = Lp::new(2, true);
        lp.obj = vec![Scalar::one(), Scalar::one()];
        lp.add(vec![int(1), int(0)], Cmp::Ge, Scalar::one());
        lp.add(vec![int(0), int(1)], Cmp::Ge, bs.symbol(0));
        match lp.solve() {
            LpOutcome::Optimal { x, duals, value } => {
                assert_eq!(x, vec![Scalar::one(), bs.symbol(0)]);
                assert_eq!(duals, vec![Scalar::one(), Scalar::one()]);
                assert_eq!(value.unwrap(), Scalar::one() + bs.symbol(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1, true);
        lp.add(vec![int(1)], Cmp::Ge, Scalar::from_int(2));
        lp.add(vec![int(1)], Cmp::Le, Scalar::from_int(1));
        assert!(matches!(lp.solve(), LpOutcome::Infeasible));
        let mut lp = Lp::new(1, true);
        lp.obj = vec![Scalar::from_int(-1)];
        lp.add(vec![int(1)], Cmp::Ge, Scalar::zero());
        match lp.solve() {
            LpOutcome::Unbounded { ray, .. } => assert!(ray[0].is_positive()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scalar_objective() {
        // max sqrt2*c1 + c2 s.t. c1 + c2 = 1, c >= 0  -> picks c1 = 1.
        let bs = SymbolBasis::sqrts(&["r"], &[2]);
        let mut lp = Lp::new(2, false);
        lp.obj = vec![-bs.symbol(0), Scalar::from_int(-1)];
        lp.add(vec![int(1), int(1)], Cmp::Eq, Scalar::one());
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, vec![Scalar::one(), Scalar::zero()]),
            other => panic!("{other:?}"),
        }
    }
}
