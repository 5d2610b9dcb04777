//! Scalars: elements q0 + q1*theta1 + ... + qm*thetam over a declared symbol basis.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::RwLock;

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Depth at which interval sign evaluation starts.
const START_DEPTH: u32 = 16;
/// Refinement cap; deeper requests are an oracle stall.
pub const MAX_DEPTH: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    IntervalRefinement,
    Lexicographic,
}

/// A refinable source of nested rational intervals around a real number.
pub trait Enclosure: Send + Sync {
    /// Closed interval at refinement depth `depth`.
    fn enclose(&self, depth: u32) -> (Rat, Rat);
    /// Short text used in file headers.
    fn describe(&self) -> String;
}

/// sqrt(n) for a positive non-square integer n, via dyadic integer square roots.
#[derive(Debug, Clone)]
pub struct SqrtSource {
    pub n: BigInt,
}

impl SqrtSource {
    pub fn new(n: i64) -> Self {
        SqrtSource { n: BigInt::from(n) }
    }
}

impl Enclosure for SqrtSource {
    fn enclose(&self, depth: u32) -> (Rat, Rat) {
        let scale = BigInt::one() << (2 * depth as usize);
        let k = (&self.n * &scale).sqrt();
        let den = BigInt::one() << depth as usize;
        (
            Rat::new(k.clone(), den.clone()),
            Rat::new(k + BigInt::one(), den),
        )
    }
    fn describe(&self) -> String {
        format!("sqrt({})", self.n)
    }
}

/// Enclosure given by a closure; the caller is responsible for nesting.
pub struct FnSource {
    pub label: String,
    pub f: Arc<dyn Fn(u32) -> (Rat, Rat) + Send + Sync>,
}

impl Enclosure for FnSource {
    fn enclose(&self, depth: u32) -> (Rat, Rat) {
        (self.f)(depth)
    }
    fn describe(&self) -> String {
        self.label.clone()
    }
}

pub struct Symbol {
    pub name: String,
    pub source: Option<Arc<dyn Enclosure>>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Some(s) => write!(f, "{}={}", self.name, s.describe()),
            None => write!(f, "{}", self.name),
        }
    }
}

/// Ordered list of symbols plus the oracle deciding signs.
pub struct SymbolBasis {
    pub symbols: Vec<Symbol>,
    pub kind: OracleKind,
    cache: RwLock<Vec<BTreeMap<u32, (Rat, Rat)>>>,
}

impl fmt::Debug for SymbolBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolBasis")
            .field("symbols", &self.symbols)
            .field("kind", &self.kind)
            .finish()
    }
}

impl SymbolBasis {
    pub fn interval(symbols: Vec<(String, Arc<dyn Enclosure>)>) -> Arc<Self> {
        let n = symbols.len();
        Arc::new(SymbolBasis {
            symbols: symbols
                .into_iter()
                .map(|(name, s)| Symbol { name, source: Some(s) })
                .collect(),
            kind: OracleKind::IntervalRefinement,
            cache: RwLock::new(vec![BTreeMap::new(); n]),
        })
    }

    /// Square roots of the given integers, named by `names`.
    pub fn sqrts(names: &[&str], radicands: &[i64]) -> Arc<Self> {
        Self::interval(
            names
                .iter()
                .zip(radicands)
                .map(|(n, r)| (n.to_string(), Arc::new(SqrtSource::new(*r)) as Arc<dyn Enclosure>))
                .collect(),
        )
    }

    /// Symbols ordered by magnitude: each is infinitely larger than the previous.
    pub fn lexicographic(names: &[&str]) -> Arc<Self> {
        Arc::new(SymbolBasis {
            symbols: names
                .iter()
                .map(|n| Symbol { name: n.to_string(), source: None })
                .collect(),
            kind: OracleKind::Lexicographic,
            cache: RwLock::new(vec![BTreeMap::new(); names.len()]),
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// The scalar equal to symbol `i`.
    pub fn symbol(self: &Arc<Self>, i: usize) -> Scalar {
        let mut sym = vec![Rat::zero(); i + 1];
        sym[i] = Rat::one();
        Scalar::from_parts(Some(self.clone()), Rat::zero(), sym)
    }

    /// Enclosure of symbol `i` at `depth`, checked against coarser cached enclosures.
    pub fn enclosure(&self, i: usize, depth: u32) -> Result<(Rat, Rat)> {
        if let Some(v) = self.cache.read()[i].get(&depth) {
            return Ok(v.clone());
        }
        let src = self.symbols[i]
            .source
            .as_ref()
            .ok_or_else(|| Error::OracleStall(self.symbols[i].name.clone()))?;
        let (lo, hi) = src.enclose(depth);
        if lo > hi {
            return Err(Error::OracleStall(self.symbols[i].name.clone()));
        }
        let mut cache = self.cache.write();
        if let Some((&d0, (lo0, hi0))) = cache[i].range(..depth).next_back() {
            let w0 = hi0 - lo0;
            let bound = w0 / Rat::from_integer(BigInt::one() << (depth - d0) as usize);
            if lo < *lo0 || hi > *hi0 || (&hi - &lo) > bound {
                return Err(Error::OracleStall(self.symbols[i].name.clone()));
            }
        }
        cache[i].insert(depth, (lo.clone(), hi.clone()));
        Ok((lo, hi))
    }
}

/// An element q0 + sum qi*theta_i. Trailing zero symbol coordinates are trimmed,
/// so a rational scalar has an empty `sym` and may omit its basis.
#[derive(Clone)]
pub struct Scalar {
    basis: Option<Arc<SymbolBasis>>,
    q0: Rat,
    sym: Vec<Rat>,
}

impl Scalar {
    pub fn from_parts(basis: Option<Arc<SymbolBasis>>, q0: Rat, mut sym: Vec<Rat>) -> Self {
        while sym.last().is_some_and(|x| x.is_zero()) {
            sym.pop();
        }
        if let Some(b) = &basis {
            assert!(sym.len() <= b.len(), "coordinate vector longer than basis");
        } else {
            assert!(sym.is_empty(), "symbolic coordinates without a basis");
        }
        Scalar { basis, q0, sym }
    }

    pub fn rational(q: Rat) -> Self {
        Scalar { basis: None, q0: q, sym: Vec::new() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn zero() -> Self {
        Self::rational(Rat::zero())
    }

    pub fn one() -> Self {
        Self::rational(Rat::one())
    }

    pub fn basis(&self) -> Option<&Arc<SymbolBasis>> {
        self.basis.as_ref()
    }

    pub fn q0(&self) -> &Rat {
        &self.q0
    }

    /// Coordinates of the symbols actually present (trailing zeros trimmed).
    pub fn sym(&self) -> &[Rat] {
        &self.sym
    }

    /// Coordinate `i` where 0 is the rational part and i >= 1 is symbol i.
    pub fn coord(&self, i: usize) -> Rat {
        if i == 0 {
            self.q0.clone()
        } else {
            self.sym.get(i - 1).cloned().unwrap_or_else(Rat::zero)
        }
    }

    /// All m+1 coordinates for a basis of m symbols.
    pub fn coords(&self, m: usize) -> Vec<Rat> {
        (0..=m).map(|i| self.coord(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.q0.is_zero() && self.sym.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.sym.is_empty()
    }

    pub fn to_rat(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.q0.clone())
        } else {
            None
        }
    }

    /// 1 + index of the highest symbol present; 0 for nonzero rationals; -1 for zero.
    pub fn level(&self) -> i64 {
        if !self.sym.is_empty() {
            self.sym.len() as i64
        } else if self.q0.is_zero() {
            -1
        } else {
            0
        }
    }

    fn joint_basis(&self, other: &Scalar) -> Result<Option<Arc<SymbolBasis>>> {
        match (&self.basis, &other.basis) {
            (Some(a), Some(b)) => {
                if Arc::ptr_eq(a, b) {
                    Ok(Some(a.clone()))
                } else if self.is_rational() {
                    Ok(Some(b.clone()))
                } else if other.is_rational() {
                    Ok(Some(a.clone()))
                } else {
                    Err(Error::BasisMismatch)
                }
            }
            (Some(a), None) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        let basis = self.joint_basis(other)?;
        let n = self.sym.len().max(other.sym.len());
        let sym = (0..n)
            .map(|i| {
                let a = self.sym.get(i).cloned().unwrap_or_else(Rat::zero);
                let b = other.sym.get(i).cloned().unwrap_or_else(Rat::zero);
                a + b
            })
            .collect();
        Ok(Scalar::from_parts(basis, &self.q0 + &other.q0, sym))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_add(&-other)
    }

    /// Product; only defined when at least one factor is rational.
    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        if let Some(q) = other.to_rat() {
            Ok(self.mul_rat(&q))
        } else if let Some(q) = self.to_rat() {
            Ok(other.mul_rat(&q))
        } else {
            Err(Error::SymbolProduct)
        }
    }

    pub fn mul_rat(&self, q: &Rat) -> Scalar {
        if q.is_zero() {
            return Scalar { basis: self.basis.clone(), q0: Rat::zero(), sym: Vec::new() };
        }
        Scalar {
            basis: self.basis.clone(),
            q0: &self.q0 * q,
            sym: self.sym.iter().map(|x| x * q).collect(),
        }
    }

    pub fn div_rat(&self, q: &Rat) -> Scalar {
        assert!(!q.is_zero(), "division by zero");
        self.mul_rat(&q.recip())
    }

    pub fn try_sign(&self) -> Result<i32> {
        if self.sym.is_empty() {
            return Ok(sgn(&self.q0));
        }
        let basis = self.basis.as_ref().expect("symbolic scalar without basis");
        match basis.kind {
            OracleKind::Lexicographic => Ok(sgn(self.sym.last().unwrap())),
            OracleKind::IntervalRefinement => {
                let mut depth = START_DEPTH;
                loop {
                    let (lo, hi) = self.enclose(depth)?;
                    if lo.is_positive() {
                        return Ok(1);
                    }
                    if hi.is_negative() {
                        return Ok(-1);
                    }
                    if depth >= MAX_DEPTH {
                        let name = basis.symbols[self.sym.len() - 1].name.clone();
                        return Err(Error::OracleStall(name));
                    }
                    depth = (depth * 2).min(MAX_DEPTH);
                }
            }
        }
    }

    /// Sign of the value. Panics if the oracle stalls.
    pub fn sign(&self) -> i32 {
        self.try_sign().unwrap_or_else(|e| panic!("{e}"))
    }

    /// Interval evaluation at a fixed refinement depth (interval oracle only).
    pub fn enclose(&self, depth: u32) -> Result<(Rat, Rat)> {
        let mut lo = self.q0.clone();
        let mut hi = self.q0.clone();
        if self.sym.is_empty() {
            return Ok((lo, hi));
        }
        let basis = self.basis.as_ref().expect("symbolic scalar without basis");
        for (i, q) in self.sym.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let (l, h) = basis.enclosure(i, depth)?;
            if q.is_positive() {
                lo += q * l;
                hi += q * h;
            } else {
                lo += q * h;
                hi += q * l;
            }
        }
        Ok((lo, hi))
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    /// Order comparison through the sign oracle.
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        (self - other).sign().cmp(&0)
    }

    pub fn lt(&self, other: &Scalar) -> bool {
        self.cmp_value(other) == Ordering::Less
    }

    pub fn le(&self, other: &Scalar) -> bool {
        self.cmp_value(other) != Ordering::Greater
    }

    pub fn abs(&self) -> Scalar {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Structural order on coordinates, used for canonical sorting only.
    pub fn structural_cmp(&self, other: &Scalar) -> Ordering {
        self.q0
            .cmp(&other.q0)
            .then_with(|| self.sym.len().cmp(&other.sym.len()))
            .then_with(|| self.sym.cmp(&other.sym))
    }

    /// Rough floating value for rendering and heuristics. Lexicographic symbols use
    /// nominal magnitudes 1e3, 1e6, ...
    pub fn approx(&self) -> f64 {
        let mut v = self.q0.to_f64().unwrap_or(0.0);
        if let Some(b) = &self.basis {
            for (i, q) in self.sym.iter().enumerate() {
                let x = match b.kind {
                    OracleKind::Lexicographic => 1000f64.powi(i as i32 + 1),
                    OracleKind::IntervalRefinement => match b.enclosure(i, 64) {
                        Ok((l, h)) => ((l + h) / int(2)).to_f64().unwrap_or(0.0),
                        Err(_) => 0.0,
                    },
                };
                v += q.to_f64().unwrap_or(0.0) * x;
            }
        }
        v
    }

    /// Rational stand-in at a refinement depth: the enclosure midpoint, or 2^(depth·(i+1))
    /// for the i-th lexicographic symbol.
    pub fn sample(&self, depth: u32) -> Rat {
        let mut v = self.q0.clone();
        if let Some(b) = &self.basis {
            for (i, q) in self.sym.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let x = match b.kind {
                    OracleKind::Lexicographic => Rat::from_integer(BigInt::from(2).pow(depth * (i as u32 + 1))),
                    OracleKind::IntervalRefinement => match b.enclosure(i, depth) {
                        Ok((l, h)) => (l + h) / int(2),
                        Err(_) => Rat::zero(),
                    },
                };
                v += q * x;
            }
        }
        v
    }

    /// Text form over the given basis, e.g. `3/2 - 2*b`.
    pub fn to_text(&self) -> String {
        let mut terms: Vec<(bool, String)> = Vec::new();
        if !self.q0.is_zero() || self.sym.is_empty() {
            terms.push((self.q0.is_negative(), self.q0.abs().to_string()));
        }
        for (i, q) in self.sym.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let name = self
                .basis
                .as_ref()
                .map(|b| b.symbols[i].name.clone())
                .unwrap_or_else(|| format!("theta{}", i + 1));
            let a = q.abs();
            let body = if a.is_one() { name } else { format!("{a}*{name}") };
            terms.push((q.is_negative(), body));
        }
        let mut out = String::new();
        for (k, (neg, body)) in terms.into_iter().enumerate() {
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    /// Parse the text form. Symbol names must belong to `basis`.
    pub fn parse(text: &str, basis: Option<&Arc<SymbolBasis>>) -> Result<Scalar> {
        let err = |col: usize, msg: &str| Error::ParseError { line: 1, column: col + 1, msg: msg.to_string() };
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0usize;
        let mut q0 = Rat::zero();
        let m = basis.map(|b| b.len()).unwrap_or(0);
        let mut sym = vec![Rat::zero(); m];
        let skip = |pos: &mut usize| {
            while *pos < chars.len() && chars[*pos].is_whitespace() {
                *pos += 1;
            }
        };
        let mut first = true;
        loop {
            skip(&mut pos);
            if pos >= chars.len() {
                if first {
                    return Err(err(pos, "empty scalar"));
                }
                break;
            }
            let mut neg = false;
            if chars[pos] == '+' || chars[pos] == '-' {
                neg = chars[pos] == '-';
                pos += 1;
                skip(&mut pos);
            } else if !first {
                return Err(err(pos, "expected + or -"));
            }
            first = false;
            let start = pos;
            let mut coef: Option<Rat> = None;
            if pos < chars.len() && chars[pos].is_ascii_digit() {
                while pos < chars.len() && (chars[pos].is_ascii_digit() || chars[pos] == '/') {
                    pos += 1;
                }
                let s: String = chars[start..pos].iter().collect();
                coef = Some(parse_rat(&s).ok_or_else(|| err(start, "malformed fraction"))?);
                skip(&mut pos);
                if pos < chars.len() && chars[pos] == '*' {
                    pos += 1;
                    skip(&mut pos);
                } else {
                    let c = coef.unwrap();
                    q0 += if neg { -c } else { c };
                    continue;
                }
            }
            let nstart = pos;
            while pos < chars.len() && (chars[pos].is_alphanumeric() || chars[pos] == '_') {
                pos += 1;
            }
            if nstart == pos {
                return Err(err(pos, "expected number or symbol"));
            }
            let name: String = chars[nstart..pos].iter().collect();
            let idx = basis
                .and_then(|b| b.index_of(&name))
                .ok_or_else(|| err(nstart, &format!("unknown symbol `{name}`")))?;
            let c = coef.unwrap_or_else(Rat::one);
            sym[idx] += if neg { -c } else { c };
        }
        Ok(Scalar::from_parts(basis.cloned(), q0, sym))
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let r = match body.split_once('/') {
        Some((n, d)) => {
            if n.is_empty() || d.is_empty() || !n.bytes().all(|c| c.is_ascii_digit()) || !d.bytes().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Rat::new(n.parse().ok()?, d)
        }
        None => {
            if !body.bytes().all(|c| c.is_ascii_digit()) {
                return None;
            }
            Rat::from_integer(body.parse().ok()?)
        }
    };
    Some(if neg { -r } else { r })
}

pub fn approx_rat(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

pub fn sgn(q: &Rat) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// True iff q*b < a for every positive rational q. Requires a, b >= 0.
pub fn is_infinitesimal(b: &Scalar, a: &Scalar) -> Result<bool> {
    let sa = a.try_sign()?;
    let sb = b.try_sign()?;
    if sa < 0 || sb < 0 {
        return Err(Error::NegativeInput);
    }
    if sb == 0 {
        return Ok(sa > 0);
    }
    let lex = [a, b]
        .iter()
        .filter_map(|s| s.basis())
        .any(|bs| bs.kind == OracleKind::Lexicographic && !bs.is_empty());
    if lex {
        Ok(b.level() < a.level())
    } else {
        Ok(false)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.q0 == other.q0 && self.sym == other.sym
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.q0.hash(state);
        self.sym.hash(state);
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl From<Rat> for Scalar {
    fn from(q: Rat) -> Self {
        Scalar::rational(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            basis: self.basis.clone(),
            q0: -&self.q0,
            sym: self.sym.iter().map(|x| -x).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Mul<&Rat> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Rat) -> Scalar {
        self.mul_rat(rhs)
    }
}

impl Mul<&Rat> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Rat) -> Scalar {
        self.mul_rat(rhs)
    }
}

impl Div<&Rat> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Rat) -> Scalar {
        self.div_rat(rhs)
    }
}

impl Div<&Rat> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Rat) -> Scalar {
        self.div_rat(rhs)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

/// Dot product of a rational vector with a scalar vector.
pub fn dot_rs(u: &[Rat], w: &[Scalar]) -> Scalar {
    debug_assert_eq!(u.len(), w.len());
    let mut acc = Scalar::zero();
    for (a, b) in u.iter().zip(w) {
        if !a.is_zero() {
            acc += &b.mul_rat(a);
        }
    }
    acc
}

pub fn dot_rr(u: &[Rat], v: &[Rat]) -> Rat {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s32() -> Arc<SymbolBasis> {
        SymbolBasis::sqrts(&["a", "b"], &[3, 2])
    }

    #[test]
    fn sign_zero() {
        assert_eq!(Scalar::zero().sign(), 0);
    }

    #[test]
    fn sign_two_root_two_minus_root_three() {
        let b = s32();
        let s = b.symbol(1).mul_rat(&int(2)) - b.symbol(0);
        assert_eq!(s.sign(), 1);
    }

    #[test]
    fn lexicographic_dominant_symbol() {
        let b = SymbolBasis::lexicographic(&["w"]);
        let s = Scalar::one() - b.symbol(0).mul_rat(&rat(1, 1000));
        assert_eq!(s.sign(), -1);
    }

    #[test]
    fn infinitesimal_examples() {
        let lex = SymbolBasis::lexicographic(&["w"]);
        assert!(is_infinitesimal(&Scalar::one(), &lex.symbol(0)).unwrap());
        assert!(is_infinitesimal(&Scalar::zero(), &Scalar::one()).unwrap());
        let r2 = SymbolBasis::sqrts(&["r"], &[2]);
        assert!(!is_infinitesimal(&r2.symbol(0), &Scalar::one()).unwrap());
        assert_eq!(is_infinitesimal(&Scalar::from_int(-1), &Scalar::one()), Err(Error::NegativeInput));
    }

    #[test]
    fn symbol_product_rejected() {
        let b = s32();
        assert_eq!(b.symbol(0).checked_mul(&b.symbol(1)), Err(Error::SymbolProduct));
        assert_eq!(b.symbol(0).checked_mul(&Scalar::from_int(2)).unwrap(), b.symbol(0).mul_rat(&int(2)));
    }

    #[test]
    fn stalling_source_reports() {
        let src = FnSource { label: "stuck".into(), f: Arc::new(|_| (int(0), int(2))) };
        let b = SymbolBasis::interval(vec![("s".into(), Arc::new(src) as Arc<dyn Enclosure>)]);
        let s = b.symbol(0) - Scalar::one();
        assert_eq!(s.try_sign(), Err(Error::OracleStall("s".into())));
    }

    #[test]
    fn text_round_trip() {
        let b = s32();
        let s = Scalar::parse("3/2 - 2*a + b", Some(&b)).unwrap();
        assert_eq!(s.to_text(), "3/2 - 2*a + b");
        assert_eq!(Scalar::parse(&s.to_text(), Some(&b)).unwrap(), s);
        assert!(Scalar::parse("1/0", Some(&b)).is_err());
        assert!(Scalar::parse("2*c", Some(&b)).is_err());
        assert_eq!(Scalar::parse("-7/3", None).unwrap(), Scalar::rational(rat(-7, 3)));
    }

    fn mk_lex(b: &Arc<SymbolBasis>, c: (i64, i64, i64)) -> Scalar {
        Scalar::from_parts(Some(b.clone()), int(c.0), vec![int(c.1), int(c.2)])
    }

    proptest! {
        #[test]
        fn small_shift_keeps_infinitesimal(a in (-20i64..20, -20i64..20, 1i64..20), d in (0i64..20, 1i64..20), t in (-20i64..20, -20i64..20)) {
            let b = SymbolBasis::lexicographic(&["w1", "w2"]);
            let a = mk_lex(&b, a);
            let d = mk_lex(&b, (d.0, d.1, 0));
            let t = mk_lex(&b, (t.0, t.1, 0));
            prop_assert!(a.sign() > 0 && d.sign() > 0);
            prop_assert!(is_infinitesimal(&d, &a).unwrap());
            prop_assert!(is_infinitesimal(&t.abs(), &a).unwrap());
            let s = &a + &t;
            prop_assert!(s.sign() > 0);
            prop_assert!(is_infinitesimal(&d, &s).unwrap());
        }

        #[test]
        fn order_is_transitive(x in (-50i64..50, -50i64..50, -50i64..50), y in (-50i64..50, -50i64..50, -50i64..50), z in (-50i64..50, -50i64..50, -50i64..50)) {
            let b = s32();
            let mk = |c: (i64, i64, i64)| Scalar::from_parts(Some(b.clone()), int(c.0), vec![int(c.1), int(c.2)]);
            let (x, y, z) = (mk(x), mk(y), mk(z));
            if x.le(&y) && y.le(&z) {
                prop_assert!(x.le(&z));
            }
            prop_assert_eq!(x.cmp_value(&y), (&x - &y).sign().cmp(&0));
        }

        #[test]
        fn interval_sign_is_depth_independent(c in (-30i64..30, -30i64..30, -30i64..30)) {
            let b = s32();
            let s = Scalar::from_parts(Some(b.clone()), int(c.0), vec![int(c.1), int(c.2)]);
            prop_assume!(!s.is_zero());
            let sg = s.sign();
            for depth in [16u32, 64, 256] {
                let (lo, hi) = s.enclose(depth).unwrap();
                if lo.is_positive() { prop_assert_eq!(sg, 1); }
                if hi.is_negative() { prop_assert_eq!(sg, -1); }
            }
        }
    }
}
