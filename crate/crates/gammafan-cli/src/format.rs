//! Fan documents: JSON with exact scalars written as strings.
//!
//! ```json
//! {
//!   "header": {
//!     "dim": 3,
//!     "ambient": "half-space",
//!     "order": "interval-refinement",
//!     "symbols": [{ "name": "a", "enclosure": "sqrt(3)" }],
//!     "gamma": ["a"]
//!   },
//!   "cones": [{ "name": "s", "rays": [["0", "0", "1"], ["-3*a", "0", "1"]] }],
//!   "metadata": { "name": "example" }
//! }
//! ```
//!
//! A cone may be given by `rays`/`lines`, by `eqs`/`ineqs`, or by both, in which
//! case the two must describe the same cone. A functional is a list of `dim`
//! entries: rational coefficients on N followed by the height coefficient, which
//! may be symbolic.

use std::collections::BTreeMap;
use std::sync::Arc;

use gammafan::fixtures::Fixture;
use gammafan::gamma::ValueGroup;
use gammafan::polyhedra::cone::{Cone, HomFunctional, Point};
use gammafan::polyhedra::fan::{cmp_cones, Ambient, Fan};
use gammafan::linalg::rref;
use gammafan::scalar::{parse_rat, OracleKind, SymbolBasis};
use gammafan::{Error, Rat, Result, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDocument {
    pub header: Header,
    pub cones: Vec<ConeEntry>,
    #[serde(default)]
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub dim: usize,
    pub ambient: Ambient,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OracleKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symbols: Vec<SymbolDecl>,
    pub gamma: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDecl {
    pub name: String,
    /// `sqrt(n)`; absent for lexicographic symbols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enclosure: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rays: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eqs: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ineqs: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

/// A parsed document: the fan, its value group and the cone names.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub fan: Fan,
    pub gamma: ValueGroup,
    pub named: Vec<(String, Cone)>,
    pub metadata: Metadata,
}

impl Loaded {
    pub fn from_fixture(f: &Fixture) -> Loaded {
        Loaded {
            fan: f.fan.clone(),
            gamma: f.gamma.clone(),
            named: f.labels.iter().cloned().zip(f.cones.iter().cloned()).collect(),
            metadata: Metadata { name: Some(f.name.clone()), notes: f.notes.clone(), extra: BTreeMap::new() },
        }
    }

    /// A fan over the same value group; cones keep their old names, new ones are numbered.
    pub fn derived(&self, fan: Fan, name: &str) -> Loaded {
        let mut named = Vec::new();
        let mut fresh = 0;
        for c in fan.maximal() {
            let label = match self.named.iter().find(|(_, k)| k == c) {
                Some((l, _)) => l.clone(),
                None => {
                    fresh += 1;
                    format!("{name}{fresh}")
                }
            };
            named.push((label, c.clone()));
        }
        Loaded { fan, gamma: self.gamma.clone(), named, metadata: self.metadata.clone() }
    }

    pub fn label_of(&self, c: &Cone) -> Option<&str> {
        self.named.iter().find(|(_, k)| k == c).map(|(l, _)| l.as_str())
    }

    pub fn basis(&self) -> Option<&Arc<SymbolBasis>> {
        self.gamma.symbols()
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map(|i| before[i + 1..].chars().count()).unwrap_or(before.chars().count()) + 1;
    (line, column)
}

/// Rewrites a scalar error to point into the document text.
fn locate(text: &str, entry: &str, err: Error) -> Error {
    let (inner, msg) = match err {
        Error::ParseError { column, msg, .. } => (column, msg),
        other => return other,
    };
    let quoted = format!("\"{entry}\"");
    match text.find(&quoted) {
        Some(off) => {
            let (line, column) = position(text, off + 1);
            Error::ParseError { line, column: column + inner - 1, msg }
        }
        None => Error::ParseError { line: 0, column: 0, msg },
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::ParseError { line: e.line(), column: e.column(), msg: e.to_string() }
}

/// Parses a document; a report carrying a `document` field is also accepted.
pub fn parse_document(text: &str) -> Result<FanDocument> {
    match serde_json::from_str::<FanDocument>(text) {
        Ok(d) => Ok(d),
        Err(first) => {
            let v: serde_json::Value = serde_json::from_str(text).map_err(json_error)?;
            match v.get("document") {
                Some(inner) => serde_json::from_value(inner.clone()).map_err(|e| Error::ParseError { line: 0, column: 0, msg: e.to_string() }),
                None => Err(json_error(first)),
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Loaded> {
    let doc = parse_document(text)?;
    load(&doc, text)
}

fn radicand(s: &str) -> Option<i64> {
    let n: i64 = s.trim().strip_prefix("sqrt(")?.strip_suffix(')')?.trim().parse().ok()?;
    let r = (n as f64).sqrt().round() as i64;
    (n > 1 && r * r != n).then_some(n)
}

fn symbol_basis(h: &Header) -> Result<Option<Arc<SymbolBasis>>> {
    if h.symbols.is_empty() {
        return Ok(None);
    }
    let names: Vec<&str> = h.symbols.iter().map(|s| s.name.as_str()).collect();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || !n.chars().all(|c| c.is_alphanumeric() || c == '_') || n.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(Error::SemanticError(format!("bad symbol name `{n}`")));
        }
        if names[..i].contains(n) {
            return Err(Error::SemanticError(format!("symbol `{n}` declared twice")));
        }
    }
    match h.order.unwrap_or(OracleKind::IntervalRefinement) {
        OracleKind::Lexicographic => {
            if h.symbols.iter().any(|s| s.enclosure.is_some()) {
                return Err(Error::SemanticError("lexicographic symbols take no enclosure".into()));
            }
            Ok(Some(SymbolBasis::lexicographic(&names)))
        }
        OracleKind::IntervalRefinement => {
            let mut rads = Vec::new();
            for s in &h.symbols {
                let e = s.enclosure.as_deref().ok_or_else(|| Error::SemanticError(format!("symbol `{}` has no enclosure", s.name)))?;
                rads.push(radicand(e).ok_or_else(|| Error::SemanticError(format!("unsupported enclosure `{e}` (expected sqrt(n), n not a square)")))?);
            }
            Ok(Some(SymbolBasis::sqrts(&names, &rads)))
        }
    }
}

struct Ctx<'a> {
    text: &'a str,
    basis: Option<Arc<SymbolBasis>>,
    d: usize,
}

impl Ctx<'_> {
    fn scalar(&self, s: &str) -> Result<Scalar> {
        Scalar::parse(s, self.basis.as_ref()).map_err(|e| locate(self.text, s, e))
    }

    fn rational(&self, s: &str) -> Result<Rat> {
        parse_rat(s).ok_or_else(|| locate(self.text, s, Error::ParseError { line: 0, column: 1, msg: format!("malformed fraction `{s}`") }))
    }

    fn point(&self, cone: &str, v: &[String]) -> Result<Point> {
        if v.len() != self.d {
            return Err(Error::SemanticError(format!("cone `{cone}`: vector of length {} in dimension {}", v.len(), self.d)));
        }
        v.iter().map(|s| self.scalar(s)).collect()
    }

    fn functional(&self, cone: &str, v: &[String]) -> Result<HomFunctional> {
        if v.len() != self.d {
            return Err(Error::SemanticError(format!("cone `{cone}`: functional of length {} in dimension {}", v.len(), self.d)));
        }
        let u = v[..self.d - 1].iter().map(|s| self.rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(HomFunctional::new(u, self.scalar(&v[self.d - 1])?))
    }

    fn cone(&self, e: &ConeEntry) -> Result<Cone> {
        let has_v = !e.rays.is_empty() || !e.lines.is_empty();
        let has_h = !e.eqs.is_empty() || !e.ineqs.is_empty();
        let from_h = || -> Result<Cone> {
            let eqs = e.eqs.iter().map(|f| self.functional(&e.name, f)).collect::<Result<Vec<_>>>()?;
            let ineqs = e.ineqs.iter().map(|f| self.functional(&e.name, f)).collect::<Result<Vec<_>>>()?;
            Cone::from_h(self.d, eqs, ineqs)
        };
        let from_v = || -> Result<Cone> {
            let rays = e.rays.iter().map(|r| self.point(&e.name, r)).collect::<Result<Vec<_>>>()?;
            let lines = e.lines.iter().map(|r| self.point(&e.name, r)).collect::<Result<Vec<_>>>()?;
            Cone::from_rays(self.d, rays, lines)
        };
        match (has_v, has_h) {
            (true, true) => {
                let (a, b) = (from_v()?, from_h()?);
                if a != b {
                    return Err(Error::SemanticError(format!("cone `{}`: rays and inequalities describe different cones", e.name)));
                }
                Ok(a)
            }
            (false, true) => from_h(),
            (true, false) => from_v(),
            (false, false) => {
                if e.name.is_empty() {
                    Err(Error::SemanticError("cone without data".into()))
                } else {
                    // The zero cone has neither rays nor inequalities.
                    Ok(Cone::zero(self.d))
                }
            }
        }
    }
}

/// Builds the fan; `text` is the source used to locate scalar errors.
pub fn load(doc: &FanDocument, text: &str) -> Result<Loaded> {
    let h = &doc.header;
    let min = if h.ambient == Ambient::HalfSpace { 2 } else { 1 };
    if h.dim < min {
        return Err(Error::SemanticError(format!("ambient dimension {} is too small for {:?}", h.dim, h.ambient)));
    }
    let basis = symbol_basis(h)?;
    let cx = Ctx { text, basis, d: h.dim };
    if h.gamma.is_empty() {
        return Err(Error::SemanticError("empty value group basis".into()));
    }
    let gens = h.gamma.iter().map(|s| cx.scalar(s)).collect::<Result<Vec<_>>>()?;
    let gamma = ValueGroup::new(gens).map_err(|e| Error::SemanticError(format!("value group: {e}")))?;
    let mut named = Vec::new();
    for e in &doc.cones {
        if named.iter().any(|(n, _): &(String, Cone)| *n == e.name) {
            return Err(Error::SemanticError(format!("cone name `{}` used twice", e.name)));
        }
        let c = cx.cone(e).map_err(|err| match err {
            Error::ParseError { .. } | Error::SemanticError(_) => err,
            other => Error::SemanticError(format!("cone `{}`: {other}", e.name)),
        })?;
        named.push((e.name.clone(), c));
    }
    let fan = Fan::from_max(h.dim, h.ambient, named.iter().map(|(_, c)| c.clone()).collect()).map_err(|e| match e {
        Error::WrongAmbient => Error::SemanticError("a cone leaves the half-space t >= 0".into()),
        other => other,
    })?;
    Ok(Loaded { fan, gamma, named, metadata: doc.metadata.clone() })
}

fn point_text(p: &[Scalar]) -> Vec<String> {
    p.iter().map(|x| x.to_text()).collect()
}

fn functional_text(f: &HomFunctional) -> Vec<String> {
    let mut v: Vec<String> = f.u.iter().map(|q| q.to_string()).collect();
    v.push(f.c.to_text());
    v
}

/// Equations in reduced echelon form and facets reduced modulo them, all primitive
/// and sorted, so the text does not depend on how the cone was built.
fn canonical_h(c: &Cone, basis: Option<&Arc<SymbolBasis>>) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let m = basis.map(|b| b.len()).unwrap_or(0);
    let n = c.ambient_dim() - 1;
    let flat = |f: &HomFunctional| -> Vec<Rat> {
        let mut v = f.u.clone();
        v.extend(f.c.coords(m));
        v
    };
    let unflat = |v: &[Rat]| -> HomFunctional {
        let c = Scalar::from_parts(basis.cloned(), v[n].clone(), v[n + 1..].to_vec());
        HomFunctional::new(v[..n].to_vec(), c).normalized()
    };
    let rows: Vec<Vec<Rat>> = c.eqs().iter().map(flat).collect();
    let (red, pivots) = if rows.is_empty() { (Vec::new(), Vec::new()) } else { rref(&rows) };
    let eq_rows: Vec<Vec<Rat>> = red.into_iter().take(pivots.len()).collect();
    let mut facets: Vec<Vec<String>> = c
        .facets()
        .iter()
        .map(|f| {
            let mut v = flat(f);
            for (row, &p) in eq_rows.iter().zip(&pivots) {
                let k = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &k * y;
                }
            }
            functional_text(&unflat(&v))
        })
        .collect();
    facets.sort();
    let eqs = eq_rows.iter().map(|r| functional_text(&unflat(r))).collect();
    (eqs, facets)
}

/// Canonical document: maximal cones sorted, both descriptions, primitive normals.
pub fn emit(l: &Loaded) -> FanDocument {
    let basis = l.basis();
    let header = Header {
        dim: l.fan.ambient_dim(),
        ambient: l.fan.ambient(),
        order: basis.map(|b| b.kind),
        symbols: basis
            .map(|b| b.symbols.iter().map(|s| SymbolDecl { name: s.name.clone(), enclosure: s.source.as_ref().map(|e| e.describe()) }).collect())
            .unwrap_or_default(),
        gamma: l.gamma.basis().iter().map(|s| s.to_text()).collect(),
    };
    let mut maximal: Vec<Cone> = l.fan.maximal().to_vec();
    maximal.sort_by(cmp_cones);
    let mut fresh = 0;
    let cones = maximal
        .iter()
        .map(|c| {
            let name = match l.label_of(c) {
                Some(n) => n.to_string(),
                None => {
                    fresh += 1;
                    format!("c{fresh}")
                }
            };
            let (eqs, ineqs) = canonical_h(c, basis);
            ConeEntry {
                name,
                rays: c.rays().iter().map(|r| point_text(r)).collect(),
                lines: c.lines().iter().map(|r| point_text(r)).collect(),
                eqs,
                ineqs,
            }
        })
        .collect();
    FanDocument { header, cones, metadata: l.metadata.clone() }
}

pub fn to_text(doc: &FanDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn emit_text(l: &Loaded) -> String {
    to_text(&emit(l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gammafan::fixtures::{by_name, NAMES};

    #[test]
    fn fixtures_round_trip() {
        for name in NAMES {
            let f = by_name(name, &[]).unwrap();
            let text = emit_text(&Loaded::from_fixture(&f));
            let back = parse(&text).unwrap();
            assert!(back.fan.same_as(&f.fan), "{name}");
            assert_eq!(emit_text(&back), text, "{name}");
        }
    }

    #[test]
    fn hand_written_document() {
        let text = r#"{
  "header": {"dim": 3, "ambient": "half-space", "symbols": [{"name": "a", "enclosure": "sqrt(3)"}], "gamma": ["a"]},
  "cones": [
    {"name": "seg", "rays": [["0", "0", "1"], ["-3*a", "0", "1"]]},
    {"name": "pt", "eqs": [["1", "0", "3*a"], ["0", "1", "0"]], "ineqs": [["0", "0", "1"]]}
  ]
}"#;
        let l = parse(text).unwrap();
        assert_eq!(l.fan.maximal().len(), 1);
        assert_eq!(l.named.len(), 2);
        assert_eq!(l.gamma.rank(), 1);
    }

    #[test]
    fn malformed_fraction_is_located() {
        let text = "{\n  \"header\": {\"dim\": 2, \"ambient\": \"full\", \"gamma\": [\"1\"]},\n  \"cones\": [{\"name\": \"c\", \"ineqs\": [[\"1/0\", \"0\"]]}]\n}";
        match parse(text) {
            Err(Error::ParseError { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_syntax_error_has_position() {
        match parse("{\n  \"header\": ,\n}") {
            Err(Error::ParseError { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let unknown = r#"{"header": {"dim": 2, "ambient": "full", "gamma": ["1"]}, "cones": [{"name": "c", "rays": [["1", "q"]]}]}"#;
        assert!(matches!(parse(unknown), Err(Error::ParseError { .. })));
        let short = r#"{"header": {"dim": 2, "ambient": "full", "gamma": ["1"]}, "cones": [{"name": "c", "rays": [["1"]]}]}"#;
        assert!(matches!(parse(short), Err(Error::SemanticError(_))));
        let ambient = r#"{"header": {"dim": 1, "ambient": "half-space", "gamma": ["1"]}, "cones": []}"#;
        assert!(matches!(parse(ambient), Err(Error::SemanticError(_))));
        let square = r#"{"header": {"dim": 2, "ambient": "full", "symbols": [{"name": "a", "enclosure": "sqrt(4)"}], "gamma": ["a"]}, "cones": []}"#;
        assert!(matches!(parse(square), Err(Error::SemanticError(_))));
        let mismatch = r#"{"header": {"dim": 2, "ambient": "full", "gamma": ["1"]}, "cones": [{"name": "c", "rays": [["1", "0"]], "ineqs": [["0", "1"]]}]}"#;
        assert!(matches!(parse(mismatch), Err(Error::SemanticError(_))));
    }

    #[test]
    fn report_wrapper_is_accepted() {
        let f = by_name("thm45", &[]).unwrap();
        let doc = emit(&Loaded::from_fixture(&f));
        let wrapped = serde_json::json!({"status": "ok", "document": doc});
        let l = parse(&wrapped.to_string()).unwrap();
        assert!(l.fan.same_as(&f.fan));
    }
}
