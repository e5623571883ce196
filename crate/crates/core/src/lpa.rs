//! Elements of the Leavitt path algebra `L_K(E)`.
//!
//! An element is a finite `K`-linear combination of monomials `p q*` with
//! `r(p) = r(q)`, kept in normal form with respect to the graph's special
//! edge choice: for every non-sink vertex `v` fix the first declared edge
//! `γ(v)` of `s^{-1}(v)`; a monomial is normal unless `p` and `q` both end
//! in the same `γ(v)`. Such monomials rewrite by (CK2):
//!
//! ```text
//! (p0·γ(v)) (q0·γ(v))*  ->  p0 q0*  -  Σ_{f ∈ s^{-1}(v), f ≠ γ(v)} (p0·f)(q0·f)*
//! ```
//!
//! Every rewrite replaces a monomial by one strictly shorter monomial plus
//! same-length monomials that do not end in the special edge at that
//! junction, so the measure `(total length, number of special-edge endings)`
//! strictly decreases lexicographically and rewriting terminates. The
//! resulting normal forms are a linear basis, which makes structural
//! equality of normal forms a sound equality test and the zero test
//! decidable. The paper-independent choice of basis is the standard
//! special-edge construction; the source material fixes a basis only for
//! no-exit graphs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::graph::{exit_witness, EdgeId, Graph, Path, VertexId};
use crate::scalar::{FieldSpec, Scalar};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LpaError {
    #[error("the empty graph has no unit")]
    EmptyGraph,
    #[error("elements belong to different graphs or fields")]
    Mismatch,
    #[error("monomial paths must share their range vertex")]
    RangeDisagreement,
    #[error("graph has no cycle with an exit")]
    NoExitCycle,
    #[error("unknown vertex or edge name {0:?}")]
    UnknownName(String),
    #[error("cannot parse element expression: {0}")]
    Parse(String),
}

// ---- Monomials ----

/// A monomial `p q*` with `r(p) = r(q)`. A trivial `q` represents the real
/// path `p`; both trivial represents a vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    p: Path,
    q: Path,
}

impl Monomial {
    pub fn new(p: Path, q: Path) -> Result<Monomial, LpaError> {
        if p.range() != q.range() {
            return Err(LpaError::RangeDisagreement);
        }
        Ok(Monomial { p, q })
    }

    pub fn vertex(v: VertexId) -> Monomial {
        Monomial {
            p: Path::trivial(v),
            q: Path::trivial(v),
        }
    }

    /// The real path `p` (ghost part trivial).
    pub fn real(p: Path) -> Monomial {
        let q = Path::trivial(p.range());
        Monomial { p, q }
    }

    /// The ghost path `q*` (real part trivial).
    pub fn ghost(q: Path) -> Monomial {
        let p = Path::trivial(q.range());
        Monomial { p, q }
    }

    pub fn real_part(&self) -> &Path {
        &self.p
    }

    pub fn ghost_part(&self) -> &Path {
        &self.q
    }

    /// Grading degree `l(p) - l(q)`.
    pub fn degree(&self) -> i64 {
        self.p.len() as i64 - self.q.len() as i64
    }

    /// The product `(p q*)(u v*)`: `(p·u′) v*` if `u = q·u′`, `p (v·q′)*`
    /// if `q = u·q′`, otherwise zero.
    pub fn product(&self, g: &Graph, rhs: &Monomial) -> Option<Monomial> {
        let q = &self.q;
        let u = &rhs.p;
        if q.is_prefix_of(u) {
            let tail = u.suffix_from(g, q.len());
            let p = self.p.concat(&tail).expect("tail starts at r(p)");
            Some(Monomial { p, q: rhs.q.clone() })
        } else if u.is_prefix_of(q) {
            let tail = q.suffix_from(g, u.len());
            let q = rhs.q.concat(&tail).expect("tail starts at r(v)");
            Some(Monomial {
                p: self.p.clone(),
                q,
            })
        } else {
            None
        }
    }

    fn star(&self) -> Monomial {
        Monomial {
            p: self.q.clone(),
            q: self.p.clone(),
        }
    }
}

// ---- Special edge choice ----

/// The designated outgoing edge `γ(v)` of every non-sink vertex: the first
/// edge of `s^{-1}(v)` in declaration order. Fixed per graph; it selects
/// the normal-form basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialEdgeChoice {
    special: Vec<Option<EdgeId>>,
}

impl SpecialEdgeChoice {
    pub fn first_out_edge(g: &Graph) -> SpecialEdgeChoice {
        SpecialEdgeChoice {
            special: g.vertex_ids().map(|v| g.special_edge(v)).collect(),
        }
    }

    pub fn special_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.special[v.0]
    }
}

// ---- Elements ----

/// An element of `L_K(E)` in normal form: a finite map from normal
/// monomials to nonzero coefficients.
#[derive(Clone, Debug)]
pub struct Element {
    graph: Arc<Graph>,
    spec: FieldSpec,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.graph == other.graph && self.terms == other.terms
    }
}

impl Eq for Element {}

/// True when the monomial is rewritable: `p` and `q` both end in the
/// special edge of the same vertex.
fn rewritable_edge(g: &Graph, m: &Monomial) -> Option<EdgeId> {
    let pe = m.real_part().last_edge()?;
    let qe = m.ghost_part().last_edge()?;
    if pe == qe && g.special_edge(g.source(pe)) == Some(pe) {
        Some(pe)
    } else {
        None
    }
}

fn reduce(
    g: &Graph,
    mut work: Vec<(Monomial, Scalar)>,
    mut pick: impl FnMut(usize) -> usize,
) -> BTreeMap<Monomial, Scalar> {
    let mut out: BTreeMap<Monomial, Scalar> = BTreeMap::new();
    while !work.is_empty() {
        let idx = pick(work.len());
        let (m, c) = work.swap_remove(idx);
        if c.is_zero() {
            continue;
        }
        if let Some(e) = rewritable_edge(g, &m) {
            let p0 = m.p.without_last(g).unwrap();
            let q0 = m.q.without_last(g).unwrap();
            let v = g.source(e);
            for &f in g.out_edges(v) {
                if f == e {
                    continue;
                }
                let pf = p0.push_edge(g, f).unwrap();
                let qf = q0.push_edge(g, f).unwrap();
                work.push((Monomial { p: pf, q: qf }, -&c));
            }
            work.push((Monomial { p: p0, q: q0 }, c));
        } else {
            match out.remove(&m) {
                None => {
                    out.insert(m, c);
                }
                Some(existing) => {
                    let sum = &existing + &c;
                    if !sum.is_zero() {
                        out.insert(m, sum);
                    }
                }
            }
        }
    }
    out
}

impl Element {
    pub fn zero(graph: Arc<Graph>, spec: FieldSpec) -> Element {
        Element {
            graph,
            spec,
            terms: BTreeMap::new(),
        }
    }

    /// Normalizes a raw combination of monomials, rewriting in a fixed
    /// deterministic order.
    pub fn from_raw(
        graph: Arc<Graph>,
        spec: FieldSpec,
        raw: Vec<(Monomial, Scalar)>,
    ) -> Element {
        let terms = reduce(&graph, raw, |len| len - 1);
        Element { graph, spec, terms }
    }

    /// Normalizes a raw combination, rewriting in an order drawn from the
    /// given generator. Confluence makes the result independent of the
    /// order; tests sample this against [`Element::from_raw`].
    pub fn from_raw_with_rng<R: Rng>(
        graph: Arc<Graph>,
        spec: FieldSpec,
        raw: Vec<(Monomial, Scalar)>,
        rng: &mut R,
    ) -> Element {
        let terms = reduce(&graph, raw, |len| rng.gen_range(0..len));
        Element { graph, spec, terms }
    }

    pub fn from_monomial(graph: Arc<Graph>, spec: FieldSpec, m: Monomial) -> Element {
        Element::from_raw(graph, spec.clone(), vec![(m, Scalar::one(spec))])
    }

    pub fn vertex(graph: Arc<Graph>, spec: FieldSpec, v: VertexId) -> Element {
        Element::from_monomial(graph, spec, Monomial::vertex(v))
    }

    /// The identity `1 = Σ_v v`; `Err` on the empty graph.
    pub fn unit(graph: Arc<Graph>, spec: FieldSpec) -> Result<Element, LpaError> {
        if graph.vertex_count() == 0 {
            return Err(LpaError::EmptyGraph);
        }
        let raw = graph
            .vertex_ids()
            .map(|v| (Monomial::vertex(v), Scalar::one(spec)))
            .collect();
        Ok(Element::from_raw(graph, spec, raw))
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.spec))
    }

    fn compatible(&self, other: &Element) -> Result<(), LpaError> {
        if self.spec != other.spec || self.graph != other.graph {
            return Err(LpaError::Mismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &Element) -> Result<Element, LpaError> {
        self.compatible(rhs)?;
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            match terms.remove(m) {
                None => {
                    terms.insert(m.clone(), c.clone());
                }
                Some(existing) => {
                    let sum = &existing + c;
                    if !sum.is_zero() {
                        terms.insert(m.clone(), sum);
                    }
                }
            }
        }
        Ok(Element {
            graph: self.graph.clone(),
            spec: self.spec,
            terms,
        })
    }

    /// Bilinear extension of the monomial product, then normalization.
    pub fn checked_mul(&self, rhs: &Element) -> Result<Element, LpaError> {
        self.compatible(rhs)?;
        let mut raw = Vec::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if let Some(m) = ma.product(&self.graph, mb) {
                    raw.push((m, ca * cb));
                }
            }
        }
        Ok(Element::from_raw(self.graph.clone(), self.spec, raw))
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero(self.graph.clone(), self.spec);
        }
        Element {
            graph: self.graph.clone(),
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    /// The involution `(Σ k pq*)* = Σ k̄ qp*`. Normality of monomials is
    /// symmetric in `p` and `q`, so the swap stays in normal form.
    pub fn star(&self) -> Element {
        let terms: BTreeMap<Monomial, Scalar> = self
            .terms
            .iter()
            .map(|(m, c)| (m.star(), c.star()))
            .collect();
        debug_assert!(terms
            .keys()
            .all(|m| rewritable_edge(&self.graph, m).is_none()));
        Element {
            graph: self.graph.clone(),
            spec: self.spec,
            terms,
        }
    }

    /// Partition by monomial degree `l(p) - l(q)`; the components sum back
    /// to the element.
    pub fn degree_components(&self) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Element::zero(self.graph.clone(), self.spec))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("element mismatch")
    }
}

impl std::ops::Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs).expect("element mismatch")
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            graph: self.graph.clone(),
            spec: self.spec,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::ops::Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl std::ops::Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl std::ops::Mul for Element {
    type Output = Element;
    fn mul(self, rhs: Element) -> Element {
        &self * &rhs
    }
}

impl std::ops::Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

// ---- Constructive witnesses ----

/// Concatenates a closed path with itself `n` times (`n >= 1`).
fn path_pow(p: &Path, n: usize) -> Path {
    let mut out = p.clone();
    for _ in 1..n {
        out = out.concat(p).expect("closed path composes with itself");
    }
    out
}

/// For a graph with an exit-cycle: the element `x = p + Σ_{w ≠ v} w` built
/// from the first cycle with an exit, rotated so the exit sits at the base
/// `v`. It satisfies `x* x = 1` and `x x* ≠ 1`, exhibiting non-finiteness.
/// `None` when the graph is no-exit.
pub fn nonfinite_witness(graph: &Arc<Graph>, spec: FieldSpec) -> Option<Element> {
    let (cycle, _, pos) = exit_witness(graph)?;
    let p = cycle.rotation_at(graph, pos);
    let v = p.source();
    let mut raw = vec![(Monomial::real(p), Scalar::one(spec))];
    for w in graph.vertex_ids() {
        if w != v {
            raw.push((Monomial::vertex(w), Scalar::one(spec)));
        }
    }
    let x = Element::from_raw(graph.clone(), spec, raw);
    let unit = Element::unit(graph.clone(), spec).expect("graph has a cycle, hence a vertex");
    assert_eq!(&x.star() * &x, unit, "witness must satisfy x* x = 1");
    assert_ne!(&x * &x.star(), unit, "witness must satisfy x x* != 1");
    Some(x)
}

/// The first `n` members of the infinite orthogonal idempotent family
/// `p^k e e* (p*)^k`, for the first exit-cycle `p` with exit `e`.
pub fn orthogonal_idempotents(
    graph: &Arc<Graph>,
    spec: FieldSpec,
    n: usize,
) -> Result<Vec<Element>, LpaError> {
    let (cycle, exit, pos) = exit_witness(graph).ok_or(LpaError::NoExitCycle)?;
    let p = cycle.rotation_at(graph, pos);
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let stem = path_pow(&p, k)
            .push_edge(graph, exit)
            .expect("exit leaves the base of the rotated cycle");
        let m = Monomial {
            p: stem.clone(),
            q: stem,
        };
        out.push(Element::from_monomial(graph.clone(), spec, m));
    }
    Ok(out)
}

// ---- Expression parsing and printing ----

/// Parses the element grammar: terms separated by standalone `+`/`-`
/// tokens; a term is an optional scalar literal followed by vertex/edge
/// names, `*` suffix for ghost edges, juxtaposition meaning multiplication.
pub fn parse_element(
    graph: &Arc<Graph>,
    spec: FieldSpec,
    text: &str,
) -> Result<Element, LpaError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(LpaError::Parse("empty expression".to_string()));
    }
    if tokens == ["0"] {
        return Ok(Element::zero(graph.clone(), spec));
    }
    let mut result = Element::zero(graph.clone(), spec);
    let mut idx = 0;
    let mut negate = false;
    loop {
        let (term, next) = parse_term(graph, spec, &tokens, idx)?;
        result = if negate {
            &result - &term
        } else {
            &result + &term
        };
        if next == tokens.len() {
            return Ok(result);
        }
        match tokens[next] {
            "+" => negate = false,
            "-" => negate = true,
            t => {
                return Err(LpaError::Parse(format!(
                    "expected '+' or '-' between terms, found {t:?}"
                )))
            }
        }
        idx = next + 1;
        if idx == tokens.len() {
            return Err(LpaError::Parse("trailing separator".to_string()));
        }
    }
}

fn scalar_like(token: &str) -> bool {
    token.starts_with(|c: char| c.is_ascii_digit()) || (token.starts_with('-') && token.len() > 1)
}

fn parse_term(
    graph: &Arc<Graph>,
    spec: FieldSpec,
    tokens: &[&str],
    mut idx: usize,
) -> Result<(Element, usize), LpaError> {
    let mut coeff = Scalar::one(spec);
    if scalar_like(tokens[idx]) {
        coeff = Scalar::parse(spec, tokens[idx])
            .map_err(|e| LpaError::Parse(e.to_string()))?;
        idx += 1;
    }
    let mut factors = Vec::new();
    while idx < tokens.len() && !matches!(tokens[idx], "+" | "-") {
        if scalar_like(tokens[idx]) {
            return Err(LpaError::Parse(format!(
                "scalar literal {:?} must open its term",
                tokens[idx]
            )));
        }
        factors.push(parse_factor(graph, spec, tokens[idx])?);
        idx += 1;
    }
    if factors.is_empty() {
        return Err(LpaError::Parse(
            "a term needs at least one vertex or edge".to_string(),
        ));
    }
    let mut term = factors[0].scalar_mul(&coeff);
    for f in &factors[1..] {
        term = term.checked_mul(f)?;
    }
    Ok((term, idx))
}

fn parse_factor(
    graph: &Arc<Graph>,
    spec: FieldSpec,
    token: &str,
) -> Result<Element, LpaError> {
    let (name, ghost) = match token.strip_suffix('*') {
        Some(n) => (n, true),
        None => (token, false),
    };
    if let Some(v) = graph.vertex_by_name(name) {
        return Ok(Element::vertex(graph.clone(), spec, v));
    }
    if let Some(e) = graph.edge_by_name(name) {
        let path = Path::from_edges(graph, vec![e]).unwrap();
        let m = if ghost {
            Monomial::ghost(path)
        } else {
            Monomial::real(path)
        };
        return Ok(Element::from_monomial(graph.clone(), spec, m));
    }
    Err(LpaError::UnknownName(name.to_string()))
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let g = &self.graph;
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut words = Vec::new();
            if !c.is_one() {
                words.push(c.to_string());
            }
            if m.p.is_trivial() && m.q.is_trivial() {
                words.push(g.vertex_name(m.p.source()).to_string());
            } else {
                for e in m.p.edges() {
                    words.push(g.edge_name(*e).to_string());
                }
                for e in m.q.edges().iter().rev() {
                    words.push(format!("{}*", g.edge_name(*e)));
                }
            }
            parts.push(words.join(" "));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{a2, loop_graph, rose2, two_cycle_with_tail};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn elem(g: &Arc<Graph>, text: &str) -> Element {
        parse_element(g, q(), text).unwrap()
    }

    #[test]
    fn unit_examples() {
        let g = Arc::new(loop_graph());
        assert_eq!(Element::unit(g.clone(), q()).unwrap(), elem(&g, "v"));

        let g = Arc::new(a2());
        assert_eq!(Element::unit(g.clone(), q()).unwrap(), elem(&g, "v + w"));

        let g = Arc::new(Graph::parse(r#"{"vertices":["u","v"],"edges":[]}"#).unwrap());
        assert_eq!(Element::unit(g.clone(), q()).unwrap(), elem(&g, "u + v"));

        let empty = Arc::new(Graph::parse(r#"{"vertices":[],"edges":[]}"#).unwrap());
        assert_eq!(Element::unit(empty, q()), Err(LpaError::EmptyGraph));
    }

    #[test]
    fn ck1_ghost_edge_products() {
        let g = Arc::new(a2());
        // e* e = r(e) = w
        assert_eq!(elem(&g, "e* e"), elem(&g, "w"));

        let g = Arc::new(rose2());
        // e* f = 0
        assert!(elem(&g, "e* f").is_zero());
        // f* f = v
        assert_eq!(elem(&g, "f* f"), elem(&g, "v"));
    }

    #[test]
    fn ck2_collapse() {
        // v emits only e, so e e* = v.
        let g = Arc::new(a2());
        assert_eq!(elem(&g, "e e*"), elem(&g, "v"));

        // rose-2 with γ(v) = e: e e* -> v - f f*.
        let g = Arc::new(rose2());
        let ee = elem(&g, "e e*");
        assert_eq!(ee, elem(&g, "v - f f*"));
        // f f* is already normal.
        assert_eq!(elem(&g, "f f*").term_count(), 1);
    }

    #[test]
    fn normalization_is_idempotent() {
        let g = Arc::new(rose2());
        let x = elem(&g, "v - f f* + 2 e f*");
        let raw: Vec<(Monomial, Scalar)> =
            x.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        assert_eq!(Element::from_raw(g.clone(), q(), raw), x);
    }

    #[test]
    fn unit_is_neutral() {
        let g = Arc::new(two_cycle_with_tail());
        let one = Element::unit(g.clone(), q()).unwrap();
        for text in ["a", "b* + t a", "u + 3 a b"] {
            let x = elem(&g, text);
            assert_eq!(&x * &one, x);
            assert_eq!(&one * &x, x);
        }
    }

    #[test]
    fn star_examples() {
        let g = Arc::new(a2());
        let e = elem(&g, "e");
        let ghost = elem(&g, "e*");
        assert_eq!(e.star(), ghost);
        assert_eq!(ghost.star(), e);

        // Over GF(2) the involution fixes coefficients.
        let g2 = FieldSpec::prime_field(2).unwrap();
        let x = parse_element(&g, g2, "e + v").unwrap();
        assert_eq!(
            x.star(),
            parse_element(&g, g2, "e* + v").unwrap()
        );
    }

    #[test]
    fn star_is_anti_automorphism() {
        let g = Arc::new(rose2());
        let a = elem(&g, "e + 2 f f*");
        let b = elem(&g, "e* - v");
        assert_eq!((&a * &b).star(), &b.star() * &a.star());
        assert_eq!((&a + &b).star(), &a.star() + &b.star());
        assert_eq!(a.star().star(), a);
    }

    #[test]
    fn degree_components_examples() {
        let g = Arc::new(a2());
        let x = elem(&g, "e + e*");
        let comps = x.degree_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[&1], elem(&g, "e"));
        assert_eq!(comps[&-1], elem(&g, "e*"));

        let v = elem(&g, "v");
        let comps = v.degree_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[&0], v);

        let g = Arc::new(loop_graph());
        let x = elem(&g, "e e + 3 v");
        let comps = x.degree_components();
        assert_eq!(comps[&2], elem(&g, "e e"));
        assert_eq!(comps[&0], elem(&g, "3 v"));

        // Components sum back.
        let mut sum = Element::zero(g.clone(), q());
        for part in comps.values() {
            sum = &sum + part;
        }
        assert_eq!(sum, x);
    }

    #[test]
    fn grading_is_multiplicative() {
        let g = Arc::new(two_cycle_with_tail());
        let x = elem(&g, "a b");
        let y = elem(&g, "b* a*");
        for (da, ca) in x.degree_components() {
            for (db, cb) in y.degree_components() {
                let prod = &ca * &cb;
                for (d, _) in prod.degree_components() {
                    assert_eq!(d, da + db);
                }
            }
        }
    }

    #[test]
    fn nonfinite_witness_rose2() {
        let g = Arc::new(rose2());
        let x = nonfinite_witness(&g, q()).unwrap();
        // The sum over vertices other than the base is empty: x = e.
        assert_eq!(x, elem(&g, "e"));
        let unit = Element::unit(g.clone(), q()).unwrap();
        assert_eq!(&x.star() * &x, unit);
        assert_eq!(&x * &x.star(), elem(&g, "v - f f*"));
    }

    #[test]
    fn nonfinite_witness_absent_on_no_exit() {
        assert!(nonfinite_witness(&Arc::new(loop_graph()), q()).is_none());
        assert!(nonfinite_witness(&Arc::new(a2()), q()).is_none());
    }

    #[test]
    fn nonfinite_witness_rotates_to_exit() {
        // 2-cycle a: v->w, b: w->v with loop h at w: the first exit-cycle in
        // canonical order is (h) with exit b, so x is based at w.
        let g = Arc::new(
            Graph::parse(
                r#"{"vertices":["v","w"],"edges":[["a","v","w"],["b","w","v"],["h","w","w"]]}"#,
            )
            .unwrap(),
        );
        let x = nonfinite_witness(&g, q()).unwrap();
        assert_eq!(x, elem(&g, "h + v"));
    }

    #[test]
    fn orthogonal_idempotent_family() {
        let g = Arc::new(rose2());
        let fam = orthogonal_idempotents(&g, q(), 3).unwrap();
        assert_eq!(fam[0], elem(&g, "e f f* e*"));
        assert_eq!(fam[1], elem(&g, "e e f f* e* e*"));
        assert_eq!(fam[2], elem(&g, "e e e f f* e* e* e*"));
        for (i, x) in fam.iter().enumerate() {
            assert_eq!(&(x * x), x, "idempotent");
            for (j, y) in fam.iter().enumerate() {
                if i != j {
                    assert!((x * y).is_zero(), "orthogonal");
                    assert_ne!(x, y, "distinct");
                }
            }
        }
    }

    #[test]
    fn orthogonal_idempotents_require_exit() {
        let g = Arc::new(loop_graph());
        assert_eq!(
            orthogonal_idempotents(&g, q(), 1),
            Err(LpaError::NoExitCycle)
        );
    }

    #[test]
    fn mismatch_is_detected() {
        let g1 = Arc::new(loop_graph());
        let g2 = Arc::new(rose2());
        let a = Element::unit(g1, q()).unwrap();
        let b = Element::unit(g2, q()).unwrap();
        assert_eq!(a.checked_mul(&b), Err(LpaError::Mismatch));
        let c = a.clone();
        let gf = FieldSpec::prime_field(2).unwrap();
        let d = Element::unit(c.graph().clone(), gf).unwrap();
        assert_eq!(a.checked_add(&d), Err(LpaError::Mismatch));
    }

    #[test]
    fn parse_errors() {
        let g = Arc::new(a2());
        assert!(matches!(
            parse_element(&g, q(), "zz"),
            Err(LpaError::UnknownName(_))
        ));
        assert!(parse_element(&g, q(), "e +").is_err());
        assert!(parse_element(&g, q(), "3").is_err());
        assert!(parse_element(&g, q(), "").is_err());
        assert_eq!(
            parse_element(&g, q(), "0").unwrap(),
            Element::zero(g.clone(), q())
        );
    }

    #[test]
    fn display_round_trips() {
        let g = Arc::new(rose2());
        for text in ["v", "e + e*", "2 e f* - 3/2 v", "e e f f* e* e*", "0"] {
            let x = elem(&g, text);
            assert_eq!(elem(&g, &x.to_string()), x, "round trip of {text:?}");
        }
    }

    #[test]
    fn confluence_on_sampled_raw_combinations() {
        let g = Arc::new(rose2());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let raw = crate::sampling::random_raw_combination(&mut rng, &g, q(), 4, 3);
            let reference = Element::from_raw(g.clone(), q(), raw.clone());
            for _ in 0..4 {
                let shuffled =
                    Element::from_raw_with_rng(g.clone(), q(), raw.clone(), &mut rng);
                assert_eq!(shuffled, reference);
            }
        }
    }

    #[test]
    fn properness_over_positive_definite_field() {
        let g = Arc::new(rose2());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let x = crate::sampling::random_element(&mut rng, &g, q(), 3, 2);
            if !x.is_zero() {
                assert!(!(&x.star() * &x).is_zero());
            }
        }
    }
}
