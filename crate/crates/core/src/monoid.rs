//! The graph monoid `M_E`: generators `a_v` per vertex subject to
//! `a_v = Σ_{s(e)=v} a_{r(e)}` for every non-sink `v`.
//!
//! For no-exit graphs equality is decided exactly through rank vectors in
//! `ℕ^(l+k)`, the image of the monoid of equivalence classes of finitely
//! generated projectives; the map is sound and complete there because the
//! block model's monoid is free abelian of rank `l + k`. In general the
//! word problem is only semi-decided by a bounded breadth-first search over
//! the congruence, with an explicit `Unknown` answer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{is_no_exit, Graph, VertexId};
use crate::structure::{decompose, BlockMatrix, DecompositionData, StructureError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("element has {got} coordinates but the graph has {expected} vertices")]
    IndexMismatch { got: usize, expected: usize },
    #[error("unknown vertex generator {0:?}")]
    UnknownVertex(String),
    #[error("cannot parse monoid element: {0}")]
    Parse(String),
}

/// A monoid element: nonnegative coordinates over the vertex generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonoidElement {
    coeffs: Vec<u64>,
}

impl MonoidElement {
    pub fn zero(g: &Graph) -> MonoidElement {
        MonoidElement {
            coeffs: vec![0; g.vertex_count()],
        }
    }

    pub fn generator(g: &Graph, v: VertexId) -> MonoidElement {
        let mut m = MonoidElement::zero(g);
        m.coeffs[v.0] = 1;
        m
    }

    pub fn from_coeffs(coeffs: Vec<u64>) -> MonoidElement {
        MonoidElement { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, v: VertexId) -> u64 {
        self.coeffs[v.0]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Total of all coordinates.
    pub fn total(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    pub fn add(&self, rhs: &MonoidElement) -> MonoidElement {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len());
        MonoidElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Componentwise difference, or `None` when `rhs` is not dominated.
    pub fn checked_sub(&self, rhs: &MonoidElement) -> Option<MonoidElement> {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len());
        let coeffs: Option<Vec<u64>> = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.checked_sub(*b))
            .collect();
        Some(MonoidElement { coeffs: coeffs? })
    }

    pub fn display<'a>(&'a self, g: &'a Graph) -> impl fmt::Display + 'a {
        struct D<'a>(&'a MonoidElement, &'a Graph);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_zero() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (i, &c) in self.0.coeffs.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    if c == 1 {
                        write!(f, "a_{}", self.1.vertex_name(VertexId(i)))?;
                    } else {
                        write!(f, "{c} a_{}", self.1.vertex_name(VertexId(i)))?;
                    }
                }
                Ok(())
            }
        }
        D(self, g)
    }
}

/// A vector in `ℕ^(l+k)`: one coordinate per block of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankVector(pub Vec<u64>);

impl RankVector {
    pub fn add(&self, rhs: &RankVector) -> RankVector {
        RankVector(
            self.0
                .iter()
                .zip(&rhs.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl fmt::Display for RankVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// One defining relation per non-sink vertex:
/// `a_v = Σ_{e ∈ s^{-1}(v)} a_{r(e)}`.
pub fn relations(g: &Graph) -> Vec<(MonoidElement, MonoidElement)> {
    g.vertex_ids()
        .filter(|&v| !g.is_sink(v))
        .map(|v| {
            let lhs = MonoidElement::generator(g, v);
            let mut rhs = MonoidElement::zero(g);
            for &e in g.out_edges(v) {
                rhs.coeffs[g.range(e).0] += 1;
            }
            (lhs, rhs)
        })
        .collect()
}

/// The image of a monoid element in `ℕ^(l+k)`: component `t` counts
/// `Σ_v x[v] · #{p ∈ Λ_t : s(p) = v}`.
pub fn rank_vector(
    d: &DecompositionData,
    x: &MonoidElement,
) -> Result<RankVector, MonoidError> {
    let g = d.graph();
    if x.len() != g.vertex_count() {
        return Err(MonoidError::IndexMismatch {
            got: x.len(),
            expected: g.vertex_count(),
        });
    }
    let mut out = Vec::with_capacity(d.l() + d.k());
    let lambdas = d
        .cycle_blocks()
        .iter()
        .map(|cb| cb.lambda())
        .chain(d.sink_blocks().iter().map(|sb| sb.lambda()));
    for lambda in lambdas {
        let mut total = 0u64;
        for p in lambda {
            total += x.coeff(p.source());
        }
        out.push(total);
    }
    Ok(RankVector(out))
}

/// Exact equality for no-exit graphs: equal rank vectors.
pub fn eq_no_exit(
    d: &DecompositionData,
    x: &MonoidElement,
    y: &MonoidElement,
) -> Result<bool, MonoidError> {
    Ok(rank_vector(d, x)? == rank_vector(d, y)?)
}

/// Verdict of the bounded word-problem search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqOutcome {
    Equal,
    Distinct,
    Unknown,
}

fn neighbors(
    rels: &[(MonoidElement, MonoidElement)],
    m: &MonoidElement,
) -> Vec<MonoidElement> {
    let mut out = Vec::new();
    for (lhs, rhs) in rels {
        if let Some(rest) = m.checked_sub(lhs) {
            out.push(rest.add(rhs));
        }
        if let Some(rest) = m.checked_sub(rhs) {
            out.push(rest.add(lhs));
        }
    }
    out
}

/// Breadth-first closure of the congruence class of `start`, up to `depth`
/// rewrite layers and `cap` visited elements. Returns the visited set and
/// whether it is fully closed.
fn class_closure(
    rels: &[(MonoidElement, MonoidElement)],
    start: &MonoidElement,
    depth: usize,
    cap: usize,
) -> (BTreeSet<MonoidElement>, bool) {
    let mut seen: BTreeSet<MonoidElement> = BTreeSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![start.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for m in &frontier {
            for n in neighbors(rels, m) {
                if seen.len() >= cap {
                    return (seen, false);
                }
                if seen.insert(n.clone()) {
                    next.push(n);
                }
            }
        }
        if next.is_empty() {
            return (seen, true);
        }
        frontier = next;
    }
    let closed = frontier
        .iter()
        .all(|m| neighbors(rels, m).iter().all(|n| seen.contains(n)));
    (seen, closed)
}

/// Bounded word problem: BFS over the congruence generated by applying each
/// relation in either direction to sub-multisets. `Equal` when `y` is
/// reached from `x` within `depth` rewrites; `Distinct` only when a fully
/// closed class separates them; `Unknown` otherwise.
pub fn eq_bounded(
    g: &Graph,
    x: &MonoidElement,
    y: &MonoidElement,
    depth: usize,
) -> EqOutcome {
    if x == y {
        return EqOutcome::Equal;
    }
    let rels = relations(g);
    let (class_x, closed_x) = class_closure(&rels, x, depth, usize::MAX);
    if class_x.contains(y) {
        return EqOutcome::Equal;
    }
    if closed_x {
        return EqOutcome::Distinct;
    }
    let (class_y, closed_y) = class_closure(&rels, y, depth, usize::MAX);
    if class_y.contains(x) {
        return EqOutcome::Equal;
    }
    if closed_y {
        return EqOutcome::Distinct;
    }
    EqOutcome::Unknown
}

/// All monoid elements with coordinate total at most `bound`, ordered by
/// `(total, lexicographic coordinates)`.
pub fn elements_up_to(g: &Graph, bound: u64) -> Vec<MonoidElement> {
    let n = g.vertex_count();
    let mut out = vec![MonoidElement::zero(g)];
    for i in 0..n {
        let mut extended = Vec::new();
        for m in &out {
            let used: u64 = m.total();
            for c in 1..=(bound - used) {
                let mut coeffs = m.coeffs.clone();
                coeffs[i] = c;
                extended.push(MonoidElement { coeffs });
            }
        }
        out.extend(extended);
    }
    out.sort_by_key(|m| (m.total(), m.coeffs.clone()));
    out
}

const SEARCH_DEPTH: usize = 8;
const SEARCH_CLASS_CAP: usize = 4096;

/// Searches for `(a, b, c)` with `a + c ≡ b + c` but `a ≢ b`, over elements
/// of coordinate total at most `bound`. Triples are scanned in
/// `(total, a, b, c)` order with `b` below `a` (the condition is symmetric
/// in `a` and `b`); the first hit is returned.
///
/// On no-exit graphs equality goes through rank vectors, whose additivity
/// rules out any counterexample; the scan then degenerates to the pair scan.
pub fn cancellativity_search(
    g: &Arc<Graph>,
    bound: u64,
) -> Option<(MonoidElement, MonoidElement, MonoidElement)> {
    let elems = elements_up_to(g, bound);
    if is_no_exit(g) {
        let d = decompose(g).expect("no-exit graph decomposes");
        let ranks: Vec<RankVector> = elems
            .iter()
            .map(|m| rank_vector(&d, m).expect("element indexed by the graph"))
            .collect();
        for (ai, _a) in elems.iter().enumerate() {
            for bi in 0..ai {
                if ranks[ai] == ranks[bi] {
                    continue; // a ≡ b
                }
                // a ≢ b, but rank additivity makes a + c ≡ b + c impossible.
            }
        }
        return None;
    }

    let rels = relations(g);
    let mut closures: BTreeMap<MonoidElement, (BTreeSet<MonoidElement>, bool)> = BTreeMap::new();
    let mut eq = |x: &MonoidElement, y: &MonoidElement| -> EqOutcome {
        if x == y {
            return EqOutcome::Equal;
        }
        for (probe, other) in [(x, y), (y, x)] {
            let (class, closed) = closures
                .entry(probe.clone())
                .or_insert_with(|| class_closure(&rels, probe, SEARCH_DEPTH, SEARCH_CLASS_CAP));
            if class.contains(other) {
                return EqOutcome::Equal;
            }
            if *closed {
                return EqOutcome::Distinct;
            }
        }
        EqOutcome::Unknown
    };

    let mut triples: Vec<(u64, usize, usize, usize)> = Vec::new();
    for ai in 0..elems.len() {
        for bi in 0..ai {
            for ci in 0..elems.len() {
                triples.push((
                    elems[ai].total() + elems[bi].total() + elems[ci].total(),
                    ai,
                    bi,
                    ci,
                ));
            }
        }
    }
    triples.sort_by_key(|&(total, ai, bi, ci)| {
        (
            total,
            elems[ai].coeffs.clone(),
            elems[bi].coeffs.clone(),
            elems[ci].coeffs.clone(),
        )
    });
    for (_, ai, bi, ci) in triples {
        let (a, b, c) = (&elems[ai], &elems[bi], &elems[ci]);
        if eq(a, b) != EqOutcome::Distinct {
            continue;
        }
        if eq(&a.add(c), &b.add(c)) == EqOutcome::Equal {
            return Some((a.clone(), b.clone(), c.clone()));
        }
    }
    None
}

/// Per-block rank of an idempotent `Q`-model matrix: the rank vector of its
/// class of finitely generated projectives.
pub fn idempotent_rank(
    d: &DecompositionData,
    e: &BlockMatrix,
) -> Result<RankVector, StructureError> {
    if e.mul(e) != *e {
        return Err(StructureError::NotIdempotent);
    }
    if e.block_sizes() != d.block_sizes() {
        return Err(StructureError::Mismatch);
    }
    Ok(RankVector(
        e.block_ranks()?.into_iter().map(|r| r as u64).collect(),
    ))
}

/// Parses `"a_v + 2 a_w"` style linear expressions over vertex generators.
pub fn parse_monoid_element(g: &Graph, text: &str) -> Result<MonoidElement, MonoidError> {
    let text = text.trim();
    if text == "0" {
        return Ok(MonoidElement::zero(g));
    }
    let mut out = MonoidElement::zero(g);
    for part in text.split('+') {
        let tokens: Vec<&str> = part.split_whitespace().collect();
        let (count, gen) = match tokens.as_slice() {
            [gen] => (1u64, *gen),
            [count, gen] => (
                count
                    .parse()
                    .map_err(|_| MonoidError::Parse(format!("bad coefficient {count:?}")))?,
                *gen,
            ),
            _ => {
                return Err(MonoidError::Parse(format!(
                    "expected `[count] a_<vertex>`, found {part:?}"
                )))
            }
        };
        let name = gen
            .strip_prefix("a_")
            .ok_or_else(|| MonoidError::Parse(format!("generator {gen:?} must start with a_")))?;
        let v = g
            .vertex_by_name(name)
            .ok_or_else(|| MonoidError::UnknownVertex(name.to_string()))?;
        out.coeffs[v.0] += count;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{a2, loop_graph, rose2};

    fn gen(g: &Graph, name: &str) -> MonoidElement {
        MonoidElement::generator(g, g.vertex_by_name(name).unwrap())
    }

    #[test]
    fn relations_examples() {
        let g = a2();
        let rels = relations(&g);
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0], (gen(&g, "v"), gen(&g, "w")));

        let g = rose2();
        let rels = relations(&g);
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].0, gen(&g, "v"));
        assert_eq!(rels[0].1, MonoidElement::from_coeffs(vec![2]));

        let g = Graph::parse(r#"{"vertices":["w"],"edges":[]}"#).unwrap();
        assert!(relations(&g).is_empty());
    }

    #[test]
    fn rank_vector_examples() {
        let g = Arc::new(a2());
        let d = decompose(&g).unwrap();
        let rv = rank_vector(&d, &gen(&g, "v")).unwrap();
        assert_eq!(rv, RankVector(vec![1]));
        let rw = rank_vector(&d, &gen(&g, "w")).unwrap();
        assert_eq!(rw, RankVector(vec![1]));
        assert_eq!(
            rank_vector(&d, &MonoidElement::zero(&g)).unwrap(),
            RankVector(vec![0])
        );

        let g = Arc::new(loop_graph());
        let d = decompose(&g).unwrap();
        assert_eq!(rank_vector(&d, &gen(&g, "v")).unwrap(), RankVector(vec![1]));

        assert!(matches!(
            rank_vector(&d, &MonoidElement::from_coeffs(vec![1, 2])),
            Err(MonoidError::IndexMismatch { .. })
        ));
    }

    #[test]
    fn rank_respects_relations() {
        for g in [a2(), loop_graph(), crate::graph::tests::two_cycle_with_tail()] {
            let g = Arc::new(g);
            let d = decompose(&g).unwrap();
            for (lhs, rhs) in relations(&g) {
                assert_eq!(
                    rank_vector(&d, &lhs).unwrap(),
                    rank_vector(&d, &rhs).unwrap()
                );
            }
        }
    }

    #[test]
    fn eq_no_exit_examples() {
        let g = Arc::new(a2());
        let d = decompose(&g).unwrap();
        assert!(eq_no_exit(&d, &gen(&g, "v"), &gen(&g, "w")).unwrap());

        let g = Arc::new(loop_graph());
        let d = decompose(&g).unwrap();
        let a = gen(&g, "v");
        assert!(!eq_no_exit(&d, &a, &a.add(&a)).unwrap());
        assert!(eq_no_exit(&d, &a, &a).unwrap());
    }

    #[test]
    fn eq_bounded_examples() {
        let g = rose2();
        let a = gen(&g, "v");
        let two_a = a.add(&a);
        assert_eq!(eq_bounded(&g, &a, &two_a, 1), EqOutcome::Equal);
        assert_eq!(
            eq_bounded(&g, &a, &MonoidElement::zero(&g), 10),
            EqOutcome::Distinct
        );
        assert_eq!(eq_bounded(&g, &a, &a, 0), EqOutcome::Equal);
        // Too little depth to connect, class never closes: unknown.
        let five_a = MonoidElement::from_coeffs(vec![5]);
        assert_eq!(eq_bounded(&g, &a, &five_a, 1), EqOutcome::Unknown);
    }

    #[test]
    fn cancellativity_rose2() {
        let g = Arc::new(rose2());
        let found = cancellativity_search(&g, 2).expect("rose-2 is not cancellative");
        let a = gen(&g, "v");
        assert_eq!(found, (a.clone(), MonoidElement::zero(&g), a));
    }

    #[test]
    fn cancellativity_absent_on_no_exit() {
        assert!(cancellativity_search(&Arc::new(loop_graph()), 3).is_none());
        assert!(cancellativity_search(&Arc::new(a2()), 3).is_none());
    }

    #[test]
    fn idempotent_rank_examples() {
        let g = Arc::new(a2());
        let d = decompose(&g).unwrap();
        let v = crate::lpa::parse_element(&g, crate::scalar::FieldSpec::rationals(), "v").unwrap();
        let img = crate::structure::phi(&v, &d).unwrap().embed_q();
        assert_eq!(idempotent_rank(&d, &img).unwrap(), RankVector(vec![1]));

        let id = BlockMatrix::identity(&d, crate::structure::Model::Q, v.spec());
        assert_eq!(idempotent_rank(&d, &id).unwrap(), RankVector(vec![2]));

        let zero = BlockMatrix::zero(&d, crate::structure::Model::Q, v.spec());
        assert_eq!(idempotent_rank(&d, &zero).unwrap(), RankVector(vec![0]));

        // A permutation matrix squares to the identity, not itself.
        let spec = v.spec();
        let one = crate::scalar::Scalar::one(spec);
        let zero_s = crate::scalar::Scalar::zero(spec);
        let swap = crate::matrix::Matrix::from_rows(
            spec,
            vec![vec![zero_s.clone(), one.clone()], vec![one, zero_s]],
        );
        let not_idem = BlockMatrix::from_blocks(
            spec,
            crate::structure::Model::Q,
            vec![crate::structure::Block::Scalar(swap)],
        );
        assert_eq!(
            idempotent_rank(&d, &not_idem),
            Err(StructureError::NotIdempotent)
        );
    }

    #[test]
    fn parse_and_display() {
        let g = a2();
        let x = parse_monoid_element(&g, "a_v + 2 a_w").unwrap();
        assert_eq!(x, MonoidElement::from_coeffs(vec![1, 2]));
        assert_eq!(x.display(&g).to_string(), "a_v + 2 a_w");
        assert_eq!(
            parse_monoid_element(&g, "0").unwrap(),
            MonoidElement::zero(&g)
        );
        assert!(parse_monoid_element(&g, "a_z").is_err());
        assert!(parse_monoid_element(&g, "v").is_err());
    }

    #[test]
    fn elements_enumeration_order() {
        let g = a2();
        let elems = elements_up_to(&g, 1);
        assert_eq!(
            elems,
            vec![
                MonoidElement::from_coeffs(vec![0, 0]),
                MonoidElement::from_coeffs(vec![0, 1]),
                MonoidElement::from_coeffs(vec![1, 0]),
            ]
        );
        let elems = elements_up_to(&g, 2);
        assert_eq!(elems.len(), 6);
        assert!(elems.windows(2).all(|w| {
            (w[0].total(), w[0].coeffs().to_vec()) < (w[1].total(), w[1].coeffs().to_vec())
        }));
    }
}
