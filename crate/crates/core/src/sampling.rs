//! Seeded random generators for graphs, scalars, elements and block
//! matrices. Every consumer passes an explicit RNG so that reports and
//! tests are reproducible byte for byte.

use std::sync::Arc;

use rand::Rng;

use crate::graph::{exit_witness, is_no_exit, Graph, Path, VertexId};
use crate::lpa::{Element, Monomial};
use crate::monoid::MonoidElement;
use crate::scalar::{FieldKind, FieldSpec, LaurentPoly, Poly, RationalFunction, Scalar};
use crate::structure::{Block, BlockMatrix, DecompositionData, Model};
use crate::matrix::{FieldEntry, Matrix};

// ---- Scalars and function fields ----

pub fn random_scalar<R: Rng>(rng: &mut R, spec: FieldSpec) -> Scalar {
    match spec.kind() {
        FieldKind::Rationals => {
            Scalar::from_ratio(spec, rng.gen_range(-3..=3), rng.gen_range(1..=3))
        }
        FieldKind::GaussianRationals => Scalar::gauss(
            spec,
            (rng.gen_range(-2..=2), rng.gen_range(1..=2)),
            (rng.gen_range(-2..=2), rng.gen_range(1..=2)),
        ),
        FieldKind::PrimeField(p) => Scalar::from_i64(spec, rng.gen_range(0..p.min(64)) as i64),
    }
}

pub fn random_nonzero_scalar<R: Rng>(rng: &mut R, spec: FieldSpec) -> Scalar {
    loop {
        let s = random_scalar(rng, spec);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn random_laurent<R: Rng>(rng: &mut R, spec: FieldSpec, max_deg: i64) -> LaurentPoly {
    let mut out = LaurentPoly::zero(spec);
    for _ in 0..rng.gen_range(0..=2) {
        let exp = rng.gen_range(-max_deg..=max_deg);
        out = &out + &LaurentPoly::monomial(spec, exp, random_scalar(rng, spec));
    }
    out
}

pub fn random_poly<R: Rng>(rng: &mut R, spec: FieldSpec, max_deg: usize) -> Poly {
    let coeffs = (0..=rng.gen_range(0..=max_deg))
        .map(|_| random_scalar(rng, spec))
        .collect();
    Poly::from_coeffs(spec, coeffs)
}

pub fn random_ratfun<R: Rng>(rng: &mut R, spec: FieldSpec, max_deg: usize) -> RationalFunction {
    let num = random_poly(rng, spec, max_deg);
    let den = loop {
        let d = random_poly(rng, spec, max_deg);
        if !d.is_zero() {
            break d;
        }
    };
    RationalFunction::new(num, den).expect("nonzero denominator")
}

// ---- Graphs ----

fn build_graph(n_vertices: usize, edges: Vec<(String, String, String)>) -> Graph {
    let vertices: Vec<String> = (0..n_vertices).map(|i| format!("v{i}")).collect();
    Graph::new(vertices, edges).expect("generated names are valid")
}

/// A random graph with `1..=max_vertices` vertices and `0..=max_edges`
/// edges with uniform endpoints.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Graph {
    let nv = rng.gen_range(1..=max_vertices);
    let ne = rng.gen_range(0..=max_edges);
    let edges = (0..ne)
        .map(|i| {
            (
                format!("e{i}"),
                format!("v{}", rng.gen_range(0..nv)),
                format!("v{}", rng.gen_range(0..nv)),
            )
        })
        .collect();
    build_graph(nv, edges)
}

fn remove_edge(g: &Graph, name: &str) -> Graph {
    let vertices: Vec<String> = g.vertex_ids().map(|v| g.vertex_name(v).to_string()).collect();
    let edges = g
        .edge_ids()
        .filter(|&e| g.edge_name(e) != name)
        .map(|e| {
            (
                g.edge_name(e).to_string(),
                g.vertex_name(g.source(e)).to_string(),
                g.vertex_name(g.range(e)).to_string(),
            )
        })
        .collect();
    Graph::new(vertices, edges).expect("edge removal preserves validity")
}

/// A random no-exit graph: a random graph with exit edges deleted until no
/// cycle has one.
pub fn random_no_exit_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Graph {
    let mut g = random_graph(rng, max_vertices, max_edges);
    while let Some((_, exit, _)) = exit_witness(&g) {
        let name = g.edge_name(exit).to_string();
        g = remove_edge(&g, &name);
    }
    g
}

/// A random graph containing a cycle with an exit.
pub fn random_exit_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Graph {
    loop {
        let g = random_graph(rng, max_vertices, max_edges.max(2));
        if !is_no_exit(&g) {
            return g;
        }
    }
}

// ---- Elements ----

/// A random backward walk of length at most `max_len` ending at `v`.
pub fn random_path_ending_at<R: Rng>(
    rng: &mut R,
    g: &Graph,
    v: VertexId,
    max_len: usize,
) -> Path {
    let mut p = Path::trivial(v);
    for _ in 0..rng.gen_range(0..=max_len) {
        let ins = g.in_edges(p.source());
        if ins.is_empty() {
            break;
        }
        let e = ins[rng.gen_range(0..ins.len())];
        p = p.prepend_edge(g, e).expect("incoming edge composes");
    }
    p
}

pub fn random_monomial<R: Rng>(rng: &mut R, g: &Graph, max_len: usize) -> Monomial {
    let v = VertexId(rng.gen_range(0..g.vertex_count()));
    let p = random_path_ending_at(rng, g, v, max_len);
    let q = random_path_ending_at(rng, g, v, max_len);
    Monomial::new(p, q).expect("paths share the range vertex")
}

pub fn random_raw_combination<R: Rng>(
    rng: &mut R,
    g: &Graph,
    spec: FieldSpec,
    max_terms: usize,
    max_len: usize,
) -> Vec<(Monomial, Scalar)> {
    (0..rng.gen_range(1..=max_terms))
        .map(|_| (random_monomial(rng, g, max_len), random_scalar(rng, spec)))
        .collect()
}

pub fn random_element<R: Rng>(
    rng: &mut R,
    g: &Arc<Graph>,
    spec: FieldSpec,
    max_terms: usize,
    max_len: usize,
) -> Element {
    let raw = random_raw_combination(rng, g, spec, max_terms, max_len);
    Element::from_raw(g.clone(), spec, raw)
}

// ---- Block matrices ----

/// A random block matrix in the given model with entry degrees at most
/// `max_deg`.
pub fn random_block_matrix<R: Rng>(
    rng: &mut R,
    d: &DecompositionData,
    model: Model,
    spec: FieldSpec,
    max_deg: usize,
) -> BlockMatrix {
    let mut blocks = Vec::with_capacity(d.l() + d.k());
    for cb in d.cycle_blocks() {
        let n = cb.size();
        blocks.push(match model {
            Model::L => Block::Laurent(Matrix::from_rows(
                spec,
                (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| random_laurent(rng, spec, max_deg as i64))
                            .collect()
                    })
                    .collect(),
            )),
            Model::Q => Block::Rational(Matrix::from_rows(
                spec,
                (0..n)
                    .map(|_| (0..n).map(|_| random_ratfun(rng, spec, max_deg)).collect())
                    .collect(),
            )),
        });
    }
    for sb in d.sink_blocks() {
        let n = sb.size();
        blocks.push(Block::Scalar(Matrix::from_rows(
            spec,
            (0..n)
                .map(|_| (0..n).map(|_| random_scalar(rng, spec)).collect())
                .collect(),
        )));
    }
    BlockMatrix::from_blocks(spec, model, blocks)
}

/// A random invertible matrix with its exact inverse, built from a unit
/// diagonal and two transvections so entry degrees stay bounded.
fn random_invertible_matrix_pair<R: Rng, T: FieldEntry>(
    rng: &mut R,
    spec: FieldSpec,
    n: usize,
    entry: impl Fn(&mut R) -> T,
    nonzero: impl Fn(&mut R) -> T,
) -> (Matrix<T>, Matrix<T>) {
    let mut u: Matrix<T> = Matrix::identity(spec, n);
    let mut uinv: Matrix<T> = Matrix::identity(spec, n);
    for i in 0..n {
        let c = nonzero(rng);
        uinv.set(i, i, c.inv().expect("unit diagonal"));
        u.set(i, i, c);
    }
    if n >= 2 {
        for _ in 0..2 {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            let lam = entry(rng);
            let mut t: Matrix<T> = Matrix::identity(spec, n);
            t.set(i, j, lam.clone());
            let mut tinv: Matrix<T> = Matrix::identity(spec, n);
            tinv.set(i, j, lam.neg());
            u = u.mul(&t);
            uinv = tinv.mul(&uinv);
        }
    }
    (u, uinv)
}

fn nonzero_ratfun<R: Rng>(rng: &mut R, spec: FieldSpec, max_deg: usize) -> RationalFunction {
    loop {
        let f = random_ratfun(rng, spec, max_deg);
        if !f.is_zero() {
            return f;
        }
    }
}

/// A random invertible `Q`-model block matrix together with its inverse.
pub fn random_invertible_pair<R: Rng>(
    rng: &mut R,
    d: &DecompositionData,
    spec: FieldSpec,
    max_deg: usize,
) -> (BlockMatrix, BlockMatrix) {
    let mut blocks = Vec::with_capacity(d.l() + d.k());
    let mut inv_blocks = Vec::with_capacity(d.l() + d.k());
    for cb in d.cycle_blocks() {
        let (u, uinv) = random_invertible_matrix_pair(
            rng,
            spec,
            cb.size(),
            |r| random_ratfun(r, spec, max_deg),
            |r| nonzero_ratfun(r, spec, max_deg),
        );
        blocks.push(Block::Rational(u));
        inv_blocks.push(Block::Rational(uinv));
    }
    for sb in d.sink_blocks() {
        let (u, uinv) = random_invertible_matrix_pair(
            rng,
            spec,
            sb.size(),
            |r| random_scalar(r, spec),
            |r| random_nonzero_scalar(r, spec),
        );
        blocks.push(Block::Scalar(u));
        inv_blocks.push(Block::Scalar(uinv));
    }
    (
        BlockMatrix::from_blocks(spec, Model::Q, blocks),
        BlockMatrix::from_blocks(spec, Model::Q, inv_blocks),
    )
}

/// A random idempotent in the `Q` model: per block `u D u^{-1}` for a
/// random invertible `u` and a random-rank partial identity `D`.
pub fn random_idempotent<R: Rng>(
    rng: &mut R,
    d: &DecompositionData,
    spec: FieldSpec,
    max_deg: usize,
) -> BlockMatrix {
    fn conjugated<R: Rng, T: FieldEntry>(
        rng: &mut R,
        spec: FieldSpec,
        n: usize,
        entry: impl Fn(&mut R) -> T,
        nonzero: impl Fn(&mut R) -> T,
    ) -> Matrix<T> {
        let (u, uinv) = random_invertible_matrix_pair(rng, spec, n, entry, nonzero);
        let rank = rng.gen_range(0..=n);
        let diag = Matrix::partial_identity(spec, n, n, rank);
        u.mul(&diag).mul(&uinv)
    }
    let mut blocks = Vec::with_capacity(d.l() + d.k());
    for cb in d.cycle_blocks() {
        blocks.push(Block::Rational(conjugated(
            rng,
            spec,
            cb.size(),
            |r| random_ratfun(r, spec, max_deg),
            |r| nonzero_ratfun(r, spec, max_deg),
        )));
    }
    for sb in d.sink_blocks() {
        blocks.push(Block::Scalar(conjugated(
            rng,
            spec,
            sb.size(),
            |r| random_scalar(r, spec),
            |r| random_nonzero_scalar(r, spec),
        )));
    }
    BlockMatrix::from_blocks(spec, Model::Q, blocks)
}

// ---- Monoid elements ----

pub fn random_monoid_element<R: Rng>(rng: &mut R, g: &Graph, max_total: u64) -> MonoidElement {
    let n = g.vertex_count();
    let mut coeffs = vec![0u64; n];
    let total = rng.gen_range(0..=max_total);
    for _ in 0..total {
        coeffs[rng.gen_range(0..n)] += 1;
    }
    MonoidElement::from_coeffs(coeffs)
}
