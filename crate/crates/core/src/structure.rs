//! Structure-theorem decomposition of `L_K(E)` for finite no-exit graphs.
//!
//! For a finite no-exit graph the algebra decomposes as
//! `(⊕_i M_{m_i}(K[x,x^-1])) ⊕ (⊕_j M_{n_j}(K))`, one Laurent block per
//! cycle and one scalar block per sink, where `m_i` counts the paths ending
//! at a fixed base vertex of cycle `i` that do not contain the cycle and
//! `n_j` counts all paths ending at sink `j`. This module computes that
//! decomposition, the `*`-isomorphism `phi` onto the block model and its
//! inverse, the regular-algebra model `Q(E)` (same blocks over `K(x)`),
//! constructive regularity witnesses, graded dimensions, and the
//! isomorphism decision procedure on the invariants `(l, k, {m_i}, {n_j})`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{
    enumerate_cycles, exit_witness, paths_ending_at, Cycle, Graph, Path, PathMode, VertexId,
};
use crate::lpa::{Element, Monomial};
use crate::matrix::Matrix;
use crate::scalar::{FieldSpec, LaurentPoly, RationalFunction, Scalar};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("graph is not no-exit: cycle ({cycle}) has exit {exit} at position {position}")]
    NotNoExit {
        cycle: String,
        exit: String,
        position: usize,
    },
    #[error("element or matrix does not match this decomposition")]
    Mismatch,
    #[error("operation requires the other matrix model")]
    ModelMismatch,
    #[error("matrix is not idempotent")]
    NotIdempotent,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

// ---- Decomposition data ----

/// One cycle block: the cycle, its base vertex, and the indexed path family
/// `Λ` of paths ending at the base that do not contain the cycle.
#[derive(Clone, Debug)]
pub struct CycleBlock {
    cycle: Cycle,
    base: VertexId,
    lambda: Vec<Path>,
    index: BTreeMap<Path, usize>,
}

impl CycleBlock {
    pub fn cycle(&self) -> &Cycle {
        &self.cycle
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn lambda(&self) -> &[Path] {
        &self.lambda
    }

    pub fn size(&self) -> usize {
        self.lambda.len()
    }
}

/// One sink block: the sink and all paths ending at it.
#[derive(Clone, Debug)]
pub struct SinkBlock {
    sink: VertexId,
    lambda: Vec<Path>,
    index: BTreeMap<Path, usize>,
}

impl SinkBlock {
    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn lambda(&self) -> &[Path] {
        &self.lambda
    }

    pub fn size(&self) -> usize {
        self.lambda.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BlockRef {
    Cycle(usize),
    Sink(usize),
}

/// The invariants of a finite no-exit graph: cycle blocks, sink blocks and
/// the indexed path families behind the matrix units.
#[derive(Clone, Debug)]
pub struct DecompositionData {
    graph: Arc<Graph>,
    cycle_blocks: Vec<CycleBlock>,
    sink_blocks: Vec<SinkBlock>,
    terminal: Vec<Option<BlockRef>>,
    descent: Vec<Vec<Path>>,
}

/// The path family `Λ` of a cycle for an arbitrary base vertex on it: every
/// path ending at the base that does not contain the cycle, enumerated as
/// `q · σ` over the proper suffixes `σ` of the rotation at the base, with
/// `q` ranging over the cycle-edge-free paths ending at `s(σ)`.
pub fn cycle_lambda(g: &Graph, cycle: &Cycle, base: VertexId) -> Vec<Path> {
    let pos = cycle
        .position_of_vertex(g, base)
        .expect("base vertex lies on the cycle");
    let rotation = cycle.rotation_at(g, pos);
    let n = rotation.len();
    let mut out = Vec::new();
    for dropped in 1..=n {
        let sigma = rotation.suffix_from(g, dropped);
        for q in paths_ending_at(g, sigma.source(), PathMode::NoCycleEdges) {
            out.push(q.concat(&sigma).expect("sigma starts where q ends"));
        }
    }
    out.sort_by(|a, b| g.cmp_paths(a, b));
    out
}

/// Decomposes a finite no-exit graph. Fails with the offending exit
/// otherwise.
pub fn decompose(graph: &Arc<Graph>) -> Result<DecompositionData, StructureError> {
    if let Some((cycle, exit, position)) = exit_witness(graph) {
        return Err(StructureError::NotNoExit {
            cycle: graph.path_string(cycle.path()),
            exit: graph.edge_name(exit).to_string(),
            position,
        });
    }
    let cycle_blocks: Vec<CycleBlock> = enumerate_cycles(graph)
        .into_iter()
        .map(|cycle| {
            let base = cycle.base();
            let lambda = cycle_lambda(graph, &cycle, base);
            let index = lambda
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), i))
                .collect();
            CycleBlock {
                cycle,
                base,
                lambda,
                index,
            }
        })
        .collect();
    let sink_blocks: Vec<SinkBlock> = graph
        .sinks()
        .into_iter()
        .map(|sink| {
            let lambda = paths_ending_at(graph, sink, PathMode::NoCycleEdges);
            let index = lambda
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), i))
                .collect();
            SinkBlock {
                sink,
                lambda,
                index,
            }
        })
        .collect();

    let mut terminal = vec![None; graph.vertex_count()];
    for (t, cb) in cycle_blocks.iter().enumerate() {
        terminal[cb.base.0] = Some(BlockRef::Cycle(t));
    }
    for (j, sb) in sink_blocks.iter().enumerate() {
        terminal[sb.sink.0] = Some(BlockRef::Sink(j));
    }

    // Minimal descent paths: from each vertex, follow all outgoing edges
    // until the first base or sink. Finite because every branch reaches a
    // sink or enters a cycle and runs to its base.
    let descent = graph
        .vertex_ids()
        .map(|u| {
            let mut out = Vec::new();
            let mut stack = vec![Path::trivial(u)];
            while let Some(p) = stack.pop() {
                if terminal[p.range().0].is_some() {
                    out.push(p);
                    continue;
                }
                for &e in graph.out_edges(p.range()) {
                    stack.push(p.push_edge(graph, e).unwrap());
                }
            }
            out
        })
        .collect();

    Ok(DecompositionData {
        graph: graph.clone(),
        cycle_blocks,
        sink_blocks,
        terminal,
        descent,
    })
}

impl DecompositionData {
    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    /// Number of cycle blocks.
    pub fn l(&self) -> usize {
        self.cycle_blocks.len()
    }

    /// Number of sink blocks.
    pub fn k(&self) -> usize {
        self.sink_blocks.len()
    }

    pub fn cycle_blocks(&self) -> &[CycleBlock] {
        &self.cycle_blocks
    }

    pub fn sink_blocks(&self) -> &[SinkBlock] {
        &self.sink_blocks
    }

    /// All block sizes, cycle blocks first.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.cycle_blocks
            .iter()
            .map(CycleBlock::size)
            .chain(self.sink_blocks.iter().map(SinkBlock::size))
            .collect()
    }

    /// Total number of indexed `Λ` paths.
    pub fn lambda_count(&self) -> usize {
        self.block_sizes().iter().sum()
    }

    pub fn model_descriptor(&self, model: Model) -> ModelDescriptor {
        ModelDescriptor {
            model,
            cycle_sizes: self.cycle_blocks.iter().map(CycleBlock::size).collect(),
            sink_sizes: self.sink_blocks.iter().map(SinkBlock::size).collect(),
        }
    }

    /// Dimension of the degree-`n` graded component: the number of basis
    /// monomials `p_r c_t^z p_s*` with
    /// `l(p_r) - l(p_s) + z·l(c_t) = n` (cycle blocks, unique `z` when
    /// divisibility holds) or `l(p_r) - l(p_s) = n` (sink blocks).
    pub fn graded_dim(&self, n: i64) -> u64 {
        let mut count = 0u64;
        for cb in &self.cycle_blocks {
            let clen = cb.cycle.len() as i64;
            for pr in &cb.lambda {
                for ps in &cb.lambda {
                    if (n - (pr.len() as i64 - ps.len() as i64)).rem_euclid(clen) == 0 {
                        count += 1;
                    }
                }
            }
        }
        for sb in &self.sink_blocks {
            for pr in &sb.lambda {
                for ps in &sb.lambda {
                    if pr.len() as i64 - ps.len() as i64 == n {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

// ---- Matrix models ----

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// `L(E)`: Laurent polynomial entries in cycle blocks.
    L,
    /// `Q(E)`: rational function entries in cycle blocks.
    Q,
}

/// Shape of a block model, printable as e.g. `M_3(K[x,x^-1]) ⊕ M_2(K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDescriptor {
    model: Model,
    cycle_sizes: Vec<usize>,
    sink_sizes: Vec<usize>,
}

impl ModelDescriptor {
    pub fn model(&self) -> Model {
        self.model
    }

    pub fn cycle_sizes(&self) -> &[usize] {
        &self.cycle_sizes
    }

    pub fn sink_sizes(&self) -> &[usize] {
        &self.sink_sizes
    }
}

impl fmt::Display for ModelDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeff = match self.model {
            Model::L => "K[x,x^-1]",
            Model::Q => "K(x)",
        };
        let mut parts: Vec<String> = self
            .cycle_sizes
            .iter()
            .map(|m| format!("M_{m}({coeff})"))
            .collect();
        parts.extend(self.sink_sizes.iter().map(|n| format!("M_{n}(K)")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// One block of a block-diagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    Laurent(Matrix<LaurentPoly>),
    Rational(Matrix<RationalFunction>),
    Scalar(Matrix<Scalar>),
}

impl Block {
    pub fn size(&self) -> usize {
        match self {
            Block::Laurent(m) => m.n_rows(),
            Block::Rational(m) => m.n_rows(),
            Block::Scalar(m) => m.n_rows(),
        }
    }

    fn is_cycle(&self) -> bool {
        !matches!(self, Block::Scalar(_))
    }

    fn binop(
        &self,
        rhs: &Block,
        fl: impl Fn(&Matrix<LaurentPoly>, &Matrix<LaurentPoly>) -> Matrix<LaurentPoly>,
        fr: impl Fn(&Matrix<RationalFunction>, &Matrix<RationalFunction>) -> Matrix<RationalFunction>,
        fs: impl Fn(&Matrix<Scalar>, &Matrix<Scalar>) -> Matrix<Scalar>,
    ) -> Block {
        match (self, rhs) {
            (Block::Laurent(a), Block::Laurent(b)) => Block::Laurent(fl(a, b)),
            (Block::Rational(a), Block::Rational(b)) => Block::Rational(fr(a, b)),
            (Block::Scalar(a), Block::Scalar(b)) => Block::Scalar(fs(a, b)),
            _ => panic!("block kind mismatch"),
        }
    }

    fn add(&self, rhs: &Block) -> Block {
        self.binop(rhs, Matrix::add, Matrix::add, Matrix::add)
    }

    fn sub(&self, rhs: &Block) -> Block {
        self.binop(rhs, Matrix::sub, Matrix::sub, Matrix::sub)
    }

    fn mul(&self, rhs: &Block) -> Block {
        self.binop(rhs, Matrix::mul, Matrix::mul, Matrix::mul)
    }

    fn neg(&self) -> Block {
        match self {
            Block::Laurent(m) => Block::Laurent(m.neg()),
            Block::Rational(m) => Block::Rational(m.neg()),
            Block::Scalar(m) => Block::Scalar(m.neg()),
        }
    }

    fn star(&self) -> Block {
        match self {
            Block::Laurent(m) => Block::Laurent(m.star()),
            Block::Rational(m) => Block::Rational(m.star()),
            Block::Scalar(m) => Block::Scalar(m.star()),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Block::Laurent(m) => m.is_zero(),
            Block::Rational(m) => m.is_zero(),
            Block::Scalar(m) => m.is_zero(),
        }
    }

    fn is_identity(&self) -> bool {
        match self {
            Block::Laurent(m) => m.is_identity(),
            Block::Rational(m) => m.is_identity(),
            Block::Scalar(m) => m.is_identity(),
        }
    }

    /// Inverse where the entries form a field; `None` for singular input
    /// and for Laurent blocks.
    fn inverse(&self) -> Option<Block> {
        match self {
            Block::Laurent(_) => None,
            Block::Rational(m) => m.inverse().map(Block::Rational),
            Block::Scalar(m) => m.inverse().map(Block::Scalar),
        }
    }

    fn rank(&self) -> Option<usize> {
        match self {
            Block::Laurent(_) => None,
            Block::Rational(m) => Some(m.rank()),
            Block::Scalar(m) => Some(m.rank()),
        }
    }

    pub fn entry_string(&self, r: usize, c: usize) -> String {
        match self {
            Block::Laurent(m) => m.get(r, c).to_string(),
            Block::Rational(m) => m.get(r, c).to_string(),
            Block::Scalar(m) => m.get(r, c).to_string(),
        }
    }
}

/// Block-diagonal matrix in the `L(E)` or `Q(E)` model: Laurent or rational
/// function entries in cycle blocks, scalar entries in sink blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    spec: FieldSpec,
    model: Model,
    blocks: Vec<Block>,
}

impl BlockMatrix {
    pub fn from_blocks(spec: FieldSpec, model: Model, blocks: Vec<Block>) -> BlockMatrix {
        for b in &blocks {
            match (model, b) {
                (Model::L, Block::Rational(_)) | (Model::Q, Block::Laurent(_)) => {
                    panic!("block entry kind does not match the model")
                }
                _ => {}
            }
        }
        BlockMatrix {
            spec,
            model,
            blocks,
        }
    }

    pub fn zero(d: &DecompositionData, model: Model, spec: FieldSpec) -> BlockMatrix {
        let mut blocks = Vec::with_capacity(d.l() + d.k());
        for cb in &d.cycle_blocks {
            blocks.push(match model {
                Model::L => Block::Laurent(Matrix::zero(spec, cb.size(), cb.size())),
                Model::Q => Block::Rational(Matrix::zero(spec, cb.size(), cb.size())),
            });
        }
        for sb in &d.sink_blocks {
            blocks.push(Block::Scalar(Matrix::zero(spec, sb.size(), sb.size())));
        }
        BlockMatrix {
            spec,
            model,
            blocks,
        }
    }

    pub fn identity(d: &DecompositionData, model: Model, spec: FieldSpec) -> BlockMatrix {
        let mut blocks = Vec::with_capacity(d.l() + d.k());
        for cb in &d.cycle_blocks {
            blocks.push(match model {
                Model::L => Block::Laurent(Matrix::identity(spec, cb.size())),
                Model::Q => Block::Rational(Matrix::identity(spec, cb.size())),
            });
        }
        for sb in &d.sink_blocks {
            blocks.push(Block::Scalar(Matrix::identity(spec, sb.size())));
        }
        BlockMatrix {
            spec,
            model,
            blocks,
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::size).collect()
    }

    fn zip(&self, rhs: &BlockMatrix, f: impl Fn(&Block, &Block) -> Block) -> BlockMatrix {
        assert_eq!(self.model, rhs.model, "model mismatch");
        assert_eq!(self.spec, rhs.spec, "field mismatch");
        assert_eq!(self.blocks.len(), rhs.blocks.len(), "shape mismatch");
        BlockMatrix {
            spec: self.spec,
            model: self.model,
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, rhs: &BlockMatrix) -> BlockMatrix {
        self.zip(rhs, Block::add)
    }

    pub fn sub(&self, rhs: &BlockMatrix) -> BlockMatrix {
        self.zip(rhs, Block::sub)
    }

    pub fn mul(&self, rhs: &BlockMatrix) -> BlockMatrix {
        self.zip(rhs, Block::mul)
    }

    pub fn neg(&self) -> BlockMatrix {
        BlockMatrix {
            spec: self.spec,
            model: self.model,
            blocks: self.blocks.iter().map(Block::neg).collect(),
        }
    }

    /// Block-wise conjugate transpose; on the `Q` model this is the unique
    /// extension of the `L(E)` involution.
    pub fn star(&self) -> BlockMatrix {
        BlockMatrix {
            spec: self.spec,
            model: self.model,
            blocks: self.blocks.iter().map(Block::star).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Block::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.iter().all(Block::is_identity)
    }

    /// Block-wise inverse; `None` when any block is singular. Only the `Q`
    /// model (and sink blocks) supports inversion.
    pub fn inverse(&self) -> Option<BlockMatrix> {
        let blocks: Option<Vec<Block>> = self.blocks.iter().map(Block::inverse).collect();
        Some(BlockMatrix {
            spec: self.spec,
            model: self.model,
            blocks: blocks?,
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_some()
    }

    /// Embeds the `L` model into the `Q` model entry-wise.
    pub fn embed_q(&self) -> BlockMatrix {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match b {
                Block::Laurent(m) => Block::Rational(m.map(RationalFunction::from_laurent)),
                other => other.clone(),
            })
            .collect();
        BlockMatrix {
            spec: self.spec,
            model: Model::Q,
            blocks,
        }
    }

    /// Per-block ranks; requires the `Q` model.
    pub fn block_ranks(&self) -> Result<Vec<usize>, StructureError> {
        self.blocks
            .iter()
            .map(|b| b.rank().ok_or(StructureError::ModelMismatch))
            .collect()
    }

    /// Rearranges blocks: cycle block `i` moves to position `cycle_perm[i]`
    /// among cycle blocks, sink block `j` to `sink_perm[j]` among sinks.
    pub fn permute_blocks(&self, cycle_perm: &[usize], sink_perm: &[usize]) -> BlockMatrix {
        let cycles: Vec<&Block> = self.blocks.iter().filter(|b| b.is_cycle()).collect();
        let sinks: Vec<&Block> = self.blocks.iter().filter(|b| !b.is_cycle()).collect();
        assert_eq!(cycles.len(), cycle_perm.len());
        assert_eq!(sinks.len(), sink_perm.len());
        let mut new_cycles: Vec<Option<Block>> = vec![None; cycles.len()];
        for (i, b) in cycles.iter().enumerate() {
            new_cycles[cycle_perm[i]] = Some((*b).clone());
        }
        let mut new_sinks: Vec<Option<Block>> = vec![None; sinks.len()];
        for (j, b) in sinks.iter().enumerate() {
            new_sinks[sink_perm[j]] = Some((*b).clone());
        }
        BlockMatrix {
            spec: self.spec,
            model: self.model,
            blocks: new_cycles
                .into_iter()
                .chain(new_sinks)
                .map(|b| b.expect("permutation is a bijection"))
                .collect(),
        }
    }
}

// ---- The *-isomorphism phi and its inverse ----

/// Strips trailing copies of the cycle rotation from a path ending at the
/// base, returning the residual `Λ` path and the number of copies.
fn strip_trailing_cycles(g: &Graph, cb: &CycleBlock, path: Path) -> (Path, i64) {
    let cyc = cb.cycle.path().edges();
    let mut edges = path.edges().to_vec();
    let mut z = 0i64;
    while edges.len() >= cyc.len() && edges[edges.len() - cyc.len()..] == *cyc {
        edges.truncate(edges.len() - cyc.len());
        z += 1;
    }
    let residue = if edges.is_empty() {
        Path::trivial(cb.base)
    } else {
        Path::from_edges(g, edges).expect("subpath of a path composes")
    };
    (residue, z)
}

/// The `*`-isomorphism onto the `L` block model: rewrite each monomial into
/// the basis `p_r c_t^z p_s*` by expanding the common range vertex with
/// (CK2) until every branch reaches a sink or base, then map
/// `p_r c_t^z p_s* -> x^z e_rs` and `p_r p_s* -> e_rs`.
pub fn phi(a: &Element, d: &DecompositionData) -> Result<BlockMatrix, StructureError> {
    if a.graph() != &d.graph {
        return Err(StructureError::Mismatch);
    }
    let g = &d.graph;
    let spec = a.spec();
    let mut out = BlockMatrix::zero(d, Model::L, spec);
    for (mono, coeff) in a.terms() {
        let u = mono.real_part().range();
        for desc in &d.descent[u.0] {
            let p_ext = mono.real_part().concat(desc).expect("descent starts at r(p)");
            let q_ext = mono.ghost_part().concat(desc).expect("descent starts at r(q)");
            match d.terminal[desc.range().0].expect("descent ends at a terminal vertex") {
                BlockRef::Cycle(t) => {
                    let cb = &d.cycle_blocks[t];
                    let (pr, zp) = strip_trailing_cycles(g, cb, p_ext);
                    let (ps, zq) = strip_trailing_cycles(g, cb, q_ext);
                    let r = *cb.index.get(&pr).expect("residual path lies in Λ");
                    let s = *cb.index.get(&ps).expect("residual path lies in Λ");
                    let term = LaurentPoly::monomial(spec, zp - zq, coeff.clone());
                    let Block::Laurent(m) = &mut out.blocks[t] else {
                        unreachable!()
                    };
                    m.set(r, s, &m.get(r, s).clone() + &term);
                }
                BlockRef::Sink(j) => {
                    let sb = &d.sink_blocks[j];
                    let r = *sb.index.get(&p_ext).expect("path ending at sink lies in Λ");
                    let s = *sb.index.get(&q_ext).expect("path ending at sink lies in Λ");
                    let Block::Scalar(m) = &mut out.blocks[d.l() + j] else {
                        unreachable!()
                    };
                    m.set(r, s, &m.get(r, s).clone() + coeff);
                }
            }
        }
    }
    Ok(out)
}

/// The inverse of [`phi`]: coefficient at `x^z` in block `t` position
/// `(r, s)` contributes `p_r c_t^z p_s*`, normalized.
pub fn phi_inv(m: &BlockMatrix, d: &DecompositionData) -> Result<Element, StructureError> {
    if m.model != Model::L {
        return Err(StructureError::ModelMismatch);
    }
    if m.block_sizes() != d.block_sizes() {
        return Err(StructureError::Mismatch);
    }
    let g = &d.graph;
    let mut raw: Vec<(Monomial, Scalar)> = Vec::new();
    for (t, block) in m.blocks.iter().enumerate() {
        match block {
            Block::Laurent(mat) => {
                let cb = &d.cycle_blocks[t];
                for r in 0..mat.n_rows() {
                    for s in 0..mat.n_cols() {
                        for (z, c) in mat.get(r, s).terms() {
                            let (p, q) = basis_paths(g, cb, r, s, z);
                            raw.push((
                                Monomial::new(p, q).expect("basis paths share their range"),
                                c.clone(),
                            ));
                        }
                    }
                }
            }
            Block::Scalar(mat) => {
                let sb = &d.sink_blocks[t - d.l()];
                for r in 0..mat.n_rows() {
                    for s in 0..mat.n_cols() {
                        let c = mat.get(r, s);
                        if c.is_zero() {
                            continue;
                        }
                        raw.push((
                            Monomial::new(sb.lambda[r].clone(), sb.lambda[s].clone())
                                .expect("sink paths share their range"),
                            c.clone(),
                        ));
                    }
                }
            }
            Block::Rational(_) => unreachable!("checked L model"),
        }
    }
    Ok(Element::from_raw(d.graph.clone(), m.spec, raw))
}

/// The pair `(p, q)` with `p q* = p_r c^z p_s*`.
fn basis_paths(_g: &Graph, cb: &CycleBlock, r: usize, s: usize, z: i64) -> (Path, Path) {
    let cycle_pow = |k: i64| -> Path {
        let mut p = Path::trivial(cb.base);
        for _ in 0..k {
            p = p.concat(cb.cycle.path()).expect("cycle is closed at base");
        }
        p
    };
    if z >= 0 {
        let p = cb.lambda[r].concat(&cycle_pow(z)).expect("Λ path ends at base");
        (p, cb.lambda[s].clone())
    } else {
        let q = cb.lambda[s].concat(&cycle_pow(-z)).expect("Λ path ends at base");
        (cb.lambda[r].clone(), q)
    }
}

/// `phi` image of the cycle generator `c_t`: `x` at position `(0, 0)` of
/// block `t` (index 0 is the trivial path at the base).
pub fn cycle_generator_image(
    d: &DecompositionData,
    spec: FieldSpec,
    t: usize,
    model: Model,
) -> BlockMatrix {
    let mut m = BlockMatrix::zero(d, model, spec);
    match &mut m.blocks[t] {
        Block::Laurent(mat) => mat.set(0, 0, LaurentPoly::x(spec)),
        Block::Rational(mat) => mat.set(0, 0, RationalFunction::x(spec)),
        Block::Scalar(_) => panic!("block {t} is not a cycle block"),
    }
    m
}

// ---- Regularity witnesses ----

/// A unit `u` with `a u a = a`, built per block from the rank factorization
/// `a = P D R` as `u = (P R)^{-1}`. Requires the `Q` model (field entries).
pub fn unit_regular_witness(a: &BlockMatrix) -> Result<BlockMatrix, StructureError> {
    let blocks: Result<Vec<Block>, StructureError> = a
        .blocks
        .iter()
        .map(|b| match b {
            Block::Laurent(_) => Err(StructureError::ModelMismatch),
            Block::Rational(m) => {
                let (p, _, r) = m.rank_factorization();
                let u = p.mul(&r).inverse().expect("product of invertibles");
                Ok(Block::Rational(u))
            }
            Block::Scalar(m) => {
                let (p, _, r) = m.rank_factorization();
                let u = p.mul(&r).inverse().expect("product of invertibles");
                Ok(Block::Scalar(u))
            }
        })
        .collect();
    let u = BlockMatrix {
        spec: a.spec,
        model: a.model,
        blocks: blocks?,
    };
    assert!(
        a.mul(&u).mul(a) == *a && u.is_invertible(),
        "unit-regularity postcondition must hold over a field"
    );
    Ok(u)
}

/// A projection `p` with `p e = e` and `e p = p` for an idempotent `e`:
/// `p = e e* h^{-1}` with `h = e e* + (1-e)*(1-e)`. All four identities
/// `p^2 = p = p*`, `p e = e`, `e p = p` are verified before returning;
/// a singular `h` reports `NotInvertible`, the designed failure mode away
/// from positive definite involutions.
pub fn projection_for_idempotent(e: &BlockMatrix) -> Result<BlockMatrix, StructureError> {
    if e.mul(e) != *e {
        return Err(StructureError::NotIdempotent);
    }
    let one = identity_like(e);
    let co = one.sub(e);
    let h = e.mul(&e.star()).add(&co.star().mul(&co));
    let hinv = h.inverse().ok_or(StructureError::NotInvertible)?;
    let p = e.mul(&e.star()).mul(&hinv);
    let ok = p.mul(&p) == p && p.star() == p && p.mul(e) == *e && e.mul(&p) == p;
    if !ok {
        return Err(StructureError::NotInvertible);
    }
    Ok(p)
}

fn identity_like(m: &BlockMatrix) -> BlockMatrix {
    let blocks = m
        .blocks
        .iter()
        .map(|b| match b {
            Block::Laurent(x) => Block::Laurent(Matrix::identity(m.spec, x.n_rows())),
            Block::Rational(x) => Block::Rational(Matrix::identity(m.spec, x.n_rows())),
            Block::Scalar(x) => Block::Scalar(Matrix::identity(m.spec, x.n_rows())),
        })
        .collect();
    BlockMatrix {
        spec: m.spec,
        model: m.model,
        blocks,
    }
}

/// Result of sampling `1 + x* x` for invertibility over the `Q` model.
#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub samples_run: usize,
    pub counterexample: Option<BlockMatrix>,
}

/// Tests invertibility of `1 + x* x` on the images of the cycle generators
/// and on `samples` seeded random `Q`-model elements. Returns the first
/// counterexample found, if any.
pub fn symmetry_check(
    d: &DecompositionData,
    spec: FieldSpec,
    samples: usize,
    seed: u64,
) -> SymmetryReport {
    let one = BlockMatrix::identity(d, Model::Q, spec);
    let fails = |x: &BlockMatrix| -> bool {
        let s = one.add(&x.star().mul(x));
        !s.is_invertible()
    };
    let mut samples_run = 0;
    for t in 0..d.l() {
        let x = cycle_generator_image(d, spec, t, Model::Q);
        samples_run += 1;
        if fails(&x) {
            return SymmetryReport {
                samples_run,
                counterexample: Some(x),
            };
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = crate::sampling::random_block_matrix(&mut rng, d, Model::Q, spec, 1);
        samples_run += 1;
        if fails(&x) {
            return SymmetryReport {
                samples_run,
                counterexample: Some(x),
            };
        }
    }
    SymmetryReport {
        samples_run,
        counterexample: None,
    }
}

/// Given `x y = 1`, reports whether `y x = 1` (always true in the model).
pub fn directly_finite_check(
    x: &BlockMatrix,
    y: &BlockMatrix,
) -> Result<bool, StructureError> {
    if !x.mul(y).is_identity() {
        return Err(StructureError::Precondition(
            "x·y is not the identity".to_string(),
        ));
    }
    Ok(y.mul(x).is_identity())
}

// ---- Isomorphism decision ----

/// Outcome of the decision procedure on `(l, k, {m_i}, {n_j})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoDecision {
    /// Block-matching permutations: cycle block `i` of the first graph
    /// corresponds to cycle block `cycle_perm[i]` of the second.
    Isomorphic {
        cycle_perm: Vec<usize>,
        sink_perm: Vec<usize>,
    },
    NotIsomorphic { reason: String },
}

impl IsoDecision {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoDecision::Isomorphic { .. })
    }
}

fn match_multisets(left: &[usize], right: &[usize], what: &str) -> Result<Vec<usize>, String> {
    if left.len() != right.len() {
        return Err(format!(
            "{what} count differs: {} vs {}",
            left.len(),
            right.len()
        ));
    }
    let mut li: Vec<usize> = (0..left.len()).collect();
    let mut ri: Vec<usize> = (0..right.len()).collect();
    li.sort_by_key(|&i| (left[i], i));
    ri.sort_by_key(|&j| (right[j], j));
    let mut perm = vec![0; left.len()];
    for (a, b) in li.iter().zip(&ri) {
        if left[*a] != right[*b] {
            return Err(format!(
                "{what} size multisets differ: {:?} vs {:?}",
                {
                    let mut v = left.to_vec();
                    v.sort();
                    v
                },
                {
                    let mut v = right.to_vec();
                    v.sort();
                    v
                }
            ));
        }
        perm[*a] = *b;
    }
    Ok(perm)
}

/// Decides ring isomorphism of the Leavitt path algebras of two finite
/// no-exit graphs: isomorphic iff `l = l'`, `k = k'` and the size multisets
/// `{m_i}`, `{n_j}` agree, with the sorted-order matching as certificate.
pub fn iso_decide(g1: &Arc<Graph>, g2: &Arc<Graph>) -> Result<IsoDecision, StructureError> {
    let d1 = decompose(g1)?;
    let d2 = decompose(g2)?;
    Ok(iso_decide_decomposed(&d1, &d2))
}

pub fn iso_decide_decomposed(d1: &DecompositionData, d2: &DecompositionData) -> IsoDecision {
    let m1: Vec<usize> = d1.cycle_blocks.iter().map(CycleBlock::size).collect();
    let m2: Vec<usize> = d2.cycle_blocks.iter().map(CycleBlock::size).collect();
    let n1: Vec<usize> = d1.sink_blocks.iter().map(SinkBlock::size).collect();
    let n2: Vec<usize> = d2.sink_blocks.iter().map(SinkBlock::size).collect();
    let cycle_perm = match match_multisets(&m1, &m2, "cycle block") {
        Ok(p) => p,
        Err(reason) => return IsoDecision::NotIsomorphic { reason },
    };
    let sink_perm = match match_multisets(&n1, &n2, "sink block") {
        Ok(p) => p,
        Err(reason) => return IsoDecision::NotIsomorphic { reason },
    };
    IsoDecision::Isomorphic {
        cycle_perm,
        sink_perm,
    }
}
