//! Exact-arithmetic computer algebra for Leavitt path algebras of finite
//! directed graphs.
//!
//! The crate models elements of `L_K(E)` as normal-form linear combinations
//! of monomials `p q*` under the path algebra and Cuntz-Krieger relations,
//! computes the block matrix decomposition of `L(E)` for finite no-exit
//! graphs together with the `*`-isomorphism onto it, realizes the regular
//! algebra `Q(E)` as the same blocks over rational functions, works with the
//! graph monoid `M_E`, and decides ring isomorphism of the algebras of two
//! no-exit graphs from their decomposition invariants.

pub mod graph;
pub mod lpa;
pub mod matrix;
pub mod monoid;
pub mod sampling;
pub mod scalar;
pub mod structure;

pub use graph::{Cycle, EdgeId, Graph, GraphError, Path, PathMode, VertexId};
pub use lpa::{Element, LpaError, Monomial, SpecialEdgeChoice};
pub use scalar::{FieldKind, FieldSpec, Involution, LaurentPoly, Poly, RationalFunction, Scalar, ScalarError};
pub use structure::{BlockMatrix, DecompositionData, IsoDecision, StructureError};
pub use monoid::{MonoidElement, RankVector};
