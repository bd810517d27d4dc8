//! Symbolic toolkit for equivariant homology decompositions of tree manifolds.
//!
//! For a cyclic group $G = C_m$ of odd order, an admissible weighted tree $T$
//! determines a closed $G$-manifold $X(T)$, built by equivariantly gluing copies
//! of $\mathbb{CP}^2$ and $S^4$ along invariant discs indexed by the tree. This
//! crate implements, over the real representation ring of $C_m$:
//!
//!  - validation of admissible weighted trees ([`tree`]),
//!  - the local geometry of vertex manifolds: tangential representations,
//!    gluing compatibility, fixed-point censuses, cellular filtrations ([`geom`]),
//!  - the $H\underline{\mathbb{Z}}$-module splitting of $X(T)_+$ into unit,
//!    representation-sphere and induced summands ([`decomp`]),
//!  - mechanical verification of every connecting-map obstruction behind a
//!    splitting, via an $RO(C_m)$-graded vanishing criterion and the exact
//!    $C_p$ homotopy table ([`vanish`], [`obstruct`]),
//!  - an independent chain-level Bredon homology oracle with constant
//!    $\underline{\mathbb{Z}}$ coefficients, evaluated level by level through
//!    exact Smith normal form ([`mackey`], [`snf`]).
//!
//! The two routes — formal splitting plus obstruction replay on one side,
//! cellular chain computation on the other — are kept fully independent so that
//! each can falsify the other.

pub mod decomp;
pub mod geom;
pub mod mackey;
pub mod obstruct;
pub mod rep_ring;
pub mod snf;
pub mod tree;
pub mod vanish;
