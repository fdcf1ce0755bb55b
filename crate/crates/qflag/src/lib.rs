//! Exact-arithmetic toolkit for quiver flag varieties and quiver flag zero loci.
//!
//! A quiver flag variety is determined by a finite acyclic quiver with a
//! unique source together with a dimension vector; it is a tower of
//! Grassmannian bundles and, in particular, a smooth projective Mori Dream
//! Space. This crate constructs these varieties combinatorially, classifies
//! the Fano ones up to a dimension bound, computes their nef/ample cones,
//! degree, Euler number, Hilbert coefficients, and the regularized quantum
//! period of the zero loci of generic sections of homogeneous vector
//! bundles.
//!
//! All arithmetic is exact: lattice computations use arbitrary-precision
//! integers, cohomology and period computations use arbitrary-precision
//! rationals. There is no floating point anywhere.
//!
//! The main entry points are:
//!
//! * [`Quiver`] — validated quiver + dimension vector, with derived data;
//! * [`cones`] — nef/ample cones, Hilbert bases, lattice point enumeration;
//! * [`schur`] — Schur-power bundle summands and their split Chern roots;
//! * [`cohomology`] — the cohomology ring of the Abelianization, exact
//!   integration, and the geometric invariants of a zero locus;
//! * [`period`] — regularized quantum periods via the Abelian/non-Abelian
//!   correspondence;
//! * [`search`] — the classification and bundle-search pipeline;
//! * [`store`] — JSONL persistence, manifests, CSV/Markdown export.

pub mod cohomology;
pub mod cones;
pub mod linalg;
pub mod period;
pub mod poly;
pub mod quiver;
pub mod schur;
pub mod search;
pub mod store;

pub use quiver::{Quiver, QuiverError, VarietyData};
