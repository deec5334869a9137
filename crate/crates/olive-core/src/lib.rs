// SPDX-License-Identifier: Apache-2.0

//! Finite, desk-scale witnesses for the olive property.
//!
//! The crate is organised around the objects the checks are built from:
//!
//! * [`words`]: free-group words, the three-variable word `σ*`, evaluation in
//!   arbitrary group contexts and the formulas `φ₀`, `φ₁`, `ψ`.
//! * [`kgroup`]: the tiered finite 2-group used to realise the witnesses, in
//!   two models (the printed three-level presentation with its collection
//!   product, and a consistent truncated-algebra model), the partial
//!   isomorphisms `π_s` and regular-representation conjugators.
//! * [`ladder`]: ladders `f̄`, the triple set `J`, s-pairs, the equation
//!   families and the partial maps `F_β`.
//! * [`witness`]: the product-group witness families, relative evaluation
//!   with formal conjugators, clause verification and the free retractions
//!   that certify inequalities in `G⁵`.
//! * [`relational`]: the relational example class, its forbidden structure,
//!   embeddings and amalgamation checks.
//! * [`etr`]: expanded trees and their flattened structures.
//!
//! Sweeps over ladders and random samples go through [`par`], which runs on
//! rayon when the `parallel` feature is enabled and sequentially otherwise.
//! Results are always assembled in input order.

pub mod bits;
pub mod etr;
pub mod kgroup;
pub mod ladder;
pub mod par;
pub mod relational;
pub mod rng;
pub mod witness;
pub mod words;

pub use kgroup::{KModel, PartialIso, SPair};
pub use ladder::Ladder;
pub use words::{GroupContext, SigmaVariant, Word};
