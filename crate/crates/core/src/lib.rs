//! Lifted probabilistic inference for Markov logic networks.
//!
//! Weighted first-order models over finite domains induce distributions
//! whose ground graphical models are densely connected, yet whole families
//! of them admit inference polynomial in the domain size. The reason is
//! finite exchangeability: the ground atoms split into equal-width blocks
//! that can be permuted without changing any world's probability, so a
//! world's probability depends only on a small sufficient statistic — the
//! tuple counting blocks per bit pattern. Queries then reduce to a sweep
//! over statistic values, weighing each orbit of equal-probability worlds
//! by exactly counted orbit and suborbit cardinalities.
//!
//! The crate provides:
//!
//! * [`fol`] — the model format: predicates, weighted formulas, parsing;
//! * [`world`] — grounding, worlds, evidence, and log world weights;
//! * [`exchange`] — sufficient statistics, orbit sizes, and exact suborbit
//!   counting under partial evidence via completion matrices;
//! * [`detect`] — fragment classification (monadic / two-variable) and the
//!   decompositions those fragments guarantee;
//! * [`infer`] — the orbit-sum engines: full-scope marginal and MPE,
//!   conditional two-variable inference, and bounded binary-atom queries;
//! * [`oracle`] — exhaustive enumeration for ground-truth verification;
//! * [`combi`], [`numeric`] — exact combinatorics and log-domain sums.
//!
//! Everything is `no_std`-compatible (with `alloc`); the `std` feature,
//! on by default, only adds the multi-threaded statistic sweep.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub use num_bigint;

pub mod combi;
pub mod detect;
pub mod exchange;
pub mod fol;
pub mod infer;
pub mod numeric;
pub mod oracle;
pub mod world;

pub use detect::{classify, monadic_decomposition, two_var_structure, FragmentClass};
pub use fol::MlnModel;
pub use infer::{EngineOptions, InferError, MarginalOutcome, MpeOutcome};
pub use world::{Evidence, GroundModel};
