//! Worst-case and best-case auction revenue over rearrangement-invariant
//! ambiguity sets.
//!
//! A seller who distrusts her reference belief `P` evaluates an auction by
//! the minimum expected total transfer over a set of nearby beliefs. This
//! crate discretizes beliefs on uniform grids and provides:
//!
//! - [`measure`]: grid measures, reference-belief constructors (IID and
//!   band/affiliated), phi-divergences, hazard diagnostics, quantiles;
//! - [`auction`]: equilibrium bids and transfer tables for first-price,
//!   second-price, all-pay, war-of-attrition, simple-contest and
//!   affiliated first-price formats;
//! - [`rearrange`]: rearrangement predicates and the anti-comonotone /
//!   independent rearrangement constructions, plus brute-force enumeration
//!   oracles;
//! - [`ambiguity`]: worst-case, best-case and divergence-penalized revenue
//!   solvers over KL balls, phi-divergence balls, bounded likelihood
//!   ratios and contamination neighborhoods, on joint, independent or IID
//!   domains;
//! - [`compare`]: single-crossing certificates (WSCC/SCC/NWSCC), reference
//!   revenue checks, linkage diagnostics and the four-auction ranking
//!   harness;
//! - [`experiment`]: config-driven sweeps writing deterministic CSV/JSON.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability, and the `ambirev` binary for the experiment CLI.

pub mod ambiguity;
pub mod auction;
pub mod compare;
pub mod error;
pub mod experiment;
pub mod measure;
pub mod rearrange;

pub use error::{Error, Result};
pub use measure::{
    divergence1, divergence2, divergence_masses, hazard_condition_check, Density1D, Density2D,
    Grid1D, MarginalCdf, MonotoneCdf, Phi, ReferenceBelief,
};
