//! Exact-arithmetic analysis of position auctions with arbitrary
//! (non-separable) click-through rates.
//!
//! Sponsored-search theory usually assumes a bidder's click probability
//! factors into a slot effect times an ad effect. This crate studies what
//! happens when it does not: each bidder `i` has her own weakly decreasing
//! rate row `α_{i,1} ≥ … ≥ α_{i,m}`, and the rows need not be proportional.
//! Everything is computed in exact rational arithmetic because the
//! interesting phenomena — equilibrium existence, envy-freeness, revenue
//! comparisons — routinely hinge on exact score ties.
//!
//! What lives where:
//! - [`rational`]: the exact scalar type [`Q`](rational::Q) and its text
//!   encodings.
//! - [`model`]: instances, allocations, welfare, efficient allocations, and
//!   separability detection.
//! - [`mechanisms`]: the iterated second-price auction, VCG, and an
//!   expressive per-slot-bid auction with revenue-maximizing sale order.
//! - [`equilibrium`]: best responses, equilibrium checking and search,
//!   closed-form efficient equilibria for two slots, and price-of-anarchy
//!   bounds.
//! - [`envy`]: global envy-freeness, its exact characterization for two
//!   slots, constructions that achieve it, and value profiles that make the
//!   second-price auction unable to support the efficient outcome.
//! - [`psf`]: price-support forests — the machinery that turns a VCG outcome
//!   into expressive bids and a sale order realizing it.
//! - [`showcase`]: small bundled instances exercising every phenomenon above.
//! - [`cli`]: the `position-auctions` command-line front end.
//!
//! Start with the crate examples (`cargo run --example run_auctions`, …);
//! each one walks through a single capability end to end.

pub mod assignment;
pub mod cli;
pub mod envy;
pub mod equilibrium;
mod lattice;
pub mod linear;
pub mod mechanisms;
pub mod model;
pub mod psf;
pub mod rational;
pub mod showcase;

pub use model::{
    efficient_allocations, separable_decomposition, welfare, Allocation, EfficientAllocations,
    Instance, ModelError, Outcome, SeparabilityDecomposition,
};
pub use rational::{ParseRationalError, Q};
