//! Certified coarse dynamics of an unknown 1D map from sparse samples.
//!
//! Given samples `(x_n, y_n)` of an unknown continuous map on a compact
//! interval, this crate
//!
//! 1. fits a noise-free Gaussian-process surrogate by maximum likelihood
//!    ([`gp`]),
//! 2. splits a confidence budget into per-midpoint interval radii
//!    ([`confidence`]),
//! 3. encloses the surrogate's graph in a combinatorial region over a
//!    uniform edge complex, using Lipschitz rays to interpolate between
//!    midpoint confidence bands ([`grid`], [`enclosure`]),
//! 4. extracts the recurrent structure of the induced multivalued map as a
//!    Morse graph ([`morse`]), and
//! 5. certifies fixed points, periodic orbits and connecting orbits via
//!    Conley indices computed from relative homology over Z5 ([`conley`]).
//!
//! The [`pipeline`] module wires the stages together behind a JSON config,
//! [`svg`] renders the standard figure, and [`validate`] runs Monte Carlo
//! coverage checks of the enclosure. Everything is deterministic given the
//! seeds in the config; see [`rng`] for the generator contract.

pub mod conley;
pub mod confidence;
pub mod dataio;
pub mod enclosure;
pub mod gp;
pub mod grid;
pub mod morse;
pub mod pipeline;
pub mod rng;
pub mod special;
pub mod svg;
pub mod validate;

mod linalg;
