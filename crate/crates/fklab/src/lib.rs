//! A desk-scale laboratory for the critical FK–Ising model.
//!
//! The crate builds discrete simply connected domains with alternating
//! wired/free boundary arcs, runs the exploration interface started at a
//! marked boundary point, evaluates the discrete fermionic observable in two
//! independent representations, and compares lattice data against continuum
//! multiple-SLE(16/3) predictions: partition functions, boundary-observable
//! coefficients, Loewner drift, and connection probabilities.
//!
//! Layering, bottom-up:
//! - [`geometry`]: doubled-coordinate primal/dual/medial lattice primitives;
//! - [`domain`]: validated domains, boundary loops, alternating arc markings;
//! - [`model`]: random-cluster configurations, weights, duality, exact
//!   enumeration, and the Swendsen–Wang style sampler;
//! - [`tracer`]: the medial-lattice exploration interface and the conditional
//!   sub-domain decomposition after a partial trace;
//! - [`observable`]: the discrete fermionic observable (curve-sum and
//!   spin-correlation representations) and its martingale property;
//! - [`continuum`] and [`elliptic`]: multiple-SLE(16/3) partition functions,
//!   half-plane observables, BPZ checks, and the rectangle→half-plane map;
//! - [`loewner`]: driving-function synthesis/extraction and κ/drift estimators;
//! - [`pipeline`]: end-to-end lattice→Loewner workflows shared by the CLI and
//!   the acceptance suite.

pub mod domain;
pub mod geometry;
pub mod model;
pub mod tracer;
pub mod unionfind;
