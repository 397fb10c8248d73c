//! Attribution engine for retrieval-augmented generation.
//!
//! Treats the retrieved documents of a query as players in a cooperative
//! game whose value is the generator's log-likelihood of a fixed target
//! response, then scores each document's contribution with exact Shapley
//! values or budgeted approximations (leave-one-out, truncated Monte Carlo,
//! Beta-weighted sampling, Kernel SHAP, and a lasso surrogate).
//!
//! Layout
//! - [`game`]: coalition bitmasks, subset enumeration, Shapley weights
//! - [`case`]: query cases, documents, attribution results
//! - [`oracle`]: utility oracles (remote log-prob scoring, synthetic games),
//!   prompt assembly, and the persistent utility cache
//! - [`regress`]: the small weighted/constrained/lasso solvers the
//!   surrogate estimators rely on
//! - [`estimators`]: the six attribution methods plus budget accounting
//! - [`eval`]: rank metrics, brute-force impact sets, experiment drivers
//! - [`datasets`]: case files on disk and the synthetic scenario generator

pub mod case;
pub mod datasets;
pub mod estimators;
pub mod eval;
pub mod game;
pub mod oracle;
pub mod regress;
