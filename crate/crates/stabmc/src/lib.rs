//! Monte Carlo laboratory for vectors of stabilizing statistics of marked
//! Poisson point processes in low-dimensional Euclidean boxes and flat tori.
//!
//! The crate provides, end to end:
//!
//! * seeded, scheduler-independent generation of homogeneous, inhomogeneous,
//!   colored, and coupled Poisson configurations ([`process`]);
//! * geometry kernels — a uniform-grid spatial index with certified
//!   k-nearest-neighbor and range queries, circumspheres, barycentric interior
//!   tests, and simplex volumes ([`geometry`]);
//! * a catalog of per-point score functions from geometric probability: kNN
//!   edge lengths and degrees, colored nearest-neighbor test statistics,
//!   geometric-graph component/degree/subgraph counts, Vietoris–Rips volume
//!   sums, and index-k critical points ([`scores`]);
//! * assembly of statistic vectors over regions with test functions, plus the
//!   first and second difference operators used as empirical stabilization
//!   probes ([`statistics`]);
//! * covariance machinery: empirical covariance of replicated statistic
//!   vectors, the two-term asymptotic covariance estimated by Palm sampling in
//!   the stationary regime, closed forms for the geometric-graph vertex/edge
//!   pair, and covariance-gap curves ([`covariance`]);
//! * Gaussian comparison: covariance-root sampling, empirical multivariate
//!   Kolmogorov distance, and a covariance-mismatch lower bound
//!   ([`gaussian`]);
//! * log–log rate fitting for convergence curves ([`rates`]);
//! * a declarative experiment runner with deterministic parallel replication
//!   and plain CSV/JSON outputs ([`experiment`]).
//!
//! Start with the runnable programs under `examples/`; each one demonstrates a
//! single capability with a small, fast configuration.

pub mod covariance;
pub mod diag;
pub mod experiment;
pub mod gaussian;
pub mod geometry;
pub mod linalg;
pub mod process;
pub mod rates;
pub mod rng;
pub mod scores;
pub mod statistics;

pub use process::{
    sample_coupled, sample_homogeneous, sample_inhomogeneous, attach_colors, Boundary,
    DensitySpec, Mark, MarkedPoint, PointConfig, WindowSpec, MAX_DIM,
};
pub use scores::{Pattern, RadiusRule, ScoreSpec};
pub use statistics::{Region, ReplicationBatch, StatisticSpec, TestFn};
