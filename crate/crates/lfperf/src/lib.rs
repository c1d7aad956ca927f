//! Throughput prediction and validation for lock-free retry loops.
//!
//! Lock-free operations built on compare-and-swap retry loops share one
//! execution pattern: every thread alternates application-specific *parallel
//! work* with an operation on a shared access point (read, *critical work*,
//! CAS), retrying until its CAS succeeds. This crate predicts the throughput
//! and failure rate of that pattern from four knobs — thread count `P`, CAS
//! and read cache-miss latencies `cc`/`rc`, critical-work mean `cw` and
//! parallel-work mean `pw` — all expressed in units of work (1 uow = 50
//! cycles by default).
//!
//! Two complementary models are provided, plus a validation oracle:
//!
//! * [`avg`] — a queuing-theory model. Little's law balances the expected
//!   retry-loop occupancy against the success period; a fixed-point
//!   iteration solves the resulting scalar equation. It consumes only the
//!   mean workload sizes and is thus distribution-agnostic.
//! * [`markov`] — a constructive model for exponentially distributed
//!   parallel work and constant critical work. Each success period is a
//!   state of a Markov chain indexed by the retry-loop occupancy; the
//!   stationary distribution yields throughput and the failed-retry rate.
//! * [`multistage`] — extension of the queuing model to helping-based
//!   operations whose completion takes several CAS stages (queue enqueue,
//!   deque push), including CASes that share a variable, and to mixed
//!   workloads.
//! * [`sim`] — a seeded discrete-event simulator of the same execution
//!   model, used as the desk-scale ground truth in place of hardware runs.
//! * [`advisor`] — turns predictions into tuning actions: constant and
//!   adaptive back-off, and memory-management granularity planning.
//! * [`harness`] — optional real-hardware micro-benchmark (CAS counter and
//!   Treiber-style stack) with latency calibration, for comparing the
//!   models against an actual machine.
//!
//! All model entry points are pure functions over immutable parameter
//! bundles and are safe to call concurrently.

pub mod advisor;
pub mod avg;
pub mod error;
pub mod harness;
pub mod markov;
pub mod multistage;
pub mod params;
pub mod sim;

pub use error::Error;
pub use params::{
    ContentionMode, DistributionKind, ModelParams, ParamsFile, PlatformParams, Prediction,
    WorkloadParams,
};

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
