//! Average-based throughput model (queuing approach).
//!
//! The analysis tracks a single unknown: the expected number of threads
//! inside the retry loop, `trl`. Little's law applied to the parallel
//! section gives the balance equation
//!
//! ```text
//! S(trl) = pw / (P − trl)
//! ```
//!
//! where `S` is the expected success period. `S` is piecewise: below the
//! contention threshold every retry succeeds on its first try and
//! `S = (rc + cw + cc) / trl`; above it, colliding CASes serialize
//! (*expansion*) and the leading slack shrinks as occupants multiply,
//! giving `S = (cw + e(trl))·(trl + 2)/(trl + 1) + 2·cc`. The balance
//! equation is solved by a monotone fixed-point iteration.

use serde::Serialize;

use crate::error::Error;
use crate::params::{ContentionMode, ModelParams, PlatformParams, WorkloadParams};
use crate::Result;

/// Integration step (in occupancy units) for the expansion ODE grid.
const ODE_STEP: f64 = 1e-3;
/// Absolute tolerance on the occupancy between fixed-point iterates.
const FIXED_POINT_TOL: f64 = 1e-9;
/// Relative tolerance on the Little's-law balance residual at the solution.
const BALANCE_TOL: f64 = 1e-6;
const MAX_ITERATIONS: usize = 100_000;

/// Solution of the balance equation together with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AvgSolution {
    /// Expected retry-loop occupancy at the fixed point.
    pub occupancy: f64,
    /// Expected expansion `e(occupancy)`, in uow.
    pub expansion: f64,
    /// Expected success period, in uow.
    pub success_period: f64,
    /// `1 / success_period`, successes per uow.
    pub throughput: f64,
    /// `max(0, occupancy − 1)`.
    pub fails_per_success: f64,
    pub mode: ContentionMode,
}

impl AvgSolution {
    pub fn prediction(&self) -> crate::params::Prediction {
        crate::params::Prediction {
            throughput: self.throughput,
            fails_per_success: self.fails_per_success,
            mean_retry_occupancy: self.occupancy,
            mode: self.mode,
        }
    }
}

/// Memoized solution of an expansion ODE of the form
/// `e′(x) = cc·(num + e)/(den + e)`, `e(1) = 0`, extended by `e = 0` left of
/// the starting point. Values live on a fixed grid and are interpolated
/// linearly; the table is immutable after construction.
#[derive(Debug, Clone)]
pub struct ExpansionCurve {
    values: Vec<f64>,
    step: f64,
}

impl ExpansionCurve {
    /// Curve for the single-CAS retry loop: `e′ = cc·(cc/2 + e)/(cc + cw + cc + e)`.
    pub fn single_cas(platform: &PlatformParams, cw: f64, max_occupancy: f64) -> Self {
        let cc = platform.cas_cost;
        Self::integrate(cc, cc / 2.0, cc + cw + cc, max_occupancy, ODE_STEP)
    }

    /// Generic constructor shared with the multi-stage model:
    /// `e′ = cas_cost·(numerator + e)/(denominator + e)`.
    pub fn integrate(
        cas_cost: f64,
        numerator: f64,
        denominator: f64,
        max_occupancy: f64,
        step: f64,
    ) -> Self {
        let rhs = |e: f64| cas_cost * (numerator + e) / (denominator + e);
        let n = (((max_occupancy - 1.0) / step).ceil() as usize).max(1);
        let mut values = Vec::with_capacity(n + 1);
        let mut e = 0.0;
        values.push(e);
        for _ in 0..n {
            // Classical fourth-order step; the RHS is autonomous.
            let k1 = rhs(e);
            let k2 = rhs(e + 0.5 * step * k1);
            let k3 = rhs(e + 0.5 * step * k2);
            let k4 = rhs(e + step * k3);
            e += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            values.push(e);
        }
        Self { values, step }
    }

    /// `e(occupancy)`, zero for `occupancy ≤ 1`. Non-decreasing.
    pub fn eval(&self, occupancy: f64) -> f64 {
        if occupancy <= 1.0 {
            return 0.0;
        }
        let x = (occupancy - 1.0) / self.step;
        let idx = x.floor() as usize;
        if idx + 1 >= self.values.len() {
            return *self.values.last().expect("non-empty grid");
        }
        let frac = x - idx as f64;
        self.values[idx] * (1.0 - frac) + self.values[idx + 1] * frac
    }
}

/// Expected expansion for one occupancy value. Convenience wrapper; the
/// solver builds one [`ExpansionCurve`] and reuses it instead.
pub fn expansion_avg(occupancy: f64, platform: &PlatformParams, cw: f64) -> f64 {
    if occupancy <= 1.0 {
        return 0.0;
    }
    ExpansionCurve::single_cas(platform, cw, occupancy).eval(occupancy)
}

/// Occupancy at which the system switches from non-contended to contended:
/// the positive root of
/// `trl²·(cw + 2cc) + trl·(cw + cc − rc) − (rc + cw + cc) = 0`.
/// Always in `(0, 1]` when `cc ≥ rc`.
pub fn contention_threshold(platform: &PlatformParams, cw: f64) -> f64 {
    let cc = platform.cas_cost;
    let rc = platform.read_cost;
    let a = cw + 2.0 * cc;
    let b = cw + cc - rc;
    let c = rc + cw + cc;
    (-b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a)
}

/// Unified expected success period at a given occupancy.
pub fn expected_success_period(
    occupancy: f64,
    platform: &PlatformParams,
    workload: &WorkloadParams,
) -> f64 {
    let curve = ExpansionCurve::single_cas(platform, workload.cw_mean, occupancy.max(1.0));
    let threshold = contention_threshold(platform, workload.cw_mean);
    success_period_on(occupancy, platform, workload.cw_mean, threshold, &curve)
}

fn success_period_on(
    occupancy: f64,
    platform: &PlatformParams,
    cw: f64,
    threshold: f64,
    curve: &ExpansionCurve,
) -> f64 {
    let cc = platform.cas_cost;
    let rc = platform.read_cost;
    if occupancy <= threshold {
        (rc + cw + cc) / occupancy
    } else {
        let e = curve.eval(occupancy);
        (cw + e) * (occupancy + 2.0) / (occupancy + 1.0) + 2.0 * cc
    }
}

/// Straightforward throughput upper bound: two successful retries cannot
/// overlap, and a thread succeeds at most once per work loop.
pub fn upper_bound(platform: &PlatformParams, workload: &WorkloadParams) -> f64 {
    let nrt = platform.read_cost + workload.cw_mean + platform.cas_cost;
    let per_line = 1.0 / nrt;
    let per_thread = platform.threads as f64 / (workload.pw_mean + nrt);
    per_line.min(per_thread)
}

/// Solves the balance equation by the monotone fixed-point iteration
/// `u₀ = (rc+cw+cc)/(pw+rc+cw+cc)·P`,
/// `uₙ₊₁ = uₙ·S(uₙ)/(pw + uₙ·S(uₙ))·P`.
///
/// The map is non-decreasing and bounded by `P`, so the iterates increase
/// toward the least fixed point. Consumes only the mean workload sizes.
pub fn solve_fixed_point(params: &ModelParams) -> Result<AvgSolution> {
    let platform = &params.platform;
    let cw = params.workload.cw_mean;
    let pw = params.workload.pw_mean;
    if !(pw > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pw_mean > 0 for the fixed-point solve (got {pw})"
        )));
    }
    let p = platform.threads as f64;
    let curve = ExpansionCurve::single_cas(platform, cw, p.max(1.0));
    let threshold = contention_threshold(platform, cw);
    // A lone thread cannot collide with anyone, so with P = 1 the
    // non-contended branch applies at every occupancy.
    let effective_threshold = if platform.threads == 1 { 1.0 } else { threshold };
    let sp = |u: f64| success_period_on(u, platform, cw, effective_threshold, &curve);

    let nrt = params.uncontended_retry();
    let mut u = nrt / (pw + nrt) * p;
    let mut iterations = 0;
    loop {
        let s = sp(u);
        let next = u * s / (pw + u * s) * p;
        iterations += 1;
        let balanced = {
            let s_next = sp(next);
            (s_next - pw / (p - next)).abs() < BALANCE_TOL * s_next
        };
        if (next - u).abs() < FIXED_POINT_TOL && balanced {
            u = next;
            break;
        }
        u = next;
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NonConvergence {
                iterations,
                last_occupancy: u,
            });
        }
    }

    let success_period = sp(u);
    let mode = if u <= effective_threshold {
        ContentionMode::NonContended
    } else {
        ContentionMode::Contended
    };
    Ok(AvgSolution {
        occupancy: u,
        expansion: curve.eval(u),
        success_period,
        throughput: 1.0 / success_period,
        fails_per_success: (u - 1.0).max(0.0),
        mode,
    })
}
