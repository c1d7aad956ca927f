//! Shared domain types: platform and workload parameters, validation, and
//! random-variate sampling.
//!
//! All model math runs in units of work (uow); one uow is `unit_cycles`
//! processor cycles (50 by default). Conversion to cycles or seconds happens
//! only at report time, in the CLI.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Core count and atomic-primitive latencies, in units of work.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformParams {
    /// Number of threads/cores, one thread pinned per core.
    #[serde(rename = "P")]
    pub threads: u32,
    /// Execution time of a CAS on a cache line not owned in exclusive mode.
    #[serde(rename = "cc_uow")]
    pub cas_cost: f64,
    /// Execution time of a read that misses in the local cache.
    #[serde(rename = "rc_uow")]
    pub read_cost: f64,
    /// Processor cycles per unit of work.
    #[serde(default = "default_unit_cycles")]
    pub unit_cycles: f64,
}

fn default_unit_cycles() -> f64 {
    50.0
}

impl PlatformParams {
    pub fn new(threads: u32, cas_cost: f64, read_cost: f64) -> Self {
        Self {
            threads,
            cas_cost,
            read_cost,
            unit_cycles: default_unit_cycles(),
        }
    }
}

/// Shape of the distribution a duration is drawn from. The mean is carried
/// separately (see [`WorkloadParams`]); for `UniformRange` the mean is pinned
/// to `(lo + hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Constant,
    Exponential,
    /// Integer uow counts with the given mean.
    Poisson,
    /// Uniform on the half-open interval `[lo, hi)`.
    UniformRange { lo: f64, hi: f64 },
}

impl DistributionKind {
    /// Draw one nonnegative duration with the requested mean. `Constant`
    /// returns the mean exactly. Deterministic given the RNG state.
    pub fn sample<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match *self {
            DistributionKind::Constant => mean,
            DistributionKind::Exponential => {
                if mean <= 0.0 {
                    0.0
                } else {
                    Exp::new(1.0 / mean).expect("validated mean").sample(rng)
                }
            }
            DistributionKind::Poisson => {
                if mean <= 0.0 {
                    0.0
                } else {
                    Poisson::new(mean).expect("validated mean").sample(rng)
                }
            }
            DistributionKind::UniformRange { lo, hi } => {
                if hi <= lo {
                    lo
                } else {
                    rng.gen_range(lo..hi)
                }
            }
        }
    }

    /// Checks the distribution against the mean it will be sampled with.
    fn validate(&self, mean: f64, what: &str) -> Result<()> {
        if let DistributionKind::UniformRange { lo, hi } = *self {
            if !(0.0 <= lo && lo <= hi) {
                return Err(Error::InvalidParameter(format!(
                    "{what}: uniform_range requires 0 ≤ lo ≤ hi (got lo={lo}, hi={hi})"
                )));
            }
            let implied = 0.5 * (lo + hi);
            if (implied - mean).abs() > 1e-9 * implied.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{what}: uniform_range mean must equal (lo+hi)/2 = {implied} (got {mean})"
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            DistributionKind::Constant => write!(f, "constant"),
            DistributionKind::Exponential => write!(f, "exponential"),
            DistributionKind::Poisson => write!(f, "poisson"),
            DistributionKind::UniformRange { lo, hi } => write!(f, "uniform({lo},{hi})"),
        }
    }
}

/// Mean sizes and distribution shapes of the critical work (inside a retry,
/// between the read of the access point and the CAS) and the parallel work
/// (application code between operations).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadParams {
    pub cw_mean: f64,
    #[serde(default = "default_cw_dist")]
    pub cw_dist: DistributionKind,
    pub pw_mean: f64,
    #[serde(default = "default_pw_dist")]
    pub pw_dist: DistributionKind,
}

fn default_cw_dist() -> DistributionKind {
    DistributionKind::Constant
}

fn default_pw_dist() -> DistributionKind {
    DistributionKind::Exponential
}

impl WorkloadParams {
    pub fn new(cw_mean: f64, pw_mean: f64) -> Self {
        Self {
            cw_mean,
            cw_dist: default_cw_dist(),
            pw_mean,
            pw_dist: default_pw_dist(),
        }
    }

    pub fn with_dists(mut self, cw_dist: DistributionKind, pw_dist: DistributionKind) -> Self {
        self.cw_dist = cw_dist;
        self.pw_dist = pw_dist;
        self
    }
}

/// Contention regime a prediction was made in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentionMode {
    NonContended,
    Contended,
    /// Per-state mixture (constructive model, or a weighted workload mix).
    Mixed,
}

impl std::fmt::Display for ContentionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContentionMode::NonContended => write!(f, "non_contended"),
            ContentionMode::Contended => write!(f, "contended"),
            ContentionMode::Mixed => write!(f, "mixed"),
        }
    }
}

/// Model output: throughput plus the contention diagnostics that come with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    /// Successful operations per uow (inverse of the expected success period).
    pub throughput: f64,
    /// Expected failed retries per successful retry.
    pub fails_per_success: f64,
    /// Expected number of threads inside the retry loop.
    pub mean_retry_occupancy: f64,
    pub mode: ContentionMode,
}

/// Parameter bundle that passed [`validate`]. Every model entry point takes
/// this, so invariant checking happens exactly once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub platform: PlatformParams,
    pub workload: WorkloadParams,
}

/// Checks every type invariant and returns the validated bundle. The error
/// names the first violated invariant.
pub fn validate(platform: PlatformParams, workload: WorkloadParams) -> Result<ModelParams> {
    if platform.threads < 1 {
        return Err(Error::InvalidParameter(format!(
            "P ≥ 1 (got {})",
            platform.threads
        )));
    }
    if !(platform.cas_cost > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cc > 0 (got {})",
            platform.cas_cost
        )));
    }
    if !(platform.read_cost > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rc > 0 (got {})",
            platform.read_cost
        )));
    }
    // The contention-threshold lemma assumes cc ≥ rc on all architectures.
    if platform.cas_cost < platform.read_cost {
        return Err(Error::InvalidParameter(format!(
            "cc ≥ rc (got cc={}, rc={})",
            platform.cas_cost, platform.read_cost
        )));
    }
    if !(platform.unit_cycles > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "unit_cycles > 0 (got {})",
            platform.unit_cycles
        )));
    }
    if !(workload.cw_mean > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cw_mean > 0 (got {})",
            workload.cw_mean
        )));
    }
    if !(workload.pw_mean >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pw_mean ≥ 0 (got {})",
            workload.pw_mean
        )));
    }
    workload.cw_dist.validate(workload.cw_mean, "cw_dist")?;
    workload.pw_dist.validate(workload.pw_mean, "pw_dist")?;
    Ok(ModelParams { platform, workload })
}

impl ModelParams {
    /// Shorthand used throughout: `rc + cw + cc`, the duration of one
    /// uncontended retry including the initial cache-miss read.
    pub fn uncontended_retry(&self) -> f64 {
        self.platform.read_cost + self.workload.cw_mean + self.platform.cas_cost
    }
}

/// On-disk JSON parameter file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub platform: PlatformParams,
    pub workload: WorkloadParams,
}

impl ParamsFile {
    /// Parses and validates a parameter file. Parse errors carry the
    /// offending field name; validation errors name the violated invariant.
    pub fn from_json(text: &str) -> Result<ModelParams> {
        let file: ParamsFile =
            serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        validate(file.platform, file.workload)
    }
}

/// Deterministic RNG used for all sampling in this crate. Two runs with
/// equal seeds produce identical sequences on every platform.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_a() -> (PlatformParams, WorkloadParams) {
        (
            PlatformParams::new(8, 1.5, 1.0),
            WorkloadParams::new(4.0, 100.0),
        )
    }

    #[test]
    fn cfg_a_validates() {
        let (p, w) = cfg_a();
        assert!(validate(p, w).is_ok());
    }

    #[test]
    fn zero_threads_rejected() {
        let (mut p, w) = cfg_a();
        p.threads = 0;
        let err = validate(p, w).unwrap_err();
        assert!(err.to_string().contains("P ≥ 1"), "{err}");
    }

    #[test]
    fn cas_cheaper_than_read_rejected() {
        let (mut p, w) = cfg_a();
        p.cas_cost = 1.0;
        p.read_cost = 1.5;
        let err = validate(p, w).unwrap_err();
        assert!(err.to_string().contains("cc ≥ rc"), "{err}");
    }

    #[test]
    fn uniform_mean_mismatch_rejected() {
        let (p, mut w) = cfg_a();
        w.pw_dist = DistributionKind::UniformRange { lo: 0.0, hi: 8.0 };
        w.pw_mean = 5.0;
        assert!(validate(p, w).is_err());
        w.pw_mean = 4.0;
        assert!(validate(p, w).is_ok());
    }

    #[test]
    fn constant_sampling_is_exact() {
        let mut rng = seeded_rng(7);
        for _ in 0..100 {
            assert_eq!(DistributionKind::Constant.sample(4.0, &mut rng), 4.0);
        }
    }

    #[test]
    fn exponential_sample_mean_converges() {
        // Law of large numbers: mean over 1e6 draws within 1% of 100.
        let mut rng = seeded_rng(42);
        let n = 1_000_000;
        let sum: f64 = (0..n)
            .map(|_| DistributionKind::Exponential.sample(100.0, &mut rng))
            .sum();
        let mean = sum / n as f64;
        assert!((99.0..=101.0).contains(&mean), "mean = {mean}");
    }

    #[test]
    fn uniform_draws_stay_in_range() {
        let d = DistributionKind::UniformRange { lo: 0.0, hi: 8.0 };
        let mut rng = seeded_rng(3);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = d.sample(4.0, &mut rng);
            assert!((0.0..8.0).contains(&x));
            sum += x;
        }
        let mean = sum / n as f64;
        assert!((mean - 4.0).abs() < 0.05, "mean = {mean}");
    }

    #[test]
    fn poisson_draws_are_integers_with_requested_mean() {
        let mut rng = seeded_rng(11);
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = DistributionKind::Poisson.sample(6.0, &mut rng);
            assert_eq!(x, x.trunc());
            sum += x;
        }
        let mean = sum / n as f64;
        assert!((mean - 6.0).abs() < 0.05, "mean = {mean}");
    }

    #[test]
    fn sampling_is_deterministic_given_seed() {
        let draw = |seed| {
            let mut rng = seeded_rng(seed);
            (0..1000)
                .map(|_| DistributionKind::Exponential.sample(10.0, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(123), draw(123));
        assert_ne!(draw(123), draw(124));
    }

    #[test]
    fn exponential_is_memoryless() {
        // Empirical P(X > a+b | X > a) ≈ P(X > b) within 2% over 1e6 draws.
        let mut rng = seeded_rng(5);
        let (a, b) = (50.0, 80.0);
        let n = 1_000_000;
        let (mut gt_a, mut gt_ab, mut gt_b) = (0u64, 0u64, 0u64);
        for _ in 0..n {
            let x = DistributionKind::Exponential.sample(100.0, &mut rng);
            if x > a {
                gt_a += 1;
                if x > a + b {
                    gt_ab += 1;
                }
            }
            if x > b {
                gt_b += 1;
            }
        }
        let cond = gt_ab as f64 / gt_a as f64;
        let uncond = gt_b as f64 / n as f64;
        assert!(
            (cond - uncond).abs() / uncond < 0.02,
            "P(X>a+b|X>a) = {cond}, P(X>b) = {uncond}"
        );
    }

    #[test]
    fn params_file_round_trip() {
        let text = r#"{
            "platform": {"P": 8, "cc_uow": 1.5, "rc_uow": 1.0, "unit_cycles": 50},
            "workload": {"cw_mean": 4.0, "cw_dist": "constant",
                         "pw_mean": 100.0, "pw_dist": "exponential"}
        }"#;
        let params = ParamsFile::from_json(text).unwrap();
        assert_eq!(params.platform.threads, 8);
        assert_eq!(params.workload.pw_dist, DistributionKind::Exponential);
    }

    #[test]
    fn params_file_reports_offending_field() {
        let text = r#"{
            "platform": {"P": 8, "cc_uow": 1.5, "rc_uow": 1.0, "bogus": 1},
            "workload": {"cw_mean": 4.0, "pw_mean": 100.0}
        }"#;
        let err = ParamsFile::from_json(text).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }
}
