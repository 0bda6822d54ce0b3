//! Batch solving over independent instances.
//!
//! Each solve is single-threaded and deterministic; batches parallelize at
//! the instance level. With the `parallel` feature (default) the work runs
//! on a rayon pool; without it, or via the explicit sequential entry point,
//! instances run in order on the calling thread. Results always come back
//! in input order, so parallelism changes wall-clock time and nothing else.

use crate::error::Result;
use crate::instance::Instance;
use crate::solver::{solve, SolveResult, SolverConfig};

/// Solve every instance sequentially on the calling thread.
pub fn solve_many_seq(instances: &[Instance], cfg: &SolverConfig) -> Vec<Result<SolveResult>> {
    instances.iter().map(|inst| solve(inst, cfg)).collect()
}

/// Solve every instance, parallelizing across instances when the `parallel`
/// feature is enabled.
#[cfg(feature = "parallel")]
pub fn solve_many(instances: &[Instance], cfg: &SolverConfig) -> Vec<Result<SolveResult>> {
    use rayon::prelude::*;
    instances.par_iter().map(|inst| solve(inst, cfg)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn solve_many(instances: &[Instance], cfg: &SolverConfig) -> Vec<Result<SolveResult>> {
    solve_many_seq(instances, cfg)
}

/// Run `solve_many` on a pool with the given number of threads; `0` keeps
/// the default. Falls back to sequential execution without the feature.
#[cfg(feature = "parallel")]
pub fn solve_many_with_jobs(
    instances: &[Instance],
    cfg: &SolverConfig,
    jobs: usize,
) -> Vec<Result<SolveResult>> {
    if jobs == 1 {
        return solve_many_seq(instances, cfg);
    }
    if jobs == 0 {
        return solve_many(instances, cfg);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool construction");
    pool.install(|| solve_many(instances, cfg))
}

#[cfg(not(feature = "parallel"))]
pub fn solve_many_with_jobs(
    instances: &[Instance],
    cfg: &SolverConfig,
    _jobs: usize,
) -> Vec<Result<SolveResult>> {
    solve_many_seq(instances, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::testgen::random_small_instance;

    #[test]
    fn parallel_and_sequential_agree() {
        let mut rng = Rng::new(42);
        let instances: Vec<Instance> = (0..64).map(|_| random_small_instance(&mut rng)).collect();
        let cfg = SolverConfig::default();
        let seq = solve_many_seq(&instances, &cfg);
        let par = solve_many(&instances, &cfg);
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(&par) {
            let a = a.as_ref().unwrap();
            let b = b.as_ref().unwrap();
            assert_eq!(a.optimum, b.optimum);
            assert_eq!(a.solution, b.solution);
            assert_eq!(a.stats, b.stats);
        }
    }

    #[test]
    fn explicit_job_counts_preserve_order_and_results() {
        let mut rng = Rng::new(43);
        let instances: Vec<Instance> = (0..32).map(|_| random_small_instance(&mut rng)).collect();
        let cfg = SolverConfig::default();
        let base: Vec<u64> = solve_many_seq(&instances, &cfg)
            .into_iter()
            .map(|r| r.unwrap().optimum)
            .collect();
        for jobs in [1usize, 2, 4] {
            let got: Vec<u64> = solve_many_with_jobs(&instances, &cfg, jobs)
                .into_iter()
                .map(|r| r.unwrap().optimum)
                .collect();
            assert_eq!(base, got, "jobs={jobs}");
        }
    }
}
