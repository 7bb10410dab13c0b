//! Thread-pool drivers for the table fill and the simulator. Both produce
//! results identical to the sequential code in `cpldpc-core`.

use cpldpc_core::rational::Rational;
use cpldpc_core::sim::{self, SimResult};
use cpldpc_core::table::{Boundary, Level};
use cpldpc_core::{BaseConfig, CoeffTable, EnsembleParams};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{CliError, Result};

/// Trials per work item in [`simulate`].
pub const TRIAL_CHUNK: u64 = 4096;

/// A pool with `threads` workers; `None` or 0 uses rayon's default.
pub fn pool(threads: Option<usize>) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))
}

/// Extends `table` to `vmax`, computing the rows of each level in parallel
/// and handing every finished level to `on_level`.
pub fn extend_table<F>(pool: &ThreadPool, table: &mut CoeffTable, vmax: u32, mut on_level: F) -> Result<()>
where
    F: FnMut(u32, &Level) -> Result<()>,
{
    if vmax <= table.vmax() {
        return Ok(());
    }
    table.check_depth(vmax)?;
    let boundary = Boundary::new(table.params(), vmax);
    let m = table.m();
    for v in table.vmax() + 1..=vmax {
        let rows: Vec<Vec<Rational>> =
            pool.install(|| (0..=m).into_par_iter().map(|t| table.level_row(v, t, &boundary)).collect());
        let level = Level::from_rows(m, rows)?;
        on_level(v, &level)?;
        table.push_level(level)?;
    }
    Ok(())
}

pub fn fill_table(pool: &ThreadPool, params: EnsembleParams, vmax: u32, base: BaseConfig) -> Result<CoeffTable> {
    let mut table = CoeffTable::with_base_level(params, base)?;
    extend_table(pool, &mut table, vmax, |_, _| Ok(()))?;
    Ok(table)
}

/// Monte Carlo over `trials` trials split into fixed chunks; the failure
/// count does not depend on the number of threads.
pub fn simulate(pool: &ThreadPool, params: &EnsembleParams, epsilon: &Rational, trials: u64, seed: u64) -> Result<SimResult> {
    if trials == 0 {
        return Err(CliError::Validation("at least one trial is required".into()));
    }
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let failures = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let range = c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(trials);
                sim::count_failures(params, epsilon, seed, range)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    Ok(SimResult::from_counts(params.clone(), epsilon.clone(), trials, failures, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cpldpc_core::rational::frac;

    #[test]
    fn parallel_fill_matches_sequential() {
        let params = EnsembleParams::new(12, frac(1, 2)).unwrap();
        let seq = CoeffTable::fill(params.clone(), 8, BaseConfig::Default).unwrap();
        let par = fill_table(&pool(Some(3)).unwrap(), params, 8, BaseConfig::Default).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn simulation_ignores_thread_count() {
        let params = EnsembleParams::new(6, frac(1, 2)).unwrap();
        let eps = frac(1, 2);
        let one = simulate(&pool(Some(1)).unwrap(), &params, &eps, 10_000, 5).unwrap();
        let four = simulate(&pool(Some(4)).unwrap(), &params, &eps, 10_000, 5).unwrap();
        let seq = sim::estimate_block_error(&params, &eps, 10_000, 5).unwrap();
        assert_eq!(one.failures, four.failures);
        assert_eq!(one.failures, seq.failures);
    }
}
