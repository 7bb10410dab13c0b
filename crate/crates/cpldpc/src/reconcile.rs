//! Analytic block-error series next to the Monte Carlo estimate.

use cpldpc_core::errprob::{expected_block_error, ErrProbQuery};
use cpldpc_core::rational::{to_f64, to_pq, Rational};
use cpldpc_core::{BaseConfig, CoeffTable, EnsembleParams};
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::parallel;
use crate::report::SimDto;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticValue {
    pub base: String,
    pub value: String,
    pub float_value: f64,
    /// `(value - p_hat) / σ` with the binomial σ at `p_hat`.
    pub z_score: f64,
    pub within_ci95: bool,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconcileRow {
    pub epsilon: String,
    pub analytic: Vec<AnalyticValue>,
    pub monte_carlo: SimDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconcileReport {
    pub format: String,
    pub n: u64,
    pub r: String,
    pub m: u32,
    pub vmax: u32,
    pub rows: Vec<ReconcileRow>,
    pub note: String,
}

pub const NOTE: &str = "analytic values are the exact finite sums over v = 1..vmax for each base convention; \
agreement with the simulation is reported, not assumed";

fn verdict(within: bool, z: f64) -> &'static str {
    if within {
        "agree"
    } else if z.abs() <= 3.0 {
        "marginal"
    } else {
        "disagree"
    }
}

pub fn reconcile(
    pool: &ThreadPool,
    params: &EnsembleParams,
    epsilons: &[Rational],
    trials: u64,
    seed: u64,
    bases: &[BaseConfig],
) -> Result<ReconcileReport> {
    let vmax = params.n() as u32;
    let tables = bases
        .iter()
        .map(|b| parallel::fill_table(pool, params.clone(), vmax, b.clone()))
        .collect::<Result<Vec<CoeffTable>>>()?;
    let mut rows = Vec::with_capacity(epsilons.len());
    for eps in epsilons {
        let sim = parallel::simulate(pool, params, eps, trials, seed)?;
        let sigma = sim.sigma_at(sim.p_hat).max(f64::MIN_POSITIVE);
        let analytic = tables
            .iter()
            .map(|table| {
                let query = ErrProbQuery::new(params.clone(), eps.clone(), vmax)?;
                let value = expected_block_error(&query, table)?.value;
                let float_value = to_f64(&value);
                let z_score = (float_value - sim.p_hat) / sigma;
                let within = sim.ci95.0 <= float_value && float_value <= sim.ci95.1;
                Ok(AnalyticValue {
                    base: table.base().name().into(),
                    value: to_pq(&value),
                    float_value,
                    z_score,
                    within_ci95: within,
                    verdict: verdict(within, z_score).into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(ReconcileRow { epsilon: to_pq(eps), analytic, monte_carlo: SimDto::from(&sim) });
    }
    Ok(ReconcileReport {
        format: "cpreconcile/1".into(),
        n: params.n(),
        r: to_pq(params.rate()),
        m: params.m(),
        vmax,
        rows,
        note: NOTE.into(),
    })
}
