//! Monte Carlo driver: one scenario, channel draw and optimizer run per
//! realization, realizations spread over a worker pool.

use std::time::Instant;

use nrpos_core::integrals::{block_specs, compute_block, IntegralTable};
use nrpos_core::model::Instance;
use nrpos_core::numerology::numerology_set;
use nrpos_core::optimizer::homd::{run_schemes, Scheme};
use nrpos_core::rng::{realization_seed, stream, streams};
use rayon::prelude::*;

use crate::config::Config;
use crate::error::CliError;

/// Objectives of every scheme in one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationResult {
    pub index: usize,
    pub seed: u64,
    /// Maximum positioning error (m) per scheme, in [`Scheme::ALL`] order.
    pub objectives: [f64; 5],
    pub outer_iterations: usize,
    pub reward_clips: usize,
}

/// Aggregated statistics of one scheme at one sweep point.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetricsRow {
    pub sweep: String,
    pub scheme: String,
    pub mean_max_err_m: f64,
    pub p50: f64,
    pub p90: f64,
    pub realizations: usize,
    pub seed: u64,
}

/// Outcome of a batch of realizations.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub results: Vec<RealizationResult>,
    /// First failure, if any realization failed.
    pub error: Option<String>,
    pub seconds: f64,
}

/// Integral table for the configured band, blocks computed in parallel.
pub fn build_table(config: &Config) -> Result<IntegralTable, CliError> {
    let s = &config.scenario;
    let nums = numerology_set(s.numerology_count, s.bandwidth_hz, s.comb_size)?;
    let half = 0.5 * s.dll.frontend_bw_hz.unwrap_or(2.0 * s.bandwidth_hz);
    let specs = block_specs(&nums)?;
    let blocks = specs
        .par_iter()
        .map(|&spec| compute_block(&nums, half, spec).map(|b| (spec, b)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntegralTable::from_blocks(nums, half, blocks)?)
}

/// One realization: scenario and channels from its seed, then every scheme.
pub fn run_realization(
    config: &Config,
    table: &IntegralTable,
    index: usize,
) -> Result<RealizationResult, nrpos_core::Error> {
    let seed = realization_seed(config.experiment.seed, index as u64);
    let inst = Instance::generate(&config.scenario, seed, &table.numerologies)?;
    let ev = inst.evaluator(table);
    let r = run_schemes(&ev, &config.optimizer, &mut stream(seed, streams::INIT))?;
    Ok(RealizationResult {
        index,
        seed,
        objectives: r.objectives,
        outer_iterations: r.solution.history.len(),
        reward_clips: r.solution.reward_clips,
    })
}

/// All realizations of `config`. Failed realizations are dropped from the
/// results and the first failure is reported.
pub fn run_monte_carlo(config: &Config) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let table = build_table(config)?;
    let outcomes: Vec<_> =
        (0..config.experiment.realizations).into_par_iter().map(|i| run_realization(config, &table, i)).collect();
    let mut results = Vec::with_capacity(outcomes.len());
    let mut error = None;
    for o in outcomes {
        match o {
            Ok(r) => results.push(r),
            Err(e) => {
                error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    Ok(RunOutput { results, error, seconds: start.elapsed().as_secs_f64() })
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// One row per requested scheme, in scheme order.
pub fn summarize(sweep: &str, schemes: &[Scheme], results: &[RealizationResult], seed: u64) -> Vec<MetricsRow> {
    schemes
        .iter()
        .map(|&s| {
            let mut v: Vec<f64> = results.iter().map(|r| r.objectives[s as usize]).collect();
            v.sort_by(f64::total_cmp);
            let mean = if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
            MetricsRow {
                sweep: sweep.to_string(),
                scheme: s.name().to_string(),
                mean_max_err_m: mean,
                p50: percentile(&v, 0.5),
                p90: percentile(&v, 0.9),
                realizations: v.len(),
                seed,
            }
        })
        .collect()
}
