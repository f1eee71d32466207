//! Runs a campaign: per repeat, generate a scenario, train every device,
//! evaluate the learned policy and the benchmarks, then average.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CampaignConfig, Resolved};
use crate::decision::{self, Action, ActionSpace};
use crate::error::{Error, Result};
use crate::evaluation::{self, BenchmarkScenario, MetricsReport, Method};
use crate::qlearning::{self, Hyperparams};
use crate::scenario::{self, DeviceProfile, Topology};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub repeat: usize,
    pub seed: u64,
    /// Q first, then ScA to ScF.
    pub reports: Vec<MetricsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub energy: f64,
    pub monetary: f64,
    pub resp_excess: f64,
    pub sec_dissat: f64,
    pub joint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub repeats: Vec<RepeatResult>,
    pub summary: Vec<SummaryRow>,
}

impl CampaignResult {
    pub fn summary_for(&self, method: Method) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.method == method)
    }
}

/// Seed of one device's learner within a repeat.
pub fn learner_seed(repeat_seed: u64, device: usize) -> u64 {
    repeat_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(device as u64)
}

/// Trains one device and returns its greedy action.
pub fn learn_device(
    device: &DeviceProfile,
    topology: &Topology,
    resolved: &Resolved,
    space: &ActionSpace,
    repeat_seed: u64,
) -> Result<Action> {
    let hp = Hyperparams { seed: learner_seed(repeat_seed, device.id), ..resolved.hyper.clone() };
    Ok(qlearning::train(device, topology, &resolved.model, space, &hp)?.1)
}

fn evaluate_policy(method: Method, topology: &Topology, actions: &[Action], resolved: &Resolved) -> Result<MetricsReport> {
    let outcomes = topology
        .devices
        .iter()
        .zip(actions)
        .map(|(d, a)| Ok((d, *a, decision::evaluate_action(d, a, topology, &resolved.model)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(evaluation::aggregate_metrics(method, &outcomes))
}

/// One repeat: scenario, learning, and the seven method reports with J set.
pub fn run_repeat(resolved: &Resolved, space: &ActionSpace, repeat: usize, seed: u64) -> Result<RepeatResult> {
    let topology = scenario::generate_topology(seed, &resolved.scenario, &resolved.model)?;
    let learned = topology
        .devices
        .par_iter()
        .map(|d| learn_device(d, &topology, resolved, space, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut reports = vec![evaluate_policy(Method::QLearning, &topology, &learned, resolved)?];
    for sc in BenchmarkScenario::ALL {
        let actions = topology
            .devices
            .iter()
            .map(|d| evaluation::benchmark_action(sc, d, space))
            .collect::<Result<Vec<_>>>()?;
        reports.push(evaluate_policy(Method::Benchmark(sc), &topology, &actions, resolved)?);
    }
    evaluation::assign_joint(&mut reports)?;
    Ok(RepeatResult { repeat, seed, reports })
}

/// Mean of every metric per method, in method order.
pub fn summarize(repeats: &[RepeatResult]) -> Vec<SummaryRow> {
    let n = repeats.len() as f64;
    Method::all()
        .into_iter()
        .map(|method| {
            let rows: Vec<&MetricsReport> =
                repeats.iter().flat_map(|r| r.reports.iter().filter(move |m| m.method == method)).collect();
            let mean = |f: &dyn Fn(&MetricsReport) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                method,
                energy: mean(&|r| r.energy),
                monetary: mean(&|r| r.monetary),
                resp_excess: mean(&|r| r.resp_excess),
                sec_dissat: mean(&|r| f64::from(r.sec_dissat)),
                joint: mean(&|r| r.joint),
            }
        })
        .collect()
}

/// Runs all repeats of a campaign on `workers` threads (0 picks the number
/// of cores). Results do not depend on the worker count.
pub fn run_campaign(config: &CampaignConfig, workers: usize) -> Result<CampaignResult> {
    let resolved = config.resolve()?;
    let space = ActionSpace::new(resolved.model.step_pct)?;
    let exp = &config.experiment;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let repeats = pool.install(|| {
        (0..exp.repeats)
            .into_par_iter()
            .map(|r| run_repeat(&resolved, &space, r, exp.seed.wrapping_add(r as u64)))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(&repeats);
    Ok(CampaignResult { repeats, summary })
}

/// Loss of run `b` against run `a` for each of the five metrics, using the
/// best benchmark mean across both runs as reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossRow {
    pub metric: String,
    pub first: f64,
    pub second: f64,
    pub best_benchmark: f64,
    /// `None` when the comparison is undefined.
    pub loss: Option<f64>,
}

pub const METRIC_NAMES: [&str; 5] = ["energy", "monetary", "resp_excess", "sec_dissat", "joint"];

fn metric_value(row: &SummaryRow, i: usize) -> f64 {
    [row.energy, row.monetary, row.resp_excess, row.sec_dissat, row.joint][i]
}

pub fn loss_table(first: &[SummaryRow], second: &[SummaryRow]) -> Result<Vec<LossRow>> {
    let q = |rows: &[SummaryRow]| {
        rows.iter()
            .find(|r| r.method == Method::QLearning)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument("summary has no Q row".into()))
    };
    let (qa, qb) = (q(first)?, q(second)?);
    (0..METRIC_NAMES.len())
        .map(|i| {
            let bench: Vec<f64> = first
                .iter()
                .chain(second)
                .filter(|r| r.method.is_benchmark())
                .map(|r| metric_value(r, i))
                .collect();
            let (a, b) = (metric_value(&qa, i), metric_value(&qb, i));
            let loss = match evaluation::loss_gain(a, b, &bench) {
                Ok(l) => Some(l),
                Err(Error::UndefinedComparison) => None,
                Err(e) => return Err(e),
            };
            Ok(LossRow {
                metric: METRIC_NAMES[i].into(),
                first: a,
                second: b,
                best_benchmark: bench.iter().cloned().fold(f64::INFINITY, f64::min),
                loss,
            })
        })
        .collect()
}
