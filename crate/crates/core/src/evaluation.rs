//! Fixed benchmark assignments, campaign metrics, the joint metric and the
//! loss/gain comparison between two runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decision::{Action, ActionSpace, OptionEvaluation, OptionId};
use crate::energy::Unit;
use crate::error::{Error, Result};
use crate::scenario::{DeviceProfile, Group};

/// The six fixed (Group X unit, Group Y unit) assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BenchmarkScenario {
    ScA,
    ScB,
    ScC,
    ScD,
    ScE,
    ScF,
}

impl BenchmarkScenario {
    pub const ALL: [BenchmarkScenario; 6] = [Self::ScA, Self::ScB, Self::ScC, Self::ScD, Self::ScE, Self::ScF];

    pub fn group_x_unit(self) -> Unit {
        match self {
            Self::ScA | Self::ScC | Self::ScE => Unit::Device,
            Self::ScB | Self::ScD | Self::ScF => Unit::Cloud,
        }
    }

    pub fn group_y_unit(self) -> Unit {
        match self {
            Self::ScA | Self::ScB => Unit::Device,
            Self::ScC | Self::ScD => Unit::Fog,
            Self::ScE | Self::ScF => Unit::Cloud,
        }
    }
}

impl fmt::Display for BenchmarkScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The fixed action a benchmark assigns to a device. Remote units always
/// take the full load.
pub fn benchmark_action(scenario: BenchmarkScenario, device: &DeviceProfile, space: &ActionSpace) -> Result<Action> {
    let option = match device.group.ok_or(Error::MissingGroup(device.id))? {
        Group::X => match scenario.group_x_unit() {
            Unit::Cloud => OptionId::E,
            _ => OptionId::D,
        },
        Group::Y => match scenario.group_y_unit() {
            Unit::Device => OptionId::A,
            Unit::Fog => OptionId::B,
            Unit::Cloud => OptionId::C,
        },
    };
    space
        .find(option, 1.0)
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("action space has no {option} entry")))
}

/// A method of a campaign: the learned policy or a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    QLearning,
    Benchmark(BenchmarkScenario),
}

impl Method {
    pub fn all() -> Vec<Method> {
        std::iter::once(Method::QLearning).chain(BenchmarkScenario::ALL.map(Method::Benchmark)).collect()
    }

    pub fn is_benchmark(self) -> bool {
        matches!(self, Method::Benchmark(_))
    }

    pub fn name(self) -> String {
        match self {
            Method::QLearning => "Q".into(),
            Method::Benchmark(b) => b.to_string(),
        }
    }

    pub fn parse(name: &str) -> Option<Method> {
        Method::all().into_iter().find(|m| m.name() == name)
    }
}

/// What one device ended up with under some method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceTrace {
    pub device: usize,
    pub action: Action,
    pub energy: f64,
    pub cost: f64,
    pub resp: f64,
    pub resp_req: f64,
    pub sec_dissatisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: Method,
    pub energy: f64,
    pub monetary: f64,
    pub resp_excess: f64,
    pub sec_dissat: u32,
    /// Filled in by [`joint_metric`] once all methods of a repeat are known.
    pub joint: f64,
    pub devices: Vec<DeviceTrace>,
}

/// Sums the per-device outcomes of one method.
pub fn aggregate_metrics(method: Method, outcomes: &[(&DeviceProfile, Action, OptionEvaluation)]) -> MetricsReport {
    let devices: Vec<DeviceTrace> = outcomes
        .iter()
        .map(|(d, a, e)| DeviceTrace {
            device: d.id,
            action: *a,
            energy: e.energy,
            cost: e.cost,
            resp: e.resp,
            resp_req: d.resp_req,
            sec_dissatisfied: d.sec_req && !e.secure,
        })
        .collect();
    MetricsReport {
        method,
        energy: devices.iter().map(|t| t.energy).sum(),
        monetary: devices.iter().map(|t| t.cost).sum(),
        resp_excess: devices.iter().map(|t| (t.resp - t.resp_req).max(0.0)).sum(),
        sec_dissat: devices.iter().filter(|t| t.sec_dissatisfied).count() as u32,
        joint: 0.0,
        devices,
    }
}

/// Min-max scaling into [0, 1]; a constant input maps to all zeros.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    values
        .iter()
        .map(|&v| if range > 0.0 { ((v - lo) / range).clamp(0.0, 1.0) } else { 0.0 })
        .collect()
}

/// Raw metric vectors in the order energy, monetary, response excess,
/// security dissatisfaction.
pub fn metric_columns(reports: &[MetricsReport]) -> [Vec<f64>; 4] {
    [
        reports.iter().map(|r| r.energy).collect(),
        reports.iter().map(|r| r.monetary).collect(),
        reports.iter().map(|r| r.resp_excess).collect(),
        reports.iter().map(|r| f64::from(r.sec_dissat)).collect(),
    ]
}

/// J per method with unit coefficients, normalizing each metric across the
/// given methods.
pub fn joint_metric(reports: &[MetricsReport]) -> Result<Vec<f64>> {
    if reports.len() < 2 {
        return Err(Error::TooFewMethods(reports.len()));
    }
    let mut joint = vec![0.0; reports.len()];
    for col in metric_columns(reports) {
        for (j, n) in joint.iter_mut().zip(min_max_normalize(&col)) {
            *j += n;
        }
    }
    Ok(joint)
}

/// Computes and stores J on every report.
pub fn assign_joint(reports: &mut [MetricsReport]) -> Result<()> {
    let joint = joint_metric(reports)?;
    for (r, j) in reports.iter_mut().zip(joint) {
        r.joint = j;
    }
    Ok(())
}

/// Relative loss of the second run against the first, measured from the best
/// benchmark. Positive means the second run is worse.
pub fn loss_gain(v_first: f64, v_second: f64, benchmark_values: &[f64]) -> Result<f64> {
    if benchmark_values.is_empty() {
        return Err(Error::InvalidArgument("no benchmark values to compare against".into()));
    }
    let best = benchmark_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let d_first = v_first - best;
    let d_second = v_second - best;
    if d_second == 0.0 {
        return Err(Error::UndefinedComparison);
    }
    Ok((d_second - d_first) / d_second.abs())
}
