//! Penalty shaping and per-device tabular Q-learning over the joint action
//! space. The state is the last action taken, so the table is square.
//!
//! Q stores rewards (negated penalties) and the greedy policy is an argmax.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decision::{self, Action, ActionSpace, OptionEvaluation, ACTION_ORDER_VERSION};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scenario::{DeviceProfile, Topology, Weights};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    /// Global penalty factor Ω.
    pub omega: f64,
    /// Capacity penalty exponent w_c.
    pub w_c: u32,
    /// Energy weight below the battery threshold.
    pub w_e_high: f64,
    /// Energy weight at or above the battery threshold.
    pub w_e_low: f64,
    /// Monetary weight at or above the battery threshold.
    pub w_m_high: f64,
    /// Monetary weight below the battery threshold.
    pub w_m_low: f64,
    /// β_T in percent.
    pub beta_threshold: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self { omega: 10.0, w_c: 5, w_e_high: 10.0, w_e_low: 1.0, w_m_high: 10.0, w_m_low: 0.0, beta_threshold: 30.0 }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 1.0 && self.omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("omega must exceed 1, got {}", self.omega)));
        }
        let weights = [self.w_e_high, self.w_e_low, self.w_m_high, self.w_m_low];
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("energy and monetary weights must be >= 0".into()));
        }
        if !(0.0..=100.0).contains(&self.beta_threshold) {
            return Err(Error::InvalidArgument(format!("battery threshold must lie in [0, 100], got {}", self.beta_threshold)));
        }
        Ok(())
    }

    /// The capacity exponent must dominate the requirement weights.
    pub fn check_weights(&self, w: Weights) -> Result<()> {
        if self.w_c > w.resp.max(w.sec) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "w_c = {} must exceed max(w_r, w_s) = {}",
                self.w_c,
                w.resp.max(w.sec)
            )))
        }
    }

    pub fn energy_weight(&self, battery: f64) -> f64 {
        if battery < self.beta_threshold {
            self.w_e_high
        } else {
            self.w_e_low
        }
    }

    pub fn monetary_weight(&self, battery: f64) -> f64 {
        if battery >= self.beta_threshold {
            self.w_m_high
        } else {
            self.w_m_low
        }
    }

    /// Penalty charged for actions the topology cannot carry out.
    pub fn infeasible_penalty(&self) -> f64 {
        10.0 * self.omega.powi(self.w_c as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyTerms {
    pub resp: f64,
    pub sec: f64,
    pub capacity: f64,
    pub monetary: f64,
    pub energy: f64,
}

impl PenaltyTerms {
    pub fn total(&self) -> f64 {
        self.resp + self.sec + self.capacity + self.monetary + self.energy
    }
}

pub fn penalty_terms(eval: &OptionEvaluation, device: &DeviceProfile, cfg: &PenaltyConfig) -> PenaltyTerms {
    let w = device.weights;
    let resp = if eval.resp > device.resp_req { cfg.omega.powi(w.resp as i32) + eval.resp } else { 0.0 };
    let sec = if device.sec_req && !eval.secure { cfg.omega.powi(w.sec as i32) } else { 0.0 };
    let capacity = if eval.capacity_ok { 0.0 } else { cfg.omega.powi(cfg.w_c as i32) };
    PenaltyTerms {
        resp,
        sec,
        capacity,
        monetary: cfg.monetary_weight(device.battery) * eval.offload_cost,
        energy: cfg.energy_weight(device.battery) * eval.energy,
    }
}

/// Θ_r + Θ_s + Θ_c + Θ_m + w_e·E_T for one evaluated action. The monetary
/// term charges only the offloaded share, so A and D contribute nothing.
pub fn penalty(eval: &OptionEvaluation, device: &DeviceProfile, _action: &Action, cfg: &PenaltyConfig) -> f64 {
    penalty_terms(eval, device, cfg).total()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub alpha: f64,
    /// Discount φ.
    pub discount: f64,
    /// Probability of a random action.
    pub explore: f64,
    /// Decay the exploration probability linearly to zero over the episodes.
    pub explore_decay: bool,
    pub episodes: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self { alpha: 0.5, discount: 0.9, explore: 0.8, explore_decay: false, episodes: 1000, iterations: 1000, seed: 0 }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(Error::InvalidArgument(format!("discount must lie in [0, 1), got {}", self.discount)));
        }
        if !(0.0..=1.0).contains(&self.explore) {
            return Err(Error::InvalidArgument(format!("explore must lie in [0, 1], got {}", self.explore)));
        }
        Ok(())
    }
}

/// Square table of Q-values with visit counts.
///
/// Each row's maximum and its lowest arg are cached so greedy lookups and
/// bootstrap targets cost O(1) except when the current maximum shrinks.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n: usize,
    values: Vec<f64>,
    visits: Vec<u64>,
    row_max: Vec<f64>,
    row_arg: Vec<usize>,
}

impl QTable {
    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![0.0; n * n], visits: vec![0; n * n], row_max: vec![0.0; n], row_arg: vec![0; n] }
    }

    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("expected {} finite values for a {n}x{n} table", n * n)));
        }
        let mut q = Self { n, values, visits: vec![0; n * n], row_max: vec![0.0; n], row_arg: vec![0; n] };
        for s in 0..n {
            q.rescan(s);
        }
        Ok(q)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.n + a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.n..(s + 1) * self.n]
    }

    pub fn visits(&self, s: usize, a: usize) -> u64 {
        self.visits[s * self.n + a]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self, s: usize) -> f64 {
        self.row_max[s]
    }

    /// Greedy action of a state, lowest index on ties.
    pub fn greedy(&self, s: usize) -> usize {
        self.row_arg[s]
    }

    fn rescan(&mut self, s: usize) {
        let (arg, max) = argmax(self.row(s));
        self.row_arg[s] = arg;
        self.row_max[s] = max;
    }

    fn set(&mut self, s: usize, a: usize, v: f64) {
        self.values[s * self.n + a] = v;
        let (max, arg) = (self.row_max[s], self.row_arg[s]);
        if v > max || (v == max && a < arg) {
            self.row_max[s] = v;
            self.row_arg[s] = a;
        } else if a == arg && v < max {
            self.rescan(s);
        }
    }
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(row: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in row.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// ε-greedy choice over one row of Q-values.
pub fn select_action(q_row: &[f64], explore: f64, rng: &mut impl Rng) -> usize {
    if rng.random::<f64>() < explore {
        rng.random_range(0..q_row.len())
    } else {
        argmax(q_row).0
    }
}

/// One Q-learning step on `(s, a)` after observing `penalty` and moving to `s_next`.
pub fn update(q: &mut QTable, s: usize, a: usize, penalty: f64, s_next: usize, hp: &Hyperparams) {
    let old = q.get(s, a);
    let target = -penalty + hp.discount * q.max(s_next);
    q.set(s, a, old + hp.alpha * (target - old));
    q.visits[s * q.n + a] += 1;
}

/// Trains a table against a fixed per-action penalty vector.
pub fn train_on(penalties: &[f64], hp: &Hyperparams) -> QTable {
    let n = penalties.len();
    let mut q = QTable::zeros(n);
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    for ep in 0..hp.episodes {
        let explore = if hp.explore_decay {
            hp.explore * (1.0 - ep as f64 / hp.episodes as f64)
        } else {
            hp.explore
        };
        let mut s = 0;
        for _ in 0..hp.iterations {
            let a = if rng.random::<f64>() < explore { rng.random_range(0..n) } else { q.greedy(s) };
            update(&mut q, s, a, penalties[a], a, hp);
            s = a;
        }
    }
    q
}

/// Penalty of every action for one device. Actions the topology cannot
/// serve get [`PenaltyConfig::infeasible_penalty`].
pub fn penalty_vector(
    device: &DeviceProfile,
    space: &ActionSpace,
    topology: &Topology,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    space
        .iter()
        .map(|a| match decision::evaluate_action(device, a, topology, params) {
            Ok(eval) => Ok(penalty(&eval, device, a, &params.penalty)),
            Err(Error::InfeasibleRoute { .. }) => Ok(params.penalty.infeasible_penalty()),
            Err(e) => Err(e),
        })
        .collect()
}

/// Lowest-penalty action index, lowest index on ties.
pub fn oracle_action(penalties: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, &p) in penalties.iter().enumerate() {
        if p < best.1 {
            best = (i, p);
        }
    }
    best.0
}

/// Trains one device's table and returns it with the greedy action from the
/// episode start state.
pub fn train(
    device: &DeviceProfile,
    topology: &Topology,
    params: &ModelParams,
    space: &ActionSpace,
    hp: &Hyperparams,
) -> Result<(QTable, Action)> {
    let penalties = penalty_vector(device, space, topology, params)?;
    let q = train_on(&penalties, hp);
    let action = space.as_slice()[q.greedy(0)];
    Ok((q, action))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTableHeader {
    pub action_order_version: u32,
    pub step_pct: u32,
    pub n_actions: usize,
    pub hyperparams: Hyperparams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct QTableFile {
    header: QTableHeader,
    /// Row-major, rows are states, columns actions, both in action order.
    values: Vec<f64>,
}

pub fn save_qtable(path: &Path, q: &QTable, space: &ActionSpace, hp: &Hyperparams) -> Result<()> {
    let file = QTableFile {
        header: QTableHeader {
            action_order_version: ACTION_ORDER_VERSION,
            step_pct: space.step_pct(),
            n_actions: q.len(),
            hyperparams: hp.clone(),
        },
        values: q.values.clone(),
    };
    std::fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}

pub fn load_qtable(path: &Path) -> Result<(QTableHeader, QTable)> {
    let file: QTableFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if file.header.action_order_version != ACTION_ORDER_VERSION {
        return Err(Error::InvalidArgument(format!(
            "Q-table uses action order version {}, expected {ACTION_ORDER_VERSION}",
            file.header.action_order_version
        )));
    }
    let q = QTable::from_values(file.header.n_actions, file.values)?;
    Ok((file.header, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{ActionSpace, OptionId};
    use approx::assert_relative_eq;

    fn device(battery: f64) -> DeviceProfile {
        DeviceProfile {
            id: 0,
            position: (0.0, 0.0),
            resp_req: 0.2,
            sec_req: true,
            rate_req: 10e3,
            battery,
            weights: Weights { resp: 3, sec: 3 },
            group: None,
        }
    }

    fn eval() -> OptionEvaluation {
        OptionEvaluation {
            resp: 0.1,
            secure: true,
            capacity_ok: true,
            offered_capacity: 30e3,
            energy: 0.25,
            cost: 1.0,
            offload_cost: 0.0,
        }
    }

    #[test]
    fn satisfied_high_battery_device_pays_only_energy() {
        let cfg = PenaltyConfig::default();
        let a = ActionSpace::new(5).unwrap().find(OptionId::A, 0.0).copied().unwrap();
        let mut e = eval();
        e.secure = false;
        let mut d = device(80.0);
        d.sec_req = false;
        assert_eq!(penalty(&e, &d, &a, &cfg), cfg.w_e_low * 0.25);
    }

    #[test]
    fn violation_terms() {
        let cfg = PenaltyConfig::default();
        let d = device(10.0);
        let mut e = eval();
        e.resp = 0.5;
        assert_relative_eq!(penalty_terms(&e, &d, &cfg).resp, 1000.5, max_relative = 1e-15);
        e.secure = false;
        assert_eq!(penalty_terms(&e, &d, &cfg).sec, 1000.0);
        e.capacity_ok = false;
        assert_eq!(penalty_terms(&e, &d, &cfg).capacity, 1e5);
    }

    #[test]
    fn update_arithmetic() {
        let hp = Hyperparams::default();
        let mut q = QTable::zeros(4);
        update(&mut q, 1, 2, 2.0, 2, &hp);
        assert_eq!(q.get(1, 2), -1.0);
        assert_eq!(q.visits(1, 2), 1);

        let frozen = Hyperparams { alpha: 0.0, ..Hyperparams::default() };
        let before = q.clone();
        let mut after = q.clone();
        // alpha = 0 is outside the valid range but the arithmetic must still be a no-op
        update(&mut after, 1, 2, 7.0, 3, &frozen);
        assert_eq!(after.values(), before.values());
    }

    #[test]
    fn bellman_fixed_point() {
        let hp = Hyperparams::default();
        let c = 3.7;
        let v = -c / (1.0 - hp.discount);
        let mut q = QTable::from_values(5, vec![v; 25]).unwrap();
        for (s, a) in [(0, 1), (1, 4), (4, 4), (3, 0)] {
            update(&mut q, s, a, c, a, &hp);
        }
        for &x in q.values() {
            assert_relative_eq!(x, v, max_relative = 1e-12);
        }
    }

    #[test]
    fn greedy_selection_and_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let row = [0.0, -1.0, 0.5, 2.0, -3.0, 0.0, 1.0, 2.0];
        assert_eq!(select_action(&row, 0.0, &mut rng), 3);
    }

    #[test]
    fn full_exploration_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 65;
        let draws = 100_000;
        let mut counts = vec![0u32; n];
        for _ in 0..draws {
            counts[select_action(&vec![0.0; n], 1.0, &mut rng)] += 1;
        }
        let p = 1.0 / n as f64;
        let mean = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((f64::from(c) - mean).abs() <= 3.5 * sd, "count {c} vs mean {mean}");
        }
    }

    #[test]
    fn cached_row_max_tracks_values() {
        let hp = Hyperparams::default();
        let mut q = QTable::zeros(6);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5000 {
            let s = rng.random_range(0..6);
            let a = rng.random_range(0..6);
            update(&mut q, s, a, rng.random_range(-1.0..5.0), rng.random_range(0..6), &hp);
            for r in 0..6 {
                let (arg, max) = argmax(q.row(r));
                assert_eq!((q.greedy(r), q.max(r)), (arg, max));
            }
        }
    }

    #[test]
    fn single_cheap_action_is_learned() {
        let mut p = vec![1000.0; 65];
        p[37] = 0.0;
        let hp = Hyperparams { episodes: 100, ..Hyperparams::default() };
        let q = train_on(&p, &hp);
        assert_eq!(q.greedy(0), 37);
        assert_eq!(oracle_action(&p), 37);
    }

    #[test]
    fn symmetric_environment_has_flat_rows() {
        // the least visited entries need more than the default 10^6 steps to
        // settle within 1e-6
        let hp = Hyperparams { episodes: 4000, ..Hyperparams::default() };
        let q = train_on(&[5.0; 65], &hp);
        let row = q.row(0);
        let spread = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - row.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-6, "spread {spread}");
        assert!(q.greedy(0) < 65);
    }

    #[test]
    fn training_is_deterministic() {
        let p: Vec<f64> = (0..65).map(|i| ((i * 37) % 11) as f64).collect();
        let hp = Hyperparams { episodes: 50, seed: 9, ..Hyperparams::default() };
        assert_eq!(train_on(&p, &hp), train_on(&p, &hp));
    }

    #[test]
    fn battery_switch_changes_only_weighted_terms() {
        let cfg = PenaltyConfig::default();
        let mut e = eval();
        e.resp = 0.4;
        e.secure = false;
        e.offload_cost = 3.0;
        let low = penalty_terms(&e, &device(29.9), &cfg);
        let high = penalty_terms(&e, &device(30.0), &cfg);
        assert_eq!((low.resp, low.sec, low.capacity), (high.resp, high.sec, high.capacity));
        assert_eq!(low.energy, 10.0 * 0.25);
        assert_eq!(high.energy, 0.25);
        assert_eq!(low.monetary, 0.0);
        assert_eq!(high.monetary, 30.0);
    }

    #[test]
    fn capacity_weight_must_dominate() {
        let cfg = PenaltyConfig::default();
        assert!(cfg.check_weights(Weights { resp: 3, sec: 4 }).is_ok());
        assert!(cfg.check_weights(Weights { resp: 5, sec: 0 }).is_err());
    }

    #[test]
    fn qtable_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.json");
        let space = ActionSpace::new(50).unwrap();
        let hp = Hyperparams { episodes: 20, iterations: 50, seed: 3, ..Hyperparams::default() };
        let q = train_on(&(0..11).map(f64::from).collect::<Vec<_>>(), &hp);
        save_qtable(&path, &q, &space, &hp).unwrap();
        let (header, back) = load_qtable(&path).unwrap();
        assert_eq!(header.n_actions, 11);
        assert_eq!(header.hyperparams, hp);
        assert_eq!(back.values(), q.values());
    }
}
