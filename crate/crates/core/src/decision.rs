//! The joint action space (connection/processor option × offload share) and
//! the evaluation of one action into the quantities the learner and the
//! metrics consume.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::energy::{self, Unit, UnitTable};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::propagation::Link;
use crate::scenario::{DeviceProfile, Topology};
use crate::timing;

/// Connection type / processing unit pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OptionId {
    /// Wi-Fi, device processing.
    A,
    /// Wi-Fi, fog (gateway) processing.
    B,
    /// Wi-Fi, cloud processing.
    C,
    /// NB-IoT, device processing.
    D,
    /// NB-IoT, cloud processing.
    E,
}

impl OptionId {
    pub const ALL: [OptionId; 5] = [OptionId::A, OptionId::B, OptionId::C, OptionId::D, OptionId::E];

    pub fn first_hop(self) -> Link {
        match self {
            OptionId::A | OptionId::B | OptionId::C => Link::WiFi,
            OptionId::D | OptionId::E => Link::NbIot,
        }
    }

    pub fn uses_gateway(self) -> bool {
        self.first_hop() == Link::WiFi
    }

    /// Unit that receives the offloaded share (the device itself for A and D).
    pub fn target_unit(self) -> Unit {
        match self {
            OptionId::A | OptionId::D => Unit::Device,
            OptionId::B => Unit::Fog,
            OptionId::C | OptionId::E => Unit::Cloud,
        }
    }

    pub fn offloads(self) -> bool {
        self.target_unit() != Unit::Device
    }

    /// eSIM protection is only available over NB-IoT.
    pub fn secure(self) -> bool {
        self.first_hop() == Link::NbIot
    }

    pub fn hops(self) -> usize {
        if self.uses_gateway() {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for OptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One element of the action (and state) space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub index: usize,
    pub option: OptionId,
    /// Offloaded fraction ψ; `None` for the device-processing options.
    pub psi: Option<f64>,
}

impl Action {
    /// ψ with the device-processing options mapped to 0.
    pub fn offload_fraction(&self) -> f64 {
        self.psi.unwrap_or(0.0)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.psi {
            Some(psi) => write!(f, "{}(psi={psi})", self.option),
            None => write!(f, "{}", self.option),
        }
    }
}

/// Version tag of the action ordering, recorded in persisted Q-tables.
pub const ACTION_ORDER_VERSION: u32 = 1;

/// The ordered action set: A, D, then B, C and E each with ψ ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpace {
    step_pct: u32,
    actions: Vec<Action>,
}

impl ActionSpace {
    /// Builds the space with a ψ resolution of `step_pct` percent.
    pub fn new(step_pct: u32) -> Result<Self> {
        if step_pct == 0 || step_pct > 100 || !100u32.is_multiple_of(step_pct) {
            return Err(Error::InvalidArgument(format!(
                "offload step must divide 100 percent, got {step_pct}"
            )));
        }
        let levels = 100 / step_pct;
        let mut actions = Vec::with_capacity(2 + 3 * (levels as usize + 1));
        for option in [OptionId::A, OptionId::D] {
            actions.push(Action { index: actions.len(), option, psi: None });
        }
        for option in [OptionId::B, OptionId::C, OptionId::E] {
            for m in 0..=levels {
                let psi = f64::from(m * step_pct) / 100.0;
                actions.push(Action { index: actions.len(), option, psi: Some(psi) });
            }
        }
        Ok(Self { step_pct, actions })
    }

    pub fn step_pct(&self) -> u32 {
        self.step_pct
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Action> {
        self.actions.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Action> {
        self.actions.iter()
    }

    pub fn as_slice(&self) -> &[Action] {
        &self.actions
    }

    /// Finds the action for `option` with the given ψ (ignored for A and D).
    pub fn find(&self, option: OptionId, psi: f64) -> Option<&Action> {
        self.actions.iter().find(|a| {
            a.option == option && a.psi.is_none_or(|p| (p - psi).abs() < 1e-9)
        })
    }
}

/// Enumerates the action set at the default 5 % resolution.
pub fn enumerate_actions() -> Vec<Action> {
    ActionSpace::new(5).expect("5 divides 100").actions
}

/// What a device gets from taking one action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionEvaluation {
    /// Offered response time K̂_r in s.
    pub resp: f64,
    /// Offered security K̂_s.
    pub secure: bool,
    /// Both processed shares fit their units' capacities.
    pub capacity_ok: bool,
    /// Capacity K̂_x of the unit receiving the offloaded share (device for A/D).
    pub offered_capacity: f64,
    /// Total energy Ê_T in J.
    pub energy: f64,
    /// Total monetary cost M̂_T in AC, device share included.
    pub cost: f64,
    /// Offloaded share of the cost, ψ·K_x·M_S. Zero for A and D.
    pub offload_cost: f64,
}

/// Each processed share fits its own unit: `(1-ψ)K_x ≤ χ_d` and `ψK_x ≤ χ_target`.
pub fn capacity_ok(action: &Action, rate: f64, units: &UnitTable) -> bool {
    let psi = action.offload_fraction();
    let target = units.get(action.option.target_unit());
    if action.option.offloads() {
        (1.0 - psi) * rate <= units.device.capacity && psi * rate <= target.capacity
    } else {
        rate <= units.device.capacity
    }
}

pub fn evaluate_action(
    device: &DeviceProfile,
    action: &Action,
    topology: &Topology,
    params: &ModelParams,
) -> Result<OptionEvaluation> {
    let psi = action.offload_fraction();
    let energy = energy::route_energy(device, action, topology, params)?.total;
    let resp = timing::response_time(device, action, topology, params)?.total();

    let target = params.units.get(action.option.target_unit());
    let rate = device.rate_req;
    let capacity_ok = capacity_ok(action, rate, &params.units);
    let offload_cost = if action.option.offloads() { psi * rate * target.cost_per_bps } else { 0.0 };
    let cost = (1.0 - psi) * rate * params.units.device.cost_per_bps + offload_cost;

    Ok(OptionEvaluation {
        resp,
        secure: action.option.secure(),
        capacity_ok,
        offered_capacity: target.capacity,
        energy,
        cost,
        offload_cost,
    })
}

/// Evaluates every action of the space for one device.
pub fn evaluate_all(
    device: &DeviceProfile,
    space: &ActionSpace,
    topology: &Topology,
    params: &ModelParams,
) -> Vec<Result<OptionEvaluation>> {
    space.iter().map(|a| evaluate_action(device, a, topology, params)).collect()
}
