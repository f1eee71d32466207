//! Processing and transmission energy, and the per-option data flow that both
//! the energy and the timing models walk.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decision::{Action, OptionId};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::propagation::{self, Link};
use crate::scenario::{DeviceProfile, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Unit {
    Device,
    Fog,
    Cloud,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Unit::Device => "device",
            Unit::Fog => "fog",
            Unit::Cloud => "cloud",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessingUnitSpec {
    pub unit: Unit,
    /// X: computation cycles per data element.
    pub cycles_per_de: f64,
    /// χ: computational capacity in bit/s.
    pub capacity: f64,
    /// M: cost per bit/s of processed rate, in AC.
    pub cost_per_bps: f64,
    /// ε: energy per computation cycle in J.
    pub energy_per_cycle: f64,
    /// W: bits per data element.
    pub bits_per_de: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitTable {
    pub device: ProcessingUnitSpec,
    pub fog: ProcessingUnitSpec,
    pub cloud: ProcessingUnitSpec,
}

impl UnitTable {
    pub fn get(&self, unit: Unit) -> &ProcessingUnitSpec {
        match unit {
            Unit::Device => &self.device,
            Unit::Fog => &self.fog,
            Unit::Cloud => &self.cloud,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for spec in [&self.device, &self.fog, &self.cloud] {
            let ok = spec.capacity > 0.0
                && spec.cost_per_bps >= 0.0
                && spec.energy_per_cycle > 0.0
                && spec.bits_per_de > 0.0
                && spec.cycles_per_de > 0.0;
            if !ok {
                return Err(Error::InvalidArgument(format!("invalid {} processing unit: {spec:?}", spec.unit)));
            }
        }
        if !(self.cloud.cycles_per_de < self.fog.cycles_per_de && self.fog.cycles_per_de < self.device.cycles_per_de) {
            return Err(Error::InvalidArgument(
                "cycles per data element must satisfy cloud < fog < device".into(),
            ));
        }
        Ok(())
    }
}

impl Default for UnitTable {
    fn default() -> Self {
        let base = |unit, cycles, capacity, cost| ProcessingUnitSpec {
            unit,
            cycles_per_de: cycles,
            capacity,
            cost_per_bps: cost,
            energy_per_cycle: 5e-6,
            bits_per_de: 8.0,
        };
        Self {
            device: base(Unit::Device, 100.0, 30e3, 1e-4),
            fog: base(Unit::Fog, 10.0, 100e3, 1e-1),
            cloud: base(Unit::Cloud, 1.0, 10e6, 1.0),
        }
    }
}

/// E_p = (D / W) · X · ε.
pub fn processing_energy(data_bits: f64, unit: &ProcessingUnitSpec) -> f64 {
    data_bits / unit.bits_per_de * unit.cycles_per_de * unit.energy_per_cycle
}

pub fn transmission_energy(tx_power: f64, period: f64) -> f64 {
    tx_power * period
}

/// Volumes moved and processed when a device takes one action.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFlow {
    /// Bits carried by each hop, in route order.
    pub hops: Vec<(Link, f64)>,
    /// Raw bits processed by each unit involved.
    pub processing: Vec<(Unit, f64)>,
}

/// Hop volumes and processing shares for `option` with offload fraction `psi`.
///
/// `D_p = D_r / compression`. Offloaded raw data travels uncompressed up to the
/// unit that processes it; everything past a processing stage is compressed.
pub fn data_flow(option: OptionId, psi: f64, raw_bits: f64, compression: f64) -> DataFlow {
    let processed = raw_bits / compression;
    let mixed = psi * raw_bits + (1.0 - psi) * processed;
    let local = (1.0 - psi) * raw_bits;
    let remote = psi * raw_bits;
    match option {
        OptionId::A => DataFlow {
            hops: vec![(Link::WiFi, processed), (Link::Lte, processed)],
            processing: vec![(Unit::Device, raw_bits)],
        },
        OptionId::B => DataFlow {
            hops: vec![(Link::WiFi, mixed), (Link::Lte, processed)],
            processing: vec![(Unit::Device, local), (Unit::Fog, remote)],
        },
        OptionId::C => DataFlow {
            hops: vec![(Link::WiFi, mixed), (Link::Lte, mixed)],
            processing: vec![(Unit::Device, local), (Unit::Cloud, remote)],
        },
        OptionId::D => DataFlow {
            hops: vec![(Link::NbIot, processed)],
            processing: vec![(Unit::Device, raw_bits)],
        },
        OptionId::E => DataFlow {
            hops: vec![(Link::NbIot, mixed)],
            processing: vec![(Unit::Device, local), (Unit::Cloud, remote)],
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub tx_per_hop: Vec<(Link, f64)>,
    pub processing: Vec<(Unit, f64)>,
    pub total: f64,
}

impl EnergyBreakdown {
    fn from_parts(tx_per_hop: Vec<(Link, f64)>, processing: Vec<(Unit, f64)>) -> Self {
        let total = tx_per_hop.iter().map(|h| h.1).sum::<f64>() + processing.iter().map(|p| p.1).sum::<f64>();
        Self { tx_per_hop, processing, total }
    }

    pub fn transmission(&self) -> f64 {
        self.tx_per_hop.iter().map(|h| h.1).sum()
    }
}

/// Energy of one hop carrying `bits` within the time period.
pub fn hop_energy(link: Link, bits: f64, device: &DeviceProfile, topology: &Topology, params: &ModelParams) -> Result<f64> {
    if bits == 0.0 {
        return Ok(0.0);
    }
    let sample = topology
        .link_sample(device.id, link)
        .ok_or_else(|| Error::InvalidArgument(format!("device {} has no {link} link", device.id)))?;
    let budget = propagation::link_budget(link, &sample, bits, params.period, &params.propagation)?;
    Ok(transmission_energy(budget.required_tx_power, params.period))
}

pub fn route_energy(
    device: &DeviceProfile,
    action: &Action,
    topology: &Topology,
    params: &ModelParams,
) -> Result<EnergyBreakdown> {
    let option = action.option;
    if option.uses_gateway() && topology.serving_gateway(device.id).is_none() {
        return Err(Error::InfeasibleRoute { device: device.id, option });
    }
    let flow = data_flow(option, action.offload_fraction(), device.raw_bits(params.period), params.timing.compression);
    let tx_per_hop = flow
        .hops
        .iter()
        .map(|&(link, bits)| hop_energy(link, bits, device, topology, params).map(|e| (link, e)))
        .collect::<Result<Vec<_>>>()?;
    let processing = flow
        .processing
        .iter()
        .filter(|(unit, _)| *unit == Unit::Device || params.include_remote_processing)
        .map(|&(unit, bits)| (unit, processing_energy(bits, params.units.get(unit))))
        .collect();
    Ok(EnergyBreakdown::from_parts(tx_per_hop, processing))
}
