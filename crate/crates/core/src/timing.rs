//! Uplink response time: processing delay at each unit plus per-hop
//! transmission delay, with Wi-Fi hops slowed by the retransmission factor.

use crate::decision::Action;
use crate::energy::{self, ProcessingUnitSpec, Unit};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::propagation::{Link, PerLink};
use crate::scenario::{DeviceProfile, Topology};

#[derive(Debug, Clone, PartialEq)]
pub struct TimingParams {
    /// F > 1: Wi-Fi delay multiplier due to retransmissions.
    pub retx_factor: f64,
    /// ℧ > 1: raw over processed data volume.
    pub compression: f64,
    /// Nominal uplink rate per link type in bit/s.
    pub link_rate: PerLink<f64>,
}

impl Default for TimingParams {
    fn default() -> Self {
        Self {
            retx_factor: 2.0,
            compression: 200.0,
            link_rate: PerLink { wifi: 50e3, nbiot: 20e3, lte: 50e3 },
        }
    }
}

impl TimingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.retx_factor > 1.0) {
            return Err(Error::InvalidArgument(format!("retransmission factor must exceed 1, got {}", self.retx_factor)));
        }
        if !(self.compression > 1.0) {
            return Err(Error::InvalidArgument(format!("compression rate must exceed 1, got {}", self.compression)));
        }
        for link in Link::ALL {
            let r = self.link_rate.get(link);
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidArgument(format!("{link} rate must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

pub fn processing_delay(data_bits: f64, unit: &ProcessingUnitSpec) -> f64 {
    data_bits / unit.capacity
}

pub fn transmission_delay(data_bits: f64, link: Link, params: &TimingParams) -> f64 {
    let base = data_bits / params.link_rate.get(link);
    match link {
        Link::WiFi => params.retx_factor * base,
        Link::NbIot | Link::Lte => base,
    }
}

/// Response time split into its processing and transmission parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTime {
    pub processing: Vec<(Unit, f64)>,
    pub transmission: Vec<(Link, f64)>,
}

impl ResponseTime {
    pub fn total(&self) -> f64 {
        self.processing.iter().map(|p| p.1).sum::<f64>() + self.transmission.iter().map(|t| t.1).sum::<f64>()
    }

    pub fn hops(&self) -> usize {
        self.transmission.len()
    }
}

pub fn response_time(
    device: &DeviceProfile,
    action: &Action,
    topology: &Topology,
    params: &ModelParams,
) -> Result<ResponseTime> {
    let option = action.option;
    if option.uses_gateway() && topology.serving_gateway(device.id).is_none() {
        return Err(Error::InfeasibleRoute { device: device.id, option });
    }
    Ok(response_time_for(action, device.raw_bits(params.period), params))
}

/// Response time of an action for `raw_bits` of input. Independent of the
/// geometry, since link rates are nominal.
pub fn response_time_for(action: &Action, raw_bits: f64, params: &ModelParams) -> ResponseTime {
    let flow = energy::data_flow(action.option, action.offload_fraction(), raw_bits, params.timing.compression);
    ResponseTime {
        processing: flow
            .processing
            .iter()
            .map(|&(unit, bits)| (unit, processing_delay(bits, params.units.get(unit))))
            .collect(),
        transmission: flow
            .hops
            .iter()
            .map(|&(link, bits)| (link, transmission_delay(bits, link, &params.timing)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{ActionSpace, OptionId};
    use crate::energy::UnitTable;
    use approx::assert_relative_eq;

    fn equal_rates(rate: f64) -> ModelParams {
        let mut p = ModelParams::default();
        p.timing.link_rate = PerLink { wifi: rate, nbiot: rate, lte: rate };
        p
    }

    #[test]
    fn processing_delay_examples() {
        let u = UnitTable::default();
        assert_relative_eq!(processing_delay(3000.0, &u.device), 0.1, max_relative = 1e-12);
        assert_relative_eq!(processing_delay(3000.0, &u.cloud), 3e-4, max_relative = 1e-12);
        assert_eq!(processing_delay(0.0, &u.fog), 0.0);
    }

    #[test]
    fn transmission_delay_examples() {
        let t = equal_rates(30e3).timing;
        assert_relative_eq!(transmission_delay(3000.0, Link::WiFi, &t), 0.2, max_relative = 1e-12);
        assert_relative_eq!(transmission_delay(3000.0, Link::NbIot, &t), 0.1, max_relative = 1e-12);
        for link in Link::ALL {
            assert_eq!(transmission_delay(0.0, link, &t), 0.0);
        }
    }

    #[test]
    fn traces() {
        let p = equal_rates(30e3);
        let space = ActionSpace::new(5).unwrap();
        let d = space.find(OptionId::D, 0.0).unwrap();
        let r = response_time_for(d, 3000.0, &p);
        assert_eq!(r.hops(), 1);
        assert_relative_eq!(r.total(), 0.1005, max_relative = 1e-12);

        let c = space.find(OptionId::C, 1.0).unwrap();
        let r = response_time_for(c, 3000.0, &p);
        assert_eq!(r.hops(), 2);
        assert_relative_eq!(r.total(), 0.3003, max_relative = 1e-12);

        for a in space.iter() {
            assert_eq!(response_time_for(a, 0.0, &p).total(), 0.0);
        }
    }

    #[test]
    fn wifi_hop_is_f_times_slower() {
        let t = equal_rates(42e3).timing;
        let wifi = transmission_delay(1234.0, Link::WiFi, &t);
        assert_relative_eq!(wifi, t.retx_factor * transmission_delay(1234.0, Link::NbIot, &t), max_relative = 1e-15);
        assert_relative_eq!(wifi, t.retx_factor * transmission_delay(1234.0, Link::Lte, &t), max_relative = 1e-15);
    }

    #[test]
    fn device_options_fastest_full_cloud_over_wifi_slowest() {
        let p = ModelParams::default();
        let space = ActionSpace::new(5).unwrap();
        for raw in [500.0, 1500.0, 3000.0] {
            let r = |o, psi| response_time_for(space.find(o, psi).unwrap(), raw, &p).total();
            let fastest = r(OptionId::A, 0.0).min(r(OptionId::D, 0.0));
            let slowest = r(OptionId::C, 1.0);
            for a in space.iter() {
                let t = response_time_for(a, raw, &p).total();
                assert!(t >= fastest - 1e-15, "{a} faster than device processing");
                assert!(t <= slowest + 1e-15, "{a} slower than full cloud over Wi-Fi");
            }
        }
    }

    #[test]
    fn cloud_offload_can_beat_device_at_equal_rates() {
        // at a link rate equal to the device capacity the faster cloud wins
        let p = equal_rates(30e3);
        let space = ActionSpace::new(5).unwrap();
        let d = response_time_for(space.find(OptionId::D, 0.0).unwrap(), 3000.0, &p).total();
        let e = response_time_for(space.find(OptionId::E, 1.0).unwrap(), 3000.0, &p).total();
        assert!(e < d);
    }

    #[test]
    fn non_decreasing_in_psi() {
        // with link rates below the device capacity, as in the defaults
        for p in [equal_rates(20e3), ModelParams::default()] {
            let space = ActionSpace::new(5).unwrap();
            for o in [OptionId::B, OptionId::C, OptionId::E] {
                let times: Vec<f64> = space
                    .iter()
                    .filter(|a| a.option == o)
                    .map(|a| response_time_for(a, 3000.0, &p).total())
                    .collect();
                assert!(times.windows(2).all(|w| w[1] >= w[0]), "{o}: {times:?}");
            }
        }
    }
}
