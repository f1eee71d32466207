//! Seeded generation of the network layout and the device population.
//!
//! Randomness comes from independent ChaCha8 streams of one seed so that
//! changing one aspect of a scenario (say the battery regime) leaves every
//! other draw untouched.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::decision::{self, ActionSpace};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::propagation::{self, Interferer, Link, LinkSample, PropagationParams};
use crate::timing;

const STREAM_LAYOUT: u64 = 0;
const STREAM_SHADOWING: u64 = 1;
const STREAM_REQUIREMENTS: u64 = 2;
const STREAM_BATTERY: u64 = 3;

/// Benchmark group: X devices are tied to NB-IoT, Y devices to Wi-Fi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pub resp: u32,
    pub sec: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub id: usize,
    pub position: (f64, f64),
    /// Response-time requirement K_r in s.
    pub resp_req: f64,
    /// Security requirement K_s (eSIM needed).
    pub sec_req: bool,
    /// Data-rate requirement K_x in bit/s.
    pub rate_req: f64,
    /// Battery level β in percent.
    pub battery: f64,
    pub weights: Weights,
    pub group: Option<Group>,
}

impl DeviceProfile {
    /// Raw data volume D_r produced within one period.
    pub fn raw_bits(&self, period: f64) -> f64 {
        self.rate_req * period
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BatteryRegime {
    Low,
    High,
    Mixed,
}

/// How response-time requirements are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RespRequirement {
    /// K_r uniform in `[min, max]` seconds.
    Range { min: f64, max: f64 },
    /// K_r = (fastest feasible response for the device) × U[min, max].
    Slack { min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub n_iot: usize,
    pub n_gateways: usize,
    /// eNB coverage radius in m.
    pub r_enb: f64,
    /// Wi-Fi gateway coverage radius in m.
    pub r_wifi: f64,
    pub interferers_per_gateway: usize,
    /// Interferer transmit power in W.
    pub interferer_power: f64,
    /// Probability that a device requires eSIM protection.
    pub p_sec: f64,
    /// Candidate K_x values in bit/s.
    pub rate_choices: Vec<f64>,
    pub resp_requirement: RespRequirement,
    pub regime: BatteryRegime,
    pub weights: Weights,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            n_iot: 10,
            n_gateways: 5,
            r_enb: 1000.0,
            r_wifi: 30.0,
            interferers_per_gateway: 2,
            interferer_power: 1.5e-3,
            p_sec: 0.5,
            rate_choices: (1..=10).map(|k| f64::from(k) * 5e3).collect(),
            resp_requirement: RespRequirement::Slack { min: 1.0, max: 2.0 },
            regime: BatteryRegime::Low,
            weights: Weights { resp: 3, sec: 3 },
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Scenario(m));
        if self.n_iot < 2 || !self.n_iot.is_multiple_of(2) {
            return err(format!("number of devices must be even and at least 2, got {}", self.n_iot));
        }
        if self.n_gateways == 0 {
            return err("at least one gateway is required".into());
        }
        if !(self.r_enb > 0.0 && self.r_wifi > 0.0 && self.r_wifi < self.r_enb) {
            return err(format!("radii must satisfy 0 < r_wifi < r_enb, got {} and {}", self.r_wifi, self.r_enb));
        }
        if !(self.interferer_power >= 0.0) {
            return err("interferer power must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.p_sec) {
            return err(format!("p_sec must lie in [0, 1], got {}", self.p_sec));
        }
        if self.rate_choices.is_empty() || self.rate_choices.iter().any(|&r| !(r > 0.0)) {
            return err("rate choices must be a non-empty set of positive rates".into());
        }
        let (lo, hi) = match self.resp_requirement {
            RespRequirement::Range { min, max } | RespRequirement::Slack { min, max } => (min, max),
        };
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return err(format!("response requirement range [{lo}, {hi}] is empty or non-positive"));
        }
        Ok(())
    }
}

/// A Wi-Fi gateway with its LTE backhaul and the co-channel interferers
/// around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gateway {
    pub position: (f64, f64),
    /// Shadowing on the gateway-to-eNB LTE link in dB.
    pub lte_shadowing_db: f64,
    pub interferers: Vec<Interferer>,
}

/// Per-device link shadowing in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceShadowing {
    pub wifi_db: f64,
    pub nbiot_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceLinks {
    pub serving_gateway: Option<usize>,
    pub wifi: Option<LinkSample>,
    pub nbiot: LinkSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub enb_position: (f64, f64),
    pub r_wifi: f64,
    pub gateways: Vec<Gateway>,
    /// LTE link of each gateway, same order as `gateways`.
    pub backhaul: Vec<LinkSample>,
    pub devices: Vec<DeviceProfile>,
    pub links: Vec<DeviceLinks>,
}

/// Link distance as seen by the path-loss model, which is only valid beyond
/// the reference distance.
fn model_distance(d: f64, prop: &PropagationParams) -> f64 {
    d.max(prop.reference_distance)
}

impl Topology {
    /// Assembles a topology, assigning each device to its nearest gateway
    /// when that gateway is within `r_wifi`.
    pub fn from_parts(
        r_wifi: f64,
        gateways: Vec<Gateway>,
        devices: Vec<DeviceProfile>,
        shadowing: &[DeviceShadowing],
        prop: &PropagationParams,
    ) -> Result<Self> {
        if shadowing.len() != devices.len() {
            return Err(Error::Scenario("one shadowing sample per device is required".into()));
        }
        let enb = (0.0, 0.0);
        let backhaul = gateways
            .iter()
            .map(|g| LinkSample {
                distance: model_distance(propagation::distance(g.position, enb), prop),
                shadowing_db: g.lte_shadowing_db,
                interference: 0.0,
            })
            .collect();
        let interference = gateways
            .iter()
            .map(|g| propagation::interference_power(g.position, &g.interferers, prop))
            .collect::<Result<Vec<_>>>()?;
        let links = devices
            .iter()
            .zip(shadowing)
            .map(|(dev, sh)| {
                let nearest = gateways
                    .iter()
                    .enumerate()
                    .map(|(i, g)| (i, propagation::distance(dev.position, g.position)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .filter(|&(_, d)| d <= r_wifi);
                DeviceLinks {
                    serving_gateway: nearest.map(|n| n.0),
                    wifi: nearest.map(|(i, d)| LinkSample {
                        distance: model_distance(d, prop),
                        shadowing_db: sh.wifi_db,
                        interference: interference[i],
                    }),
                    nbiot: LinkSample {
                        distance: model_distance(propagation::distance(dev.position, enb), prop),
                        shadowing_db: sh.nbiot_db,
                        interference: 0.0,
                    },
                }
            })
            .collect();
        Ok(Self { enb_position: enb, r_wifi, gateways, backhaul, devices, links })
    }

    pub fn serving_gateway(&self, device: usize) -> Option<usize> {
        self.links.get(device).and_then(|l| l.serving_gateway)
    }

    pub fn has_wifi(&self, device: usize) -> bool {
        self.serving_gateway(device).is_some()
    }

    /// The link a device's traffic takes over `link`; for LTE this is the
    /// backhaul of its serving gateway.
    pub fn link_sample(&self, device: usize, link: Link) -> Option<LinkSample> {
        let l = self.links.get(device)?;
        match link {
            Link::WiFi => l.wifi,
            Link::NbIot => Some(l.nbiot),
            Link::Lte => l.serving_gateway.map(|g| self.backhaul[g]),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn uniform_in_disc(rng: &mut impl Rng, center: (f64, f64), radius: f64) -> (f64, f64) {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    (center.0 + r * theta.cos(), center.1 + r * theta.sin())
}

fn uniform_in_annulus(rng: &mut impl Rng, center: (f64, f64), inner: f64, outer: f64) -> (f64, f64) {
    let r = (rng.random_range(inner * inner..=outer * outer)).sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    (center.0 + r * theta.cos(), center.1 + r * theta.sin())
}

struct Layout {
    gateways: Vec<(f64, f64)>,
    devices: Vec<(f64, f64)>,
    interferers: Vec<Vec<(f64, f64)>>,
}

fn layout(seed: u64, sp: &ScenarioParams) -> Layout {
    let mut rng = stream(seed, STREAM_LAYOUT);
    let gateways: Vec<_> = (0..sp.n_gateways).map(|_| uniform_in_disc(&mut rng, (0.0, 0.0), sp.r_enb)).collect();
    let devices = (0..sp.n_iot)
        .map(|_| {
            let anchor = gateways[rng.random_range(0..gateways.len())];
            loop {
                let p = uniform_in_disc(&mut rng, anchor, sp.r_wifi);
                if propagation::distance(p, (0.0, 0.0)) <= sp.r_enb {
                    break p;
                }
            }
        })
        .collect();
    let interferers = gateways
        .iter()
        .map(|&g| {
            (0..sp.interferers_per_gateway)
                .map(|_| uniform_in_annulus(&mut rng, g, sp.r_wifi, 3.0 * sp.r_wifi))
                .collect()
        })
        .collect();
    Layout { gateways, devices, interferers }
}

/// Fastest response any action can give a device with rate `rate` and
/// security need `secure`, among actions that respect capacity and security.
pub fn fastest_feasible_response(rate: f64, secure: bool, space: &ActionSpace, model: &ModelParams) -> f64 {
    let raw = rate * model.period;
    let resp = |a| timing::response_time_for(a, raw, model).total();
    let feasible = space
        .iter()
        .filter(|a| decision::capacity_ok(a, rate, &model.units) && (!secure || a.option.secure()))
        .map(resp)
        .fold(f64::INFINITY, f64::min);
    if feasible.is_finite() {
        feasible
    } else {
        space.iter().map(resp).fold(f64::INFINITY, f64::min)
    }
}

/// Draws the device population: positions, requirements, battery levels and
/// group labels. The first half of the devices form Group X.
pub fn generate_devices(seed: u64, sp: &ScenarioParams, model: &ModelParams) -> Result<Vec<DeviceProfile>> {
    sp.validate()?;
    let positions = layout(seed, sp).devices;
    let space = ActionSpace::new(model.step_pct)?;
    let mut req = stream(seed, STREAM_REQUIREMENTS);
    let mut bat = stream(seed, STREAM_BATTERY);
    let threshold = model.penalty.beta_threshold;
    let half = sp.n_iot / 2;
    positions
        .into_iter()
        .enumerate()
        .map(|(id, position)| {
            let sec_req = req.random_bool(sp.p_sec);
            let rate_req = sp.rate_choices[req.random_range(0..sp.rate_choices.len())];
            let resp_req = match sp.resp_requirement {
                RespRequirement::Range { min, max } => req.random_range(min..=max),
                RespRequirement::Slack { min, max } => {
                    fastest_feasible_response(rate_req, sec_req, &space, model) * req.random_range(min..=max)
                }
            };
            let battery = match sp.regime {
                BatteryRegime::Low => bat.random_range(0.0..threshold),
                BatteryRegime::High => bat.random_range(threshold..=100.0),
                BatteryRegime::Mixed => bat.random_range(0.0..=100.0),
            };
            Ok(DeviceProfile {
                id,
                position,
                resp_req,
                sec_req,
                rate_req,
                battery,
                weights: sp.weights,
                group: Some(if id < half { Group::X } else { Group::Y }),
            })
        })
        .collect()
}

/// Generates the full topology of one repeat.
pub fn generate_topology(seed: u64, sp: &ScenarioParams, model: &ModelParams) -> Result<Topology> {
    let devices = generate_devices(seed, sp, model)?;
    let lay = layout(seed, sp);
    let prop = &model.propagation;
    let shadow = Normal::new(0.0, prop.shadowing_std_db)
        .map_err(|e| Error::InvalidArgument(format!("shadowing: {e}")))?;
    let mut rng = stream(seed, STREAM_SHADOWING);
    let gateways = lay
        .gateways
        .iter()
        .zip(&lay.interferers)
        .map(|(&position, around)| Gateway {
            position,
            lte_shadowing_db: shadow.sample(&mut rng),
            interferers: around
                .iter()
                .map(|&p| Interferer { position: p, tx_power: sp.interferer_power, shadowing_db: shadow.sample(&mut rng) })
                .collect(),
        })
        .collect();
    let shadowing: Vec<_> = devices
        .iter()
        .map(|_| DeviceShadowing { wifi_db: shadow.sample(&mut rng), nbiot_db: shadow.sample(&mut rng) })
        .collect();
    Topology::from_parts(sp.r_wifi, gateways, devices, &shadowing, prop)
}
