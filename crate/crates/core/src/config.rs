//! Campaign configuration: a flat JSON document of named physical and
//! learning parameters plus `experiment` and `output` sections. Every key is
//! optional and unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::energy::{ProcessingUnitSpec, Unit, UnitTable};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::propagation::{self, PerLink, PropagationParams};
use crate::qlearning::{Hyperparams, PenaltyConfig};
use crate::scenario::{BatteryRegime, RespRequirement, ScenarioParams, Weights};
use crate::timing::TimingParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub regime: BatteryRegime,
    pub w_r: u32,
    pub w_s: u32,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { regime: BatteryRegime::Low, w_r: 3, w_s: 3, repeats: 25, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { out_dir: PathBuf::from("results"), format: OutputFormat::Csv }
    }
}

/// Named experiment variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Low battery, requirement aware.
    Lbra,
    /// Low battery, requirement unaware.
    Lbru,
    /// High battery, requirement aware.
    Hbra,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Lbra => "lbra",
            Preset::Lbru => "lbru",
            Preset::Hbra => "hbra",
        }
    }

    pub fn apply(self, exp: &mut ExperimentConfig) {
        let (regime, w) = match self {
            Preset::Lbra => (BatteryRegime::Low, 3),
            Preset::Lbru => (BatteryRegime::Low, 0),
            Preset::Hbra => (BatteryRegime::High, 3),
        };
        exp.regime = regime;
        exp.w_r = w;
        exp.w_s = w;
    }
}

/// The configuration document as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    // communication
    pub path_loss_exponent: f64,
    pub reference_distance_m: f64,
    pub shadowing_std_db: f64,
    pub speed_of_light: f64,
    pub carrier_freq_wifi_hz: f64,
    pub carrier_freq_nbiot_hz: f64,
    pub carrier_freq_lte_hz: f64,
    pub noise_density_dbw_hz: f64,
    /// Defaults to 1 / num_iot_devices when absent.
    pub time_period_s: Option<f64>,
    pub bandwidth_hz: f64,
    pub retransmission_factor: f64,
    pub enb_radius_m: f64,
    pub wifi_radius_m: f64,
    pub link_margin_wifi_db: f64,
    pub link_margin_nbiot_db: f64,
    pub link_margin_lte_db: f64,
    pub link_rate_wifi_bps: f64,
    pub link_rate_nbiot_bps: f64,
    pub link_rate_lte_bps: f64,
    pub num_gateways: usize,
    pub interferers_per_gateway: usize,
    pub interferer_power_w: f64,

    // general
    pub num_iot_devices: usize,
    pub energy_per_cycle_j: f64,
    pub bits_per_data_element: f64,
    pub device_capacity_bps: f64,
    pub fog_capacity_bps: f64,
    pub cloud_capacity_bps: f64,
    pub device_cycles_per_de: f64,
    pub fog_cycles_per_de: f64,
    pub cloud_cycles_per_de: f64,
    pub device_cost_per_bps: f64,
    pub fog_cost_per_bps: f64,
    pub cloud_cost_per_bps: f64,
    pub compression_rate: f64,
    pub battery_threshold_pct: f64,
    pub include_remote_processing: bool,
    pub security_probability: f64,
    pub rate_choices_bps: Vec<f64>,
    pub resp_requirement: RespRequirement,

    // learning
    pub alpha: f64,
    pub discount: f64,
    pub explore: f64,
    pub explore_decay: bool,
    pub episodes: usize,
    pub iterations: usize,
    pub offload_step_pct: u32,
    pub global_penalty_factor: f64,
    pub capacity_penalty_exponent: u32,
    pub energy_weight_high: f64,
    pub energy_weight_low: f64,
    pub monetary_weight_high: f64,
    pub monetary_weight_low: f64,

    pub experiment: ExperimentConfig,
    pub output: OutputConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let prop = PropagationParams::default();
        let units = UnitTable::default();
        let timing = TimingParams::default();
        let pen = PenaltyConfig::default();
        let hp = Hyperparams::default();
        let sc = ScenarioParams::default();
        Self {
            path_loss_exponent: prop.path_loss_exponent,
            reference_distance_m: prop.reference_distance,
            shadowing_std_db: prop.shadowing_std_db,
            speed_of_light: prop.speed_of_light,
            carrier_freq_wifi_hz: prop.carrier_freqs.wifi,
            carrier_freq_nbiot_hz: prop.carrier_freqs.nbiot,
            carrier_freq_lte_hz: prop.carrier_freqs.lte,
            noise_density_dbw_hz: -204.0,
            time_period_s: None,
            bandwidth_hz: prop.bandwidth,
            retransmission_factor: timing.retx_factor,
            enb_radius_m: sc.r_enb,
            wifi_radius_m: sc.r_wifi,
            link_margin_wifi_db: prop.link_margins.wifi,
            link_margin_nbiot_db: prop.link_margins.nbiot,
            link_margin_lte_db: prop.link_margins.lte,
            link_rate_wifi_bps: timing.link_rate.wifi,
            link_rate_nbiot_bps: timing.link_rate.nbiot,
            link_rate_lte_bps: timing.link_rate.lte,
            num_gateways: sc.n_gateways,
            interferers_per_gateway: sc.interferers_per_gateway,
            interferer_power_w: sc.interferer_power,
            num_iot_devices: sc.n_iot,
            energy_per_cycle_j: units.device.energy_per_cycle,
            bits_per_data_element: units.device.bits_per_de,
            device_capacity_bps: units.device.capacity,
            fog_capacity_bps: units.fog.capacity,
            cloud_capacity_bps: units.cloud.capacity,
            device_cycles_per_de: units.device.cycles_per_de,
            fog_cycles_per_de: units.fog.cycles_per_de,
            cloud_cycles_per_de: units.cloud.cycles_per_de,
            device_cost_per_bps: units.device.cost_per_bps,
            fog_cost_per_bps: units.fog.cost_per_bps,
            cloud_cost_per_bps: units.cloud.cost_per_bps,
            compression_rate: timing.compression,
            battery_threshold_pct: pen.beta_threshold,
            include_remote_processing: ModelParams::default().include_remote_processing,
            security_probability: sc.p_sec,
            rate_choices_bps: sc.rate_choices,
            resp_requirement: sc.resp_requirement,
            alpha: hp.alpha,
            discount: hp.discount,
            explore: hp.explore,
            explore_decay: hp.explore_decay,
            episodes: hp.episodes,
            iterations: hp.iterations,
            offload_step_pct: ModelParams::default().step_pct,
            global_penalty_factor: pen.omega,
            capacity_penalty_exponent: pen.w_c,
            energy_weight_high: pen.w_e_high,
            energy_weight_low: pen.w_e_low,
            monetary_weight_high: pen.w_m_high,
            monetary_weight_low: pen.w_m_low,
            experiment: ExperimentConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Everything a campaign needs, resolved from a [`CampaignConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub model: ModelParams,
    pub scenario: ScenarioParams,
    pub hyper: Hyperparams,
}

fn range(field: &'static str, ok: bool, reason: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ConfigRange { field, reason: reason.into() })
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    range(field, v > 0.0 && v.is_finite(), format!("must be positive, got {v}"))
}

impl CampaignConfig {
    /// Parses a JSON document. An empty or whitespace-only document yields
    /// the defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn time_period(&self) -> f64 {
        self.time_period_s.unwrap_or(1.0 / self.num_iot_devices.max(1) as f64)
    }

    /// Checks ranges and builds the model, scenario and learning parameters.
    pub fn resolve(&self) -> Result<Resolved> {
        let positives = [
            ("path_loss_exponent", self.path_loss_exponent),
            ("reference_distance_m", self.reference_distance_m),
            ("speed_of_light", self.speed_of_light),
            ("carrier_freq_wifi_hz", self.carrier_freq_wifi_hz),
            ("carrier_freq_nbiot_hz", self.carrier_freq_nbiot_hz),
            ("carrier_freq_lte_hz", self.carrier_freq_lte_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("enb_radius_m", self.enb_radius_m),
            ("wifi_radius_m", self.wifi_radius_m),
            ("link_rate_wifi_bps", self.link_rate_wifi_bps),
            ("link_rate_nbiot_bps", self.link_rate_nbiot_bps),
            ("link_rate_lte_bps", self.link_rate_lte_bps),
            ("energy_per_cycle_j", self.energy_per_cycle_j),
            ("bits_per_data_element", self.bits_per_data_element),
            ("device_capacity_bps", self.device_capacity_bps),
            ("fog_capacity_bps", self.fog_capacity_bps),
            ("cloud_capacity_bps", self.cloud_capacity_bps),
            ("device_cycles_per_de", self.device_cycles_per_de),
            ("fog_cycles_per_de", self.fog_cycles_per_de),
            ("cloud_cycles_per_de", self.cloud_cycles_per_de),
            ("time_period_s", self.time_period()),
        ];
        for (field, v) in positives {
            positive(field, v)?;
        }
        range("noise_density_dbw_hz", self.noise_density_dbw_hz.is_finite(), "must be finite")?;
        range("shadowing_std_db", self.shadowing_std_db >= 0.0, "must be >= 0")?;
        range("retransmission_factor", self.retransmission_factor > 1.0, "must exceed 1")?;
        range("compression_rate", self.compression_rate > 1.0, "must exceed 1")?;
        range("wifi_radius_m", self.wifi_radius_m < self.enb_radius_m, "must be below enb_radius_m")?;
        range("num_gateways", self.num_gateways >= 1, "need at least one gateway")?;
        range("interferer_power_w", self.interferer_power_w >= 0.0, "must be >= 0")?;
        range(
            "num_iot_devices",
            self.num_iot_devices >= 2 && self.num_iot_devices.is_multiple_of(2),
            "must be even and at least 2",
        )?;
        range(
            "cloud_cycles_per_de",
            self.cloud_cycles_per_de < self.fog_cycles_per_de && self.fog_cycles_per_de < self.device_cycles_per_de,
            "cycles per data element must satisfy cloud < fog < device",
        )?;
        for (field, v) in [
            ("device_cost_per_bps", self.device_cost_per_bps),
            ("fog_cost_per_bps", self.fog_cost_per_bps),
            ("cloud_cost_per_bps", self.cloud_cost_per_bps),
            ("energy_weight_high", self.energy_weight_high),
            ("energy_weight_low", self.energy_weight_low),
            ("monetary_weight_high", self.monetary_weight_high),
            ("monetary_weight_low", self.monetary_weight_low),
        ] {
            range(field, v >= 0.0, format!("must be >= 0, got {v}"))?;
        }
        range("battery_threshold_pct", (0.0..=100.0).contains(&self.battery_threshold_pct), "must lie in [0, 100]")?;
        range("security_probability", (0.0..=1.0).contains(&self.security_probability), "must lie in [0, 1]")?;
        range(
            "rate_choices_bps",
            !self.rate_choices_bps.is_empty() && self.rate_choices_bps.iter().all(|&r| r > 0.0),
            "must be a non-empty list of positive rates",
        )?;
        let (lo, hi) = match self.resp_requirement {
            RespRequirement::Range { min, max } | RespRequirement::Slack { min, max } => (min, max),
        };
        range("resp_requirement", lo > 0.0 && lo <= hi && hi.is_finite(), format!("[{lo}, {hi}] is not a valid range"))?;
        range("alpha", self.alpha > 0.0 && self.alpha <= 1.0, format!("must lie in (0, 1], got {}", self.alpha))?;
        range("discount", (0.0..1.0).contains(&self.discount), format!("must lie in [0, 1), got {}", self.discount))?;
        range("explore", (0.0..=1.0).contains(&self.explore), format!("must lie in [0, 1], got {}", self.explore))?;
        range("episodes", self.episodes >= 1, "must be at least 1")?;
        range("iterations", self.iterations >= 1, "must be at least 1")?;
        range(
            "offload_step_pct",
            self.offload_step_pct > 0 && self.offload_step_pct <= 100 && 100 % self.offload_step_pct == 0,
            "must divide 100",
        )?;
        range("global_penalty_factor", self.global_penalty_factor > 1.0, "must exceed 1")?;
        let exp = &self.experiment;
        range(
            "capacity_penalty_exponent",
            self.capacity_penalty_exponent > exp.w_r.max(exp.w_s),
            "must exceed max(w_r, w_s)",
        )?;
        range("experiment.repeats", exp.repeats >= 1, "must be at least 1")?;

        let unit = |unit, cycles, capacity, cost| ProcessingUnitSpec {
            unit,
            cycles_per_de: cycles,
            capacity,
            cost_per_bps: cost,
            energy_per_cycle: self.energy_per_cycle_j,
            bits_per_de: self.bits_per_data_element,
        };
        let model = ModelParams {
            propagation: PropagationParams {
                path_loss_exponent: self.path_loss_exponent,
                reference_distance: self.reference_distance_m,
                shadowing_std_db: self.shadowing_std_db,
                speed_of_light: self.speed_of_light,
                noise_density: propagation::db_to_linear(self.noise_density_dbw_hz),
                bandwidth: self.bandwidth_hz,
                link_margins: PerLink {
                    wifi: self.link_margin_wifi_db,
                    nbiot: self.link_margin_nbiot_db,
                    lte: self.link_margin_lte_db,
                },
                carrier_freqs: PerLink {
                    wifi: self.carrier_freq_wifi_hz,
                    nbiot: self.carrier_freq_nbiot_hz,
                    lte: self.carrier_freq_lte_hz,
                },
            },
            units: UnitTable {
                device: unit(Unit::Device, self.device_cycles_per_de, self.device_capacity_bps, self.device_cost_per_bps),
                fog: unit(Unit::Fog, self.fog_cycles_per_de, self.fog_capacity_bps, self.fog_cost_per_bps),
                cloud: unit(Unit::Cloud, self.cloud_cycles_per_de, self.cloud_capacity_bps, self.cloud_cost_per_bps),
            },
            timing: TimingParams {
                retx_factor: self.retransmission_factor,
                compression: self.compression_rate,
                link_rate: PerLink {
                    wifi: self.link_rate_wifi_bps,
                    nbiot: self.link_rate_nbiot_bps,
                    lte: self.link_rate_lte_bps,
                },
            },
            period: self.time_period(),
            include_remote_processing: self.include_remote_processing,
            penalty: PenaltyConfig {
                omega: self.global_penalty_factor,
                w_c: self.capacity_penalty_exponent,
                w_e_high: self.energy_weight_high,
                w_e_low: self.energy_weight_low,
                w_m_high: self.monetary_weight_high,
                w_m_low: self.monetary_weight_low,
                beta_threshold: self.battery_threshold_pct,
            },
            step_pct: self.offload_step_pct,
        };
        let scenario = ScenarioParams {
            n_iot: self.num_iot_devices,
            n_gateways: self.num_gateways,
            r_enb: self.enb_radius_m,
            r_wifi: self.wifi_radius_m,
            interferers_per_gateway: self.interferers_per_gateway,
            interferer_power: self.interferer_power_w,
            p_sec: self.security_probability,
            rate_choices: self.rate_choices_bps.clone(),
            resp_requirement: self.resp_requirement.clone(),
            regime: exp.regime,
            weights: Weights { resp: exp.w_r, sec: exp.w_s },
        };
        let hyper = Hyperparams {
            alpha: self.alpha,
            discount: self.discount,
            explore: self.explore,
            explore_decay: self.explore_decay,
            episodes: self.episodes,
            iterations: self.iterations,
            seed: exp.seed,
        };
        model.validate()?;
        scenario.validate()?;
        Ok(Resolved { model, scenario, hyper })
    }
}
