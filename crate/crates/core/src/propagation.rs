//! Link-level propagation: log-distance path loss with log-normal shadowing,
//! Shannon-inverted required received power, and link-margin based transmit
//! power for the three link types of the network.
//!
//! All power arithmetic is carried out in linear watts. Decibel values only
//! appear on inputs (path loss, margins, noise density) and are converted here.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent `D / (T B)` accepted before `2^x` leaves the f64 range.
const MAX_SPECTRAL_EFFICIENCY: f64 = 1000.0;

/// The three radio links of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Link {
    /// (a) device to Wi-Fi gateway. Interference limited.
    WiFi,
    /// (b) device to eNB over NB-IoT. Noise limited.
    NbIot,
    /// (c) gateway to eNB over LTE. Noise limited.
    Lte,
}

impl Link {
    pub const ALL: [Link; 3] = [Link::WiFi, Link::NbIot, Link::Lte];

    pub fn is_noise_limited(self) -> bool {
        !matches!(self, Link::WiFi)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Link::WiFi => "wifi",
            Link::NbIot => "nbiot",
            Link::Lte => "lte",
        };
        f.write_str(name)
    }
}

/// One value per link type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerLink<T> {
    pub wifi: T,
    pub nbiot: T,
    pub lte: T,
}

impl<T: Copy> PerLink<T> {
    pub fn get(&self, link: Link) -> T {
        match link {
            Link::WiFi => self.wifi,
            Link::NbIot => self.nbiot,
            Link::Lte => self.lte,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationParams {
    /// Path-loss exponent δ.
    pub path_loss_exponent: f64,
    /// Reference distance d₀ in metres.
    pub reference_distance: f64,
    /// Shadowing standard deviation σ in dB.
    pub shadowing_std_db: f64,
    pub speed_of_light: f64,
    /// Noise spectral density N₀ in W/Hz (linear).
    pub noise_density: f64,
    /// Channel bandwidth B in Hz.
    pub bandwidth: f64,
    /// Link margin per link type in dB.
    pub link_margins: PerLink<f64>,
    /// Carrier frequency per link type in Hz.
    pub carrier_freqs: PerLink<f64>,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            path_loss_exponent: 3.0,
            reference_distance: 10.0,
            shadowing_std_db: 8.0,
            speed_of_light: 3.0e8,
            noise_density: db_to_linear(-204.0),
            bandwidth: 180e3,
            link_margins: PerLink { wifi: 43.0, nbiot: 40.0, lte: 48.0 },
            carrier_freqs: PerLink { wifi: 2.4e9, nbiot: 1.7e9, lte: 1.8e9 },
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("path_loss_exponent", self.path_loss_exponent),
            ("reference_distance", self.reference_distance),
            ("speed_of_light", self.speed_of_light),
            ("noise_density", self.noise_density),
            ("bandwidth", self.bandwidth),
            ("carrier_freqs.wifi", self.carrier_freqs.wifi),
            ("carrier_freqs.nbiot", self.carrier_freqs.nbiot),
            ("carrier_freqs.lte", self.carrier_freqs.lte),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.shadowing_std_db >= 0.0) {
            return Err(Error::InvalidArgument("shadowing_std_db must be >= 0".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self, link: Link) -> f64 {
        self.speed_of_light / self.carrier_freqs.get(link)
    }

    /// Free-space loss at the reference distance, L₀, in dB.
    pub fn reference_loss_db(&self, link: Link) -> f64 {
        20.0 * (4.0 * std::f64::consts::PI * self.reference_distance / self.wavelength(link)).log10()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Log-distance path loss in dB.
pub fn path_loss(distance: f64, link: Link, shadowing_db: f64, params: &PropagationParams) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::NonPositiveDistance(distance));
    }
    let l0 = params.reference_loss_db(link);
    Ok(l0 + 10.0 * params.path_loss_exponent * (distance / params.reference_distance).log10() + shadowing_db)
}

/// Received power needed to push `data_bits` through the channel within
/// `period` seconds, inverting the Shannon capacity.
pub fn required_rx_power(
    data_bits: f64,
    period: f64,
    bandwidth: f64,
    interference: f64,
    noise_density: f64,
) -> Result<f64> {
    if !(period > 0.0) || !(bandwidth > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "period and bandwidth must be positive (period={period}, bandwidth={bandwidth})"
        )));
    }
    if !(data_bits >= 0.0) {
        return Err(Error::InvalidArgument(format!("data volume must be >= 0, got {data_bits}")));
    }
    let efficiency = data_bits / (period * bandwidth);
    if !efficiency.is_finite() || efficiency > MAX_SPECTRAL_EFFICIENCY {
        return Err(Error::ExponentOverflow(efficiency));
    }
    // exp_m1 keeps precision for the small efficiencies of compressed payloads
    let snr = (efficiency * std::f64::consts::LN_2).exp_m1();
    Ok(snr * (interference + noise_density * bandwidth))
}

/// Transmit power that delivers `rx_power` across `path_loss_db` plus the
/// link margin.
pub fn required_tx_power(rx_power: f64, path_loss_db: f64, margin_db: f64) -> f64 {
    rx_power * db_to_linear(path_loss_db + margin_db)
}

/// A co-channel Wi-Fi transmitter near a serving gateway.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interferer {
    pub position: (f64, f64),
    pub tx_power: f64,
    /// Shadowing on the interferer-to-gateway path, in dB.
    pub shadowing_db: f64,
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Aggregate co-channel interference received at a Wi-Fi gateway.
pub fn interference_power(receiver: (f64, f64), interferers: &[Interferer], params: &PropagationParams) -> Result<f64> {
    interferers.iter().try_fold(0.0, |acc, i| {
        let loss = path_loss(distance(receiver, i.position), Link::WiFi, i.shadowing_db, params)?;
        Ok(acc + i.tx_power * db_to_linear(-loss))
    })
}

/// Geometry of one link for one simulation repeat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSample {
    pub distance: f64,
    pub shadowing_db: f64,
    /// Interference at the receiver in W. Ignored for noise-limited links.
    pub interference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub link: Link,
    pub distance: f64,
    pub shadowing_db: f64,
    pub path_loss_db: f64,
    pub interference_power: f64,
    pub required_rx_power: f64,
    pub required_tx_power: f64,
}

/// Full budget for carrying `data_bits` over `link` within `period`.
pub fn link_budget(
    link: Link,
    sample: &LinkSample,
    data_bits: f64,
    period: f64,
    params: &PropagationParams,
) -> Result<LinkBudget> {
    let loss = path_loss(sample.distance, link, sample.shadowing_db, params)?;
    let interference = if link.is_noise_limited() { 0.0 } else { sample.interference };
    let rx = required_rx_power(data_bits, period, params.bandwidth, interference, params.noise_density)?;
    let tx = required_tx_power(rx, loss, params.link_margins.get(link));
    Ok(LinkBudget {
        link,
        distance: sample.distance,
        shadowing_db: sample.shadowing_db,
        path_loss_db: loss,
        interference_power: interference,
        required_rx_power: rx,
        required_tx_power: tx,
    })
}
