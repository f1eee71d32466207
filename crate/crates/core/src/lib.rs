//! Context-aware selection of connectivity and processing location for IoT
//! devices.
//!
//! Each device chooses a connection (Wi-Fi through a gateway, or NB-IoT
//! directly to the eNB), a processing unit (device, fog gateway or cloud) and
//! the share of its raw data to offload. A tabular Q-learner per device
//! minimizes a penalty over energy, monetary cost, response time and security,
//! and campaigns compare the learned choices with six fixed assignments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod config;
pub mod decision;
pub mod energy;
pub mod error;
pub mod evaluation;
pub mod params;
pub mod propagation;
pub mod qlearning;
pub mod report;
pub mod scenario;
pub mod timing;

pub use error::{Error, Result};
