//! The bundle of physical and penalty parameters every model function reads.

use crate::energy::UnitTable;
use crate::error::Result;
use crate::propagation::PropagationParams;
use crate::qlearning::PenaltyConfig;
use crate::timing::TimingParams;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub propagation: PropagationParams,
    pub units: UnitTable,
    pub timing: TimingParams,
    /// Time period T in s.
    pub period: f64,
    /// Count fog and cloud processing energy toward the device's total.
    pub include_remote_processing: bool,
    pub penalty: PenaltyConfig,
    /// Offload resolution τ in percent.
    pub step_pct: u32,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            propagation: PropagationParams::default(),
            units: UnitTable::default(),
            timing: TimingParams::default(),
            period: 0.1,
            include_remote_processing: true,
            penalty: PenaltyConfig::default(),
            step_pct: 5,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        self.propagation.validate()?;
        self.units.validate()?;
        self.timing.validate()?;
        self.penalty.validate()?;
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(crate::error::Error::InvalidArgument(format!("period must be positive, got {}", self.period)));
        }
        Ok(())
    }
}
