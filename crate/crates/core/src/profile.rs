use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Flooding statistics that parameterize the flood cost equations.
///
/// `d_f[0]` holds the expected forward degree of a node one hop from the
/// source, `d_f[1]` two hops away, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkProfile {
    /// Broadcast (stochastic forwarding) probability.
    pub p_broadcast: f64,
    /// Mean node degree.
    pub d_avg: f64,
    /// Expected forward degree per hop, starting at hop 1.
    pub d_f: Vec<f64>,
}

impl NetworkProfile {
    pub fn new(p_broadcast: f64, d_avg: f64, d_f: Vec<f64>) -> Result<Self, ModelError> {
        let profile = Self { p_broadcast, d_avg, d_f };
        profile.validate()?;
        Ok(profile)
    }

    /// A profile where every hop has the same forward degree.
    pub fn uniform(p_broadcast: f64, d_avg: f64, d_f: f64, hops: usize) -> Result<Self, ModelError> {
        Self::new(p_broadcast, d_avg, vec![d_f; hops])
    }

    pub fn with_p(&self, p_broadcast: f64) -> Result<Self, ModelError> {
        Self::new(p_broadcast, self.d_avg, self.d_f.clone())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.p_broadcast) {
            return Err(ModelError::InvalidProfile(format!(
                "p_broadcast {} outside [0, 1]",
                self.p_broadcast
            )));
        }
        if !(self.d_avg >= 0.0 && self.d_avg.is_finite()) {
            return Err(ModelError::InvalidProfile(format!("d_avg {} must be >= 0", self.d_avg)));
        }
        if let Some(bad) = self.d_f.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
            return Err(ModelError::InvalidProfile(format!("forward degree {bad} must be >= 0")));
        }
        Ok(())
    }
}
