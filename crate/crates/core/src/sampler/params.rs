use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair (α, θ) with `α ∈ (0,1)` and `θ > -α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    alpha: f64,
    theta: f64,
}

impl Params {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
        }
        if !(theta > -alpha) || !theta.is_finite() {
            return Err(Error::domain(format!(
                "theta must be finite and exceed -alpha = {}, got {theta}",
                -alpha
            )));
        }
        Ok(Self { alpha, theta })
    }

    /// Like [`Params::new`] but also requires `θ > 0`.
    pub fn large_theta(alpha: f64, theta: f64) -> Result<Self> {
        let p = Self::new(alpha, theta)?;
        p.require_positive_theta()?;
        Ok(p)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn require_positive_theta(&self) -> Result<()> {
        if self.theta > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "this operation needs theta > 0, got {}",
                self.theta
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Params::new(0.5, 1.0).is_ok());
        assert!(Params::new(0.5, -0.4).is_ok());
        assert!(Params::new(0.5, -0.5).is_err());
        assert!(Params::new(0.0, 1.0).is_err());
        assert!(Params::new(1.0, 1.0).is_err());
        assert!(Params::new(0.5, f64::INFINITY).is_err());
        assert!(Params::large_theta(0.5, -0.1).is_err());
        assert!(Params::large_theta(0.5, 0.1).is_ok());
    }
}
