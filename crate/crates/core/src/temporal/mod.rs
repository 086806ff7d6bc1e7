//! Temporal-mode treatment of mode-mismatch in a single inner-loop pass.
//!
//! Every photon carries a time bin and a small shift `Δ` of its wave-packet centre. A loop
//! that is `δ` too long adds `δ` to every amplitude that enters it; source jitter adds a random
//! `ε_i` to every photon born in bin `i`. Photons in the same bin overlap by
//! `exp(-(Δ' - Δ)^2 / 4c^2)`; photons in different bins do not overlap at all.
//!
//! Shifts, widths and bin separations share one unit. The defaults measure everything in
//! units of the wave-packet width (`c = 1`, `τ = 100`).

mod evolve;
mod fidelity;
mod state;

pub use evolve::{apply_jitter, evolve_pulse_train, Jittered};
pub use fidelity::{
    expected_fidelity_mc, expected_fidelity_with, fidelity_expansion, fidelity_permanent,
    FidelityStats, FidelityTrials, DEFAULT_FIDELITY_TRIALS,
};
pub use state::{Configuration, PhotonLabel, Region, TemporalState};

use crate::error::{Error, Result};

/// Gaussian wave packet `ψ(x) = (c √π)^{-1/2} exp(-x^2 / 2c^2)`; its standard deviation is `c/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacket {
    c: f64,
}

impl WavePacket {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wave-packet width c = {c}"
            )));
        }
        Ok(Self { c })
    }

    pub fn width(&self) -> f64 {
        self.c
    }

    pub fn amplitude(&self, x: f64) -> f64 {
        (self.c * std::f64::consts::PI.sqrt()).powf(-0.5) * (-x * x / (2.0 * self.c * self.c)).exp()
    }

    pub fn std_dev(&self) -> f64 {
        self.c / std::f64::consts::SQRT_2
    }
}

/// Overlap of two same-bin wave packets shifted by `d1` and `d2`: `exp(-(d1 - d2)^2 / 4c^2)`.
pub fn gaussian_overlap(d1: f64, d2: f64, c: f64) -> f64 {
    let d = d1 - d2;
    (-d * d / (4.0 * c * c)).exp()
}

/// Loop-length error, source jitter, packet width and bin separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchParams {
    delta: f64,
    sigma: f64,
    c: f64,
    tau: f64,
}

impl MismatchParams {
    pub fn new(delta: f64, sigma: f64, c: f64, tau: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("jitter sigma = {sigma}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wave-packet width c = {c}"
            )));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bin separation tau = {tau}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "loop error delta = {delta}"
            )));
        }
        let params = Self {
            delta,
            sigma,
            c,
            tau,
        };
        if delta.abs() >= params.bin_confusion_bound() {
            return Err(Error::BinConfusion {
                shift: delta,
                bound: params.bin_confusion_bound(),
            });
        }
        Ok(params)
    }

    /// `δ` and `σ` in units of `c = 1`, with `τ = 100`.
    pub fn in_width_units(delta: f64, sigma: f64) -> Result<Self> {
        Self::new(delta, sigma, 1.0, 100.0)
    }

    pub fn ideal() -> Self {
        Self {
            delta: 0.0,
            sigma: 0.0,
            c: 1.0,
            tau: 100.0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Largest magnitude a shift may reach before it could be mistaken for a neighbouring bin.
    pub fn bin_confusion_bound(&self) -> f64 {
        self.tau / 10.0
    }

    /// Same packet and bins, no loop error and no jitter.
    pub fn without_mismatch(&self) -> Self {
        Self {
            delta: 0.0,
            sigma: 0.0,
            ..*self
        }
    }

    pub(crate) fn check_shift(&self, shift: f64) -> Result<()> {
        let bound = self.bin_confusion_bound();
        if shift.abs() < bound {
            Ok(())
        } else {
            Err(Error::BinConfusion { shift, bound })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_basics() {
        assert_eq!(gaussian_overlap(0.3, 0.3, 1.0), 1.0);
        assert!((gaussian_overlap(0.0, 2.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((gaussian_overlap(1.5, -0.5, 1.0) - 0.36787944117144233).abs() < 1e-15);
        assert_eq!(
            gaussian_overlap(0.2, 1.1, 0.7),
            gaussian_overlap(1.1, 0.2, 0.7)
        );
    }

    #[test]
    fn params_validation() {
        assert!(MismatchParams::new(0.1, -1.0, 1.0, 100.0).is_err());
        assert!(MismatchParams::new(0.1, 0.0, 0.0, 100.0).is_err());
        assert!(MismatchParams::new(0.1, 0.0, 1.0, -1.0).is_err());
        assert!(matches!(
            MismatchParams::new(10.0, 0.0, 1.0, 100.0),
            Err(Error::BinConfusion { .. })
        ));
        let p = MismatchParams::in_width_units(-0.4, 0.2).unwrap();
        assert_eq!(p.bin_confusion_bound(), 10.0);
        assert_eq!(p.without_mismatch().delta(), 0.0);
        assert!(WavePacket::new(0.0).is_err());
        assert!((WavePacket::new(2.0).unwrap().std_dev() - 2.0f64.sqrt()).abs() < 1e-15);
    }
}
