//! Conversion between natural units (ħ = m = ω = k_B = 1) and physical ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BOLTZMANN_SI: f64 = 1.380_649e-23;
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Mass, angular frequency, ħ, temperature and k_B in one consistent
/// system (SI by default for the constants).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
    pub temperature: f64,
    pub k_b: f64,
}

impl PhysicalUnits {
    pub fn new(mass: f64, omega: f64, temperature: f64) -> Result<Self> {
        Self {
            mass,
            omega,
            hbar: HBAR_SI,
            temperature,
            k_b: BOLTZMANN_SI,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        for (name, v) in [
            ("mass", self.mass),
            ("omega", self.omega),
            ("hbar", self.hbar),
            ("temperature", self.temperature),
            ("k_b", self.k_b),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} = {v} must be positive")));
            }
        }
        Ok(self)
    }

    /// θ = ħω / k_B T.
    pub fn theta(&self) -> f64 {
        self.energy_scale() / (self.k_b * self.temperature)
    }

    /// ħω.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.omega
    }

    /// Oscillator length √(ħ/(mω)), the unit of q.
    pub fn length_scale(&self) -> f64 {
        (self.hbar / (self.mass * self.omega)).sqrt()
    }

    /// ħω per oscillator length, the unit of force on the barrier.
    pub fn force_scale(&self) -> f64 {
        self.energy_scale() / self.length_scale()
    }

    /// Barrier position in length units from x0 = q0 √(2mω/ħ).
    pub fn position_from_x0(&self, x0: f64) -> f64 {
        x0 * self.length_scale() / std::f64::consts::SQRT_2
    }

    /// Delta strength α from g = α √(m/(ħ³ω)).
    pub fn alpha_from_g(&self, g: f64) -> f64 {
        g * (self.hbar.powi(3) * self.omega / self.mass).sqrt()
    }

    /// Entropy in J/K (or the chosen system) from k_B units.
    pub fn entropy(&self, s: f64) -> f64 {
        s * self.k_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_system_is_consistent() {
        let u = PhysicalUnits {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
            temperature: 0.5,
            k_b: 1.0,
        };
        assert_eq!(u.theta(), 2.0);
        assert_eq!(u.length_scale(), 1.0);
        assert!((u.position_from_x0(2f64.sqrt()) - 1.0).abs() < 1e-15);
        assert!(PhysicalUnits::new(-1.0, 1.0, 1.0).is_err());
        let si = PhysicalUnits::new(1e-26, 1e6, 1e-3).unwrap();
        assert!((si.theta() - HBAR_SI * 1e6 / (BOLTZMANN_SI * 1e-3)).abs() < 1e-12);
    }
}
