//! Physical parameters, probe drive and the named presets.

use std::fmt;
use std::str::FromStr;

use crate::{effective, Error, Result};

/// Rates and detunings of the emitter + two-cavity system, in units of `g`.
///
/// Detunings are measured from the emitter transition, i.e. the Hamiltonian
/// lives in the frame rotating at the emitter frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Emitter to lossy-mode coupling.
    pub g: f64,
    /// Inter-cavity coupling.
    pub j: f64,
    /// Lossy-mode detuning `omega1 - omega_e`.
    pub delta1: f64,
    /// Auxiliary-mode detuning `omega2 - omega_e`.
    pub delta2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma: f64,
    /// Highest Fock number kept for `a1`.
    pub n1_cutoff: usize,
    /// Highest Fock number kept for `a2`.
    pub n2_cutoff: usize,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("g", self.g),
            ("J", self.j),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma", self.gamma),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [("kappa1", self.kappa1), ("kappa2", self.kappa2), ("gamma", self.gamma)] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.n1_cutoff == 0 || self.n2_cutoff == 0 {
            return Err(Error::InvalidParameter(format!(
                "Fock cutoffs must be >= 1, got ({}, {})",
                self.n1_cutoff, self.n2_cutoff
            )));
        }
        Ok(())
    }

    /// Dimension of the truncated composite space, `2 (n1+1) (n2+1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n1_cutoff + 1) * (self.n2_cutoff + 1)
    }

    pub fn with_cutoffs(mut self, n1: usize, n2: usize) -> Self {
        self.n1_cutoff = n1;
        self.n2_cutoff = n2;
        self
    }

    pub fn with_delta2(mut self, delta2: f64) -> Self {
        self.delta2 = delta2;
        self
    }

    /// Same system with `delta2` placed on the effective resonance.
    pub fn at_resonance(self) -> Result<Self> {
        Ok(self.with_delta2(effective::resonance_delta2(&self)?))
    }

    /// Multiply every rate and detuning by `lambda`.
    pub fn scaled(mut self, lambda: f64) -> Self {
        self.g *= lambda;
        self.j *= lambda;
        self.delta1 *= lambda;
        self.delta2 *= lambda;
        self.kappa1 *= lambda;
        self.kappa2 *= lambda;
        self.gamma *= lambda;
        self
    }
}

/// Weak coherent probe, injected into the auxiliary mode `a2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeDrive {
    /// Drive strength `eps`; zero means undriven.
    pub amplitude: f64,
    /// Probe detuning from the emitter, `omega - omega_e`.
    pub detuning_e: f64,
}

impl ProbeDrive {
    pub const OFF: ProbeDrive = ProbeDrive { amplitude: 0.0, detuning_e: 0.0 };

    pub fn new(amplitude: f64, detuning_e: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() || !detuning_e.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "probe amplitude must be finite and >= 0, detuning finite; got ({amplitude}, {detuning_e})"
            )));
        }
        Ok(Self { amplitude, detuning_e })
    }

    pub fn is_off(&self) -> bool {
        self.amplitude == 0.0
    }
}

impl Default for ProbeDrive {
    fn default() -> Self {
        Self::OFF
    }
}

/// Named parameter sets.
///
/// `SetA` is the deep-dissipative reference point
/// (`kappa1 = 100`, `delta1 / kappa1 = 10`, `J = 5`, `kappa2 = gamma = 1e-3`);
/// `SetB` is the same with `kappa1 = 10`, `delta1 = 100`, used for the
/// two-photon and blockade studies. Both place `delta2`
/// on the effective resonance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    SetA,
    SetB,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::SetA, Preset::SetB];

    pub fn name(self) -> &'static str {
        match self {
            Preset::SetA => "setA",
            Preset::SetB => "setB",
        }
    }

    pub fn params(self) -> SystemParams {
        let (kappa1, delta1) = match self {
            Preset::SetA => (100.0, 1000.0),
            Preset::SetB => (10.0, 100.0),
        };
        let base = SystemParams {
            g: 1.0,
            j: 5.0,
            delta1,
            delta2: 0.0,
            kappa1,
            kappa2: 1e-3,
            gamma: 1e-3,
            n1_cutoff: 2,
            n2_cutoff: 2,
        };
        base.at_resonance().expect("presets have kappa1 > 0")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "setA" | "seta" | "A" => Ok(Preset::SetA),
            "setB" | "setb" | "B" => Ok(Preset::SetB),
            other => Err(Error::InvalidParameter(format!(
                "unknown preset {other:?} (expected setA or setB)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_resonant() {
        for preset in Preset::ALL {
            let p = preset.params();
            p.validate().unwrap();
            let eff = effective::effective_params(&p).unwrap();
            assert!(eff.delta_eff.abs() < 1e-15, "{preset}: {}", eff.delta_eff);
        }
        assert!((Preset::SetA.params().delta2 - 2.39401e-2).abs() < 1e-7);
    }

    #[test]
    fn rejects_negative_rates_and_zero_cutoffs() {
        let p = Preset::SetA.params();
        assert!(SystemParams { kappa2: -1.0, ..p }.validate().is_err());
        assert!(p.with_cutoffs(0, 2).validate().is_err());
        assert!(SystemParams { g: f64::NAN, ..p }.validate().is_err());
    }

    #[test]
    fn probe_rejects_negative_amplitude() {
        assert!(ProbeDrive::new(-1e-3, 0.0).is_err());
        assert!(ProbeDrive::new(1e-3, 0.1).is_ok());
        assert!(ProbeDrive::OFF.is_off());
    }

    #[test]
    fn preset_names_round_trip() {
        for preset in Preset::ALL {
            assert_eq!(preset.name().parse::<Preset>().unwrap(), preset);
        }
        assert!("setC".parse::<Preset>().is_err());
    }
}
