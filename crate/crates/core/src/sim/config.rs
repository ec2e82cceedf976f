use serde::{Deserialize, Serialize};

use super::kit::DrumKitLayout;
use crate::drum::DrumId;
use crate::error::{Error, Result};

/// Parameters of the PD-driven point-stick simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Configuration dimension (two stick tips × xyz).
    pub n: usize,
    pub kp: Vec<f64>,
    pub kd: Vec<f64>,
    /// Action scale: targets are `beta * a + q0`.
    pub beta: f64,
    pub q0: Vec<f64>,
    pub sim_dt: f64,
    pub control_fps: u32,
    /// Minimum downward tip speed (m/s) for a surface crossing to count.
    pub v_strike_min: f64,
    /// Frames a drum stays silent after a strike.
    pub refractory: usize,
    /// Per-coordinate `[lo, hi]` workspace limits.
    pub bounds: Vec<[f64; 2]>,
    /// Frames simulated past a segment's last contact.
    pub tail_padding: usize,
}

const DEFAULT_HOVER: f64 = 0.15;

/// Sticks 0.15 m above the hi-hat/snare midpoint, 8 cm apart laterally.
pub fn default_q0(kit: &DrumKitLayout) -> Vec<f64> {
    let hh = kit.drum(DrumId::HI_HAT).center;
    let sn = kit.drum(DrumId::SNARE).center;
    let mid = [
        (hh[0] + sn[0]) / 2.0,
        (hh[1] + sn[1]) / 2.0,
        (hh[2] + sn[2]) / 2.0 + DEFAULT_HOVER,
    ];
    vec![mid[0], mid[1] + 0.04, mid[2], mid[0], mid[1] - 0.04, mid[2]]
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 6,
            kp: vec![100.0; 6],
            kd: vec![20.0; 6],
            beta: 0.5,
            q0: default_q0(&DrumKitLayout::default()),
            sim_dt: 1.0 / 200.0,
            control_fps: 50,
            v_strike_min: 0.2,
            refractory: 2,
            bounds: vec![
                [0.0, 1.0],
                [-0.7, 0.7],
                [0.4, 1.4],
                [0.0, 1.0],
                [-0.7, 0.7],
                [0.4, 1.4],
            ],
            tail_padding: 10,
        }
    }
}

impl SimConfig {
    /// Integration substeps per control frame.
    pub fn substeps(&self) -> usize {
        (1.0 / (self.sim_dt * f64::from(self.control_fps))).round() as usize
    }

    pub fn frame_dt(&self) -> f64 {
        1.0 / f64::from(self.control_fps)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for (name, len) in [
            ("kp", self.kp.len()),
            ("kd", self.kd.len()),
            ("q0", self.q0.len()),
            ("bounds", self.bounds.len()),
        ] {
            if len != n {
                return Err(Error::Config(format!(
                    "{name} has {len} entries, expected n = {n}"
                )));
            }
        }
        if n < 6 {
            return Err(Error::Config(
                "configuration must hold two 3-D stick tips (n >= 6)".into(),
            ));
        }
        if self
            .kp
            .iter()
            .chain(&self.kd)
            .any(|g| !(*g >= 0.0) || !g.is_finite())
        {
            return Err(Error::Config(
                "PD gains must be finite and non-negative".into(),
            ));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::Config("beta must be positive".into()));
        }
        if self.control_fps == 0 || !(self.sim_dt > 0.0) {
            return Err(Error::Config(
                "control_fps and sim_dt must be positive".into(),
            ));
        }
        let subs = self.substeps();
        if subs == 0 || (self.sim_dt * subs as f64 - self.frame_dt()).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "sim_dt {} does not divide the control period {}",
                self.sim_dt,
                self.frame_dt()
            )));
        }
        if !(self.v_strike_min >= 0.0) {
            return Err(Error::Config("v_strike_min must be non-negative".into()));
        }
        for (i, (b, q)) in self.bounds.iter().zip(&self.q0).enumerate() {
            if !(b[0] < b[1]) || *q < b[0] || *q > b[1] {
                return Err(Error::Config(format!("bounds[{i}] invalid or excludes q0")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        let c = SimConfig::default();
        c.validate().unwrap();
        assert_eq!(c.substeps(), 4);
    }

    #[test]
    fn rejects_non_dividing_dt() {
        let c = SimConfig {
            sim_dt: 0.003,
            ..SimConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn rejects_negative_gain_and_bad_dims() {
        let mut c = SimConfig::default();
        c.kd[2] = -1.0;
        assert!(c.validate().is_err());
        let c = SimConfig {
            kp: vec![100.0; 5],
            ..SimConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_partial() {
        let c: SimConfig = toml::from_str("beta = 0.4\nrefractory = 3\n").unwrap();
        assert_eq!(c.beta, 0.4);
        assert_eq!(c.kp, vec![100.0; 6]);
        assert!(toml::from_str::<SimConfig>("betta = 1.0").is_err());
    }
}
