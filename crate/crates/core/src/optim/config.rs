use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the annealed optimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlaConfig {
    /// Initial probe radius.
    #[serde(rename = "R0")]
    pub r0: f64,
    /// Initial probe spacing.
    #[serde(rename = "eps_S0")]
    pub eps_s0: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub r_gamma: f64,
    #[serde(rename = "r_R")]
    pub r_r: f64,
    pub r_eps: f64,
    #[serde(rename = "rG_max")]
    pub rg_max: f64,
    #[serde(rename = "rG_min")]
    pub rg_min: f64,
    #[serde(rename = "r_G")]
    pub r_g: f64,
    /// Smallest objective gain that counts as an improvement.
    #[serde(rename = "eps_L")]
    pub eps_l: f64,
    /// Gradient infinity-norm below which descent stops.
    #[serde(rename = "eps_G")]
    pub eps_g: f64,
    /// Iteration cap of one gradient-descent call.
    pub max_gd_iters: usize,
    /// Cap on accepted probes within one range optimization.
    pub max_probe_accepts: usize,
    /// Cap on sparsify passes between probe rounds.
    pub max_sparsify_iters: usize,
}

impl Default for SlaConfig {
    fn default() -> Self {
        Self {
            r0: 8.0,
            eps_s0: 0.2,
            gamma_min: 2.0,
            gamma_max: 200.0,
            r_gamma: 10.0,
            r_r: 0.5,
            r_eps: 0.5,
            rg_max: 1.0,
            rg_min: 1e-5,
            r_g: 0.1,
            eps_l: 1e-6,
            eps_g: 1e-6,
            max_gd_iters: 5000,
            max_probe_accepts: 200,
            max_sparsify_iters: 50,
        }
    }
}

impl SlaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        let pos = [
            self.r0, self.eps_s0, self.gamma_min, self.gamma_max, self.rg_max, self.rg_min, self.eps_l, self.eps_g,
        ];
        if pos.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("radius, spacing, gamma endpoints, rates and tolerances must be positive");
        }
        if !(self.r_gamma > 1.0 && self.r_gamma.is_finite()) {
            return bad("r_gamma must exceed 1");
        }
        for (name, v) in [("r_R", self.r_r), ("r_eps", self.r_eps), ("r_G", self.r_g)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        if self.gamma_min > self.gamma_max {
            return bad("gamma_min exceeds gamma_max");
        }
        if self.eps_s0 > self.r0 {
            return bad("probe spacing exceeds the radius");
        }
        if self.rg_min > self.rg_max {
            return bad("rG_min exceeds rG_max");
        }
        if self.max_gd_iters == 0 {
            return bad("max_gd_iters must be positive");
        }
        Ok(())
    }

    /// `gamma_min * r_gamma^k` for every `k` that stays within `gamma_max`.
    pub fn schedule(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let g = self.gamma_min * self.r_gamma.powi(k);
            if g > self.gamma_max * (1.0 + 1e-12) {
                break;
            }
            out.push(g);
            k += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let c = SlaConfig::default();
        c.validate().unwrap();
        assert_eq!(c.schedule(), vec![2.0, 20.0, 200.0]);
        let single = SlaConfig {
            gamma_max: 2.0,
            ..c
        };
        assert_eq!(single.schedule(), vec![2.0]);
    }

    #[test]
    fn json_names_and_partial_files() {
        let c: SlaConfig = serde_json::from_str(r#"{"R0": 4.0, "r_gamma": 5.0}"#).unwrap();
        assert_eq!(c.r0, 4.0);
        assert_eq!(c.r_gamma, 5.0);
        assert_eq!(c.eps_s0, 0.2);
        let s = serde_json::to_string(&SlaConfig::default()).unwrap();
        for k in ["\"R0\"", "\"eps_S0\"", "\"r_R\"", "\"rG_max\"", "\"eps_L\""] {
            assert!(s.contains(k), "{k}");
        }
        assert!(serde_json::from_str::<SlaConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn invalid_configs() {
        let d = SlaConfig::default();
        for c in [
            SlaConfig { r_gamma: 1.0, ..d.clone() },
            SlaConfig { r_r: 1.0, ..d.clone() },
            SlaConfig { gamma_min: 300.0, ..d.clone() },
            SlaConfig { eps_l: 0.0, ..d.clone() },
        ] {
            assert!(c.validate().is_err());
        }
    }
}
