//! Run configuration: one JSON file fully determines a run.

use crate::bubble::RampProfile;
use crate::energy::RegimeBounds;
use crate::lattice::CylinderConfig;
use crate::mc::McSpec;
use crate::params::make_params;
use crate::potential::PotentialModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const SUITES: [&str; 7] = ["constants", "lattice", "interactions", "energy", "reduce", "residual", "pohozaev"];

/// A configuration problem, reported with the offending field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn bad(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    /// k values for the exact-versus-asymptotic table.
    pub k_list: Vec<usize>,
    /// Same-side check point.
    pub check_k: usize,
    /// Pair for the same-side convergence-rate check.
    pub shrink_k: (usize, usize),
    /// Cross-side check point (k, h̄).
    pub cross_point: (usize, f64),
}

impl Default for LatticeSection {
    fn default() -> Self {
        LatticeSection { k_list: vec![16, 32, 64, 128, 200, 256, 512], check_k: 200, shrink_k: (256, 512), cross_point: (400, 0.05) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InteractionSection {
    /// Values of λ|x₁ - x₂|.
    pub lambda_d: Vec<f64>,
    /// The grid point that is checked against tolerances.
    pub check_lambda_d: f64,
    pub lambda: f64,
}

impl Default for InteractionSection {
    fn default() -> Self {
        InteractionSection { lambda_d: vec![12.5, 25.0, 50.0, 100.0, 200.0], check_lambda_d: 50.0, lambda: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergySection {
    pub k: usize,
    /// Random regime points for the derivative checks.
    pub gradient_points: usize,
}

impl Default for EnergySection {
    fn default() -> Self {
        EnergySection { k: 8, gradient_points: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PohozaevSection {
    pub k: usize,
    pub lambda: f64,
    /// Displacement of the off-critical comparison point.
    pub displacement: f64,
}

impl Default for PohozaevSection {
    fn default() -> Self {
        PohozaevSection { k: 8, lambda: 1e3, displacement: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: f64,
    pub potential: PotentialModel,
    /// Initial guess (r, y'') for the critical-point search.
    pub initial: (f64, Vec<f64>),
    /// k values for the residual trend and the scaling sweep.
    pub k_list: Vec<usize>,
    pub regime: RegimeBounds,
    /// Cutoff width σ as a fraction of r̄.
    pub sigma_frac: f64,
    /// Ramp shape of the cutoff η.
    pub eta_profile: RampProfile,
    /// ρ/σ for the Pohozaev region.
    pub rho_factor: f64,
    pub mc: McSpec,
    pub out_dir: PathBuf,
    pub suites: Vec<String>,
    pub lattice: LatticeSection,
    pub interactions: InteractionSection,
    pub energy: EnergySection,
    pub pohozaev: PohozaevSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 6,
            s: 0.9,
            potential: PotentialModel::default_bump(6),
            initial: (1.0, vec![0.0; 3]),
            k_list: vec![8, 16, 32, 64],
            regime: RegimeBounds::default(),
            sigma_frac: 0.1,
            eta_profile: RampProfile::default(),
            rho_factor: 3.5,
            mc: McSpec::default(),
            out_dir: PathBuf::from("results"),
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            lattice: LatticeSection::default(),
            interactions: InteractionSection::default(),
            energy: EnergySection::default(),
            pohozaev: PohozaevSection::default(),
        }
    }
}

fn increasing(path: &str, ks: &[usize], min_len: usize) -> Result<(), ConfigError> {
    if ks.len() < min_len {
        return Err(bad(path, format!("needs at least {min_len} entries")));
    }
    if ks[0] == 0 || ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad(path, "must be strictly increasing positive integers"));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            bad(if path.is_empty() { "." } else { &path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(&path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_string(self).expect("config serializes").as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks every field before any computation starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        make_params(self.n, self.s).map_err(|e| bad(if self.n < 5 || self.n > 8 { "N" } else { "s" }, e.to_string()))?;
        self.potential.validate(self.n).map_err(|e| bad("potential", e.to_string()))?;
        if !(self.initial.0 > 0.0) {
            return Err(bad("initial[0]", "initial r must be positive"));
        }
        if self.initial.1.len() != self.n - 3 {
            return Err(bad("initial[1]", format!("needs {} transverse coordinates", self.n - 3)));
        }
        increasing("k_list", &self.k_list, 4)?;
        self.regime.validate().map_err(|e| bad("regime", e.to_string()))?;
        if !(self.sigma_frac > 0.0 && self.sigma_frac < 0.5) {
            return Err(bad("sigma_frac", "must lie in (0, 0.5)"));
        }
        if !(self.rho_factor > 2.0 && self.rho_factor < 5.0) {
            return Err(bad("rho_factor", "must lie in (2, 5)"));
        }
        self.mc.validate().map_err(|e| bad("mc", e.to_string()))?;
        for (i, s) in self.suites.iter().enumerate() {
            if !SUITES.contains(&s.as_str()) {
                return Err(bad(&format!("suites[{i}]"), format!("unknown suite `{s}`")));
            }
        }
        increasing("lattice.k_list", &self.lattice.k_list, 1)?;
        if self.lattice.check_k < 2 || self.lattice.shrink_k.0 < 2 || self.lattice.shrink_k.0 >= self.lattice.shrink_k.1 {
            return Err(bad("lattice.shrink_k", "needs 2 <= first < second and check_k >= 2"));
        }
        let (ck, ch) = self.lattice.cross_point;
        CylinderConfig::new(ck, 1.0, ch, vec![0.0; self.n - 3]).map_err(|e| bad("lattice.cross_point", e.to_string()))?;
        if !(ch > 0.0 && ck as f64 * ch > 1.0) {
            return Err(bad("lattice.cross_point", "needs h_bar > 0 and k*h_bar > 1"));
        }
        if self.interactions.lambda_d.is_empty() || self.interactions.lambda_d.iter().any(|v| !(*v > 0.0)) {
            return Err(bad("interactions.lambda_d", "needs positive entries"));
        }
        if !(self.interactions.lambda > 0.0) {
            return Err(bad("interactions.lambda", "must be positive"));
        }
        if self.energy.k < 1 || self.energy.k > 64 {
            return Err(bad("energy.k", "must lie in 1..=64"));
        }
        if self.energy.gradient_points == 0 {
            return Err(bad("energy.gradient_points", "must be positive"));
        }
        if self.pohozaev.k < 2 || !(self.pohozaev.lambda > 0.0) || !(self.pohozaev.displacement > 0.0) {
            return Err(bad("pohozaev", "needs k >= 2, lambda > 0 and displacement > 0"));
        }
        Ok(())
    }

    /// Suite list from a comma-separated override.
    pub fn with_suites(mut self, names: &str) -> Result<Self, ConfigError> {
        self.suites = names.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        if self.suites.is_empty() {
            return Err(bad("--suite", "no suite names given"));
        }
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn errors_carry_field_paths() {
        let e = RunConfig::from_json(r#"{"mc": {"n_samples": "many"}}"#).unwrap_err();
        assert_eq!(e.path, "mc.n_samples");
        let e = RunConfig::from_json(r#"{"s": 0.5}"#).unwrap_err();
        assert_eq!(e.path, "s");
        let e = RunConfig::from_json(r#"{"suites": ["constants", "bogus"]}"#).unwrap_err();
        assert_eq!(e.path, "suites[1]");
        let e = RunConfig::from_json(r#"{"lattice": {"k_lst": [1]}}"#).unwrap_err();
        assert_eq!(e.path, "lattice.k_lst");
    }
}
