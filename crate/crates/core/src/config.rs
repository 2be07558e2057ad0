//! Declarative run configuration: a flat TOML document with every key
//! optional; missing keys fall back to the calibrated defaults. Unknown
//! keys are rejected.

use serde::{Deserialize, Serialize};

use crate::cycle::{
    default_step_ms, CycleConfig, CALIBRATED_GAMMA_PER_MS, DEFAULT_B1_MG, DEFAULT_B2_MG,
    DEFAULT_EPSILON, DEFAULT_LEVELS, DEFAULT_PEAK_MS, DEFAULT_RAMP_MS,
};
use crate::dynamics::{Direction, RateProfile};
use crate::error::{Error, Result};
use crate::thermo::MagneticField;

pub const DEFAULT_GRID_START_MS: f64 = 2.0;
pub const DEFAULT_GRID_END_MS: f64 = 400.0;
pub const DEFAULT_GRID_STEP_MS: f64 = 2.0;

/// On-disk document. Flat key/value TOML, everything optional.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    b1_mg: Option<f64>,
    b2_mg: Option<f64>,
    ramp_ms: Option<f64>,
    epsilon: Option<f64>,
    step_ms: Option<f64>,
    levels: Option<usize>,
    /// Named rate preset: "uniform" (default) or "reduced-final".
    profile: Option<String>,
    /// Explicit per-transition rates, 1/ms; override the preset.
    heating_rates: Option<Vec<f64>>,
    cooling_rates: Option<Vec<f64>>,
    /// Heating-time grid for sweeps, ms.
    grid_start_ms: Option<f64>,
    grid_end_ms: Option<f64>,
    grid_step_ms: Option<f64>,
    /// Entropy-peak anchor used by calibration, ms.
    target_peak_ms: Option<f64>,
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cycle: CycleConfig,
    pub grid_start_ms: f64,
    pub grid_end_ms: f64,
    pub grid_step_ms: f64,
    pub target_peak_ms: f64,
}

impl RunConfig {
    pub fn default_calibrated() -> Self {
        RunConfig {
            cycle: CycleConfig::calibrated_default(),
            grid_start_ms: DEFAULT_GRID_START_MS,
            grid_end_ms: DEFAULT_GRID_END_MS,
            grid_step_ms: DEFAULT_GRID_STEP_MS,
            target_peak_ms: DEFAULT_PEAK_MS,
        }
    }

    /// The sweep grid implied by the config.
    pub fn grid(&self) -> Vec<f64> {
        let mut g = Vec::new();
        let mut k = 0usize;
        loop {
            let t = self.grid_start_ms + k as f64 * self.grid_step_ms;
            if t > self.grid_end_ms + 1e-9 {
                break;
            }
            g.push(t);
            k += 1;
        }
        g
    }
}

fn rates_for(
    key: &str,
    explicit: Option<Vec<f64>>,
    preset: &str,
    levels: usize,
    direction: Direction,
) -> Result<RateProfile> {
    if let Some(rates) = explicit {
        if rates.len() != levels - 1 {
            return Err(Error::Config(format!(
                "{key}: expected {} rates for {levels} levels, got {}",
                levels - 1,
                rates.len()
            )));
        }
        if let Some(bad) = rates.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::Config(format!(
                "{key}: rates must be positive, got {bad}"
            )));
        }
        return RateProfile::new(direction, rates);
    }
    let mut rates = vec![CALIBRATED_GAMMA_PER_MS; levels - 1];
    match preset {
        "uniform" => {}
        "reduced-final" => {
            let last = rates.len() - 1;
            rates[last] *= 0.4;
        }
        other => {
            return Err(Error::Config(format!(
                "profile: unknown preset \"{other}\" (expected \"uniform\" or \"reduced-final\")"
            )))
        }
    }
    RateProfile::new(direction, rates)
}

fn resolve(file: FileConfig) -> Result<RunConfig> {
    let levels = file.levels.unwrap_or(DEFAULT_LEVELS);
    if !(2..=16).contains(&levels) {
        return Err(Error::Config(format!(
            "levels: expected 2..=16, got {levels}"
        )));
    }
    let preset = file.profile.as_deref().unwrap_or("uniform");
    let heating = rates_for(
        "heating_rates",
        file.heating_rates,
        preset,
        levels,
        Direction::Heating,
    )?;
    let cooling = rates_for(
        "cooling_rates",
        file.cooling_rates,
        preset,
        levels,
        Direction::Cooling,
    )?;

    let b1 = MagneticField::new(file.b1_mg.unwrap_or(DEFAULT_B1_MG))
        .map_err(|e| Error::Config(format!("b1_mg: {e}")))?;
    let b2 = MagneticField::new(file.b2_mg.unwrap_or(DEFAULT_B2_MG))
        .map_err(|e| Error::Config(format!("b2_mg: {e}")))?;
    let step = file
        .step_ms
        .unwrap_or_else(|| default_step_ms(&heating, &cooling));

    let cycle = CycleConfig::new(
        b1,
        b2,
        file.ramp_ms.unwrap_or(DEFAULT_RAMP_MS),
        heating,
        cooling,
        levels,
        file.epsilon.unwrap_or(DEFAULT_EPSILON),
        step,
    )
    .map_err(|e| Error::Config(e.to_string()))?;

    let grid_start = file.grid_start_ms.unwrap_or(DEFAULT_GRID_START_MS);
    let grid_end = file.grid_end_ms.unwrap_or(DEFAULT_GRID_END_MS);
    let grid_step = file.grid_step_ms.unwrap_or(DEFAULT_GRID_STEP_MS);
    if !(grid_start > 0.0 && grid_end >= grid_start && grid_step > 0.0) {
        return Err(Error::Config(format!(
            "grid: need 0 < grid_start_ms <= grid_end_ms and grid_step_ms > 0, got {grid_start}, {grid_end}, {grid_step}"
        )));
    }
    let target_peak = file.target_peak_ms.unwrap_or(DEFAULT_PEAK_MS);
    if !(target_peak > 0.0) {
        return Err(Error::Config(format!(
            "target_peak_ms: must be positive, got {target_peak}"
        )));
    }

    Ok(RunConfig {
        cycle,
        grid_start_ms: grid_start,
        grid_end_ms: grid_end,
        grid_step_ms: grid_step,
        target_peak_ms: target_peak,
    })
}

/// Parse a TOML document into a resolved configuration.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let file: FileConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    resolve(file)
}

/// Read and parse a configuration file.
pub fn parse_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Serialize a resolved configuration; rates are written out explicitly so
/// parsing the result reproduces the configuration exactly.
pub fn serialize_config(config: &RunConfig) -> String {
    let file = FileConfig {
        b1_mg: Some(config.cycle.b1.mg()),
        b2_mg: Some(config.cycle.b2.mg()),
        ramp_ms: Some(config.cycle.ramp_ms),
        epsilon: Some(config.cycle.epsilon),
        step_ms: Some(config.cycle.step_ms),
        levels: Some(config.cycle.levels),
        profile: None,
        heating_rates: Some(config.cycle.heating.rates().to_vec()),
        cooling_rates: Some(config.cycle.cooling.rates().to_vec()),
        grid_start_ms: Some(config.grid_start_ms),
        grid_end_ms: Some(config.grid_end_ms),
        grid_step_ms: Some(config.grid_step_ms),
        target_peak_ms: Some(config.target_peak_ms),
    };
    toml::to_string(&file).expect("flat config always serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::otto_efficiency;

    #[test]
    fn empty_file_is_default() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg, RunConfig::default_calibrated());
    }

    #[test]
    fn field_override_changes_efficiency() {
        let cfg = parse_config_str("b2_mg = 34.65\n").unwrap();
        let eta = otto_efficiency(cfg.cycle.b1, cfg.cycle.b2).unwrap();
        assert!((eta - 0.9).abs() < 1e-12);
    }

    #[test]
    fn bad_values_name_their_key() {
        let err = parse_config_str("heating_rates = [0.1, 0.1, 0.1, 0.1, 0.1, -0.2]\n")
            .unwrap_err();
        assert!(err.to_string().contains("heating_rates"), "{err}");
        let err = parse_config_str("levels = 1\n").unwrap_err();
        assert!(err.to_string().contains("levels"), "{err}");
        assert!(parse_config_str("unknown_key = 3\n").is_err());
        assert!(parse_config_str("profile = \"mystery\"\n").is_err());
    }

    #[test]
    fn preset_reduces_final_rate() {
        let cfg = parse_config_str("profile = \"reduced-final\"\n").unwrap();
        assert_eq!(cfg.cycle.heating, CycleConfig::reduced_final_preset().heating);
    }

    #[test]
    fn round_trip_is_exact() {
        for text in [
            "",
            "profile = \"reduced-final\"\nepsilon = 0.003\n",
            "levels = 4\nramp_ms = 7.5\ngrid_end_ms = 120.0\n",
        ] {
            let cfg = parse_config_str(text).unwrap();
            let back = parse_config_str(&serialize_config(&cfg)).unwrap();
            assert_eq!(cfg, back);
        }
    }

    #[test]
    fn grid_generation() {
        let cfg = parse_config_str("grid_start_ms = 2\ngrid_end_ms = 10\ngrid_step_ms = 2\n")
            .unwrap();
        assert_eq!(cfg.grid(), vec![2.0, 4.0, 6.0, 8.0, 10.0]);
    }
}
