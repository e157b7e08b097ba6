//! Flat key-value experiment configuration.
//!
//! Files hold one `key = value` pair per line; `#` starts a comment and blank
//! lines are skipped. Unknown keys, duplicate keys, malformed lines, and
//! out-of-range values are rejected with the offending line number. Powers
//! are given in dBm and converted to watts once; the SNR floor is given
//! either absolutely (`snr_floor_db`) or relative to the no-surface baseline
//! (`snr_enhancement_db`), never both.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scenario::{path_loss, ScenarioConfig};

/// How the configuration pins the downlink SNR floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrSpec {
    /// Absolute floor in dB.
    FloorDb(f64),
    /// Offset in dB above the no-surface baseline SNR.
    EnhancementDb(f64),
}

/// Parsed experiment configuration, §V defaults for unspecified keys.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pos_dfbs: [f64; 3],
    pub pos_user: [f64; 3],
    pub pos_is: [f64; 3],
    pub m_antennas: usize,
    pub ny: usize,
    pub nz: usize,
    pub wavelength_m: f64,
    pub spacing_ra_m: f64,
    pub spacing_is_m: f64,
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub snr: SnrSpec,
    pub block_length: usize,
    pub rcs_coeff: Complex64,
    pub grid_step_deg: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pos_dfbs: [10.0, 20.0, 0.0],
            pos_user: [5.0, -5.0, 0.0],
            pos_is: [0.0, 0.0, 0.0],
            m_antennas: 4,
            ny: 30,
            nz: 10,
            wavelength_m: 0.06,
            spacing_ra_m: 0.03,
            spacing_is_m: 0.03,
            tx_power_dbm: 10.0,
            noise_power_dbm: -110.0,
            snr: SnrSpec::EnhancementDb(0.0),
            block_length: 1000,
            rcs_coeff: Complex64::new(1.0, 0.0),
            grid_step_deg: 0.01,
            trials: 100,
            seed: 0,
        }
    }
}

fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<String> = Vec::new();
        let mut snr_key: Option<&str> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(line_no, format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::parse(line_no, format!("duplicate key `{key}`")));
            }
            seen.push(key.to_string());

            match key {
                "pos_dfbs" => cfg.pos_dfbs = parse_triple(value, line_no, key)?,
                "pos_user" => cfg.pos_user = parse_triple(value, line_no, key)?,
                "pos_is" => cfg.pos_is = parse_triple(value, line_no, key)?,
                "m_antennas" => {
                    cfg.m_antennas = parse_num(value, line_no, key)?;
                    if cfg.m_antennas < 2 {
                        return Err(Error::parse(
                            line_no,
                            format!("m_antennas = {} violates M >= 2", cfg.m_antennas),
                        ));
                    }
                }
                "ny" => {
                    cfg.ny = parse_num(value, line_no, key)?;
                    if cfg.ny < 1 {
                        return Err(Error::parse(line_no, "ny must be at least 1"));
                    }
                }
                "nz" => {
                    cfg.nz = parse_num(value, line_no, key)?;
                    if cfg.nz < 1 {
                        return Err(Error::parse(line_no, "nz must be at least 1"));
                    }
                }
                "wavelength_m" => {
                    cfg.wavelength_m = parse_positive(value, line_no, key)?;
                }
                "spacing_ra_m" => {
                    cfg.spacing_ra_m = parse_positive(value, line_no, key)?;
                }
                "spacing_is_m" => {
                    cfg.spacing_is_m = parse_positive(value, line_no, key)?;
                }
                "tx_power_dbm" => cfg.tx_power_dbm = parse_num(value, line_no, key)?,
                "noise_power_dbm" => cfg.noise_power_dbm = parse_num(value, line_no, key)?,
                "snr_floor_db" => {
                    if let Some(other) = snr_key {
                        return Err(Error::parse(
                            line_no,
                            format!("snr_floor_db conflicts with earlier {other}"),
                        ));
                    }
                    snr_key = Some("snr_floor_db");
                    cfg.snr = SnrSpec::FloorDb(parse_num(value, line_no, key)?);
                }
                "snr_enhancement_db" => {
                    if let Some(other) = snr_key {
                        return Err(Error::parse(
                            line_no,
                            format!("snr_enhancement_db conflicts with earlier {other}"),
                        ));
                    }
                    snr_key = Some("snr_enhancement_db");
                    cfg.snr = SnrSpec::EnhancementDb(parse_num(value, line_no, key)?);
                }
                "block_length" => {
                    cfg.block_length = parse_num(value, line_no, key)?;
                    if cfg.block_length < 1 {
                        return Err(Error::parse(line_no, "block_length must be at least 1"));
                    }
                }
                "rcs_coeff_re" => cfg.rcs_coeff.re = parse_num(value, line_no, key)?,
                "rcs_coeff_im" => cfg.rcs_coeff.im = parse_num(value, line_no, key)?,
                "grid_step_deg" => {
                    cfg.grid_step_deg = parse_positive(value, line_no, key)?;
                }
                "trials" => {
                    cfg.trials = parse_num(value, line_no, key)?;
                    if cfg.trials < 1 {
                        return Err(Error::parse(line_no, "trials must be at least 1"));
                    }
                }
                "seed" => cfg.seed = parse_num(value, line_no, key)?,
                _ => {
                    return Err(Error::parse(line_no, format!("unknown key `{key}`")));
                }
            }
        }
        Ok(cfg)
    }

    /// Resolve into physical units. An enhancement-style SNR floor is pinned
    /// to the no-surface baseline of this geometry.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        let tx_power = dbm_to_watts(self.tx_power_dbm);
        let noise_power = dbm_to_watts(self.noise_power_dbm);
        let snr_floor = match self.snr {
            SnrSpec::FloorDb(db) => 10f64.powf(db / 10.0),
            SnrSpec::EnhancementDb(delta) => {
                let d1 = dist(&self.pos_user, &self.pos_dfbs);
                if d1 <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "user and dfbs positions coincide".into(),
                    ));
                }
                let alpha1 = path_loss(d1)?;
                tx_power * alpha1 * alpha1 / noise_power * 10f64.powf(delta / 10.0)
            }
        };
        let cfg = ScenarioConfig {
            pos_dfbs: self.pos_dfbs,
            pos_user: self.pos_user,
            pos_is: self.pos_is,
            m_antennas: self.m_antennas,
            ny: self.ny,
            nz: self.nz,
            wavelength: self.wavelength_m,
            spacing_ra: self.spacing_ra_m,
            spacing_is: self.spacing_is_m,
            tx_power,
            noise_power,
            snr_floor,
            block_length: self.block_length,
            rcs_coeff: self.rcs_coeff,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parse(line, format!("cannot parse `{value}` for key `{key}`")))
}

fn parse_positive(value: &str, line: usize, key: &str) -> Result<f64> {
    let v: f64 = parse_num(value, line, key)?;
    if v <= 0.0 {
        return Err(Error::parse(line, format!("{key} must be positive, got {v}")));
    }
    Ok(v)
}

fn parse_triple(value: &str, line: usize, key: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::parse(
            line,
            format!("key `{key}` needs three comma-separated values, got `{value}`"),
        ));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = parse_num(part, line, key)?;
    }
    Ok(out)
}
