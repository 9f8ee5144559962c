//! Run configuration: TOML with sections, unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{KMethod, Scenario, SweepAxis};
use crate::biphoton::{LowGainSetup, PumpLowGain};
use crate::dispersion::{omega_from_wavelength, CrystalConfig, SellmeierSet};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::highgain::{HighGainSetup, PumpHighGain, QuadratureSpec};
use crate::schmidt::Truncation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeChoice {
    #[default]
    LowGain,
    HighGain,
}

/// Amplitude to decompose at low gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    #[default]
    Spdc,
    /// Product of identical Gaussians, a pure product state.
    Separable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_q: usize,
    pub n_omega: usize,
    pub n_phi: usize,
    /// rad/m
    pub q_max: f64,
    /// rad/s, around half the pump frequency
    pub omega_half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    /// m
    pub lambda_p0: f64,
    /// m
    pub w_p: f64,
    /// m; low gain
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_lambda_p: Option<f64>,
    /// high gain
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// s; high gain
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_t: Option<f64>,
    /// Overrides the calibration `Gamma L = g` at the beam centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2_eff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SellmeierChoice {
    Named(String),
    Custom(SellmeierSet),
}

impl Default for SellmeierChoice {
    fn default() -> Self {
        SellmeierChoice::Named("bbo-eimerl-1987".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub theta_p_deg: f64,
    /// m
    pub length: f64,
    #[serde(default)]
    pub sellmeier: SellmeierChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    #[serde(default)]
    pub method: KMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub regime: RegimeChoice,
    #[serde(default)]
    pub source: Source,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    pub grid: GridSection,
    pub pump: PumpSection,
    pub crystal: CrystalSection,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Applies `section.key=value` to a parsed document.
fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{spec}' is not of the form key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    let mut table = doc;
    for key in &keys[..keys.len() - 1] {
        let entry = table.entry(key.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override '{spec}': '{key}' is not a section")))?;
    }
    table.insert(keys[keys.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

impl RunConfig {
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.grid_spec()?;
        self.crystal_config()?.validate()?;
        match self.regime {
            RegimeChoice::LowGain => {
                self.low_gain_pump()?.validate()?;
            }
            RegimeChoice::HighGain => {
                self.high_gain_pump()?.validate()?;
                if self.source != Source::Spdc {
                    return Err(Error::Config("a synthetic source only applies to the low-gain regime".into()));
                }
            }
        }
        self.grid_spec()?.check_l_max(self.truncation.l_max)?;
        Ok(())
    }

    pub fn omega_p0(&self) -> f64 {
        omega_from_wavelength(self.pump.lambda_p0)
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = &self.grid;
        GridSpec::new(g.n_q, g.n_omega, g.n_phi, g.q_max, self.omega_p0() / 2.0, g.omega_half_width)
    }

    pub fn crystal_config(&self) -> Result<CrystalConfig> {
        let sellmeier = match &self.crystal.sellmeier {
            SellmeierChoice::Named(n) => SellmeierSet::named(n)?,
            SellmeierChoice::Custom(s) => s.clone(),
        };
        Ok(CrystalConfig { theta_p: self.crystal.theta_p_deg.to_radians(), length: self.crystal.length, sellmeier })
    }

    fn low_gain_pump(&self) -> Result<PumpLowGain> {
        let d = self.pump.delta_lambda_p.ok_or_else(|| Error::Config("low-gain runs need pump.delta_lambda_p".into()))?;
        Ok(PumpLowGain { lambda_p0: self.pump.lambda_p0, w_p: self.pump.w_p, delta_lambda_p: d })
    }

    fn high_gain_pump(&self) -> Result<PumpHighGain> {
        let g = self.pump.g.ok_or_else(|| Error::Config("high-gain runs need pump.g".into()))?;
        let dt = self.pump.delta_t.ok_or_else(|| Error::Config("high-gain runs need pump.delta_t".into()))?;
        Ok(PumpHighGain { g, w_p: self.pump.w_p, delta_t: dt, lambda_p0: self.pump.lambda_p0 })
    }

    pub fn low_gain(&self) -> Result<LowGainSetup> {
        Ok(LowGainSetup {
            grid: self.grid_spec()?,
            pump: self.low_gain_pump()?,
            crystal: self.crystal_config()?,
            truncation: self.truncation,
        })
    }

    pub fn high_gain(&self) -> Result<HighGainSetup> {
        Ok(HighGainSetup {
            grid: self.grid_spec()?,
            pump: self.high_gain_pump()?,
            crystal: self.crystal_config()?,
            truncation: self.truncation,
            quadrature: self.quadrature,
            c2_eff: self.pump.c2_eff,
        })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(match self.regime {
            RegimeChoice::LowGain => Scenario::LowGain(self.low_gain()?),
            RegimeChoice::HighGain => Scenario::HighGain(self.high_gain()?),
        })
    }

    pub fn from_low_gain(s: &LowGainSetup) -> Self {
        RunConfig {
            regime: RegimeChoice::LowGain,
            source: Source::Spdc,
            workers: 0,
            grid: GridSection {
                n_q: s.grid.n_q,
                n_omega: s.grid.n_omega,
                n_phi: s.grid.n_phi,
                q_max: s.grid.q_max,
                omega_half_width: s.grid.omega_half_width,
            },
            pump: PumpSection {
                lambda_p0: s.pump.lambda_p0,
                w_p: s.pump.w_p,
                delta_lambda_p: Some(s.pump.delta_lambda_p),
                g: None,
                delta_t: None,
                c2_eff: None,
            },
            crystal: CrystalSection {
                theta_p_deg: s.crystal.theta_p.to_degrees(),
                length: s.crystal.length,
                sellmeier: SellmeierChoice::Custom(s.crystal.sellmeier.clone()),
            },
            truncation: s.truncation,
            quadrature: QuadratureSpec::default(),
            sweep: None,
            output: OutputSection::default(),
        }
    }

    pub fn from_high_gain(s: &HighGainSetup) -> Self {
        let mut c = RunConfig::from_low_gain(&LowGainSetup {
            grid: s.grid.clone(),
            pump: PumpLowGain { lambda_p0: s.pump.lambda_p0, w_p: s.pump.w_p, delta_lambda_p: 1.0 },
            crystal: s.crystal.clone(),
            truncation: s.truncation,
        });
        c.regime = RegimeChoice::HighGain;
        c.pump.delta_lambda_p = None;
        c.pump.g = Some(s.pump.g);
        c.pump.delta_t = Some(s.pump.delta_t);
        c.pump.c2_eff = s.c2_eff;
        c.quadrature = s.quadrature;
        c
    }
}
