//! Run configuration: built-in figure presets, overridden by a JSON config
//! file, overridden in turn by command-line flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleSpec, SymmetryClass};
use crate::error::{Error, Result};
use crate::quench::{QuenchExperiment, UGrid, WHist};

/// Level count of the presets; spacings given without an explicit value
/// are rescaled by `PRESET_N / N` when `N` changes.
pub const PRESET_N: usize = 300;
pub const PRESET_SPACING: f64 = 0.1283;

/// Every field is optional so the same type serves as preset, config file
/// and flag overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n_levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<SymmetryClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_beta")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_to_ground_zero: Option<bool>,
    /// Sizes for the ergodicity study.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
}

mod opt_beta {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::io::beta_serde")] f64);

    pub fn serialize<S: Serializer>(beta: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        beta.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($field:ident),*) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl RunConfig {
    /// Figure presets 1 to 3; `None` gives the figure-1 settings.
    pub fn preset(figure: Option<u8>) -> Result<Self> {
        let beta = match figure {
            None | Some(1) => 0.01,
            Some(2) => 0.1,
            Some(3) => 1.0,
            Some(other) => return Err(Error::InvalidSpec(format!("unknown figure {other}; expected 1, 2 or 3"))),
        };
        Ok(RunConfig {
            n_levels: Some(PRESET_N),
            class: Some(SymmetryClass::Goe),
            s_init: Some(PRESET_SPACING),
            s_final: Some(PRESET_SPACING / 2.0),
            e_init: Some(0.0),
            e_final: Some(0.0),
            beta: Some(beta),
            draws: Some(1),
            seed: Some(0),
            u_min: Some(0.0),
            u_max: Some(3.0),
            u_points: Some(512),
            w_bins: Some(120),
            w_range: None,
            shift_to_ground_zero: Some(true),
            n_list: Some(vec![100, 400]),
        })
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &RunConfig) {
        overlay!(
            self, other, n_levels, class, s_init, s_final, e_init, e_final, beta, draws, seed, u_min, u_max,
            u_points, w_bins, w_range, shift_to_ground_zero, n_list
        );
    }

    /// Preset, then file, then flags. Spacings that neither the file nor
    /// the flags set follow `N` so that `N <s>` keeps its preset value.
    pub fn resolve(figure: Option<u8>, file: Option<&RunConfig>, flags: &RunConfig) -> Result<Self> {
        let preset = Self::preset(figure)?;
        let mut cfg = preset.clone();
        let mut explicit = RunConfig::default();
        for layer in file.into_iter().chain(std::iter::once(flags)) {
            cfg.overlay(layer);
            explicit.overlay(layer);
        }
        let n = cfg.n_levels.unwrap_or(PRESET_N);
        if n == 0 {
            return Err(Error::InvalidSpec("N must be positive".into()));
        }
        let scale = PRESET_N as f64 / n as f64;
        if explicit.s_init.is_none() {
            cfg.s_init = preset.s_init.map(|s| s * scale);
        }
        if explicit.s_final.is_none() {
            cfg.s_final = preset.s_final.map(|s| s * scale);
        }
        Ok(cfg)
    }

    fn get<T: Clone>(field: &Option<T>, name: &str) -> Result<T> {
        field.clone().ok_or_else(|| Error::InvalidSpec(format!("missing setting '{name}'")))
    }

    pub fn experiment(&self) -> Result<QuenchExperiment> {
        let n = Self::get(&self.n_levels, "N")?;
        let class = Self::get(&self.class, "class")?;
        let initial = EnsembleSpec::new(n, class, Self::get(&self.e_init, "e_init")?, Self::get(&self.s_init, "s_init")?)?;
        let final_ = EnsembleSpec::new(n, class, Self::get(&self.e_final, "e_final")?, Self::get(&self.s_final, "s_final")?)?;
        let exp = QuenchExperiment {
            initial,
            final_,
            beta: Self::get(&self.beta, "beta")?,
            n_draws: Self::get(&self.draws, "draws")?,
            master_seed: Self::get(&self.seed, "seed")?,
            u_grid: UGrid {
                min: Self::get(&self.u_min, "u_min")?,
                max: Self::get(&self.u_max, "u_max")?,
                count: Self::get(&self.u_points, "u_points")?,
            },
            w_hist: WHist { bins: Self::get(&self.w_bins, "w_bins")?, range: self.w_range },
            shift_to_ground_zero: Self::get(&self.shift_to_ground_zero, "shift_to_ground_zero")?,
        };
        exp.validate()?;
        Ok(exp)
    }
}
