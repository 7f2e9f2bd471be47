use std::collections::BTreeMap;
use std::path::Path;

use mukai_forge::charge::{self, CharteredFamily};
use mukai_forge::isometry::{by_name, from_word};
use mukai_forge::num::JsonRat;
use mukai_forge::LatticeIsometry;
use serde::Deserialize;

use crate::CliError;

/// User definitions layered over the built-in presets.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub surfaces: BTreeMap<String, SurfaceDef>,
    #[serde(default)]
    pub families: BTreeMap<String, FamilyDef>,
    #[serde(default)]
    pub isometries: BTreeMap<String, WordDef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDef {
    pub d: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDef {
    pub y: JsonRat,
    pub x0: JsonRat,
    pub k: JsonRat,
    pub c: JsonRat,
    pub degree: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordDef {
    pub degree: Option<u32>,
    pub word: Vec<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
    }

    pub fn degree(&self, explicit: Option<u32>, surface: Option<&str>) -> Result<u32, CliError> {
        match (explicit, surface) {
            (Some(d), None) => Ok(d),
            (None, Some(name)) => self
                .surfaces
                .get(name)
                .map(|s| s.d)
                .ok_or_else(|| CliError::Input(format!("unknown surface {name:?}"))),
            (Some(_), Some(_)) => Err(CliError::Input("give either --degree or --surface".into())),
            (None, None) => Err(CliError::Input("missing --degree (or --surface)".into())),
        }
    }

    /// Preset or configured family with its degree parameter.
    pub fn family(&self, name: &str) -> Result<(CharteredFamily, u32), CliError> {
        if let Some(f) = self.families.get(name) {
            let fam = CharteredFamily::new(f.y.0.clone(), f.x0.0.clone(), f.k.0.clone(), f.c.0.clone())?;
            return Ok((fam, f.degree));
        }
        charge::preset(name).ok_or_else(|| CliError::Input(format!("unknown family {name:?}")))
    }

    /// A configured word, a generator name, or generators joined by ';' (applied left to right).
    pub fn isometry(&self, name: &str, d: u32) -> Result<LatticeIsometry, CliError> {
        if let Some(w) = self.isometries.get(name) {
            if let Some(expected) = w.degree {
                if expected != d {
                    return Err(mukai_forge::Error::DegreeMismatch { expected, found: d }.into());
                }
            }
            return Ok(from_word(&w.word, d)?);
        }
        if name.contains(';') {
            let word: Vec<String> = name.split(';').map(|g| g.trim().to_string()).collect();
            return Ok(from_word(&word, d)?);
        }
        Ok(by_name(name, d)?)
    }
}
