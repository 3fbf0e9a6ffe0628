//! Scenario configuration and reproducibility manifests.
//!
//! One JSON document per scenario; defaults are embedded so every
//! construction runs from a one-line command. Named presets mirror the
//! sections of the construction: the disc, the torus, the projective
//! plane, the two chain families and the bordered surface.

use hulllab_core::bump::{CutoffSpec, SawtoothSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfaceKind {
    Sphere,
    Torus,
    Rp2,
    DiscDelta,
    ToriChain { m: usize },
    Rp2Chain { m: usize },
    /// Spliced single-torus chain with `nu_discs` discs excised from the
    /// residual flat patch.
    Bordered { nu_discs: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExportConfig {
    /// csv | obj | bin
    pub format: String,
    #[serde(default = "default_projection")]
    pub projection: [usize; 3],
}

fn default_projection() -> [usize; 3] {
    [0, 1, 2]
}

fn default_grid() -> (usize, usize) {
    (256, 256)
}

fn default_seed() -> u64 {
    42
}

fn default_e1() -> usize {
    10_000
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub surface: SurfaceKind,
    /// Check names; see the runner for the full list per surface kind.
    pub checks: Vec<String>,
    #[serde(default)]
    pub cutoffs: Option<CutoffSpec>,
    #[serde(default)]
    pub sawtooth: Option<SawtoothSpec>,
    #[serde(default = "default_grid")]
    pub grid: (usize, usize),
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub exports: Vec<ExportConfig>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Size of the sampled stand-in for the compact set inside the annulus.
    #[serde(default = "default_e1")]
    pub e1_count: usize,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), String> {
        match &self.surface {
            SurfaceKind::ToriChain { m } | SurfaceKind::Rp2Chain { m } => {
                if *m < 1 {
                    return Err("chain needs m >= 1".into());
                }
            }
            SurfaceKind::Bordered { nu_discs } => {
                if *nu_discs > 4 {
                    return Err("bordered surface supports at most 4 excised discs".into());
                }
            }
            _ => {}
        }
        let cutoffs = self.cutoffs.unwrap_or_default();
        cutoffs.validate().map_err(|e| e.to_string())?;
        if let Some(saw) = &self.sawtooth {
            saw.validate(&cutoffs).map_err(|e| e.to_string())?;
        }
        if self.grid.0 < 8 || self.grid.1 < 8 {
            return Err("grid must be at least 8 x 8".into());
        }
        for e in &self.exports {
            if !["csv", "obj", "bin"].contains(&e.format.as_str()) {
                return Err(format!("unknown export format '{}'", e.format));
            }
        }
        Ok(())
    }

    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario serializes");
        let mut h = Sha256::new();
        h.update(&json);
        hex(&h.finalize())
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub const PRESETS: [&str; 6] = [
    "thm1.2-disc",
    "sec9-torus",
    "sec10-rp2",
    "sec11-tori-chain",
    "sec11-rp2-chain",
    "sec12-bordered",
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.to_vec()
}

pub fn preset(name: &str) -> Option<Scenario> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let base = Scenario {
        name: name.to_string(),
        surface: SurfaceKind::Torus,
        checks: vec![],
        cutoffs: None,
        sawtooth: None,
        grid: default_grid(),
        tolerances: BTreeMap::new(),
        exports: vec![],
        seed: default_seed(),
        e1_count: default_e1(),
    };
    Some(match name {
        "thm1.2-disc" => Scenario {
            surface: SurfaceKind::DiscDelta,
            checks: s(&[
                "seams",
                "immersion",
                "block-det",
                "axis-range",
                "totally-real",
                "lemma-gh",
                "antiperiodicity",
                "fiber-compat",
            ]),
            grid: (384, 384),
            ..base
        },
        "sec9-torus" => Scenario {
            surface: SurfaceKind::Torus,
            checks: s(&["seams", "immersion", "extrema", "totally-real", "fiber-circles"]),
            exports: vec![ExportConfig {
                format: "obj".into(),
                projection: [0, 1, 2],
            }],
            ..base
        },
        "sec10-rp2" => Scenario {
            surface: SurfaceKind::Rp2,
            checks: s(&[
                "seams",
                "immersion",
                "extrema",
                "totally-real",
                "fiber-finiteness",
            ]),
            ..base
        },
        "sec11-tori-chain" => Scenario {
            surface: SurfaceKind::ToriChain { m: 2 },
            checks: s(&[
                "seams",
                "immersion",
                "chain-arithmetic",
                "totally-real",
                "fiber-compat",
                "topology",
                "splice-integrity",
            ]),
            grid: (192, 192),
            exports: vec![ExportConfig {
                format: "obj".into(),
                projection: [0, 2, 1],
            }],
            ..base
        },
        "sec11-rp2-chain" => Scenario {
            surface: SurfaceKind::Rp2Chain { m: 2 },
            checks: s(&["seams", "chain-arithmetic", "topology"]),
            grid: (128, 128),
            exports: vec![ExportConfig {
                format: "obj".into(),
                projection: [0, 2, 1],
            }],
            ..base
        },
        "sec12-bordered" => Scenario {
            surface: SurfaceKind::Bordered { nu_discs: 2 },
            checks: s(&["topology", "excision"]),
            grid: (128, 128),
            ..base
        },
        _ => return None,
    })
}

/// Reproducibility record: embedded config, hashes of every written file,
/// per-check outcomes. Deterministic runs omit the timestamp so two runs of
/// the same scenario produce bitwise-identical manifests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    pub config_hash: String,
    pub seed: u64,
    pub deterministic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub checks: BTreeMap<String, bool>,
    pub files: BTreeMap<String, String>,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_validate() {
        for name in preset_names() {
            let p = preset(name).unwrap();
            p.validate().unwrap();
            let json = serde_json::to_string(&p).unwrap();
            let back: Scenario = serde_json::from_str(&json).unwrap();
            assert_eq!(p, back);
            assert_eq!(p.config_hash(), back.config_hash());
        }
    }

    #[test]
    fn bad_cutoffs_rejected() {
        let mut p = preset("sec9-torus").unwrap();
        p.cutoffs = Some(CutoffSpec {
            alpha2: 1.7,
            ..CutoffSpec::default()
        });
        assert!(p.validate().is_err());
    }
}
