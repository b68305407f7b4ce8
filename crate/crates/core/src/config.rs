//! Run configuration files.
//!
//! A configuration is a TOML document: top-level keys for the case, polynomial degree and
//! seed, and one table per concern. Every key is optional.
//!
//! ```toml
//! case = "circle"        # square | circle | generic | patch | ldm-relaxation
//! k = 0
//! seed = 7
//!
//! [mesh]
//! family = "triangular"  # cartesian | perturbed | triangular
//! base = 8               # background cells per side on level 0, doubled per level
//! levels = 4
//! refinements = [0, 1, 2, 4]
//!
//! [material]
//! sigma_ext = 1.0
//! ratios = [1e-6, 1e-3, 1e3, 1e6]   # sigma_int / sigma_ext
//! patch_degree = 1
//!
//! [penalty]
//! eta = "auto"           # or a positive number
//!
//! [ldm]
//! t_c = 1.0              # or capacitance = ...
//! t_final = 2.0
//! steps0 = 8
//!
//! [output]
//! dir = "out"
//! matrix_market = false
//! snapshots = false
//! ```

use crate::error::{Error, Result};
use crate::ldm::LdmStudySettings;
use crate::scenario::{Case, Scenario};
use crate::study::{MeshFamily, StudySettings};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub case: Case,
    pub k: usize,
    pub seed: u64,
    pub mesh: MeshConfig,
    pub material: MaterialConfig,
    pub penalty: PenaltyConfig,
    pub ldm: LdmConfig,
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub family: MeshFamily,
    pub base: usize,
    pub levels: usize,
    pub refinements: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialConfig {
    pub sigma_ext: f64,
    pub ratios: Vec<f64>,
    pub patch_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PenaltyConfig {
    pub eta: Eta,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "EtaRepr", into = "EtaRepr")]
pub enum Eta {
    #[default]
    Auto,
    Value(f64),
}

impl Eta {
    pub fn value(self) -> Option<f64> {
        match self {
            Eta::Auto => None,
            Eta::Value(v) => Some(v),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EtaRepr {
    Number(f64),
    Keyword(String),
}

impl TryFrom<EtaRepr> for Eta {
    type Error = String;

    fn try_from(r: EtaRepr) -> std::result::Result<Self, String> {
        match r {
            EtaRepr::Number(v) => Ok(Eta::Value(v)),
            EtaRepr::Keyword(k) if k == "auto" => Ok(Eta::Auto),
            EtaRepr::Keyword(k) => Err(format!("eta must be \"auto\" or a number, got `{k}`")),
        }
    }
}

impl From<Eta> for EtaRepr {
    fn from(e: Eta) -> Self {
        match e {
            Eta::Auto => EtaRepr::Keyword("auto".into()),
            Eta::Value(v) => EtaRepr::Number(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdmConfig {
    pub t_c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacitance: Option<f64>,
    pub t_final: f64,
    pub steps0: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub matrix_market: bool,
    pub snapshots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: Case::Square,
            k: 0,
            seed: 7,
            mesh: MeshConfig::default(),
            material: MaterialConfig::default(),
            penalty: PenaltyConfig { eta: Eta::Auto },
            ldm: LdmConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            family: MeshFamily::Cartesian,
            base: 8,
            levels: 4,
            refinements: vec![0],
        }
    }
}

impl Default for MaterialConfig {
    fn default() -> Self {
        Self {
            sigma_ext: 1.0,
            ratios: vec![1e-6, 1e-3, 1e3, 1e6],
            patch_degree: 1,
        }
    }
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self { eta: Eta::Auto }
    }
}

impl Default for LdmConfig {
    fn default() -> Self {
        Self {
            t_c: 1.0,
            capacitance: None,
            t_final: 2.0,
            steps0: 8,
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            matrix_market: false,
            snapshots: false,
        }
    }
}

impl RunConfig {
    /// Relaxation setup: ratio 0.1, triangular meshes, interface refinement 2, `t_c = 1`,
    /// `t_f = 2`.
    pub fn ldm_default() -> Self {
        Self {
            case: Case::LdmRelaxation,
            mesh: MeshConfig {
                family: MeshFamily::Triangular,
                refinements: vec![2],
                ..MeshConfig::default()
            },
            material: MaterialConfig {
                ratios: vec![0.1],
                ..MaterialConfig::default()
            },
            ..Self::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text)
            .map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.mesh.levels == 0 {
            return bad("mesh.levels must be at least 1".into());
        }
        if self.mesh.base == 0 {
            return bad("mesh.base must be positive".into());
        }
        if self.mesh.refinements.is_empty() {
            return bad("mesh.refinements must not be empty".into());
        }
        if self.k > 3 {
            return bad(format!("k = {} is not supported (0..=3)", self.k));
        }
        if !(self.material.sigma_ext > 0.0 && self.material.sigma_ext.is_finite()) {
            return bad("material.sigma_ext must be positive".into());
        }
        if self.material.ratios.is_empty()
            || self
                .material
                .ratios
                .iter()
                .any(|r| !(*r > 0.0 && r.is_finite()))
        {
            return bad("material.ratios must be a non-empty list of positive numbers".into());
        }
        if !(1..=2).contains(&self.material.patch_degree) {
            return bad("material.patch_degree must be 1 or 2".into());
        }
        if let Eta::Value(v) = self.penalty.eta {
            if !(v > 0.0 && v.is_finite()) {
                return bad("penalty.eta must be positive".into());
            }
        }
        if self.ldm.steps0 == 0 {
            return bad("ldm.steps0 must be at least 1".into());
        }
        if !(self.ldm.t_final > 0.0 && self.ldm.t_c > 0.0)
            || self.ldm.capacitance.is_some_and(|c| !(c > 0.0))
        {
            return bad("ldm times and capacitance must be positive".into());
        }
        let aligned = matches!(self.case, Case::Square | Case::Patch)
            && self.mesh.family != MeshFamily::Triangular;
        if aligned && !self.mesh.base.is_multiple_of(4) {
            return bad(
                "square interfaces on quadrilateral meshes need mesh.base divisible by 4".into(),
            );
        }
        Ok(())
    }

    /// Background cells per side on every level.
    pub fn level_sizes(&self) -> Vec<usize> {
        (0..self.mesh.levels).map(|l| self.mesh.base << l).collect()
    }

    pub fn scenario(&self, ratio: f64) -> Result<Scenario> {
        let mut s = match self.case {
            Case::Patch => Scenario::patch(ratio, self.material.patch_degree)?,
            c => Scenario::new(c, ratio)?,
        };
        s.sigma_ext = self.material.sigma_ext;
        s.sigma_int = ratio * self.material.sigma_ext;
        if self.case == Case::LdmRelaxation {
            match self.ldm.capacitance {
                Some(c) => s.capacitance = c,
                None => s.set_relaxation_time(self.ldm.t_c),
            }
        }
        Ok(s)
    }

    pub fn study_settings(&self, refinement: u32) -> StudySettings {
        StudySettings {
            k: self.k,
            family: self.mesh.family,
            levels: self.level_sizes(),
            refinement,
            eta: self.penalty.eta.value(),
            seed: self.seed,
        }
    }

    pub fn ldm_settings(&self, refinement: u32) -> LdmStudySettings {
        LdmStudySettings {
            k: self.k,
            family: self.mesh.family,
            levels: self.level_sizes(),
            refinement,
            steps0: self.ldm.steps0,
            t_final: self.ldm.t_final,
            eta: self.penalty.eta.value(),
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_document() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.level_sizes(), vec![8, 16, 32, 64]);
    }

    #[test]
    fn round_trip() {
        let text = r#"
case = "ldm-relaxation"
k = 1
seed = 3

[mesh]
family = "triangular"
base = 4
levels = 2
refinements = [2]

[material]
ratios = [0.1]

[penalty]
eta = 12.5

[ldm]
capacitance = 0.5
steps0 = 16

[output]
dir = "results/ldm"
snapshots = true
"#;
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.case, Case::LdmRelaxation);
        assert_eq!(c.penalty.eta, Eta::Value(12.5));
        assert_eq!(c.ldm.capacitance, Some(0.5));
        let again = RunConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_toml(), c.to_toml());
        let auto = RunConfig::default();
        assert!(auto.to_toml().contains("eta = \"auto\""));
        assert_eq!(RunConfig::parse(&auto.to_toml()).unwrap(), auto);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "case = \"hexagon\"",
            "k = 9",
            "[mesh]\nlevels = 0",
            "[mesh]\nbase = 6",
            "[material]\nratios = []",
            "[material]\nratios = [-1.0]",
            "[penalty]\neta = \"big\"",
            "[penalty]\neta = -1.0",
            "[ldm]\nsteps0 = 0",
            "colour = \"red\"",
        ] {
            match RunConfig::parse(text) {
                Err(Error::Config(_)) => {}
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn scenario_and_settings() {
        let mut c = RunConfig {
            case: Case::LdmRelaxation,
            ..RunConfig::default()
        };
        c.material.sigma_ext = 2.0;
        let s = c.scenario(0.1).unwrap();
        assert!((s.sigma_int - 0.2).abs() < 1e-15);
        assert!((s.relaxation_time() - 1.0).abs() < 1e-14);
        c.ldm.capacitance = Some(0.25);
        assert_eq!(c.scenario(0.1).unwrap().capacitance, 0.25);
        let st = c.study_settings(2);
        assert_eq!((st.refinement, st.seed, st.eta), (2, 7, None));
        assert_eq!(c.ldm_settings(2).steps(1), 32);
        let l = RunConfig::ldm_default();
        l.validate().unwrap();
        assert_eq!(l.ldm_settings(2), LdmStudySettings::default());
    }
}
