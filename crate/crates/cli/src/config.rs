//! Project configuration: one TOML file naming the corpus, the lemma groups and every
//! analysis parameter, so that a run can be reproduced from the file alone.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use diacorp::chrono::{DEFAULT_MAX_SPAN, DEFAULT_TARGET_MASS};
use diacorp::colloc::{Scope, DEFAULT_WINDOW};
use diacorp::corpus::{validate_groups, GroupError};
use diacorp::{DatePolicy, DsmConfig, EraBounds, LemmaGroup, ParseMode, YearConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    /// Vertical corpus files, relative to the config file.
    pub corpus: Vec<PathBuf>,
    /// Output directory, relative to the config file.
    pub output: Option<PathBuf>,
    pub groups: BTreeMap<String, Vec<String>>,
    pub bins: BinsConfig,
    pub analysis: AnalysisConfig,
    pub dsm: DsmConfig,
    pub parse: ParseConfig,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        ProjectConfig {
            corpus: Vec::new(),
            output: None,
            groups: BTreeMap::new(),
            bins: BinsConfig::default(),
            analysis: AnalysisConfig::default(),
            dsm: DsmConfig::default(),
            parse: ParseConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinsConfig {
    pub target_mass: u64,
    pub date_policy: DatePolicy,
    pub max_span: i32,
}

impl Default for BinsConfig {
    fn default() -> Self {
        BinsConfig { target_mass: DEFAULT_TARGET_MASS, date_policy: DatePolicy::Midpoint, max_span: DEFAULT_MAX_SPAN }
    }
}

impl BinsConfig {
    pub fn year_config(&self) -> YearConfig {
        YearConfig { policy: self.date_policy, max_span: self.max_span }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub window: u32,
    pub scope: Scope,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { window: DEFAULT_WINDOW, scope: Scope::Dated }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParseConfig {
    pub mode: ParseMode,
    pub era_min: i32,
    pub era_max: i32,
}

impl Default for ParseConfig {
    fn default() -> Self {
        let era = EraBounds::default();
        ParseConfig { mode: ParseMode::Strict, era_min: era.min, era_max: era.max }
    }
}

impl ParseConfig {
    pub fn era(&self) -> Result<EraBounds, CliError> {
        if self.era_min > self.era_max {
            return Err(CliError::Usage(format!("era bounds [{}, {}] are inverted", self.era_min, self.era_max)));
        }
        Ok(EraBounds { min: self.era_min, max: self.era_max })
    }
}

impl ProjectConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    /// Reads a config file and resolves its relative paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.corpus = cfg.corpus.iter().map(|p| base.join(p)).collect();
        cfg.output = cfg.output.map(|p| base.join(p));
        Ok(cfg)
    }

    /// All configured groups, validated as a set.
    pub fn lemma_groups(&self) -> Result<Vec<LemmaGroup>, GroupError> {
        let groups = self
            .groups
            .iter()
            .map(|(name, members)| LemmaGroup::new(name, members.iter().map(String::as_str)))
            .collect::<Result<Vec<_>, _>>()?;
        validate_groups(&groups)?;
        Ok(groups)
    }

    /// Resolves a group reference: a configured name, or an inline `name=a,b,c` definition.
    pub fn group(&self, reference: &str) -> Result<LemmaGroup, CliError> {
        if let Some((name, members)) = reference.split_once('=') {
            return Ok(LemmaGroup::new(name, members.split(',').map(str::trim))?);
        }
        let members = self.groups.get(reference).ok_or_else(|| CliError::UnknownGroup(reference.to_string()))?;
        Ok(LemmaGroup::new(reference, members.iter().map(String::as_str))?)
    }

    /// Canonical text of the effective configuration, without paths.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.corpus.clear();
        c.output = None;
        serde_json::to_string(&c).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let c = ProjectConfig::from_toml_str("corpus = [\"a.vert\"]\n[bins]\ntarget_mass = 10\n").unwrap();
        assert_eq!(c.bins.target_mass, 10);
        assert_eq!(c.bins.max_span, 100);
        assert_eq!(c.analysis.window, 5);
        assert_eq!(c.dsm, DsmConfig::default());
    }

    #[test]
    fn full_file() {
        let text = r#"
            corpus = ["x.vert", "y.vert"]
            output = "out"
            [groups]
            storage = ["horreum", "Granarium"]
            grain = ["frumentum"]
            [bins]
            date_policy = "start"
            [analysis]
            window = 3
            scope = "all"
            [dsm]
            weighting = "logdice"
            k = 5
            [parse]
            mode = "lenient"
        "#;
        let c = ProjectConfig::from_toml_str(text).unwrap();
        assert_eq!(c.bins.date_policy, DatePolicy::Start);
        assert_eq!(c.analysis.scope, Scope::All);
        assert_eq!(c.dsm.k, 5);
        assert_eq!(c.parse.mode, ParseMode::Lenient);
        let g = c.group("storage").unwrap();
        assert!(g.contains("granarium"));
        assert_eq!(c.lemma_groups().unwrap().len(), 2);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_groups() {
        assert!(matches!(ProjectConfig::from_toml_str("bogus = 1"), Err(CliError::Config(_))));
        assert!(matches!(ProjectConfig::from_toml_str("[bins]\nwindow = 1"), Err(CliError::Config(_))));
        let c = ProjectConfig::from_toml_str("[groups]\na = [\"x\", \"y\"]\nb = [\"y\"]").unwrap();
        assert!(matches!(c.lemma_groups(), Err(GroupError::Overlap { .. })));
        assert!(matches!(c.group("zzz"), Err(CliError::UnknownGroup(_))));
        assert!(matches!(c.group("q="), Err(CliError::Groups(_))));
        assert_eq!(c.group("q=a, b").unwrap().members().len(), 2);
    }

    #[test]
    fn canonical_ignores_paths() {
        let mut a = ProjectConfig::default();
        let b = a.clone();
        a.corpus.push("elsewhere.vert".into());
        a.output = Some("o".into());
        assert_eq!(a.canonical(), b.canonical());
    }
}
