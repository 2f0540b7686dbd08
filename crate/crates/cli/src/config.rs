//! JSON description of a parameterized heterogeneous system.

use anyhow::{Context, Result, bail};
use hiervote::abstention::effective_size;
use hiervote::{CompetenceRule, ParametricGroup, ParametricSystem, Probability};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub groups: Vec<GroupConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<serde_json::Value>,
}

/// One group. Give either `size`, the number of voters who actually vote, or
/// `base_size`, from which the voting size is `round(base_size (1 - abstention))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_size: Option<u64>,
    pub epsilon_mode: EpsilonMode,
    #[serde(default)]
    pub abstention: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonMode {
    Swept(SweptMode),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptMode {
    Eps,
    OneMinusEps,
}

impl SystemConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("malformed config {}", path.display()))
    }

    #[cfg(test)]
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_system(&self) -> Result<ParametricSystem> {
        let groups = self
            .groups
            .iter()
            .enumerate()
            .map(|(i, g)| g.to_group(i).with_context(|| format!("group {i}")))
            .collect::<Result<Vec<_>>>()?;
        Ok(ParametricSystem::new(groups)?)
    }
}

impl GroupConfig {
    fn to_group(&self, index: usize) -> Result<ParametricGroup> {
        let abstention = Probability::new(self.abstention)?;
        let effective_size = match (self.size, self.base_size) {
            (Some(size), None) => size,
            (None, Some(base)) => effective_size(index, base, abstention)?,
            _ => bail!("give exactly one of `size` and `base_size`"),
        };
        let rule = match self.epsilon_mode {
            EpsilonMode::Swept(SweptMode::Eps) => CompetenceRule::Eps,
            EpsilonMode::Swept(SweptMode::OneMinusEps) => CompetenceRule::OneMinusEps,
            EpsilonMode::Fixed(v) => CompetenceRule::Fixed(Probability::new(v)?),
        };
        Ok(ParametricGroup {
            effective_size,
            rule,
            abstention,
        })
    }
}
