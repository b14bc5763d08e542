use std::path::Path;

use serde::Deserialize;

use super::{OracleError, OracleRequest, Purpose};

const DEFAULT_TEMPLATES: &str = include_str!("../../templates/prompts.toml");

/// Prompt wording per request purpose, loaded from TOML.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PromptTemplates {
    pub system: String,
    pub expand_horn: String,
    pub expand_dual: String,
    pub rate: String,
    pub advise: String,
    pub answer: String,
    pub followups: String,
    pub generalize: String,
    pub svo: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TEMPLATES).expect("bundled templates parse")
    }
}

impl PromptTemplates {
    pub fn from_toml(text: &str) -> Result<Self, OracleError> {
        toml::from_str(text).map_err(|e| OracleError::Config(format!("templates: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OracleError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn template_for(&self, req: &OracleRequest) -> &str {
        match req.purpose {
            Purpose::Expand if req.param("mode") == Some("dual") => &self.expand_dual,
            Purpose::Expand => &self.expand_horn,
            Purpose::Rate if req.param("agent") == Some("advisor") => &self.advise,
            Purpose::Rate => &self.rate,
            Purpose::Answer => &self.answer,
            Purpose::Followups => &self.followups,
            Purpose::Generalize => &self.generalize,
            Purpose::Svo => &self.svo,
        }
    }

    /// User message for a request.
    pub fn render(&self, req: &OracleRequest) -> String {
        let trace = if req.trace.is_empty() {
            "(none)".to_string()
        } else {
            req.trace.join(" -> ")
        };
        self.template_for(req)
            .trim()
            .replace("{goal}", &req.goal_text)
            .replace("{trace}", &trace)
            .replace("{parent}", req.param("parent").unwrap_or(""))
            .replace("{answer}", req.param("answer").unwrap_or(""))
    }
}
