use std::fmt;
use std::path::Path;

use crate::error::Result;
use crate::quantum::noise::NoiseModel;

/// Backend noise used by an experiment.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum NoiseProfile {
    #[default]
    None,
    /// The documented stand-in for hardware noise.
    Synthetic,
    Custom {
        label: String,
        model: NoiseModel,
    },
}

impl NoiseProfile {
    /// `none`, `synthetic`, or a path to a TOML noise file.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.trim() {
            "" | "none" | "ideal" => Ok(NoiseProfile::None),
            "synthetic" | "default" => Ok(NoiseProfile::Synthetic),
            path => Self::from_file(Path::new(path)),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let model = NoiseModel::from_toml_file(path)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        Ok(NoiseProfile::Custom { label, model })
    }

    pub fn model(&self) -> Option<NoiseModel> {
        match self {
            NoiseProfile::None => None,
            NoiseProfile::Synthetic => Some(NoiseModel::synthetic_default()),
            NoiseProfile::Custom { model, .. } => Some(model.clone()),
        }
    }

    pub fn is_noisy(&self) -> bool {
        self.model().is_some_and(|m| !m.is_ideal())
    }

    pub fn label(&self) -> &str {
        match self {
            NoiseProfile::None => "none",
            NoiseProfile::Synthetic => "synthetic",
            NoiseProfile::Custom { label, .. } => label,
        }
    }
}

impl fmt::Display for NoiseProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
