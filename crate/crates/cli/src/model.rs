//! On-disk model format. The vectorizer is stored in its own file and bound
//! to the model by a digest of its canonical JSON.

use std::path::{Path, PathBuf};

use emosent::classifier::{
    FittedPipeline, LinearModel, ModelFamily, PipelineSpec, TrainConfig, TrainSummary,
};
use emosent::corpus::DataVariant;
use emosent::tokenizer::TokenizerMode;
use emosent::vectorizer::{TfIdfModel, FORMULA_ID};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::manifest::sha256_str;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorizerRef {
    pub formula_id: String,
    /// SHA-256 of the vectorizer's canonical JSON.
    pub sha256: String,
    pub n_docs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub n_train: usize,
    pub n_bullish: usize,
    pub n_bearish: usize,
    pub seed: u64,
    pub config: TrainConfig,
    pub summary: Option<TrainSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub tool_version: String,
    pub family: ModelFamily,
    pub variant: DataVariant,
    pub tokenizer_mode: TokenizerMode,
    pub n_features: usize,
    pub vectorizer: VectorizerRef,
    pub threshold: f64,
    pub bias: f64,
    pub weights: Vec<f64>,
    pub training: TrainingInfo,
}

/// `dir/model.json` → `dir/model.vectorizer.json`.
pub fn sibling_vectorizer_path(model: &Path) -> PathBuf {
    let stem = model
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    model.with_file_name(format!("{stem}.vectorizer.json"))
}

impl ModelFile {
    pub fn from_pipeline(p: &FittedPipeline, training: TrainingInfo) -> CliResult<Self> {
        Ok(ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            family: p.spec.family,
            variant: p.spec.variant,
            tokenizer_mode: p.spec.mode,
            n_features: p.vectorizer.dim(),
            vectorizer: VectorizerRef {
                formula_id: FORMULA_ID.into(),
                sha256: sha256_str(&p.vectorizer.to_json()?),
                n_docs: p.vectorizer.n_docs(),
            },
            threshold: p.model.threshold,
            bias: p.model.bias,
            weights: p.model.weights.clone(),
            training,
        })
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let m: ModelFile = serde_json::from_str(&text)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(emosent::Error::FormatVersion(m.format_version).into());
        }
        if m.weights.len() != m.n_features {
            return Err(emosent::Error::DimensionMismatch {
                expected: m.n_features,
                found: m.weights.len(),
            }
            .into());
        }
        Ok(m)
    }

    /// Rebuild the pipeline, refusing a vectorizer other than the one trained with.
    pub fn bind(self, vectorizer: TfIdfModel) -> CliResult<FittedPipeline> {
        let found = sha256_str(&vectorizer.to_json()?);
        if self.vectorizer.formula_id != FORMULA_ID {
            return Err(emosent::Error::VectorizerMismatch {
                expected: self.vectorizer.formula_id,
                found: FORMULA_ID.into(),
            }
            .into());
        }
        if found != self.vectorizer.sha256 || vectorizer.dim() != self.n_features {
            return Err(emosent::Error::VectorizerMismatch {
                expected: format!(
                    "sha256 {} ({} features)",
                    self.vectorizer.sha256, self.n_features
                ),
                found: format!("sha256 {found} ({} features)", vectorizer.dim()),
            }
            .into());
        }
        Ok(FittedPipeline {
            spec: PipelineSpec {
                variant: self.variant,
                mode: self.tokenizer_mode,
                family: self.family,
            },
            vectorizer,
            model: LinearModel {
                family: self.family,
                weights: self.weights,
                bias: self.bias,
                threshold: self.threshold,
            },
        })
    }
}
