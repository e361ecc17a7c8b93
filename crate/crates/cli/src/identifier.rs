use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde_json::Value;
use wdcprod_core::language::{CommandIdentifier, LanguageIdentifier, MapIdentifier, TrigramIdentifier};

use crate::config::{IdentifierConfig, IdentifierKind};
use crate::error::CliError;

pub const MODEL_ENV: &str = "WDCPROD_LID_MODEL";

fn model_path(config: &IdentifierConfig) -> Result<PathBuf, CliError> {
    config
        .model
        .clone()
        .or_else(|| std::env::var_os(MODEL_ENV).map(PathBuf::from))
        .ok_or_else(|| CliError::Usage(format!("identifier {:?} needs a model path (--model or {MODEL_ENV})", config.kind)))
}

/// Reads a text-to-code table: either a plain JSON object or a generator
/// ground-truth sidecar.
fn load_table(path: &Path) -> Result<MapIdentifier, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let map = value.pointer("/language/literal_languages").unwrap_or(&value);
    let table: HashMap<String, String> = serde_json::from_value(map.clone())
        .map_err(|e| CliError::Usage(format!("{}: expected a text-to-code object: {e}", path.display())))?;
    Ok(MapIdentifier::new(table))
}

pub fn build(config: &IdentifierConfig) -> Result<Option<Box<dyn LanguageIdentifier>>, CliError> {
    Ok(match config.kind {
        IdentifierKind::None => None,
        IdentifierKind::Trigram => Some(Box::new(TrigramIdentifier::default().with_min_length(config.min_length))),
        IdentifierKind::Fasttext => {
            let model = model_path(config)?;
            let program = config.program.clone().unwrap_or_else(|| PathBuf::from("fasttext"));
            let args = vec!["predict-prob".into(), model.display().to_string(), "-".into(), "1".into()];
            Some(Box::new(CommandIdentifier::new(program, args)))
        }
        IdentifierKind::Command => {
            let program = config
                .program
                .clone()
                .ok_or_else(|| CliError::Usage("identifier \"command\" needs a program".into()))?;
            Some(Box::new(CommandIdentifier::new(program, config.args.clone())))
        }
        IdentifierKind::Table => Some(Box::new(load_table(&model_path(config)?)?)),
    })
}
