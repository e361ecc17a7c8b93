//! Expansion of input arguments into chunk files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::error::CliError;

fn is_chunk_file(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    [".nq", ".nq.gz", ".gz", ".nquads", ".nt"].iter().any(|ext| name.ends_with(ext))
}

/// Files, directories (their N-Quads files, not recursive) and glob
/// patterns, deduplicated and sorted.
pub fn expand(args: &[String]) -> Result<Vec<PathBuf>, CliError> {
    if args.is_empty() {
        return Err(CliError::Input("no inputs given".into()));
    }
    let mut files = BTreeSet::new();
    for arg in args {
        let path = Path::new(arg);
        if path.is_dir() {
            let entries = std::fs::read_dir(path).map_err(|e| CliError::Input(format!("cannot list {arg}: {e}")))?;
            for entry in entries {
                let p = entry?.path();
                if p.is_file() && is_chunk_file(&p) {
                    files.insert(p);
                }
            }
        } else if path.is_file() {
            files.insert(path.to_path_buf());
        } else if arg.contains(['*', '?', '[']) {
            let matches = glob::glob(arg).map_err(|e| CliError::Usage(format!("bad pattern {arg}: {e}")))?;
            for m in matches {
                let p = m.map_err(|e| CliError::Input(e.to_string()))?;
                if p.is_file() {
                    files.insert(p);
                }
            }
        } else {
            return Err(CliError::Input(format!("input does not exist: {arg}")));
        }
    }
    if files.is_empty() {
        return Err(CliError::Input(format!("no input files found in {}", args.join(" "))));
    }
    Ok(files.into_iter().collect())
}
