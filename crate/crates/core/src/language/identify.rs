use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use isolang::Language;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Identification {
    pub code: String,
    pub confidence: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum IdentifyError {
    #[error("identifier process failed: {0}")]
    Process(#[from] std::io::Error),
    #[error("unexpected identifier output: {0:?}")]
    Output(String),
}

/// A language identifier.
///
/// Returned codes must be members of [`supported_codes`](Self::supported_codes)
/// (an empty set means the identifier cannot enumerate them) and confidences
/// lie in `[0, 1]`. `Ok(None)` means the identifier abstained.
pub trait LanguageIdentifier: Send + Sync {
    fn name(&self) -> &str;

    fn supported_codes(&self) -> BTreeSet<String>;

    fn identify(&self, text: &str) -> Result<Option<Identification>, IdentifyError>;

    fn identify_batch(&self, texts: &[&str]) -> Vec<Result<Option<Identification>, IdentifyError>> {
        texts.iter().map(|t| self.identify(t)).collect()
    }
}

/// A language code folded into the ISO 639-1 namespace where possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalizedCode {
    pub code: String,
    /// The code is a known ISO 639 language.
    pub mapped: bool,
}

const DEPRECATED: [(&str, &str); 4] = [("iw", "he"), ("in", "id"), ("ji", "yi"), ("nb", "no")];

const BIBLIOGRAPHIC: [(&str, &str); 20] = [
    ("alb", "sq"),
    ("arm", "hy"),
    ("baq", "eu"),
    ("bur", "my"),
    ("chi", "zh"),
    ("cze", "cs"),
    ("dut", "nl"),
    ("fre", "fr"),
    ("geo", "ka"),
    ("ger", "de"),
    ("gre", "el"),
    ("ice", "is"),
    ("mac", "mk"),
    ("mao", "mi"),
    ("may", "ms"),
    ("per", "fa"),
    ("rum", "ro"),
    ("slo", "sk"),
    ("tib", "bo"),
    ("wel", "cy"),
];

/// Normalizes a tag or identifier label. Accepts fastText style
/// `__label__xx` labels, region suffixes, ISO 639-3 and 639-2/B codes.
pub fn normalize_code(raw: &str) -> Option<NormalizedCode> {
    let raw = raw.trim();
    let raw = raw.strip_prefix("__label__").unwrap_or(raw);
    let code = super::reconcile_tag(raw)?;
    let code = DEPRECATED
        .iter()
        .chain(BIBLIOGRAPHIC.iter())
        .find(|(old, _)| *old == code)
        .map_or(code.clone(), |(_, new)| new.to_string());
    let normalized = match code.len() {
        2 => Language::from_639_1(&code).map(|_| code.clone()),
        3 => Language::from_639_3(&code).map(|l| l.to_639_1().unwrap_or(l.to_639_3()).to_string()),
        _ => None,
    };
    Some(match normalized {
        Some(code) => NormalizedCode { code, mapped: true },
        None => NormalizedCode { code, mapped: false },
    })
}

/// Looks texts up in a fixed table. Unknown texts are abstentions. Used as a
/// perfect oracle over planted corpora.
#[derive(Debug, Clone, Default)]
pub struct MapIdentifier {
    table: HashMap<String, String>,
}

impl MapIdentifier {
    pub fn new(table: HashMap<String, String>) -> Self {
        MapIdentifier { table }
    }

    pub fn insert(&mut self, text: impl Into<String>, code: impl Into<String>) {
        self.table.insert(text.into(), code.into());
    }
}

impl LanguageIdentifier for MapIdentifier {
    fn name(&self) -> &str {
        "map"
    }

    fn supported_codes(&self) -> BTreeSet<String> {
        self.table.values().cloned().collect()
    }

    fn identify(&self, text: &str) -> Result<Option<Identification>, IdentifyError> {
        Ok(self.table.get(text).map(|code| Identification {
            code: code.clone(),
            confidence: 1.0,
        }))
    }
}

/// Runs an external classifier that reads one text per line on stdin and
/// prints `<label> <probability>` per line, such as
/// `fasttext predict-prob <model> - 1`.
#[derive(Debug, Clone)]
pub struct CommandIdentifier {
    program: PathBuf,
    args: Vec<String>,
    supported: BTreeSet<String>,
}

impl CommandIdentifier {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        CommandIdentifier {
            program: program.into(),
            args,
            supported: BTreeSet::new(),
        }
    }

    pub fn fasttext(model: &Path) -> Self {
        CommandIdentifier::new(
            "fasttext",
            vec![
                "predict-prob".into(),
                model.display().to_string(),
                "-".into(),
                "1".into(),
            ],
        )
    }

    pub fn with_supported(mut self, codes: BTreeSet<String>) -> Self {
        self.supported = codes;
        self
    }

    fn run(&self, texts: &[&str]) -> Result<Vec<Option<Identification>>, IdentifyError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let input: String = texts
            .iter()
            .map(|t| t.replace(['\n', '\r'], " ") + "\n")
            .collect();
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let stdout = child.stdout.take().expect("stdout is piped");
        let mut out = Vec::with_capacity(texts.len());
        for line in BufReader::new(stdout).lines() {
            out.push(parse_prediction(&line?)?);
        }
        writer
            .join()
            .map_err(|_| IdentifyError::Output("writer thread panicked".into()))??;
        let status = child.wait()?;
        if !status.success() {
            return Err(IdentifyError::Output(format!("exit status {status}")));
        }
        if out.len() != texts.len() {
            return Err(IdentifyError::Output(format!(
                "{} predictions for {} texts",
                out.len(),
                texts.len()
            )));
        }
        Ok(out)
    }
}

fn parse_prediction(line: &str) -> Result<Option<Identification>, IdentifyError> {
    let mut parts = line.split_whitespace();
    let Some(label) = parts.next() else {
        return Ok(None);
    };
    let confidence = match parts.next() {
        Some(p) => p.parse::<f64>().map_err(|_| IdentifyError::Output(line.to_string()))?,
        None => 1.0,
    };
    let code = normalize_code(label).ok_or_else(|| IdentifyError::Output(line.to_string()))?;
    Ok(Some(Identification {
        code: code.code,
        confidence: confidence.clamp(0.0, 1.0),
    }))
}

impl LanguageIdentifier for CommandIdentifier {
    fn name(&self) -> &str {
        "command"
    }

    fn supported_codes(&self) -> BTreeSet<String> {
        self.supported.clone()
    }

    fn identify(&self, text: &str) -> Result<Option<Identification>, IdentifyError> {
        Ok(self.run(&[text])?.pop().flatten())
    }

    fn identify_batch(&self, texts: &[&str]) -> Vec<Result<Option<Identification>, IdentifyError>> {
        if texts.is_empty() {
            return Vec::new();
        }
        match self.run(texts) {
            Ok(found) => found.into_iter().map(Ok).collect(),
            Err(e) => {
                let message = e.to_string();
                texts.iter().map(|_| Err(IdentifyError::Output(message.clone()))).collect()
            }
        }
    }
}
