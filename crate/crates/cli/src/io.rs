use std::fmt;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub enum Failure {
    /// Bad input data or a domain error from the library: exit 1.
    Domain(String),
    /// Bad invocation: exit 2.
    Usage(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(m) | Failure::Usage(m) => f.write_str(m),
        }
    }
}

impl From<vortexlab::Error> for Failure {
    fn from(e: vortexlab::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

pub struct Options {
    pub json: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub csv: Option<PathBuf>,
}

/// Provenance of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub subcommand: String,
    /// SHA-256 of the input JSON text.
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

pub fn hash_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Input text from `--json` (inline when it looks like JSON, else a path)
/// or stdin.
pub fn read_input(opts: &Options) -> Result<String, Failure> {
    match opts.json.as_deref() {
        Some(s) if s.trim_start().starts_with(['{', '[']) => Ok(s.to_string()),
        Some("-") | None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Domain(format!("cannot read stdin: {e}")))?;
            Ok(text)
        }
        Some(path) => fs::read_to_string(path).map_err(|e| Failure::Domain(format!("cannot read {path}: {e}"))),
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Domain(format!("invalid input: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display())))
}

/// Print or write the result, the optional CSV, and the manifest.
pub fn emit<T: Serialize>(
    subcommand: &str,
    opts: &Options,
    input: &str,
    seed: u64,
    result: &T,
    csv: Option<String>,
) -> Result<(), Failure> {
    let mut text =
        serde_json::to_string_pretty(result).map_err(|e| Failure::Domain(format!("cannot encode result: {e}")))?;
    text.push('\n');
    let mut outputs = Vec::new();
    if let (Some(path), Some(csv)) = (&opts.csv, csv) {
        write_file(path, &csv)?;
        outputs.push(path.display().to_string());
    }
    match &opts.out {
        Some(path) => {
            write_file(path, &text)?;
            outputs.insert(0, path.display().to_string());
            let manifest = RunManifest {
                subcommand: subcommand.to_string(),
                config_hash: hash_text(input),
                seed,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                outputs,
            };
            let mut m = serde_json::to_string_pretty(&manifest)
                .map_err(|e| Failure::Domain(format!("cannot encode manifest: {e}")))?;
            m.push('\n');
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            write_file(Path::new(&name), &m)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}
