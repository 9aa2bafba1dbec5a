//! Per-stage manifests: parameters plus input and output checksums, used to
//! skip stages whose inputs have not changed.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub tool_version: String,
    pub params: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub summary: serde_json::Value,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Every regular file under `dir`, sorted, as paths relative to `dir` with
/// forward slashes. The manifest itself is left out.
pub fn list_files(dir: &Path) -> Result<Vec<String>, CliError> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<(), CliError> {
        for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
            let entry = entry.map_err(|e| CliError::io(dir, e))?;
            let path = entry.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path.strip_prefix(root).expect("under root");
                out.push(rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    if dir.is_dir() {
        walk(dir, dir, &mut out)?;
    }
    out.retain(|p| p != MANIFEST_FILE);
    out.sort();
    Ok(out)
}

/// An input file with the name recorded for it in the manifest.
#[derive(Debug, Clone)]
pub struct StageInput {
    pub label: String,
    pub path: PathBuf,
}

pub fn digest_inputs(inputs: &[StageInput]) -> Result<Vec<FileDigest>, CliError> {
    inputs.iter().map(|i| Ok(FileDigest { path: i.label.clone(), sha256: sha256_file(&i.path)? })).collect()
}

pub fn digest_outputs(dir: &Path) -> Result<Vec<FileDigest>, CliError> {
    list_files(dir)?
        .into_iter()
        .map(|rel| {
            let sha256 = sha256_file(&dir.join(&rel))?;
            Ok(FileDigest { path: rel, sha256 })
        })
        .collect()
}

pub fn read_manifest(dir: &Path) -> Option<Manifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
    serde_json::from_str(&text).ok()
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))
}

/// Whether `dir` already holds the outputs of this exact stage run.
pub fn is_current(dir: &Path, stage: &str, params: &serde_json::Value, inputs: &[FileDigest]) -> bool {
    let Some(m) = read_manifest(dir) else { return false };
    if m.stage != stage || m.tool_version != env!("CARGO_PKG_VERSION") || &m.params != params || m.inputs != inputs {
        return false;
    }
    matches!(digest_outputs(dir), Ok(found) if found == m.outputs)
}
