//! On-disk cache of the eigenform and regularised CM values.
//!
//! A cache file holds the payload as an embedded JSON string together with
//! its SHA-256, so any edit to the payload is caught on load.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::brandt::eigen::QuatEigenform;
use crate::cmtheta::Family;
use crate::error::{Error, Result};

pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Payload {
    pub eigenform: QuatEigenform,
    pub family: Family,
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    version: u32,
    key: String,
    sha256: String,
    payload: String,
}

pub fn digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

pub fn path_for(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("run-{}.json", &digest(key)[..16]))
}

/// Ok(None) when there is no cache file; an error when it exists but is unusable.
pub fn load(dir: &Path, key: &str) -> Result<Option<Payload>> {
    let path = path_for(dir, key);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path)?;
    let env: Envelope =
        serde_json::from_str(&text).map_err(|e| Error::Cache(format!("{}: unreadable ({e})", path.display())))?;
    if env.version != CACHE_VERSION {
        return Err(Error::Cache(format!("{}: version {} (expected {CACHE_VERSION})", path.display(), env.version)));
    }
    if env.key != key {
        return Err(Error::Cache(format!("{}: written for a different configuration", path.display())));
    }
    if digest(&env.payload) != env.sha256 {
        return Err(Error::Cache(format!("{}: checksum mismatch", path.display())));
    }
    let payload =
        serde_json::from_str(&env.payload).map_err(|e| Error::Cache(format!("{}: bad payload ({e})", path.display())))?;
    Ok(Some(payload))
}

pub fn store(dir: &Path, key: &str, payload: &Payload) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let body = serde_json::to_string(payload)?;
    let env = Envelope { version: CACHE_VERSION, key: key.to_string(), sha256: digest(&body), payload: body };
    let path = path_for(dir, key);
    fs::write(&path, serde_json::to_string_pretty(&env)?)?;
    Ok(path)
}
