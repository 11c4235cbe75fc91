use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use ttbc_core::harness::SimulationConfig;
use ttbc_core::{ModelSpec64, SystemCoefficients64, ToleranceConfig64};

pub const SCHEMA_VERSION: u32 = 1;

/// Input of `derive`: exactly one of `model` and `coefficients`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeriveInput {
    pub schema_version: u32,
    #[serde(default)]
    pub model: Option<ModelSpec64>,
    #[serde(default)]
    pub coefficients: Option<SystemCoefficients64>,
    #[serde(default)]
    pub tolerances: Option<ToleranceConfig64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateInput {
    pub schema_version: u32,
    pub simulation: SimulationConfig,
}

/// Input of `reflection`: angles in degrees on the unit square.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectionInput {
    pub schema_version: u32,
    pub angles_deg: Vec<f64>,
    #[serde(default = "default_cells")]
    pub cells: usize,
}

fn default_cells() -> usize {
    400
}

pub trait Versioned {
    fn schema_version(&self) -> u32;
}

macro_rules! versioned {
    ($($t:ty),*) => {$(
        impl Versioned for $t {
            fn schema_version(&self) -> u32 {
                self.schema_version
            }
        }
    )*};
}
versioned!(DeriveInput, SimulateInput, ReflectionInput);

/// Raw bytes of an input file with their SHA-256.
pub struct Loaded<T> {
    pub value: T,
    pub sha256: String,
}

pub fn load<T: DeserializeOwned + Versioned>(path: &Path) -> anyhow::Result<Loaded<T>> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let value: T = serde_json::from_slice(&bytes)
        .with_context(|| format!("malformed input {}", path.display()))?;
    if value.schema_version() != SCHEMA_VERSION {
        bail!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            value.schema_version()
        );
    }
    Ok(Loaded { value, sha256 })
}

/// Fails before any work if `path` cannot be created.
pub fn check_output(path: &Path) -> anyhow::Result<()> {
    ensure!(!path.is_dir(), "output {} is a directory", path.display());
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    ensure!(
        parent.is_dir(),
        "output directory {} does not exist",
        parent.display()
    );
    Ok(())
}

pub fn write(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}
