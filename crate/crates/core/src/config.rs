//! Run metadata written into every artifact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::FamilySpec;
use crate::planar::DEFAULT_FACE_CAP;

pub const CAP_ENV: &str = "GRIDWEAVER_CAP";
pub const DEFAULT_WINDOW_CAP: usize = 512;

/// Search limits. `window` bounds every ball radius and ray depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub window: usize,
    pub scale: usize,
    pub effort: usize,
    pub face_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            window: DEFAULT_WINDOW_CAP,
            scale: 8,
            effort: 10_000,
            face_cap: DEFAULT_FACE_CAP,
        }
    }
}

impl Caps {
    /// Defaults, with the window cap taken from `GRIDWEAVER_CAP` when set.
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        if let Ok(v) = std::env::var(CAP_ENV) {
            caps.window = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{CAP_ENV} must be a positive integer, got {v:?}")))?;
        }
        Ok(caps)
    }

    pub fn check_window(&self, radius: usize, what: &str) -> Result<()> {
        if radius > self.window {
            return Err(Error::WindowExhausted(format!(
                "{what} needs radius {radius}, above the window cap {}",
                self.window
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub graph: Option<FamilySpec>,
    pub params: BTreeMap<String, Value>,
    pub caps: Caps,
    pub outputs: Vec<String>,
    /// Nothing is randomized; kept for the file format.
    pub seed: u64,
    pub version: String,
}

impl RunConfig {
    pub fn new(command: &str, graph: Option<FamilySpec>, caps: Caps) -> Self {
        RunConfig {
            command: command.to_owned(),
            graph,
            params: BTreeMap::new(),
            caps,
            outputs: Vec::new(),
            seed: 0,
            version: env!("CARGO_PKG_VERSION").to_owned(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }
}
