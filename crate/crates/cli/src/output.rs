//! Artifacts are buffered in memory and written only once the command has
//! succeeded, so a failing run leaves nothing behind.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Serialize)]
pub struct Provenance<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub command: &'a str,
    pub config_sha256: &'a str,
    pub seed: u64,
    /// Configuration with all defaults filled in.
    pub resolved_config: serde_json::Value,
    pub artifacts: Vec<String>,
}

pub struct Artifacts {
    comment: String,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn new(command: &str, sha256: &str, seed: u64) -> Self {
        Self {
            comment: format!(
                "# kamdnlw {} command={command} config_sha256={sha256} seed={seed}\n",
                env!("CARGO_PKG_VERSION")
            ),
            files: Vec::new(),
        }
    }

    /// CSV with the provenance comment as its first line.
    pub fn csv(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut Vec<u8>) -> dnlw_kam::Result<()>,
    ) -> Result<()> {
        let mut buf = self.comment.clone().into_bytes();
        body(&mut buf)?;
        self.files.push((name.to_string(), buf));
        Ok(())
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<()> {
        let mut buf = serde_json::to_vec_pretty(value)?;
        buf.push(b'\n');
        self.files.push((name.to_string(), buf));
        Ok(())
    }

    /// Raw JSON text produced by the library.
    pub fn json_text(&mut self, name: &str, text: String) {
        let mut buf = text.into_bytes();
        buf.push(b'\n');
        self.files.push((name.to_string(), buf));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn commit(mut self, dir: &Path, provenance: &Provenance) -> Result<()> {
        self.json("provenance.json", provenance)?;
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}
