use std::path::{Path, PathBuf};

use serde::Serialize;

pub const USAGE: u8 = 64;
pub const NUMERIC: u8 = 70;
pub const VIOLATED: u8 = 2;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: USAGE,
            message: message.into(),
        }
    }
}

impl From<kgscope::Error> for Failure {
    fn from(e: kgscope::Error) -> Self {
        use kgscope::Error as E;
        let code = match &e {
            E::Config(_) | E::Precondition(_) | E::Io { .. } | E::Json(_) => USAGE,
            E::Quadrature(_) | E::NonFinite { .. } | E::Numeric(_) => NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub config: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub exit_code: u8,
    pub wall_clock_seconds: f64,
}

/// Collects output files under one directory.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Outcome<Self> {
        std::fs::create_dir_all(root)
            .map_err(|e| Failure::usage(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Outcome<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Failure::usage(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(&path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Outcome<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure {
            code: NUMERIC,
            message: format!("serializing {name}: {e}"),
        })?;
        text.push('\n');
        self.write(name, text)
    }

    pub fn finish(mut self, mut manifest: RunManifest) -> Outcome<()> {
        manifest.outputs = std::mem::take(&mut self.written);
        self.write_json("manifest.json", &manifest)
    }
}
