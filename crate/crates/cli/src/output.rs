//! Artifact files. Every file opens with `#` provenance lines (tool version,
//! config hash, seed) and is assembled in memory, so a failed command
//! leaves no partial files behind.

use crate::config::RunConfig;
use crate::CliError;
use std::io::Write;
use std::path::PathBuf;

pub struct Artifacts {
    dir: PathBuf,
    header: String,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn new(cfg: &RunConfig, command: &str) -> Self {
        let seed = cfg.run.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        let header = format!(
            "# gasball {} {command}\n# config_sha256 {}\n# seed {seed}\n",
            env!("CARGO_PKG_VERSION"),
            cfg.hash()
        );
        Artifacts { dir: cfg.run.out_dir.clone(), header, files: Vec::new() }
    }

    /// Buffers one file; `body` writes everything after the header.
    pub fn add<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<(), CliError>,
    {
        let mut buf = self.header.clone().into_bytes();
        body(&mut buf)?;
        self.files.push((name.to_string(), buf));
        Ok(())
    }

    pub fn add_text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.add(name, |w| Ok(w.write_all(text.as_bytes())?))
    }

    pub fn write(self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir)?;
        for (name, bytes) in self.files {
            std::fs::write(self.dir.join(&name), bytes)?;
        }
        Ok(())
    }
}
