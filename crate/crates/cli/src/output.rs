use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

/// Output files rendered fully in memory before anything touches disk.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(&'static str, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &'static str, bytes: Vec<u8>) {
        self.files.push((name, bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| *n)
    }

    /// Writes each file to a temporary sibling and renames it into place,
    /// so a failed run never leaves a truncated file behind.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let fail = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Output { path, source }
        };
        fs::create_dir_all(dir).map_err(fail(dir))?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let target = dir.join(name);
            let mut tmp = NamedTempFile::new_in(dir).map_err(fail(&target))?;
            tmp.write_all(bytes).map_err(fail(&target))?;
            tmp.as_file().sync_all().map_err(fail(&target))?;
            tmp.persist(&target).map_err(|e| CliError::Output {
                path: target.clone(),
                source: e.error,
            })?;
            written.push(target);
        }
        Ok(written)
    }
}
