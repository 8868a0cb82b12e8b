//! Atomic file output: every artifact is staged in a temp file in the target
//! directory and renamed into place only after all of them were staged.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::CliError;

#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, contents) in self.files {
            let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
            tmp.write_all(contents.as_bytes())
                .and_then(|_| tmp.as_file().sync_all())
                .map_err(|e| CliError::Runtime(format!("{name}: {e}")))?;
            staged.push((tmp, dir.join(name)));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, path) in staged {
            tmp.persist(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(written)
    }
}
