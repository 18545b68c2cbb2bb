//! Output directory with all-or-nothing overwrite protection.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use dupaudit::{encode_corpus, Corpus, Format};

use crate::CliError;

/// Files are staged in memory and written by [`Staged::commit`], after every
/// target has been checked, so a refused run leaves nothing behind.
pub struct Staged {
    root: PathBuf,
    force: bool,
    files: BTreeMap<PathBuf, Vec<u8>>,
}

impl Staged {
    pub fn new(root: &Path, force: bool) -> Self {
        Staged {
            root: root.to_path_buf(),
            force,
            files: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, name: impl AsRef<Path>, bytes: impl Into<Vec<u8>>) {
        self.files.insert(self.root.join(name), bytes.into());
    }

    pub fn add_corpus(&mut self, stem: &str, corpus: &Corpus, format: Format) -> Result<(), CliError> {
        let bytes = encode_corpus(corpus, format).map_err(CliError::internal)?;
        self.add(format!("{stem}.{}", format.extension()), bytes);
        Ok(())
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        if !self.force {
            if let Some(existing) = self.files.keys().find(|p| p.exists()) {
                return Err(CliError::Usage(format!(
                    "{} already exists; pass --force to overwrite",
                    existing.display()
                )));
            }
        }
        let mut written = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)
                    .map_err(|e| CliError::Internal(format!("{}: {e}", parent.display())))?;
            }
            fs::write(&path, bytes).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(written)
    }
}
