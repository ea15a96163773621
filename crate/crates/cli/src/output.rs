use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliResult;

/// Files produced by a command; nothing touches the disk until every file
/// has been rendered.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, String)>,
    stdout: String,
}

impl Outputs {
    pub fn file(&mut self, path: impl Into<PathBuf>, contents: String) {
        self.files.push((path.into(), contents));
    }

    pub fn print(&mut self, text: String) {
        self.stdout.push_str(&text);
    }

    /// Writes each file through a temporary sibling and a rename, then prints.
    pub fn commit(self) -> CliResult<()> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, contents) in &self.files {
            let dir = parent_dir(path);
            fs::create_dir_all(&dir)?;
            let mut tmp = NamedTempFile::new_in(&dir)?;
            tmp.write_all(contents.as_bytes())?;
            tmp.as_file().sync_all()?;
            staged.push((tmp, path));
        }
        for (tmp, path) in staged {
            tmp.persist(path).map_err(|e| e.error)?;
        }
        print!("{}", self.stdout);
        Ok(())
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}
