//! Output directories are built in a hidden sibling and renamed into place
//! once the command succeeds, so a failed run leaves nothing behind.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

pub struct Staged {
    target: PathBuf,
    staging: PathBuf,
    committed: bool,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Core(fakenews_core::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

impl Staged {
    /// Refuses to replace a non-empty directory this tool did not write, or
    /// one holding any of the command's `inputs`.
    pub fn create(target: &Path, inputs: &[&Path]) -> CliResult<Self> {
        if target.exists() {
            let root = fs::canonicalize(target).map_err(|e| io_err(target, e))?;
            if let Some(input) = inputs
                .iter()
                .find(|p| fs::canonicalize(p).is_ok_and(|p| p.starts_with(&root)))
            {
                return Err(CliError::Usage(format!(
                    "output directory {} contains the input {}",
                    target.display(),
                    input.display()
                )));
            }
            let ours = target.join(MANIFEST).is_file();
            let empty = target.is_dir() && fs::read_dir(target).map_err(|e| io_err(target, e))?.next().is_none();
            if !ours && !empty {
                return Err(CliError::Usage(format!(
                    "output path {} exists and was not written by this tool",
                    target.display()
                )));
            }
        }
        let name = target
            .file_name()
            .ok_or_else(|| CliError::Usage(format!("invalid output path {}", target.display())))?;
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(|e| io_err(&parent, e))?;
        let staging = parent.join(format!(".{}.partial-{}", name.to_string_lossy(), std::process::id()));
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(|e| io_err(&staging, e))?;
        }
        fs::create_dir(&staging).map_err(|e| io_err(&staging, e))?;
        Ok(Staged {
            target: target.to_path_buf(),
            staging,
            committed: false,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.staging.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| io_err(&path, e))
    }

    /// Write the manifest and move the directory into place.
    pub fn commit(mut self, command: &str, settings: serde_json::Value) -> CliResult<()> {
        let mut files = Vec::new();
        list_files(&self.staging, Path::new(""), &mut files)?;
        files.sort();
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = json!({
            "command": command,
            "settings": settings,
            "files": files,
            "meta": {"created_unix": created, "tool_version": env!("CARGO_PKG_VERSION")},
        });
        self.write(MANIFEST, &serde_json::to_string_pretty(&manifest)?)?;
        if self.target.exists() {
            fs::remove_dir_all(&self.target).map_err(|e| io_err(&self.target, e))?;
        }
        fs::rename(&self.staging, &self.target).map_err(|e| io_err(&self.target, e))?;
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staged {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.staging);
        }
    }
}

fn list_files(root: &Path, rel: &Path, out: &mut Vec<String>) -> CliResult<()> {
    let dir = root.join(rel);
    for entry in fs::read_dir(&dir).map_err(|e| io_err(&dir, e))? {
        let entry = entry.map_err(|e| io_err(&dir, e))?;
        let rel = rel.join(entry.file_name());
        if entry.path().is_dir() {
            list_files(root, &rel, out)?;
        } else {
            out.push(rel.to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}
