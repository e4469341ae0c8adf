//! Artifact writing: stamped headers, temp-then-rename, and rollback of
//! everything a failed command wrote.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{io_error, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped at the top of every artifact.
#[derive(Clone, Debug)]
pub struct Stamp {
    pub seed: u64,
    pub config_digest: String,
}

impl Stamp {
    /// `#` comment lines; every artifact format here treats them as comments.
    pub fn header(&self) -> String {
        format!("# hiflab {VERSION}\n# seed = {}\n# config_digest = {}\n", self.seed, self.config_digest)
    }
}

/// Files written by the current command, newest last.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    stamp: Stamp,
}

impl Outputs {
    pub fn new(dir: &Path, stamp: Stamp) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new(), stamp })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stamp(&self) -> &Stamp {
        &self.stamp
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Write `body` under the stamp header to `name` inside the output directory.
    pub fn write(&mut self, name: &str, body: &str) -> CliResult<PathBuf> {
        let path = self.path(name);
        let text = format!("{}{body}", self.stamp.header());
        self.write_raw(&path, text.as_bytes())?;
        Ok(path)
    }

    /// Atomic write of exact bytes to any path.
    pub fn write_raw(&mut self, path: &Path, bytes: &[u8]) -> CliResult<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
        let result = (|| {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, path)
        })();
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(io_error(path, e));
        }
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Remove everything written so far.
    pub fn rollback(&mut self) {
        for p in self.written.drain(..).rev() {
            let _ = fs::remove_file(p);
        }
    }
}

/// Drop the stamp header and any other `#` lines.
pub fn strip_comments(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).flat_map(|l| [l, "\n"]).collect()
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}
