//! Report writers: CSV with a header row, JSON pretty-printed with sorted
//! keys. The session tracks every file it creates so a failed run can remove
//! its partial outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub struct OutputSession {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputSession {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("create {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn track(&mut self, name: &str) -> PathBuf {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        path
    }

    /// JSON report with sorted keys and a trailing newline.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.track(name);
        // Round-tripping through Value sorts the object keys.
        let value = serde_json::to_value(value)?;
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("write {}", path.display()))?;
        Ok(())
    }

    /// CSV report; `rows` supplies pre-formatted cells.
    pub fn write_csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.track(name);
        let file = File::create(&path).with_context(|| format!("create {}", path.display()))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(header)?;
        for row in rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Raw line-oriented file (dump output).
    pub fn write_lines<F>(&mut self, name: &str, emit: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
    {
        let path = self.track(name);
        let file = File::create(&path).with_context(|| format!("create {}", path.display()))?;
        let mut writer = BufWriter::new(file);
        emit(&mut writer)?;
        writer.flush()?;
        Ok(())
    }

    /// Remove everything this session wrote.
    pub fn cleanup(&self) {
        for path in &self.written {
            let _ = fs::remove_file(path);
        }
    }
}

/// Shortest round-trip decimal form; empty string for `None`.
pub fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|f| f.to_string()).unwrap_or_default()
}

pub fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
