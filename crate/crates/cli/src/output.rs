//! CSV and manifest writing. Every file starts with a schema-version
//! comment so downstream plots can sanity-check what they read.

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_file(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

pub struct CsvWriter {
    name: String,
    buf: String,
}

impl CsvWriter {
    pub fn new(name: &str, schema: &str, header: &str) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# schema: {schema} v1");
        let _ = writeln!(buf, "{header}");
        Self {
            name: name.to_string(),
            buf,
        }
    }

    pub fn row(&mut self, fields: std::fmt::Arguments<'_>) {
        let _ = writeln!(self.buf, "{fields}");
    }

    pub fn finish(self, out: &OutputDir) -> Result<(), CliError> {
        out.write_file(&self.name, &self.buf)
    }
}

/// One row helper so call sites stay on one line.
#[macro_export]
macro_rules! csv_row {
    ($w:expr, $($arg:tt)*) => {
        $w.row(format_args!($($arg)*))
    };
}
