//! CSV and JSON emission. Floats are written with 17 significant digits so
//! every value round-trips; rows end in `\n`.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::CliResult;

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV sink with a fixed header.
pub struct Table {
    w: csv::Writer<BufWriter<File>>,
    width: usize,
}

impl Table {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<Self> {
        let file = File::create(path)
            .map_err(|e| crate::error::CliError::Io(format!("{}: {e}", path.display())))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(file));
        w.write_record(header)?;
        Ok(Self {
            w,
            width: header.len(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> CliResult<()> {
        debug_assert_eq!(fields.len(), self.width);
        self.w.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.w.flush()?;
        Ok(())
    }
}

/// Collects the files a command writes and the manifest fields.
pub struct Manifest {
    dir: PathBuf,
    files: Vec<String>,
    fields: Map<String, Value>,
}

impl Manifest {
    pub fn new(dir: &Path, command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), Value::from(command));
        fields.insert(
            "versions".into(),
            serde_json::json!({
                "tcollapse": env!("CARGO_PKG_VERSION"),
                "output_format": 1,
            }),
        );
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            fields,
        }
    }

    /// Path of a new output file, recorded in the manifest.
    pub fn file(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }

    /// Writes `manifest.json` (keys sorted, listing itself too).
    pub fn write(mut self) -> CliResult<PathBuf> {
        let path = self.file("manifest.json");
        self.files.sort();
        self.fields.insert("files".into(), Value::from(self.files));
        let mut text = serde_json::to_string_pretty(&Value::Object(self.fields))?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
