use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Floats in CSV output: 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Accumulates CSV text in memory before an atomic write.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Self::default();
        c.line(header.iter().map(|s| s.to_string()));
        c
    }

    pub fn line(&mut self, fields: impl IntoIterator<Item = String>) {
        let row: Vec<String> = fields.into_iter().collect();
        let _ = writeln!(self.text, "{}", row.join(","));
    }

    /// Starts a new block, separated by two blank lines.
    pub fn block(&mut self, header: &[&str]) {
        self.text.push_str("\n\n");
        self.line(header.iter().map(|s| s.to_string()));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Writes `contents` to `dir/name` through a temporary file and rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}
