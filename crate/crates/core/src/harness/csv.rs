//! Fixed-format CSV emission. All floats are printed as `{:.16e}` (17
//! significant digits), which round-trips `f64` exactly and keeps files
//! byte-comparable across runs.

use std::path::{Path, PathBuf};

use super::HarnessError;

/// The canonical float format for every numeric CSV cell.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV data row, assembled cell by cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    cells: Vec<String>,
}

impl Row {
    pub fn new() -> Row {
        Row { cells: Vec::new() }
    }

    pub fn str(mut self, s: &str) -> Row {
        self.cells.push(s.to_string());
        self
    }

    pub fn int(mut self, v: usize) -> Row {
        self.cells.push(v.to_string());
        self
    }

    pub fn int_u64(mut self, v: u64) -> Row {
        self.cells.push(v.to_string());
        self
    }

    pub fn float(mut self, v: f64) -> Row {
        self.cells.push(fmt_float(v));
        self
    }

    pub fn floats(mut self, vs: &[f64]) -> Row {
        for v in vs {
            self.cells.push(fmt_float(*v));
        }
        self
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Render a header plus rows into one CSV string. Every row must have
/// exactly as many cells as the header has columns.
pub fn render_table(header: &[&str], rows: &[Row]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        assert_eq!(
            row.len(),
            header.len(),
            "row width {} does not match header width {}",
            row.len(),
            header.len()
        );
        out.push_str(&row.cells.join(","));
        out.push('\n');
    }
    out
}

/// Write pre-rendered text to disk, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Write a rendered table to disk, creating parent directories as needed.
pub fn write_table(path: &Path, header: &[&str], rows: &[Row]) -> Result<(), HarnessError> {
    write_text(path, &render_table(header, rows))
}

/// Companion file path: `dir/stem_suffix.csv` next to `dir/stem.csv`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    path.with_file_name(format!("{stem}_{suffix}.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_seventeen_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(-0.5), "-5.0000000000000000e-1");
        assert_eq!(fmt_float(f64::NAN), "NaN");
        let v = 0.1 + 0.2;
        let parsed: f64 = fmt_float(v).parse().unwrap();
        assert_eq!(parsed, v, "format must round-trip f64 exactly");
    }

    #[test]
    fn table_layout() {
        let rows = vec![Row::new().int(0).float(1.5), Row::new().int(1).float(-2.0)];
        let text = render_table(&["k", "v"], &rows);
        assert_eq!(
            text,
            "k,v\n0,1.5000000000000000e0\n1,-2.0000000000000000e0\n"
        );
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn width_mismatch_panics() {
        render_table(&["a", "b"], &[Row::new().int(1)]);
    }

    #[test]
    fn sibling_path_replaces_extension() {
        let p = sibling_path(Path::new("results/run.csv"), "summary");
        assert_eq!(p, Path::new("results/run_summary.csv"));
        let q = sibling_path(Path::new("plain"), "epochs");
        assert_eq!(q, Path::new("plain_epochs.csv"));
    }

    #[test]
    fn write_creates_parent_dirs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/deep/out.csv");
        write_table(&path, &["x"], &[Row::new().float(2.0)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "x\n2.0000000000000000e0\n");
    }
}
