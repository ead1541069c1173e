use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes through a temporary file in the destination directory and renames
/// it into place, so readers never observe a partial artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// `<preset>-<kind>-<W>x<H>.<ext>`
pub fn artifact_name(preset: &str, kind: &str, width: usize, height: usize, ext: &str) -> String {
    format!("{preset}-{kind}-{width}x{height}.{ext}")
}
