use std::io::Write;
use std::path::Path;

use crate::error::CliResult;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub mesh: bool,
}

impl Formats {
    pub fn all() -> Self {
        Formats { json: true, csv: true, mesh: true }
    }

    pub fn parse(list: &[String]) -> Result<Self, String> {
        let mut f = Formats { json: false, csv: false, mesh: false };
        for item in list {
            match item.as_str() {
                "json" => f.json = true,
                "csv" => f.csv = true,
                "mesh" => f.mesh = true,
                other => return Err(format!("unknown format {other:?}; expected json, csv or mesh")),
            }
        }
        Ok(f)
    }
}
