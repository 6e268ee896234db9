//! Snapshot file: one header line, one line per library, then the audit
//! log, each line a JSON object.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AuditEntry, Catalog, Library, LibraryError};

pub const SNAPSHOT_FORMAT: &str = "livebib-catalog";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    libraries: usize,
    audit_entries: usize,
    exclusive: Vec<(String, String)>,
}

fn corrupt(msg: impl Into<String>) -> LibraryError {
    LibraryError::CorruptSnapshot(msg.into())
}

impl Catalog {
    pub fn to_snapshot_string(&self) -> String {
        let header = Header {
            format: SNAPSHOT_FORMAT.into(),
            version: SNAPSHOT_VERSION,
            libraries: self.libraries.len(),
            audit_entries: self.audit.len(),
            exclusive: self.exclusive.clone(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for lib in self.libraries.values() {
            out.push_str(&serde_json::to_string(lib).expect("library serializes"));
            out.push('\n');
        }
        for entry in &self.audit {
            out.push_str(&serde_json::to_string(entry).expect("audit entry serializes"));
            out.push('\n');
        }
        out
    }

    /// Parses a snapshot and checks that its audit log replays to the
    /// stored libraries.
    pub fn from_snapshot_str(text: &str) -> Result<Catalog, LibraryError> {
        let mut lines = text.lines();
        let header: Header = lines
            .next()
            .ok_or_else(|| corrupt("empty file"))
            .and_then(|l| serde_json::from_str(l).map_err(|e| corrupt(format!("header: {e}"))))?;
        if header.format != SNAPSHOT_FORMAT || header.version != SNAPSHOT_VERSION {
            return Err(corrupt(format!(
                "unsupported format {} v{}",
                header.format, header.version
            )));
        }
        let mut libraries = Vec::with_capacity(header.libraries);
        for i in 0..header.libraries {
            let line = lines.next().ok_or_else(|| {
                corrupt(format!(
                    "expected {} libraries, found {i}",
                    header.libraries
                ))
            })?;
            let lib: Library = serde_json::from_str(line)
                .map_err(|e| corrupt(format!("library {}: {e}", i + 1)))?;
            libraries.push(lib);
        }
        let mut audit = Vec::with_capacity(header.audit_entries);
        for i in 0..header.audit_entries {
            let line = lines.next().ok_or_else(|| {
                corrupt(format!(
                    "expected {} audit entries, found {i}",
                    header.audit_entries
                ))
            })?;
            let entry: AuditEntry = serde_json::from_str(line)
                .map_err(|e| corrupt(format!("audit entry {}: {e}", i + 1)))?;
            audit.push(entry);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(corrupt("trailing data after audit log"));
        }
        let catalog = Catalog::replay(&audit)?;
        let stored: Vec<&Library> = libraries.iter().collect();
        let replayed: Vec<&Library> = catalog.libraries.values().collect();
        if stored != replayed {
            return Err(corrupt("audit log does not reproduce the stored libraries"));
        }
        if catalog.exclusive != header.exclusive {
            return Err(corrupt("audit log does not reproduce the exclusive pairs"));
        }
        Ok(catalog)
    }

    /// Writes the snapshot atomically (temporary file in the same
    /// directory, then rename).
    pub fn snapshot(&self, path: impl AsRef<Path>) -> Result<(), LibraryError> {
        let path = path.as_ref();
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(self.to_snapshot_string().as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| LibraryError::Io(e.error))?;
        Ok(())
    }

    pub fn restore(path: impl AsRef<Path>) -> Result<Catalog, LibraryError> {
        let text = std::fs::read_to_string(path)?;
        Catalog::from_snapshot_str(&text)
    }
}
