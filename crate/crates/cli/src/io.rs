use std::io::Write;
use std::path::Path;

use crate::failure::{CmdResult, Kind, OrFail};

pub fn read(path: &Path) -> CmdResult<String> {
    std::fs::read_to_string(path).or_fail(Kind::Io, format!("reading {}", path.display()))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> CmdResult<()> {
    let ctx = || format!("writing {}", path.display());
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).or_fail(Kind::Io, ctx())?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).or_fail(Kind::Io, ctx())?;
    tmp.write_all(contents.as_bytes()).or_fail(Kind::Io, ctx())?;
    tmp.persist(path).map_err(|e| e.error).or_fail(Kind::Io, ctx())?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Writes to `out` when given, otherwise to stdout.
pub fn emit(out: Option<&Path>, contents: &str) -> CmdResult<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes()).or_fail(Kind::Io, "writing stdout")
        }
    }
}
