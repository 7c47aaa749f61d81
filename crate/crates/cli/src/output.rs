use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;

use crate::failure::{CmdResult, Failure};

fn parent_of(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Fails early if `dest` exists and may not be replaced.
pub fn ensure_writable_dir(dest: &Path, force: bool) -> CmdResult {
    if dest.exists() && !force {
        return Err(Failure::usage(format!(
            "output directory {} already exists (pass --force to replace it)",
            dest.display()
        )));
    }
    Ok(())
}

/// Writes `files` into a fresh sibling temp directory and renames it to
/// `dest`, so readers never see a half-written run.
pub fn write_dir(dest: &Path, files: &[(&str, String)], force: bool) -> CmdResult {
    ensure_writable_dir(dest, force)?;
    let parent = parent_of(dest);
    fs::create_dir_all(&parent)
        .with_context(|| format!("creating {}", parent.display()))
        .map_err(Failure::Runtime)?;
    let tmp = tempfile::Builder::new()
        .prefix(".proxkit-run-")
        .tempdir_in(&parent)
        .with_context(|| format!("creating a temporary directory in {}", parent.display()))
        .map_err(Failure::Runtime)?;
    for (name, contents) in files {
        fs::write(tmp.path().join(name), contents)?;
    }
    if dest.exists() {
        fs::remove_dir_all(dest)
            .with_context(|| format!("removing {}", dest.display()))
            .map_err(Failure::Runtime)?;
    }
    let staged = tmp.keep();
    fs::rename(&staged, dest)
        .with_context(|| format!("moving results into {}", dest.display()))
        .map_err(|e| {
            let _ = fs::remove_dir_all(&staged);
            Failure::Runtime(e)
        })
}

/// Writes a single file through a temp file and rename.
pub fn write_file(dest: &Path, contents: &str) -> CmdResult {
    let parent = parent_of(dest);
    fs::create_dir_all(&parent)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&parent)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(dest)
        .map_err(|e| Failure::Runtime(anyhow::Error::new(e.error).context(format!("writing {}", dest.display()))))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(anyhow::Error::new(e).context(format!("reading {}", path.display()))))
}
