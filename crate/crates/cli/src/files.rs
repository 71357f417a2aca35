use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use humscribe::{Error, Result};

pub const NOTE_EXTENSIONS: [&str; 3] = ["mid", "midi", "json"];

fn has_extension(path: &Path, exts: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// `path` itself, or the sorted files with one of `exts` directly inside it.
pub fn collect(path: &Path, exts: &[&str]) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        if !path.exists() {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no such file or directory",
            ))
            .at(path));
        }
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(path).map_err(|e| Error::Io(e).at(path))? {
        let p = entry.map_err(|e| Error::Io(e).at(path))?.path();
        if p.is_file() && has_extension(&p, exts) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Files keyed by stem; two files sharing a stem are ambiguous.
pub fn by_stem(files: Vec<PathBuf>) -> Result<BTreeMap<String, PathBuf>> {
    let mut map = BTreeMap::new();
    for f in files {
        if let Some(prev) = map.insert(stem(&f), f.clone()) {
            return Err(Error::InvalidConfig(format!(
                "{} and {} share a name; cannot pair them unambiguously",
                prev.display(),
                f.display()
            )));
        }
    }
    Ok(map)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(e).at(dir))
}
