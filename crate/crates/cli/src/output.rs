//! Atomic output: write to a temporary file beside the target, then rename.

use std::io::{self, BufWriter, Write};
use std::path::Path;

use flate2::write::GzEncoder;
use flate2::Compression;
use tempfile::NamedTempFile;

fn temp_beside(path: &Path) -> io::Result<NamedTempFile> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    NamedTempFile::new_in(dir)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    write_atomic_with(path, |w| w.write_all(bytes))
}

/// Runs `fill` against a temporary file and renames it over `path` only if
/// `fill` succeeds. Paths ending in `.gz` are gzip-compressed.
pub fn write_atomic_with(path: &Path, fill: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    let tmp = temp_beside(path)?;
    let file = tmp.as_file().try_clone()?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut enc = GzEncoder::new(BufWriter::new(file), Compression::default());
        fill(&mut enc)?;
        enc.finish()?.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    } else {
        let mut w = BufWriter::new(file);
        fill(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn read_maybe_gz(path: &Path) -> io::Result<Box<dyn io::BufRead>> {
    let (reader, compressed) = wdcprod_core::pipeline::open_chunk(path)?;
    Ok(if compressed {
        Box::new(io::BufReader::new(flate2::read::MultiGzDecoder::new(reader)))
    } else {
        Box::new(reader)
    })
}
