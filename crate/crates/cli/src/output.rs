use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::CliError;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to a temporary file beside `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Renders `copy fidelity` rows with six decimals.
pub fn plot_data(series: &[(usize, f64)]) -> Result<String, CliError> {
    if series.is_empty() {
        return Err(CliError::EmptySeries);
    }
    Ok(series.iter().map(|(i, f)| format!("{i} {f:.6}\n")).collect())
}

/// Two-column fidelity-versus-copy file, one row per copy.
pub fn emit_plot_data(series: &[(usize, f64)], path: &Path) -> Result<(), CliError> {
    write_atomic(path, plot_data(series)?.as_bytes())
}
