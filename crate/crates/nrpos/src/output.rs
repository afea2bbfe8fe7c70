//! CSV emission.

use std::path::Path;

use crate::error::CliError;
use crate::runner::{MetricsRow, RealizationResult};
use nrpos_core::optimizer::homd::Scheme;

pub const HEADER: [&str; 7] = ["sweep", "scheme", "mean_max_err_m", "p50", "p90", "realizations", "seed"];

/// Summary rows in the given order; a header-only file when empty.
pub fn write_rows(rows: &[MetricsRow], path: &Path) -> Result<(), CliError> {
    write_rows_to(rows, std::fs::File::create(path)?)
}

pub fn write_rows_to<W: std::io::Write>(rows: &[MetricsRow], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<MetricsRow>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Per-realization errors for empirical CDFs.
pub fn write_samples(
    samples: &[(String, Vec<RealizationResult>)],
    schemes: &[Scheme],
    path: &Path,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["sweep", "scheme", "realization", "seed", "max_err_m"])?;
    for (sweep, results) in samples {
        for &s in schemes {
            for r in results {
                w.write_record([
                    sweep.clone(),
                    s.name().to_string(),
                    r.index.to_string(),
                    r.seed.to_string(),
                    r.objectives[s as usize].to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
