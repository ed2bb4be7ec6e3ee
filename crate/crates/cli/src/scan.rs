//! `scan-u`: one row per grid point, written in grid order, resumable.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::Path;

use bethechain_core::pipeline::{evaluate_point, grid};
use bethechain_core::{ChainParams, ScanPoint};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::exit::{Failure, OK, PARTIAL_SCAN};
use crate::output::{float, header, row};

pub const COLUMNS: [&str; 7] = [
    "U",
    "S_half",
    "S_twobody_as_written",
    "S_twobody_variant",
    "gap",
    "S_half_as_written",
    "E0",
];

fn format_point(p: &ScanPoint) -> String {
    row(&[
        float(p.u),
        float(p.s_half),
        float(p.two_body),
        float(p.two_body_variant),
        float(p.gap),
        float(p.s_half_as_written),
        float(p.e0),
    ])
}

/// Complete rows of an earlier run with the same header. A trailing
/// unterminated line is dropped.
fn completed_rows(text: &str, head: &str, us: &[f64]) -> Result<usize, Failure> {
    let body = text
        .strip_prefix(head)
        .ok_or_else(|| Failure::usage("existing output was written with different parameters; remove it or choose another --out"))?;
    let mut done = 0;
    for line in body.split_inclusive('\n') {
        if !line.ends_with('\n') {
            break;
        }
        let first = line.split(',').next().unwrap_or("");
        if done >= us.len() || first != float(us[done]) {
            return Err(Failure::usage(format!(
                "existing output row {} does not match the grid",
                done + 1
            )));
        }
        done += 1;
    }
    Ok(done)
}

/// Returns the exit code: 0, or 4 if any point failed.
pub fn run(cfg: &RunConfig) -> Result<i32, Failure> {
    let n = cfg.sites()?;
    let (from, to, points) = cfg
        .u_range
        .ok_or_else(|| Failure::usage("scan-u needs --u-from, --u-to and --points"))?;
    let us = grid(from, to, points)?;
    ChainParams::new(n, cfg.j, us[0])?;
    let mps = cfg.mps_config(n);

    let params = [
        ("N", n.to_string()),
        ("J", cfg.j.to_string()),
        ("U range", format!("{from} .. {to}, {points} points")),
        ("method", cfg.method.to_string()),
        ("tol_svd", mps.trunc_tol.to_string()),
        ("chi_max", mps.chi_max.to_string()),
    ];
    let head = header("scan-u", &params, &COLUMNS);

    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(open_resumable(path, &head, &us)?),
        None => {
            io::stdout().write_all(head.as_bytes())?;
            Box::new(io::stdout())
        }
    };
    let start = match &cfg.out {
        Some(path) => completed_rows(&fs::read_to_string(path)?, &head, &us)?,
        None => 0,
    };
    if start > 0 {
        info!("resuming after {start} of {} rows", us.len());
    }

    let chunk = rayon::current_num_threads().max(1) * 2;
    let mut failed = 0;
    for block in us[start..].chunks(chunk) {
        let results: Vec<ScanPoint> = block
            .par_iter()
            .map(|&u| {
                let point = ChainParams::new(n, cfg.j, u).and_then(|p| evaluate_point(&p, cfg.method, mps));
                point.unwrap_or_else(|e| {
                    eprintln!("U = {u}: {e}");
                    ScanPoint::failed(u)
                })
            })
            .collect();
        for p in &results {
            if p.s_half.is_nan() {
                failed += 1;
            }
            sink.write_all(format_point(p).as_bytes())?;
        }
        sink.flush()?;
    }
    if failed > 0 {
        warn!("{failed} of {} points failed", us.len() - start);
        return Ok(PARTIAL_SCAN);
    }
    Ok(OK)
}

/// Creates the file with its header, or validates an existing one and trims
/// a torn final line before appending.
fn open_resumable(path: &Path, head: &str, us: &[f64]) -> Result<fs::File, Failure> {
    if path.exists() {
        let text = fs::read_to_string(path)?;
        let done = completed_rows(&text, head, us)?;
        let keep: usize = head.len()
            + text[head.len()..]
                .split_inclusive('\n')
                .take(done)
                .map(str::len)
                .sum::<usize>();
        let file = OpenOptions::new().write(true).open(path)?;
        file.set_len(keep as u64)?;
        drop(file);
        Ok(OpenOptions::new().append(true).open(path)?)
    } else {
        let mut file = fs::File::create(path)?;
        file.write_all(head.as_bytes())?;
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torn_line_is_not_counted() {
        let us = [0.0, 1.0, 2.0];
        let head = "# h\nU\n";
        let text = format!("{head}{},x\n{},y", float(0.0), float(1.0));
        assert_eq!(completed_rows(&text, head, &us).unwrap(), 1);
        let other = format!("{head}{},x\n", float(5.0));
        assert!(completed_rows(&other, head, &us).is_err());
        assert!(completed_rows("# other\n", head, &us).is_err());
    }
}
