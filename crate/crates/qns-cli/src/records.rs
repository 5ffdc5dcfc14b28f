//! Measurement-record CSV: one row per Alvarez-Suter measurement, columns
//! `set_index,round_r,value_re,value_im`. Values are written with Rust's
//! shortest round-trip float formatting, so re-ingesting a synthetic run's
//! records reproduces its estimates bit for bit.

use std::path::Path;

use num_complex::Complex64;

use crate::config::ConfigError;

pub const HEADER: &str = "set_index,round_r,value_re,value_im";

pub fn write_records(path: &Path, records: &[Vec<Complex64>]) -> std::io::Result<()> {
    let mut out = String::from(HEADER);
    out.push('\n');
    for (set, rec) in records.iter().enumerate() {
        for (k, v) in rec.iter().enumerate() {
            out.push_str(&format!("{set},{},{},{}\n", k + 1, v.re, v.im));
        }
    }
    std::fs::write(path, out)
}

/// Reads and validates records for `n_sets` sets of `n_rounds` rounds each.
pub fn read_records(
    path: &Path,
    n_sets: usize,
    n_rounds: usize,
) -> Result<Vec<Vec<Complex64>>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read records {}: {e}", path.display())))?;
    let mut records = vec![vec![None::<Complex64>; n_rounds]; n_sets];
    let mut count = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.eq_ignore_ascii_case(HEADER)) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(ConfigError(format!(
                "records line {}: expected 4 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse_err = |what: &str| {
            ConfigError(format!("records line {}: bad {what} {:?}", lineno + 1, fields.join(",")))
        };
        let set: usize = fields[0].parse().map_err(|_| parse_err("set_index"))?;
        let round: usize = fields[1].parse().map_err(|_| parse_err("round_r"))?;
        let re: f64 = fields[2].parse().map_err(|_| parse_err("value_re"))?;
        let im: f64 = fields[3].parse().map_err(|_| parse_err("value_im"))?;
        if set >= n_sets || round == 0 || round > n_rounds {
            return Err(ConfigError(format!(
                "records line {}: (set {set}, round {round}) outside {n_sets} sets x {n_rounds} rounds",
                lineno + 1
            )));
        }
        if records[set][round - 1].is_some() {
            return Err(ConfigError(format!(
                "records line {}: duplicate entry for set {set} round {round}",
                lineno + 1
            )));
        }
        records[set][round - 1] = Some(Complex64::new(re, im));
        count += 1;
    }
    if count != n_sets * n_rounds {
        return Err(ConfigError(format!(
            "records hold {count} measurements, expected {} ({} sets x {} rounds)",
            n_sets * n_rounds,
            n_sets,
            n_rounds
        )));
    }
    Ok(records
        .into_iter()
        .map(|row| row.into_iter().map(|v| v.expect("counted")).collect())
        .collect())
}
