//! CSV writers and readers for snapshots, conservation histories, rate tables and scans.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file back
//! recovers the exact values.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{compute_moments, Distribution, PhaseGrid};
use crate::integrators::Trajectory;
use crate::scenarios::{conservation_history, ConvergenceTable, EulerState, RiemannSolution};

pub const SNAPSHOT_HEADER: [&str; 5] = ["x", "rho", "u", "T", "p"];
pub const HISTORY_HEADER: [&str; 5] = ["step", "t", "mass_rel", "mom_rel", "energy_rel"];
pub const RATE_HEADER: [&str; 4] = ["nx_coarse", "nx_fine", "error", "rate"];

/// Macroscopic fields of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub x: f64,
    pub rho: f64,
    pub u: f64,
    pub temperature: f64,
    pub p: f64,
}

impl SnapshotRow {
    pub fn from_euler(x: f64, s: &EulerState) -> Self {
        Self {
            x,
            rho: s.rho,
            u: s.u,
            temperature: s.p / s.rho,
            p: s.p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub step: usize,
    pub t: f64,
    pub mass_rel: f64,
    pub mom_rel: f64,
    pub energy_rel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub nx_coarse: usize,
    pub nx_fine: usize,
    pub error: f64,
    /// Undefined for the first pair and whenever an error vanishes.
    pub rate: Option<f64>,
}

pub fn snapshot_rows(f: &Distribution, grid: &PhaseGrid) -> Result<Vec<SnapshotRow>> {
    let moments = compute_moments(f, grid)?;
    Ok(grid
        .cell_centers()
        .into_iter()
        .zip(moments.cells())
        .map(|(x, m)| SnapshotRow {
            x,
            rho: m.rho,
            u: m.velocity(),
            temperature: m.temperature(),
            p: m.pressure(),
        })
        .collect())
}

/// Exact Euler solution sampled at the cell centres at time `t`.
pub fn exact_rows(
    solution: &RiemannSolution,
    grid: &PhaseGrid,
    x0: f64,
    t: f64,
) -> Vec<SnapshotRow> {
    grid.cell_centers()
        .into_iter()
        .map(|x| SnapshotRow::from_euler(x, &solution.sample_at(x, x0, t)))
        .collect()
}

pub fn history_rows(traj: &Trajectory) -> Vec<HistoryRow> {
    conservation_history(traj)
        .into_iter()
        .map(|(r, e)| HistoryRow {
            step: r.step,
            t: r.t,
            mass_rel: e.values[0],
            mom_rel: e.values[1],
            energy_rel: e.values[2],
        })
        .collect()
}

pub fn rate_rows(table: &ConvergenceTable) -> Vec<RateRow> {
    table
        .errors
        .iter()
        .enumerate()
        .map(|(k, &error)| RateRow {
            nx_coarse: table.resolutions[k],
            nx_fine: table.resolutions[k + 1],
            error,
            rate: if k == 0 {
                None
            } else {
                table.rates.get(k - 1).copied().flatten()
            },
        })
        .collect()
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Writes a header and rows of already formatted fields.
pub fn write_records<P: AsRef<Path>>(path: P, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the rows after checking that the header is exactly `header`.
pub fn read_records<P: AsRef<Path>>(path: P, header: &[&str]) -> Result<Vec<Vec<String>>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Parse(format!(
            "{}: expected header {header:?}, found {found:?}",
            path.display()
        )));
    }
    r.records()
        .map(|rec| Ok(rec?.iter().map(str::to_string).collect()))
        .collect()
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: {field:?} is not a number")))
}

fn parse_usize(field: &str, what: &str) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: {field:?} is not a cell count")))
}

pub fn write_snapshot<P: AsRef<Path>>(path: P, rows: &[SnapshotRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| [r.x, r.rho, r.u, r.temperature, r.p].map(num).to_vec())
        .collect();
    write_records(path, &SNAPSHOT_HEADER, &rows)
}

pub fn read_snapshot<P: AsRef<Path>>(path: P) -> Result<Vec<SnapshotRow>> {
    read_records(path, &SNAPSHOT_HEADER)?
        .iter()
        .map(|r| {
            let v = r
                .iter()
                .zip(SNAPSHOT_HEADER)
                .map(|(f, h)| parse_f64(f, h))
                .collect::<Result<Vec<_>>>()?;
            Ok(SnapshotRow {
                x: v[0],
                rho: v[1],
                u: v[2],
                temperature: v[3],
                p: v[4],
            })
        })
        .collect()
}

pub fn write_history<P: AsRef<Path>>(path: P, rows: &[HistoryRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.step.to_string(),
                num(r.t),
                num(r.mass_rel),
                num(r.mom_rel),
                num(r.energy_rel),
            ]
        })
        .collect();
    write_records(path, &HISTORY_HEADER, &rows)
}

pub fn read_history<P: AsRef<Path>>(path: P) -> Result<Vec<HistoryRow>> {
    read_records(path, &HISTORY_HEADER)?
        .iter()
        .map(|r| {
            Ok(HistoryRow {
                step: parse_usize(&r[0], "step")?,
                t: parse_f64(&r[1], "t")?,
                mass_rel: parse_f64(&r[2], "mass_rel")?,
                mom_rel: parse_f64(&r[3], "mom_rel")?,
                energy_rel: parse_f64(&r[4], "energy_rel")?,
            })
        })
        .collect()
}

pub fn write_rates<P: AsRef<Path>>(path: P, rows: &[RateRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.nx_coarse.to_string(),
                r.nx_fine.to_string(),
                num(r.error),
                r.rate.map(num).unwrap_or_default(),
            ]
        })
        .collect();
    write_records(path, &RATE_HEADER, &rows)
}

pub fn read_rates<P: AsRef<Path>>(path: P) -> Result<Vec<RateRow>> {
    read_records(path, &RATE_HEADER)?
        .iter()
        .map(|r| {
            Ok(RateRow {
                nx_coarse: parse_usize(&r[0], "nx_coarse")?,
                nx_fine: parse_usize(&r[1], "nx_fine")?,
                error: parse_f64(&r[2], "error")?,
                rate: if r[3].trim().is_empty() {
                    None
                } else {
                    Some(parse_f64(&r[3], "rate")?)
                },
            })
        })
        .collect()
}

/// Numeric table such as `gamma,y_star` or `a,max_root`.
pub fn write_table<P: AsRef<Path>>(path: P, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| r.len() != header.len()) {
        return Err(Error::ShapeMismatch {
            expected: header.len(),
            actual: bad.len(),
        });
    }
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().copied().map(num).collect())
        .collect();
    write_records(path, header, &rows)
}

pub fn read_table<P: AsRef<Path>>(path: P, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    read_records(path, header)?
        .iter()
        .map(|r| r.iter().zip(header).map(|(f, h)| parse_f64(f, h)).collect())
        .collect()
}
