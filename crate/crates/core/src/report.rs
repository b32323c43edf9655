//! CSV writers for count tables, probability tables, scans and swap reports.
//!
//! Floats use Rust's shortest round-trip formatting, so identical inputs give
//! byte-identical files.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::experiment::Outcome;
use crate::montecarlo::CountTable;
use crate::swap::SwapReport;

pub fn write_counts_csv<W: Write>(mut w: W, table: &CountTable) -> io::Result<()> {
    writeln!(w, "outcome,count,time_s,seed")?;
    for (o, n) in &table.counts {
        writeln!(w, "{o},{n},{},{}", table.integration_time, table.seed)?;
    }
    Ok(())
}

pub fn write_probabilities_csv<W: Write>(
    mut w: W,
    probs: &BTreeMap<Outcome, f64>,
    time: f64,
    seed: u64,
) -> io::Result<()> {
    writeln!(w, "outcome,probability,time_s,seed")?;
    for (o, p) in probs {
        writeln!(w, "{o},{p},{time},{seed}")?;
    }
    Ok(())
}

/// One delay point of a 45° scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub delay_fs: f64,
    pub counts_pppp: u64,
    pub counts_pppm: u64,
    pub visibility: Option<f64>,
    pub visibility_err: Option<f64>,
    pub expected_pppp: f64,
    pub expected_pppm: f64,
}

pub fn write_delay_scan_csv<W: Write>(mut w: W, rows: &[ScanRow]) -> io::Result<()> {
    writeln!(w, "delay_fs,counts_pppp,counts_pppm,visibility,visibility_err,expected_pppp,expected_pppm")?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.delay_fs,
            r.counts_pppp,
            r.counts_pppm,
            opt(r.visibility),
            opt(r.visibility_err),
            r.expected_pppp,
            r.expected_pppm
        )?;
    }
    Ok(())
}

pub fn write_swap_csv<W: Write>(mut w: W, rows: &[SwapReport]) -> io::Result<()> {
    writeln!(w, "projection,target,probability,fidelity,visibility_45,chsh")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            field(&r.projection),
            r.target,
            r.probability,
            r.fidelity,
            r.visibility_45,
            r.chsh
        )?;
    }
    Ok(())
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_swap_json<W: Write>(w: W, rows: &[SwapReport]) -> io::Result<()> {
    serde_json::to_writer_pretty(w, rows).map_err(io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_csv_layout() {
        let t = CountTable {
            counts: [("HVVH".parse().unwrap(), 101), ("VHHV".parse().unwrap(), 97)].into_iter().collect(),
            integration_time: 6000.0,
            seed: 7,
        };
        let mut buf = Vec::new();
        write_counts_csv(&mut buf, &t).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "outcome,count,time_s,seed\nHVVH,101,6000,7\nVHHV,97,6000,7\n");
    }

    #[test]
    fn swap_labels_with_commas_are_quoted() {
        assert_eq!(field("phi+ (2',3')"), "\"phi+ (2',3')\"");
        assert_eq!(field("plain"), "plain");
    }

    #[test]
    fn scan_csv_leaves_missing_visibility_empty() {
        let row = ScanRow {
            delay_fs: -150.0,
            counts_pppp: 0,
            counts_pppm: 0,
            visibility: None,
            visibility_err: None,
            expected_pppp: 0.5,
            expected_pppm: 0.25,
        };
        let mut buf = Vec::new();
        write_delay_scan_csv(&mut buf, &[row]).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("\n-150,0,0,,,0.5,0.25\n"));
    }
}
