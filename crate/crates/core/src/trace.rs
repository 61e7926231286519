use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Centering,
    Standard,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Centering => "centering",
            Phase::Standard => "standard",
        })
    }
}

/// One checkpoint row of a solve. `mu` is zero in the standard phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub phase: Phase,
    pub lb: f64,
    pub primal_obj: f64,
    pub r_p: f64,
    pub r_d: f64,
    pub rho: f64,
    pub mu: f64,
    pub elapsed_ms: u64,
}

pub const TRACE_HEADER: &str = "iter,phase,lb,primal_obj,r_p,r_d,rho,mu,elapsed_ms";

pub fn write_trace<W: Write>(out: W, rows: &[TraceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(TRACE_HEADER.split(','))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<Result<Vec<TraceRecord>, csv::Error>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_and_header() {
        let rows = vec![TraceRecord {
            iter: 100,
            phase: Phase::Centering,
            lb: 1651.5,
            primal_obj: 1652.25,
            r_p: 1e-3,
            r_d: 2.5e-4,
            rho: 12.0,
            mu: 0.75,
            elapsed_ms: 7,
        }];
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), TRACE_HEADER);
        assert!(text.contains(",centering,"));
        assert_eq!(read_trace(buf.as_slice()).unwrap(), rows);

        let mut empty = Vec::new();
        write_trace(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim(), TRACE_HEADER);
    }
}
