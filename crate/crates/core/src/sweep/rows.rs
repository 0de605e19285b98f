use std::io::Write;

use serde::Serialize;

use crate::real_fmt::{opt, opt_real, real, serialize_opt_real, serialize_real};
use crate::criteria::{ParityClass, Verdict};
use crate::error::{Error, Result};

/// Column order of the sweep CSV.
pub const SWEEP_COLUMNS: [&str; 20] = [
    "pi0",
    "pi1",
    "pi2",
    "pi3",
    "a",
    "b",
    "c",
    "d",
    "N",
    "k",
    "delta",
    "two_lambda",
    "log_margin",
    "verdict",
    "max_M",
    "f_threshold",
    "parity_class",
    "oracle_min_eig",
    "oracle_nppt",
    "agreement",
];

/// One `(channel, N, k)` grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(serialize_with = "serialize_real")]
    pub pi0: f64,
    #[serde(serialize_with = "serialize_real")]
    pub pi1: f64,
    #[serde(serialize_with = "serialize_real")]
    pub pi2: f64,
    #[serde(serialize_with = "serialize_real")]
    pub pi3: f64,
    #[serde(serialize_with = "serialize_real")]
    pub a: f64,
    #[serde(serialize_with = "serialize_real")]
    pub b: f64,
    #[serde(serialize_with = "serialize_real")]
    pub c: f64,
    #[serde(serialize_with = "serialize_real")]
    pub d: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    #[serde(serialize_with = "serialize_real")]
    pub delta: f64,
    #[serde(serialize_with = "serialize_real")]
    pub two_lambda: f64,
    #[serde(serialize_with = "serialize_real")]
    pub log_margin: f64,
    pub verdict: Verdict,
    #[serde(rename = "max_M")]
    pub max_m: Option<u64>,
    #[serde(serialize_with = "serialize_real")]
    pub f_threshold: f64,
    pub parity_class: ParityClass,
    #[serde(serialize_with = "serialize_opt_real")]
    pub oracle_min_eig: Option<f64>,
    pub oracle_nppt: Option<bool>,
    pub agreement: Option<bool>,
}

impl SweepRow {
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            real(self.pi0),
            real(self.pi1),
            real(self.pi2),
            real(self.pi3),
            real(self.a),
            real(self.b),
            real(self.c),
            real(self.d),
            self.n.to_string(),
            self.k.to_string(),
            real(self.delta),
            real(self.two_lambda),
            real(self.log_margin),
            self.verdict.to_string(),
            opt(self.max_m),
            real(self.f_threshold),
            self.parity_class.to_string(),
            opt_real(self.oracle_min_eig),
            opt(self.oracle_nppt),
            opt(self.agreement),
        ]
    }
}

/// Anything that can be written as one CSV record under a fixed header.
pub trait CsvRecord {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
}

impl CsvRecord for SweepRow {
    fn header() -> Vec<&'static str> {
        SWEEP_COLUMNS.to_vec()
    }

    fn record(&self) -> Vec<String> {
        self.csv_record()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<T: CsvRecord, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(T::header()).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.record()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}
