//! Per-step result series and their CSV/JSON encodings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SERIES_HEADER: [&str; 11] = [
    "step", "n", "m", "t_fim", "d_fim", "e_fim", "t_lap", "d_lap", "e_lap", "us_fim", "us_lap",
];

/// Columns holding wall-clock measurements, excluded from determinism checks.
pub const TIMING_COLUMNS: [&str; 2] = ["us_fim", "us_lap"];

/// One evaluated graph-growth step. FIM columns are `None` when that route
/// was skipped for size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub step: usize,
    pub n: usize,
    pub m: usize,
    pub t_fim: Option<f64>,
    pub d_fim: Option<f64>,
    pub e_fim: Option<f64>,
    pub t_lap: f64,
    pub d_lap: f64,
    pub e_lap: f64,
    pub us_fim: Option<f64>,
    pub us_lap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesFormat {
    Csv,
    Json,
}

/// `v` with 12 significant digits, in the shorter of fixed and exponent notation.
pub fn format_sig12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig12).unwrap_or_default()
}

pub fn export_series(rows: &[ResultRow], format: SeriesFormat) -> Result<String> {
    check_steps(rows)?;
    match format {
        SeriesFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        SeriesFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(SERIES_HEADER)?;
            for r in rows {
                w.write_record([
                    r.step.to_string(),
                    r.n.to_string(),
                    r.m.to_string(),
                    opt(r.t_fim),
                    opt(r.d_fim),
                    opt(r.e_fim),
                    format_sig12(r.t_lap),
                    format_sig12(r.d_lap),
                    format_sig12(r.e_lap),
                    opt(r.us_fim),
                    format_sig12(r.us_lap),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("ASCII output"))
        }
    }
}

fn check_steps(rows: &[ResultRow]) -> Result<()> {
    match rows.windows(2).find(|w| w[1].step <= w[0].step) {
        Some(w) => Err(Error::InvalidArgument(format!(
            "series steps must increase strictly: {} follows {}",
            w[1].step, w[0].step
        ))),
        None => Ok(()),
    }
}

/// Reads a CSV series written by [`export_series`].
pub fn parse_series_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SERIES_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected series header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |what: &str| Error::Parse {
            line,
            message: format!("malformed {what}"),
        };
        let int = |k: usize| rec[k].parse::<usize>().map_err(|_| bad(SERIES_HEADER[k]));
        let float = |k: usize| rec[k].parse::<f64>().map_err(|_| bad(SERIES_HEADER[k]));
        let opt = |k: usize| if rec[k].is_empty() { Ok(None) } else { float(k).map(Some) };
        rows.push(ResultRow {
            step: int(0)?,
            n: int(1)?,
            m: int(2)?,
            t_fim: opt(3)?,
            d_fim: opt(4)?,
            e_fim: opt(5)?,
            t_lap: float(6)?,
            d_lap: float(7)?,
            e_lap: float(8)?,
            us_fim: opt(9)?,
            us_lap: float(10)?,
        });
    }
    Ok(rows)
}
