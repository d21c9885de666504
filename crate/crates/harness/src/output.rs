use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::HarnessError;
use crate::metrics::RunMetrics;

pub const CSV_COLUMNS: [&str; 12] = [
    "protocol",
    "scenario",
    "x",
    "rreq",
    "rrep",
    "rerr",
    "hello",
    "nrl",
    "e2ed_ms",
    "data_sent",
    "data_delivered",
    "seed",
];

/// Six significant digits, trailing zeros trimmed; `NaN` when undefined.
pub fn format_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Round first so a carry into the next decade picks the right layout.
    let v: f64 = format!("{v:.5e}").parse().expect("float round-trip");
    let exp = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{v:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent format");
        return format!("{}e{e}", trim(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    trim(&s).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row(r: &RunMetrics) -> [String; 12] {
    [
        r.protocol.to_string(),
        r.scenario.clone(),
        format_sig(r.x),
        r.rreq.to_string(),
        r.rrep.to_string(),
        r.rerr.to_string(),
        r.hello.to_string(),
        format_sig(r.nrl.unwrap_or(f64::NAN)),
        format_sig(r.e2ed.map_or(f64::NAN, |s| s * 1e3)),
        r.data_sent.to_string(),
        r.data_delivered.to_string(),
        r.seed.to_string(),
    ]
}

/// Header then one row per run, LF line endings.
pub fn write_csv<W: Write>(rows: &[RunMetrics], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[RunMetrics], path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|source| HarnessError::Io { path: path.into(), source })?;
    write_csv(rows, BufWriter::new(file)).map_err(|source| HarnessError::Csv { path: path.into(), source })
}

/// Whitespace-separated numeric columns for gnuplot, with a commented
/// header and the protocol as a leading column index block per protocol.
pub fn emit_dat(rows: &[RunMetrics], path: &Path) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io { path: path.into(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "# {}", CSV_COLUMNS[2..].join(" ")).map_err(io)?;
    let mut last: Option<String> = None;
    for r in rows {
        let tag = r.protocol.to_string();
        if last.as_ref() != Some(&tag) {
            if last.is_some() {
                writeln!(w, "\n").map_err(io)?;
            }
            writeln!(w, "# {tag} {}", r.scenario).map_err(io)?;
            last = Some(tag);
        }
        let cells = row(r);
        writeln!(w, "{}", cells[2..].join(" ")).map_err(io)?;
    }
    w.flush().map_err(io)
}
