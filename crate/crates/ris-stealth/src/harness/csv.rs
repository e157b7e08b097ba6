//! CSV emission for sweep records.
//!
//! Fixed column order, decimal notation with 12 significant digits,
//! newline-terminated. Identical record lists yield byte-identical output.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::sweep::SweepRecord;

pub const CSV_HEADER: &str = "sweep_name,sweep_value,err_proposed_deg,err_exhaustive_deg,\
err_maxinner_deg,nu_proposed_re,nu_proposed_im,snr_achieved_db,candidate_index,trials";

const SIG_DIGITS: i32 = 12;

/// Plain decimal formatting with a fixed count of significant digits.
fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return format!("{:.*}", (SIG_DIGITS - 1) as usize, 0.0);
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS - 1 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

fn format_record(rec: &SweepRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        rec.sweep_name,
        fmt_sig(rec.sweep_value),
        fmt_sig(rec.err_proposed_deg),
        fmt_sig(rec.err_exhaustive_deg),
        fmt_sig(rec.err_maxinner_deg),
        fmt_sig(rec.nu_proposed_re),
        fmt_sig(rec.nu_proposed_im),
        fmt_sig(rec.snr_achieved_db),
        rec.candidate_index,
        rec.trials
    )
}

/// Render records as CSV text (header plus one line per record).
pub fn csv_string(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&format_record(rec));
        out.push('\n');
    }
    out
}

pub fn emit_csv(records: &[SweepRecord], destination: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: destination.to_path_buf(),
        source,
    };
    let mut file = File::create(destination).map_err(io_err)?;
    file.write_all(csv_string(records).as_bytes()).map_err(io_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepRecord {
        SweepRecord {
            sweep_name: "ny".into(),
            sweep_value: 30.0,
            err_proposed_deg: 12.3456789012345,
            err_exhaustive_deg: 13.0,
            err_maxinner_deg: 1.00000000025e-4,
            nu_proposed_re: -1.143728e-3,
            nu_proposed_im: 9.87e-5,
            snr_achieved_db: 59.05,
            candidate_index: 6,
            trials: 1,
        }
    }

    #[test]
    fn empty_list_is_header_only() {
        let text = csv_string(&[]);
        assert_eq!(text, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn fields_round_trip_at_nine_significant_digits() {
        let rec = sample();
        let text = csv_string(&[rec.clone()]);
        let line = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 10);
        assert_eq!(fields[0], "ny");
        let round = |v: f64| format!("{:.9e}", v);
        let checks = [
            (1, rec.sweep_value),
            (2, rec.err_proposed_deg),
            (3, rec.err_exhaustive_deg),
            (4, rec.err_maxinner_deg),
            (5, rec.nu_proposed_re),
            (6, rec.nu_proposed_im),
            (7, rec.snr_achieved_db),
        ];
        for (idx, original) in checks {
            let parsed: f64 = fields[idx].parse().unwrap();
            assert_eq!(round(parsed), round(original), "column {idx}");
        }
        assert_eq!(fields[8], "6");
        assert_eq!(fields[9], "1");
    }

    #[test]
    fn column_order_is_fixed() {
        assert!(CSV_HEADER.starts_with("sweep_name,sweep_value,err_proposed_deg"));
        assert!(CSV_HEADER.ends_with("candidate_index,trials"));
    }

    #[test]
    fn nan_prints_as_sentinel() {
        let mut rec = sample();
        rec.err_exhaustive_deg = f64::NAN;
        let text = csv_string(&[rec]);
        assert!(text.lines().nth(1).unwrap().contains(",NaN,"));
    }

    #[test]
    fn decimal_notation_without_exponent() {
        assert_eq!(fmt_sig(0.5), "0.500000000000");
        assert_eq!(fmt_sig(-1.143728e-3), "-0.00114372800000");
        assert_eq!(fmt_sig(180.0), "180.000000000");
        assert!(!fmt_sig(1e-14).contains('e'));
    }

    #[test]
    fn write_failure_reports_path() {
        let err = emit_csv(&[], Path::new("/nonexistent-dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }
}
