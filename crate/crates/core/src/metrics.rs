//! Error norms and SNR in decibels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: b.len() });
    }
    Ok(())
}

pub fn l2_error(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_len(truth, estimate)?;
    Ok(estimate.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

pub fn max_error(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    check_len(truth, estimate)?;
    Ok(estimate.iter().zip(truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `20 log10(‖reference‖ / ‖perturbed - reference‖)`. A perfect
/// reconstruction gives `+∞`.
pub fn snr_db(reference: &[f64], perturbed: &[f64]) -> Result<f64> {
    check_len(reference, perturbed)?;
    let signal = reference.iter().map(|x| x * x).sum::<f64>().sqrt();
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    let err = l2_error(perturbed, reference)?;
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (signal / err).log10())
}

/// Mean over trials of `output - input` SNR.
pub fn aisnr_db(input_snr: &[f64], output_snr: &[f64]) -> Result<f64> {
    check_len(input_snr, output_snr)?;
    if input_snr.is_empty() {
        return Err(crate::error::invalid("aisnr needs at least one trial"));
    }
    let total: f64 = input_snr.iter().zip(output_snr).map(|(i, o)| o - i).sum();
    Ok(total / input_snr.len() as f64)
}

/// One line of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: String,
    pub l2_error: f64,
    pub max_error: f64,
    pub aisnr_db: f64,
    pub trials: usize,
}

impl MetricsRow {
    pub const CSV_HEADER: &'static str = "method,l2_error,max_error,aisnr_db,trials";

    pub fn to_csv_line(&self) -> String {
        format!("{},{},{},{},{}", self.method, self.l2_error, self.max_error, self.aisnr_db, self.trials)
    }
}

pub fn rows_to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(MetricsRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        assert_eq!(l2_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(l2_error(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(max_error(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert!(l2_error(&[1.0], &[1.0, 2.0]).is_err());
        assert!(max_error(&[1.0], &[]).is_err());
    }

    #[test]
    fn norms_against_second_routine() {
        let a: Vec<f64> = (0..97).map(|i| ((i * 37 % 101) as f64 / 13.0).sin()).collect();
        let b: Vec<f64> = (0..97).map(|i| ((i * 53 % 89) as f64 / 7.0).cos()).collect();
        // scaled accumulation as an independent path
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let scale = diff.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let ssq: f64 = diff.iter().map(|d| (d / scale).powi(2)).sum();
        assert!((l2_error(&a, &b).unwrap() - scale * ssq.sqrt()).abs() < 1e-12);
        assert_eq!(max_error(&a, &b).unwrap(), scale);
    }

    #[test]
    fn snr_values() {
        assert!(snr_db(&[3.0, 4.0], &[3.0, 9.0]).unwrap().abs() < 1e-12);
        assert!((snr_db(&[3.0, 4.0], &[3.0, 4.5]).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(snr_db(&[1.0], &[1.0]).unwrap(), f64::INFINITY);
        assert_eq!(snr_db(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroReference));
    }

    #[test]
    fn snr_scale_invariance() {
        let r = [0.3, -1.2, 2.2, 0.05];
        let p = [0.31, -1.0, 2.0, 0.0];
        let base = snr_db(&r, &p).unwrap();
        for c in [-3.0, 1e-3, 7.5] {
            let rs: Vec<f64> = r.iter().map(|x| c * x).collect();
            let ps: Vec<f64> = p.iter().map(|x| c * x).collect();
            assert!((snr_db(&rs, &ps).unwrap() - base).abs() < 1e-10);
        }
    }

    #[test]
    fn aisnr_values() {
        assert_eq!(aisnr_db(&[10.0, 20.0], &[10.0, 20.0]).unwrap(), 0.0);
        assert!((aisnr_db(&[10.0, 20.0, 5.0], &[13.0, 23.0, 8.0]).unwrap() - 3.0).abs() < 1e-12);
        let a = aisnr_db(&[1.0, 2.0, 3.0], &[2.0, 7.0, 3.5]).unwrap();
        let b = aisnr_db(&[3.0, 1.0, 2.0], &[3.5, 2.0, 7.0]).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(aisnr_db(&[], &[]).is_err());
        assert!(aisnr_db(&[1.0], &[]).is_err());
    }

    #[test]
    fn csv_rows() {
        assert_eq!(rows_to_csv(&[]), "method,l2_error,max_error,aisnr_db,trials\n");
        let row = MetricsRow { method: "Hard".into(), l2_error: 0.5, max_error: 0.25, aisnr_db: 7.0, trials: 3 };
        assert_eq!(row.to_csv_line(), "Hard,0.5,0.25,7,3");
    }
}
