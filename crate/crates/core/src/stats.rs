//! Error statistics used by both the geometry metrics and the TTC report.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub mean_error: f64,
    pub mae: f64,
    pub rmse: f64,
}

impl ErrorSummary {
    /// Summary of a list of signed errors. Empty input yields all zeros.
    pub fn from_errors(errors: &[f64]) -> Self {
        if errors.is_empty() {
            return ErrorSummary {
                mean_error: 0.0,
                mae: 0.0,
                rmse: 0.0,
            };
        }
        let n = errors.len() as f64;
        let mean_error = errors.iter().sum::<f64>() / n;
        let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
        let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
        ErrorSummary {
            mean_error,
            mae,
            rmse,
        }
    }
}

/// Rounds half away from zero to `decimals` places.
pub fn round_half_away(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    // Nudge so values like 1.005 (stored as 1.00499..) still round up.
    let scaled = x * scale;
    (scaled + scaled.signum() * 1e-9).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_arithmetic() {
        let s = ErrorSummary::from_errors(&[1.0, -1.0, 1.0, -1.0]);
        assert_eq!((s.mae, s.rmse), (1.0, 1.0));
        let s = ErrorSummary::from_errors(&[0.0, 0.0, 0.0, 2.0]);
        assert_eq!((s.mae, s.rmse), (0.5, 1.0));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_away(0.148333, 2), 0.15);
        assert_eq!(round_half_away(-0.201667, 2), -0.2);
        assert_eq!(round_half_away(0.125, 2), 0.13);
        assert_eq!(round_half_away(-0.125, 2), -0.13);
        assert_eq!(round_half_away(0.0, 2), 0.0);
        assert_eq!(round_half_away(2.994, 2), 2.99);
    }
}
