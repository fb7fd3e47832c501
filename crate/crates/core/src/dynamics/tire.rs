//! Combined-slip tire force with a configurable smoothing curve.

use serde::{Deserialize, Serialize};

use super::curve::Curve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TireConfig {
    /// Scales the lateral slip contribution.
    pub zeta: f64,
    pub slip_curve: Curve,
}

impl TireConfig {
    pub fn new(zeta: f64, s_peak: f64, s_asym: f64, f_asym: f64) -> Result<Self> {
        if !(0.0 < s_peak && s_peak < s_asym) || !(0.0 < f_asym && f_asym <= 1.0) {
            return Err(Error::Validation(format!(
                "tire curve needs 0 < s_peak < s_asym and 0 < f_asym <= 1 (got {s_peak}, {s_asym}, {f_asym})"
            )));
        }
        Ok(TireConfig {
            zeta,
            slip_curve: Curve::new(vec![[0.0, 0.0], [s_peak, 1.0], [s_asym, f_asym]])?,
        })
    }

    /// Slip at which the curve first reaches its maximum.
    pub fn peak_slip(&self) -> f64 {
        let pts = self.slip_curve.points();
        let mut best = pts[0];
        for p in pts {
            if p[1] > best[1] {
                best = *p;
            }
        }
        best[0]
    }
}

impl Default for TireConfig {
    fn default() -> Self {
        TireConfig::new(1.0, 0.1, 1.0, 0.8).expect("default tire curve is valid")
    }
}

pub fn combined_slip(s_long: f64, zeta: f64, delta_eff: f64) -> Result<f64> {
    if delta_eff.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::Domain(format!(
            "effective slip angle {delta_eff} rad must satisfy |delta| < pi/2"
        )));
    }
    let lateral = zeta * delta_eff.tan();
    Ok((s_long * s_long + lateral * lateral).sqrt())
}

pub fn slip_smoothing(s: f64, cfg: &TireConfig) -> f64 {
    cfg.slip_curve.eval(s.max(0.0))
}

/// Longitudinal tire force; its magnitude never exceeds `mu * w_load`.
pub fn tire_longitudinal_force(
    s_long: f64,
    delta_eff: f64,
    mu: f64,
    w_load: f64,
    cfg: &TireConfig,
) -> Result<f64> {
    let s_c = combined_slip(s_long, cfg.zeta, delta_eff)?;
    if s_c == 0.0 {
        return Ok(0.0);
    }
    let f0 = mu * w_load / s_c;
    Ok(s_long * slip_smoothing(s_c, cfg) * f0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combined_slip_examples() {
        assert_eq!(combined_slip(0.1, 1.0, 0.0).unwrap(), 0.1);
        assert_eq!(combined_slip(0.0, 1.0, 0.0).unwrap(), 0.0);
        let expected = (0.09 + 0.1f64.tan().powi(2)).sqrt();
        assert!((combined_slip(0.3, 1.0, 0.1).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.31634).abs() < 1e-5);
        assert!(combined_slip(0.1, 1.0, std::f64::consts::FRAC_PI_2).is_err());
    }

    #[test]
    fn smoothing_curve_anchors() {
        let cfg = TireConfig::default();
        assert_eq!(slip_smoothing(0.0, &cfg), 0.0);
        assert_eq!(slip_smoothing(0.1, &cfg), 1.0);
        assert!((slip_smoothing(0.05, &cfg) - 0.5).abs() < 1e-15);
        assert_eq!(slip_smoothing(3.0, &cfg), 0.8);
        assert!(TireConfig::new(1.0, 0.5, 0.2, 0.8).is_err());
    }

    #[test]
    fn force_examples() {
        let cfg = TireConfig::default();
        assert_eq!(tire_longitudinal_force(0.0, 0.0, 1.0, 4000.0, &cfg).unwrap(), 0.0);
        assert!((tire_longitudinal_force(0.1, 0.0, 1.0, 4000.0, &cfg).unwrap() - 4000.0).abs() < 1e-9);
        assert!((tire_longitudinal_force(0.05, 0.0, 1.0, 4000.0, &cfg).unwrap() - 2000.0).abs() < 1e-9);
        assert!(tire_longitudinal_force(-0.05, 0.0, 1.0, 4000.0, &cfg).unwrap() < 0.0);
    }
}
