//! Risk spectra `φ(p)`, their cumulative weights `Φ(p) = ∫₀ᵖ φ`, and the
//! utility functions the parametric spectra are derived from.
//!
//! | kind        | `φ(p)`                          | `Φ(p)`                                  |
//! |-------------|---------------------------------|-----------------------------------------|
//! | exponential | `k e^{−k(1−p)} / (1 − e^{−k})`  | `(e^{−k(1−p)} − e^{−k}) / (1 − e^{−k})` |
//! | power, γ<1  | `γ (1−p)^{γ−1}`                 | `1 − (1−p)^γ`                           |
//! | power, γ>1  | `γ p^{γ−1}`                     | `p^γ`                                   |
//! | ES(α)       | `1/(1−α)` on `[α, 1]`           | `max(0, p−α)/(1−α)`                     |
//! | VaR(α)      | Dirac mass at `α`               | step at `α`                             |
//!
//! The normalizing constant (`k/(1−e^{−k})`, `γ`) is always derived from the
//! shape parameter and never stored.

use std::fmt;

use crate::error::{Result, SrmError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumKind {
    VarDirac { alpha: f64 },
    EsStep { alpha: f64 },
    Exponential { k: f64 },
    PowerLow { gamma: f64 },
    PowerHigh { gamma: f64 },
}

/// The parametric families that can be swept over their parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumFamily {
    Exponential,
    PowerLow,
    PowerHigh,
}

impl SpectrumFamily {
    pub fn parameter_name(self) -> &'static str {
        match self {
            SpectrumFamily::Exponential => "k",
            SpectrumFamily::PowerLow | SpectrumFamily::PowerHigh => "gamma",
        }
    }

    pub fn spectrum(self, param: f64) -> Result<RiskSpectrum> {
        match self {
            SpectrumFamily::Exponential => RiskSpectrum::exponential(param),
            SpectrumFamily::PowerLow => RiskSpectrum::power_low(param),
            SpectrumFamily::PowerHigh => RiskSpectrum::power_high(param),
        }
    }
}

/// A validated risk spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskSpectrum {
    kind: SpectrumKind,
}

const NEAR_SINGULAR: &str =
    "a value other than 1: gamma = 1 is the near-singular point between the two power families";

impl RiskSpectrum {
    pub fn var(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(SrmError::domain("alpha", alpha, "a probability in (0, 1)"));
        }
        Ok(Self {
            kind: SpectrumKind::VarDirac { alpha },
        })
    }

    pub fn expected_shortfall(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(SrmError::domain("alpha", alpha, "a probability in [0, 1)"));
        }
        Ok(Self {
            kind: SpectrumKind::EsStep { alpha },
        })
    }

    pub fn exponential(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(SrmError::domain("k", k, "a positive finite real"));
        }
        Ok(Self {
            kind: SpectrumKind::Exponential { k },
        })
    }

    pub fn power_low(gamma: f64) -> Result<Self> {
        if gamma == 1.0 {
            return Err(SrmError::domain("gamma", gamma, NEAR_SINGULAR));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(SrmError::domain("gamma", gamma, "a real in (0, 1)"));
        }
        Ok(Self {
            kind: SpectrumKind::PowerLow { gamma },
        })
    }

    pub fn power_high(gamma: f64) -> Result<Self> {
        if gamma == 1.0 {
            return Err(SrmError::domain("gamma", gamma, NEAR_SINGULAR));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(SrmError::domain(
                "gamma",
                gamma,
                "a finite real greater than 1",
            ));
        }
        Ok(Self {
            kind: SpectrumKind::PowerHigh { gamma },
        })
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn is_dirac(&self) -> bool {
        matches!(self.kind, SpectrumKind::VarDirac { .. })
    }

    /// Normalizing constant in front of the shape function; `None` for VaR/ES.
    pub fn normalization(&self) -> Option<f64> {
        match self.kind {
            SpectrumKind::Exponential { k } => Some(k / -(-k).exp_m1()),
            SpectrumKind::PowerLow { gamma } | SpectrumKind::PowerHigh { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Pointwise density `φ(p)` on `[0, 1]`. `PowerLow` returns `+∞` at `p = 1`.
    pub fn weight(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SrmError::domain("p", p, "a probability in [0, 1]"));
        }
        if self.is_dirac() {
            return Err(SrmError::Unsupported(
                "the VaR spectrum is a Dirac mass with no pointwise density; use engine::var"
                    .into(),
            ));
        }
        Ok(self.weight_unchecked(p))
    }

    /// `φ(p)` without range checks; the Dirac kind evaluates to 0.
    pub(crate) fn weight_unchecked(&self, p: f64) -> f64 {
        match self.kind {
            SpectrumKind::VarDirac { .. } => 0.0,
            SpectrumKind::EsStep { alpha } => {
                if p < alpha {
                    0.0
                } else {
                    1.0 / (1.0 - alpha)
                }
            }
            SpectrumKind::Exponential { k } => k * (-k * (1.0 - p)).exp() / -(-k).exp_m1(),
            SpectrumKind::PowerLow { gamma } => {
                if p >= 1.0 {
                    f64::INFINITY
                } else {
                    gamma * (1.0 - p).powf(gamma - 1.0)
                }
            }
            SpectrumKind::PowerHigh { gamma } => gamma * p.powf(gamma - 1.0),
        }
    }

    /// Cumulative weight `Φ(p)`, with `Φ(0) = 0` and `Φ(1) = 1` exactly.
    pub fn cumulative_weight(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        match self.kind {
            SpectrumKind::VarDirac { alpha } => {
                if p < alpha {
                    0.0
                } else {
                    1.0
                }
            }
            SpectrumKind::EsStep { alpha } => (p - alpha).max(0.0) / (1.0 - alpha),
            // e^{−k(1−p)} − e^{−k} = e^{−k(1−p)} (1 − e^{−kp}); no overflow and exact as k → 0.
            SpectrumKind::Exponential { k } => {
                (-k * (1.0 - p)).exp() * -(-k * p).exp_m1() / -(-k).exp_m1()
            }
            SpectrumKind::PowerLow { gamma } => -(gamma * (-p).ln_1p()).exp_m1(),
            SpectrumKind::PowerHigh { gamma } => p.powf(gamma),
        }
    }

    /// Checks nonnegativity and (strict) increasingness of `φ` on an evenly spaced
    /// interior grid of `grid_points` points, and normalization from `Φ`.
    pub fn check_admissibility(&self, grid_points: usize) -> Result<AdmissibilityReport> {
        if grid_points < 3 {
            return Err(SrmError::Config(format!(
                "grid_points must be at least 3, got {grid_points}"
            )));
        }
        let normalization_residual =
            ((self.cumulative_weight(1.0) - self.cumulative_weight(0.0)) - 1.0).abs();
        if self.is_dirac() {
            return Ok(AdmissibilityReport {
                nonnegativity_ok: true,
                normalization_residual,
                strictly_increasing: false,
                weakly_increasing: false,
            });
        }
        let step = 1.0 / (grid_points + 1) as f64;
        let values: Vec<f64> = (1..=grid_points)
            .map(|i| self.weight_unchecked(i as f64 * step))
            .collect();
        Ok(AdmissibilityReport {
            nonnegativity_ok: values.iter().all(|&w| w >= 0.0),
            normalization_residual,
            strictly_increasing: values.windows(2).all(|w| w[1] > w[0]),
            weakly_increasing: values.windows(2).all(|w| w[1] >= w[0]),
        })
    }
}

impl fmt::Display for RiskSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpectrumKind::VarDirac { alpha } => write!(f, "var(alpha={alpha})"),
            SpectrumKind::EsStep { alpha } => write!(f, "es(alpha={alpha})"),
            SpectrumKind::Exponential { k } => write!(f, "exp(k={k})"),
            SpectrumKind::PowerLow { gamma } => write!(f, "power-low(gamma={gamma})"),
            SpectrumKind::PowerHigh { gamma } => write!(f, "power-high(gamma={gamma})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub nonnegativity_ok: bool,
    pub normalization_residual: f64,
    pub strictly_increasing: bool,
    pub weakly_increasing: bool,
}

/// Utility functions behind the exponential and power spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityFamily {
    /// `U(x) = −e^{−kx}`
    Exponential { k: f64 },
    /// `U(x) = (x^{1−γ} − 1)/(1 − γ)`, or `ln x` at `γ = 1`.
    Power { gamma: f64 },
}

impl UtilityFamily {
    pub fn utility(&self, x: f64) -> Result<f64> {
        match *self {
            UtilityFamily::Exponential { k } => Ok(-(-k * x).exp()),
            UtilityFamily::Power { gamma } => {
                if x.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                    return Err(SrmError::domain(
                        "x",
                        x,
                        "a positive outcome for power utility",
                    ));
                }
                if gamma == 1.0 {
                    Ok(x.ln())
                } else {
                    Ok((x.powf(1.0 - gamma) - 1.0) / (1.0 - gamma))
                }
            }
        }
    }

    /// Arrow–Pratt coefficients `(−U''/U', −x U''/U')`.
    pub fn risk_aversion(&self, x: f64) -> Result<RiskAversion> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(SrmError::domain("x", x, "a positive finite outcome"));
        }
        Ok(match *self {
            UtilityFamily::Exponential { k } => RiskAversion {
                absolute: k,
                relative: x * k,
            },
            UtilityFamily::Power { gamma } => RiskAversion {
                absolute: gamma / x,
                relative: gamma,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskAversion {
    pub absolute: f64,
    pub relative: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_kinds() -> Vec<RiskSpectrum> {
        vec![
            RiskSpectrum::var(0.95).unwrap(),
            RiskSpectrum::expected_shortfall(0.95).unwrap(),
            RiskSpectrum::expected_shortfall(0.0).unwrap(),
            RiskSpectrum::exponential(1e-12).unwrap(),
            RiskSpectrum::exponential(5.0).unwrap(),
            RiskSpectrum::exponential(500.0).unwrap(),
            RiskSpectrum::power_low(0.1).unwrap(),
            RiskSpectrum::power_high(20.0).unwrap(),
        ]
    }

    #[test]
    fn weight_examples() {
        let w = |s: Result<RiskSpectrum>, p| s.unwrap().weight(p).unwrap();
        assert_eq!(w(RiskSpectrum::power_low(0.5), 0.0), 0.5);
        assert_eq!(w(RiskSpectrum::power_high(5.0), 1.0), 5.0);
        let e = 1.0 / (1.0 - (-1.0f64).exp());
        assert!((w(RiskSpectrum::exponential(1.0), 1.0) - e).abs() < 1e-15);
        assert!((w(RiskSpectrum::exponential(1.0), 1.0) - 1.5820).abs() < 1e-4);
        assert!((w(RiskSpectrum::expected_shortfall(0.95), 0.99) - 20.0).abs() < 1e-12);
        assert_eq!(w(RiskSpectrum::expected_shortfall(0.95), 0.5), 0.0);
        assert_eq!(w(RiskSpectrum::power_low(0.3), 1.0), f64::INFINITY);
    }

    #[test]
    fn var_has_no_density() {
        let v = RiskSpectrum::var(0.99).unwrap();
        assert!(matches!(v.weight(0.5), Err(SrmError::Unsupported(_))));
    }

    #[test]
    fn weight_rejects_out_of_range() {
        let s = RiskSpectrum::exponential(1.0).unwrap();
        assert!(s.weight(-0.1).is_err());
        assert!(s.weight(1.01).is_err());
    }

    #[test]
    fn constructor_ranges() {
        assert!(RiskSpectrum::power_low(1.0)
            .unwrap_err()
            .to_string()
            .contains("near-singular"));
        assert!(RiskSpectrum::power_high(1.0)
            .unwrap_err()
            .to_string()
            .contains("near-singular"));
        assert!(RiskSpectrum::power_low(1.5).is_err());
        assert!(RiskSpectrum::power_low(0.0).is_err());
        assert!(RiskSpectrum::power_high(0.5).is_err());
        assert!(RiskSpectrum::exponential(0.0).is_err());
        assert!(RiskSpectrum::exponential(f64::INFINITY).is_err());
        assert!(RiskSpectrum::var(0.0).is_err());
        assert!(RiskSpectrum::var(1.0).is_err());
        assert!(RiskSpectrum::expected_shortfall(0.0).is_ok());
        assert!(RiskSpectrum::expected_shortfall(1.0).is_err());
    }

    #[test]
    fn normalization_constants() {
        let e = RiskSpectrum::exponential(2.0).unwrap();
        assert!((e.normalization().unwrap() - 2.0 / (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert_eq!(
            RiskSpectrum::power_high(3.0).unwrap().normalization(),
            Some(3.0)
        );
        assert_eq!(RiskSpectrum::var(0.5).unwrap().normalization(), None);
    }

    #[test]
    fn cumulative_examples() {
        for s in all_kinds() {
            assert_eq!(s.cumulative_weight(1.0), 1.0, "{s}");
            assert_eq!(s.cumulative_weight(0.0), 0.0, "{s}");
        }
        let h = RiskSpectrum::power_high(2.0).unwrap();
        assert_eq!(h.cumulative_weight(0.5), 0.25);
        let l = RiskSpectrum::power_low(0.1).unwrap();
        let expected = 1.0 - 1e-4f64.powf(0.1);
        assert!((l.cumulative_weight(0.9999) - expected).abs() < 1e-12);
        assert!((expected - 0.6019).abs() < 1e-4);
        let v = RiskSpectrum::var(0.9).unwrap();
        assert_eq!(v.cumulative_weight(0.89), 0.0);
        assert_eq!(v.cumulative_weight(0.9), 1.0);
    }

    #[test]
    fn admissibility_examples() {
        let r = RiskSpectrum::exponential(5.0)
            .unwrap()
            .check_admissibility(101)
            .unwrap();
        assert!(r.nonnegativity_ok && r.strictly_increasing && r.normalization_residual <= 1e-12);
        let r = RiskSpectrum::expected_shortfall(0.95)
            .unwrap()
            .check_admissibility(101)
            .unwrap();
        assert!(r.nonnegativity_ok && !r.strictly_increasing && r.weakly_increasing);
        assert!(r.normalization_residual <= 1e-12);
        let r = RiskSpectrum::power_low(0.7)
            .unwrap()
            .check_admissibility(101)
            .unwrap();
        assert!(r.strictly_increasing);
        let r = RiskSpectrum::var(0.95)
            .unwrap()
            .check_admissibility(101)
            .unwrap();
        assert!(!r.strictly_increasing && !r.weakly_increasing);
        assert!(RiskSpectrum::exponential(1.0)
            .unwrap()
            .check_admissibility(2)
            .is_err());
    }

    #[test]
    fn tiny_k_is_flat() {
        let s = RiskSpectrum::exponential(1e-12).unwrap();
        for i in 0..=1000 {
            let w = s.weight(i as f64 / 1000.0).unwrap();
            assert!(w.is_finite() && (w - 1.0).abs() <= 1e-6, "{w}");
        }
        assert!((s.cumulative_weight(0.3) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn large_k_does_not_overflow() {
        let s = RiskSpectrum::exponential(2000.0).unwrap();
        assert!(s.cumulative_weight(0.999).is_finite());
        assert!(s.weight(1.0).unwrap().is_finite());
    }

    #[test]
    fn utility_examples() {
        let exp1 = UtilityFamily::Exponential { k: 1.0 };
        assert_eq!(exp1.utility(0.0).unwrap(), -1.0);
        let log = UtilityFamily::Power { gamma: 1.0 };
        assert!((log.utility(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        let p2 = UtilityFamily::Power { gamma: 2.0 };
        assert!((p2.utility(2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(p2.utility(0.0).is_err());
        assert!(p2.utility(-1.0).is_err());
    }

    #[test]
    fn risk_aversion_examples() {
        let ra = UtilityFamily::Exponential { k: 3.0 }
            .risk_aversion(2.0)
            .unwrap();
        assert_eq!((ra.absolute, ra.relative), (3.0, 6.0));
        let ra = UtilityFamily::Power { gamma: 0.5 }
            .risk_aversion(2.0)
            .unwrap();
        assert_eq!((ra.absolute, ra.relative), (0.25, 0.5));
        let ra = UtilityFamily::Power { gamma: 0.9 }
            .risk_aversion(1.0)
            .unwrap();
        assert_eq!((ra.absolute, ra.relative), (0.9, 0.9));
        assert!(UtilityFamily::Power { gamma: 0.9 }
            .risk_aversion(0.0)
            .is_err());
    }

    fn central_difference(s: &RiskSpectrum, p: f64) -> f64 {
        let h = 1e-6 * p.min(1.0 - p);
        (s.cumulative_weight(p + h) - s.cumulative_weight(p - h)) / (2.0 * h)
    }

    proptest! {
        #[test]
        fn density_matches_cumulative_derivative(
            p in 1e-3f64..(1.0 - 1e-3),
            k in 0.01f64..50.0,
            gl in 0.05f64..0.95,
            gh in 1.05f64..20.0,
        ) {
            for s in [
                RiskSpectrum::exponential(k).unwrap(),
                RiskSpectrum::power_low(gl).unwrap(),
                RiskSpectrum::power_high(gh).unwrap(),
            ] {
                let w = s.weight(p).unwrap();
                let d = central_difference(&s, p);
                prop_assert!((d - w).abs() <= 1e-6 * w.abs().max(1.0), "{s} at {p}: {d} vs {w}");
            }
        }

        #[test]
        fn weights_nonnegative_and_cumulative_monotone(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            for s in all_kinds() {
                if !s.is_dirac() {
                    prop_assert!(s.weight(lo).unwrap() >= 0.0);
                }
                let (a, b) = (s.cumulative_weight(lo), s.cumulative_weight(hi));
                prop_assert!(a <= b && (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
            }
        }

        #[test]
        fn strictly_increasing_families(k in 1e-3f64..200.0, gl in 0.01f64..0.99, gh in 1.01f64..50.0) {
            for s in [
                RiskSpectrum::exponential(k).unwrap(),
                RiskSpectrum::power_low(gl).unwrap(),
                RiskSpectrum::power_high(gh).unwrap(),
            ] {
                let r = s.check_admissibility(200).unwrap();
                prop_assert!(r.nonnegativity_ok && r.strictly_increasing, "{s}");
                prop_assert!(r.normalization_residual <= 1e-12);
            }
        }

        #[test]
        fn relative_is_x_times_absolute(k in 0.0f64..100.0, x in 1e-6f64..1e6) {
            let ra = UtilityFamily::Exponential { k }.risk_aversion(x).unwrap();
            prop_assert_eq!(ra.relative, x * ra.absolute);
        }
    }
}
