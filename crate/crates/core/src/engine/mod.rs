//! Spectral risk measures, VaR and ES, and the analyses built on them:
//! parameter sweeps, boundary limits, finite-difference sensitivities and
//! coherence checks. Table and figure generation live in [`tables`].

pub mod checks;
pub mod tables;

use std::fmt;

use rayon::prelude::*;

use crate::distributions::{Affine, LossDistribution, QuantileFunction};
use crate::error::{Result, SrmError};
use crate::quadrature::{IntegralDiagnostics, Mode, QuadratureScheme, QuantileGrid};
use crate::spectra::{RiskSpectrum, SpectrumFamily};

/// Results whose captured weight mass is below this carry a warning.
pub const LOW_MASS_THRESHOLD: f64 = 0.999;

/// Parameter used in place of `k → 0`.
pub const K_NEAR_ZERO: f64 = 1e-6;
/// Offset from `γ = 1` used in place of `γ → 1` (either side).
pub const GAMMA_NEAR_ONE_OFFSET: f64 = 1e-6;
/// Parameter used in place of `γ → 0`.
pub const GAMMA_NEAR_ZERO: f64 = 1e-8;

pub const HEAVY_TAIL_WARNING: &str =
    "heavy-tailed loss: value is dominated by the grid endpoints and is grid-sensitive";

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostics {
    Quadrature(IntegralDiagnostics),
    /// No quadrature error: a VaR lookup or an exact order-statistic sum.
    Exact,
}

impl Diagnostics {
    pub fn captured_mass(&self) -> f64 {
        match self {
            Diagnostics::Quadrature(d) => d.captured_mass,
            Diagnostics::Exact => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskMeasureResult {
    pub value: f64,
    pub spectrum: RiskSpectrum,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

impl RiskMeasureResult {
    fn new(
        value: f64,
        spectrum: RiskSpectrum,
        diagnostics: Diagnostics,
        heavy: bool,
    ) -> Result<Self> {
        if !value.is_finite() {
            return Err(SrmError::Numerical(format!(
                "{spectrum} evaluated to a non-finite value ({value})"
            )));
        }
        let mut warnings = Vec::new();
        let mass = diagnostics.captured_mass();
        if mass < LOW_MASS_THRESHOLD {
            warnings.push(format!(
                "integration domain captures only {mass:.6} of the spectrum's weight"
            ));
        }
        if heavy {
            warnings.push(HEAVY_TAIL_WARNING.to_string());
        }
        Ok(Self {
            value,
            spectrum,
            diagnostics,
            warnings,
        })
    }
}

/// Evaluates many spectra against one distribution under one scheme.
///
/// Samples under `ExactSlice` use exact order-statistic weights; everything
/// else goes through a precomputed [`QuantileGrid`].
pub struct Evaluator {
    inner: EvaluatorKind,
    heavy: bool,
}

enum EvaluatorKind {
    Grid(QuantileGrid),
    Exact(Vec<f64>),
}

impl Evaluator {
    pub fn new<Q: QuantileFunction + ?Sized>(dist: &Q, scheme: &QuadratureScheme) -> Result<Self> {
        scheme.validate()?;
        let heavy = dist.heavy_tailed();
        if scheme.mode == Mode::ExactSlice {
            if let Some(xs) = dist.order_statistics() {
                return Ok(Self {
                    inner: EvaluatorKind::Exact(xs.into_owned()),
                    heavy,
                });
            }
        }
        Ok(Self {
            inner: EvaluatorKind::Grid(QuantileGrid::build(dist, scheme)?),
            heavy,
        })
    }

    pub fn srm(&self, spec: &RiskSpectrum) -> Result<RiskMeasureResult> {
        if spec.is_dirac() {
            return Err(SrmError::Unsupported(
                "VaR has no density to integrate; use engine::var".into(),
            ));
        }
        match &self.inner {
            EvaluatorKind::Grid(grid) => {
                let d = grid.integrate(spec)?;
                RiskMeasureResult::new(d.value, *spec, Diagnostics::Quadrature(d), self.heavy)
            }
            EvaluatorKind::Exact(xs) => RiskMeasureResult::new(
                order_statistic_sum(xs, spec),
                *spec,
                Diagnostics::Exact,
                self.heavy,
            ),
        }
    }
}

/// `Σᵢ [Φ(i/n) − Φ((i−1)/n)] · x₍ᵢ₎` over ascending order statistics.
pub fn order_statistic_sum(sorted: &[f64], spec: &RiskSpectrum) -> f64 {
    let n = sorted.len() as f64;
    let mut prev = 0.0;
    let mut total = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let next = spec.cumulative_weight((i + 1) as f64 / n);
        total += (next - prev) * x;
        prev = next;
    }
    total
}

pub fn srm<Q: QuantileFunction + ?Sized>(
    dist: &Q,
    spec: &RiskSpectrum,
    scheme: &QuadratureScheme,
) -> Result<RiskMeasureResult> {
    if spec.is_dirac() {
        return Err(SrmError::Unsupported(
            "VaR has no density to integrate; use engine::var".into(),
        ));
    }
    Evaluator::new(dist, scheme)?.srm(spec)
}

pub fn var(dist: &LossDistribution, alpha: f64) -> Result<RiskMeasureResult> {
    let spectrum = RiskSpectrum::var(alpha)?;
    let value = dist.quantile(alpha)?;
    RiskMeasureResult::new(value, spectrum, Diagnostics::Exact, dist.heavy_tailed())
}

pub fn es<Q: QuantileFunction + ?Sized>(
    dist: &Q,
    alpha: f64,
    scheme: &QuadratureScheme,
) -> Result<RiskMeasureResult> {
    srm(dist, &RiskSpectrum::expected_shortfall(alpha)?, scheme)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub family: SpectrumFamily,
    /// `(parameter, SRM)` with strictly ascending parameters.
    pub points: Vec<(f64, f64)>,
    pub scheme: QuadratureScheme,
}

impl SweepCurve {
    pub fn parameter_name(&self) -> &'static str {
        self.family.parameter_name()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

pub fn sweep<Q: QuantileFunction + ?Sized>(
    dist: &Q,
    family: SpectrumFamily,
    params: &[f64],
    scheme: &QuadratureScheme,
) -> Result<SweepCurve> {
    if params.is_empty() {
        return Err(SrmError::Config(
            "sweep needs at least one parameter".into(),
        ));
    }
    if params.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SrmError::Config(
            "sweep parameters must be strictly ascending".into(),
        ));
    }
    let spectra = params
        .iter()
        .map(|&x| family.spectrum(x))
        .collect::<Result<Vec<_>>>()?;
    let eval = Evaluator::new(dist, scheme)?;
    let values = spectra
        .par_iter()
        .map(|s| eval.srm(s).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepCurve {
        family,
        points: params.iter().copied().zip(values).collect(),
        scheme: *scheme,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    /// Exponential spectrum, `k → 0`: tends to the mean loss.
    ExpKToZero,
    /// Power spectrum from below, `γ → 1`: tends to the mean loss.
    PowerLowGammaToOne,
    /// Power spectrum from above, `γ → 1`: tends to the mean loss.
    PowerHighGammaToOne,
    /// Power spectrum, `γ → 0`: zero on the truncated grid, the essential
    /// supremum of the loss for the untruncated integral.
    PowerLowGammaToZero,
}

impl LimitKind {
    pub fn spectrum(self) -> RiskSpectrum {
        let s = match self {
            LimitKind::ExpKToZero => RiskSpectrum::exponential(K_NEAR_ZERO),
            LimitKind::PowerLowGammaToOne => RiskSpectrum::power_low(1.0 - GAMMA_NEAR_ONE_OFFSET),
            LimitKind::PowerHighGammaToOne => RiskSpectrum::power_high(1.0 + GAMMA_NEAR_ONE_OFFSET),
            LimitKind::PowerLowGammaToZero => RiskSpectrum::power_low(GAMMA_NEAR_ZERO),
        };
        s.expect("limit parameters are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitReference {
    Mean(f64),
    /// Grid integral of `q` alone, for distributions without a mean.
    TruncatedMean(f64),
    Zero,
    EssentialSupremum(f64),
    Undefined,
}

impl LimitReference {
    pub fn value(&self) -> Option<f64> {
        match *self {
            LimitReference::Mean(v)
            | LimitReference::TruncatedMean(v)
            | LimitReference::EssentialSupremum(v) => Some(v),
            LimitReference::Zero => Some(0.0),
            LimitReference::Undefined => None,
        }
    }
}

impl fmt::Display for LimitReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitReference::Mean(v) => write!(f, "mean {v}"),
            LimitReference::TruncatedMean(v) => write!(f, "grid mean {v}"),
            LimitReference::Zero => f.write_str("0"),
            LimitReference::EssentialSupremum(v) => write!(f, "esssup {v}"),
            LimitReference::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitCheck {
    pub kind: LimitKind,
    pub estimate: RiskMeasureResult,
    pub reference: LimitReference,
    pub warnings: Vec<String>,
}

impl LimitCheck {
    pub fn gap(&self) -> Option<f64> {
        self.reference
            .value()
            .map(|r| (self.estimate.value - r).abs())
    }
}

pub fn limit_check(
    dist: &LossDistribution,
    kind: LimitKind,
    scheme: &QuadratureScheme,
) -> Result<LimitCheck> {
    let eval = Evaluator::new(dist, scheme)?;
    let estimate = eval.srm(&kind.spectrum())?;
    let mut warnings = Vec::new();
    let reference = match kind {
        LimitKind::PowerLowGammaToZero => match scheme.mode {
            Mode::ReproGrid => {
                warnings.push(format!(
                    "the untruncated integral tends to the essential supremum of the loss ({}), not 0",
                    dist.support().1
                ));
                LimitReference::Zero
            }
            Mode::ExactSlice => {
                warnings.push(
                    "the truncated table grid tends to 0 here; the exact integral tends to the essential supremum"
                        .into(),
                );
                let top = dist.support().1;
                if top.is_finite() {
                    LimitReference::EssentialSupremum(top)
                } else {
                    LimitReference::Undefined
                }
            }
        },
        _ => match dist.mean() {
            Some(m) => LimitReference::Mean(m),
            None => {
                let es0 = eval.srm(&RiskSpectrum::expected_shortfall(0.0)?)?;
                LimitReference::TruncatedMean(es0.value)
            }
        },
    };
    Ok(LimitCheck {
        kind,
        estimate,
        reference,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    pub param: f64,
    pub step: f64,
    pub central_difference: f64,
    pub shifted_central_difference: f64,
    pub shift: f64,
}

/// Default central-difference step for a parameter value.
pub fn default_step(param: f64) -> f64 {
    1e-4 * param.abs().max(1.0)
}

/// Central difference of the SRM in the family parameter, unshifted and with
/// every quantile shifted by `shift`. Only `ExactSlice` is accepted: the table
/// grid's lost weight mass would make the derivative a grid artifact.
pub fn srm_derivative(
    dist: &LossDistribution,
    family: SpectrumFamily,
    param: f64,
    step: f64,
    shift: f64,
    scheme: &QuadratureScheme,
) -> Result<DerivativeReport> {
    if scheme.mode != Mode::ExactSlice {
        return Err(SrmError::Config(
            "srm_derivative requires the exact-slice mode".into(),
        ));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(SrmError::domain("h", step, "a positive finite step"));
    }
    if !shift.is_finite() {
        return Err(SrmError::domain("shift", shift, "a finite real"));
    }
    let up = family.spectrum(param + step)?;
    let down = family.spectrum(param - step)?;
    let diff = |eval: &Evaluator| -> Result<f64> {
        Ok((eval.srm(&up)?.value - eval.srm(&down)?.value) / (2.0 * step))
    };
    let plain = Evaluator::new(dist, scheme)?;
    let shifted_dist = Affine::shifted(dist, shift);
    let shifted = Evaluator::new(&shifted_dist, scheme)?;
    let report = DerivativeReport {
        param,
        step,
        central_difference: diff(&plain)?,
        shifted_central_difference: diff(&shifted)?,
        shift,
    };
    if !(report.central_difference.is_finite() && report.shifted_central_difference.is_finite()) {
        return Err(SrmError::Numerical("derivative is not finite".into()));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubadditivityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `M(A + B)` with `M(A) + M(B)` for paired samples, using exact
/// order-statistic weights throughout.
pub fn subadditivity_check(
    a: &[f64],
    b: &[f64],
    spec: &RiskSpectrum,
) -> Result<SubadditivityReport> {
    if a.len() != b.len() {
        return Err(SrmError::Validation(format!(
            "sample lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if spec.is_dirac() {
        return Err(SrmError::Validation(
            "VaR is not an admissible spectrum for a subadditivity check".into(),
        ));
    }
    let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let exact = |xs: &[f64]| -> Result<f64> {
        let d = LossDistribution::from_samples(xs)?;
        let sorted = d.order_statistics().expect("empirical distribution");
        Ok(order_statistic_sum(&sorted, spec))
    };
    let lhs = exact(&sum)?;
    let rhs = exact(a)? + exact(b)?;
    Ok(SubadditivityReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9 * (1.0 + rhs.abs()),
    })
}
