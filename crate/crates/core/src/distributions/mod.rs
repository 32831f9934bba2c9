//! Loss distributions described by their quantile functions.
//!
//! Five analytic families are provided (standard normal, Cauchy, standard
//! uniform, beta, and the minimum-convention Gumbel) together with empirical
//! samples. Every distribution exposes `q(p)` through [`QuantileFunction`], the
//! only interface the quadrature and engine layers depend on, so affine
//! transforms and comonotone sums compose without special cases.

pub mod beta;
pub mod empirical;
pub mod normal;

use std::borrow::Cow;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Result, SrmError};

pub use empirical::{parse_losses, read_losses};

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Anything with a loss quantile function on `[0, 1]`.
pub trait QuantileFunction: Sync {
    /// `q(p)` for `p ∈ [0, 1]`. Unbounded supports return `±∞` at the endpoints.
    fn quantile_at(&self, p: f64) -> f64;

    /// Ascending order statistics when the distribution is a finite sample.
    fn order_statistics(&self) -> Option<Cow<'_, [f64]>> {
        None
    }

    /// True when integrals of `q` are dominated by the endpoints (Cauchy-like tails).
    fn heavy_tailed(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    StandardNormal,
    Cauchy,
    StandardUniform,
    Beta {
        alpha: f64,
        beta: f64,
    },
    /// Gumbel for minima: `F(x) = 1 − exp(−exp(x))`.
    GumbelMin,
    /// Ascending, finite, nonempty.
    Empirical(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossDistribution {
    family: Family,
    support_lower: f64,
    support_upper: f64,
}

impl LossDistribution {
    pub fn standard_normal() -> Self {
        Self::unbounded(Family::StandardNormal)
    }

    pub fn cauchy() -> Self {
        Self::unbounded(Family::Cauchy)
    }

    pub fn standard_uniform() -> Self {
        Self {
            family: Family::StandardUniform,
            support_lower: 0.0,
            support_upper: 1.0,
        }
    }

    pub fn gumbel_min() -> Self {
        Self::unbounded(Family::GumbelMin)
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(SrmError::domain("alpha", alpha, "a positive finite real"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(SrmError::domain("beta", beta, "a positive finite real"));
        }
        Ok(Self {
            family: Family::Beta { alpha, beta },
            support_lower: 0.0,
            support_upper: 1.0,
        })
    }

    /// Empirical distribution from raw losses (sorted internally).
    pub fn from_samples(losses: &[f64]) -> Result<Self> {
        if losses.is_empty() {
            return Err(SrmError::Validation("loss sample is empty".into()));
        }
        if let Some(i) = losses.iter().position(|x| !x.is_finite()) {
            return Err(SrmError::Validation(format!(
                "loss sample entry {} is not finite ({})",
                i, losses[i]
            )));
        }
        let mut sorted = losses.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            support_lower: sorted[0],
            support_upper: sorted[sorted.len() - 1],
            family: Family::Empirical(sorted),
        })
    }

    /// The five distributions used throughout the reproduction tables, in column order.
    pub fn reference_set() -> [LossDistribution; 5] {
        [
            Self::standard_normal(),
            Self::cauchy(),
            Self::standard_uniform(),
            Self::unchecked_beta(2.0, 4.0),
            Self::gumbel_min(),
        ]
    }

    fn unchecked_beta(alpha: f64, beta: f64) -> Self {
        Self {
            family: Family::Beta { alpha, beta },
            support_lower: 0.0,
            support_upper: 1.0,
        }
    }

    fn unbounded(family: Family) -> Self {
        Self {
            family,
            support_lower: f64::NEG_INFINITY,
            support_upper: f64::INFINITY,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn support(&self) -> (f64, f64) {
        (self.support_lower, self.support_upper)
    }

    pub fn is_empirical(&self) -> bool {
        matches!(self.family, Family::Empirical(_))
    }

    /// Short machine-friendly name, as used by the CLI.
    pub fn name(&self) -> String {
        match &self.family {
            Family::StandardNormal => "normal".into(),
            Family::Cauchy => "cauchy".into(),
            Family::StandardUniform => "uniform".into(),
            Family::Beta { alpha, beta } => format!("beta({alpha},{beta})"),
            Family::GumbelMin => "gumbel".into(),
            Family::Empirical(xs) => format!("empirical(n={})", xs.len()),
        }
    }

    /// Checked quantile for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(SrmError::domain("p", p, "a probability in (0, 1)"));
        }
        Ok(self.quantile_at(p))
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(SrmError::domain("x", x, "a real number"));
        }
        let f = match &self.family {
            Family::StandardNormal => normal::cdf(x),
            Family::Cauchy => 0.5 + x.atan() / PI,
            Family::StandardUniform => x.clamp(0.0, 1.0),
            Family::Beta { alpha, beta } => beta::regularized(*alpha, *beta, x),
            Family::GumbelMin => -(-x.exp()).exp_m1(),
            Family::Empirical(_) => {
                return Err(SrmError::Unsupported(
                    "cdf is only defined for analytic distributions".into(),
                ))
            }
        };
        Ok(f)
    }

    /// Mean loss, or `None` where it does not exist (Cauchy).
    pub fn mean(&self) -> Option<f64> {
        match &self.family {
            Family::StandardNormal => Some(0.0),
            Family::Cauchy => None,
            Family::StandardUniform => Some(0.5),
            Family::Beta { alpha, beta } => Some(alpha / (alpha + beta)),
            Family::GumbelMin => Some(-EULER_GAMMA),
            Family::Empirical(xs) => Some(xs.iter().sum::<f64>() / xs.len() as f64),
        }
    }
}

impl QuantileFunction for LossDistribution {
    fn quantile_at(&self, p: f64) -> f64 {
        match &self.family {
            Family::StandardNormal => normal::quantile(p),
            Family::Cauchy => cauchy_quantile(p),
            Family::StandardUniform => p.clamp(0.0, 1.0),
            Family::Beta { alpha, beta } => beta::inverse_regularized(*alpha, *beta, p),
            Family::GumbelMin => (-(-p).ln_1p()).ln(),
            Family::Empirical(xs) => xs[empirical_rank(p, xs.len()) - 1],
        }
    }

    fn order_statistics(&self) -> Option<Cow<'_, [f64]>> {
        match &self.family {
            Family::Empirical(xs) => Some(Cow::Borrowed(xs)),
            _ => None,
        }
    }

    fn heavy_tailed(&self) -> bool {
        matches!(self.family, Family::Cauchy)
    }
}

impl fmt::Display for LossDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `tan(π(p − ½))`, evaluated as a cotangent so the tails keep full precision.
fn cauchy_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else if p < 0.5 {
        -1.0 / (PI * p).tan()
    } else if p > 0.5 {
        1.0 / (PI * (1.0 - p)).tan()
    } else {
        0.0
    }
}

/// 1-based rank `⌈p·n⌉`, clamped to `1..=n`, with the ceiling taken so that
/// `p = i/n` maps to `i` despite rounding in `p·n`.
fn empirical_rank(p: f64, n: usize) -> usize {
    let nf = n as f64;
    let mut i = (p * nf).ceil().max(1.0).min(nf) as usize;
    if i > 1 && (i - 1) as f64 / nf >= p {
        i -= 1;
    }
    i
}

/// Quantile function `scale · q(p) + shift` of a base distribution.
#[derive(Debug, Clone, Copy)]
pub struct Affine<'a, Q: ?Sized> {
    pub base: &'a Q,
    pub scale: f64,
    pub shift: f64,
}

impl<'a, Q: QuantileFunction + ?Sized> Affine<'a, Q> {
    pub fn new(base: &'a Q, scale: f64, shift: f64) -> Self {
        Self { base, scale, shift }
    }

    pub fn shifted(base: &'a Q, shift: f64) -> Self {
        Self::new(base, 1.0, shift)
    }
}

impl<Q: QuantileFunction + ?Sized> QuantileFunction for Affine<'_, Q> {
    fn quantile_at(&self, p: f64) -> f64 {
        self.scale * self.base.quantile_at(p) + self.shift
    }

    fn order_statistics(&self) -> Option<Cow<'_, [f64]>> {
        // Only order-preserving maps keep the sorted sequence sorted.
        if self.scale < 0.0 {
            return None;
        }
        let xs = self.base.order_statistics()?;
        Some(Cow::Owned(
            xs.iter().map(|x| self.scale * x + self.shift).collect(),
        ))
    }

    fn heavy_tailed(&self) -> bool {
        self.base.heavy_tailed()
    }
}

/// Pointwise sum of two quantile functions: the quantile function of a
/// comonotone sum of the two losses.
#[derive(Debug, Clone, Copy)]
pub struct ComonotoneSum<'a, A: ?Sized, B: ?Sized> {
    pub first: &'a A,
    pub second: &'a B,
}

impl<'a, A: QuantileFunction + ?Sized, B: QuantileFunction + ?Sized> ComonotoneSum<'a, A, B> {
    pub fn new(first: &'a A, second: &'a B) -> Self {
        Self { first, second }
    }
}

impl<A: QuantileFunction + ?Sized, B: QuantileFunction + ?Sized> QuantileFunction
    for ComonotoneSum<'_, A, B>
{
    fn quantile_at(&self, p: f64) -> f64 {
        self.first.quantile_at(p) + self.second.quantile_at(p)
    }

    fn order_statistics(&self) -> Option<Cow<'_, [f64]>> {
        let a = self.first.order_statistics()?;
        let b = self.second.order_statistics()?;
        if a.len() != b.len() {
            return None;
        }
        Some(Cow::Owned(
            a.iter().zip(b.iter()).map(|(x, y)| x + y).collect(),
        ))
    }

    fn heavy_tailed(&self) -> bool {
        self.first.heavy_tailed() || self.second.heavy_tailed()
    }
}
