//! Self-checks run by `srm check`: the invariant, shape, limit and
//! derivative properties of every module, each reported as a one-line verdict.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use super::tables::{crossings, figure_data, logspace};
use super::{
    es, limit_check, srm, srm_derivative, subadditivity_check, sweep, var, Diagnostics, LimitKind,
};
use crate::distributions::{Affine, ComonotoneSum, LossDistribution};
use crate::error::Result;
use crate::quadrature::{integrate_product, QuadratureScheme, Rule};
use crate::spectra::{RiskSpectrum, SpectrumFamily};

const SEED: u64 = 20_061_116;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("spectrum normalization", normalization),
    ("spectrum P1/P3' on random parameters", admissibility),
    ("quantile monotonicity and cdf round trip", quantiles),
    ("translation invariance (exact-slice)", translation_exact),
    ("translation by c*mass (repro-grid)", translation_repro),
    ("positive homogeneity", homogeneity),
    ("comonotone additivity", comonotone),
    ("VaR exactness", var_exact),
    ("ES equals ES-step SRM", es_equivalence),
    ("Simpson fourth-order convergence", simpson_order),
    ("subadditivity on 200 random sample pairs", subadditivity),
    (
        "exponential k-sweep strictly increasing",
        exp_sweep_increasing,
    ),
    ("power gamma<1 sweep peaks in the interior", power_low_peak),
    (
        "gamma=0.7 and gamma=0.9 spectra cross once",
        figure3_crossing,
    ),
    ("mean limits (k->0, gamma->1)", mean_limits),
    ("dM/dk positive at k=5 (normal)", derivative_sign),
    ("dM/dtheta unchanged by shifting losses", derivative_shift),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => CheckOutcome {
                name,
                passed,
                detail,
            },
            Err(e) => CheckOutcome {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn sample_spectra() -> Vec<RiskSpectrum> {
    vec![
        RiskSpectrum::expected_shortfall(0.9).unwrap(),
        RiskSpectrum::exponential(5.0).unwrap(),
        RiskSpectrum::power_low(0.5).unwrap(),
        RiskSpectrum::power_high(5.0).unwrap(),
    ]
}

fn normalization() -> Result<(bool, String)> {
    let mut spectra = sample_spectra();
    spectra.push(RiskSpectrum::var(0.99)?);
    let mut worst: f64 = 0.0;
    for s in &spectra {
        worst = worst.max(s.check_admissibility(101)?.normalization_residual);
    }
    Ok((worst <= 1e-12, format!("max residual {worst:.1e}")))
}

fn admissibility() -> Result<(bool, String)> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    for _ in 0..20 {
        for s in [
            RiskSpectrum::exponential(rng.random_range(0.01..100.0))?,
            RiskSpectrum::power_low(rng.random_range(0.01..0.99))?,
            RiskSpectrum::power_high(rng.random_range(1.01..30.0))?,
        ] {
            let r = s.check_admissibility(500)?;
            if !(r.nonnegativity_ok && r.strictly_increasing) {
                failures.push(s.to_string());
            }
        }
    }
    let es = RiskSpectrum::expected_shortfall(0.95)?.check_admissibility(500)?;
    let ok = failures.is_empty() && !es.strictly_increasing && es.weakly_increasing;
    Ok((
        ok,
        format!(
            "60 parametric spectra, {} failures; ES weak-only",
            failures.len()
        ),
    ))
}

fn quantiles() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for d in LossDistribution::reference_set() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=2000 {
            let p = 1e-6 + (1.0 - 2e-6) * i as f64 / 2000.0;
            let q = d.quantile(p)?;
            monotone &= q >= prev;
            prev = q;
            worst = worst.max((d.cdf(q)? - p).abs());
        }
    }
    Ok((
        monotone && worst <= 1e-8,
        format!("max |F(q(p)) - p| = {worst:.1e}"),
    ))
}

fn translation_exact() -> Result<(bool, String)> {
    let scheme = QuadratureScheme::exact_slice(20_000);
    let mut worst: f64 = 0.0;
    for d in LossDistribution::reference_set() {
        for s in sample_spectra() {
            let base = srm(&d, &s, &scheme)?.value;
            for c in [-1000.0, 10.0] {
                let shifted = srm(&Affine::shifted(&d, c), &s, &scheme)?.value;
                worst = worst.max(rel_err(shifted, base + c));
            }
        }
    }
    Ok((worst <= 1e-10, format!("max relative error {worst:.1e}")))
}

fn translation_repro() -> Result<(bool, String)> {
    let scheme = QuadratureScheme::table_trapezoid();
    let mut worst: f64 = 0.0;
    for d in LossDistribution::reference_set() {
        for s in sample_spectra() {
            let base = srm(&d, &s, &scheme)?;
            let Diagnostics::Quadrature(diag) = base.diagnostics else {
                continue;
            };
            let c = 25.0;
            let shifted = srm(&Affine::shifted(&d, c), &s, &scheme)?.value;
            worst = worst.max(rel_err(shifted, base.value + c * diag.discrete_mass));
        }
    }
    Ok((worst <= 1e-10, format!("max relative error {worst:.1e}")))
}

fn homogeneity() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for scheme in [
        QuadratureScheme::table_trapezoid(),
        QuadratureScheme::exact_slice(20_000),
    ] {
        for d in LossDistribution::reference_set() {
            for s in sample_spectra() {
                let base = srm(&d, &s, &scheme)?.value;
                let scaled = srm(&Affine::new(&d, 3.7, 0.0), &s, &scheme)?.value;
                worst = worst.max(rel_err(scaled, 3.7 * base));
            }
        }
    }
    Ok((worst <= 1e-12, format!("max relative error {worst:.1e}")))
}

fn comonotone() -> Result<(bool, String)> {
    let set = LossDistribution::reference_set();
    let mut worst: f64 = 0.0;
    for scheme in [
        QuadratureScheme::table_simpson(),
        QuadratureScheme::exact_slice(20_000),
    ] {
        for s in sample_spectra() {
            for (i, a) in set.iter().enumerate() {
                let b = &set[(i + 2) % set.len()];
                let lhs = srm(&ComonotoneSum::new(a, b), &s, &scheme)?.value;
                let rhs = srm(a, &s, &scheme)?.value + srm(b, &s, &scheme)?.value;
                worst = worst.max(rel_err(lhs, rhs));
            }
        }
    }
    Ok((worst <= 1e-12, format!("max relative error {worst:.1e}")))
}

fn var_exact() -> Result<(bool, String)> {
    let mut ok = true;
    for d in LossDistribution::reference_set() {
        for alpha in [0.01, 0.5, 0.95, 0.999] {
            ok &= var(&d, alpha)?.value == d.quantile(alpha)?;
        }
    }
    Ok((ok, "VaR equals the quantile exactly".into()))
}

fn es_equivalence() -> Result<(bool, String)> {
    let mut ok = true;
    for scheme in [
        QuadratureScheme::table_trapezoid(),
        QuadratureScheme::exact_slice(10_000),
    ] {
        for d in LossDistribution::reference_set() {
            let a = es(&d, 0.95, &scheme)?.value;
            let b = srm(&d, &RiskSpectrum::expected_shortfall(0.95)?, &scheme)?.value;
            ok &= a.to_bits() == b.to_bits();
        }
    }
    Ok((ok, "bit-identical".into()))
}

fn simpson_order() -> Result<(bool, String)> {
    let k = 1.0;
    let s = RiskSpectrum::exponential(k)?;
    let u = LossDistribution::standard_uniform();
    let base = QuadratureScheme::repro_grid(Rule::Simpson, 2);
    let (a, b) = base.domain();
    let lam = k / -(-k).exp_m1();
    let anti = |p: f64| (-k * (1.0 - p)).exp() * (p / k - 1.0 / (k * k));
    let exact = lam * (anti(b) - anti(a));
    let errs = [4usize, 16, 64]
        .iter()
        .map(|&n| Ok((integrate_product(&s, &u, &base.with_intervals(n))?.value - exact).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    Ok((
        ratios.iter().all(|r| *r >= 200.0),
        format!(
            "error ratios per 4x refinement {:.0}, {:.0}",
            ratios[0], ratios[1]
        ),
    ))
}

fn subadditivity() -> Result<(bool, String)> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let spectra = [
        RiskSpectrum::exponential(5.0)?,
        RiskSpectrum::power_high(3.0)?,
        RiskSpectrum::expected_shortfall(0.95)?,
    ];
    let mut failures = 0;
    for trial in 0..200 {
        let a: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..500)
            .map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal) + 0.5)
            .collect();
        if !subadditivity_check(&a, &b, &spectra[trial % 3])?.holds {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("{failures} violations in 200 pairs")))
}

fn exp_sweep_increasing() -> Result<(bool, String)> {
    let ks = logspace(1.0, 100.0, 20);
    let scheme = QuadratureScheme::table_simpson();
    let mut bad = Vec::new();
    for d in LossDistribution::reference_set() {
        let c = sweep(&d, SpectrumFamily::Exponential, &ks, &scheme)?;
        if !c.values().windows(2).all(|w| w[1] > w[0]) {
            bad.push(d.name());
        }
    }
    Ok((bad.is_empty(), format!("non-increasing: {bad:?}")))
}

/// Index of the maximum, and whether the curve strictly falls after it.
pub fn peak_then_falls(values: &[f64]) -> (usize, bool) {
    let imax = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let falls = values[imax..].windows(2).all(|w| w[1] < w[0]);
    (imax, falls)
}

fn power_low_peak() -> Result<(bool, String)> {
    let gammas = super::tables::figure_parameter_grid(SpectrumFamily::PowerLow);
    let scheme = QuadratureScheme::table_trapezoid();
    let mut ok = true;
    let mut peaks = Vec::new();
    for d in LossDistribution::reference_set() {
        let values = sweep(&d, SpectrumFamily::PowerLow, &gammas, &scheme)?.values();
        let (imax, falls) = peak_then_falls(&values);
        ok &= imax > 0 && imax + 1 < values.len() && falls;
        peaks.push(format!("{}@{:.2}", d.name(), gammas[imax]));
    }
    Ok((ok, format!("peaks {}", peaks.join(" "))))
}

fn figure3_crossing() -> Result<(bool, String)> {
    let n = crossings(&figure_data(3)?, 0, 1);
    Ok((n == 1, format!("{n} crossing(s)")))
}

fn mean_limits() -> Result<(bool, String)> {
    let scheme = QuadratureScheme::default();
    let mut worst: f64 = 0.0;
    for d in LossDistribution::reference_set() {
        if d.mean().is_none() {
            continue;
        }
        for (kind, tol) in [
            (LimitKind::ExpKToZero, 1e-4),
            (LimitKind::PowerHighGammaToOne, 1e-3),
            (LimitKind::PowerLowGammaToOne, 1e-3),
        ] {
            let gap = limit_check(&d, kind, &scheme)?
                .gap()
                .unwrap_or(f64::INFINITY);
            worst = worst.max(gap / tol);
        }
    }
    Ok((worst <= 1.0, format!("worst gap / tolerance {worst:.2}")))
}

fn derivative_sign() -> Result<(bool, String)> {
    let n = LossDistribution::standard_normal();
    let d = srm_derivative(
        &n,
        SpectrumFamily::Exponential,
        5.0,
        1e-4,
        0.0,
        &QuadratureScheme::default(),
    )?;
    Ok((
        d.central_difference > 0.0,
        format!("dM/dk = {:.6}", d.central_difference),
    ))
}

fn derivative_shift() -> Result<(bool, String)> {
    let n = LossDistribution::standard_normal();
    let scheme = QuadratureScheme::default();
    let mut worst: f64 = 0.0;
    for c in [-1000.0, -10.0, 10.0, 1000.0] {
        let d = srm_derivative(&n, SpectrumFamily::Exponential, 5.0, 1e-4, c, &scheme)?;
        worst = worst
            .max((d.shifted_central_difference - d.central_difference).abs() / (1.0 + f64::abs(c)));
    }
    Ok((
        worst <= 1e-6,
        format!(
            "max |d(c) - d(0)|/(1+|c|) = {worst:.1e}; normalization forces shift invariance, \
             contrary to the sign-flip argument for shifted losses"
        ),
    ))
}
