//! Regeneration of the three SRM tables and the six figure data sets.

use rayon::prelude::*;

use super::{Evaluator, LimitKind, RiskMeasureResult};
use crate::distributions::LossDistribution;
use crate::error::{Result, SrmError};
use crate::quadrature::QuadratureScheme;
use crate::spectra::{RiskSpectrum, SpectrumFamily};

/// Column headings, in the order of [`LossDistribution::reference_set`].
pub const DISTRIBUTION_LABELS: [&str; 5] = ["normal", "cauchy", "uniform", "beta(2,4)", "gumbel"];

pub const TABLE1_K: [f64; 4] = [1.0, 5.0, 25.0, 100.0];
pub const TABLE2_GAMMA: [f64; 3] = [0.1, 0.5, 0.9];
pub const TABLE3_GAMMA: [f64; 4] = [1.1, 1.5, 5.0, 20.0];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    /// Parameter value actually evaluated (limit rows use the near-boundary value).
    pub parameter: f64,
    pub cells: Vec<RiskMeasureResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub id: u8,
    pub title: &'static str,
    pub parameter_name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<TableRow>,
    pub scheme: QuadratureScheme,
}

impl Table {
    pub fn cell(&self, row_label: &str, column: &str) -> Option<&RiskMeasureResult> {
        let c = self.columns.iter().position(|&x| x == column)?;
        let r = self.rows.iter().find(|r| r.label == row_label)?;
        r.cells.get(c)
    }
}

fn evaluators(scheme: &QuadratureScheme) -> Result<Vec<Evaluator>> {
    LossDistribution::reference_set()
        .par_iter()
        .map(|d| Evaluator::new(d, scheme))
        .collect()
}

fn build_rows(rows: &[(String, RiskSpectrum)], scheme: &QuadratureScheme) -> Result<Vec<TableRow>> {
    let evals = evaluators(scheme)?;
    rows.iter()
        .map(|(label, spec)| {
            let cells = evals
                .par_iter()
                .map(|e| e.srm(spec))
                .collect::<Result<Vec<_>>>()?;
            let parameter = match spec.kind() {
                crate::spectra::SpectrumKind::Exponential { k } => k,
                crate::spectra::SpectrumKind::PowerLow { gamma }
                | crate::spectra::SpectrumKind::PowerHigh { gamma } => gamma,
                _ => f64::NAN,
            };
            Ok(TableRow {
                label: label.clone(),
                parameter,
                cells,
            })
        })
        .collect()
}

fn label(x: f64) -> String {
    format!("{x}")
}

pub fn make_table(id: u8) -> Result<Table> {
    let (title, family, params, scheme): (_, _, &[f64], _) = match id {
        1 => (
            "Exponential SRM by coefficient of absolute risk aversion k",
            SpectrumFamily::Exponential,
            &TABLE1_K,
            QuadratureScheme::table_simpson(),
        ),
        2 => (
            "Power SRM, gamma < 1, by coefficient of relative risk aversion",
            SpectrumFamily::PowerLow,
            &TABLE2_GAMMA,
            QuadratureScheme::table_trapezoid(),
        ),
        3 => (
            "Power SRM, gamma > 1, by coefficient of relative risk aversion",
            SpectrumFamily::PowerHigh,
            &TABLE3_GAMMA,
            QuadratureScheme::table_trapezoid(),
        ),
        _ => {
            return Err(SrmError::Config(format!(
                "no table with id {id}; expected 1, 2 or 3"
            )))
        }
    };
    let mut rows: Vec<(String, RiskSpectrum)> = params
        .iter()
        .map(|&x| family.spectrum(x).map(|s| (label(x), s)))
        .collect::<Result<_>>()?;
    if id == 2 {
        rows.insert(0, ("→ 0".into(), LimitKind::PowerLowGammaToZero.spectrum()));
        rows.push(("→ 1".into(), LimitKind::PowerLowGammaToOne.spectrum()));
    }
    Ok(Table {
        id,
        title,
        parameter_name: family.parameter_name(),
        columns: DISTRIBUTION_LABELS.to_vec(),
        rows: build_rows(&rows, &scheme)?,
        scheme,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: u8,
    pub abscissa: &'static str,
    pub series: Vec<String>,
    pub rows: Vec<(f64, Vec<f64>)>,
}

impl FigureData {
    pub fn series_values(&self, index: usize) -> Vec<(f64, f64)> {
        self.rows.iter().map(|(x, ys)| (*x, ys[index])).collect()
    }
}

/// Points in the spectrum figures: `p = i/1000`, `i = 0..=1000`.
pub const SPECTRUM_FIGURE_POINTS: usize = 1001;
/// Parameter values in the sweep figures.
pub const SWEEP_FIGURE_POINTS: usize = 100;

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = linspace(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect();
    // Pin the endpoints exactly; exp(ln(x)) need not round-trip.
    if let Some(first) = xs.first_mut() {
        *first = lo;
    }
    if n > 1 {
        if let Some(last) = xs.last_mut() {
            *last = hi;
        }
    }
    xs
}

/// Parameter grid of the sweep figure for a family.
pub fn figure_parameter_grid(family: SpectrumFamily) -> Vec<f64> {
    match family {
        SpectrumFamily::Exponential => linspace(1.0, 100.0, SWEEP_FIGURE_POINTS),
        SpectrumFamily::PowerLow => linspace(0.01, 0.99, SWEEP_FIGURE_POINTS),
        SpectrumFamily::PowerHigh => linspace(1.1, 20.0, SWEEP_FIGURE_POINTS),
    }
}

pub fn figure_data(id: u8) -> Result<FigureData> {
    match id {
        1 => spectrum_figure(id, SpectrumFamily::Exponential, [5.0, 25.0]),
        3 => spectrum_figure(id, SpectrumFamily::PowerLow, [0.7, 0.9]),
        5 => spectrum_figure(id, SpectrumFamily::PowerHigh, [1.5, 5.0]),
        2 => sweep_figure(
            id,
            SpectrumFamily::Exponential,
            QuadratureScheme::table_simpson(),
        ),
        4 => sweep_figure(
            id,
            SpectrumFamily::PowerLow,
            QuadratureScheme::table_trapezoid(),
        ),
        6 => sweep_figure(
            id,
            SpectrumFamily::PowerHigh,
            QuadratureScheme::table_trapezoid(),
        ),
        _ => Err(SrmError::Config(format!(
            "no figure with id {id}; expected 1 to 6"
        ))),
    }
}

fn spectrum_figure(id: u8, family: SpectrumFamily, params: [f64; 2]) -> Result<FigureData> {
    let spectra = params
        .iter()
        .map(|&x| family.spectrum(x))
        .collect::<Result<Vec<_>>>()?;
    let rows = linspace(0.0, 1.0, SPECTRUM_FIGURE_POINTS)
        .into_iter()
        .map(|p| {
            let ys = spectra
                .iter()
                .map(|s| s.weight(p))
                .collect::<Result<Vec<_>>>()?;
            Ok((p, ys))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureData {
        id,
        abscissa: "p",
        series: params
            .iter()
            .map(|x| format!("{}={x}", family.parameter_name()))
            .collect(),
        rows,
    })
}

fn sweep_figure(id: u8, family: SpectrumFamily, scheme: QuadratureScheme) -> Result<FigureData> {
    let params = figure_parameter_grid(family);
    let curves = LossDistribution::reference_set()
        .par_iter()
        .map(|d| super::sweep(d, family, &params, &scheme))
        .collect::<Result<Vec<_>>>()?;
    let rows = params
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, curves.iter().map(|c| c.points[i].1).collect()))
        .collect();
    Ok(FigureData {
        id,
        abscissa: family.parameter_name(),
        series: DISTRIBUTION_LABELS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

/// Number of sign changes of `a − b` along the rows strictly inside `(0, 1)`.
pub fn crossings(fig: &FigureData, a: usize, b: usize) -> usize {
    let diffs: Vec<f64> = fig
        .rows
        .iter()
        .filter(|(p, _)| *p > 0.0 && *p < 1.0)
        .map(|(_, ys)| ys[a] - ys[b])
        .filter(|d| *d != 0.0)
        .collect();
    diffs
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count()
}
