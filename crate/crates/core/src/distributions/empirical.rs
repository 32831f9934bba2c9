//! Ingestion of loss samples from text files.
//!
//! Format: one ASCII decimal loss per line. The first non-blank line may be a
//! header; any later line that is not a finite number is rejected with its
//! 1-based line number. Blank lines are skipped.

use std::fs;
use std::path::Path;

use super::LossDistribution;
use crate::error::{Result, SrmError};

pub fn parse_losses(text: &str) -> Result<LossDistribution> {
    let mut losses = Vec::new();
    let mut seen_first = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let first = !seen_first;
        seen_first = true;
        match line.parse::<f64>() {
            Ok(x) if x.is_finite() => losses.push(x),
            Ok(_) => {
                return Err(SrmError::Validation(format!(
                    "line {}: loss '{}' is not finite",
                    idx + 1,
                    line
                )))
            }
            Err(_) if first => {}
            Err(_) => {
                return Err(SrmError::Validation(format!(
                    "line {}: '{}' is not a number",
                    idx + 1,
                    line
                )))
            }
        }
    }
    if losses.is_empty() {
        return Err(SrmError::Validation("input contains no losses".into()));
    }
    LossDistribution::from_samples(&losses)
}

pub fn read_losses(path: impl AsRef<Path>) -> Result<LossDistribution> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| {
        SrmError::Validation(format!("cannot read input file {}: {e}", path.display()))
    })?;
    parse_losses(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Family;

    #[test]
    fn header_is_optional() {
        let with = parse_losses("loss\n3\n1\n2\n").unwrap();
        let without = parse_losses("3\n1\n2").unwrap();
        assert_eq!(with, without);
        assert_eq!(with.family(), &Family::Empirical(vec![1.0, 2.0, 3.0]));
    }

    #[test]
    fn bad_line_is_named() {
        let err = parse_losses("loss\n1.0\nabc\n2.0\n").unwrap_err();
        assert_eq!(
            err,
            SrmError::Validation("line 3: 'abc' is not a number".into())
        );
    }

    #[test]
    fn only_one_header_line() {
        let err = parse_losses("a\nb\n1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn non_finite_rejected() {
        let err = parse_losses("1\nNaN\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_losses("inf").is_err());
    }

    #[test]
    fn empty_rejected() {
        assert!(parse_losses("").is_err());
        assert!(parse_losses("header\n\n").is_err());
    }

    #[test]
    fn scientific_notation_and_whitespace() {
        let d = parse_losses("  1e-3 \r\n-2.5\n").unwrap();
        assert_eq!(d.family(), &Family::Empirical(vec![-2.5, 1e-3]));
    }
}
