//! Shared helpers for the plain-text formats.

use crate::error::{Error, Result};

/// 17 significant digits, `.` radix; round-trips every finite `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(",")
}

pub fn parse_num(s: &str, line: usize) -> Result<f64> {
    let t = s.trim();
    t.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {t:?}"),
    })
}

pub fn parse_list(s: &str, line: usize) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| parse_num(p, line)).collect()
}

/// Splits `# key=value key=value` metadata into pairs; tokens without `=` are skipped.
pub fn parse_header_pairs(line: &str) -> Vec<(String, String)> {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|tok| tok.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, -2.0, std::f64::consts::PI, 1e-300, 6.02214076e23, -1.0 / 3.0] {
            assert_eq!(parse_num(&fmt_num(x), 1).unwrap(), x);
        }
        assert_eq!(parse_list("2,3", 1).unwrap(), vec![2.0, 3.0]);
        assert!(parse_num("1,5", 3).is_err());
    }
}
