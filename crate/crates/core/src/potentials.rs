//! Central potential models, their evaluation, and the integrability checks.
//!
//! Units throughout: `hbar^2 / 2m = 1`, so `E = k^2`, lengths in `L` and
//! energies in `1/L^2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::{fmt_list, fmt_num, parse_list, parse_num};
use crate::numerics::quad;

/// Step potential: `values[j]` on `[a_j, a_{j+1})` with `a_0 = 0`, and exactly
/// zero beyond the last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantPotential {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstantPotential {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints but {} segment values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite breakpoint or value".into()));
        }
        if breakpoints.first().is_some_and(|&a| a <= 0.0) {
            return Err(Error::InvalidInput("breakpoints must be positive".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn zero() -> Self {
        Self {
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    /// The two-step example `-2` on `[0, 2)`, `-1` on `[2, 3)`, `0` beyond.
    pub fn two_step_example() -> Self {
        Self::new(vec![2.0, 3.0], vec![-2.0, -1.0]).expect("valid")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the segment containing `r`, breakpoints belonging to the right.
    pub fn segment_index(&self, r: f64) -> usize {
        self.breakpoints.partition_point(|&a| a <= r)
    }

    pub fn segment_value(&self, j: usize) -> f64 {
        self.values.get(j).copied().unwrap_or(0.0)
    }

    /// `V(r)`; at a breakpoint this is the right limit.
    pub fn value(&self, r: f64) -> f64 {
        self.segment_value(self.segment_index(r))
    }

    pub fn left_limit(&self, r: f64) -> f64 {
        self.segment_value(self.breakpoints.partition_point(|&a| a < r))
    }

    pub fn right_limit(&self, r: f64) -> f64 {
        self.value(r)
    }

    pub fn support_end(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// `(start, end, value)` per segment, the infinite tail included.
    pub fn segments(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.breakpoints.len() + 1);
        let mut start = 0.0;
        for (a, v) in self.breakpoints.iter().zip(&self.values) {
            out.push((start, *a, *v));
            start = *a;
        }
        out.push((start, f64::INFINITY, 0.0));
        out
    }
}

/// One-bound-state potential `V = -2 (ln W)''` with
/// `W(r) = 1 + c * int_0^r sinh^2(gamma s) ds`; the s-wave bound state sits at `-gamma^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargmannOneBoundPotential {
    pub gamma: f64,
    pub c: f64,
}

impl BargmannOneBoundPotential {
    pub fn new(gamma: f64, c: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma must be positive, got {gamma}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("coupling c must be positive, got {c}")));
        }
        Ok(Self { gamma, c })
    }

    pub fn from_gamma_squared(gamma2: f64, c: f64) -> Result<Self> {
        if gamma2 <= 0.0 {
            return Err(Error::InvalidInput(format!("gamma^2 must be positive, got {gamma2}")));
        }
        Self::new(gamma2.sqrt(), c)
    }

    pub fn bound_energy(&self) -> f64 {
        -self.gamma * self.gamma
    }

    pub fn value(&self, r: f64) -> f64 {
        bargmann_value(self.gamma, self.c, r)
    }
}

/// Closed form of the one-bound-state profile.
///
/// Everything is rescaled by `exp(-2 gamma r)` so large radii neither overflow
/// nor lose the result to the cancellation of `W''/W` against `(W'/W)^2`.
pub fn bargmann_profile(gamma: f64, c: f64, r: f64) -> Result<f64> {
    BargmannOneBoundPotential::new(gamma, c)?;
    if r < 0.0 {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    Ok(bargmann_value(gamma, c, r))
}

fn bargmann_value(gamma: f64, c: f64, r: f64) -> f64 {
    let x = gamma * r;
    let u = (-2.0 * x).exp();
    let one_minus_u = -(-2.0 * x).exp_m1();
    let one_minus_u2 = -(-4.0 * x).exp_m1();
    // scaled W, and the scaled numerator W'' W - W'^2
    let w = u * (1.0 - 0.5 * c * r) + c * one_minus_u2 / (8.0 * gamma);
    let num = u * (0.5 * c * gamma * one_minus_u2 * (1.0 - 0.5 * c * r) + 0.25 * c * c * one_minus_u * one_minus_u);
    -2.0 * num / (w * w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialPotential {
    pub v0: f64,
    pub mu: f64,
}

impl ExponentialPotential {
    pub fn new(v0: f64, mu: f64) -> Result<Self> {
        if !v0.is_finite() {
            return Err(Error::InvalidInput("v0 must be finite".into()));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidInput(format!("mu must be positive, got {mu}")));
        }
        Ok(Self { v0, mu })
    }

    pub fn value(&self, r: f64) -> f64 {
        self.v0 * (-self.mu * r).exp()
    }
}

/// Tabulated potential, linear between nodes, constant below the first node
/// and zero beyond the last.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl SampledPotential {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.is_empty() {
            return Err(Error::InvalidInput("grid and values must be non-empty and of equal length".into()));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid must be non-negative and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite sampled value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, r: f64) -> f64 {
        let n = self.grid.len();
        if r <= self.grid[0] {
            return self.values[0];
        }
        if r > self.grid[n - 1] {
            return 0.0;
        }
        let i = self.grid.partition_point(|&g| g <= r).min(n - 1);
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        let t = (r - x0) / (x1 - x0);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    Piecewise(PiecewiseConstantPotential),
    Bargmann(BargmannOneBoundPotential),
    Exponential(ExponentialPotential),
    Sampled(SampledPotential),
}

impl Potential {
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::Domain(format!("potential evaluated at negative radius {r}")));
        }
        Ok(self.value(r))
    }

    /// Unchecked evaluation for `r >= 0`.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Piecewise(p) => p.value(r),
            Potential::Bargmann(b) => b.value(r),
            Potential::Exponential(e) => e.value(r),
            Potential::Sampled(s) => s.value(r),
        }
    }

    /// `V(r-)`; differs from [`Potential::value`] only at step breakpoints.
    pub fn left_value(&self, r: f64) -> f64 {
        match self {
            Potential::Piecewise(p) => p.left_limit(r),
            _ => self.value(r),
        }
    }

    /// Radii where `V` or its derivative is discontinuous; ODE integration
    /// never steps across them.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Potential::Piecewise(p) => p.breakpoints().to_vec(),
            Potential::Sampled(s) => s.grid().iter().copied().filter(|&g| g > 0.0).collect(),
            _ => Vec::new(),
        }
    }

    pub fn origin_value(&self) -> f64 {
        self.value(0.0)
    }

    /// Whether `V` is exactly constant on some interval `[0, eps)`.
    pub fn locally_constant_at_origin(&self) -> bool {
        match self {
            Potential::Zero | Potential::Piecewise(_) => true,
            Potential::Sampled(s) => s.grid()[0] > 0.0,
            _ => false,
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseConstantPotential> {
        match self {
            Potential::Piecewise(p) => Some(p),
            Potential::Zero => None,
            _ => None,
        }
    }

    /// Piecewise view including the zero potential.
    pub fn to_piecewise(&self) -> Option<PiecewiseConstantPotential> {
        match self {
            Potential::Piecewise(p) => Some(p.clone()),
            Potential::Zero => Some(PiecewiseConstantPotential::zero()),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Piecewise(p) => p.values().iter().all(|&v| v == 0.0),
            Potential::Exponential(e) => e.v0 == 0.0,
            Potential::Sampled(s) => s.values().iter().all(|&v| v == 0.0),
            Potential::Bargmann(_) => false,
        }
    }

    /// A radius beyond which `int_R^inf |V| dr <= eps`.
    pub fn tail_radius(&self, eps: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Piecewise(p) => p.support_end(),
            Potential::Sampled(s) => *s.grid().last().expect("non-empty"),
            Potential::Exponential(e) => {
                if e.v0 == 0.0 {
                    0.0
                } else {
                    ((e.v0.abs() / (e.mu * eps)).ln() / e.mu).max(0.0)
                }
            }
            Potential::Bargmann(b) => {
                // |V| decays like r exp(-2 gamma r); walk out until the tail bound holds
                let step = 0.25 / b.gamma;
                let mut r = step;
                loop {
                    let v = b.value(r).abs();
                    let bound = v * (1.0 / (2.0 * b.gamma) + r / (2.0 * b.gamma * r.max(1.0)));
                    if r * b.gamma > 2.0 && bound <= eps {
                        return r;
                    }
                    r += step;
                    if r * b.gamma > 400.0 {
                        return r;
                    }
                }
            }
        }
    }

    /// `(v0, mu)` when the potential is exactly exponential, for analytic tails.
    pub fn exponential_params(&self) -> Option<(f64, f64)> {
        match self {
            Potential::Exponential(e) => Some((e.v0, e.mu)),
            _ => None,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Potential::Zero => "zero",
            Potential::Piecewise(_) => "piecewise",
            Potential::Bargmann(_) => "bargmann",
            Potential::Exponential(_) => "exponential",
            Potential::Sampled(_) => "sampled",
        }
    }

    /// `a V1 + b V2` for step potentials (breakpoint sets merged).
    pub fn linear_combination_piecewise(
        a: f64,
        p1: &PiecewiseConstantPotential,
        b: f64,
        p2: &PiecewiseConstantPotential,
    ) -> PiecewiseConstantPotential {
        let mut bps: Vec<f64> = p1.breakpoints().iter().chain(p2.breakpoints()).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let mut vals = Vec::with_capacity(bps.len());
        let mut left = 0.0;
        for &bp in &bps {
            let mid = 0.5 * (left + bp);
            vals.push(a * p1.value(mid) + b * p2.value(mid));
            left = bp;
        }
        PiecewiseConstantPotential::new(bps, vals).expect("merged breakpoints stay valid")
    }
}

impl From<PiecewiseConstantPotential> for Potential {
    fn from(p: PiecewiseConstantPotential) -> Self {
        Potential::Piecewise(p)
    }
}

impl From<ExponentialPotential> for Potential {
    fn from(p: ExponentialPotential) -> Self {
        Potential::Exponential(p)
    }
}

impl From<BargmannOneBoundPotential> for Potential {
    fn from(p: BargmannOneBoundPotential) -> Self {
        Potential::Bargmann(p)
    }
}

impl From<SampledPotential> for Potential {
    fn from(p: SampledPotential) -> Self {
        Potential::Sampled(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrabilityReport {
    /// `int_0^b r |V| dr`
    pub near_origin_integral: f64,
    /// `int_b^r_max |V| dr` plus the extrapolated remainder.
    pub tail_integral: f64,
    /// Extrapolated remainder beyond `r_max`.
    pub tail_remainder: f64,
    pub both_finite: bool,
}

/// Estimates both integrability integrals; the split radius is `b`.
///
/// The remainder beyond `r_max` is extrapolated from the local power-law
/// decay exponent of `|V|`; an exponent at or below one flags divergence.
pub fn check_integrability(potential: &Potential, b: f64, r_max: f64) -> Result<IntegrabilityReport> {
    if !(b > 0.0 && r_max > b) {
        return Err(Error::InvalidInput(format!("need 0 < b < r_max, got b = {b}, r_max = {r_max}")));
    }
    let mut kinks = potential.breakpoints();
    let points = |lo: f64, hi: f64, kinks: &mut Vec<f64>| {
        let mut p = vec![lo];
        p.extend(kinks.iter().copied().filter(|&k| k > lo && k < hi));
        p.push(hi);
        p
    };
    let near = quad::adaptive_with_points(
        &mut |r: f64| r * potential.value(r).abs(),
        &points(0.0, b, &mut kinks),
        1e-14,
        1e-12,
    )
    .value;
    let body = quad::adaptive_with_points(
        &mut |r: f64| potential.value(r).abs(),
        &points(b, r_max, &mut kinks),
        1e-14,
        1e-12,
    )
    .value;

    let r2 = b + 0.5 * (r_max - b);
    let v2 = potential.value(r2).abs();
    let v3 = potential.value(r_max).abs();
    let (remainder, finite) = if v3 * r_max < 1e-300 || v2 == 0.0 {
        (0.0, true)
    } else {
        let p = -(v3 / v2).ln() / (r_max / r2).ln();
        if p > 1.1 {
            (v3 * r_max / (p - 1.0), true)
        } else {
            (f64::INFINITY, false)
        }
    };
    Ok(IntegrabilityReport {
        near_origin_integral: near,
        tail_integral: body + remainder,
        tail_remainder: remainder,
        both_finite: finite && near.is_finite(),
    })
}

impl fmt::Display for Potential {
    /// Key-value text form, one `key=value` per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "type={}", self.type_name())?;
        match self {
            Potential::Zero => Ok(()),
            Potential::Piecewise(p) => {
                writeln!(f, "breakpoints={}", fmt_list(p.breakpoints()))?;
                writeln!(f, "values={}", fmt_list(p.values()))
            }
            Potential::Bargmann(b) => {
                writeln!(f, "gamma={}", fmt_num(b.gamma))?;
                writeln!(f, "c={}", fmt_num(b.c))
            }
            Potential::Exponential(e) => {
                writeln!(f, "v0={}", fmt_num(e.v0))?;
                writeln!(f, "mu={}", fmt_num(e.mu))
            }
            Potential::Sampled(s) => {
                writeln!(f, "grid={}", fmt_list(s.grid()))?;
                writeln!(f, "values={}", fmt_list(s.values()))
            }
        }
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kv: Vec<(String, String, usize)> = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key=value, got {line:?}"),
            })?;
            kv.push((k.trim().to_string(), v.trim().to_string(), i + 1));
        }
        let get = |key: &str| kv.iter().find(|(k, _, _)| k == key).map(|(_, v, l)| (v.as_str(), *l));
        let num = |key: &str| -> Result<f64> {
            let (v, l) = get(key).ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing key {key:?}"),
            })?;
            parse_num(v, l)
        };
        let list = |key: &str| -> Result<Vec<f64>> {
            match get(key) {
                Some((v, l)) => parse_list(v, l),
                None => Err(Error::Parse {
                    line: 0,
                    message: format!("missing key {key:?}"),
                }),
            }
        };
        let (ty, _) = get("type").ok_or_else(|| Error::Parse {
            line: 0,
            message: "missing key \"type\"".into(),
        })?;
        match ty {
            "zero" => Ok(Potential::Zero),
            "piecewise" => Ok(Potential::Piecewise(PiecewiseConstantPotential::new(
                list("breakpoints")?,
                list("values")?,
            )?)),
            "bargmann" => {
                let c = num("c")?;
                let b = if get("gamma").is_some() {
                    BargmannOneBoundPotential::new(num("gamma")?, c)?
                } else {
                    BargmannOneBoundPotential::from_gamma_squared(num("gamma2")?, c)?
                };
                Ok(Potential::Bargmann(b))
            }
            "exponential" => Ok(Potential::Exponential(ExponentialPotential::new(num("v0")?, num("mu")?)?)),
            "sampled" => Ok(Potential::Sampled(SampledPotential::new(list("grid")?, list("values")?)?)),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown potential type {other:?}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq7() -> Potential {
        PiecewiseConstantPotential::two_step_example().into()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(Potential::Zero.eval(1.7).unwrap(), 0.0);
        let p = eq7();
        assert_eq!(p.eval(1.0).unwrap(), -2.0);
        assert_eq!(p.eval(2.5).unwrap(), -1.0);
        assert_eq!(p.eval(4.0).unwrap(), 0.0);
        let e: Potential = ExponentialPotential::new(-0.5, 1.0).unwrap().into();
        assert_eq!(e.eval(0.0).unwrap(), -0.5);
        assert!(matches!(p.eval(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn breakpoint_convention_and_limits() {
        let p = PiecewiseConstantPotential::two_step_example();
        assert_eq!(p.value(2.0), -1.0);
        assert_eq!(p.left_limit(2.0), -2.0);
        assert_eq!(p.right_limit(3.0), 0.0);
        assert_eq!(p.left_limit(3.0), -1.0);
    }

    #[test]
    fn invalid_piecewise_rejected() {
        assert!(PiecewiseConstantPotential::new(vec![2.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(PiecewiseConstantPotential::new(vec![0.0], vec![1.0]).is_err());
        assert!(PiecewiseConstantPotential::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn integrability_examples() {
        let z = check_integrability(&Potential::Zero, 1.0, 10.0).unwrap();
        assert_eq!(z.near_origin_integral, 0.0);
        assert_eq!(z.tail_integral, 0.0);
        assert!(z.both_finite);

        let e: Potential = ExponentialPotential::new(-0.5, 1.0).unwrap().into();
        let r = check_integrability(&e, 1.0, 50.0).unwrap();
        assert!((r.tail_integral - 0.5 * (-1f64).exp()).abs() < 1e-10, "{}", r.tail_integral);
        assert!(r.both_finite);

        let r = check_integrability(&eq7(), 2.0, 20.0).unwrap();
        assert!((r.near_origin_integral - 4.0).abs() < 1e-12);
        assert!((r.tail_integral - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slow_tail_is_flagged() {
        // 1/r tail sampled on a long grid violates the far-field condition
        let grid: Vec<f64> = (1..=400).map(|i| i as f64 * 0.5).collect();
        let vals: Vec<f64> = grid.iter().map(|r| -1.0 / r).collect();
        let s: Potential = SampledPotential::new(grid, vals).unwrap().into();
        let r = check_integrability(&s, 1.0, 199.0).unwrap();
        assert!(!r.both_finite);
    }

    #[test]
    fn bargmann_profile_matches_direct_formula_and_decays() {
        let (g, c) = (10f64.sqrt(), 1.0);
        for &r in &[0.05, 0.3, 1.0, 2.0] {
            let x = g * r;
            let w = 1.0 + c * ((2.0 * x).sinh() / (4.0 * g) - r / 2.0);
            let w1 = c * x.sinh().powi(2);
            let w2 = c * g * (2.0 * x).sinh();
            let direct = -2.0 * (w2 / w - (w1 / w).powi(2));
            let v = bargmann_profile(g, c, r).unwrap();
            assert!((v - direct).abs() < 1e-10 * direct.abs().max(1.0), "r={r}: {v} vs {direct}");
        }
        assert_eq!(bargmann_profile(g, c, 0.0).unwrap(), 0.0);
        assert!((bargmann_profile(g, c, 50.0 / g).unwrap() / (g * g)).abs() < 1e-8);
        assert!(bargmann_profile(g, c, 1e4).unwrap().is_finite());
        // c -> 0 switches the potential off
        assert!(bargmann_profile(g, 1e-12, 1.0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn key_value_round_trip() {
        let text = "type=piecewise\nbreakpoints=2,3\nvalues=-2,-1\n";
        let p: Potential = text.parse().unwrap();
        assert_eq!(p, eq7());
        let again: Potential = p.to_string().parse().unwrap();
        assert_eq!(again, p);
        let b: Potential = "type=bargmann\ngamma2=10\nc=5".parse().unwrap();
        assert!(matches!(b, Potential::Bargmann(_)));
        assert!("type=piecewise\nbreakpoints=2\n".parse::<Potential>().is_err());
        assert!("type=unknown".parse::<Potential>().is_err());
    }

    #[test]
    fn sampled_interpolates_linearly() {
        let s = SampledPotential::new(vec![0.0, 1.0, 2.0], vec![-1.0, -3.0, 0.0]).unwrap();
        assert_eq!(s.value(0.5), -2.0);
        assert_eq!(s.value(2.5), 0.0);
    }
}
