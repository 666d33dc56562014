//! Lines of zeros `r_n(lambda, E)` and their inverses.
//!
//! A fixed-`lambda` line is sampled either on an energy grid (solve for `r`)
//! or on a radius grid (solve for `E`). The mixed line runs in energy down
//! to `E0` at `lambda0`, then continues in `lambda` at fixed `E0`.
//! Either way the `n`-th zero is identified by the Prufer phase reaching
//! `n pi`, so neighbouring zeros can never be confused.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result, Side};
use crate::io::{fmt_num, parse_header_pairs, parse_num};
use crate::numerics::interp::Pchip;
use crate::numerics::polyfit::PolyFit;
use crate::numerics::roots::brent;
use crate::potentials::{PiecewiseConstantPotential, Potential};
use crate::radial::{self, exact_available, AngularParameter, Backend, ExactPiecewiseSolution, PruferSystem};

/// Which parameter moves along a piece of a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Energy,
    Lambda,
}

impl ParamKind {
    pub fn label(&self) -> &'static str {
        match self {
            ParamKind::Energy => "E",
            ParamKind::Lambda => "lambda",
        }
    }

    fn parse(s: &str, line: usize) -> Result<Self> {
        match s.trim() {
            "E" => Ok(ParamKind::Energy),
            "lambda" => Ok(ParamKind::Lambda),
            other => Err(Error::Parse {
                line,
                message: format!("unknown parameter kind {other:?}"),
            }),
        }
    }
}

/// Where a line stopped because the zero left the searchable range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineTruncation {
    pub param: f64,
    pub searched: f64,
}

/// Samples `(E, r)` of one fixed-`lambda` line: `E` strictly decreasing, `r` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLine {
    pub n: usize,
    pub ell0: AngularParameter,
    pub samples: Vec<(f64, f64)>,
    pub backend: Backend,
    pub truncation: Option<LineTruncation>,
}

impl ZeroLine {
    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn check_invariants(&self) -> Result<()> {
        check_monotone(&self.samples, ParamKind::Energy)
    }
}

/// The two-part line: energy from `E_max` down to `E0` at `lambda0`, then
/// `lambda` upward at `E0`. Both parts share the junction radius `r0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedZeroLine {
    pub n: usize,
    pub ell0: AngularParameter,
    pub e0: f64,
    /// `(E, r)`, `E` decreasing to `E0`, ending at `r0`.
    pub segment_e: Vec<(f64, f64)>,
    /// `(lambda, r)`, `lambda` increasing from `lambda0`, starting at `r0`.
    pub segment_l: Vec<(f64, f64)>,
    pub r0: f64,
}

impl MixedZeroLine {
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        check_monotone(&self.segment_e, ParamKind::Energy)?;
        check_monotone(&self.segment_l, ParamKind::Lambda)?;
        if let (Some(e), Some(l)) = (self.segment_e.last(), self.segment_l.first()) {
            if (e.1 - l.1).abs() > tol * self.r0.max(1.0) {
                return Err(Error::InvariantViolation(format!(
                    "mixed line discontinuous at the junction: {} vs {}",
                    e.1, l.1
                )));
            }
        }
        Ok(())
    }
}

fn check_monotone(samples: &[(f64, f64)], kind: ParamKind) -> Result<()> {
    for w in samples.windows(2) {
        let ok_r = w[1].1 > w[0].1;
        let ok_p = match kind {
            ParamKind::Energy => w[1].0 < w[0].0,
            ParamKind::Lambda => w[1].0 > w[0].0,
        };
        if !(ok_r && ok_p) {
            return Err(Error::InvariantViolation(format!(
                "non-monotone {} samples: ({}, {}) then ({}, {})",
                kind.label(),
                w[0].0,
                w[0].1,
                w[1].0,
                w[1].1
            )));
        }
    }
    Ok(())
}

fn backend_for(potential: &Potential, ang: AngularParameter) -> Backend {
    if exact_available(potential, ang) {
        Backend::Exact
    } else {
        Backend::Numeric
    }
}

/// Traces `r_n` over a descending energy grid. A zero that leaves the range
/// ends the line with a truncation marker.
pub fn trace_fixed_l(potential: &Potential, n: usize, ell0: AngularParameter, e_grid: &[f64], tol: f64) -> Result<ZeroLine> {
    if e_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("energy grid must be strictly descending".into()));
    }
    let backend = backend_for(potential, ell0);
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(e_grid.len());
    let mut truncation = None;
    for &e in e_grid {
        match radial::nth_zero_with(potential, ell0, e, n, tol, backend, radial::DEFAULT_CEILING) {
            Ok(r) => {
                if let Some(&(pe, pr)) = samples.last() {
                    if r <= pr {
                        return Err(Error::InvariantViolation(format!(
                            "zero {n} moved inward from r = {pr} at E = {pe} to r = {r} at E = {e}"
                        )));
                    }
                }
                samples.push((e, r));
            }
            Err(Error::ZeroBeyondRange { searched, .. }) => {
                truncation = Some(LineTruncation { param: e, searched });
                break;
            }
            Err(other) => return Err(other),
        }
    }
    Ok(ZeroLine {
        n,
        ell0,
        samples,
        backend,
        truncation,
    })
}

/// Energies descending from `e_start` toward `e_asymptote`, geometric in the
/// distance to the asymptote, stopping at `smallest_gap`.
pub fn geometric_energy_grid(e_start: f64, e_asymptote: f64, smallest_gap: f64, points: usize) -> Result<Vec<f64>> {
    let top = e_start - e_asymptote;
    if !(top > smallest_gap && smallest_gap > 0.0 && points >= 2) {
        return Err(Error::InvalidInput("need e_start - e_asymptote > smallest_gap > 0 and at least two points".into()));
    }
    let ratio = (smallest_gap / top).powf(1.0 / (points - 1) as f64);
    Ok((0..points).map(|i| e_asymptote + top * ratio.powi(i as i32)).collect())
}

/// Phase evaluator for one line family; `theta(p, r)` with `p` the moving parameter.
struct PhaseAt<'a> {
    potential: &'a Potential,
    kind: ParamKind,
    /// Fixed angular parameter for energy lines.
    ang: AngularParameter,
    /// Fixed energy for lambda lines.
    energy: f64,
    tol: f64,
    exact: Option<PiecewiseConstantPotential>,
}

impl<'a> PhaseAt<'a> {
    fn theta(&self, p: f64, r: f64) -> Result<f64> {
        match self.kind {
            ParamKind::Energy => {
                if let Some(pw) = &self.exact {
                    Ok(ExactPiecewiseSolution::new(pw, p).prufer_phase(r))
                } else {
                    Ok(PruferSystem::new(self.potential, self.ang, p).state_at(r, self.tol)?[0])
                }
            }
            ParamKind::Lambda => {
                let ang = AngularParameter::new(p)?;
                Ok(PruferSystem::new(self.potential, ang, self.energy).state_at(r, self.tol)?[0])
            }
        }
    }

    /// Increasing function of `p` that vanishes on the line.
    fn residual(&self, p: f64, r: f64, n: usize) -> Result<f64> {
        let d = self.theta(p, r)? - n as f64 * PI;
        Ok(match self.kind {
            ParamKind::Energy => d,
            ParamKind::Lambda => -d,
        })
    }

    /// Root of [`Self::residual`] near `guess`, bracketing outward by doubling.
    fn solve(&self, r: f64, n: usize, guess: f64, step: f64, floor: f64) -> Result<f64> {
        let f = |p: f64| self.residual(p, r, n);
        let mut step = step.abs().max(1e-9);
        let guess = guess.max(floor);
        let fg = f(guess)?;
        if fg == 0.0 {
            return Ok(guess);
        }
        let (mut a, mut b) = (guess, guess);
        let (mut fa, mut fb) = (fg, fg);
        for _ in 0..200 {
            if fg < 0.0 {
                a = b;
                fa = fb;
                b = a + step;
                fb = f(b)?;
                if fb >= 0.0 {
                    break;
                }
            } else {
                b = a;
                fb = fa;
                a = (b - step).max(floor);
                fa = f(a)?;
                if fa <= 0.0 {
                    break;
                }
                if a == floor {
                    return Err(Error::Domain(format!("no zero {n} at r = {r} above parameter floor {floor}")));
                }
            }
            step *= 2.0;
        }
        if fa.signum() == fb.signum() {
            return Err(Error::Domain(format!("could not bracket zero {n} at r = {r}")));
        }
        brent(f, a, b, 1e-15 * a.abs().max(b.abs()).max(1e-3), 200)
    }
}

fn extrapolate(prev: &[(f64, f64)], r: f64) -> Option<(f64, f64)> {
    match prev.len() {
        0 => None,
        1 => Some((prev[0].0, prev[0].0.abs().max(1.0) * 0.05)),
        _ => {
            let (p1, r1) = prev[prev.len() - 1];
            let (p0, r0) = prev[prev.len() - 2];
            let slope = (p1 - p0) / (r1 - r0);
            let pred = p1 + slope * (r - r1);
            let step = (pred - p1).abs().max(1e-6 * p1.abs().max(1.0));
            Some((pred, step))
        }
    }
}

/// Samples a fixed-`lambda` line on ascending radii by solving for `E` at each radius.
pub fn trace_fixed_l_at_radii(potential: &Potential, n: usize, ell0: AngularParameter, radii: &[f64], tol: f64) -> Result<ZeroLine> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(Error::InvalidInput("radii must be positive and strictly ascending".into()));
    }
    let backend = backend_for(potential, ell0);
    let phase = PhaseAt {
        potential,
        kind: ParamKind::Energy,
        ang: ell0,
        energy: 0.0,
        tol,
        exact: if backend == Backend::Exact { potential.to_piecewise() } else { None },
    };
    let pr = solve_chunked(radii, |chunk| {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(chunk.len());
        for &r in chunk {
            let (guess, step) = extrapolate(&out, r).unwrap_or_else(|| {
                let free = (n as f64 * PI / r).powi(2) + potential.origin_value();
                (free, free.abs().max(1.0) * 0.1)
            });
            let e = phase.solve(r, n, guess, step, f64::NEG_INFINITY)?;
            out.push((e, r));
        }
        Ok(out)
    })?;
    let line = ZeroLine {
        n,
        ell0,
        samples: pr,
        backend,
        truncation: None,
    };
    line.check_invariants()?;
    Ok(line)
}

/// Samples a `lambda` line at fixed energy on ascending radii, all beyond the junction.
pub fn trace_lambda_at_radii(
    potential: &Potential,
    n: usize,
    lambda0: f64,
    e0: f64,
    radii: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    let phase = PhaseAt {
        potential,
        kind: ParamKind::Lambda,
        ang: AngularParameter::new(lambda0)?,
        energy: e0,
        tol,
        exact: None,
    };
    solve_chunked(radii, |chunk| {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(chunk.len());
        for &r in chunk {
            let (guess, step) = extrapolate(&out, r).unwrap_or((lambda0, 0.05));
            let lam = phase.solve(r, n, guess, step, lambda0)?;
            out.push((lam, r));
        }
        Ok(out)
    })
}

/// Runs `solve` on consecutive chunks of `radii` in parallel and concatenates in order.
fn solve_chunked<F>(radii: &[f64], solve: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&[f64]) -> Result<Vec<(f64, f64)>> + Sync,
{
    let parts: Vec<Result<Vec<(f64, f64)>>> = radii.par_chunks(48).map(&solve).collect();
    let mut out = Vec::with_capacity(radii.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Mixed line on an energy grid (uniform in `1/sqrt(E)`) and a `lambda` grid.
pub fn trace_mixed(
    potential: &Potential,
    n: usize,
    ell0: AngularParameter,
    e0: f64,
    e_max: f64,
    lambda_max: f64,
    points: usize,
    tol: f64,
) -> Result<MixedZeroLine> {
    if !(e0 > 0.0 && e_max > e0 && lambda_max > ell0.lambda() && points >= 2) {
        return Err(Error::InvalidInput("need 0 < E0 < E_max, lambda_max > lambda0 and at least two points".into()));
    }
    let (a, b) = (1.0 / e_max.sqrt(), 1.0 / e0.sqrt());
    let e_grid: Vec<f64> = (0..points)
        .map(|i| {
            let t = a + (b - a) * i as f64 / (points - 1) as f64;
            if i == points - 1 {
                e0
            } else {
                1.0 / (t * t)
            }
        })
        .collect();
    let e_line = trace_fixed_l(potential, n, ell0, &e_grid, tol)?;
    if e_line.truncation.is_some() {
        return Err(Error::ZeroBeyondRange {
            n,
            searched: radial::DEFAULT_CEILING,
        });
    }
    let r0 = e_line.samples.last().expect("non-empty").1;
    let mut segment_l = Vec::with_capacity(points);
    for i in 0..points {
        let lam = ell0.lambda() + (lambda_max - ell0.lambda()) * i as f64 / (points - 1) as f64;
        let ang = AngularParameter::new(lam)?;
        let r = if i == 0 {
            r0
        } else {
            radial::nth_zero_with(potential, ang, e0, n, tol, Backend::Numeric, radial::DEFAULT_CEILING)?
        };
        segment_l.push((lam, r));
    }
    let line = MixedZeroLine {
        n,
        ell0,
        e0,
        segment_e: e_line.samples,
        segment_l,
        r0,
    };
    line.check_invariants(1e3 * tol)?;
    Ok(line)
}

/// Mixed line sampled on ascending radii: `E` is solved below the junction,
/// `lambda` above it, and the junction itself is added to both parts.
pub fn trace_mixed_at_radii(
    potential: &Potential,
    n: usize,
    ell0: AngularParameter,
    e0: f64,
    radii: &[f64],
    tol: f64,
) -> Result<MixedZeroLine> {
    let r0 = radial::nth_zero(potential, ell0, e0, n, tol)?;
    let below: Vec<f64> = radii.iter().copied().filter(|&r| r < r0 * (1.0 - 1e-12)).collect();
    let above: Vec<f64> = radii.iter().copied().filter(|&r| r > r0 * (1.0 + 1e-12)).collect();
    let mut segment_e = if below.is_empty() {
        Vec::new()
    } else {
        trace_fixed_l_at_radii(potential, n, ell0, &below, tol)?.samples
    };
    segment_e.push((e0, r0));
    let mut segment_l = vec![(ell0.lambda(), r0)];
    segment_l.extend(trace_lambda_at_radii(potential, n, ell0.lambda(), e0, &above, tol)?);
    let line = MixedZeroLine {
        n,
        ell0,
        e0,
        segment_e,
        segment_l,
        r0,
    };
    line.check_invariants(1e3 * tol)?;
    Ok(line)
}

/// Energy at which the `n`-th zero sits at `r0`, searched inside `bracket`.
pub fn energy_for_zero(potential: &Potential, n: usize, ell0: AngularParameter, r0: f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let f = |e: f64| match radial::nth_zero(potential, ell0, e, n, tol) {
        Ok(r) => Ok(r - r0),
        Err(Error::ZeroBeyondRange { .. }) => Ok(f64::MAX),
        Err(err) => Err(err),
    };
    brent(f, bracket.0, bracket.1, tol, 200)
}

/// Monotone interpolant `r -> p(r)` through the samples of one line piece.
#[derive(Debug, Clone)]
pub struct InverseLine {
    kind: ParamKind,
    r: Vec<f64>,
    p: Vec<f64>,
    interp: Pchip,
}

impl InverseLine {
    /// `samples` are `(param, r)` pairs in any order of `r`.
    pub fn new(kind: ParamKind, samples: &[(f64, f64)]) -> Result<Self> {
        let mut s: Vec<(f64, f64)> = samples.to_vec();
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        let r: Vec<f64> = s.iter().map(|x| x.1).collect();
        let p: Vec<f64> = s.iter().map(|x| x.0).collect();
        let interp = Pchip::new(r.clone(), p.clone())?;
        Ok(Self { kind, r, p, interp })
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.r[0], self.r[self.r.len() - 1])
    }

    pub fn contains(&self, r: f64) -> bool {
        let (a, b) = self.domain();
        r >= a && r <= b
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn params(&self) -> &[f64] {
        &self.p
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !self.contains(r) {
            let (a, b) = self.domain();
            return Err(Error::Domain(format!("r = {r} outside the sampled range [{a}, {b}]")));
        }
        Ok(self.interp.eval(r))
    }
}

pub fn invert_line(line: &ZeroLine) -> Result<InverseLine> {
    line.check_invariants()?;
    InverseLine::new(ParamKind::Energy, &line.samples)
}

/// Inverse of a mixed line: `E(r)` up to `r0`, `lambda(r)` beyond.
#[derive(Debug, Clone)]
pub struct MixedInverse {
    pub energy_part: Option<InverseLine>,
    pub lambda_part: Option<InverseLine>,
    pub r0: f64,
}

impl MixedInverse {
    pub fn eval(&self, r: f64) -> Result<(ParamKind, f64)> {
        let part = if r <= self.r0 { &self.energy_part } else { &self.lambda_part };
        match part {
            Some(p) => Ok((p.kind(), p.eval(r)?)),
            None => Err(Error::Domain(format!("no samples on this side of r0 = {}", self.r0))),
        }
    }
}

pub fn invert_mixed(line: &MixedZeroLine) -> Result<MixedInverse> {
    let part = |kind, s: &[(f64, f64)]| if s.len() >= 2 { InverseLine::new(kind, s).map(Some) } else { Ok(None) };
    Ok(MixedInverse {
        energy_part: part(ParamKind::Energy, &line.segment_e)?,
        lambda_part: part(ParamKind::Lambda, &line.segment_l)?,
        r0: line.r0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOptions {
    /// Samples used on the requested side.
    pub window: usize,
    pub degree: usize,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        Self { window: 15, degree: 6 }
    }
}

/// First three one-sided derivatives with jackknife error bars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub err: [f64; 3],
}

/// Derivatives of `p` at `r` from the `window` samples strictly on `side`.
///
/// Energy lines are fitted through `u = E r^2`, which stays close to the
/// constant `n^2 pi^2` and so needs far fewer polynomial terms; the chain
/// rule maps the result back to `E`. The error bar combines the jackknife
/// spread with the change from dropping the top degree.
pub fn one_sided_derivatives(line: &InverseLine, r: f64, side: Side, opts: DerivativeOptions) -> Result<Derivatives> {
    let (xs, ys) = line.side_samples(r, side, opts)?;
    let kind = line.kind;
    let scale = (xs[xs.len() - 1] - xs[0]).max(1e-12);
    let (full, err) = derivatives_with_errors(&xs, &ys, opts.degree, r, scale, |f, x| map_fit(kind, f, x))?;
    Ok(Derivatives {
        value: full[0],
        d1: full[1],
        d2: full[2],
        d3: full[3],
        err,
    })
}

impl InverseLine {
    /// Fitted `(r, y)` samples strictly on one side of `r`; `y = E r^2` for energy lines.
    pub(crate) fn side_samples(&self, r: f64, side: Side, opts: DerivativeOptions) -> Result<(Vec<f64>, Vec<f64>)> {
        let idx = match side {
            Side::Left => {
                let end = self.r.partition_point(|&x| x < r);
                end.saturating_sub(opts.window)..end
            }
            Side::Right => {
                let start = self.r.partition_point(|&x| x <= r);
                start..(start + opts.window).min(self.r.len())
            }
        };
        if idx.len() < opts.window || opts.window < opts.degree + 2 {
            return Err(Error::InsufficientSamples {
                side,
                needed: opts.window.max(opts.degree + 2),
                available: idx.len(),
            });
        }
        let xs: Vec<f64> = self.r[idx.clone()].to_vec();
        let ys: Vec<f64> = idx
            .map(|i| match self.kind {
                ParamKind::Energy => self.p[i] * self.r[i] * self.r[i],
                ParamKind::Lambda => self.p[i],
            })
            .collect();
        Ok((xs, ys))
    }

    /// Polynomial fit of one side; evaluate with [`map_fit`].
    pub(crate) fn side_fit(&self, r: f64, side: Side, opts: DerivativeOptions) -> Result<PolyFit> {
        let (xs, ys) = self.side_samples(r, side, opts)?;
        let scale = (xs[xs.len() - 1] - xs[0]).max(1e-12);
        PolyFit::fit(&xs, &ys, opts.degree, r, scale)
    }
}

/// Value and first three derivatives of the line parameter from a side fit.
pub(crate) fn map_fit(kind: ParamKind, fit: &PolyFit, r: f64) -> [f64; 4] {
    let d = [fit.eval(r), fit.derivative(r, 1), fit.derivative(r, 2), fit.derivative(r, 3)];
    match kind {
        ParamKind::Lambda => d,
        ParamKind::Energy => {
            let [u, u1, u2, u3] = d;
            let r2 = r * r;
            let r3 = r2 * r;
            let r4 = r3 * r;
            let r5 = r4 * r;
            [
                u / r2,
                u1 / r2 - 2.0 * u / r3,
                u2 / r2 - 4.0 * u1 / r3 + 6.0 * u / r4,
                u3 / r2 - 6.0 * u2 / r3 + 18.0 * u1 / r4 - 24.0 * u / r5,
            ]
        }
    }
}

/// Fit at `degree`, mapped through `map`, with errors on entries 1..=3 from
/// the jackknife spread plus the change when the top degree is dropped.
pub(crate) fn derivatives_with_errors<M>(xs: &[f64], ys: &[f64], degree: usize, at: f64, scale: f64, map: M) -> Result<([f64; 4], [f64; 3])>
where
    M: Fn(&PolyFit, f64) -> [f64; 4],
{
    let full = map(&PolyFit::fit(xs, ys, degree, at, scale)?, at);
    let lower = map(&PolyFit::fit(xs, ys, degree - 1, at, scale)?, at);
    let m = xs.len();
    let mut jack = Vec::with_capacity(m);
    let mut x = Vec::with_capacity(m - 1);
    let mut y = Vec::with_capacity(m - 1);
    for skip in 0..m {
        x.clear();
        y.clear();
        for i in (0..m).filter(|&i| i != skip) {
            x.push(xs[i]);
            y.push(ys[i]);
        }
        jack.push(map(&PolyFit::fit(&x, &y, degree, at, scale)?, at));
    }
    let mut err = [0.0; 3];
    for (c, e) in err.iter_mut().enumerate() {
        let mean = jack.iter().map(|d| d[c + 1]).sum::<f64>() / m as f64;
        let var = jack.iter().map(|d| (d[c + 1] - mean).powi(2)).sum::<f64>() * (m - 1) as f64 / m as f64;
        let trunc = full[c + 1] - lower[c + 1];
        *e = (var + trunc * trunc).sqrt();
    }
    Ok((full, err))
}

/// Dirichlet eigenvalue and normalization constant read off a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDatum {
    pub radius: f64,
    pub e_star: f64,
    /// `-dr_n/dE` at `E*`.
    pub rho: f64,
}

/// `E*` from the monotone interpolant and `rho` from a centred local fit
/// (up to seven samples, cubic in `u = E r^2`).
pub fn spectral_data(line: &ZeroLine, radius: f64) -> Result<SpectralDatum> {
    let inv = invert_line(line)?;
    let e_star = inv.eval(radius)?;
    let r = inv.radii();
    let m = r.len().min(7);
    let centre = r.partition_point(|&x| x < radius);
    let start = centre.saturating_sub(m / 2).min(r.len() - m);
    let xs = &r[start..start + m];
    let ys: Vec<f64> = (start..start + m).map(|i| inv.params()[i] * r[i] * r[i]).collect();
    let scale = (xs[m - 1] - xs[0]).max(1e-12);
    let fit = PolyFit::fit(xs, &ys, 3.min(m - 1), radius, scale)?;
    let rho = -1.0 / map_fit(ParamKind::Energy, &fit, radius)[1];
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvariantViolation(format!(
            "normalization constant rho = {rho} at R = {radius} is not positive"
        )));
    }
    Ok(SpectralDatum { radius, e_star, rho })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distinction {
    Separated { energy: f64, r_a: f64, r_b: f64 },
    Indistinguishable,
}

/// Compares `r_n` of two potentials along an energy grid.
pub fn lines_distinguish(
    a: &Potential,
    b: &Potential,
    n: usize,
    ell0: AngularParameter,
    e_grid: &[f64],
    tol: f64,
) -> Result<Distinction> {
    let solver_tol = tol.clamp(1e-12, 1e-10);
    for &e in e_grid {
        let ra = radial::nth_zero(a, ell0, e, n, solver_tol);
        let rb = radial::nth_zero(b, ell0, e, n, solver_tol);
        match (ra, rb) {
            (Ok(x), Ok(y)) => {
                if (x - y).abs() > tol {
                    return Ok(Distinction::Separated { energy: e, r_a: x, r_b: y });
                }
            }
            (Ok(x), Err(Error::ZeroBeyondRange { .. })) => {
                return Ok(Distinction::Separated {
                    energy: e,
                    r_a: x,
                    r_b: f64::INFINITY,
                })
            }
            (Err(Error::ZeroBeyondRange { .. }), Ok(y)) => {
                return Ok(Distinction::Separated {
                    energy: e,
                    r_a: f64::INFINITY,
                    r_b: y,
                })
            }
            (Err(Error::ZeroBeyondRange { .. }), Err(Error::ZeroBeyondRange { .. })) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(Distinction::Indistinguishable)
}

/// A line read back from its CSV form.
#[derive(Debug, Clone, PartialEq)]
pub enum LineData {
    Fixed(ZeroLine),
    Mixed(MixedZeroLine),
}

fn header(n: usize, ell0: AngularParameter, e0: Option<f64>, meta: &[(String, String)]) -> String {
    let mut s = format!(
        "# n={n} ell0={} E0={}\n",
        fmt_num(ell0.lambda()),
        e0.map(fmt_num).unwrap_or_else(|| "none".into())
    );
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    s.push_str("param_kind,param_value,r\n");
    s
}

/// CSV with the `# n=.. ell0=.. E0=..` header; `ell0` carries `lambda0 = l0 + 1/2`.
pub fn line_to_csv(line: &ZeroLine, meta: &[(String, String)]) -> String {
    let mut m = vec![("backend".to_string(), line.backend.to_string())];
    if let Some(t) = line.truncation {
        m.push(("truncated_at_E".into(), fmt_num(t.param)));
        m.push(("searched_to_r".into(), fmt_num(t.searched)));
    }
    m.extend_from_slice(meta);
    let mut s = header(line.n, line.ell0, None, &m);
    for (e, r) in &line.samples {
        let _ = writeln!(s, "E,{},{}", fmt_num(*e), fmt_num(*r));
    }
    s
}

pub fn mixed_to_csv(line: &MixedZeroLine, meta: &[(String, String)]) -> String {
    let mut m = vec![("r0".to_string(), fmt_num(line.r0))];
    m.extend_from_slice(meta);
    let mut s = header(line.n, line.ell0, Some(line.e0), &m);
    for (e, r) in &line.segment_e {
        let _ = writeln!(s, "E,{},{}", fmt_num(*e), fmt_num(*r));
    }
    for (l, r) in &line.segment_l {
        let _ = writeln!(s, "lambda,{},{}", fmt_num(*l), fmt_num(*r));
    }
    s
}

pub fn line_from_csv(text: &str) -> Result<LineData> {
    let mut n = None;
    let mut lambda0 = None;
    let mut e0: Option<Option<f64>> = None;
    let mut backend = Backend::Numeric;
    let mut e_rows = Vec::new();
    let mut l_rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            for (k, v) in parse_header_pairs(line) {
                match k.as_str() {
                    "n" => {
                        n = Some(v.parse::<usize>().map_err(|_| Error::Parse {
                            line: ln,
                            message: format!("bad zero index {v:?}"),
                        })?)
                    }
                    "ell0" => lambda0 = Some(parse_num(&v, ln)?),
                    "E0" => e0 = Some(if v == "none" { None } else { Some(parse_num(&v, ln)?) }),
                    "backend" if v == "exact" => backend = Backend::Exact,
                    _ => {}
                }
            }
            continue;
        }
        if line.starts_with("param_kind") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse {
                line: ln,
                message: format!("expected 3 columns, got {}", cols.len()),
            });
        }
        let kind = ParamKind::parse(cols[0], ln)?;
        let row = (parse_num(cols[1], ln)?, parse_num(cols[2], ln)?);
        match kind {
            ParamKind::Energy => e_rows.push(row),
            ParamKind::Lambda => l_rows.push(row),
        }
    }
    let missing = |what: &str| Error::Parse {
        line: 1,
        message: format!("header lacks {what}"),
    };
    let n = n.ok_or_else(|| missing("n"))?;
    let ell0 = AngularParameter::new(lambda0.ok_or_else(|| missing("ell0"))?)?;
    match e0.ok_or_else(|| missing("E0"))? {
        None => {
            let line = ZeroLine {
                n,
                ell0,
                samples: e_rows,
                backend,
                truncation: None,
            };
            line.check_invariants()?;
            Ok(LineData::Fixed(line))
        }
        Some(e0) => {
            let r0 = e_rows
                .last()
                .or(l_rows.first())
                .map(|x| x.1)
                .ok_or_else(|| missing("samples"))?;
            Ok(LineData::Mixed(MixedZeroLine {
                n,
                ell0,
                e0,
                segment_e: e_rows,
                segment_l: l_rows,
                r0,
            }))
        }
    }
}
