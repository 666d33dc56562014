//! First-order (Born) inversion from mixed phase-shift data.
//!
//! Both branches of the data determine the sine transform
//! `g(q) = int_0^inf sin(q r) r V(r) dr`: the fixed-energy partial waves at
//! `k0` give `g` on `[0, 2 k0]` through a Legendre resummation, and the
//! s-wave phase at `k >= k0` gives `g(2k) = -d(k delta)/dk`. Once `g` is known
//! everywhere, `r V(r)` is its inverse sine transform.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::{fmt_num, parse_header_pairs, parse_num};
use crate::numerics::interp::CubicSpline;
use crate::numerics::polyfit::PolyFit;
use crate::numerics::quad::{adaptive_with_points, gauss_legendre};
use crate::potentials::{Potential, SampledPotential};
use crate::radial::{phase_shift, phase_shifts_on_grid};
use crate::special::{legendre_all, riccati_j};

/// Analytic sine transform of `v0 exp(-mu r)`.
pub fn exponential_sine_transform(v0: f64, mu: f64, q: f64) -> f64 {
    2.0 * v0 * mu * q / (mu * mu + q * q).powi(2)
}

/// Analytic s-wave Born phase of `v0 exp(-mu r)`.
pub fn exponential_born_swave(v0: f64, mu: f64, k: f64) -> f64 {
    -(v0 / k) * (0.5 / mu - mu / (2.0 * (mu * mu + 4.0 * k * k)))
}

/// Born phase `-(1/k) int_0^inf u_l(kr)^2 V(r) dr` with `u_l` the Riccati-Bessel function.
pub fn born_phase_partial(potential: &Potential, ell: usize, k: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("momentum must be positive, got {k}")));
    }
    if potential.is_zero() {
        return Ok(0.0);
    }
    let r_end = potential.tail_radius(1e-15);
    if !r_end.is_finite() {
        return Err(Error::Domain("potential tail does not converge; check integrability".into()));
    }
    let mut points = vec![0.0];
    let half_period = PI / k;
    let pieces = ((r_end / half_period).ceil() as usize).clamp(1, 20_000);
    let mut cuts: Vec<f64> = (1..=pieces).map(|i| r_end * i as f64 / pieces as f64).collect();
    cuts.extend(potential.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r_end));
    cuts.sort_by(f64::total_cmp);
    points.extend(cuts);
    let mut f = |r: f64| {
        let u = if ell == 0 { (k * r).sin() } else { riccati_j(ell, k * r) };
        u * u * potential.value(r)
    };
    let mut integral = adaptive_with_points(&mut f, &points, 1e-16, 1e-13).value;
    if let Some((v0, mu)) = potential.exponential_params() {
        // the square averages to 1/2 this far out
        integral += 0.5 * v0 * (-mu * r_end).exp() / mu;
    }
    Ok(-integral / k)
}

pub fn born_phase_swave(potential: &Potential, k: f64) -> Result<f64> {
    born_phase_partial(potential, 0, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSource {
    Born,
    Exact,
}

impl PhaseSource {
    pub fn label(&self) -> &'static str {
        match self {
            PhaseSource::Born => "born",
            PhaseSource::Exact => "exact",
        }
    }
}

/// `delta(l0, k)` for `k >= k0` together with `delta(l, k0)` for `l >= l0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftDataset {
    pub ell0: usize,
    pub k0: f64,
    /// `(k, delta(l0, k))`, `k` ascending from `k0`.
    pub fixed_l_branch: Vec<(f64, f64)>,
    /// `(l, delta(l, k0))`, `l = l0, l0 + 1, ...`.
    pub fixed_e_branch: Vec<(usize, f64)>,
    pub source: PhaseSource,
}

impl PhaseShiftDataset {
    pub fn validate(&self) -> Result<()> {
        let ks = &self.fixed_l_branch;
        if ks.is_empty() || (ks[0].0 - self.k0).abs() > 1e-12 * self.k0 {
            return Err(Error::InvalidInput("fixed-l branch must start at k0".into()));
        }
        if ks.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput("fixed-l branch must be ascending in k".into()));
        }
        if let Some(w) = ks.windows(2).find(|w| (w[1].1 - w[0].1).abs() > 0.5 * PI) {
            return Err(Error::InvariantViolation(format!(
                "phase jumps by {} between k = {} and k = {}",
                w[1].1 - w[0].1,
                w[0].0,
                w[1].0
            )));
        }
        for (i, (l, _)) in self.fixed_e_branch.iter().enumerate() {
            if *l != self.ell0 + i {
                return Err(Error::InvalidInput("fixed-energy branch must list consecutive l from l0".into()));
            }
        }
        Ok(())
    }
}

/// `n` momenta from `k0` to `k_max` inclusive.
pub fn momentum_grid(k0: f64, k_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| k0 + (k_max - k0) * i as f64 / (n - 1).max(1) as f64).collect()
}

pub fn born_dataset(potential: &Potential, ell0: usize, k0: f64, k_max: f64, nk: usize, l_max: usize) -> Result<PhaseShiftDataset> {
    let ks = momentum_grid(k0, k_max, nk);
    let fixed_l: Vec<(f64, f64)> = ks
        .par_iter()
        .map(|&k| Ok((k, born_phase_partial(potential, ell0, k)?)))
        .collect::<Result<_>>()?;
    let fixed_e: Vec<(usize, f64)> = (ell0..=l_max)
        .into_par_iter()
        .map(|l| Ok((l, born_phase_partial(potential, l, k0)?)))
        .collect::<Result<_>>()?;
    let ds = PhaseShiftDataset {
        ell0,
        k0,
        fixed_l_branch: fixed_l,
        fixed_e_branch: fixed_e,
        source: PhaseSource::Born,
    };
    ds.validate()?;
    Ok(ds)
}

/// Dataset from the full radial equation rather than its first-order approximation.
pub fn exact_dataset(
    potential: &Potential,
    ell0: usize,
    k0: f64,
    k_max: f64,
    nk: usize,
    l_max: usize,
    tol: f64,
) -> Result<PhaseShiftDataset> {
    let r_match = potential.tail_radius(tol).max(1.0);
    let ks = momentum_grid(k0, k_max, nk);
    let deltas = phase_shifts_on_grid(potential, ell0, &ks, r_match, tol)?;
    let fixed_e: Vec<(usize, f64)> = (ell0..=l_max)
        .into_par_iter()
        .map(|l| Ok((l, phase_shift(potential, l, k0, r_match, tol)?)))
        .collect::<Result<_>>()?;
    let ds = PhaseShiftDataset {
        ell0,
        k0,
        fixed_l_branch: ks.into_iter().zip(deltas).collect(),
        fixed_e_branch: fixed_e,
        source: PhaseSource::Exact,
    };
    ds.validate()?;
    Ok(ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Low,
    High,
    Analytic,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::Low => "low",
            Region::High => "high",
            Region::Analytic => "analytic",
        }
    }
}

/// Samples of `g(q)` on an ascending grid, each tagged with the route that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SineProfile {
    pub q: Vec<f64>,
    pub g: Vec<f64>,
    pub region: Vec<Region>,
    /// Index of `q = 2 k0` in an assembled profile.
    pub seam_index: Option<usize>,
}

impl SineProfile {
    pub fn analytic(q: Vec<f64>, g: impl Fn(f64) -> f64) -> Self {
        let gv = q.iter().map(|&x| g(x)).collect();
        let region = vec![Region::Analytic; q.len()];
        Self {
            q,
            g: gv,
            region,
            seam_index: None,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.g.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn require_s_wave(ds: &PhaseShiftDataset) -> Result<()> {
    if ds.ell0 != 0 {
        return Err(Error::Unsupported(format!(
            "the transform routes need l0 = 0, got l0 = {}",
            ds.ell0
        )));
    }
    Ok(())
}

/// Points used by the local derivative fit of the high branch.
const HIGH_FIT_POINTS: usize = 9;
const HIGH_FIT_DEGREE: usize = 4;

/// `g(2k) = -d(k delta(0, k))/dk`, differentiated by a sliding least-squares
/// polynomial centred on each sample.
pub fn g_high(ds: &PhaseShiftDataset) -> Result<SineProfile> {
    require_s_wave(ds)?;
    ds.validate()?;
    let ks: Vec<f64> = ds.fixed_l_branch.iter().map(|p| p.0).collect();
    let f: Vec<f64> = ds.fixed_l_branch.iter().map(|p| p.0 * p.1).collect();
    let n = ks.len();
    let m = HIGH_FIT_POINTS.min(n);
    if m < 3 {
        return Err(Error::InsufficientSamples {
            side: crate::Side::Right,
            needed: 3,
            available: n,
        });
    }
    let degree = HIGH_FIT_DEGREE.min(m - 1);
    let mut q = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(m / 2).min(n - m);
        let xs = &ks[start..start + m];
        let ys = &f[start..start + m];
        let scale = (xs[m - 1] - xs[0]).max(1e-12);
        let fit = PolyFit::fit(xs, ys, degree, ks[i], scale)?;
        q.push(2.0 * ks[i]);
        g.push(-fit.derivative(ks[i], 1));
    }
    Ok(SineProfile {
        region: vec![Region::High; n],
        q,
        g,
        seam_index: None,
    })
}

/// Relative size of `delta(L_max)` beyond which the partial-wave sum is refused.
pub const TRUNCATION_TOLERANCE: f64 = 1e-2;

/// Continues `|delta_l|` past `L_max` with `log|delta| = a + b l + c ln l + d / l`
/// fitted on the last 15 partial waves; `None` when the data do not decay.
fn extrapolate_partial_waves(deltas: &[f64]) -> Option<Vec<f64>> {
    let n = deltas.len();
    let m = 15;
    if n < m + 5 {
        return None;
    }
    let tail = &deltas[n - m..];
    let sign = tail[m - 1].signum();
    if tail.iter().any(|d| d.signum() != sign || *d == 0.0) {
        return None;
    }
    let a = DMatrix::from_fn(m, 4, |i, j| {
        let l = (n - m + i) as f64;
        match j {
            0 => 1.0,
            1 => l,
            2 => l.ln(),
            _ => 1.0 / l,
        }
    });
    let y = DVector::from_iterator(m, tail.iter().map(|d| d.abs().ln()));
    let c = a.svd(true, true).solve(&y, 1e-14).ok()?;
    if c[1] >= 0.0 {
        return None;
    }
    let model = |l: f64| sign * (c[0] + c[1] * l + c[2] * l.ln() + c[3] / l).exp();
    let floor = 1e-18 * deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let mut out = Vec::new();
    let mut l = n;
    while l < 20_000 {
        let v = model(l as f64);
        if v.abs() < floor {
            break;
        }
        out.push(v);
        l += 1;
    }
    Some(out)
}

/// `g(q) = -(q/k0) sum_l (2l+1) delta(l, k0) P_l(1 - q^2/(2 k0^2))` on `q_grid` within `[0, 2 k0]`.
pub fn g_low(ds: &PhaseShiftDataset, q_grid: &[f64]) -> Result<SineProfile> {
    require_s_wave(ds)?;
    let k0 = ds.k0;
    if q_grid.iter().any(|&q| !(0.0..=2.0 * k0 * (1.0 + 1e-12)).contains(&q)) {
        return Err(Error::InvalidInput("low-branch grid must lie in [0, 2 k0]".into()));
    }
    let mut deltas: Vec<f64> = ds.fixed_e_branch.iter().map(|p| p.1).collect();
    let dmax = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if dmax == 0.0 {
        return Ok(SineProfile {
            q: q_grid.to_vec(),
            g: vec![0.0; q_grid.len()],
            region: vec![Region::Low; q_grid.len()],
            seam_index: None,
        });
    }
    let last = deltas.last().map_or(0.0, |d| d.abs());
    if last > TRUNCATION_TOLERANCE * dmax {
        return Err(Error::Truncation {
            last,
            tol: TRUNCATION_TOLERANCE * dmax,
        });
    }
    if let Some(ext) = extrapolate_partial_waves(&deltas) {
        deltas.extend(ext);
    }
    let l_top = deltas.len() - 1;
    let g: Vec<f64> = q_grid
        .iter()
        .map(|&q| {
            let x = (1.0 - q * q / (2.0 * k0 * k0)).max(-1.0);
            let p = legendre_all(l_top, x);
            let s: f64 = deltas.iter().enumerate().map(|(l, d)| (2 * l + 1) as f64 * d * p[l]).sum();
            -(q / k0) * s
        })
        .collect();
    Ok(SineProfile {
        q: q_grid.to_vec(),
        g,
        region: vec![Region::Low; q_grid.len()],
        seam_index: None,
    })
}

/// Joins the two routes at `q = 2 k0`, averaging the seam value.
pub fn assemble_g(low: &SineProfile, high: &SineProfile, seam_tol: f64) -> Result<SineProfile> {
    let (ql, qh) = match (low.q.last(), high.q.first()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::InvalidInput("empty profile".into())),
    };
    if (ql - qh).abs() > 1e-9 * ql.max(1.0) {
        return Err(Error::InvalidInput(format!("low branch ends at {ql} but high branch starts at {qh}")));
    }
    let scale = low.max_abs().max(high.max_abs());
    let (gl, gh) = (low.g[low.g.len() - 1], high.g[0]);
    if (gl - gh).abs() > seam_tol * scale {
        return Err(Error::SeamMismatch { q: ql, low: gl, high: gh });
    }
    let n_low = low.q.len();
    let mut q = low.q.clone();
    let mut g = low.g.clone();
    let mut region = low.region.clone();
    g[n_low - 1] = 0.5 * (gl + gh);
    q.extend_from_slice(&high.q[1..]);
    g.extend_from_slice(&high.g[1..]);
    region.extend_from_slice(&high.region[1..]);
    Ok(SineProfile {
        q,
        g,
        region,
        seam_index: Some(n_low - 1),
    })
}

/// `int_x^inf sin(t)/t dt`.
fn sine_integral_tail(x: f64) -> f64 {
    if x > 4.0 && x <= 50.0 {
        let mut pts: Vec<f64> = (0..=((x / PI) as usize)).map(|i| i as f64 * PI).collect();
        pts.push(x);
        pts.dedup();
        let si = adaptive_with_points(&mut |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t }, &pts, 1e-16, 1e-15).value;
        0.5 * PI - si
    } else if x <= 4.0 {
        // pi/2 - Si(x), Si by its power series
        let (mut term, mut si, mut n) = (x, x, 0usize);
        while term.abs() > 1e-18 * si.abs().max(1e-300) && n < 200 {
            n += 1;
            let k = (2 * n + 1) as f64;
            term *= -x * x / ((k - 1.0) * k);
            si += term / k;
        }
        0.5 * PI - si
    } else {
        let (mut f, mut g) = (0.0, 0.0);
        let (mut tf, mut tg) = (1.0 / x, 1.0 / (x * x));
        for n in 0..((0.5 * x) as usize).min(40) {
            f += tf;
            g += tg;
            let k = (2 * n + 2) as f64;
            tf *= -(k - 1.0) * k / (x * x);
            tg *= -k * (k + 1.0) / (x * x);
        }
        f * x.cos() + g * x.sin()
    }
}

/// `int_Q^inf sin(q r) / q^3 dq`.
fn cubic_tail(q_max: f64, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let x = q_max * r;
    let s3 = x.sin() / (2.0 * x * x) + x.cos() / (2.0 * x) - 0.5 * sine_integral_tail(x);
    r * r * s3
}

#[derive(Debug, Clone, PartialEq)]
pub struct SineInversion {
    pub potential: SampledPotential,
    /// Set when `g` has not decayed at the end of the profile.
    pub tail_warning: Option<String>,
}

/// Relative size of `|g(Q_max)|` above which a tail warning is recorded.
pub const TAIL_TOLERANCE: f64 = 1e-3;

/// `r V(r) = (2/pi) int_0^Q sin(q r) g(q) dq` on a cubic spline of `g`,
/// integrated piecewise between spline knots and zeros of `sin(q r)`,
/// plus a `g ~ A/q^3` tail beyond `Q` when `with_tail` is set.
fn sine_inverse(profile: &SineProfile, r_grid: &[f64], with_tail: bool) -> Result<SineInversion> {
    if profile.q.len() < 2 || r_grid.is_empty() {
        return Err(Error::InvalidInput("need a profile and a radius grid".into()));
    }
    let spline = CubicSpline::new(profile.q.clone(), profile.g.clone())?;
    let q_lo = profile.q[0];
    let q_max = profile.q[profile.q.len() - 1];
    let amp = profile.g[profile.g.len() - 1] * q_max.powi(3);
    let (gx, gw) = gauss_legendre(8);
    let integrate = |h: &dyn Fn(f64) -> f64, cuts: &[f64]| -> f64 {
        cuts.windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let (m, half) = (0.5 * (a + b), 0.5 * (b - a));
                half * gx.iter().zip(&gw).map(|(x, wt)| wt * h(m + half * x)).sum::<f64>()
            })
            .sum()
    };
    let values: Vec<f64> = r_grid
        .par_iter()
        .map(|&r| {
            let mut cuts: Vec<f64> = profile.q.clone();
            if r > 0.0 {
                let step = 0.5 * PI / r;
                let mut t = (q_lo / step).ceil() * step;
                while t < q_max {
                    cuts.push(t);
                    t += step;
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let body = integrate(&|q: f64| (q * r).sin() * spline.eval(q), &cuts);
                let tail = if with_tail { amp * cubic_tail(q_max, r) } else { 0.0 };
                2.0 / PI * (body + tail) / r
            } else {
                // r -> 0: V(0) = (2/pi) int q g(q) dq
                let body = integrate(&|q: f64| q * spline.eval(q), &cuts);
                let tail = if with_tail { amp / q_max } else { 0.0 };
                2.0 / PI * (body + tail)
            }
        })
        .collect();
    let tail_warning = (with_tail && profile.g[profile.g.len() - 1].abs() > TAIL_TOLERANCE * profile.max_abs()).then(|| {
        format!(
            "|g(Q_max)| = {:e} exceeds {TAIL_TOLERANCE:e} of max|g|; the tail model dominates",
            profile.g[profile.g.len() - 1].abs()
        )
    });
    Ok(SineInversion {
        potential: SampledPotential::new(r_grid.to_vec(), values)?,
        tail_warning,
    })
}

pub fn invert_sine(profile: &SineProfile, r_grid: &[f64]) -> Result<SineInversion> {
    if profile.q.first().is_none_or(|&q| q > 1e-12) {
        return Err(Error::InvalidInput("profile must start at q = 0".into()));
    }
    sine_inverse(profile, r_grid, true)
}

/// The fixed-energy-only answer: `g` taken as zero beyond `2 k0`.
pub fn invert_sine_band_limited(low: &SineProfile, r_grid: &[f64]) -> Result<SampledPotential> {
    Ok(sine_inverse(low, r_grid, false)?.potential)
}

/// Relative L2 distance on `r_grid` by the trapezoid rule.
pub fn relative_l2_error(got: &SampledPotential, truth: &Potential, r_grid: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for w in r_grid.windows(2) {
        let h = w[1] - w[0];
        for (&r, wt) in w.iter().zip([0.5, 0.5]) {
            let t = truth.value(r);
            num += wt * h * (got.value(r) - t).powi(2);
            den += wt * h * t * t;
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

pub fn max_abs_error(got: &SampledPotential, truth: &Potential, r_grid: &[f64]) -> f64 {
    r_grid.iter().map(|&r| (got.value(r) - truth.value(r)).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub k0: f64,
    pub k_max: f64,
    pub nk: usize,
    pub l_max: usize,
    /// Points of the low branch on `[0, 2 k0]`.
    pub n_low: usize,
    pub r_grid: Vec<f64>,
    pub seam_tol: f64,
    pub source: PhaseSource,
}

impl PipelineOptions {
    /// `k` spacing `min(1/20, k0/20)` and 400 radii on `[0.1, 8]`.
    pub fn new(k0: f64, k_max: f64, l_max: usize) -> Self {
        let dk = (k0 / 20.0).min(0.05);
        let nk = (((k_max - k0) / dk).round() as usize + 1).max(HIGH_FIT_POINTS);
        Self {
            k0,
            k_max,
            nk,
            l_max,
            n_low: 201,
            r_grid: (0..400).map(|i| 0.1 + 7.9 * i as f64 / 399.0).collect(),
            seam_tol: 1e-3,
            source: PhaseSource::Born,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub dataset: PhaseShiftDataset,
    pub low: SineProfile,
    pub high: SineProfile,
    pub profile: SineProfile,
    pub reconstruction: SineInversion,
    pub band_limited: SampledPotential,
    pub l2_error: f64,
    pub max_error: f64,
    pub band_limited_l2_error: f64,
    pub seam_mismatch: f64,
}

/// Data generation, both transform routes, assembly and inversion, with errors against the input.
pub fn mixed_pipeline(potential: &Potential, opts: &PipelineOptions) -> Result<PipelineReport> {
    let dataset = match opts.source {
        PhaseSource::Born => born_dataset(potential, 0, opts.k0, opts.k_max, opts.nk, opts.l_max)?,
        PhaseSource::Exact => exact_dataset(potential, 0, opts.k0, opts.k_max, opts.nk, opts.l_max, 1e-10)?,
    };
    let q_low: Vec<f64> = (0..opts.n_low)
        .map(|i| 2.0 * opts.k0 * i as f64 / (opts.n_low - 1) as f64)
        .collect();
    let low = g_low(&dataset, &q_low)?;
    let high = g_high(&dataset)?;
    let profile = assemble_g(&low, &high, opts.seam_tol)?;
    let seam_mismatch = (low.g[low.g.len() - 1] - high.g[0]).abs();
    let reconstruction = invert_sine(&profile, &opts.r_grid)?;
    let band_limited = invert_sine_band_limited(&low, &opts.r_grid)?;
    let l2_error = relative_l2_error(&reconstruction.potential, potential, &opts.r_grid);
    let max_error = max_abs_error(&reconstruction.potential, potential, &opts.r_grid);
    let band_limited_l2_error = relative_l2_error(&band_limited, potential, &opts.r_grid);
    Ok(PipelineReport {
        dataset,
        low,
        high,
        profile,
        reconstruction,
        band_limited,
        l2_error,
        max_error,
        band_limited_l2_error,
        seam_mismatch,
    })
}

/// CSV `branch,param,delta` with `k` rows for the fixed-l branch and `l` rows for the fixed-energy branch.
pub fn dataset_to_csv(ds: &PhaseShiftDataset, meta: &[(String, String)]) -> String {
    let mut s = format!("# ell0={} k0={} source={}\n", ds.ell0, fmt_num(ds.k0), ds.source.label());
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    s.push_str("branch,param,delta\n");
    for (k, d) in &ds.fixed_l_branch {
        let _ = writeln!(s, "k,{},{}", fmt_num(*k), fmt_num(*d));
    }
    for (l, d) in &ds.fixed_e_branch {
        let _ = writeln!(s, "l,{l},{}", fmt_num(*d));
    }
    s
}

pub fn dataset_from_csv(text: &str) -> Result<PhaseShiftDataset> {
    let mut ell0 = None;
    let mut k0 = None;
    let mut source = PhaseSource::Born;
    let mut fixed_l = Vec::new();
    let mut fixed_e = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with("branch") {
            continue;
        }
        if line.starts_with('#') {
            for (k, v) in parse_header_pairs(line) {
                match k.as_str() {
                    "ell0" => {
                        ell0 = Some(v.parse::<usize>().map_err(|_| Error::Parse {
                            line: ln,
                            message: format!("bad l0 {v:?}"),
                        })?)
                    }
                    "k0" => k0 = Some(parse_num(&v, ln)?),
                    "source" if v == "exact" => source = PhaseSource::Exact,
                    _ => {}
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::Parse {
                line: ln,
                message: format!("expected 3 columns, got {}", cols.len()),
            });
        }
        let delta = parse_num(cols[2], ln)?;
        match cols[0] {
            "k" => fixed_l.push((parse_num(cols[1], ln)?, delta)),
            "l" => fixed_e.push((
                cols[1].parse::<usize>().map_err(|_| Error::Parse {
                    line: ln,
                    message: format!("bad partial wave {:?}", cols[1]),
                })?,
                delta,
            )),
            other => {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("unknown branch {other:?}"),
                })
            }
        }
    }
    let ds = PhaseShiftDataset {
        ell0: ell0.unwrap_or(0),
        k0: k0.or(fixed_l.first().map(|p| p.0)).ok_or_else(|| Error::Parse {
            line: 1,
            message: "no k0 in header and no k rows".into(),
        })?,
        fixed_l_branch: fixed_l,
        fixed_e_branch: fixed_e,
        source,
    };
    ds.validate()?;
    Ok(ds)
}

/// CSV `q,g,region`.
pub fn profile_to_csv(p: &SineProfile, meta: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    s.push_str("q,g,region\n");
    for ((q, g), r) in p.q.iter().zip(&p.g).zip(&p.region) {
        let _ = writeln!(s, "{},{},{}", fmt_num(*q), fmt_num(*g), r.label());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{ExponentialPotential, PiecewiseConstantPotential};

    fn expo() -> Potential {
        ExponentialPotential::new(-0.5, 1.0).unwrap().into()
    }

    /// `Q_l(z)` and `Q_l'(z)` for `z > 1` by downward recurrence normalized to `Q_0`.
    fn legendre_q_derivative(l: usize, z: f64) -> f64 {
        let top = l + 60;
        let mut q = vec![0.0; top + 2];
        q[top + 1] = 0.0;
        q[top] = 1e-300;
        for n in (1..=top).rev() {
            q[n - 1] = ((2 * n + 1) as f64 * z * q[n] - (n + 1) as f64 * q[n + 1]) / n as f64;
        }
        let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
        let s = q0 / q[0];
        if l == 0 {
            return -1.0 / (z * z - 1.0);
        }
        l as f64 * (z * q[l] * s - q[l - 1] * s) / (z * z - 1.0)
    }

    #[test]
    fn swave_born_matches_closed_form() {
        for k in [0.5, 1.0, 5.0, 20.0] {
            let got = born_phase_swave(&expo(), k).unwrap();
            let want = exponential_born_swave(-0.5, 1.0, k);
            assert!((got - want).abs() < 1e-12 * want.abs().max(1e-3), "k={k}");
        }
        assert!((exponential_born_swave(-0.5, 1.0, 1.0) - 0.2).abs() < 1e-15);
        assert_eq!(born_phase_swave(&Potential::Zero, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn swave_born_of_steps() {
        // int_0^a sin^2(kr) dr = a/2 - sin(2ka)/(4k)
        let p: Potential = PiecewiseConstantPotential::two_step_example().into();
        let s = |a: f64, k: f64| a / 2.0 - (2.0 * k * a).sin() / (4.0 * k);
        let k = 1.0;
        let want = -(1.0 / k) * (-2.0 * s(2.0, k) - (s(3.0, k) - s(2.0, k)));
        assert!((born_phase_swave(&p, k).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn partial_waves_match_legendre_q_oracle() {
        let (v0, mu) = (-0.5, 1.0);
        for &(l, k) in &[(0usize, 5.0), (1, 2.0), (5, 5.0), (20, 5.0), (40, 5.0)] {
            let z = 1.0 + mu * mu / (2.0 * k * k);
            let want = v0 * mu * legendre_q_derivative(l, z) / (2.0 * k * k * k);
            let got = born_phase_partial(&expo(), l, k).unwrap();
            assert!((got - want).abs() < 1e-9 * want.abs() + 1e-15, "l={l}: {got} vs {want}");
        }
    }

    #[test]
    fn high_branch_from_analytic_phases() {
        let ks = momentum_grid(5.0, 10.0, 201);
        let ds = PhaseShiftDataset {
            ell0: 0,
            k0: 5.0,
            fixed_l_branch: ks.iter().map(|&k| (k, exponential_born_swave(-0.5, 1.0, k))).collect(),
            fixed_e_branch: vec![],
            source: PhaseSource::Born,
        };
        let h = g_high(&ds).unwrap();
        for (q, g) in h.q.iter().zip(&h.g) {
            assert!((g - exponential_sine_transform(-0.5, 1.0, *q)).abs() < 1e-6 * g.abs());
        }
        assert!((exponential_sine_transform(-0.5, 1.0, 3.0) + 0.03).abs() < 1e-15);
    }

    #[test]
    fn seam_fault_is_detected() {
        let q_low: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let q_high: Vec<f64> = (0..=20).map(|i| 10.0 + i as f64).collect();
        let g = |q: f64| exponential_sine_transform(-0.5, 1.0, q);
        let low = SineProfile::analytic(q_low, g);
        let high = SineProfile::analytic(q_high.clone(), g);
        assert!(assemble_g(&low, &high, 1e-3).is_ok());
        let bad = SineProfile::analytic(q_high, |q| 1.5 * g(q));
        assert!(matches!(assemble_g(&low, &bad, 1e-3), Err(Error::SeamMismatch { .. })));
    }

    #[test]
    fn analytic_profile_inverts() {
        let q: Vec<f64> = (0..=1200).map(|i| i as f64 * 0.05).collect();
        let prof = SineProfile::analytic(q, |x| exponential_sine_transform(-0.5, 1.0, x));
        let r: Vec<f64> = (0..200).map(|i| 0.1 + 7.9 * i as f64 / 199.0).collect();
        let inv = invert_sine(&prof, &r).unwrap();
        let err = relative_l2_error(&inv.potential, &expo(), &r);
        assert!(err < 1e-2, "{err}");
        assert!(inv.tail_warning.is_none());
    }

    #[test]
    fn sine_integral_tail_values() {
        // Si(1) = 0.946083070367183, Si(30) = 1.566756540030351
        assert!((sine_integral_tail(1.0) - (0.5 * PI - 0.946_083_070_367_183)).abs() < 1e-13);
        assert!((sine_integral_tail(30.0) - (0.5 * PI - 1.566_756_540_030_351)).abs() < 1e-10);
        assert!((sine_integral_tail(20.0) - (0.5 * PI - 1.548_241_701_043_439)).abs() < 1e-10);
    }

    #[test]
    fn dataset_csv_round_trip() {
        let ds = born_dataset(&expo(), 0, 1.0, 2.0, 5, 4).unwrap();
        let back = dataset_from_csv(&dataset_to_csv(&ds, &[])).unwrap();
        assert_eq!(back, ds);
    }
}
