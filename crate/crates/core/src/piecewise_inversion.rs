//! Step potentials from a single line of zeros.
//!
//! Along a line `p(r)` (energy or `lambda`) the first three derivatives of `p`
//! are continuous except where `V` jumps, and there
//! `p'''(a+) - p'''(a-) = -2 p'(a) (V(a+) - V(a-))`.
//! Jumps are found by comparing one-sided polynomial fits, then summed
//! inward from the tail.

use std::fmt::Write as _;

use crate::error::{Error, Result, Side};
use crate::io::fmt_num;
use crate::numerics::polyfit::PolyFit;
use crate::numerics::roots::brent;
use crate::potentials::{PiecewiseConstantPotential, Potential};
use crate::radial::AngularParameter;
use crate::zero_lines::{
    derivatives_with_errors, invert_line, invert_mixed, map_fit, one_sided_derivatives, trace_fixed_l_at_radii,
    trace_lambda_at_radii, DerivativeOptions, InverseLine, MixedZeroLine, ParamKind, ZeroLine,
};

/// Coefficient `c` in `[p'''] = c p'(a) [V]`, for energy lines.
pub const ENERGY_JUMP_COEFFICIENT: f64 = -2.0;
/// The same coefficient for `lambda` lines at fixed energy.
pub const LAMBDA_JUMP_COEFFICIENT: f64 = -2.0;

fn coefficient(kind: ParamKind) -> f64 {
    match kind {
        ParamKind::Energy => ENERGY_JUMP_COEFFICIENT,
        ParamKind::Lambda => LAMBDA_JUMP_COEFFICIENT,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOptions {
    pub derivatives: DerivativeOptions,
    /// Accept a jump when it exceeds this many error bars.
    pub threshold: f64,
    /// Stride of the coarse scan, in samples.
    pub coarse_stride: usize,
}

impl Default for JumpOptions {
    fn default() -> Self {
        Self {
            derivatives: DerivativeOptions::default(),
            threshold: 5.0,
            coarse_stride: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub a: f64,
    /// `p'''(a+) - p'''(a-)`.
    pub jump3: f64,
    /// `p'(a)`.
    pub slope: f64,
    /// `V(a+) - V(a-)`.
    pub delta_v: f64,
    pub delta_v_err: f64,
    pub confidence: f64,
    pub kind: ParamKind,
    pub low_confidence: bool,
    /// Two candidates closer than the window resolution were combined.
    pub merged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub potential: PiecewiseConstantPotential,
    pub jumps: Vec<JumpRecord>,
    /// Largest `|p_rebuilt - p_data| / max(1, |p_data|)` over the re-solved samples.
    pub residual: f64,
}

/// Floor on the combined error bar, relative to the size of the terms compared.
fn noise_floor(d1: f64, d3l: f64, d3r: f64) -> f64 {
    1e-9 * (d1.abs() + d3l.abs() + d3r.abs())
}

/// Jump statistic for a split point: `|p'''(x+) - p'''(x-)|` over its error bar.
fn split_statistic(line: &InverseLine, x: f64, opts: DerivativeOptions) -> Result<f64> {
    let l = one_sided_derivatives(line, x, Side::Left, opts)?;
    let r = one_sided_derivatives(line, x, Side::Right, opts)?;
    let sigma = (l.err[2].powi(2) + r.err[2].powi(2)).sqrt() + noise_floor(l.d1, l.d3, r.d3);
    Ok((r.d3 - l.d3).abs() / sigma)
}

/// Like [`split_statistic`] at gap `j`, but the fits leave out `half`
/// samples on each side, so a jump anywhere in the hole is seen at full size.
fn coarse_statistic(line: &InverseLine, j: usize, half: usize, opts: DerivativeOptions) -> Result<f64> {
    let r = line.radii();
    let x = 0.5 * (r[j] + r[j + 1]);
    let (xl, yl) = line.side_samples(r[j - half], Side::Left, opts)?;
    let (xr, yr) = line.side_samples(r[j + 1 + half], Side::Right, opts)?;
    let kind = line.kind();
    let fit = |xs: &[f64], ys: &[f64]| {
        let scale = (xs[xs.len() - 1] - xs[0]).max(1e-12);
        derivatives_with_errors(xs, ys, opts.degree, x, scale, |f, t| map_fit(kind, f, t))
    };
    let (dl, el) = fit(&xl, &yl)?;
    let (dr, er) = fit(&xr, &yr)?;
    let sigma = el[2].hypot(er[2]) + noise_floor(dl[1], dl[3], dr[3]);
    Ok((dr[3] - dl[3]).abs() / sigma)
}

fn record_at(line: &InverseLine, a: f64, opts: &JumpOptions) -> Result<JumpRecord> {
    let d = opts.derivatives;
    let l = one_sided_derivatives(line, a, Side::Left, d)?;
    let r = one_sided_derivatives(line, a, Side::Right, d)?;
    let jump3 = r.d3 - l.d3;
    let slope = 0.5 * (l.d1 + r.d1);
    let sigma = (l.err[2].powi(2) + r.err[2].powi(2)).sqrt() + noise_floor(slope, l.d3, r.d3);
    let confidence = jump3.abs() / sigma;
    Ok(JumpRecord {
        a,
        jump3,
        slope,
        delta_v: jump3 / (coefficient(line.kind()) * slope),
        delta_v_err: sigma / (coefficient(line.kind()) * slope).abs(),
        confidence,
        kind: line.kind(),
        low_confidence: confidence <= opts.threshold,
        merged: false,
    })
}

/// Places the jump between samples `j` and `j + 1` where the one-sided second
/// derivatives cross; `None` when they do not cross inside that gap.
fn localize_in_gap(line: &InverseLine, j: usize, opts: DerivativeOptions) -> Result<Option<f64>> {
    let r = line.radii();
    let mid = 0.5 * (r[j] + r[j + 1]);
    let left = line.side_fit(mid, Side::Left, opts)?;
    let right = line.side_fit(mid, Side::Right, opts)?;
    let kind = line.kind();
    let gap = |x: f64| -> Result<f64> { Ok(map_fit(kind, &left, x)[2] - map_fit(kind, &right, x)[2]) };
    let (ga, gb) = (gap(r[j])?, gap(r[j + 1])?);
    if ga == 0.0 {
        return Ok(Some(r[j]));
    }
    if ga.signum() == gb.signum() {
        return Ok(None);
    }
    Ok(Some(brent(gap, r[j], r[j + 1], 1e-13 * r[j + 1], 200)?))
}

/// Scans a line for third-derivative jumps: a coarse pass over every
/// `coarse_stride`-th gap, a full pass around each hit, then localization.
pub fn detect_jumps(line: &InverseLine, opts: &JumpOptions) -> Result<Vec<JumpRecord>> {
    let d = opts.derivatives;
    let r = line.radii();
    let w = d.window;
    if r.len() < 2 * w + 1 {
        return Err(Error::InsufficientSamples {
            side: Side::Left,
            needed: 2 * w + 1,
            available: r.len(),
        });
    }
    // gap j sits between samples j and j + 1
    let first = w - 1;
    let last = r.len() - w - 1;
    let stat = |j: usize| split_statistic(line, 0.5 * (r[j] + r[j + 1]), d);
    let stride = opts.coarse_stride.max(1);
    let half = stride / 2;
    let coarse: Vec<usize> = (first + half + 1..=last.saturating_sub(half + 1)).step_by(stride).collect();
    let mut hits = vec![false; r.len()];
    for &j in &coarse {
        if coarse_statistic(line, j, half, d)? > opts.threshold {
            let lo = j.saturating_sub(stride).max(first);
            let hi = (j + stride).min(last);
            for (k, hit) in hits.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *hit = *hit || stat(k)? > opts.threshold;
            }
        }
    }
    // clusters of hits separated by less than a window belong to one jump
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for j in (first..=last).filter(|&j| hits[j]) {
        match clusters.last_mut() {
            Some(c) if j <= c.1 + w => c.1 = j,
            _ => clusters.push((j, j)),
        }
    }
    let mut records: Vec<JumpRecord> = Vec::new();
    for (lo, hi) in clusters {
        let mut best: Option<JumpRecord> = None;
        let mut fallback: Option<(f64, usize)> = None;
        for j in lo.saturating_sub(w / 2).max(first)..=(hi + w / 2).min(last) {
            if let Some(a) = localize_in_gap(line, j, d)? {
                let rec = record_at(line, a, opts)?;
                if best.is_none_or(|b| rec.confidence > b.confidence) {
                    best = Some(rec);
                }
            }
            let s = stat(j)?;
            if fallback.is_none_or(|f| s > f.0) {
                fallback = Some((s, j));
            }
        }
        let rec = match best {
            Some(b) => b,
            None => {
                let j = fallback.expect("non-empty cluster").1;
                let mut rec = record_at(line, 0.5 * (r[j] + r[j + 1]), opts)?;
                rec.low_confidence = true;
                rec
            }
        };
        records.push(rec);
    }
    Ok(merge_close(records, w as f64 * mean_spacing(r)))
}

fn mean_spacing(r: &[f64]) -> f64 {
    (r[r.len() - 1] - r[0]) / (r.len() - 1) as f64
}

fn merge_close(records: Vec<JumpRecord>, resolution: f64) -> Vec<JumpRecord> {
    let mut out: Vec<JumpRecord> = Vec::with_capacity(records.len());
    for rec in records {
        match out.last_mut() {
            Some(prev) if rec.a - prev.a < resolution => {
                let wsum = prev.confidence + rec.confidence;
                prev.a = (prev.a * prev.confidence + rec.a * rec.confidence) / wsum;
                prev.jump3 += rec.jump3;
                prev.delta_v += rec.delta_v;
                prev.delta_v_err = prev.delta_v_err.hypot(rec.delta_v_err);
                prev.confidence = prev.confidence.min(rec.confidence);
                prev.merged = true;
            }
            _ => out.push(rec),
        }
    }
    out
}

/// The curve `-p'''/(2 p')` from each side at `r`, with error bars; its steps are the jumps of `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpProfilePoint {
    pub r: f64,
    pub left: f64,
    pub right: f64,
    pub left_err: f64,
    pub right_err: f64,
}

pub fn jump_profile(line: &InverseLine, points: &[f64], opts: DerivativeOptions) -> Result<Vec<JumpProfilePoint>> {
    points
        .iter()
        .map(|&r| {
            let l = one_sided_derivatives(line, r, Side::Left, opts)?;
            let rt = one_sided_derivatives(line, r, Side::Right, opts)?;
            let q = |d3: f64, d1: f64| -d3 / (2.0 * d1);
            let e = |d3: f64, d1: f64, e3: f64, e1: f64| (e3 / (2.0 * d1)).hypot(d3 * e1 / (2.0 * d1 * d1));
            Ok(JumpProfilePoint {
                r,
                left: q(l.d3, l.d1),
                right: q(rt.d3, rt.d1),
                left_err: e(l.d3, l.d1, l.err[2], l.err[0]),
                right_err: e(rt.d3, rt.d1, rt.err[2], rt.err[0]),
            })
        })
        .collect()
}

/// `deltaV` from the inverse function `r(E)` at `E_a`, with its error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyCheck {
    pub e_a: f64,
    pub delta_v: f64,
    pub err: f64,
}

/// The second route: with `E+` above `E_a` (inside `a`) and `E-` below,
/// `deltaV = -(r'''(E+) - r'''(E-)) / (2 r'(E_a)^3)`.
pub fn jump_consistency(line: &ZeroLine, e_a: f64, opts: DerivativeOptions) -> Result<ConsistencyCheck> {
    let mut s: Vec<(f64, f64)> = line.samples.clone();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let below = s.partition_point(|x| x.0 < e_a);
    let above = s.partition_point(|x| x.0 <= e_a);
    let w = opts.window;
    if below < w || s.len() - above < w {
        return Err(Error::InsufficientSamples {
            side: if below < w { Side::Right } else { Side::Left },
            needed: w,
            available: below.min(s.len() - above),
        });
    }
    let lo = &s[below - w..below];
    let hi = &s[above..above + w];
    let side = |pts: &[(f64, f64)]| -> Result<([f64; 4], [f64; 3])> {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let scale = (xs[xs.len() - 1] - xs[0]).abs().max(1e-12);
        derivatives_with_errors(&xs, &ys, opts.degree, e_a, scale, |f: &PolyFit, x| {
            [f.eval(x), f.derivative(x, 1), f.derivative(x, 2), f.derivative(x, 3)]
        })
    };
    let (dp, ep) = side(hi)?;
    let (dm, em) = side(lo)?;
    let slope = 0.5 * (dp[1] + dm[1]);
    let denom = 2.0 * slope.powi(3);
    let delta_v = -(dp[3] - dm[3]) / denom;
    let err = (ep[2].hypot(em[2]) / denom.abs()).hypot(3.0 * delta_v.abs() * ep[0].hypot(em[0]) / slope.abs());
    Ok(ConsistencyCheck { e_a, delta_v, err })
}

/// Sums jumps inward from a zero tail.
pub fn backward_sweep(jumps: &[JumpRecord]) -> Result<PiecewiseConstantPotential> {
    let mut js: Vec<&JumpRecord> = jumps.iter().collect();
    js.sort_by(|a, b| a.a.total_cmp(&b.a));
    let mut values = vec![0.0; js.len()];
    let mut right = 0.0;
    for (i, j) in js.iter().enumerate().rev() {
        right -= j.delta_v;
        values[i] = right;
    }
    PiecewiseConstantPotential::new(js.iter().map(|j| j.a).collect(), values)
}

fn check_support(line_end: f64, jumps: &[JumpRecord], margin: f64) -> Result<()> {
    if let Some(last) = jumps.iter().map(|j| j.a).reduce(f64::max) {
        if line_end - last < margin {
            return Err(Error::SupportNotCovered {
                line_end,
                last_jump: last,
            });
        }
    }
    Ok(())
}

fn relative_residual(data: &[(f64, f64)], rebuilt: &[(f64, f64)]) -> f64 {
    data.iter()
        .zip(rebuilt)
        .map(|(d, b)| (d.0 - b.0).abs() / d.0.abs().max(1.0))
        .fold(0.0, f64::max)
}

fn every_nth(samples: &[(f64, f64)], step: usize) -> Vec<(f64, f64)> {
    samples.iter().step_by(step.max(1)).copied().collect()
}

/// Rebuilds a step potential from one fixed-`lambda` line sampled densely in `r`.
pub fn reconstruct(line: &ZeroLine, opts: &JumpOptions) -> Result<ReconstructionReport> {
    let inv = invert_line(line)?;
    let jumps = detect_jumps(&inv, opts)?;
    let (_, end) = inv.domain();
    check_support(end, &jumps, opts.derivatives.window as f64 * mean_spacing(inv.radii()))?;
    let potential = backward_sweep(&jumps)?;
    let check = every_nth(&line.samples, 8);
    let radii: Vec<f64> = check.iter().map(|s| s.1).collect();
    let rebuilt = trace_fixed_l_at_radii(&potential.clone().into(), line.n, line.ell0, &radii, 1e-12)?;
    let residual = relative_residual(&check, &rebuilt.samples);
    Ok(ReconstructionReport {
        potential,
        jumps,
        residual,
    })
}

/// Forward residual above which a mixed reconstruction is declared unresolvable.
pub const MIXED_RESIDUAL_LIMIT: f64 = 1e-4;

/// Rebuilds a step potential from a mixed line. Each part is scanned on its
/// own, so no window straddles the junction `r0`; a breakpoint hidden in that
/// blind zone shows up as a forward residual and is reported as unresolvable.
pub fn reconstruct_mixed(line: &MixedZeroLine, opts: &JumpOptions) -> Result<ReconstructionReport> {
    line.check_invariants(1e-8)?;
    let inv = invert_mixed(line)?;
    let w = opts.derivatives.window;
    let mut jumps = Vec::new();
    let mut spacing = f64::INFINITY;
    let mut end = line.r0;
    for part in [&inv.energy_part, &inv.lambda_part].into_iter().flatten() {
        if part.radii().len() >= 2 * w + 1 {
            jumps.extend(detect_jumps(part, opts)?);
            spacing = spacing.min(mean_spacing(part.radii()));
        }
        end = end.max(part.domain().1);
    }
    jumps.sort_by(|a, b| a.a.total_cmp(&b.a));
    let blind = if spacing.is_finite() { w as f64 * spacing } else { 0.0 };
    check_support(end, &jumps, blind)?;
    let potential = backward_sweep(&jumps)?;
    let rebuilt_p: Potential = potential.clone().into();

    let e_check: Vec<(f64, f64)> = every_nth(&line.segment_e, 8).into_iter().filter(|s| s.1 < line.r0).collect();
    let l_check: Vec<(f64, f64)> = every_nth(&line.segment_l, 16).into_iter().filter(|s| s.1 > line.r0).collect();
    let r0 = crate::radial::nth_zero(&rebuilt_p, line.ell0, line.e0, line.n, 1e-12)?;
    let mut residual = (r0 - line.r0).abs() / line.r0.max(1.0);
    if !e_check.is_empty() {
        let radii: Vec<f64> = e_check.iter().map(|s| s.1).collect();
        let got = trace_fixed_l_at_radii(&rebuilt_p, line.n, line.ell0, &radii, 1e-12)?;
        residual = residual.max(relative_residual(&e_check, &got.samples));
    }
    if !l_check.is_empty() {
        let radii: Vec<f64> = l_check.iter().map(|s| s.1).collect();
        let got = trace_lambda_at_radii(&rebuilt_p, line.n, line.ell0.lambda(), line.e0, &radii, 1e-12)?;
        residual = residual.max(relative_residual(&l_check, &got));
    }
    if residual > MIXED_RESIDUAL_LIMIT {
        return Err(Error::Unresolvable { r: line.r0, window: blind });
    }
    Ok(ReconstructionReport {
        potential,
        jumps,
        residual,
    })
}

/// Measures the `lambda`-line jump coefficient by brute force: a single step
/// of known height is placed beyond the junction, the line is traced densely
/// around it and `[lambda'''] / (lambda' [V])` is read off at the step.
pub fn measure_lambda_jump_coefficient() -> Result<f64> {
    let b = 2.0;
    let p: Potential = PiecewiseConstantPotential::new(vec![b], vec![-1.0])?.into();
    let e0 = 6.0;
    let radii: Vec<f64> = (0..=240).map(|i| 1.7 + i as f64 / 400.0).collect();
    let lam = trace_lambda_at_radii(&p, 1, 0.5, e0, &radii, 1e-12)?;
    let inv = InverseLine::new(ParamKind::Lambda, &lam)?;
    let opts = DerivativeOptions::default();
    let l = one_sided_derivatives(&inv, b, Side::Left, opts)?;
    let r = one_sided_derivatives(&inv, b, Side::Right, opts)?;
    let delta_v = 1.0;
    Ok((r.d3 - l.d3) / (0.5 * (l.d1 + r.d1) * delta_v))
}

/// Jump table `a,jump3,slope,deltaV,confidence`.
pub fn jumps_to_csv(jumps: &[JumpRecord], meta: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    s.push_str("a,jump3,slope,deltaV,confidence\n");
    for j in jumps {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_num(j.a),
            fmt_num(j.jump3),
            fmt_num(j.slope),
            fmt_num(j.delta_v),
            fmt_num(j.confidence)
        );
    }
    s
}

/// Radii `start, start + 1/density, ...` up to `end`.
pub fn uniform_radii(start: f64, end: f64, density: f64) -> Vec<f64> {
    let n = ((end - start) * density).floor() as usize;
    (0..=n).map(|i| start + i as f64 / density).collect()
}

/// Default sampling for reconstruction: s-wave, 400 samples per unit radius.
pub fn sample_line(potential: &Potential, n: usize, r_range: (f64, f64)) -> Result<ZeroLine> {
    trace_fixed_l_at_radii(potential, n, AngularParameter::s_wave(), &uniform_radii(r_range.0, r_range.1, 400.0), 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::ExponentialPotential;

    fn two_step() -> Potential {
        PiecewiseConstantPotential::two_step_example().into()
    }

    #[test]
    fn two_step_line_reconstructs() {
        let line = sample_line(&two_step(), 1, (0.3, 4.0)).unwrap();
        let rep = reconstruct(&line, &JumpOptions::default()).unwrap();
        assert_eq!(rep.jumps.len(), 2, "{:?}", rep.jumps);
        for (j, want) in rep.jumps.iter().zip([2.0, 3.0]) {
            assert!((j.a - want).abs() < 1e-3, "{}", j.a);
            assert!((j.delta_v - 1.0).abs() < 1e-3, "{}", j.delta_v);
        }
        assert!((rep.potential.value(1.0) + 2.0).abs() < 1e-3);
        assert!((rep.potential.value(2.5) + 1.0).abs() < 1e-3);
        assert_eq!(rep.potential.value(3.5), 0.0);
        assert!(rep.residual < 1e-5, "{}", rep.residual);
    }

    #[test]
    fn single_step_and_second_route() {
        let p: Potential = PiecewiseConstantPotential::new(vec![1.0], vec![-1.0]).unwrap().into();
        let line = sample_line(&p, 1, (0.3, 2.0)).unwrap();
        let jumps = detect_jumps(&invert_line(&line).unwrap(), &JumpOptions::default()).unwrap();
        assert_eq!(jumps.len(), 1);
        assert!((jumps[0].a - 1.0).abs() < 1e-3);
        assert!((jumps[0].delta_v - 1.0).abs() < 1e-3);
        let e_a = invert_line(&line).unwrap().eval(jumps[0].a).unwrap();
        let c = jump_consistency(&line, e_a, DerivativeOptions::default()).unwrap();
        assert!((c.delta_v - jumps[0].delta_v).abs() < 1e-3, "{c:?}");
    }

    #[test]
    fn no_jumps_without_steps() {
        let line = sample_line(&Potential::Zero, 1, (0.3, 3.0)).unwrap();
        let rep = reconstruct(&line, &JumpOptions::default()).unwrap();
        assert!(rep.jumps.is_empty());
        assert!(rep.potential.breakpoints().is_empty());
        let exp: Potential = ExponentialPotential::new(-0.5, 1.0).unwrap().into();
        let line = sample_line(&exp, 1, (0.3, 3.0)).unwrap();
        let jumps = detect_jumps(&invert_line(&line).unwrap(), &JumpOptions::default()).unwrap();
        assert!(jumps.is_empty(), "{jumps:?}");
    }

    #[test]
    fn lambda_coefficient_oracle() {
        let c = measure_lambda_jump_coefficient().unwrap();
        assert!((c - LAMBDA_JUMP_COEFFICIENT).abs() < 0.01 * 2.0, "{c}");
    }

    #[test]
    fn sweep_is_additive() {
        let mk = |a: f64, dv: f64| JumpRecord {
            a,
            jump3: 0.0,
            slope: -1.0,
            delta_v: dv,
            delta_v_err: 0.0,
            confidence: 10.0,
            kind: ParamKind::Energy,
            low_confidence: false,
            merged: false,
        };
        let js = [mk(1.0, 0.5), mk(2.0, -1.5), mk(3.0, 2.0)];
        let p = backward_sweep(&js).unwrap();
        for r in [0.5, 1.5, 2.5, 3.5] {
            let want: f64 = -js.iter().filter(|j| j.a > r).map(|j| j.delta_v).sum::<f64>();
            assert_eq!(p.value(r), want);
        }
    }
}
