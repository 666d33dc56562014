//! Phase shifts and bound states.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::roots::brent;
use crate::potentials::Potential;
use crate::special::riccati_pair;

use super::{check_tol, exact_available, exact_source, AngularParameter, Backend, ExactPiecewiseSolution, PruferSystem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShift {
    pub delta: f64,
    pub r_match: f64,
    pub backend: Backend,
}

/// `delta(l, k)` on the absolute branch (`delta -> 0` as `k -> infinity`).
pub fn phase_shift(potential: &Potential, ell: usize, k: f64, r_match: f64, tol: f64) -> Result<f64> {
    Ok(phase_shift_with(potential, ell, k, r_match, tol)?.delta)
}

/// Matches `(psi, psi')` at `r_match` to the free Riccati-Bessel pair.
///
/// The matching fixes `delta` modulo `pi`; the multiple of `pi` comes from the
/// Prufer phase difference to the free solution, which counts the zeros the
/// potential pulled in.
pub fn phase_shift_with(potential: &Potential, ell: usize, k: f64, r_match: f64, tol: f64) -> Result<PhaseShift> {
    check_tol(tol)?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("momentum must be positive, got {k}")));
    }
    let needed = potential.tail_radius(tol);
    if r_match < needed {
        return Err(Error::InvalidInput(format!(
            "matching radius {r_match} inside the potential tail; need r_match >= {needed}"
        )));
    }
    let ang = AngularParameter::from_ell(ell as f64)?;
    let energy = k * k;
    if exact_available(potential, ang) {
        let p = exact_source(potential, ang)?;
        let sol = ExactPiecewiseSolution::new(&p, energy);
        return Ok(PhaseShift {
            delta: sol.prufer_phase(r_match) - k * r_match,
            r_match,
            backend: Backend::Exact,
        });
    }
    let mut r = r_match;
    for _ in 0..4 {
        let th = PruferSystem::new(potential, ang, energy).state_at(r, tol)?[0];
        let th_free = if ell == 0 {
            k * r
        } else {
            PruferSystem::new(&Potential::Zero, ang, energy).state_at(r, tol)?[0]
        };
        let ((j, dj), (y, dy)) = riccati_pair(ell, k * r);
        let (sn, cs) = th.sin_cos();
        let num = dj * sn - j * cs;
        let den = dy * sn - y * cs;
        if num.is_finite() && den.is_finite() && num.hypot(den) > 1e-12 {
            let d0 = (num / den).atan();
            let reference = th - th_free;
            let delta = d0 + PI * ((reference - d0) / PI).round();
            return Ok(PhaseShift {
                delta,
                r_match: r,
                backend: Backend::Numeric,
            });
        }
        // degenerate matching point: move by a quarter wavelength
        r += 0.5 * PI / k;
    }
    Err(Error::Integration(format!("phase matching failed near r = {r_match}")))
}

/// Phase shifts on a momentum grid, made continuous by walking down from the
/// largest momentum and removing `pi` jumps between neighbours.
pub fn phase_shifts_on_grid(potential: &Potential, ell: usize, ks: &[f64], r_match: f64, tol: f64) -> Result<Vec<f64>> {
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by(|&a, &b| ks[b].total_cmp(&ks[a]));
    let mut out = vec![0.0; ks.len()];
    let mut prev: Option<f64> = None;
    for &i in &order {
        let mut d = phase_shift(potential, ell, ks[i], r_match, tol)?;
        if let Some(p) = prev {
            d += PI * ((p - d) / PI).round();
        }
        out[i] = d;
        prev = Some(d);
    }
    Ok(out)
}

/// `d ln w / dx` for the decaying free solution `w = x k_l(x)` (up to a constant).
fn decaying_log_derivative(ell: usize, x: f64) -> f64 {
    // w = exp(-x) sum_j a_j x^-j, a_j = (l+j)! / (j! (l-j)! 2^j)
    let (mut a, mut p, mut dp) = (1.0, 1.0, 0.0);
    for j in 1..=ell {
        let jf = j as f64;
        a *= (ell as f64 + jf) * (ell as f64 - jf + 1.0) / (2.0 * jf);
        p += a * x.powi(-(j as i32));
        dp -= jf * a * x.powi(-(j as i32) - 1);
    }
    -1.0 + dp / p
}

/// Bound-state energies inside `window = (E_lo, E_hi)`, both negative, ascending.
///
/// The Prufer phase at a far radius `R` (with `s = kappa`) crosses the
/// decaying-solution angle exactly at an eigenvalue; it is monotone in `E`,
/// so each eigenvalue is bracketed by the window itself and node counting
/// tells how many there are.
pub fn bound_states(potential: &Potential, ell: usize, window: (f64, f64), tol: f64) -> Result<Vec<f64>> {
    check_tol(tol)?;
    let (lo, hi) = window;
    if !(lo < hi && hi < 0.0) {
        return Err(Error::InvalidInput(format!("window must satisfy E_lo < E_hi < 0, got ({lo}, {hi})")));
    }
    let ang = AngularParameter::from_ell(ell as f64)?;
    let kappa_min = (-hi).sqrt();
    let r_far = (potential.tail_radius(1e-12) + 30.0 / kappa_min).min(super::DEFAULT_CEILING);
    let target = |energy: f64, n: usize| {
        let kappa = (-energy).sqrt();
        let l = decaying_log_derivative(ell, kappa * r_far);
        n as f64 * PI + 1.0f64.atan2(l)
    };
    let phase = |energy: f64| PruferSystem::new(potential, ang, energy).state_at(r_far, tol).map(|y| y[0]);
    let th_lo = phase(lo)?;
    let th_hi = phase(hi)?;
    let mut out = Vec::new();
    let n_lo = (th_lo / PI).floor().max(0.0) as usize;
    let n_hi = (th_hi / PI).floor() as usize;
    for n in n_lo..=n_hi {
        let f = |e: f64| -> Result<f64> { Ok(phase(e)? - target(e, n)) };
        let (f_lo, f_hi) = (f(lo)?, f(hi)?);
        if f_lo < 0.0 && f_hi > 0.0 {
            out.push(brent(f, lo, hi, tol * lo.abs().max(1.0), 300)?);
        }
    }
    Ok(out)
}
