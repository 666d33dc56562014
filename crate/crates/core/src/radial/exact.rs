//! Closed-form s-wave solution for step potentials.
//!
//! On each segment the regular solution is a combination of `sin/cos`
//! (`E > v`), `sinh/cosh` (`E < v`) or `{1, r - a}` (`E = v`), matched so
//! that `psi` and `psi'` are continuous. Values carry a separate log scale so
//! deep classically forbidden stretches never overflow.

use std::f64::consts::PI;

use crate::potentials::PiecewiseConstantPotential;

use super::prufer_scale;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentBasis {
    Oscillatory { kappa: f64 },
    Evanescent { kappa: f64 },
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSegment {
    pub start: f64,
    /// `f64::INFINITY` for the tail.
    pub end: f64,
    pub value: f64,
    pub basis: SegmentBasis,
    /// `psi(start) = exp(log_scale) * psi_a`, likewise for `psi'`.
    log_scale: f64,
    psi_a: f64,
    dpsi_a: f64,
    zeros_before: usize,
}

/// Regular s-wave solution of a step potential at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPiecewiseSolution {
    energy: f64,
    scale: f64,
    segments: Vec<ExactSegment>,
}

fn basis_for(energy: f64, v: f64) -> SegmentBasis {
    let d = energy - v;
    if d > 0.0 {
        SegmentBasis::Oscillatory { kappa: d.sqrt() }
    } else if d < 0.0 {
        SegmentBasis::Evanescent { kappa: (-d).sqrt() }
    } else {
        SegmentBasis::Linear
    }
}

/// `(log_scale, psi, psi')` a distance `x` into a segment started at `(psi_a, dpsi_a)`.
fn propagate(basis: SegmentBasis, psi_a: f64, dpsi_a: f64, x: f64) -> (f64, f64, f64) {
    match basis {
        SegmentBasis::Oscillatory { kappa } => {
            let (s, c) = (kappa * x).sin_cos();
            (0.0, psi_a * c + dpsi_a * s / kappa, -psi_a * kappa * s + dpsi_a * c)
        }
        SegmentBasis::Evanescent { kappa } => {
            let t = kappa * x;
            if t < 20.0 {
                let (sh, ch) = (t.sinh(), t.cosh());
                (0.0, psi_a * ch + dpsi_a * sh / kappa, psi_a * kappa * sh + dpsi_a * ch)
            } else {
                let e = (-2.0 * t).exp();
                let (ch, sh) = (0.5 * (1.0 + e), 0.5 * (1.0 - e));
                (t, psi_a * ch + dpsi_a * sh / kappa, psi_a * kappa * sh + dpsi_a * ch)
            }
        }
        SegmentBasis::Linear => (0.0, psi_a + dpsi_a * x, dpsi_a),
    }
}

/// Offsets `x` in `(0, len]` where the segment solution vanishes, up to `limit` of them.
fn segment_zeros(basis: SegmentBasis, psi_a: f64, dpsi_a: f64, len: f64, limit: usize) -> Vec<f64> {
    let mut out = Vec::new();
    match basis {
        SegmentBasis::Oscillatory { kappa } => {
            let phi = (psi_a * kappa).atan2(dpsi_a);
            let mut j = (phi / PI).floor() + 1.0;
            while out.len() < limit {
                let x = (j * PI - phi) / kappa;
                if x > len {
                    break;
                }
                if x > 0.0 {
                    out.push(x);
                }
                j += 1.0;
            }
        }
        SegmentBasis::Evanescent { kappa } => {
            if dpsi_a != 0.0 {
                let t = -psi_a * kappa / dpsi_a;
                if t > 0.0 && t < 1.0 {
                    let x = t.atanh() / kappa;
                    if x <= len && limit > 0 {
                        out.push(x);
                    }
                }
            }
        }
        SegmentBasis::Linear => {
            if dpsi_a != 0.0 {
                let x = -psi_a / dpsi_a;
                if x > 0.0 && x <= len && limit > 0 {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Number of zeros in `(0, x]`; the tail of an oscillatory segment is counted in closed form.
fn segment_zero_count(basis: SegmentBasis, psi_a: f64, dpsi_a: f64, x: f64) -> usize {
    match basis {
        SegmentBasis::Oscillatory { kappa } => {
            let phi = (psi_a * kappa).atan2(dpsi_a);
            let hi = ((kappa * x + phi) / PI).floor();
            let lo = (phi / PI).floor();
            (hi - lo).max(0.0) as usize
        }
        _ => segment_zeros(basis, psi_a, dpsi_a, x, 1).len(),
    }
}

impl ExactPiecewiseSolution {
    pub fn new(potential: &PiecewiseConstantPotential, energy: f64) -> Self {
        let mut segments = Vec::new();
        let (mut log_scale, mut psi, mut dpsi) = (0.0, 0.0, 1.0);
        let mut zeros = 0usize;
        for (start, end, value) in potential.segments() {
            let basis = basis_for(energy, value);
            segments.push(ExactSegment {
                start,
                end,
                value,
                basis,
                log_scale,
                psi_a: psi,
                dpsi_a: dpsi,
                zeros_before: zeros,
            });
            if end.is_finite() {
                let len = end - start;
                zeros += segment_zero_count(basis, psi, dpsi, len);
                let (ls, p, dp) = propagate(basis, psi, dpsi, len);
                // renormalize to keep the pair O(1)
                let norm = p.hypot(dp);
                log_scale += ls + norm.ln();
                psi = p / norm;
                dpsi = dp / norm;
            }
        }
        Self {
            energy,
            scale: prufer_scale(energy),
            segments,
        }
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn segments(&self) -> &[ExactSegment] {
        &self.segments
    }

    fn segment_at(&self, r: f64) -> &ExactSegment {
        let i = self.segments.partition_point(|s| s.start <= r).saturating_sub(1);
        &self.segments[i]
    }

    /// `(log_scale, psi, psi')` with `psi_true = exp(log_scale) * psi`.
    pub fn eval_scaled(&self, r: f64) -> (f64, f64, f64) {
        let seg = self.segment_at(r);
        let (ls, p, dp) = propagate(seg.basis, seg.psi_a, seg.dpsi_a, r - seg.start);
        (seg.log_scale + ls, p, dp)
    }

    /// `(psi, psi')`; may overflow to infinity deep inside forbidden regions.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let (ls, p, dp) = self.eval_scaled(r);
        let f = ls.exp();
        (f * p, f * dp)
    }

    /// Number of zeros of `psi` in `(0, r]`.
    pub fn zero_count(&self, r: f64) -> usize {
        let seg = self.segment_at(r);
        seg.zeros_before + segment_zero_count(seg.basis, seg.psi_a, seg.dpsi_a, r - seg.start)
    }

    /// Continuous Prufer phase: `psi = rho sin(theta)`, `psi' = rho s cos(theta)`,
    /// `theta(0) = 0`, zeros exactly at `theta = j pi`.
    pub fn prufer_phase(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let m = self.zero_count(r);
        let (_, p, dp) = self.eval_scaled(r);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut within = (sign * p).atan2(sign * dp / self.scale);
        // within lies in [0, pi] except for rounding right next to a zero
        if within < 0.0 {
            within = if within < -0.5 * PI { PI } else { 0.0 };
        }
        m as f64 * PI + within
    }

    /// All zeros in `(0, r_max]`.
    pub fn zeros_up_to(&self, r_max: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for seg in &self.segments {
            if seg.start >= r_max {
                break;
            }
            let len = seg.end.min(r_max) - seg.start;
            out.extend(
                segment_zeros(seg.basis, seg.psi_a, seg.dpsi_a, len, usize::MAX)
                    .into_iter()
                    .map(|x| seg.start + x),
            );
        }
        out
    }

    /// The `n`-th zero, or `None` when the solution has fewer than `n` zeros.
    pub fn nth_zero(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        for seg in &self.segments {
            let in_seg = if seg.end.is_finite() {
                segment_zero_count(seg.basis, seg.psi_a, seg.dpsi_a, seg.end - seg.start)
            } else {
                usize::MAX
            };
            if seg.zeros_before + in_seg.min(usize::MAX - seg.zeros_before) >= n {
                let k = n - seg.zeros_before;
                let len = if seg.end.is_finite() { seg.end - seg.start } else { f64::INFINITY };
                let zs = segment_zeros(seg.basis, seg.psi_a, seg.dpsi_a, len, k);
                return zs.get(k - 1).map(|x| seg.start + x);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle_zeros_are_exact() {
        let z = PiecewiseConstantPotential::zero();
        let sol = ExactPiecewiseSolution::new(&z, PI * PI);
        let zs = sol.zeros_up_to(5.0 + 1e-12);
        assert_eq!(zs.len(), 5);
        for (i, r) in zs.iter().enumerate() {
            assert!((r - (i + 1) as f64).abs() < 1e-14);
        }
        let sol = ExactPiecewiseSolution::new(&z, 4.0);
        assert!((sol.nth_zero(2).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn single_step_hand_matching() {
        let p = PiecewiseConstantPotential::new(vec![2.0], vec![-2.0]).unwrap();
        let sol = ExactPiecewiseSolution::new(&p, 2.0);
        let (psi, _) = sol.eval(0.7);
        assert!((psi - (1.4f64).sin() / 2.0).abs() < 1e-15);
        assert!((sol.nth_zero(1).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn continuity_across_breakpoints() {
        let p = PiecewiseConstantPotential::new(vec![1.0, 1.5, 3.0], vec![-4.0, 2.0, 0.5]).unwrap();
        for &e in &[-1.0, 0.5, 2.0, 9.0] {
            let sol = ExactPiecewiseSolution::new(&p, e);
            for &a in p.breakpoints() {
                let (l, dl) = sol.eval(a - 1e-12);
                let (r, dr) = sol.eval(a);
                assert!((l - r).abs() < 1e-9 * (1.0 + r.abs()));
                assert!((dl - dr).abs() < 1e-9 * (1.0 + dr.abs()));
            }
        }
    }

    #[test]
    fn linear_basis_at_segment_energy() {
        let p = PiecewiseConstantPotential::new(vec![1.0], vec![3.0]).unwrap();
        let sol = ExactPiecewiseSolution::new(&p, 3.0);
        let (psi, dpsi) = sol.eval(0.5);
        assert_eq!((psi, dpsi), (0.5, 1.0));
        // the neighbouring energies converge to the linear case
        let near = ExactPiecewiseSolution::new(&p, 3.0 + 1e-10);
        assert!((near.eval(2.0).0 - sol.eval(2.0).0).abs() < 1e-8);
    }

    #[test]
    fn phase_hits_multiples_of_pi_at_zeros() {
        let p = PiecewiseConstantPotential::two_step_example();
        let sol = ExactPiecewiseSolution::new(&p, 1.0);
        for (j, r) in sol.zeros_up_to(20.0).iter().enumerate() {
            let th = sol.prufer_phase(*r);
            assert!((th - (j + 1) as f64 * PI).abs() < 1e-9, "zero {j} at {r}: {th}");
        }
        let mut prev = 0.0;
        for i in 1..2000 {
            let th = sol.prufer_phase(i as f64 * 0.01);
            assert!(th >= prev - 1e-12);
            prev = th;
        }
    }

    #[test]
    fn deep_forbidden_region_does_not_overflow() {
        let p = PiecewiseConstantPotential::new(vec![1.0], vec![-1.0]).unwrap();
        let sol = ExactPiecewiseSolution::new(&p, -400.0);
        let (ls, psi, dpsi) = sol.eval_scaled(500.0);
        assert!(ls > 700.0 && psi.is_finite() && dpsi.is_finite());
        assert!(sol.zeros_up_to(500.0).is_empty());
    }
}
