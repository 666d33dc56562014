//! Adaptive explicit Runge-Kutta integration with continuous output.
//!
//! The scheme is Verner's efficient 6(5) pair (9 stages, first-same-as-last)
//! with a 5th order continuous extension that costs one extra stage per step.
//! States are fixed-size arrays so the radial solvers (one Prüfer angle, or the
//! pair `(psi, psi')`) run without allocation.

use crate::error::{Error, Result};

const STAGES: usize = 9;
const DENSE_STAGES: usize = 10;

const C: [f64; STAGES] = [
    0.0,
    0.6e-1,
    9.593_333_333_333_333e-2,
    0.1439,
    0.4973,
    0.9725,
    0.9995,
    1.0,
    1.0,
];

const A: [[f64; STAGES]; STAGES] = [
    [0.0; STAGES],
    [0.6e-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.923_996_296_296_296_2e-2, 7.669_337_037_037_037e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.35975e-1, 0.0, 0.107925, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.318_683_415_233_148_4, 0.0, -5.042_058_063_628_562, 4.220_674_648_395_414, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-41.872_591_664_327_516, 0.0, 159.432_562_163_137_5, -122.119_213_565_010_03, 5.531_743_066_200_054, 0.0, 0.0, 0.0, 0.0],
    [-54.430_156_935_316_504, 0.0, 207.067_251_365_018_48, -158.610_813_784_59, 6.991_816_585_950_242, -1.859_723_106_220_323_4e-2, 0.0, 0.0, 0.0],
    [-54.663_741_787_281_98, 0.0, 207.952_806_255_389_36, -159.288_957_474_499_5, 7.018_743_740_796_944, -1.833_878_590_504_572_2e-2, -5.119_484_997_882_099e-4, 0.0, 0.0],
    [3.438_957_868_357_036e-2, 0.0, 0.0, 0.258_262_455_563_350_3, 0.420_937_118_967_353_7, 4.405_396_469_669_31, -176.483_119_024_298_65, 172.364_133_401_415_07, 0.0],
];

/// 6th order weights (propagated solution).
const B: [f64; STAGES] = A[8];

/// 5th order embedded weights.
const B_LOW: [f64; STAGES] = [
    4.909_967_648_382_49e-2,
    0.0,
    0.0,
    0.225_111_222_951_652_42,
    0.469_468_225_302_956_2,
    0.806_579_224_998_886_8,
    0.0,
    -0.607_119_489_177_796,
    5.686_113_944_047_569_6e-2,
];

const A_DENSE: [f64; DENSE_STAGES] = [
    1.652_415_901_357_280_6e-2,
    0.0,
    0.0,
    0.305_312_818_751_417_9,
    0.207_120_093_820_197_9,
    -1.293_879_140_655_123,
    57.119_884_115_881_49,
    -55.879_792_075_109_32,
    2.483_002_829_776_601_4e-2,
    0.0,
];
const C_DENSE: f64 = 0.5;

/// Continuous-extension weights: stage `i` contributes `s * sum_j B_DENSE[i][j] s^j`.
const B_DENSE: [[f64; 6]; DENSE_STAGES] = [
    [1.0, -5.308_169_607_103_577, 10.181_680_448_958_68, -7.520_036_991_611_715, 0.934_048_536_863_116_1, 0.746_867_191_577_065],
    [0.0; 6],
    [0.0; 6],
    [0.0, 6.272_050_253_212_501, -16.026_181_474_677_46, 12.844_356_324_519_618, -1.148_794_504_476_759_1, -1.683_168_143_014_549_8],
    [0.0, 6.876_491_702_846_304, -24.635_767_260_846_333, 33.210_786_483_797_17, -17.494_615_282_636_44, 2.464_041_475_806_649_6],
    [0.0, -35.544_451_710_599_6, 165.701_617_019_024_2, -385.463_539_549_114_3, 442.432_413_701_570_17, -182.720_642_991_211_2],
    [0.0, 1_918.654_856_698_011_4, -9_268.121_508_966_042, 20_858.337_028_772_55, -22_645.827_671_584_81, 8_960.474_176_055_992],
    [0.0, -1_883.069_802_132_718_2, 9_101.025_187_200_634, -20_473.188_551_959_534, 22_209.765_551_256_532, -8_782.168_250_963_5],
    [0.0, 0.119_024_796_351_236_43, -0.125_026_967_050_393_76, 1.779_956_919_394_999_1, -4.660_932_123_043_763, 2.886_977_374_347_921],
    [0.0, -8.0, 32.0, -40.0, 16.0, 0.0],
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `None` picks one from the local derivative scale.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Compute the extra stage needed for continuous output on every step.
    pub dense: bool,
}

impl OdeOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
            dense: false,
        }
    }

    pub fn with_dense(mut self) -> Self {
        self.dense = true;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

/// One accepted step together with the stage values needed for interpolation.
#[derive(Debug, Clone)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    k: [[f64; N]; DENSE_STAGES],
    has_dense: bool,
}

impl<const N: usize> Step<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    fn theta(&self, t: f64) -> f64 {
        ((t - self.t0) / self.h).clamp(0.0, 1.0)
    }

    /// Continuous solution inside the step. Falls back to cubic Hermite
    /// interpolation when the dense stage was not computed.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = self.theta(t);
        if !self.has_dense {
            return self.hermite(s);
        }
        let mut y = self.y0;
        for (i, ki) in self.k.iter().enumerate() {
            let row = &B_DENSE[i];
            let mut p = row[5];
            for j in (0..5).rev() {
                p = p * s + row[j];
            }
            let w = p * s * self.h;
            if w != 0.0 {
                for (yc, kc) in y.iter_mut().zip(ki) {
                    *yc += w * kc;
                }
            }
        }
        y
    }

    /// Time derivative of the continuous solution.
    pub fn eval_derivative(&self, t: f64) -> [f64; N] {
        let s = self.theta(t);
        let mut dy = [0.0; N];
        if !self.has_dense {
            let f0 = self.k[0];
            let f1 = self.k[8];
            for c in 0..N {
                let dy0 = self.h * f0[c];
                let dy1 = self.h * f1[c];
                let d = self.y1[c] - self.y0[c];
                let h00 = 6.0 * s * s - 6.0 * s;
                let h10 = 3.0 * s * s - 4.0 * s + 1.0;
                let h11 = 3.0 * s * s - 2.0 * s;
                dy[c] = (h00 * (-d) + h10 * dy0 + h11 * dy1) / self.h;
            }
            return dy;
        }
        for (i, ki) in self.k.iter().enumerate() {
            let row = &B_DENSE[i];
            let mut p = 6.0 * row[5];
            for j in (0..5).rev() {
                p = p * s + (j as f64 + 1.0) * row[j];
            }
            if p != 0.0 {
                for (dc, kc) in dy.iter_mut().zip(ki) {
                    *dc += p * kc;
                }
            }
        }
        dy
    }

    fn hermite(&self, s: f64) -> [f64; N] {
        let f0 = self.k[0];
        let f1 = self.k[8];
        let mut y = [0.0; N];
        let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
        let h10 = s * s * s - 2.0 * s * s + s;
        let h01 = -2.0 * s * s * s + 3.0 * s * s;
        let h11 = s * s * s - s * s;
        for c in 0..N {
            y[c] = h00 * self.y0[c] + h10 * self.h * f0[c] + h01 * self.y1[c] + h11 * self.h * f1[c];
        }
        y
    }
}

/// What the step observer wants the driver to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    /// The observer rewrote the state in place; the driver drops the
    /// first-same-as-last stage and re-evaluates it.
    Modified,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub stopped: bool,
    pub steps: usize,
    pub rejected: usize,
    /// Step size suggested for a continuation.
    pub h_next: f64,
}

fn error_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], err: &[f64; N], opts: &OdeOptions) -> f64 {
    let mut acc = 0.0;
    for c in 0..N {
        let sc = opts.atol + opts.rtol * y0[c].abs().max(y1[c].abs());
        acc += (err[c] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `observe` is called after every accepted step with the step record and a
/// mutable view of the new state.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Step<N>, &mut [f64; N]) -> Control,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(Outcome {
            t: t0,
            y: y0,
            stopped: false,
            steps: 0,
            rejected: 0,
            h_next: opts.h_init.unwrap_or(0.0),
        });
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(t, &y);

    let mut h = match opts.h_init {
        Some(h) => h.abs().min(span.abs()),
        None => {
            let mut d0 = 0.0;
            let mut d1 = 0.0;
            for c in 0..N {
                let sc = opts.atol + opts.rtol * y[c].abs();
                d0 += (y[c] / sc).powi(2);
                d1 += (k0[c] / sc).powi(2);
            }
            let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
            let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            guess.min(span.abs()).min(opts.h_max)
        }
    };
    h = h.min(opts.h_max).max(1e-14 * t.abs().max(1.0));

    let mut steps = 0;
    let mut rejected = 0;
    let mut k = [[0.0; N]; DENSE_STAGES];

    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        let mut last = false;
        if h >= remaining || remaining - h < 1e-12 * remaining.max(t.abs()) {
            h = remaining;
            last = true;
        }
        let hs = h * dir;

        k[0] = k0;
        for s in 1..STAGES {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for c in 0..N {
                        ys[c] += hs * a * kj[c];
                    }
                }
            }
            k[s] = f(t + C[s] * hs, &ys);
        }
        let mut y_new = y;
        let mut err = [0.0; N];
        for (i, ki) in k.iter().enumerate().take(STAGES) {
            let (b, bl) = (B[i], B_LOW[i]);
            for c in 0..N {
                y_new[c] += hs * b * ki[c];
                err[c] += hs * (b - bl) * ki[c];
            }
        }
        let en = error_norm(&y, &y_new, &err, opts);
        if !en.is_finite() {
            rejected += 1;
            h *= 0.25;
            if h < 1e-300 {
                return Err(Error::Integration(format!("non-finite state at t = {t}")));
            }
            continue;
        }
        if en > 1.0 {
            rejected += 1;
            h *= (0.9 * en.powf(-1.0 / 6.0)).clamp(0.1, 0.9);
            if h < 1e-15 * t.abs().max(1e-300) {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
            continue;
        }

        // accepted
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        let mut has_dense = false;
        if opts.dense {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(STAGES) {
                let a = A_DENSE[j];
                if a != 0.0 {
                    for c in 0..N {
                        ys[c] += hs * a * kj[c];
                    }
                }
            }
            k[STAGES] = f(t + C_DENSE * hs, &ys);
            has_dense = true;
        }
        let t_new = if last { t1 } else { t + hs };
        let step = Step {
            t0: t,
            h: t_new - t,
            y0: y,
            y1: y_new,
            k,
            has_dense,
        };
        let mut y_obs = y_new;
        let control = observe(&step, &mut y_obs);
        t = t_new;
        y = y_obs;
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-1.0 / 6.0)).clamp(0.2, 5.0) };
        let h_next = (h * fac).min(opts.h_max);
        match control {
            Control::Stop => {
                return Ok(Outcome {
                    t,
                    y,
                    stopped: true,
                    steps,
                    rejected,
                    h_next,
                })
            }
            Control::Modified => k0 = f(t, &y),
            Control::Continue => k0 = k[8],
        }
        if last {
            return Ok(Outcome {
                t,
                y,
                stopped: false,
                steps,
                rejected,
                h_next,
            });
        }
        h = h_next;
    }
    Ok(Outcome {
        t,
        y,
        stopped: false,
        steps,
        rejected,
        h_next: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_is_consistent() {
        for (s, row) in A.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            assert!((sum - C[s]).abs() < 1e-12, "row {s}: {sum} vs {}", C[s]);
        }
        assert!((B.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((B_LOW.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((A_DENSE.iter().sum::<f64>() - C_DENSE).abs() < 1e-12);
        // continuous extension reproduces the step weights at s = 1
        for i in 0..STAGES {
            let s1: f64 = B_DENSE[i].iter().sum();
            assert!((s1 - B[i]).abs() < 1e-10, "stage {i}");
        }
    }

    #[test]
    fn harmonic_oscillator_is_accurate() {
        let opts = OdeOptions::new(1e-12);
        let out = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 10.0, &opts, |_, _| Control::Continue)
            .unwrap();
        assert!((out.y[0] - 10f64.sin()).abs() < 1e-10);
        assert!((out.y[1] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn convergence_order_is_six() {
        // fixed steps through h_init = h_max with a loose tolerance so nothing is rejected
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut opts = OdeOptions::new(1.0);
            opts.h_init = Some(h);
            opts.h_max = h;
            let out = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, &opts, |_, _| Control::Continue).unwrap();
            (out.y[0] - 1f64.exp()).abs()
        };
        let (e1, e2) = (run(4), run(8));
        let order = (e1 / e2).log2();
        assert!(order > 5.5, "observed order {order}");
    }

    #[test]
    fn dense_output_tracks_solution() {
        let opts = OdeOptions::new(1e-12).with_dense();
        let mut worst: f64 = 0.0;
        let mut worst_d: f64 = 0.0;
        integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 6.0, &opts, |st, _| {
            for i in 1..10 {
                let t = st.t0 + st.h * i as f64 / 10.0;
                let y = st.eval(t);
                let dy = st.eval_derivative(t);
                worst = worst.max((y[0] - t.sin()).abs());
                worst_d = worst_d.max((dy[0] - t.cos()).abs());
            }
            Control::Continue
        })
        .unwrap();
        assert!(worst < 1e-10, "dense error {worst}");
        assert!(worst_d < 1e-8, "dense derivative error {worst_d}");
    }

    #[test]
    fn stop_and_backward_integration() {
        let opts = OdeOptions::new(1e-10);
        let out = integrate(|_, y: &[f64; 1]| [-y[0]], 2.0, [1.0], 0.0, &opts, |_, _| Control::Continue).unwrap();
        assert!((out.y[0] - 2f64.exp()).abs() < 1e-8);
        let out = integrate(|_, y: &[f64; 1]| [1.0 + 0.0 * y[0]], 0.0, [0.0], 10.0, &opts, |st, _| {
            if st.y1[0] > 1.0 {
                Control::Stop
            } else {
                Control::Continue
            }
        })
        .unwrap();
        assert!(out.stopped);
    }
}
