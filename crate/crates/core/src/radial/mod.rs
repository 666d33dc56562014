//! Regular solutions of the radial equation
//! `psi'' = (V(r) + (lambda^2 - 1/4)/r^2 - E) psi`, their zeros and phase shifts.
//!
//! The numeric backend integrates the Prufer variables
//! `psi = rho sin(theta)`, `psi' = rho s cos(theta)` with `s = sqrt(|E|)`:
//! the phase is monotone through every zero (`theta = j pi` there) and the
//! amplitude is carried as `ln rho`, so nothing overflows below threshold.
//! For s-wave step potentials the closed-form backend in [`exact`] is used.

pub mod exact;
mod scattering;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::ode::{self, Control, OdeOptions, Step};
use crate::numerics::roots::brent;
use crate::potentials::{PiecewiseConstantPotential, Potential};

pub use exact::{ExactPiecewiseSolution, ExactSegment, SegmentBasis};
pub use scattering::{bound_states, phase_shift, phase_shift_with, phase_shifts_on_grid, PhaseShift};

/// Default outer limit for zero searches.
pub const DEFAULT_CEILING: f64 = 1.0e4;

/// `ln rho` beyond which `psi` itself is no longer representable.
const LOG_OVERFLOW: f64 = 690.0;

/// Scale used in the Prufer substitution.
pub fn prufer_scale(energy: f64) -> f64 {
    if energy.abs() > 1e-12 {
        energy.abs().sqrt()
    } else {
        1.0
    }
}

/// `lambda = ell + 1/2`, allowed to be any real number `>= 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularParameter {
    lambda: f64,
}

impl AngularParameter {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.5 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda must be >= 1/2, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn from_ell(ell: f64) -> Result<Self> {
        Self::new(ell + 0.5)
    }

    pub fn s_wave() -> Self {
        Self { lambda: 0.5 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ell(&self) -> f64 {
        self.lambda - 0.5
    }

    /// Coefficient of `1/r^2` in the effective potential.
    pub fn centrifugal(&self) -> f64 {
        self.lambda * self.lambda - 0.25
    }

    pub fn is_s_wave(&self) -> bool {
        self.lambda == 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Numeric,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Numeric => "numeric",
        })
    }
}

/// The closed-form backend applies to s-wave step (or zero) potentials.
pub fn exact_available(potential: &Potential, ang: AngularParameter) -> bool {
    ang.is_s_wave() && potential.to_piecewise().is_some()
}

pub fn exact_piecewise_regular(potential: &PiecewiseConstantPotential, energy: f64) -> ExactPiecewiseSolution {
    ExactPiecewiseSolution::new(potential, energy)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::InvalidInput(format!("tolerance {tol} outside [1e-12, 1e-4]")));
    }
    Ok(())
}

/// The Prufer form of the radial equation for one `(V, lambda, E)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PruferSystem<'a> {
    pub potential: &'a Potential,
    pub ang: AngularParameter,
    pub energy: f64,
    pub scale: f64,
    cent: f64,
}

impl<'a> PruferSystem<'a> {
    pub fn new(potential: &'a Potential, ang: AngularParameter, energy: f64) -> Self {
        Self {
            potential,
            ang,
            energy,
            scale: prufer_scale(energy),
            cent: ang.centrifugal(),
        }
    }

    pub fn rhs(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        self.rhs_with(self.potential.value(r), r, y)
    }

    /// Right-hand side for a piece ending at `end`: the last stage sits on
    /// the breakpoint and must see the value from the left.
    fn rhs_piece(&self, r: f64, end: f64, y: &[f64; 2]) -> [f64; 2] {
        let v = if r >= end { self.potential.left_value(end) } else { self.potential.value(r) };
        self.rhs_with(v, r, y)
    }

    fn rhs_with(&self, v: f64, r: f64, y: &[f64; 2]) -> [f64; 2] {
        let q = v + self.cent / (r * r);
        let w = (self.energy - q) / self.scale;
        let (sn, cs) = y[0].sin_cos();
        [self.scale * cs * cs + w * sn * sn, (self.scale - w) * sn * cs]
    }

    /// Series about the origin with the potential frozen at `V(0+)`:
    /// `psi = r^(l+1) S(r)`, `psi' = r^l T(r)`. Returns `(S, T)`.
    fn series(&self, r: f64) -> (f64, f64) {
        let ell = self.ang.ell();
        let d = self.potential.origin_value() - self.energy;
        let x = r * r;
        let (mut c, mut s, mut t) = (1.0, 1.0, ell + 1.0);
        for k in 1..200 {
            let kf = k as f64;
            c *= d * x / (2.0 * kf * (2.0 * kf + 2.0 * ell + 1.0));
            s += c;
            t += c * (2.0 * kf + ell + 1.0);
            if c.abs() < 1e-17 * s.abs() {
                break;
            }
        }
        (s, t)
    }

    /// Prufer state `[theta, ln rho]` from the origin series.
    pub fn series_state(&self, r: f64) -> [f64; 2] {
        let (s, t) = self.series(r);
        let a = r * s;
        let b = t / self.scale;
        [a.atan2(b), self.ang.ell() * r.ln() + a.hypot(b).ln()]
    }

    /// Where the integration leaves the series: the neglected variation of
    /// `V` and the normalization error both stay below `min(tol, 1e-8)`.
    pub fn start_radius(&self, tol: f64, r_cap: f64) -> f64 {
        let ell = self.ang.ell();
        let tol_s = tol.min(1e-8);
        let v0 = self.potential.origin_value();
        let d = (v0 - self.energy).abs();
        let mut r0 = if d > 0.0 { (tol_s * (4.0 * ell + 6.0) / d).sqrt() } else { 0.1 };
        r0 = r0.min(0.1).min(0.5 * r_cap);
        if let Some(&b) = self.potential.breakpoints().first() {
            r0 = r0.min(0.5 * b);
        }
        if !self.potential.locally_constant_at_origin() {
            for _ in 0..80 {
                let dv = (self.potential.value(r0) - v0).abs();
                if dv * r0 * r0 / (6.0 * ell + 12.0) <= 1e-2 * tol_s {
                    break;
                }
                r0 *= 0.5;
            }
        }
        r0.max(1e-300)
    }

    /// Integrates `[theta, ln rho]` from `r_from` to `r_to`, splitting at
    /// breakpoints of the potential. Returns the final radius, state and
    /// whether the observer stopped early.
    pub fn integrate<O>(&self, r_from: f64, y: [f64; 2], r_to: f64, opts: &OdeOptions, mut observe: O) -> Result<(f64, [f64; 2], bool)>
    where
        O: FnMut(&Step<2>) -> Control,
    {
        let mut knots: Vec<f64> = self
            .potential
            .breakpoints()
            .into_iter()
            .filter(|&b| b > r_from && b < r_to)
            .collect();
        knots.push(r_to);
        let mut r = r_from;
        let mut state = y;
        let mut h = opts.h_init;
        for &end in &knots {
            let o = OdeOptions { h_init: h, ..*opts };
            let out = ode::integrate(|t, y| self.rhs_piece(t, end, y), r, state, end, &o, |st, _| observe(st))?;
            state = out.y;
            r = out.t;
            if out.stopped {
                return Ok((r, state, true));
            }
            h = Some(out.h_next);
        }
        Ok((r, state, false))
    }

    fn ode_options(&self, tol: f64) -> OdeOptions {
        OdeOptions::new(tol)
    }

    /// Prufer state at `r`.
    pub fn state_at(&self, r: f64, tol: f64) -> Result<[f64; 2]> {
        if r <= 0.0 {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        let r0 = self.start_radius(tol, r);
        if r <= r0 {
            return Ok(self.series_state(r));
        }
        let (_, y, _) = self.integrate(r0, self.series_state(r0), r, &self.ode_options(tol), |_| Control::Continue)?;
        Ok(y)
    }

    /// True when no further zero can appear beyond `r`: convex region ahead
    /// and `psi psi' > 0`.
    fn no_more_zeros(&self, r: f64, theta: f64, far: f64) -> bool {
        if self.energy > 0.0 || r < far {
            return false;
        }
        let v = self.potential.value(r);
        let convex = if self.energy < 0.0 {
            v.abs() < 0.5 * self.energy.abs()
        } else {
            v == 0.0 && self.potential.to_piecewise().is_some()
        };
        let m = theta.rem_euclid(PI);
        convex && m > 0.0 && m < 0.5 * PI
    }

    pub fn nth_zero(&self, n: usize, tol: f64, ceiling: f64) -> Result<f64> {
        let target = n as f64 * PI;
        let r0 = self.start_radius(tol, ceiling);
        let far = self.potential.tail_radius(1e-10).max(r0);
        let mut hit: Option<Step<2>> = None;
        let mut hopeless = false;
        let opts = self.ode_options(tol).with_dense();
        self.integrate(r0, self.series_state(r0), ceiling, &opts, |st| {
            if st.y1[0] >= target {
                hit = Some(st.clone());
                return Control::Stop;
            }
            if self.no_more_zeros(st.t1(), st.y1[0], far) {
                hopeless = true;
                return Control::Stop;
            }
            Control::Continue
        })?;
        match hit {
            Some(st) => crossing_in_step(&st, target),
            None => Err(Error::ZeroBeyondRange {
                n,
                searched: if hopeless { f64::INFINITY } else { ceiling },
            }),
        }
    }
}

/// Radius inside an accepted step where the dense phase equals `target`.
fn crossing_in_step(st: &Step<2>, target: f64) -> Result<f64> {
    let (a, b) = (st.t0, st.t1());
    if st.y0[0] >= target {
        return Ok(a);
    }
    brent(|r| Ok(st.eval(r)[0] - target), a, b, 1e-15 * b.abs().max(1e-300), 200)
}

/// Regular solution sampled by the adaptive integrator, with continuous
/// evaluation between steps.
#[derive(Debug, Clone)]
pub struct RegularSolutionTrajectory {
    potential: Potential,
    ang: AngularParameter,
    energy: f64,
    scale: f64,
    r_start: f64,
    start_state: [f64; 2],
    steps: Vec<Step<2>>,
    r_end: f64,
    truncation: Option<f64>,
}

impl RegularSolutionTrajectory {
    fn system(&self) -> PruferSystem<'_> {
        PruferSystem::new(&self.potential, self.ang, self.energy)
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn angular(&self) -> AngularParameter {
        self.ang
    }

    /// Radius where the series hands over to the integrator.
    pub fn r_start(&self) -> f64 {
        self.r_start
    }

    /// Last radius covered; smaller than the requested `r_max` when truncated.
    pub fn r_end(&self) -> f64 {
        self.r_end
    }

    /// Radius where `psi` stopped being representable in `f64`, if reached.
    pub fn truncation_radius(&self) -> Option<f64> {
        self.truncation
    }

    pub fn r_grid(&self) -> Vec<f64> {
        std::iter::once(self.r_start).chain(self.steps.iter().map(|s| s.t1())).collect()
    }

    fn locate(&self, r: f64) -> Result<Option<&Step<2>>> {
        if !(r >= 0.0 && r <= self.r_end) {
            return Err(Error::Domain(format!("r = {r} outside [0, {}]", self.r_end)));
        }
        if r <= self.r_start {
            return Ok(None);
        }
        let i = self.steps.partition_point(|s| s.t1() < r).min(self.steps.len() - 1);
        Ok(Some(&self.steps[i]))
    }

    /// `[theta, ln rho]` at `r`.
    pub fn prufer_state(&self, r: f64) -> Result<[f64; 2]> {
        match self.locate(r)? {
            None if r == 0.0 => Ok([0.0, f64::NEG_INFINITY]),
            None => Ok(self.system().series_state(r)),
            Some(st) => Ok(st.eval(r)),
        }
    }

    /// `(ln rho, psi / rho, psi' / rho)`.
    pub fn psi_scaled(&self, r: f64) -> Result<(f64, f64, f64)> {
        let [th, lr] = self.prufer_state(r)?;
        Ok((lr, th.sin(), self.scale * th.cos()))
    }

    /// `(psi, psi')` with the origin normalization `psi ~ r^(l+1)`.
    pub fn psi(&self, r: f64) -> Result<(f64, f64)> {
        if r == 0.0 {
            let d = if self.ang.is_s_wave() { 1.0 } else { 0.0 };
            return Ok((0.0, d));
        }
        let (lr, p, dp) = self.psi_scaled(r)?;
        let f = lr.exp();
        Ok((f * p, f * dp))
    }

    /// Sup of the two Prufer-equation residuals of the continuous output at `r`.
    pub fn residual(&self, r: f64) -> Result<f64> {
        let st = self
            .locate(r)?
            .ok_or_else(|| Error::Domain(format!("r = {r} lies inside the series region")))?;
        let y = st.eval(r);
        let dy = st.eval_derivative(r);
        let f = self.system().rhs(r, &y);
        Ok((dy[0] - f[0]).abs().max((dy[1] - f[1]).abs()))
    }

    /// `|psi(r0) r0^-(l+1) - 1|` at the series start point.
    pub fn normalization_error(&self) -> f64 {
        let [th, lr] = self.start_state;
        let v = (lr - (self.ang.ell() + 1.0) * self.r_start.ln()).exp() * th.sin();
        (v - 1.0).abs()
    }

    /// Zeros on the covered range, from the phase crossings of `j pi`.
    pub fn zeros(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for st in &self.steps {
            let lo = (st.y0[0] / PI).floor() as i64 + 1;
            let hi = (st.y1[0] / PI).floor() as i64;
            for j in lo..=hi {
                out.push(crossing_in_step(st, j as f64 * PI)?);
            }
        }
        Ok(out)
    }
}

/// Integrates the regular solution out to `r_max` with dense output.
pub fn integrate_regular(
    potential: &Potential,
    ang: AngularParameter,
    energy: f64,
    r_max: f64,
    tol: f64,
) -> Result<RegularSolutionTrajectory> {
    check_tol(tol)?;
    if !(r_max > 0.0) {
        return Err(Error::InvalidInput(format!("r_max must be positive, got {r_max}")));
    }
    let sys = PruferSystem::new(potential, ang, energy);
    let r0 = sys.start_radius(tol, r_max);
    let y0 = sys.series_state(r0);
    let mut steps: Vec<Step<2>> = Vec::new();
    let mut truncation = None;
    // tighter internal tolerance: the continuous output's derivative error scales like tol / h
    let inner = (0.01 * tol).max(1e-13);
    let (r_end, _, _) = sys.integrate(r0, y0, r_max, &OdeOptions::new(inner).with_dense(), |st| {
        steps.push(st.clone());
        if st.y1[1] > LOG_OVERFLOW {
            truncation = Some(st.t1());
            return Control::Stop;
        }
        Control::Continue
    })?;
    Ok(RegularSolutionTrajectory {
        potential: potential.clone(),
        ang,
        energy,
        scale: sys.scale,
        r_start: r0,
        start_state: y0,
        steps,
        r_end,
        truncation,
    })
}

/// Ordered zeros on `(0, r_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<f64>,
    pub r_max: f64,
    pub backend: Backend,
    /// Set when some zero has a vanishing slope; a regular solution at real
    /// energy never has one, so this flags numerical trouble.
    pub degenerate: bool,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

pub fn find_zeros(potential: &Potential, ang: AngularParameter, energy: f64, r_max: f64, tol: f64) -> Result<ZeroSet> {
    let backend = if exact_available(potential, ang) { Backend::Exact } else { Backend::Numeric };
    find_zeros_with(potential, ang, energy, r_max, tol, backend)
}

pub fn find_zeros_with(
    potential: &Potential,
    ang: AngularParameter,
    energy: f64,
    r_max: f64,
    tol: f64,
    backend: Backend,
) -> Result<ZeroSet> {
    check_tol(tol)?;
    match backend {
        Backend::Exact => {
            let p = exact_source(potential, ang)?;
            let sol = ExactPiecewiseSolution::new(&p, energy);
            let zeros = sol.zeros_up_to(r_max);
            let degenerate = zeros.iter().any(|&z| sol.eval_scaled(z).2 == 0.0);
            Ok(ZeroSet {
                zeros,
                r_max,
                backend,
                degenerate,
            })
        }
        Backend::Numeric => {
            let traj = integrate_regular(potential, ang, energy, r_max, tol)?;
            if let Some(rt) = traj.truncation_radius() {
                // phases stay finite past the amplitude overflow; continue in phase only
                let sys = PruferSystem::new(potential, ang, energy);
                let mut zeros = traj.zeros()?;
                let y = traj.prufer_state(rt)?;
                let opts = OdeOptions::new(tol).with_dense();
                let mut extra = Vec::new();
                sys.integrate(rt, y, r_max, &opts, |st| {
                    let lo = (st.y0[0] / PI).floor() as i64 + 1;
                    let hi = (st.y1[0] / PI).floor() as i64;
                    for j in lo..=hi {
                        if let Ok(z) = crossing_in_step(st, j as f64 * PI) {
                            extra.push(z);
                        }
                    }
                    Control::Continue
                })?;
                zeros.extend(extra);
                return Ok(ZeroSet {
                    zeros,
                    r_max,
                    backend,
                    degenerate: false,
                });
            }
            let zeros = traj.zeros()?;
            let degenerate = zeros.windows(2).any(|w| w[1] <= w[0]);
            Ok(ZeroSet {
                zeros,
                r_max,
                backend,
                degenerate,
            })
        }
    }
}

fn exact_source(potential: &Potential, ang: AngularParameter) -> Result<PiecewiseConstantPotential> {
    if !ang.is_s_wave() {
        return Err(Error::Unsupported("the closed-form backend is s-wave only".into()));
    }
    potential
        .to_piecewise()
        .ok_or_else(|| Error::Unsupported(format!("no closed form for a {} potential", potential.type_name())))
}

/// `r_n(lambda, E)`, the `n`-th zero counted from the origin.
pub fn nth_zero(potential: &Potential, ang: AngularParameter, energy: f64, n: usize, tol: f64) -> Result<f64> {
    let backend = if exact_available(potential, ang) { Backend::Exact } else { Backend::Numeric };
    nth_zero_with(potential, ang, energy, n, tol, backend, DEFAULT_CEILING)
}

pub fn nth_zero_with(
    potential: &Potential,
    ang: AngularParameter,
    energy: f64,
    n: usize,
    tol: f64,
    backend: Backend,
    ceiling: f64,
) -> Result<f64> {
    check_tol(tol)?;
    if n == 0 {
        return Err(Error::InvalidInput("zero index starts at 1".into()));
    }
    match backend {
        Backend::Exact => {
            let p = exact_source(potential, ang)?;
            match ExactPiecewiseSolution::new(&p, energy).nth_zero(n) {
                Some(r) if r <= ceiling => Ok(r),
                Some(_) => Err(Error::ZeroBeyondRange { n, searched: ceiling }),
                None => Err(Error::ZeroBeyondRange {
                    n,
                    searched: f64::INFINITY,
                }),
            }
        }
        Backend::Numeric => PruferSystem::new(potential, ang, energy).nth_zero(n, tol, ceiling),
    }
}

/// Continuous Prufer phase `theta(r)`, zero at the origin and equal to
/// `j pi` at the `j`-th zero.
pub fn prufer_phase(potential: &Potential, ang: AngularParameter, energy: f64, r: f64, tol: f64) -> Result<f64> {
    let backend = if exact_available(potential, ang) { Backend::Exact } else { Backend::Numeric };
    prufer_phase_with(potential, ang, energy, r, tol, backend)
}

pub fn prufer_phase_with(
    potential: &Potential,
    ang: AngularParameter,
    energy: f64,
    r: f64,
    tol: f64,
    backend: Backend,
) -> Result<f64> {
    match backend {
        Backend::Exact => {
            let p = exact_source(potential, ang)?;
            Ok(ExactPiecewiseSolution::new(&p, energy).prufer_phase(r))
        }
        Backend::Numeric => Ok(PruferSystem::new(potential, ang, energy).state_at(r, tol)?[0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::BargmannOneBoundPotential;
    use crate::special::riccati_j;

    fn eq7() -> Potential {
        PiecewiseConstantPotential::two_step_example().into()
    }

    #[test]
    fn angular_parameter_validation() {
        assert!(AngularParameter::new(0.49).is_err());
        let a = AngularParameter::from_ell(2.0).unwrap();
        assert_eq!(a.centrifugal(), 6.0);
        assert!(AngularParameter::s_wave().is_s_wave());
    }

    #[test]
    fn free_s_wave_trajectory_is_sine() {
        let t = integrate_regular(&Potential::Zero, AngularParameter::s_wave(), 1.0, 10.0, 1e-12).unwrap();
        for &r in &[0.5, PI / 2.0, 3.0, 7.7] {
            let (psi, dpsi) = t.psi(r).unwrap();
            assert!((psi - r.sin()).abs() < 1e-10, "r={r}");
            assert!((dpsi - r.cos()).abs() < 1e-10);
        }
        assert!(t.normalization_error() < 1e-8);
        let z = t.zeros().unwrap();
        assert_eq!(z.len(), 3);
        for (j, r) in z.iter().enumerate() {
            assert!((r - (j + 1) as f64 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn free_p_wave_matches_riccati_bessel() {
        let ang = AngularParameter::from_ell(1.0).unwrap();
        let t = integrate_regular(&Potential::Zero, ang, 1.0, 12.0, 1e-12).unwrap();
        // psi ~ r^2 near 0 while x j_1(x) ~ x^2 / 3
        for &r in &[0.2, 1.0, PI, 9.5] {
            let (psi, _) = t.psi(r).unwrap();
            let oracle = 3.0 * riccati_j(1, r);
            assert!((psi - oracle).abs() < 1e-9 * oracle.abs().max(1.0), "r={r}: {psi} vs {oracle}");
        }
    }

    #[test]
    fn numeric_matches_exact_for_two_step_well() {
        let p = eq7();
        let sol = exact_piecewise_regular(p.as_piecewise().unwrap(), 1.0);
        let t = integrate_regular(&p, AngularParameter::s_wave(), 1.0, 5.0, 1e-12).unwrap();
        for i in 1..=50 {
            let r = 0.1 * i as f64;
            let (a, da) = sol.eval(r);
            let (b, db) = t.psi(r).unwrap();
            let scale = a.hypot(da);
            assert!((a - b).abs() < 1e-10 * scale, "r={r}: {a} vs {b}");
            assert!((da - db).abs() < 1e-10 * scale);
        }
        let e = nth_zero(&p, AngularParameter::s_wave(), 1.0, 1, 1e-12).unwrap();
        let n = nth_zero_with(&p, AngularParameter::s_wave(), 1.0, 1, 1e-12, Backend::Numeric, 100.0).unwrap();
        assert!((e - n).abs() < 1e-9);
    }

    #[test]
    fn residual_is_small() {
        let b: Potential = BargmannOneBoundPotential::from_gamma_squared(10.0, 5.0).unwrap().into();
        let tol = 1e-9;
        let t = integrate_regular(&b, AngularParameter::from_ell(1.5).unwrap(), 3.0, 8.0, tol).unwrap();
        for i in 0..100 {
            let r = 0.05 + 7.9 * (i as f64 + 0.37) / 100.0;
            let res = t.residual(r).unwrap();
            assert!(res <= 100.0 * tol, "r={r}: {res}");
        }
    }

    #[test]
    fn nth_zero_examples() {
        let s = AngularParameter::s_wave();
        assert!((nth_zero(&Potential::Zero, s, 4.0, 2, 1e-10).unwrap() - PI).abs() < 1e-14);
        let n = nth_zero_with(&Potential::Zero, s, 1.0, 1, 1e-10, Backend::Numeric, 100.0).unwrap();
        assert!((n - PI).abs() < 1e-8);
        // below threshold the zero never comes
        let err = nth_zero(&eq7(), s, -0.5, 3, 1e-10).unwrap_err();
        assert!(matches!(err, Error::ZeroBeyondRange { n: 3, .. }));
    }

    #[test]
    fn overflow_truncates_trajectory() {
        let t = integrate_regular(&Potential::Zero, AngularParameter::s_wave(), -100.0, 200.0, 1e-8).unwrap();
        let rt = t.truncation_radius().expect("truncated");
        assert!(rt > 60.0 && rt < 80.0, "{rt}");
        assert!(t.psi(rt).unwrap().0.is_finite());
    }

    #[test]
    fn numeric_zeros_on_bargmann_close_to_threshold() {
        let b: Potential = BargmannOneBoundPotential::from_gamma_squared(10.0, 5.0).unwrap().into();
        let s = AngularParameter::s_wave();
        let r1 = nth_zero(&b, s, -9.99, 1, 1e-10).unwrap();
        let r1b = nth_zero(&b, s, -9.99, 1, 1e-12).unwrap();
        assert!((r1 - r1b).abs() < 1e-7);
        let mut prev = 0.0;
        for e in [-9.0, -9.9, -9.99, -9.999] {
            let r = nth_zero(&b, s, e, 1, 1e-10).unwrap();
            assert!(r > prev, "E={e}: {r}");
            prev = r;
        }
        assert!(matches!(nth_zero(&b, s, -9.99, 2, 1e-10), Err(Error::ZeroBeyondRange { .. })));
    }
}
