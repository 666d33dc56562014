//! Randomized invariant suites behind `zeroline verify`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::piecewise_inversion::{jump_consistency, reconstruct, sample_line, uniform_radii, JumpOptions};
use crate::potentials::{ExponentialPotential, PiecewiseConstantPotential, Potential};
use crate::radial::AngularParameter;
use crate::random::{random_steps, rng, StepSpec};
use crate::zero_lines::{
    invert_line, lines_distinguish, spectral_data, trace_fixed_l, trace_fixed_l_at_radii, trace_mixed, DerivativeOptions, Distinction,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub suite: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One `key=value` line for scripts.
    pub fn line(&self) -> String {
        format!(
            "suite={} seed={} cases={} failures={} status={}",
            self.suite,
            self.seed,
            self.cases,
            self.failures.len(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn summarize(suite: &'static str, seed: u64, outcomes: Vec<std::result::Result<(), String>>) -> SuiteSummary {
    SuiteSummary {
        suite,
        seed,
        cases: outcomes.len(),
        failures: outcomes.into_iter().filter_map(|o| o.err()).collect(),
    }
}

/// Random step potentials (two of three draws) and exponentials.
pub fn random_potentials(seed: u64, count: usize) -> Vec<Potential> {
    let mut r = rng(seed);
    let spec = StepSpec::default();
    (0..count)
        .map(|i| {
            if i % 3 == 2 {
                let v0 = r.gen_range(-5.0..-0.25);
                let mu = r.gen_range(0.5..2.0);
                ExponentialPotential::new(v0, mu).expect("valid draw").into()
            } else {
                random_steps(&mut r, &spec).into()
            }
        })
        .collect()
}

/// Energies 40 down to 0.5, where every random potential has its first three zeros.
pub fn positive_energy_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| 40.0 - 39.5 * i as f64 / (points - 1) as f64).collect()
}

fn monotonicity_case(p: &Potential) -> std::result::Result<(), String> {
    let s = AngularParameter::s_wave();
    let grid = positive_energy_grid(30);
    for n in 1..=3 {
        let line = trace_fixed_l(p, n, s, &grid, 1e-10).map_err(|e| format!("n={n}: {e}"))?;
        line.check_invariants().map_err(|e| format!("n={n}: {e}"))?;
        let (lo, hi) = (line.samples[0].1, line.samples[line.samples.len() - 1].1);
        let d = spectral_data(&line, 0.5 * (lo + hi)).map_err(|e| format!("n={n}: {e}"))?;
        if !(d.rho > 0.0) {
            return Err(format!("n={n}: rho = {}", d.rho));
        }
        let mixed = trace_mixed(p, n, s, 5.0, 40.0, 4.0, 12, 1e-10).map_err(|e| format!("n={n} mixed: {e}"))?;
        mixed.check_invariants(1e-6).map_err(|e| format!("n={n} mixed: {e}"))?;
    }
    Ok(())
}

/// Sturm and `lambda` monotonicity plus `rho > 0` for lines `n = 1..3`.
pub fn monotonicity_suite(seed: u64, count: usize) -> SuiteSummary {
    let ps = random_potentials(seed, count);
    summarize("monotonicity", seed, ps.par_iter().map(monotonicity_case).collect())
}

/// Compares a reconstruction to the truth: same number of steps,
/// breakpoints within `b_tol`, values within `v_tol`.
pub fn compare_steps(truth: &PiecewiseConstantPotential, got: &PiecewiseConstantPotential, b_tol: f64, v_tol: f64) -> std::result::Result<(), String> {
    if truth.breakpoints().len() != got.breakpoints().len() {
        return Err(format!(
            "{} breakpoints expected, {} found ({:?} vs {:?})",
            truth.breakpoints().len(),
            got.breakpoints().len(),
            truth.breakpoints(),
            got.breakpoints()
        ));
    }
    for (a, b) in truth.breakpoints().iter().zip(got.breakpoints()) {
        if (a - b).abs() > b_tol {
            return Err(format!("breakpoint {a} recovered at {b}"));
        }
    }
    for (a, b) in truth.values().iter().zip(got.values()) {
        if (a - b).abs() > v_tol {
            return Err(format!("value {a} recovered as {b}"));
        }
    }
    Ok(())
}

/// Sampling range of the roundtrip: past the outermost allowed breakpoint.
pub const ROUNDTRIP_RANGE: (f64, f64) = (0.3, 4.6);

pub fn roundtrip_case(p: &PiecewiseConstantPotential) -> std::result::Result<(), String> {
    let line = sample_line(&p.clone().into(), 1, ROUNDTRIP_RANGE).map_err(|e| e.to_string())?;
    let rep = reconstruct(&line, &JumpOptions::default()).map_err(|e| e.to_string())?;
    compare_steps(p, &rep.potential, 5e-3, 2e-2)
}

/// Step potentials rebuilt from their first s-wave line.
pub fn roundtrip_suite(seed: u64, count: usize) -> SuiteSummary {
    let mut r = rng(seed);
    let ps: Vec<_> = (0..count).map(|_| random_steps(&mut r, &StepSpec::default())).collect();
    summarize("roundtrip", seed, ps.par_iter().map(roundtrip_case).collect())
}

/// Samples per unit radius for the route comparison; the `r(E)` fits need
/// about four times the reconstruction density to reach `1e-4`.
pub const EQUIVALENCE_DENSITY: f64 = 1600.0;

/// Both jump routes on one potential; returns `(deltaV, err)` of the direct
/// route and of the inverse-function route for every detected jump.
pub fn equivalence_case(p: &PiecewiseConstantPotential) -> Result<Vec<(f64, f64, f64, f64)>> {
    let radii = uniform_radii(ROUNDTRIP_RANGE.0, ROUNDTRIP_RANGE.1, EQUIVALENCE_DENSITY);
    let line = trace_fixed_l_at_radii(&p.clone().into(), 1, AngularParameter::s_wave(), &radii, 1e-12)?;
    let inv = invert_line(&line)?;
    let d = DerivativeOptions { window: 21, degree: 7 };
    let opts = JumpOptions {
        derivatives: d,
        coarse_stride: 8,
        ..JumpOptions::default()
    };
    let rep = reconstruct(&line, &opts)?;
    rep.jumps
        .iter()
        .map(|j| {
            let e_a = inv.eval(j.a)?;
            let c = jump_consistency(&line, e_a, d)?;
            Ok((j.delta_v, j.delta_v_err, c.delta_v, c.err))
        })
        .collect()
}

/// The two jump routes agree within their combined error bars and `1e-3`.
pub fn equivalence_suite(seed: u64, count: usize) -> SuiteSummary {
    let mut r = rng(seed);
    let spec = StepSpec {
        max_steps: 2,
        ..StepSpec::default()
    };
    let ps: Vec<_> = (0..count).map(|_| random_steps(&mut r, &spec)).collect();
    let outcomes = ps
        .par_iter()
        .map(|p| {
            let rows = equivalence_case(p).map_err(|e| e.to_string())?;
            if rows.len() != p.breakpoints().len() {
                return Err(format!("{} jumps found for {} breakpoints", rows.len(), p.breakpoints().len()));
            }
            for (d5, e5, d6, e6) in rows {
                let diff = (d5 - d6).abs();
                if diff > e5 + e6 || diff > 1e-3 {
                    return Err(format!("routes disagree: {d5} ± {e5} vs {d6} ± {e6}"));
                }
            }
            Ok(())
        })
        .collect();
    summarize("equivalence", seed, outcomes)
}

/// Distinct random step pairs are told apart by a line `n <= 3` on a 50-point grid.
pub fn distinguish_suite(seed: u64, count: usize) -> SuiteSummary {
    let mut r = rng(seed);
    let spec = StepSpec::default();
    let pairs: Vec<_> = (0..count)
        .map(|_| loop {
            let a = random_steps(&mut r, &spec);
            let b = random_steps(&mut r, &spec);
            if a != b {
                break (a, b);
            }
        })
        .collect();
    let grid = positive_energy_grid(50);
    let s = AngularParameter::s_wave();
    let outcomes = pairs
        .par_iter()
        .map(|(a, b)| {
            let (pa, pb): (Potential, Potential) = (a.clone().into(), b.clone().into());
            for n in 1..=3 {
                match lines_distinguish(&pa, &pb, n, s, &grid, 1e-8) {
                    Ok(Distinction::Separated { .. }) => return Ok(()),
                    Ok(Distinction::Indistinguishable) => {}
                    Err(e) => return Err(e.to_string()),
                }
            }
            Err(format!("lines n <= 3 coincide for {a:?} and {b:?}"))
        })
        .collect();
    summarize("distinguish", seed, outcomes)
}

pub const SUITES: [&str; 4] = ["monotonicity", "roundtrip", "equivalence", "distinguish"];

pub fn run_suite(name: &str, seed: u64, count: Option<usize>) -> Result<SuiteSummary> {
    Ok(match name {
        "monotonicity" => monotonicity_suite(seed, count.unwrap_or(100)),
        "roundtrip" => roundtrip_suite(seed, count.unwrap_or(50)),
        "equivalence" => equivalence_suite(seed, count.unwrap_or(20)),
        "distinguish" => distinguish_suite(seed, count.unwrap_or(100)),
        other => return Err(Error::InvalidInput(format!("unknown suite {other:?}; expected one of {SUITES:?}"))),
    })
}
