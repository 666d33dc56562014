//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero
//! exit if any fails. Runs without the test harness so the lines always print.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use zeroline::born_inversion::{mixed_pipeline, PipelineOptions};
use zeroline::cli::tracing_energy_grid;
use zeroline::piecewise_inversion::{
    detect_jumps, measure_lambda_jump_coefficient, reconstruct_mixed, sample_line, uniform_radii, JumpOptions,
    LAMBDA_JUMP_COEFFICIENT,
};
use zeroline::potentials::{BargmannOneBoundPotential, ExponentialPotential, PiecewiseConstantPotential, Potential};
use zeroline::radial::{bound_states, nth_zero, nth_zero_with, AngularParameter, Backend, DEFAULT_CEILING};
use zeroline::random::{random_steps, rng, StepSpec};
use zeroline::suites::{compare_steps, distinguish_suite, equivalence_suite, monotonicity_suite, positive_energy_grid, roundtrip_suite};
use zeroline::zero_lines::{energy_for_zero, invert_line, lines_distinguish, trace_fixed_l, trace_mixed_at_radii, Distinction, ParamKind};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seed() -> u64 {
    std::env::var("ZEROLINE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(7)
}

fn free_particle() -> Outcome {
    let s = AngularParameter::s_wave();
    let mut worst = (0.0f64, 0.0f64);
    for e in [1.0, 4.0, PI * PI, 100.0] {
        for n in 1..=5 {
            let want = n as f64 * PI / e.sqrt();
            let ex = nth_zero_with(&Potential::Zero, s, e, n, 1e-12, Backend::Exact, DEFAULT_CEILING).map_err(|e| e.to_string())?;
            let nu = nth_zero_with(&Potential::Zero, s, e, n, 1e-10, Backend::Numeric, DEFAULT_CEILING).map_err(|e| e.to_string())?;
            worst = (worst.0.max((ex - want).abs()), worst.1.max((nu - want).abs()));
        }
    }
    check(worst.0 <= 1e-10, || format!("exact backend off by {:.1e}", worst.0))?;
    check(worst.1 <= 1e-6, || format!("numeric backend off by {:.1e}", worst.1))?;
    let mut inverse = 0.0f64;
    for n in 1..=5 {
        let line = trace_fixed_l(&Potential::Zero, n, s, &positive_energy_grid(40), 1e-12).map_err(|e| e.to_string())?;
        let inv = invert_line(&line).map_err(|e| e.to_string())?;
        for &(e, r) in &line.samples {
            let want = (n as f64 * PI / r).powi(2);
            let got = inv.eval(r).map_err(|e| e.to_string())?;
            inverse = inverse.max((e - want).abs() / want).max((got - want).abs() / want);
        }
    }
    check(inverse <= 1e-9, || format!("E-inverse off by {inverse:.1e} relative"))?;
    Ok(format!("exact {:.1e}, numeric {:.1e}, inverse {:.1e}", worst.0, worst.1, inverse))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("zeroline-acceptance-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

/// Runs `fig2` through the command line and reads back what it wrote.
fn curve_and_rebuild() -> Outcome {
    let dir = scratch("fig2");
    let args = ["zeroline", "fig2", "--potential", "two-step", "--out", dir.to_str().unwrap()];
    let code = zeroline::cli::run(args.iter().map(|s| s.to_string()).collect());
    check(code == 0, || format!("fig2 exited with {code}"))?;
    let read = |f: &str| std::fs::read_to_string(dir.join(f)).map_err(|e| format!("{f}: {e}"));
    let rows = |text: &str| -> Vec<Vec<f64>> {
        text.lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with(|c: char| c.is_ascii_alphabetic()))
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect()
    };
    let jumps = rows(&read("jumps.csv")?);
    check(jumps.len() == 2, || format!("{} accepted jumps", jumps.len()))?;
    for (row, a) in jumps.iter().zip([2.0, 3.0]) {
        check((row[0] - a).abs() <= 5e-3, || format!("jump at {} instead of {a}", row[0]))?;
        check((row[3] - 1.0).abs() <= 0.02, || format!("deltaV {} at {a}", row[3]))?;
    }
    let curve = rows(&read("fig2.csv")?);
    let at_jump = |c: &Vec<f64>| jumps.iter().any(|j| c[0] == j[0]);
    let steps: Vec<&Vec<f64>> = curve.iter().filter(|c| at_jump(c)).collect();
    check(steps.len() == 2, || format!("curve has {} rows at the jumps", steps.len()))?;
    for c in steps {
        check((c[2] - c[1] - 1.0).abs() <= 0.02, || format!("curve step at r = {}: {}", c[0], c[2] - c[1]))?;
    }
    // one-sided fits within a window of a jump straddle it
    let reach = 15.0 / 400.0;
    let smooth = curve
        .iter()
        .filter(|c| jumps.iter().all(|j| (c[0] - j[0]).abs() > reach))
        .map(|c| (c[2] - c[1]).abs() / (c[3] + c[4]).max(1e-12))
        .fold(0.0, f64::max);
    check(smooth < 5.0, || format!("off-jump one-sided values differ by {smooth:.1} error bars"))?;
    let got: Potential = read("potential.txt")?.parse().map_err(|e: zeroline::Error| e.to_string())?;
    let got = got.to_piecewise().ok_or("not a step potential")?;
    compare_steps(&PiecewiseConstantPotential::two_step_example(), &got, 5e-3, 0.02)?;
    check(got.value(5.0) == 0.0, || "tail is not zero".into())?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("jumps at {:.5}, {:.5}; values {:?}", jumps[0][0], jumps[1][0], got.values()))
}

fn bound_state_lines() -> Outcome {
    let p: Potential = BargmannOneBoundPotential::from_gamma_squared(10.0, 5.0).map_err(|e| e.to_string())?.into();
    let s = AngularParameter::s_wave();
    let bound = bound_states(&p, 0, (-20.0, -0.5), 1e-10).map_err(|e| e.to_string())?;
    check(bound.len() == 1 && (bound[0] + 10.0).abs() < 1e-6, || format!("bound states {bound:?}"))?;
    let grid = tracing_energy_grid(-10.0, 40.0, 120).map_err(|e| e.to_string())?;
    let mut ends = Vec::new();
    for n in 1..=4 {
        let line = trace_fixed_l(&p, n, s, &grid, 1e-10).map_err(|e| format!("n={n}: {e}"))?;
        check(line.samples.windows(2).all(|w| w[0].0 > w[1].0 && w[0].1 < w[1].1), || format!("line {n} not strictly monotone"))?;
        if n >= 2 {
            let t = line.truncation.ok_or_else(|| format!("line {n} does not end"))?;
            check(t.param.abs() < 1e-3, || format!("line {n} ends at E = {}", t.param))?;
            let last = line.samples.last().unwrap().1;
            let r5 = nth_zero(&p, s, 5.0, n, 1e-10).map_err(|e| e.to_string())?;
            check(last > 3.0 * r5, || format!("line {n}: {last} not above 3 x {r5}"))?;
            ends.push(last / r5);
        }
    }
    let r1 = |e: f64| nth_zero(&p, s, e, 1, 1e-10).map_err(|e| e.to_string());
    let ratio = r1(-10.0 + 1e-3)? / r1(-9.0)?;
    check(ratio >= 2.0, || format!("r1 ratio {ratio}"))?;
    let seq: Vec<f64> = [-9.0, -9.9, -9.99, -9.999].iter().map(|&e| r1(e)).collect::<Result<_, _>>()?;
    check(seq.windows(2).all(|w| w[1] > w[0]), || format!("r1 not growing: {seq:?}"))?;
    Ok(format!("r1 ratio {ratio:.3}; n>=2 end growth {:?}", ends.iter().map(|x| format!("{x:.0}")).collect::<Vec<_>>()))
}

fn suite_outcome(s: zeroline::suites::SuiteSummary) -> Outcome {
    if s.passed() {
        Ok(s.line())
    } else {
        Err(format!("{}; first: {}", s.line(), s.failures[0]))
    }
}

fn route_equivalence() -> Outcome {
    suite_outcome(equivalence_suite(seed(), 20))
}

fn piecewise_roundtrip() -> Outcome {
    let summary = suite_outcome(roundtrip_suite(seed(), 50))?;
    let control: Potential = ExponentialPotential::new(-2.0, 1.0).map_err(|e| e.to_string())?.into();
    let line = sample_line(&control, 1, (0.3, 4.6)).map_err(|e| e.to_string())?;
    let jumps = detect_jumps(&invert_line(&line).map_err(|e| e.to_string())?, &JumpOptions::default()).map_err(|e| e.to_string())?;
    check(jumps.is_empty(), || format!("smooth control produced {} jumps", jumps.len()))?;
    Ok(format!("{summary}; smooth control 0 jumps"))
}

fn mixed_roundtrip() -> Outcome {
    let c = measure_lambda_jump_coefficient().map_err(|e| e.to_string())?;
    let rel = (c - LAMBDA_JUMP_COEFFICIENT).abs() / LAMBDA_JUMP_COEFFICIENT.abs();
    check(rel <= 0.01, || format!("lambda coefficient {c} off by {rel:.2e}"))?;
    let truth = PiecewiseConstantPotential::two_step_example();
    let p: Potential = truth.clone().into();
    let s = AngularParameter::s_wave();
    for (r0, kinds) in [(1.5, [ParamKind::Lambda, ParamKind::Lambda]), (2.5, [ParamKind::Energy, ParamKind::Lambda])] {
        let e0 = energy_for_zero(&p, 1, s, r0, (-0.8, 30.0), 1e-12).map_err(|e| e.to_string())?;
        let line = trace_mixed_at_radii(&p, 1, s, e0, &uniform_radii(0.3, 4.6, 400.0), 1e-12).map_err(|e| e.to_string())?;
        let rep = reconstruct_mixed(&line, &JumpOptions::default()).map_err(|e| format!("r0 = {r0}: {e}"))?;
        compare_steps(&truth, &rep.potential, 5e-3, 2e-2).map_err(|e| format!("r0 = {r0}: {e}"))?;
        let got: Vec<ParamKind> = rep.jumps.iter().map(|j| j.kind).collect();
        check(got == kinds, || format!("r0 = {r0}: jumps seen on {got:?}"))?;
    }
    Ok(format!("coefficient {c:.5}; r0 = 1.5 and 2.5 rebuilt"))
}

fn born_pipeline() -> Outcome {
    let (v0, mu) = (-0.5, 1.0);
    let analytic = |q: f64| 2.0 * v0 * mu * q / (q * q + mu * mu).powi(2);
    let p: Potential = ExponentialPotential::new(v0, mu).map_err(|e| e.to_string())?.into();
    let rep = mixed_pipeline(&p, &PipelineOptions::new(5.0, 30.0, 40)).map_err(|e| e.to_string())?;
    let rel = |q: &[f64], g: &[f64]| {
        q.iter()
            .zip(g)
            .filter(|(q, _)| **q > 0.0)
            .map(|(&q, &g)| (g - analytic(q)).abs() / analytic(q).abs())
            .fold(0.0, f64::max)
    };
    let (low, high) = (rel(&rep.low.q, &rep.low.g), rel(&rep.high.q, &rep.high.g));
    check(low <= 1e-3, || format!("g_low relative error {low:.2e}"))?;
    check(high <= 1e-3, || format!("g_high relative error {high:.2e}"))?;
    let gmax = rep.profile.max_abs();
    check(rep.seam_mismatch < 1e-3 * gmax, || format!("seam {:.2e} vs max|g| {gmax:.2e}", rep.seam_mismatch))?;
    check(rep.l2_error < 0.02, || format!("L2 error {:.2e}", rep.l2_error))?;
    let slow = mixed_pipeline(&p, &PipelineOptions::new(0.5, 30.0, 40)).map_err(|e| e.to_string())?;
    check(slow.band_limited_l2_error > slow.l2_error, || {
        format!("band-limited {:.2e} not above full {:.2e} at k0 = 0.5", slow.band_limited_l2_error, slow.l2_error)
    })?;
    Ok(format!(
        "g_low {low:.1e}, g_high {high:.1e}, seam {:.1e}, L2 {:.1e}; k0 = 0.5: band-limited {:.2e} > full {:.2e}",
        rep.seam_mismatch / gmax,
        rep.l2_error,
        slow.band_limited_l2_error,
        slow.l2_error
    ))
}

fn monotonicity() -> Outcome {
    suite_outcome(monotonicity_suite(seed(), 100))
}

fn distinguishability() -> Outcome {
    let summary = suite_outcome(distinguish_suite(seed(), 100))?;
    let a: Potential = random_steps(&mut rng(seed()), &StepSpec::default()).into();
    let same = lines_distinguish(&a, &a.clone(), 1, AngularParameter::s_wave(), &positive_energy_grid(50), 1e-8).map_err(|e| e.to_string())?;
    check(same == Distinction::Indistinguishable, || "identical potentials reported as separated".into())?;
    Ok(format!("{summary}; identical pair indistinguishable"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("free-particle exactness", free_particle),
        ("third-derivative curve and two-step rebuild", curve_and_rebuild),
        ("one-bound-state lines", bound_state_lines),
        ("jump-route equivalence", route_equivalence),
        ("piecewise roundtrip", piecewise_roundtrip),
        ("mixed-line roundtrip", mixed_roundtrip),
        ("Born pipeline", born_pipeline),
        ("monotonicity suite", monotonicity),
        ("distinguishability", distinguishability),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} {name}: PASS ({msg}) [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({msg}) [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
