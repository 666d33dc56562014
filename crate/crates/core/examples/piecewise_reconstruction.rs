//! Random step potentials rebuilt from their first s-wave line.

use zeroline::piecewise_inversion::{reconstruct, sample_line, JumpOptions};
use zeroline::random::{random_steps, rng, StepSpec};
use zeroline::suites::ROUNDTRIP_RANGE;

fn main() -> zeroline::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut r = rng(seed);
    for _ in 0..5 {
        let truth = random_steps(&mut r, &StepSpec::default());
        let line = sample_line(&truth.clone().into(), 1, ROUNDTRIP_RANGE)?;
        let rep = reconstruct(&line, &JumpOptions::default())?;
        println!("truth   {:?} {:?}", truth.breakpoints(), truth.values());
        println!("rebuilt {:?} {:?}", rep.potential.breakpoints(), rep.potential.values());
        println!("forward residual {:.1e}\n", rep.residual);
    }
    Ok(())
}
