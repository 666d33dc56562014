//! A mixed line: energy varies below the junction `r0`, the angular momentum
//! above it. The two-step well is rebuilt for two junction placements.

use zeroline::piecewise_inversion::{measure_lambda_jump_coefficient, reconstruct_mixed, uniform_radii, JumpOptions};
use zeroline::potentials::{PiecewiseConstantPotential, Potential};
use zeroline::radial::AngularParameter;
use zeroline::zero_lines::{energy_for_zero, trace_mixed_at_radii};

fn main() -> zeroline::Result<()> {
    println!("lambda-line jump coefficient: {:.5}", measure_lambda_jump_coefficient()?);
    let p: Potential = PiecewiseConstantPotential::two_step_example().into();
    let s = AngularParameter::s_wave();
    for r0 in [1.5, 2.5] {
        let e0 = energy_for_zero(&p, 1, s, r0, (-0.8, 30.0), 1e-12)?;
        let line = trace_mixed_at_radii(&p, 1, s, e0, &uniform_radii(0.3, 4.6, 400.0), 1e-12)?;
        let rep = reconstruct_mixed(&line, &JumpOptions::default())?;
        println!("r0 = {r0}, E0 = {e0:.6}");
        for j in &rep.jumps {
            println!("  {} jump at r = {:.5}: deltaV = {:.5}", j.kind.label(), j.a, j.delta_v);
        }
        println!("  rebuilt values {:?}, residual {:.1e}", rep.potential.values(), rep.residual);
    }
    Ok(())
}
