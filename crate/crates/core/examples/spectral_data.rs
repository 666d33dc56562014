//! Dirichlet eigenvalues `E*` and normalization constants `rho = -dr/dE`
//! read off the first three lines of the two-step well.

use zeroline::potentials::{PiecewiseConstantPotential, Potential};
use zeroline::radial::AngularParameter;
use zeroline::suites::positive_energy_grid;
use zeroline::zero_lines::{spectral_data, trace_fixed_l};

fn main() -> zeroline::Result<()> {
    let p: Potential = PiecewiseConstantPotential::two_step_example().into();
    let grid = positive_energy_grid(200);
    let lines: Vec<_> = (1..=3)
        .map(|n| trace_fixed_l(&p, n, AngularParameter::s_wave(), &grid, 1e-11))
        .collect::<Result<_, _>>()?;
    for radius in [1.2, 1.5, 1.9] {
        println!("R = {radius}");
        for line in &lines {
            match spectral_data(line, radius) {
                Ok(d) => println!("  n={}: E* = {:10.5}, rho = {:.5}", line.n, d.e_star, d.rho),
                Err(e) => println!("  n={}: {e}", line.n),
            }
        }
    }
    Ok(())
}
