//! Lines `r_n(E)`, `n = 1..4`, for a potential with one bound state at `E = -10`.
//!
//! The first line climbs to infinity as `E` approaches the bound state; the
//! others end as `E` approaches zero.

use zeroline::cli::tracing_energy_grid;
use zeroline::potentials::{BargmannOneBoundPotential, Potential};
use zeroline::radial::AngularParameter;
use zeroline::zero_lines::trace_fixed_l;

fn main() -> zeroline::Result<()> {
    let p: Potential = BargmannOneBoundPotential::from_gamma_squared(10.0, 5.0)?.into();
    let grid = tracing_energy_grid(-10.0, 40.0, 120)?;
    for n in 1..=4 {
        let line = trace_fixed_l(&p, n, AngularParameter::s_wave(), &grid, 1e-10)?;
        line.check_invariants()?;
        let (e_lo, r_hi) = *line.samples.last().expect("non-empty");
        print!("n={n}: {} samples, r({:.0}) = {:.4}, last r = {r_hi:.3} at E = {e_lo:.1e}", line.samples.len(), grid[0], line.samples[0].1);
        if let Some(t) = line.truncation {
            print!(", no zero at E = {:.1e}", t.param);
        }
        println!();
    }
    Ok(())
}
