//! Exact and first-order Born phase shifts of a weak exponential well.

use zeroline::born_inversion::{born_phase_partial, exponential_born_swave};
use zeroline::potentials::{ExponentialPotential, Potential};
use zeroline::radial::phase_shift;

fn main() -> zeroline::Result<()> {
    let p: Potential = ExponentialPotential::new(-0.5, 1.0)?.into();
    let r_match = p.tail_radius(1e-12);
    println!("{:>5} {:>3} {:>12} {:>12} {:>12}", "k", "l", "exact", "born", "closed form");
    for k in [0.5, 1.0, 2.0, 5.0] {
        for ell in [0, 1, 4] {
            let exact = phase_shift(&p, ell, k, r_match, 1e-11)?;
            let born = born_phase_partial(&p, ell, k)?;
            let closed = if ell == 0 { format!("{:12.6e}", exponential_born_swave(-0.5, 1.0, k)) } else { String::new() };
            println!("{k:5.1} {ell:>3} {exact:12.6e} {born:12.6e} {closed:>12}");
        }
    }
    Ok(())
}
