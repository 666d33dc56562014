//! The curve `-E'''/(2E')` along the first s-wave line of a two-step well,
//! read from each side. It jumps where the potential does.

use zeroline::piecewise_inversion::{jump_profile, reconstruct, sample_line, JumpOptions};
use zeroline::potentials::{PiecewiseConstantPotential, Potential};
use zeroline::zero_lines::invert_line;

fn main() -> zeroline::Result<()> {
    let p: Potential = PiecewiseConstantPotential::two_step_example().into();
    let line = sample_line(&p, 1, (0.3, 4.6))?;
    let opts = JumpOptions::default();
    let points: Vec<f64> = (0..=16).map(|i| 0.5 + 0.25 * i as f64).collect();
    for q in jump_profile(&invert_line(&line)?, &points, opts.derivatives)? {
        println!("r = {:4.2}  left {:>9.5}  right {:>9.5}  (+-{:.1e})", q.r, q.left, q.right, q.left_err.max(q.right_err));
    }
    let rep = reconstruct(&line, &opts)?;
    for j in &rep.jumps {
        println!("jump at r = {:.5}: deltaV = {:.5} +- {:.1e}", j.a, j.delta_v, j.delta_v_err);
    }
    println!("rebuilt values {:?}", rep.potential.values());
    Ok(())
}
