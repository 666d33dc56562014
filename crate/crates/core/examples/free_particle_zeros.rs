//! Zeros of the free regular solution against `n pi / sqrt(E)`, both backends.

use std::f64::consts::PI;

use zeroline::potentials::Potential;
use zeroline::radial::{nth_zero_with, AngularParameter, Backend, DEFAULT_CEILING};

fn main() -> zeroline::Result<()> {
    let s = AngularParameter::s_wave();
    println!("{:>8} {:>3} {:>22} {:>10} {:>10}", "E", "n", "r_n", "exact err", "numeric err");
    for e in [1.0, 4.0, PI * PI, 100.0] {
        for n in 1..=5 {
            let want = n as f64 * PI / e.sqrt();
            let exact = nth_zero_with(&Potential::Zero, s, e, n, 1e-12, Backend::Exact, DEFAULT_CEILING)?;
            let numeric = nth_zero_with(&Potential::Zero, s, e, n, 1e-10, Backend::Numeric, DEFAULT_CEILING)?;
            println!("{e:>8.4} {n:>3} {exact:>22.16} {:>10.1e} {:>10.1e}", (exact - want).abs(), (numeric - want).abs());
        }
    }
    Ok(())
}
