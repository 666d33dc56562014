//! Born reconstruction of `-0.5 exp(-r)` from fixed-l data above `k0` and
//! fixed-energy data at `k0`, against the band-limited inversion that uses
//! only `q < 2 k0`.

use zeroline::born_inversion::{mixed_pipeline, PipelineOptions};
use zeroline::potentials::{ExponentialPotential, Potential};

fn main() -> zeroline::Result<()> {
    let p: Potential = ExponentialPotential::new(-0.5, 1.0)?.into();
    for k0 in [0.5, 1.0, 2.0, 5.0] {
        let rep = mixed_pipeline(&p, &PipelineOptions::new(k0, 30.0, 40))?;
        println!(
            "k0 = {k0:3.1}: L2 error {:.2e}, band-limited {:.2e}, seam {:.1e}",
            rep.l2_error, rep.band_limited_l2_error, rep.seam_mismatch
        );
    }
    Ok(())
}
