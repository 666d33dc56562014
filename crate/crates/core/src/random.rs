//! Seeded random step potentials for the randomized suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::potentials::PiecewiseConstantPotential;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of the random step potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSpec {
    pub min_steps: usize,
    pub max_steps: usize,
    pub breakpoint_range: (f64, f64),
    pub value_range: (f64, f64),
    /// Smallest distance between neighbouring breakpoints.
    pub min_separation: f64,
    /// Smallest jump height, including the jump to zero at the outer edge.
    pub min_jump: f64,
}

impl Default for StepSpec {
    fn default() -> Self {
        Self {
            min_steps: 1,
            max_steps: 3,
            breakpoint_range: (0.5, 4.0),
            value_range: (-5.0, 0.0),
            min_separation: 0.3,
            min_jump: 0.25,
        }
    }
}

/// Draws a step potential by rejection until the spacing constraints hold.
pub fn random_steps<R: Rng>(rng: &mut R, spec: &StepSpec) -> PiecewiseConstantPotential {
    let (b_lo, b_hi) = spec.breakpoint_range;
    let (v_lo, v_hi) = spec.value_range;
    loop {
        let j = rng.gen_range(spec.min_steps..=spec.max_steps);
        let mut bps: Vec<f64> = (0..j).map(|_| rng.gen_range(b_lo..b_hi)).collect();
        bps.sort_by(f64::total_cmp);
        if bps.windows(2).any(|w| w[1] - w[0] < spec.min_separation) {
            continue;
        }
        let values: Vec<f64> = (0..j).map(|_| rng.gen_range(v_lo..v_hi)).collect();
        let mut outer = values.clone();
        outer.push(0.0);
        if outer.windows(2).any(|w| (w[1] - w[0]).abs() < spec.min_jump) {
            continue;
        }
        if let Ok(p) = PiecewiseConstantPotential::new(bps, values) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_respect_spec_and_seed() {
        let spec = StepSpec::default();
        let a: Vec<_> = {
            let mut r = rng(7);
            (0..50).map(|_| random_steps(&mut r, &spec)).collect()
        };
        let mut r = rng(7);
        for p in &a {
            assert_eq!(*p, random_steps(&mut r, &spec));
            assert!((1..=3).contains(&p.breakpoints().len()));
            assert!(p.breakpoints().iter().all(|b| (0.5..4.0).contains(b)));
            assert!(p.values().iter().all(|v| (-5.0..0.0).contains(v)));
        }
    }
}
