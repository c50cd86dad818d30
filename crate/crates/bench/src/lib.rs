//! Fixed-seed instances shared by the criterion benches.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skewreg::gen::{instance_with_mu, Shape};
use skewreg::{FieldParams, ShiftRegisterProblem, SkewPoly, SkewRing};

/// F_256 with `theta` the Frobenius.
pub fn f256() -> Arc<FieldParams> {
    Arc::new(FieldParams::with_default_modulus(2, 8, 1).expect("valid field"))
}

/// Instance of the given shape with zero weights and the given `mu`.
pub fn instance(shape: Shape, ell: usize, mu: usize, seed: u64) -> ShiftRegisterProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    instance_with_mu(f256(), ell, mu, shape, &mut rng).expect("valid instance")
}

/// `(lambda, s, g)` with `deg lambda, deg s < mu` and `g` monomial or dense of degree `mu`.
pub fn extraction_inputs(mu: usize, sparse: bool, seed: u64) -> (SkewRing, SkewPoly, SkewPoly, SkewPoly) {
    let ring = SkewRing::from_params(f256());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = ring.random(&mut rng, mu - 1);
    let s = ring.random(&mut rng, mu - 1);
    let g = if sparse { SkewPoly::x_pow(mu) } else { ring.random(&mut rng, mu) };
    (ring, lambda, s, g)
}
