//! Seeded random MgLSSR instances.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Field, FieldParams};
use crate::mglssr::ShiftRegisterProblem;
use crate::skewpoly::{SkewPoly, SkewRing};

/// Shape of the moduli `g_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// Independent random moduli of random degree.
    Generic,
    /// `g_i = x^(k_i)`.
    Monomial,
    /// One shared modulus with every coefficient non-zero.
    Gao,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Generic => "generic",
            Shape::Monomial => "monomial",
            Shape::Gao => "gao",
        })
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(Shape::Generic),
            "monomial" => Ok(Shape::Monomial),
            "gao" => Ok(Shape::Gao),
            other => Err(Error::Parse(format!("unknown shape '{other}'"))),
        }
    }
}

fn dense_poly<R: Rng + ?Sized>(field: &Field, rng: &mut R, degree: usize) -> SkewPoly {
    SkewPoly::new((0..=degree).map(|_| field.random_nonzero(rng)).collect())
}

/// Random instance with `1 <= deg g_i <= max_deg_g`, `gamma_i <= max_gamma`
/// and `s_i` uniform of degree `< deg g_i`.
pub fn random_instance<R: Rng + ?Sized>(
    params: Arc<FieldParams>,
    ell: usize,
    max_deg_g: usize,
    max_gamma: usize,
    shape: Shape,
    rng: &mut R,
) -> Result<ShiftRegisterProblem> {
    if ell == 0 {
        return Err(Error::InvalidProblem("ell must be at least 1".into()));
    }
    if max_deg_g == 0 {
        return Err(Error::InvalidProblem("max_deg_g must be at least 1".into()));
    }
    let ring = SkewRing::from_params(params.clone());
    let field = ring.field();
    let g: Vec<SkewPoly> = match shape {
        Shape::Generic => (0..ell)
            .map(|_| {
                let d = rng.gen_range(1..=max_deg_g);
                let mut c: Vec<_> = (0..d).map(|_| field.random(rng)).collect();
                c.push(field.random_nonzero(rng));
                SkewPoly::new(c)
            })
            .collect(),
        Shape::Monomial => (0..ell).map(|_| SkewPoly::x_pow(rng.gen_range(1..=max_deg_g))).collect(),
        Shape::Gao => {
            let d = rng.gen_range(1..=max_deg_g);
            let g = dense_poly(field, rng, d);
            vec![g; ell]
        }
    };
    let s = g.iter().map(|gi| ring.random_below(rng, gi.degree().expect("non-zero"))).collect();
    let gamma = (0..=ell).map(|_| rng.gen_range(0..=max_gamma)).collect();
    ShiftRegisterProblem::new(params, s, g, gamma)
}

/// `g_i = x^mu`, zero weights, `s_i` uniform of degree `< mu`.
pub fn monomial_instance<R: Rng + ?Sized>(
    params: Arc<FieldParams>,
    ell: usize,
    mu: usize,
    rng: &mut R,
) -> Result<ShiftRegisterProblem> {
    if mu == 0 {
        return Err(Error::InvalidProblem("mu must be at least 1".into()));
    }
    let ring = SkewRing::from_params(params.clone());
    let s = (0..ell).map(|_| ring.random_below(rng, mu)).collect();
    ShiftRegisterProblem::new(params, s, vec![SkewPoly::x_pow(mu); ell], vec![0; ell + 1])
}

/// Shared dense `g` of degree `mu`, zero weights, `s_i` uniform of degree `< mu`.
pub fn gao_instance<R: Rng + ?Sized>(
    params: Arc<FieldParams>,
    ell: usize,
    mu: usize,
    rng: &mut R,
) -> Result<ShiftRegisterProblem> {
    if mu == 0 {
        return Err(Error::InvalidProblem("mu must be at least 1".into()));
    }
    let ring = SkewRing::from_params(params.clone());
    let g = dense_poly(ring.field(), rng, mu);
    let s = (0..ell).map(|_| ring.random_below(rng, mu)).collect();
    ShiftRegisterProblem::new(params, s, vec![g; ell], vec![0; ell + 1])
}

/// Instance of the requested shape with `mu` exactly the given value and zero weights.
pub fn instance_with_mu<R: Rng + ?Sized>(
    params: Arc<FieldParams>,
    ell: usize,
    mu: usize,
    shape: Shape,
    rng: &mut R,
) -> Result<ShiftRegisterProblem> {
    match shape {
        Shape::Monomial => monomial_instance(params, ell, mu, rng),
        Shape::Gao => gao_instance(params, ell, mu, rng),
        Shape::Generic => {
            if mu == 0 {
                return Err(Error::InvalidProblem("mu must be at least 1".into()));
            }
            let ring = SkewRing::from_params(params.clone());
            let field = ring.field();
            let g: Vec<SkewPoly> = (0..ell)
                .map(|i| {
                    let d = if i == 0 { mu } else { rng.gen_range(1..=mu) };
                    let mut c: Vec<_> = (0..d).map(|_| field.random(rng)).collect();
                    c.push(field.random_nonzero(rng));
                    SkewPoly::new(c)
                })
                .collect();
            let s = g.iter().map(|gi| ring.random_below(rng, gi.degree().expect("non-zero"))).collect();
            ShiftRegisterProblem::new(params, s, g, vec![0; ell + 1])
        }
    }
}
