//! Multi-sequence generalised linear skew-feedback shift register synthesis.
//!
//! Given `s_i, g_i` and weights `gamma_0..gamma_ell`, find `lambda` of
//! minimal degree and `omega_i` with
//!
//! ```text
//! lambda s_i = omega_i  (mod g_i, right modulo)
//! deg omega_i + gamma_i < deg lambda + gamma_0
//! ```
//!
//! All solutions `(lambda, omega_1, .., omega_ell)` form a left module with
//! basis rows `(1, s_1, .., s_ell)` and `g_i e_i`. Weighting column `j` by
//! `x^gamma_j` on the right turns the degree constraint into "leading
//! position 0", so a weak Popov basis of the weighted module contains a
//! minimal solution. Two engines compute it: [`solve_ms`] runs
//! Mulders–Storjohann on the whole weighted basis, [`solve_dd`] tracks only
//! the first column and derives everything else on demand.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Fe, Field, FieldParams, OpCounts};
use crate::skewmat::{det_degree_triangular, mulders_storjohann, SkewMatrix, SkewVector, TransformLog};
use crate::skewpoly::{SkewPoly, SkewRing};

/// An MgLSSR instance with `s_i` already reduced modulo `g_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftRegisterProblem {
    params: Arc<FieldParams>,
    s: Vec<SkewPoly>,
    g: Vec<SkewPoly>,
    gamma: Vec<usize>,
}

impl ShiftRegisterProblem {
    /// Validates the instance and replaces each `s_i` by `s_i mod g_i`.
    pub fn new(params: Arc<FieldParams>, s: Vec<SkewPoly>, g: Vec<SkewPoly>, gamma: Vec<usize>) -> Result<Self> {
        let ell = s.len();
        if ell == 0 {
            return Err(Error::InvalidProblem("ell must be at least 1".into()));
        }
        if g.len() != ell {
            return Err(Error::InvalidProblem(format!("{} sequences but {} moduli", ell, g.len())));
        }
        if gamma.len() != ell + 1 {
            return Err(Error::InvalidProblem(format!(
                "expected {} weights, got {}",
                ell + 1,
                gamma.len()
            )));
        }
        if let Some(i) = g.iter().position(SkewPoly::is_zero) {
            return Err(Error::InvalidProblem(format!("g_{} is zero", i + 1)));
        }
        let ring = SkewRing::from_params(params.clone());
        for f in s.iter().chain(&g) {
            ring.check(f)?;
        }
        let s = s.iter().zip(&g).map(|(si, gi)| ring.right_mod(si, gi)).collect::<Result<Vec<_>>>()?;
        Ok(ShiftRegisterProblem { params, s, g, gamma })
    }

    pub fn params(&self) -> &Arc<FieldParams> {
        &self.params
    }

    pub fn ell(&self) -> usize {
        self.s.len()
    }

    pub fn s(&self) -> &[SkewPoly] {
        &self.s
    }

    pub fn g(&self) -> &[SkewPoly] {
        &self.g
    }

    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    /// `max_i (gamma_i + deg g_i)`.
    pub fn mu(&self) -> usize {
        self.g.iter().zip(&self.gamma[1..]).map(|(g, gm)| gm + g.degree().expect("non-zero")).max().expect("ell >= 1")
    }

    /// Bound on simple transformations when minimising the weighted basis:
    /// `(ell + 1)(mu - gamma_0 + 1)`.
    pub fn transform_bound(&self) -> u64 {
        let slack = (self.mu() + 1).saturating_sub(self.gamma[0]);
        ((self.ell() + 1) * slack) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    #[serde(rename = "MS")]
    Ms,
    #[serde(rename = "DD")]
    Dd,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Ms => "MS",
            Engine::Dd => "DD",
        })
    }
}

/// Counters gathered during one solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub ops: OpCounts,
    /// Simple transformations applied.
    pub transforms: u64,
    /// Demand-driven loop iterations (zero for MS).
    pub iterations: u64,
    /// Peak coefficients held by the demand-driven state (zero for MS).
    pub peak_live_coeffs: usize,
    /// Whether the `gamma_0 >= mu` shortcut answered without minimisation.
    pub shortcut: bool,
}

impl SolveStats {
    pub fn field_ops(&self) -> u64 {
        self.ops.total()
    }
}

/// A minimal solution with monic `lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrSolution {
    pub lambda: SkewPoly,
    pub omega: Vec<SkewPoly>,
    pub engine: Engine,
    pub stats: SolveStats,
}

impl SrSolution {
    pub fn deg_lambda(&self) -> usize {
        self.lambda.degree().expect("lambda is non-zero")
    }
}

/// Intermediate matrices of a Mulders–Storjohann solve.
#[derive(Clone, Debug)]
pub struct MsTrace {
    /// The weighted basis before minimisation.
    pub weighted_basis: SkewMatrix,
    /// Its weak Popov form.
    pub reduced: SkewMatrix,
    pub log: TransformLog,
}

/// Rows `(1, s_1, .., s_ell)` and `g_i e_i`.
pub fn build_basis(problem: &ShiftRegisterProblem) -> SkewMatrix {
    let n = problem.ell() + 1;
    let mut rows = Vec::with_capacity(n);
    let mut first = vec![SkewPoly::one()];
    first.extend(problem.s.iter().cloned());
    rows.push(SkewVector::new(first));
    for (i, g) in problem.g.iter().enumerate() {
        let mut row = SkewVector::zeros(n);
        row.entries_mut()[i + 1] = g.clone();
        rows.push(row);
    }
    SkewMatrix::new(rows).expect("rectangular by construction")
}

/// Multiplies column `j` on the right by `x^gamma_j`.
pub fn apply_weights(v: &SkewMatrix, gamma: &[usize]) -> Result<SkewMatrix> {
    if v.ncols() != gamma.len() {
        return Err(Error::Shape(format!("{} columns but {} weights", v.ncols(), gamma.len())));
    }
    let rows = v
        .rows()
        .iter()
        .map(|r| SkewVector::new(r.entries().iter().zip(gamma).map(|(e, &w)| e.shift_right(w)).collect()))
        .collect();
    SkewMatrix::new(rows)
}

/// Right-divides each entry by its column weight, failing if inexact.
fn unweight(row: &SkewVector, gamma: &[usize]) -> Result<Vec<SkewPoly>> {
    row.entries()
        .iter()
        .zip(gamma)
        .map(|(e, &w)| {
            e.right_div_x_pow(w).ok_or_else(|| Error::Internal(format!("entry not right-divisible by x^{w}")))
        })
        .collect()
}

/// Makes `lambda` monic and recomputes `omega_i = lambda s_i mod g_i`.
fn finish(ring: &SkewRing, problem: &ShiftRegisterProblem, lambda: SkewPoly) -> Result<(SkewPoly, Vec<SkewPoly>)> {
    let lead = lambda.lead().ok_or_else(|| Error::Internal("solution has lambda = 0".into()))?;
    let lambda = if lead == Fe::ONE { lambda } else { ring.scale(ring.field().inv(lead)?, &lambda) };
    let omega = problem
        .s
        .iter()
        .zip(&problem.g)
        .map(|(s, g)| ring.right_mod(&ring.mul(&lambda, s), g))
        .collect::<Result<Vec<_>>>()?;
    Ok((lambda, omega))
}

/// Reads the solution off a weak Popov form of the weighted basis: the row
/// with leading position 0, un-weighted and normalised.
pub fn extract_solution(
    ring: &SkewRing,
    reduced: &SkewMatrix,
    problem: &ShiftRegisterProblem,
) -> Result<(SkewPoly, Vec<SkewPoly>)> {
    let row = reduced
        .rows()
        .iter()
        .find(|r| r.leading_position().ok() == Some(0))
        .ok_or_else(|| Error::Internal("weak Popov permutation violated: no row with LP 0".into()))?;
    let lambda = unweight(row, &problem.gamma)?.swap_remove(0);
    finish(ring, problem, lambda)
}

fn shortcut_solution(problem: &ShiftRegisterProblem, engine: Engine) -> SrSolution {
    SrSolution {
        lambda: SkewPoly::one(),
        omega: problem.s.clone(),
        engine,
        stats: SolveStats { shortcut: true, ..SolveStats::default() },
    }
}

/// Solves with Mulders–Storjohann on the weighted basis.
pub fn solve_ms(problem: &ShiftRegisterProblem) -> Result<SrSolution> {
    Ok(solve_ms_traced(problem)?.0)
}

/// As [`solve_ms`], also returning the matrices (`None` on the `gamma_0 >= mu` shortcut).
pub fn solve_ms_traced(problem: &ShiftRegisterProblem) -> Result<(SrSolution, Option<MsTrace>)> {
    if problem.gamma[0] >= problem.mu() {
        return Ok((shortcut_solution(problem, Engine::Ms), None));
    }
    let ring = SkewRing::from_params(problem.params.clone());
    let weighted = apply_weights(&build_basis(problem), &problem.gamma)?;
    let (reduced, log) = mulders_storjohann(&ring, weighted.clone())?;
    let (lambda, omega) = extract_solution(&ring, &reduced, problem)?;
    let stats = SolveStats { ops: ring.ops(), transforms: log.count, ..SolveStats::default() };
    let solution = SrSolution { lambda, omega, engine: Engine::Ms, stats };
    Ok((solution, Some(MsTrace { weighted_basis: weighted, reduced, log })))
}

/// Degree of the determinant of the weighted basis:
/// `gamma_0 + sum_i (gamma_i + deg g_i)`.
pub fn weighted_basis_det_degree(problem: &ShiftRegisterProblem) -> Result<usize> {
    det_degree_triangular(&apply_weights(&build_basis(problem), &problem.gamma)?)
}

/// Solves with the demand-driven variant of Mulders–Storjohann.
///
/// Only the first column `(lambda_0, .., lambda_ell)` of the weighted working
/// matrix is stored. Row `j >= 1` keeps leading position `j`, with its
/// leading coefficient and degree cached; row 0 is the one being reduced,
/// and its entry in column `h` is recovered as the coefficient of
/// `(lambda s~_h mod g~_h)` where `lambda = lambda_0 x^-gamma_0`,
/// `s~_h = s_h x^gamma_h`, `g~_h = g_h x^gamma_h`. The pair `(eta, h)`
/// walks candidate (degree, leading position) pairs of row 0 in decreasing
/// value order until column 0 dominates.
pub fn solve_dd(problem: &ShiftRegisterProblem) -> Result<SrSolution> {
    if problem.gamma[0] >= problem.mu() {
        return Ok(shortcut_solution(problem, Engine::Dd));
    }
    let ring = SkewRing::from_params(problem.params.clone());
    let fld = ring.field();
    let ell = problem.ell();
    let gamma0 = problem.gamma[0];
    let s_w: Vec<SkewPoly> = problem.s.iter().zip(&problem.gamma[1..]).map(|(s, &w)| s.shift_right(w)).collect();
    let g_w: Vec<SkewPoly> = problem.g.iter().zip(&problem.gamma[1..]).map(|(g, &w)| g.shift_right(w)).collect();
    let input_coeffs: usize = s_w.iter().chain(&g_w).map(SkewPoly::len).sum();

    // (deg, LP) of the weighted first row (x^gamma_0, s~_1, .., s~_ell)
    let mut eta = gamma0 as i64;
    let mut h = 0usize;
    for (i, s) in s_w.iter().enumerate() {
        if let Some(d) = s.degree() {
            if d as i64 >= eta {
                eta = d as i64;
                h = i + 1;
            }
        }
    }
    let mut stats = SolveStats::default();
    if h == 0 {
        let (lambda, omega) = finish(&ring, problem, SkewPoly::one())?;
        stats.ops = ring.ops();
        stats.peak_live_coeffs = input_coeffs + 1;
        return Ok(SrSolution { lambda, omega, engine: Engine::Dd, stats });
    }

    let mut lambdas: Vec<Vec<Fe>> = vec![Vec::new(); ell + 1];
    lambdas[0] = SkewPoly::x_pow(gamma0).into_coeffs();
    let mut alphas: Vec<Fe> = vec![Fe::ZERO; ell + 1];
    let mut etas: Vec<i64> = vec![0; ell + 1];
    for (j, g) in g_w.iter().enumerate() {
        alphas[j + 1] = g.lead().expect("non-zero");
        etas[j + 1] = g.degree().expect("non-zero") as i64;
    }
    let live = |lambdas: &[Vec<Fe>]| lambdas.iter().map(Vec::len).sum::<usize>() + input_coeffs;
    stats.peak_live_coeffs = live(&lambdas);

    while (lambdas[0].len() as i64 - 1) <= eta {
        stats.iterations += 1;
        let dg = g_w[h - 1].degree().expect("non-zero") as i64;
        let mut alpha = Fe::ZERO;
        if eta < dg {
            let lam = unweighted_slice(&lambdas[0], gamma0)?;
            let (a, scratch) = ring.coeff_of_product_mod_slices(lam, s_w[h - 1].coeffs(), &g_w[h - 1], eta as usize)?;
            alpha = a;
            stats.peak_live_coeffs = stats.peak_live_coeffs.max(live(&lambdas) + scratch);
        }
        if !alpha.is_zero() {
            if eta < etas[h] {
                lambdas.swap(0, h);
                std::mem::swap(&mut alpha, &mut alphas[h]);
                std::mem::swap(&mut eta, &mut etas[h]);
            }
            let beta = (eta - etas[h]) as usize;
            let coef = fld.div(alpha, fld.frobenius(alphas[h], beta as i64))?;
            let (head, tail) = lambdas.split_at_mut(h);
            ring.sub_mul_monomial_into(&mut head[0], coef, beta, &tail[0]);
            stats.transforms += 1;
            stats.peak_live_coeffs = stats.peak_live_coeffs.max(live(&lambdas));
        }
        if h > 1 {
            h -= 1;
        } else {
            eta -= 1;
            h = ell;
        }
    }

    let lambda = SkewPoly::new(lambdas.swap_remove(0))
        .right_div_x_pow(gamma0)
        .ok_or_else(|| Error::Internal(format!("lambda_0 not right-divisible by x^{gamma0}")))?;
    let (lambda, omega) = finish(&ring, problem, lambda)?;
    stats.ops = ring.ops();
    Ok(SrSolution { lambda, omega, engine: Engine::Dd, stats })
}

fn unweighted_slice(weighted: &[Fe], gamma0: usize) -> Result<&[Fe]> {
    if weighted.len() < gamma0 || weighted[..gamma0].iter().any(|c| !c.is_zero()) {
        return Err(Error::Internal(format!("lambda_0 not right-divisible by x^{gamma0}")));
    }
    Ok(&weighted[gamma0..])
}

/// Checks the congruences and degree constraints for `(lambda, omega)`.
pub fn verify_solution(problem: &ShiftRegisterProblem, lambda: &SkewPoly, omega: &[SkewPoly]) -> bool {
    let Some(deg_lambda) = lambda.degree() else { return false };
    if omega.len() != problem.ell() {
        return false;
    }
    let ring = SkewRing::new(Field::new(problem.params.clone()));
    if ring.check(lambda).is_err() || omega.iter().any(|w| ring.check(w).is_err()) {
        return false;
    }
    let bound = deg_lambda + problem.gamma[0];
    for (i, w) in omega.iter().enumerate() {
        let (s, g) = (&problem.s[i], &problem.g[i]);
        let diff = ring.sub(&ring.mul(lambda, s), w);
        match ring.right_mod(&diff, g) {
            Ok(r) if r.is_zero() => {}
            _ => return false,
        }
        if let Some(dw) = w.degree() {
            if dw + problem.gamma[i + 1] >= bound {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skewmat::orthogonality_defect;

    fn f4() -> Arc<FieldParams> {
        Arc::new(FieldParams::new(2, 2, 1, vec![1, 1, 1]).unwrap())
    }

    fn x(k: usize) -> SkewPoly {
        SkewPoly::x_pow(k)
    }

    fn tiny() -> ShiftRegisterProblem {
        ShiftRegisterProblem::new(f4(), vec![x(1)], vec![x(2)], vec![0, 0]).unwrap()
    }

    #[test]
    fn problem_validation() {
        assert!(ShiftRegisterProblem::new(f4(), vec![], vec![], vec![0]).is_err());
        assert!(ShiftRegisterProblem::new(f4(), vec![x(1)], vec![SkewPoly::zero()], vec![0, 0]).is_err());
        assert!(ShiftRegisterProblem::new(f4(), vec![x(1)], vec![x(2)], vec![0]).is_err());
        let p = ShiftRegisterProblem::new(f4(), vec![x(5)], vec![x(2)], vec![1, 3]).unwrap();
        assert!(p.s()[0].is_zero());
        assert_eq!(p.mu(), 5);
    }

    #[test]
    fn basis_and_weights() {
        let p = tiny();
        let m = build_basis(&p);
        assert_eq!(m, SkewMatrix::from_polys(vec![vec![SkewPoly::one(), x(1)], vec![SkewPoly::zero(), x(2)]]).unwrap());
        assert_eq!(apply_weights(&m, &[0, 0]).unwrap(), m);
        let row = SkewMatrix::from_polys(vec![vec![SkewPoly::one(), x(1)]]).unwrap();
        let w = apply_weights(&row, &[2, 0]).unwrap();
        assert_eq!(w, SkewMatrix::from_polys(vec![vec![x(2), x(1)]]).unwrap());
        assert!(apply_weights(&row, &[1]).is_err());
    }

    #[test]
    fn tiny_instance_both_engines() {
        let p = tiny();
        for sol in [solve_ms(&p).unwrap(), solve_dd(&p).unwrap()] {
            assert_eq!(sol.lambda, x(1));
            assert_eq!(sol.omega, vec![SkewPoly::zero()]);
            assert!(verify_solution(&p, &sol.lambda, &sol.omega));
        }
    }

    #[test]
    fn zero_sequences_give_lambda_one() {
        let p = ShiftRegisterProblem::new(f4(), vec![SkewPoly::zero(); 2], vec![x(3), x(2)], vec![0, 1, 0]).unwrap();
        for sol in [solve_ms(&p).unwrap(), solve_dd(&p).unwrap()] {
            assert_eq!(sol.lambda, SkewPoly::one());
            assert!(sol.omega.iter().all(SkewPoly::is_zero));
        }
    }

    #[test]
    fn shortcut_when_gamma0_dominates() {
        let p = ShiftRegisterProblem::new(f4(), vec![x(1)], vec![x(2)], vec![2, 0]).unwrap();
        let (sol, trace) = solve_ms_traced(&p).unwrap();
        assert!(trace.is_none());
        assert!(sol.stats.shortcut);
        assert_eq!(sol.lambda, SkewPoly::one());
        assert_eq!(sol.omega, vec![x(1)]);
        assert!(solve_dd(&p).unwrap().stats.shortcut);
        assert!(verify_solution(&p, &sol.lambda, &sol.omega));
    }

    #[test]
    fn dd_returns_immediately_when_first_column_leads() {
        // deg s~_1 = 1 < gamma_0 = 2 < mu = 3
        let p = ShiftRegisterProblem::new(f4(), vec![x(1)], vec![x(3)], vec![2, 0]).unwrap();
        let sol = solve_dd(&p).unwrap();
        assert_eq!(sol.lambda, SkewPoly::one());
        assert_eq!(sol.stats.iterations, 0);
        assert_eq!(solve_ms(&p).unwrap().deg_lambda(), 0);
    }

    #[test]
    fn verify_rejects_bad_candidates() {
        let p = tiny();
        // lambda = 1 leaves omega = x with deg omega >= deg lambda
        assert!(!verify_solution(&p, &SkewPoly::one(), &[x(1)]));
        // tampered omega breaks the congruence
        assert!(!verify_solution(&p, &x(1), &[SkewPoly::one()]));
        assert!(!verify_solution(&p, &SkewPoly::zero(), &[SkewPoly::zero()]));
        assert!(!verify_solution(&p, &x(1), &[]));
        assert!(verify_solution(&p, &x(1), &[SkewPoly::zero()]));
    }

    #[test]
    fn ms_trace_laws() {
        let fp = Arc::new(FieldParams::with_default_modulus(2, 3, 1).unwrap());
        let ring = SkewRing::from_params(fp.clone());
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
        let s = vec![ring.random(&mut rng, 4), ring.random(&mut rng, 5)];
        let g = vec![ring.random(&mut rng, 6), x(6)];
        let p = ShiftRegisterProblem::new(fp, s, g, vec![1, 0, 2]).unwrap();
        let (sol, trace) = solve_ms_traced(&p).unwrap();
        let trace = trace.unwrap();
        let det = weighted_basis_det_degree(&p).unwrap();
        assert_eq!(det, 1 + 6 + 8);
        assert!(orthogonality_defect(&trace.weighted_basis, det).unwrap() <= (p.mu() - 1) as i64);
        assert_eq!(orthogonality_defect(&trace.reduced, det).unwrap(), 0);
        assert!(trace.reduced.is_weak_popov());
        assert!(trace.log.values_strictly_decrease());
        assert!(sol.stats.transforms <= p.transform_bound());
        let dd = solve_dd(&p).unwrap();
        assert_eq!(dd.deg_lambda(), sol.deg_lambda());
        assert!(verify_solution(&p, &dd.lambda, &dd.omega));
    }
}
