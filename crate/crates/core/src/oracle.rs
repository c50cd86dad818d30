//! Exhaustive ground truth for small MgLSSR instances.
//!
//! Enumerates monic `lambda` degree by degree. The map
//! `lambda -> lambda s_i mod g_i` is additive and commutes with left scalars,
//! so the residues of `x^j s_i` are precomputed once and each candidate is
//! reached from the previous one by adding a single precomputed vector
//! (odometer over the base-p digits of the free coefficients). Residues are
//! computed here with a standalone shift-and-reduce loop rather than the
//! ring's division routine.

use crate::error::{Error, Result};
use crate::ffield::{Fe, Field};
use crate::mglssr::ShiftRegisterProblem;
use crate::skewpoly::SkewPoly;

/// Default cap on the number of enumerated candidates.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Result of the exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    /// Least degree of a solution, if one exists within the cap.
    pub min_degree: Option<usize>,
    /// The first monic solution of that degree found.
    pub witness: Option<SkewPoly>,
    /// Number of monic solutions of the minimal degree.
    pub solutions_at_min: u64,
    /// Total candidates examined.
    pub candidates: u64,
}

impl OracleOutcome {
    pub fn unique(&self) -> bool {
        self.solutions_at_min == 1
    }
}

/// `x * f` as coefficient vectors: `sum theta(f_t) x^(t+1)`.
fn times_x(field: &Field, f: &[Fe]) -> Vec<Fe> {
    let mut out = Vec::with_capacity(f.len() + 1);
    out.push(Fe::ZERO);
    out.extend(f.iter().map(|&c| field.frobenius(c, 1)));
    out
}

/// Right remainder by schoolbook elimination from the top degree.
fn reduce(field: &Field, mut f: Vec<Fe>, g: &[Fe]) -> Vec<Fe> {
    let dg = g.len() - 1;
    let lc = g[dg];
    while f.len() > dg {
        let top = f.len() - 1;
        let c = f[top];
        if !c.is_zero() {
            let shift = top - dg;
            // q x^shift g has leading coefficient q theta^shift(lc)
            let q = field.div(c, field.frobenius(lc, shift as i64)).expect("lc is non-zero");
            for (i, &gi) in g.iter().enumerate() {
                let t = field.mul(q, field.frobenius(gi, shift as i64));
                f[shift + i] = field.sub(f[shift + i], t);
            }
        }
        f.pop();
    }
    f.resize(dg, Fe::ZERO);
    f
}

/// Least `d <= degree_cap` admitting a monic solution of degree `d`, with a witness.
///
/// Enumerates exhaustively when all `sum_{d <= cap} |F|^d` candidates fit in
/// [`DEFAULT_BUDGET`], and falls back to [`oracle_min_degree_linear`] otherwise.
pub fn oracle_min_degree(problem: &ShiftRegisterProblem, degree_cap: usize) -> Result<OracleOutcome> {
    if enumeration_size(problem, degree_cap) <= DEFAULT_BUDGET as u128 {
        oracle_min_degree_with_budget(problem, degree_cap, DEFAULT_BUDGET)
    } else {
        oracle_min_degree_linear(problem, degree_cap)
    }
}

/// Number of monic candidates of degree at most `degree_cap` (saturating).
pub fn enumeration_size(problem: &ShiftRegisterProblem, degree_cap: usize) -> u128 {
    let q = problem.params().order() as u128;
    (0..=degree_cap as u32).fold(0u128, |acc, d| acc.saturating_add(q.checked_pow(d).unwrap_or(u128::MAX)))
}

/// Exhaustive enumeration, failing with [`Error::BudgetExceeded`] past `budget` candidates.
pub fn oracle_min_degree_with_budget(
    problem: &ShiftRegisterProblem,
    degree_cap: usize,
    budget: u64,
) -> Result<OracleOutcome> {
    let field = Field::new(problem.params().clone());
    let p = field.params().p();
    let m = field.params().m();
    let q = field.order() as u128;
    let gamma = problem.gamma();
    let gs: Vec<&[Fe]> = problem.g().iter().map(SkewPoly::coeffs).collect();

    // residues[j][i] = x^j s_i mod g_i, each of length deg g_i
    let mut residues: Vec<Vec<Vec<Fe>>> = Vec::with_capacity(degree_cap + 1);
    let mut cur: Vec<Vec<Fe>> =
        problem.s().iter().zip(&gs).map(|(s, g)| reduce(&field, s.coeffs().to_vec(), g)).collect();
    for _ in 0..=degree_cap {
        let next = cur.iter().zip(&gs).map(|(r, g)| reduce(&field, times_x(&field, r), g)).collect();
        residues.push(std::mem::replace(&mut cur, next));
    }

    let mut candidates = 0u64;
    for d in 0..=degree_cap {
        let count = q.pow(d as u32);
        if candidates as u128 + count > budget as u128 {
            return Err(Error::BudgetExceeded { needed: candidates as u128 + count, budget });
        }
        // coordinates constrained to vanish: degree >= d + gamma_0 - gamma_i in omega_i
        let mut coords: Vec<(usize, usize)> = Vec::new();
        for (i, g) in gs.iter().enumerate() {
            let lo = (d + gamma[0]).saturating_sub(gamma[i + 1]);
            coords.extend((lo..g.len() - 1).map(|k| (i, k)));
        }
        let project = |vecs: &[Vec<Fe>]| -> Vec<Fe> { coords.iter().map(|&(i, k)| vecs[i][k]).collect() };

        let mut acc = project(&residues[d]);
        let mut nonzero = acc.iter().filter(|c| !c.is_zero()).count();
        // one odometer digit per (free coefficient j, basis power t), stepping by z^t x^j
        let mut steps: Vec<Vec<Fe>> = Vec::with_capacity(d * m);
        let mut basis = Vec::with_capacity(m);
        let mut zt = Fe::ONE;
        for _ in 0..m {
            basis.push(zt);
            zt = field.mul(zt, field.z());
        }
        for res in residues.iter().take(d) {
            let base = project(res);
            for &b in &basis {
                steps.push(base.iter().map(|&c| field.mul(b, c)).collect());
            }
        }
        let mut digits = vec![0u32; d * m];
        let mut found = 0u64;
        let mut witness = None;
        loop {
            candidates += 1;
            if nonzero == 0 {
                found += 1;
                if witness.is_none() {
                    witness = Some(lambda_from_digits(&field, &digits, d));
                }
            }
            // advance the odometer
            let mut k = 0;
            loop {
                if k == digits.len() {
                    break;
                }
                for (a, &s) in acc.iter_mut().zip(&steps[k]) {
                    let before = a.is_zero();
                    *a = field.add(*a, s);
                    match (before, a.is_zero()) {
                        (true, false) => nonzero += 1,
                        (false, true) => nonzero -= 1,
                        _ => {}
                    }
                }
                digits[k] += 1;
                if digits[k] < p {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == digits.len() {
                break;
            }
        }
        if found > 0 {
            return Ok(OracleOutcome { min_degree: Some(d), witness, solutions_at_min: found, candidates });
        }
    }
    Ok(OracleOutcome { min_degree: None, witness: None, solutions_at_min: 0, candidates })
}

/// Same answer as [`oracle_min_degree`] by linear algebra instead of enumeration.
///
/// For monic `lambda` of degree `d` the vanishing coordinates form the affine
/// system `sum_{j<d} lambda_j r_j = -r_d` over the field, where `r_j` projects
/// the residues of `x^j s_i`. The system is solved by Gaussian elimination;
/// `solutions_at_min` is `|F|^(d - rank)` (saturating) and `candidates` is zero.
pub fn oracle_min_degree_linear(problem: &ShiftRegisterProblem, degree_cap: usize) -> Result<OracleOutcome> {
    let field = Field::new(problem.params().clone());
    let gamma = problem.gamma();
    let gs: Vec<&[Fe]> = problem.g().iter().map(SkewPoly::coeffs).collect();
    let mut residues: Vec<Vec<Vec<Fe>>> = Vec::with_capacity(degree_cap + 1);
    let mut cur: Vec<Vec<Fe>> =
        problem.s().iter().zip(&gs).map(|(s, g)| reduce(&field, s.coeffs().to_vec(), g)).collect();
    for _ in 0..=degree_cap {
        let next = cur.iter().zip(&gs).map(|(r, g)| reduce(&field, times_x(&field, r), g)).collect();
        residues.push(std::mem::replace(&mut cur, next));
    }
    for d in 0..=degree_cap {
        let mut coords: Vec<(usize, usize)> = Vec::new();
        for (i, g) in gs.iter().enumerate() {
            let lo = (d + gamma[0]).saturating_sub(gamma[i + 1]);
            coords.extend((lo..g.len() - 1).map(|k| (i, k)));
        }
        // one row per coordinate: [r_0 .. r_{d-1} | -r_d]
        let mut rows: Vec<Vec<Fe>> = coords
            .iter()
            .map(|&(i, k)| {
                let mut row: Vec<Fe> = (0..d).map(|j| residues[j][i][k]).collect();
                row.push(field.neg(residues[d][i][k]));
                row
            })
            .collect();
        if let Some((lambda, rank)) = solve_affine(&field, &mut rows, d) {
            let mut coeffs = lambda;
            coeffs.push(Fe::ONE);
            let count = field.order().checked_pow((d - rank) as u32).unwrap_or(u64::MAX);
            return Ok(OracleOutcome {
                min_degree: Some(d),
                witness: Some(SkewPoly::new(coeffs)),
                solutions_at_min: count,
                candidates: 0,
            });
        }
    }
    Ok(OracleOutcome { min_degree: None, witness: None, solutions_at_min: 0, candidates: 0 })
}

/// Row-reduces `[A | b]` with `n` unknowns; a particular solution (free
/// unknowns zero) and the rank of `A`, or `None` if inconsistent.
fn solve_affine(field: &Field, rows: &mut [Vec<Fe>], n: usize) -> Option<(Vec<Fe>, usize)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = field.inv(rows[r][col]).expect("pivot is non-zero");
        for x in &mut rows[r][col..=n] {
            *x = field.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col];
            let pivot_row = rows[r].clone();
            for (x, &y) in rows[i][col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                *x = field.sub(*x, field.mul(f, y));
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Fe::ZERO; n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][n];
    }
    Some((x, pivots.len()))
}

fn lambda_from_digits(field: &Field, digits: &[u32], d: usize) -> SkewPoly {
    let m = field.params().m();
    let mut coeffs: Vec<Fe> = digits.chunks(m.max(1)).take(d).map(|c| field.from_coeffs(c).expect("digits < p")).collect();
    coeffs.push(Fe::ONE);
    SkewPoly::new(coeffs)
}
