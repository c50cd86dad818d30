//! Interleaved Gabidulin codes and their error decoder via a Gao-type key
//! equation solved as an MgLSSR instance.
//!
//! A skew polynomial `f` acts on the field as the linearised map
//! `a -> sum f_i theta^i(a)`, and products compose:
//! `(f g)(a) = f(g(a))`. A codeword row is the evaluation of a message
//! polynomial of degree `< k_i` at `n` points that are linearly independent
//! over the fixed field of theta.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ffield::{Fe, Field, FieldParams};
use crate::mglssr::{solve_dd, ShiftRegisterProblem, SolveStats};
use crate::skewpoly::{SkewPoly, SkewRing};

/// `sum f_i theta^i(a)`.
pub fn lin_eval(field: &Field, f: &SkewPoly, a: Fe) -> Fe {
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(Fe::ZERO, |acc, (i, &c)| field.add(acc, field.mul(c, field.frobenius(a, i as i64))))
}

/// Monic `G` of degree `n` vanishing on the span of `points`.
pub fn annihilator(ring: &SkewRing, points: &[Fe]) -> Result<SkewPoly> {
    let fld = ring.field();
    let mut g = SkewPoly::one();
    for &a in points {
        let e = lin_eval(fld, &g, a);
        if e.is_zero() {
            return Err(Error::PointsNotIndependent);
        }
        // (x - theta(e)/e) G kills a, and keeps killing the earlier points
        let c = fld.div(fld.frobenius(e, 1), e)?;
        let xg = ring.mul_monomial(Fe::ONE, 1, &g);
        g = ring.sub(&xg, &ring.scale(c, &g));
    }
    Ok(g)
}

/// Gauss–Jordan solve of `A y = b` over the field; `None` if `A` is singular.
fn solve_linear(field: &Field, mut a: Vec<Vec<Fe>>, mut b: Vec<Fe>) -> Option<Vec<Fe>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = field.inv(a[col][col]).ok()?;
        for x in &mut a[col][col..] {
            *x = field.mul(*x, inv);
        }
        b[col] = field.mul(b[col], inv);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col];
            let pivot_row = a[col].clone();
            for (x, &y) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x = field.sub(*x, field.mul(factor, y));
            }
            let t = field.mul(factor, b[col]);
            b[r] = field.sub(b[r], t);
        }
    }
    Some(b)
}

/// The unique `R` with `deg R < n` and `R(points_j) = values_j` (Moore system).
pub fn interpolate(field: &Field, points: &[Fe], values: &[Fe]) -> Result<SkewPoly> {
    if points.len() != values.len() {
        return Err(Error::Shape(format!("{} points but {} values", points.len(), values.len())));
    }
    let n = points.len();
    let moore: Vec<Vec<Fe>> =
        points.iter().map(|&a| (0..n).map(|i| field.frobenius(a, i as i64)).collect()).collect();
    let coeffs = solve_linear(field, moore, values.to_vec()).ok_or(Error::PointsNotIndependent)?;
    Ok(SkewPoly::new(coeffs))
}

/// Rank of the rows of `m` over the field (Gaussian elimination).
pub fn rank(field: &Field, mut m: Vec<Vec<Fe>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = field.inv(m[r][col]).expect("pivot is non-zero");
        for i in r + 1..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let f = field.mul(m[i][col], inv);
            let pivot_row = m[r].clone();
            for (x, &y) in m[i][col..].iter_mut().zip(&pivot_row[col..]) {
                *x = field.sub(*x, field.mul(f, y));
            }
        }
        r += 1;
    }
    r
}

/// Rank of an `ell x n` matrix over the fixed field of theta: the rank over
/// the field of the rows stacked with all their theta-conjugates.
pub fn fixed_field_rank(field: &Field, rows: &[Vec<Fe>]) -> usize {
    let ord = field.theta_order();
    let stacked = rows
        .iter()
        .flat_map(|row| (0..ord).map(move |k| row.iter().map(|&a| field.frobenius(a, k as i64)).collect()))
        .collect();
    rank(field, stacked)
}

/// An `ell`-interleaved Gabidulin code of length `n` with dimensions `k_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GabidulinCode {
    n: usize,
    ks: Vec<usize>,
    points: Vec<Fe>,
}

impl GabidulinCode {
    pub fn new(field: &Field, ks: Vec<usize>, points: Vec<Fe>) -> Result<Self> {
        let n = points.len();
        if ks.is_empty() {
            return Err(Error::InvalidCode("need at least one constituent code".into()));
        }
        if n > field.theta_order() {
            return Err(Error::InvalidCode(format!(
                "n = {n} exceeds the order of theta ({})",
                field.theta_order()
            )));
        }
        if let Some(&k) = ks.iter().find(|&&k| k == 0 || k >= n) {
            return Err(Error::InvalidCode(format!("k = {k} must satisfy 1 <= k < n = {n}")));
        }
        for &a in &points {
            field.check(a)?;
        }
        let moore: Vec<Vec<Fe>> =
            points.iter().map(|&a| (0..n).map(|i| field.frobenius(a, i as i64)).collect()).collect();
        if rank(field, moore) < n {
            return Err(Error::PointsNotIndependent);
        }
        Ok(GabidulinCode { n, ks, points })
    }

    /// Points `1, z, .., z^(n-1)`, independent over F_p (requires `gcd(m, s) = 1`
    /// for them to be independent over the fixed field).
    pub fn with_standard_points(field: &Field, n: usize, ks: Vec<usize>) -> Result<Self> {
        let mut points = Vec::with_capacity(n);
        let mut a = Fe::ONE;
        for _ in 0..n {
            points.push(a);
            a = field.mul(a, field.z());
        }
        GabidulinCode::new(field, ks, points)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ks(&self) -> &[usize] {
        &self.ks
    }

    pub fn ell(&self) -> usize {
        self.ks.len()
    }

    pub fn points(&self) -> &[Fe] {
        &self.points
    }

    /// `floor((n - max k) / 2)`.
    pub fn unique_radius(&self) -> usize {
        (self.n - self.ks.iter().max().expect("non-empty")) / 2
    }

    /// `floor(ell (n - k) / (ell + 1))` with `k = max k_i`.
    pub fn interleaved_radius(&self) -> usize {
        let k = *self.ks.iter().max().expect("non-empty");
        self.ell() * (self.n - k) / (self.ell() + 1)
    }

    /// Row `i` holds the evaluations of message polynomial `i` at the points.
    pub fn encode(&self, field: &Field, messages: &[Vec<Fe>]) -> Result<Vec<Vec<Fe>>> {
        if messages.len() != self.ell() {
            return Err(Error::Shape(format!("{} messages for {} codes", messages.len(), self.ell())));
        }
        messages
            .iter()
            .zip(&self.ks)
            .map(|(msg, &k)| {
                if msg.len() != k {
                    return Err(Error::Shape(format!("message of length {} for k = {k}", msg.len())));
                }
                let f = SkewPoly::new(msg.clone());
                Ok(self.points.iter().map(|&a| lin_eval(field, &f, a)).collect())
            })
            .collect()
    }

    /// Whether the points span the whole field over the fixed field, so that
    /// their annihilator is the central `x^n - 1`.
    pub fn is_full_length(&self, field: &Field) -> bool {
        self.n == field.theta_order()
    }

    /// Decodes a received word; see [`DecodeOutcome`].
    ///
    /// `G` is the annihilator of the points and `s_i` interpolates row `i`,
    /// so `s_i = f_i + E_i (mod G)`. Weights `gamma_0 = max k_j`,
    /// `gamma_i = gamma_0 - k_i` encode `deg omega_i < deg lambda + k_i`.
    ///
    /// Full length (`G = x^n - 1`, central): an error `E = A B` with `B` over
    /// the fixed field has `E_i = Q_i Gamma` for the annihilator `Gamma` of
    /// `{sum u_j a_j : B u = 0}`, so `Lambda` with `Gamma Lambda = G` gives
    /// `s_i Lambda = f_i Lambda (mod G)`, a locator shared by all rows. The
    /// degree-preserving anti-isomorphism `x -> y` onto `K[y; theta^-1]` puts
    /// this in the solver's left form, and `f_i` follows by exact right division.
    ///
    /// Otherwise `lambda` must vanish on the span of the error entries:
    /// `lambda s_i = lambda f_i (mod G)` and `f_i` follows by exact left
    /// division. This reaches the unique radius for `ell = 1`.
    pub fn decode(&self, field: &Field, received: &[Vec<Fe>]) -> Result<DecodeOutcome> {
        if received.len() != self.ell() || received.iter().any(|r| r.len() != self.n) {
            return Err(Error::Shape(format!("received word must be {} x {}", self.ell(), self.n)));
        }
        let ring = SkewRing::new(field.fork());
        let g = annihilator(&ring, &self.points)?;
        let s = received.iter().map(|row| interpolate(ring.field(), &self.points, row)).collect::<Result<Vec<_>>>()?;
        let gamma0 = *self.ks.iter().max().expect("non-empty");
        let mut gamma = vec![gamma0];
        gamma.extend(self.ks.iter().map(|k| gamma0 - k));
        let locator = self.is_full_length(field);
        let (lambda, omega, mut stats) = if locator {
            let fp = field.params();
            let inv_s = if fp.s() < fp.m() { fp.m() - fp.s() } else { fp.m() };
            let rev = Arc::new(FieldParams::new(fp.p(), fp.m(), inv_s, fp.modulus().to_vec())?);
            let to_rev = |f: &SkewPoly| conjugate_coeffs(ring.field(), f, -1);
            let problem = ShiftRegisterProblem::new(
                rev,
                s.iter().map(to_rev).collect(),
                vec![to_rev(&g); self.ell()],
                gamma,
            )?;
            let sol = solve_dd(&problem)?;
            let back = |f: &SkewPoly| conjugate_coeffs(ring.field(), f, 1);
            (back(&sol.lambda), sol.omega.iter().map(back).collect::<Vec<_>>(), sol.stats)
        } else {
            let problem = ShiftRegisterProblem::new(field.params().clone(), s, vec![g; self.ell()], gamma)?;
            let sol = solve_dd(&problem)?;
            (sol.lambda, sol.omega, sol.stats)
        };
        let mut messages = Vec::with_capacity(self.ell());
        for (omega, &k) in omega.iter().zip(&self.ks) {
            let (f, rem) =
                if locator { ring.right_divmod(omega, &lambda)? } else { ring.left_divmod(omega, &lambda)? };
            if !rem.is_zero() {
                return Err(Error::DecodingFailure("lambda does not divide omega".into()));
            }
            if f.degree().is_some_and(|d| d >= k) {
                return Err(Error::DecodingFailure(format!("recovered message degree exceeds k = {k}")));
            }
            let mut msg = f.into_coeffs();
            msg.resize(k, Fe::ZERO);
            messages.push(msg);
        }
        stats.ops = stats.ops + ring.ops();
        Ok(DecodeOutcome { messages, lambda, stats })
    }
}

/// Coefficient `i` mapped by `theta^(sign i)`. With `sign = -1` this is the
/// anti-isomorphism `K[x; theta] -> K[y; theta^-1]`, `c x^i -> y^i c`; with
/// `sign = 1` its inverse.
fn conjugate_coeffs(field: &Field, f: &SkewPoly, sign: i64) -> SkewPoly {
    SkewPoly::new(f.coeffs().iter().enumerate().map(|(i, &c)| field.frobenius(c, sign * i as i64)).collect())
}

/// Messages recovered by a successful decode, with the error locator (full
/// length) or error span polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub messages: Vec<Vec<Fe>>,
    pub lambda: SkewPoly,
    pub stats: SolveStats,
}

/// `E = A B`: `A` uniform `ell x t` over the field, `B` uniform `t x n` over
/// the fixed field, resampled until `E` has fixed-field rank exactly `t`.
pub fn random_rank_error<R: Rng + ?Sized>(field: &Field, n: usize, t: usize, ell: usize, rng: &mut R) -> Vec<Vec<Fe>> {
    assert!(t <= n, "rank {t} exceeds length {n}");
    if t == 0 {
        return vec![vec![Fe::ZERO; n]; ell];
    }
    let fixed = field.fixed_field();
    loop {
        let a: Vec<Vec<Fe>> = (0..ell).map(|_| (0..t).map(|_| field.random(rng)).collect()).collect();
        let b: Vec<Vec<Fe>> = (0..t).map(|_| (0..n).map(|_| fixed[rng.gen_range(0..fixed.len())]).collect()).collect();
        let e: Vec<Vec<Fe>> = a
            .iter()
            .map(|arow| {
                (0..n)
                    .map(|c| arow.iter().zip(&b).fold(Fe::ZERO, |acc, (&x, brow)| field.add(acc, field.mul(x, brow[c]))))
                    .collect()
            })
            .collect();
        if fixed_field_rank(field, &e) == t {
            return e;
        }
    }
}

/// Uniformly random messages of lengths `ks`.
pub fn random_messages<R: Rng + ?Sized>(field: &Field, ks: &[usize], rng: &mut R) -> Vec<Vec<Fe>> {
    ks.iter().map(|&k| (0..k).map(|_| field.random(rng)).collect()).collect()
}

/// Entry-wise sum of two words.
pub fn add_words(field: &Field, a: &[Vec<Fe>], b: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| field.add(u, v)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f256() -> Field {
        Field::new(Arc::new(FieldParams::with_default_modulus(2, 8, 1).unwrap()))
    }

    fn f16() -> Field {
        Field::new(Arc::new(FieldParams::with_default_modulus(2, 4, 1).unwrap()))
    }

    #[test]
    fn lin_eval_basics() {
        let f = f256();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(lin_eval(&f, &SkewPoly::x_pow(1), a), f.frobenius(a, 1));
            assert_eq!(lin_eval(&f, &SkewPoly::constant(c), a), f.mul(c, a));
            let poly = SkewPoly::new(vec![a, b, c]);
            let (u, v) = (f.random(&mut rng), f.random(&mut rng));
            assert_eq!(lin_eval(&f, &poly, f.add(u, v)), f.add(lin_eval(&f, &poly, u), lin_eval(&f, &poly, v)));
        }
    }

    #[test]
    fn evaluation_composes_with_product() {
        let f = f16();
        let ring = SkewRing::new(f.fork());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (p, q) = (ring.random(&mut rng, 3), ring.random(&mut rng, 2));
            let a = f.random(&mut rng);
            assert_eq!(lin_eval(&f, &ring.mul(&p, &q), a), lin_eval(&f, &p, lin_eval(&f, &q, a)));
        }
    }

    #[test]
    fn annihilator_single_point_and_span() {
        let f = f256();
        let ring = SkewRing::new(f.fork());
        let a = f.element(7).unwrap();
        let g = annihilator(&ring, &[a]).unwrap();
        let expected = SkewPoly::new(vec![f.neg(f.div(f.frobenius(a, 1), a).unwrap()), Fe::ONE]);
        assert_eq!(g, expected);
        assert!(lin_eval(&f, &g, a).is_zero());

        let code = GabidulinCode::with_standard_points(&f, 6, vec![2]).unwrap();
        let g = annihilator(&ring, code.points()).unwrap();
        assert_eq!(g.degree(), Some(6));
        assert!(g.is_monic());
        // kills every F_2-combination of the points, and nothing outside the span
        let mut zeros = 0;
        for mask in 0u32..64 {
            let u = code.points().iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(Fe::ZERO, |acc, (_, &p)| f.add(acc, p));
            assert!(lin_eval(&f, &g, u).is_zero());
        }
        for u in f.elements() {
            if lin_eval(&f, &g, u).is_zero() {
                zeros += 1;
            }
        }
        assert_eq!(zeros, 64);
        assert_eq!(annihilator(&ring, &[a, a]), Err(Error::PointsNotIndependent));
    }

    #[test]
    fn full_field_annihilator_is_sparse() {
        let f = f256();
        let ring = SkewRing::new(f.fork());
        let code = GabidulinCode::with_standard_points(&f, 8, vec![4]).unwrap();
        let g = annihilator(&ring, code.points()).unwrap();
        // x^8 - 1: theta^8 is the identity on F_256
        assert_eq!(g, SkewPoly::new(vec![Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ONE]));
    }

    #[test]
    fn interpolation_round_trip() {
        let f = f256();
        let ring = SkewRing::new(f.fork());
        let code = GabidulinCode::with_standard_points(&f, 8, vec![4]).unwrap();
        let pts = code.points();
        assert_eq!(interpolate(&f, pts, &[Fe::ZERO; 8]).unwrap(), SkewPoly::zero());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for deg in 0..8 {
            let p = ring.random(&mut rng, deg);
            let vals: Vec<Fe> = pts.iter().map(|&a| lin_eval(&f, &p, a)).collect();
            assert_eq!(interpolate(&f, pts, &vals).unwrap(), p);
        }
        let a = f.element(9).unwrap();
        let v = f.element(100).unwrap();
        assert_eq!(interpolate(&f, &[a], &[v]).unwrap(), SkewPoly::constant(f.div(v, a).unwrap()));
        assert_eq!(interpolate(&f, &[a, a], &[v, v]), Err(Error::PointsNotIndependent));
    }

    #[test]
    fn code_parameter_validation() {
        let f = f16();
        assert!(matches!(GabidulinCode::with_standard_points(&f, 5, vec![2]), Err(Error::InvalidCode(_))));
        assert!(matches!(GabidulinCode::with_standard_points(&f, 4, vec![4]), Err(Error::InvalidCode(_))));
        assert!(matches!(GabidulinCode::with_standard_points(&f, 4, vec![0]), Err(Error::InvalidCode(_))));
        let one = Fe::ONE;
        assert_eq!(GabidulinCode::new(&f, vec![1], vec![one, one]), Err(Error::PointsNotIndependent));
    }

    #[test]
    fn encode_decode_without_errors() {
        let f = f256();
        let code = GabidulinCode::with_standard_points(&f, 8, vec![3, 2]).unwrap();
        let zero = code.encode(&f, &[vec![Fe::ZERO; 3], vec![Fe::ZERO; 2]]).unwrap();
        assert!(zero.iter().flatten().all(|c| c.is_zero()));
        assert!(code.encode(&f, &[vec![Fe::ZERO; 2], vec![Fe::ZERO; 2]]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let msgs = random_messages(&f, code.ks(), &mut rng);
        let word = code.encode(&f, &msgs).unwrap();
        let out = code.decode(&f, &word).unwrap();
        assert_eq!(out.messages, msgs);
        assert_eq!(out.lambda, SkewPoly::one());
    }

    #[test]
    fn rank_errors_have_requested_rank() {
        let f = f256();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(random_rank_error(&f, 8, 0, 2, &mut rng).iter().flatten().all(|c| c.is_zero()));
        for t in 1..=4 {
            let e = random_rank_error(&f, 8, t, 2, &mut rng);
            assert_eq!(fixed_field_rank(&f, &e), t);
        }
        // rank 1: every row is a field multiple of a single F_2 pattern
        let e = random_rank_error(&f, 8, 1, 3, &mut rng);
        let fr = &f;
        let fixed: Vec<Vec<Fe>> =
            e.iter().flat_map(|r| (0..8).map(move |k| r.iter().map(|&a| fr.frobenius(a, k)).collect())).collect();
        assert_eq!(rank(&f, fixed), 1);
    }

    #[test]
    fn decodes_within_unique_radius() {
        let f = f256();
        let code = GabidulinCode::with_standard_points(&f, 8, vec![4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for t in 0..=code.unique_radius() {
            for _ in 0..20 {
                let msgs = random_messages(&f, code.ks(), &mut rng);
                let word = code.encode(&f, &msgs).unwrap();
                let err = random_rank_error(&f, 8, t, 1, &mut rng);
                let out = code.decode(&f, &add_words(&f, &word, &err)).unwrap();
                assert_eq!(out.messages, msgs);
                assert_eq!(out.lambda.degree(), Some(t));
            }
        }
    }

    #[test]
    fn short_codes_decode_within_unique_radius() {
        let f = f256();
        let code = GabidulinCode::with_standard_points(&f, 6, vec![2]).unwrap();
        assert!(!code.is_full_length(&f));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for t in 0..=code.unique_radius() {
            for _ in 0..20 {
                let msgs = random_messages(&f, code.ks(), &mut rng);
                let word = code.encode(&f, &msgs).unwrap();
                let err = random_rank_error(&f, 6, t, 1, &mut rng);
                assert_eq!(code.decode(&f, &add_words(&f, &word, &err)).unwrap().messages, msgs);
            }
        }
    }

    #[test]
    fn interleaved_full_length_decodes_beyond_unique_radius() {
        let f = f256();
        let code = GabidulinCode::with_standard_points(&f, 8, vec![2, 2]).unwrap();
        assert_eq!((code.unique_radius(), code.interleaved_radius()), (3, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut ok = 0;
        for _ in 0..40 {
            let msgs = random_messages(&f, code.ks(), &mut rng);
            let word = code.encode(&f, &msgs).unwrap();
            let err = random_rank_error(&f, 8, 4, 2, &mut rng);
            if code.decode(&f, &add_words(&f, &word, &err)).is_ok_and(|o| o.messages == msgs) {
                ok += 1;
            }
        }
        assert!(ok >= 30, "{ok}/40");
    }
}
