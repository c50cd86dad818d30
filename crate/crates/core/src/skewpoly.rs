//! The skew polynomial ring `K[x; theta]` (zero derivation).
//!
//! Multiplication follows `x * a = theta(a) * x`, so
//! `(sum f_i x^i)(sum g_j x^j) = sum f_i theta^i(g_j) x^(i+j)`.
//! Polynomials are plain coefficient vectors; arithmetic goes through a
//! [`SkewRing`], which owns the [`Field`] handle and its op counters.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ffield::{Fe, Field, FieldParams, OpCounts};

/// A skew polynomial, little-endian, with no trailing zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SkewPoly {
    coeffs: Vec<Fe>,
}

impl SkewPoly {
    pub fn zero() -> Self {
        SkewPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        SkewPoly { coeffs: vec![Fe::ONE] }
    }

    /// Strips trailing zeros.
    pub fn new(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        SkewPoly { coeffs }
    }

    pub fn constant(c: Fe) -> Self {
        SkewPoly::new(vec![c])
    }

    /// `c x^k`.
    pub fn monomial(c: Fe, k: usize) -> Self {
        if c.is_zero() {
            return SkewPoly::zero();
        }
        let mut coeffs = vec![Fe::ZERO; k + 1];
        coeffs[k] = c;
        SkewPoly { coeffs }
    }

    pub fn x_pow(k: usize) -> Self {
        SkewPoly::monomial(Fe::ONE, k)
    }

    /// Degree, with `None` standing for minus infinity (the zero polynomial).
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    pub fn lead(&self) -> Option<Fe> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Some(Fe::ONE)
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    #[inline]
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fe> {
        self.coeffs
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponents carrying a non-zero coefficient, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect()
    }

    /// Second-highest exponent with a non-zero coefficient; `None` (minus
    /// infinity) for zero and monomials.
    pub fn deg2(&self) -> Option<usize> {
        let d = self.degree()?;
        (0..d).rev().find(|&i| !self.coeffs[i].is_zero())
    }

    /// `f * x^k`: exponents raised by `k`, coefficients untouched.
    pub fn shift_right(&self, k: usize) -> SkewPoly {
        if self.is_zero() {
            return SkewPoly::zero();
        }
        let mut coeffs = vec![Fe::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        SkewPoly { coeffs }
    }

    /// Exact right division by `x^k`, or `None` if a low coefficient is non-zero.
    pub fn right_div_x_pow(&self, k: usize) -> Option<SkewPoly> {
        if self.is_zero() {
            return Some(SkewPoly::zero());
        }
        if k > self.coeffs.len() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(SkewPoly { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Canonical encodings of the coefficients, little-endian.
    pub fn encodings(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.encoding()).collect()
    }

    /// Builds a polynomial from canonical encodings, validating each against `field`.
    pub fn from_encodings(field: &Field, encodings: &[u64]) -> Result<SkewPoly> {
        let coeffs = encodings.iter().map(|&e| field.element(e)).collect::<Result<Vec<_>>>()?;
        Ok(SkewPoly::new(coeffs))
    }
}

impl fmt::Debug for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, *c == Fe::ONE) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{c}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Ring context for `K[x; theta]`: field arithmetic plus op counting.
#[derive(Debug)]
pub struct SkewRing {
    field: Field,
}

impl SkewRing {
    pub fn new(field: Field) -> Self {
        SkewRing { field }
    }

    pub fn from_params(params: Arc<FieldParams>) -> Self {
        SkewRing::new(Field::new(params))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn params(&self) -> &Arc<FieldParams> {
        self.field.params()
    }

    pub fn ops(&self) -> OpCounts {
        self.field.ops()
    }

    /// Same ring, fresh counters.
    pub fn fork(&self) -> SkewRing {
        SkewRing::new(self.field.fork())
    }

    /// Checks every coefficient is a valid element of this ring's field.
    pub fn check(&self, f: &SkewPoly) -> Result<()> {
        for &c in f.coeffs() {
            self.field.check(c)?;
        }
        Ok(())
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, degree: usize) -> SkewPoly {
        let mut coeffs: Vec<Fe> = (0..degree).map(|_| self.field.random(rng)).collect();
        coeffs.push(self.field.random_nonzero(rng));
        SkewPoly::new(coeffs)
    }

    /// Uniformly random polynomial of degree `< bound` (possibly zero).
    pub fn random_below<R: Rng + ?Sized>(&self, rng: &mut R, bound: usize) -> SkewPoly {
        SkewPoly::new((0..bound).map(|_| self.field.random(rng)).collect())
    }

    pub fn add(&self, a: &SkewPoly, b: &SkewPoly) -> SkewPoly {
        let n = a.len().max(b.len());
        let f = &self.field;
        SkewPoly::new((0..n).map(|i| f.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(&self, a: &SkewPoly, b: &SkewPoly) -> SkewPoly {
        let n = a.len().max(b.len());
        let f = &self.field;
        SkewPoly::new((0..n).map(|i| f.sub(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, a: &SkewPoly) -> SkewPoly {
        SkewPoly::new(a.coeffs().iter().map(|&c| self.field.neg(c)).collect())
    }

    /// `c * f` (left scalar multiplication acts coefficient-wise).
    pub fn scale(&self, c: Fe, f: &SkewPoly) -> SkewPoly {
        if c.is_zero() {
            return SkewPoly::zero();
        }
        SkewPoly::new(f.coeffs().iter().map(|&a| self.field.mul(c, a)).collect())
    }

    /// `c x^k * f = sum c theta^k(f_t) x^(t+k)`.
    pub fn mul_monomial(&self, c: Fe, k: usize, f: &SkewPoly) -> SkewPoly {
        if c.is_zero() || f.is_zero() {
            return SkewPoly::zero();
        }
        let fld = &self.field;
        let mut coeffs = vec![Fe::ZERO; k];
        coeffs.extend(f.coeffs().iter().map(|&a| fld.mul(c, fld.frobenius(a, k as i64))));
        SkewPoly::new(coeffs)
    }

    /// `target -= c x^k * f`, in place.
    pub(crate) fn sub_mul_monomial_into(&self, target: &mut Vec<Fe>, c: Fe, k: usize, f: &[Fe]) {
        if c.is_zero() || f.is_empty() {
            return;
        }
        let fld = &self.field;
        if target.len() < f.len() + k {
            target.resize(f.len() + k, Fe::ZERO);
        }
        for (t, &a) in f.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let term = fld.mul(c, fld.frobenius(a, k as i64));
            target[t + k] = fld.sub(target[t + k], term);
        }
        while target.last().is_some_and(|c| c.is_zero()) {
            target.pop();
        }
    }

    pub fn mul(&self, f: &SkewPoly, g: &SkewPoly) -> SkewPoly {
        if f.is_zero() || g.is_zero() {
            return SkewPoly::zero();
        }
        let fld = &self.field;
        let mut out = vec![Fe::ZERO; f.len() + g.len() - 1];
        for (i, &fi) in f.coeffs().iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, &gj) in g.coeffs().iter().enumerate() {
                if gj.is_zero() {
                    continue;
                }
                let term = fld.mul(fi, fld.frobenius(gj, i as i64));
                out[i + j] = fld.add(out[i + j], term);
            }
        }
        SkewPoly::new(out)
    }

    /// Coefficient of `x^d` in `lambda * s`: `sum_i lambda_i theta^i(s_(d-i))`.
    pub(crate) fn product_coeff(&self, lambda: &[Fe], s: &[Fe], d: usize) -> Fe {
        if lambda.is_empty() || s.is_empty() {
            return Fe::ZERO;
        }
        let fld = &self.field;
        let lo = d.saturating_sub(s.len() - 1);
        let hi = d.min(lambda.len() - 1);
        let mut acc = Fe::ZERO;
        for i in lo..=hi {
            let (li, sj) = (lambda[i], s[d - i]);
            if li.is_zero() || sj.is_zero() {
                continue;
            }
            acc = fld.add(acc, fld.mul(li, fld.frobenius(sj, i as i64)));
        }
        acc
    }

    /// Right division: `a = q c + r` with `deg r < deg c` (`q` is the left cofactor).
    pub fn right_divmod(&self, a: &SkewPoly, c: &SkewPoly) -> Result<(SkewPoly, SkewPoly)> {
        let dc = c.degree().ok_or(Error::ZeroPolyDivision)?;
        let Some(da) = a.degree().filter(|&da| da >= dc) else {
            return Ok((SkewPoly::zero(), a.clone()));
        };
        let fld = &self.field;
        let lc_inv = fld.inv(c.lead().expect("non-zero"))?;
        let mut rem = a.coeffs().to_vec();
        let mut quot = vec![Fe::ZERO; da - dc + 1];
        for top in (dc..=da).rev() {
            let lead = rem[top];
            if lead.is_zero() {
                continue;
            }
            let t = top - dc;
            // q_t theta^t(lc) = lead
            let q = fld.mul(lead, fld.frobenius(lc_inv, t as i64));
            quot[t] = q;
            for (i, &ci) in c.coeffs().iter().enumerate() {
                if ci.is_zero() {
                    continue;
                }
                let term = fld.mul(q, fld.frobenius(ci, t as i64));
                rem[t + i] = fld.sub(rem[t + i], term);
            }
        }
        rem.truncate(dc);
        Ok((SkewPoly::new(quot), SkewPoly::new(rem)))
    }

    /// Remainder of [`right_divmod`](Self::right_divmod).
    pub fn right_mod(&self, a: &SkewPoly, c: &SkewPoly) -> Result<SkewPoly> {
        Ok(self.right_divmod(a, c)?.1)
    }

    /// Left division: `a = c q + r` with `deg r < deg c`.
    pub fn left_divmod(&self, a: &SkewPoly, c: &SkewPoly) -> Result<(SkewPoly, SkewPoly)> {
        let dc = c.degree().ok_or(Error::ZeroPolyDivision)?;
        let Some(da) = a.degree().filter(|&da| da >= dc) else {
            return Ok((SkewPoly::zero(), a.clone()));
        };
        let fld = &self.field;
        let lc_inv = fld.inv(c.lead().expect("non-zero"))?;
        let mut rem = a.coeffs().to_vec();
        let mut quot = vec![Fe::ZERO; da - dc + 1];
        for top in (dc..=da).rev() {
            let lead = rem[top];
            if lead.is_zero() {
                continue;
            }
            let t = top - dc;
            // lc theta^dc(q_t) = lead
            let q = fld.frobenius(fld.mul(lc_inv, lead), -(dc as i64));
            quot[t] = q;
            for (i, &ci) in c.coeffs().iter().enumerate() {
                if ci.is_zero() {
                    continue;
                }
                let term = fld.mul(ci, fld.frobenius(q, i as i64));
                rem[t + i] = fld.sub(rem[t + i], term);
            }
        }
        rem.truncate(dc);
        Ok((SkewPoly::new(quot), SkewPoly::new(rem)))
    }

    /// Coefficient of `x^eta` in `(lambda * s) mod g` (right modulo).
    ///
    /// When `deg2 g < deg g / 2` only the few coefficients of `lambda * s`
    /// that can reach degree `eta` during the reduction are convolved;
    /// otherwise the full product is reduced.
    pub fn coeff_of_product_mod(&self, lambda: &SkewPoly, s: &SkewPoly, g: &SkewPoly, eta: usize) -> Result<Fe> {
        Ok(self.coeff_of_product_mod_slices(lambda.coeffs(), s.coeffs(), g, eta)?.0)
    }

    /// As [`coeff_of_product_mod`](Self::coeff_of_product_mod) on raw
    /// normalised slices; also returns the scratch coefficients held.
    pub(crate) fn coeff_of_product_mod_slices(
        &self,
        lambda: &[Fe],
        s: &[Fe],
        g: &SkewPoly,
        eta: usize,
    ) -> Result<(Fe, usize)> {
        let dg = g.degree().ok_or(Error::ZeroPolyDivision)?;
        if eta >= dg {
            return Err(Error::Precondition(format!("eta = {eta} must be below deg g = {dg}")));
        }
        if lambda.is_empty() || s.is_empty() {
            return Ok((Fe::ZERO, 0));
        }
        if is_sparse_modulus(g) {
            self.sparse_coeff(lambda, s, g, eta)
        } else {
            let prod = self.mul(&SkewPoly { coeffs: lambda.to_vec() }, &SkewPoly { coeffs: s.to_vec() });
            let scratch = prod.len();
            let r = self.right_mod(&prod, g)?;
            Ok((r.coeff(eta), scratch))
        }
    }

    fn sparse_coeff(&self, lambda: &[Fe], s: &[Fe], g: &SkewPoly, eta: usize) -> Result<(Fe, usize)> {
        let fld = &self.field;
        let dg = g.degree().expect("non-zero");
        let deg_prod = lambda.len() + s.len() - 2;
        let tail: Vec<usize> = g.support().into_iter().filter(|&i| i != dg).collect();

        // Degrees whose reduction step can touch `eta`: D -> D + dg - i.
        let mut needed = BTreeMap::new();
        let mut stack = vec![eta];
        while let Some(d) = stack.pop() {
            if needed.insert(d, Fe::ZERO).is_some() {
                continue;
            }
            for &i in &tail {
                let up = d + dg - i;
                if up <= deg_prod && !needed.contains_key(&up) {
                    stack.push(up);
                }
            }
        }
        let scratch = needed.len();

        let lc_inv = fld.inv(g.lead().expect("non-zero"))?;
        // Process from the top: a reduced coefficient at D >= dg yields the
        // quotient q_D, which feeds back into D - dg + i for each tail exponent i.
        let degrees: Vec<usize> = needed.keys().rev().copied().collect();
        let mut quotients: BTreeMap<usize, Fe> = BTreeMap::new();
        for d in degrees {
            let mut c = self.product_coeff(lambda, s, d);
            for &i in &tail {
                let up = d + dg - i;
                if let Some(&q) = quotients.get(&up) {
                    let term = fld.mul(q, fld.frobenius(g.coeff(i), (up - dg) as i64));
                    c = fld.sub(c, term);
                }
            }
            if d >= dg {
                if !c.is_zero() {
                    let q = fld.mul(c, fld.frobenius(lc_inv, (d - dg) as i64));
                    quotients.insert(d, q);
                }
            } else {
                needed.insert(d, c);
            }
        }
        Ok((needed[&eta], scratch))
    }
}

/// Whether `deg2 g < deg g / 2`, counting minus infinity as below.
pub fn is_sparse_modulus(g: &SkewPoly) -> bool {
    match (g.deg2(), g.degree()) {
        (_, None) | (None, _) => true,
        (Some(d2), Some(d)) => 2 * d2 < d,
    }
}
