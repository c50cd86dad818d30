//! Arithmetic in F_{p^m} with the Frobenius twist `theta(a) = a^(p^s)`.
//!
//! Elements use the polynomial basis over F_p: an element is the residue of
//! a polynomial of degree < m modulo a monic irreducible modulus, and it is
//! stored as its canonical integer encoding `sum c_i p^i`. Elements do not
//! carry their field; every operation goes through a [`Field`] handle, which
//! also owns the operation counters.

use std::cell::Cell;
use std::fmt;
use std::ops::{Add, Sub};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Upper bound on `p^m` so that encodings fit a `u32` and binary products fit a `u64`.
const MAX_ORDER: u64 = 1 << 31;

/// An element of F_{p^m}, stored as its canonical integer encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Canonical encoding `sum c_i p^i`.
    #[inline]
    pub fn encoding(self) -> u64 {
        self.0 as u64
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Validated description of F_{p^m} together with the Frobenius exponent `s`.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldParams {
    p: u32,
    m: usize,
    s: usize,
    modulus: Vec<u32>,
    order: u32,
    // p^i for i in 0..=m
    powers: Vec<u64>,
    // binary fields: modulus as a bit mask
    mod_bits: u64,
}

impl fmt::Debug for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldParams")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("s", &self.s)
            .field("modulus", &self.modulus)
            .finish()
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Remainder of `a` modulo the monic polynomial `b` over F_p (little-endian digits).
fn fp_poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let db = b.len() - 1;
    let p = p as u64;
    while r.len() > db {
        let top = r.len() - 1;
        let c = r[top] % p;
        if c != 0 {
            let shift = top - db;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - (c * bi as u64) % p) % p;
            }
        }
        r.pop();
    }
    r.into_iter().map(|x| (x % p) as u32).collect()
}

/// Trial division by every monic polynomial of degree `1..=m/2`.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let m = modulus.len() - 1;
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut rest = low;
            for _ in 0..d {
                divisor.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            divisor.push(1);
            if fp_poly_rem(modulus, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldParams {
    /// Validates and builds F_{p^m} = F_p[z]/(modulus) with `theta(a) = a^(p^s)`.
    ///
    /// `modulus` lists the `m + 1` coefficients little-endian; it must be monic
    /// and irreducible over F_p.
    pub fn new(p: u32, m: usize, s: usize, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("p = {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidField("m must be at least 1".into()));
        }
        if s == 0 || s > m {
            return Err(Error::InvalidField(format!("s = {s} must satisfy 1 <= s <= m = {m}")));
        }
        let order = (p as u64).checked_pow(m as u32).filter(|&o| o <= MAX_ORDER).ok_or_else(|| {
            Error::InvalidField(format!("p^m = {p}^{m} exceeds the supported order 2^31"))
        })?;
        if modulus.len() != m + 1 {
            return Err(Error::InvalidField(format!(
                "modulus has {} coefficients, expected m + 1 = {}",
                modulus.len(),
                m + 1
            )));
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidField(format!("modulus coefficient {c} not in [0, {p})")));
        }
        if modulus[m] != 1 {
            return Err(Error::InvalidField("modulus is not monic".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidField("modulus is not irreducible over F_p".into()));
        }
        let powers = (0..=m).map(|i| (p as u64).pow(i as u32)).collect();
        let mod_bits = if p == 2 {
            modulus.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | ((c as u64) << i))
        } else {
            0
        };
        Ok(FieldParams { p, m, s, modulus, order: order as u32, powers, mod_bits })
    }

    /// F_{p^m} with the irreducible modulus of smallest canonical encoding.
    pub fn with_default_modulus(p: u32, m: usize, s: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("p = {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidField("m must be at least 1".into()));
        }
        let count = (p as u64)
            .checked_pow(m as u32)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidField(format!("p^m = {p}^{m} exceeds 2^31")))?;
        for low in 0..count {
            let mut modulus = Vec::with_capacity(m + 1);
            let mut rest = low;
            for _ in 0..m {
                modulus.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            modulus.push(1);
            if is_irreducible(&modulus, p) {
                return FieldParams::new(p, m, s, modulus);
            }
        }
        Err(Error::Internal("no irreducible modulus found".into()))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Number of field elements, `p^m`.
    pub fn order(&self) -> u64 {
        self.order as u64
    }

    /// Order of theta as an automorphism: `m / gcd(m, s)`.
    pub fn theta_order(&self) -> usize {
        self.m / gcd(self.m, self.s)
    }

    /// Size of the fixed field of theta, `p^gcd(m, s)`.
    pub fn fixed_field_order(&self) -> u64 {
        (self.p as u64).pow(gcd(self.m, self.s) as u32)
    }

    fn digits(&self, a: Fe) -> [u32; 32] {
        let mut out = [0u32; 32];
        let mut rest = a.0;
        for d in out.iter_mut().take(self.m) {
            *d = rest % self.p;
            rest /= self.p;
        }
        out
    }

    fn element_from_digits(&self, digits: &[u32]) -> Fe {
        let mut enc = 0u64;
        for i in (0..self.m).rev() {
            enc = enc * self.p as u64 + digits[i] as u64;
        }
        Fe(enc as u32)
    }

    #[inline]
    fn raw_add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let mut z = [0u32; 32];
        for i in 0..self.m {
            z[i] = (x[i] + y[i]) % self.p;
        }
        self.element_from_digits(&z)
    }

    #[inline]
    fn raw_neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        let x = self.digits(a);
        let mut z = [0u32; 32];
        for i in 0..self.m {
            z[i] = (self.p - x[i]) % self.p;
        }
        self.element_from_digits(&z)
    }

    fn raw_mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        if self.p == 2 {
            return self.binary_mul(a.0 as u64, b.0 as u64);
        }
        let p = self.p as u64;
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = [0u64; 64];
        for i in 0..self.m {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.m {
                prod[i + j] = (prod[i + j] + x[i] as u64 * y[j] as u64) % p;
            }
        }
        // reduce with the monic modulus from the top
        for top in (self.m..2 * self.m - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            let shift = top - self.m;
            for (i, &mi) in self.modulus.iter().enumerate() {
                prod[shift + i] = (prod[shift + i] + p * p - c * mi as u64) % p;
            }
        }
        let mut z = [0u32; 32];
        for i in 0..self.m {
            z[i] = prod[i] as u32;
        }
        self.element_from_digits(&z)
    }

    #[inline]
    fn binary_mul(&self, a: u64, b: u64) -> Fe {
        let mut prod = 0u64;
        let mut x = a;
        let mut y = b;
        while y != 0 {
            if y & 1 == 1 {
                prod ^= x;
            }
            x <<= 1;
            y >>= 1;
        }
        let m = self.m;
        let mut top = 63 - prod.leading_zeros() as usize;
        while prod >> m != 0 {
            if (prod >> top) & 1 == 1 {
                prod ^= self.mod_bits << (top - m);
            }
            top -= 1;
        }
        Fe(prod as u32)
    }

    fn raw_pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `theta^k(a)`, for any integer `k`.
    fn raw_frobenius(&self, a: Fe, k: i64) -> Fe {
        let ord = self.theta_order() as i64;
        let k = k.rem_euclid(ord) as usize;
        let j = (self.s * k) % self.m;
        if j == 0 || a.0 <= 1 {
            return a;
        }
        self.raw_pow(a, self.powers[j])
    }
}

/// Snapshot of field-operation counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Additions, subtractions and negations.
    pub add: u64,
    pub mul: u64,
    pub inv: u64,
    /// Frobenius applications; each is one exponentiation of O(log p^m) multiplications.
    pub frob: u64,
}

impl OpCounts {
    /// Every counted field operation.
    pub fn total(&self) -> u64 {
        self.add + self.mul + self.inv + self.frob
    }

    /// Multiplicative operations: multiplications, inversions and Frobenius maps.
    pub fn mults(&self) -> u64 {
        self.mul + self.inv + self.frob
    }
}

impl Add for OpCounts {
    type Output = OpCounts;

    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            add: self.add + rhs.add,
            mul: self.mul + rhs.mul,
            inv: self.inv + rhs.inv,
            frob: self.frob + rhs.frob,
        }
    }
}

impl Sub for OpCounts {
    type Output = OpCounts;

    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            add: self.add - rhs.add,
            mul: self.mul - rhs.mul,
            inv: self.inv - rhs.inv,
            frob: self.frob - rhs.frob,
        }
    }
}

#[derive(Default)]
struct OpCounter {
    add: Cell<u64>,
    mul: Cell<u64>,
    inv: Cell<u64>,
    frob: Cell<u64>,
}

#[inline]
fn bump(c: &Cell<u64>) {
    c.set(c.get() + 1);
}

/// A field handle: shared immutable parameters plus a private op counter.
///
/// `Field` is `Send` but not `Sync`; concurrent callers each [`fork`](Field::fork)
/// their own handle so counts never mix.
pub struct Field {
    params: Arc<FieldParams>,
    ops: OpCounter,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("params", &self.params).field("ops", &self.ops()).finish()
    }
}

impl Field {
    pub fn new(params: Arc<FieldParams>) -> Self {
        Field { params, ops: OpCounter::default() }
    }

    /// Same field, fresh counters.
    pub fn fork(&self) -> Self {
        Field::new(self.params.clone())
    }

    pub fn params(&self) -> &Arc<FieldParams> {
        &self.params
    }

    pub fn ops(&self) -> OpCounts {
        OpCounts {
            add: self.ops.add.get(),
            mul: self.ops.mul.get(),
            inv: self.ops.inv.get(),
            frob: self.ops.frob.get(),
        }
    }

    pub fn reset_ops(&self) {
        self.ops.add.set(0);
        self.ops.mul.set(0);
        self.ops.inv.set(0);
        self.ops.frob.set(0);
    }

    pub fn order(&self) -> u64 {
        self.params.order()
    }

    pub fn theta_order(&self) -> usize {
        self.params.theta_order()
    }

    /// Element with the given canonical encoding.
    pub fn element(&self, encoding: u64) -> Result<Fe> {
        if encoding >= self.order() {
            return Err(Error::ElementOutOfRange(encoding, self.order()));
        }
        Ok(Fe(encoding as u32))
    }

    /// Checks that `a` is a valid encoding for this field.
    pub fn check(&self, a: Fe) -> Result<Fe> {
        if a.encoding() >= self.order() {
            return Err(Error::FieldMismatch);
        }
        Ok(a)
    }

    /// Element from polynomial-basis coordinates (little-endian, length m).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        let fp = &*self.params;
        if coeffs.len() != fp.m || coeffs.iter().any(|&c| c >= fp.p) {
            return Err(Error::Precondition(format!(
                "expected {} coordinates in [0, {})",
                fp.m, fp.p
            )));
        }
        Ok(fp.element_from_digits(coeffs))
    }

    /// Polynomial-basis coordinates of `a` (little-endian, length m).
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        self.params.digits(a)[..self.params.m].to_vec()
    }

    /// The generator `z` of the polynomial basis (for m = 1 this is `z mod (z + c)`).
    pub fn z(&self) -> Fe {
        let fp = &*self.params;
        if fp.m > 1 {
            Fe(fp.p)
        } else {
            // z = -c0 in F_p[z]/(z + c0)
            fp.raw_neg(Fe(fp.modulus[0]))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.params.order).map(Fe)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.params.order))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.params.order))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        bump(&self.ops.add);
        self.params.raw_add(a, b)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        bump(&self.ops.add);
        self.params.raw_neg(a)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        bump(&self.ops.add);
        let fp = &*self.params;
        fp.raw_add(a, fp.raw_neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        bump(&self.ops.mul);
        self.params.raw_mul(a, b)
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        bump(&self.ops.inv);
        Ok(self.params.raw_pow(a, self.order() - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        let b_inv = self.inv(b)?;
        Ok(self.mul(a, b_inv))
    }

    /// `a^e`; counted as the multiplications square-and-multiply performs.
    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        let steps = if e == 0 { 0 } else { 2 * (64 - e.leading_zeros() as u64) };
        self.ops.mul.set(self.ops.mul.get() + steps);
        self.params.raw_pow(a, e)
    }

    /// `theta^k(a) = a^(p^(s k))`, with `k` taken modulo the order of theta.
    #[inline]
    pub fn frobenius(&self, a: Fe, k: i64) -> Fe {
        bump(&self.ops.frob);
        self.params.raw_frobenius(a, k)
    }

    /// Elements fixed by theta.
    pub fn fixed_field(&self) -> Vec<Fe> {
        let fp = &*self.params;
        if gcd(fp.m, fp.s) == 1 {
            // the prime field: encodings below p
            return (0..fp.p).map(Fe).collect();
        }
        self.elements().filter(|&a| fp.raw_frobenius(a, 1) == a).collect()
    }
}
