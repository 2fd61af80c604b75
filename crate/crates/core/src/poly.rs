//! Exact Laurent polynomials, determinants and gcds.
//!
//! [`Laurent`] is a sparse Laurent polynomial in `V` variables over a
//! coefficient ring. The rings used here are the integers and the Gaussian
//! integers. Gcds go through dense polynomials ([`UPoly`]) by primitive
//! remainder sequences; bivariate gcds recurse on polynomials whose
//! coefficients are themselves polynomials.

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type GaussInt = Complex<BigInt>;

/// Coefficient ring: an integral domain with gcds and exact division.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
{
    /// `self / d` when `d` divides `self`.
    fn exact_div(&self, d: &Self) -> Option<Self>;
    /// A gcd, normalized to the canonical associate.
    fn gcd(&self, other: &Self) -> Self;
    /// The unit `u` making `u * self` the canonical associate.
    fn normal_unit(&self) -> Self;
}

impl Coeff for BigInt {
    fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }

    fn normal_unit(&self) -> Self {
        if self.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }
}

fn gauss_norm(z: &GaussInt) -> BigInt {
    &z.re * &z.re + &z.im * &z.im
}

/// Nearest integer to a / b for b > 0.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

impl Coeff for GaussInt {
    fn exact_div(&self, d: &Self) -> Option<Self> {
        let n = gauss_norm(d);
        if n.is_zero() {
            return None;
        }
        let num = self * d.conj();
        let (re, r1) = num.re.div_rem(&n);
        let (im, r2) = num.im.div_rem(&n);
        (r1.is_zero() && r2.is_zero()).then(|| Complex::new(re, im))
    }

    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let n = gauss_norm(&b);
            let num = &a * b.conj();
            let q = Complex::new(round_div(&num.re, &n), round_div(&num.im, &n));
            let r = a - q * &b;
            a = b;
            b = r;
        }
        let u = a.normal_unit();
        a * u
    }

    /// Canonical associates have positive real part and non-negative
    /// imaginary part.
    fn normal_unit(&self) -> Self {
        let one = BigInt::one();
        let zero = BigInt::zero();
        let units = [
            Complex::new(one.clone(), zero.clone()),
            Complex::new(zero.clone(), one.clone()),
            Complex::new(-one.clone(), zero.clone()),
            Complex::new(zero.clone(), -one.clone()),
        ];
        if self.is_zero() {
            return units[0].clone();
        }
        for u in units.iter() {
            let z = self * u;
            if z.re.is_positive() && !z.im.is_negative() {
                return u.clone();
            }
        }
        unreachable!("some rotation lands in the first quadrant")
    }
}

/// Reduction of a coefficient modulo a prime `p`, with `i` sent to `root`
/// (a square root of −1 when one is needed).
pub trait ModReduce {
    fn reduce(&self, p: u64, root: u64) -> u64;
}

fn big_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    u64::try_from(r).expect("reduced value fits")
}

impl ModReduce for BigInt {
    fn reduce(&self, p: u64, _root: u64) -> u64 {
        big_mod(self, p)
    }
}

impl ModReduce for GaussInt {
    fn reduce(&self, p: u64, root: u64) -> u64 {
        let re = big_mod(&self.re, p);
        let im = big_mod(&self.im, p);
        ((re as u128 + im as u128 * root as u128) % p as u128) as u64
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Determinant over `ℤ/p` by Gaussian elimination.
pub fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| m[i][k] != 0) else { return 0 };
        if piv != k {
            m.swap(piv, k);
            det = (p - det) % p;
        }
        det = mul_mod(det, m[k][k], p);
        let inv = inv_mod(m[k][k], p);
        for i in k + 1..n {
            if m[i][k] == 0 {
                continue;
            }
            let f = mul_mod(m[i][k], inv, p);
            for j in k..n {
                let sub = mul_mod(f, m[k][j], p);
                m[i][j] = (m[i][j] + p - sub) % p;
            }
        }
    }
    det
}

// ---------------------------------------------------------------------------
// Sparse Laurent polynomials

/// A Laurent polynomial in `V` variables; terms are kept in ascending
/// lexicographic order of exponent vectors and no zero coefficient is stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent<C, const V: usize> {
    terms: BTreeMap<[i32; V], C>,
}

pub type LaurentPoly1 = Laurent<BigInt, 1>;
pub type LaurentPoly2 = Laurent<BigInt, 2>;
pub type GaussLaurent = Laurent<GaussInt, 1>;

impl<C: Coeff, const V: usize> Laurent<C, V> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial([0; V], c)
    }

    pub fn monomial(exp: [i32; V], c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Laurent { terms }
    }

    /// The variable with index `i`, raised to `e`.
    pub fn var_pow(i: usize, e: i32) -> Self {
        let mut exp = [0; V];
        exp[i] = e;
        Self::monomial(exp, C::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([i32; V], C)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: [i32; V], c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exp) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(exp, s);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&[0; V]).is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32; V], &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: [i32; V]) -> C {
        self.terms.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (*e, x.clone() * c.clone())))
    }

    /// Multiplies by the monomial with exponent `by`.
    pub fn shift(&self, by: [i32; V]) -> Self {
        Laurent {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = *e;
                    for i in 0..V {
                        f[i] += by[i];
                    }
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// Componentwise minimum exponents (zero for the zero polynomial).
    pub fn min_exponents(&self) -> [i32; V] {
        let mut m = [i32::MAX; V];
        for e in self.terms.keys() {
            for i in 0..V {
                m[i] = m[i].min(e[i]);
            }
        }
        if self.is_zero() {
            [0; V]
        } else {
            m
        }
    }

    pub fn max_exponents(&self) -> [i32; V] {
        let mut m = [i32::MIN; V];
        for e in self.terms.keys() {
            for i in 0..V {
                m[i] = m[i].max(e[i]);
            }
        }
        if self.is_zero() {
            [0; V]
        } else {
            m
        }
    }

    /// Shifts so that every variable's minimal exponent is zero.
    pub fn shifted_to_origin(&self) -> Self {
        let m = self.min_exponents();
        self.shift(m.map(|x| -x))
    }

    pub fn leading(&self) -> Option<(&[i32; V], &C)> {
        self.terms.iter().next_back()
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (dl_e, dl_c) = d.leading()?;
        let (dl_e, dl_c) = (*dl_e, dl_c.clone());
        if self.is_zero() {
            return Some(Self::zero());
        }
        // in each variable separately the quotient's exponents lie in a box
        let (ps_lo, ps_hi) = (self.min_exponents(), self.max_exponents());
        let (d_lo, d_hi) = (d.min_exponents(), d.max_exponents());
        let mut r = self.clone();
        let mut q = Self::zero();
        while let Some((re, rc)) = r.leading() {
            let mut e = *re;
            for i in 0..V {
                e[i] -= dl_e[i];
                if e[i] < ps_lo[i] - d_lo[i] || e[i] > ps_hi[i] - d_hi[i] {
                    return None;
                }
            }
            let c = rc.exact_div(&dl_c)?;
            let t = Self::monomial(e, c);
            r = &r - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Laurent<D, V> {
        Laurent::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    /// Value modulo `p` with variable `i` set to `vals[i]` (nonzero mod `p`).
    pub fn eval_mod(&self, vals: [u64; V], p: u64, root: u64) -> u64
    where
        C: ModReduce,
    {
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut x = c.reduce(p, root);
            for i in 0..V {
                let base = if e[i] >= 0 { vals[i] % p } else { inv_mod(vals[i] % p, p) };
                x = mul_mod(x, pow_mod(base, e[i].unsigned_abs() as u64, p), p);
            }
            acc = (acc + x) % p;
        }
        acc
    }
}

impl<C: Coeff, const V: usize> Default for Laurent<C, V> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff, const V: usize> Add for &Laurent<C, V> {
    type Output = Laurent<C, V>;
    fn add(self, o: Self) -> Laurent<C, V> {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }
}

impl<C: Coeff, const V: usize> Sub for &Laurent<C, V> {
    type Output = Laurent<C, V>;
    fn sub(self, o: Self) -> Laurent<C, V> {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, -c.clone());
        }
        r
    }
}

impl<C: Coeff, const V: usize> Mul for &Laurent<C, V> {
    type Output = Laurent<C, V>;
    fn mul(self, o: Self) -> Laurent<C, V> {
        let mut r = Laurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = *e1;
                for i in 0..V {
                    e[i] += e2[i];
                }
                r.add_term(e, c1.clone() * c2.clone());
            }
        }
        r
    }
}

impl<C: Coeff, const V: usize> Neg for &Laurent<C, V> {
    type Output = Laurent<C, V>;
    fn neg(self) -> Laurent<C, V> {
        Laurent { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl<C: Coeff, const V: usize> $tr for Laurent<C, V> {
            type Output = Laurent<C, V>;
            fn $f(self, o: Self) -> Laurent<C, V> {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<C: Coeff, const V: usize> Neg for Laurent<C, V> {
    type Output = Laurent<C, V>;
    fn neg(self) -> Laurent<C, V> {
        -&self
    }
}

/// Textual coefficient with its sign, for the term printer.
pub trait CoeffText {
    /// (is the term subtracted, magnitude text)
    fn split_sign(&self) -> (bool, String);
}

impl CoeffText for BigInt {
    fn split_sign(&self) -> (bool, String) {
        (self.is_negative(), self.abs().to_string())
    }
}

impl CoeffText for GaussInt {
    fn split_sign(&self) -> (bool, String) {
        if self.im.is_zero() {
            (self.re.is_negative(), self.re.abs().to_string())
        } else if self.re.is_zero() {
            (self.im.is_negative(), format!("{}i", self.im.abs()))
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            (false, format!("({}{}{}i)", self.re, sign, self.im.abs()))
        }
    }
}

impl<C: Coeff + CoeffText, const V: usize> Laurent<C, V> {
    /// Terms like `5*s^-1*t^2` in ascending order joined by `+`/`-`, unit
    /// coefficients and zero powers left out; `0` when empty.
    pub fn to_text(&self, vars: [&str; V]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = c.split_sign();
            if neg {
                out.push('-');
            } else if k > 0 {
                out.push('+');
            }
            let powers: Vec<String> = (0..V)
                .filter(|&i| e[i] != 0)
                .map(|i| if e[i] == 1 { vars[i].to_string() } else { format!("{}^{}", vars[i], e[i]) })
                .collect();
            if powers.is_empty() {
                out.push_str(&mag);
            } else {
                if mag != "1" {
                    out.push_str(&mag);
                    out.push('*');
                }
                out.push_str(&powers.join("*"));
            }
        }
        out
    }
}

impl<C: Coeff, const V: usize> Debug for Laurent<C, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl fmt::Display for LaurentPoly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(["A"]))
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(["s", "t"]))
    }
}

// JSON: a list of [exponent..., coefficient] rows in ascending order.
// Coefficients are numbers when they fit in an i64 and decimal strings
// otherwise.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn from_big(c: &BigInt) -> Self {
        i64::try_from(c).map(JsonInt::Small).unwrap_or_else(|_| JsonInt::Big(c.to_string()))
    }

    fn into_big<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(v)),
            JsonInt::Big(s) => s.parse().map_err(E::custom),
        }
    }
}

impl Serialize for LaurentPoly1 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<(i32, JsonInt)> = self.terms.iter().map(|(e, c)| (e[0], JsonInt::from_big(c))).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly1 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<(i32, JsonInt)> = Vec::deserialize(d)?;
        let mut p = Self::zero();
        for (e, c) in rows {
            p.add_term([e], c.into_big()?);
        }
        Ok(p)
    }
}

impl Serialize for LaurentPoly2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<(i32, i32, JsonInt)> =
            self.terms.iter().map(|(e, c)| (e[0], e[1], JsonInt::from_big(c))).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<(i32, i32, JsonInt)> = Vec::deserialize(d)?;
        let mut p = Self::zero();
        for (a, b, c) in rows {
            p.add_term([a, b], c.into_big()?);
        }
        Ok(p)
    }
}

impl LaurentPoly1 {
    /// max − min exponent; `None` for the zero polynomial.
    pub fn span(&self) -> Option<i32> {
        let lo = self.terms.keys().next()?[0];
        let hi = self.terms.keys().next_back()?[0];
        Some(hi - lo)
    }

    pub fn exponents(&self) -> impl Iterator<Item = i32> + '_ {
        self.terms.keys().map(|e| e[0])
    }

    pub fn from_i64(terms: &[(i32, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| ([e], BigInt::from(c))))
    }
}

impl LaurentPoly2 {
    pub fn from_i64(terms: &[((i32, i32), i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&((a, b), c)| ([a, b], BigInt::from(c))))
    }

    /// The representative of `±s^a t^b · self` with both minimal exponents
    /// zero and a positive lexicographically least term.
    pub fn normalized(&self) -> Self {
        let p = self.shifted_to_origin();
        match p.terms.values().next() {
            Some(c) if c.is_negative() => -p,
            _ => p,
        }
    }
}

impl<C: Coeff> Laurent<C, 1> {
    /// Representative of `u t^k · self` (u a unit) with minimal exponent zero
    /// and a canonical leading coefficient.
    pub fn normalized_univariate(&self) -> Self {
        let p = self.shifted_to_origin();
        match p.leading() {
            Some((_, c)) => {
                let u = c.normal_unit();
                p.scale(&u)
            }
            None => p,
        }
    }
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials for gcd computations

/// Dense polynomial, `coeffs[k]` the coefficient of `x^k`; no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<R> {
    coeffs: Vec<R>,
}

impl<R: Coeff> UPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lc(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero)
    }

    fn scale(&self, c: &R) -> Self {
        UPoly::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn content(&self) -> R {
        let mut g = R::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() {
            return self.clone();
        }
        UPoly::new(self.coeffs.iter().map(|x| x.exact_div(&c).expect("content divides")).collect())
    }

    /// Pseudo-remainder of `self` by `d`.
    fn prem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("nonzero divisor");
        let lcd = d.lc();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lcr = r.lc();
            let mut next: Vec<R> = r.coeffs.iter().map(|x| x.clone() * lcd.clone()).collect();
            for (k, c) in d.coeffs.iter().enumerate() {
                let idx = k + dr - dd;
                next[idx] = next[idx].clone() - lcr.clone() * c.clone();
            }
            r = UPoly::new(next);
        }
        r
    }

    fn normalize(&self) -> Self {
        let u = self.lc().normal_unit();
        self.scale(&u)
    }

    /// Primitive gcd (content ignored), canonical associate.
    pub fn primitive_gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.degree().is_some() {
            let r = a.prem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.normalize()
    }
}

impl<R: Coeff> Zero for UPoly<R> {
    fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<R: Coeff> One for UPoly<R> {
    fn one() -> Self {
        UPoly { coeffs: vec![R::one()] }
    }
}

impl<R: Coeff> Add for UPoly<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &Vec<R>, i: usize| v.get(i).cloned().unwrap_or_else(R::zero);
        UPoly::new((0..n).map(|i| get(&self.coeffs, i) + get(&o.coeffs, i)).collect())
    }
}

impl<R: Coeff> Sub for UPoly<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<R: Coeff> Neg for UPoly<R> {
    type Output = Self;
    fn neg(self) -> Self {
        UPoly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<R: Coeff> Mul for UPoly<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        UPoly::new(v)
    }
}

impl<R: Coeff> Coeff for UPoly<R> {
    fn exact_div(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let lcd = d.lc();
        let mut r = self.clone();
        let mut q = vec![R::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return None;
            }
            let c = r.lc().exact_div(&lcd)?;
            q[dr - dd] = c.clone();
            let mut next = r.coeffs.clone();
            for (k, x) in d.coeffs.iter().enumerate() {
                next[k + dr - dd] = next[k + dr - dd].clone() - c.clone() * x.clone();
            }
            r = UPoly::new(next);
        }
        Some(UPoly::new(q))
    }

    /// Full gcd including content.
    fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.normalize();
        }
        if other.is_zero() {
            return self.normalize();
        }
        let c = self.content().gcd(&other.content());
        self.primitive_gcd(other).scale(&c).normalize()
    }

    fn normal_unit(&self) -> Self {
        UPoly { coeffs: vec![self.lc().normal_unit()] }
    }
}

fn to_upoly<C: Coeff>(p: &Laurent<C, 1>) -> (i32, UPoly<C>) {
    let lo = p.min_exponents()[0];
    let hi = p.max_exponents()[0];
    let mut v = vec![C::zero(); if p.is_zero() { 0 } else { (hi - lo + 1) as usize }];
    for (e, c) in p.terms() {
        v[(e[0] - lo) as usize] = c.clone();
    }
    (lo, UPoly::new(v))
}

fn from_upoly<C: Coeff>(u: &UPoly<C>) -> Laurent<C, 1> {
    Laurent::from_terms(u.coeffs.iter().enumerate().map(|(k, c)| ([k as i32], c.clone())))
}

/// Primitive gcd of univariate Laurent polynomials, normalized with minimal
/// exponent zero. Zero inputs are skipped; the gcd of nothing is zero.
pub fn gcd_univariate<C: Coeff>(polys: &[Laurent<C, 1>]) -> Laurent<C, 1> {
    let mut g: Option<UPoly<C>> = None;
    for p in polys.iter().filter(|p| !p.is_zero()) {
        let u = to_upoly(p).1;
        g = Some(match g {
            None => u.primitive_part().normalize(),
            Some(g) => g.primitive_gcd(&u),
        });
        if g.as_ref().is_some_and(|g| g.degree() == Some(0)) {
            break;
        }
    }
    g.map(|g| from_upoly(&g)).unwrap_or_default()
}

/// `t` is the main variable; coefficients are polynomials in `s`.
fn to_bivariate(p: &LaurentPoly2) -> UPoly<UPoly<BigInt>> {
    let q = p.shifted_to_origin();
    let [hs, ht] = q.max_exponents();
    let mut rows = vec![vec![BigInt::zero(); hs as usize + 1]; if q.is_zero() { 0 } else { ht as usize + 1 }];
    for (e, c) in q.terms() {
        rows[e[1] as usize][e[0] as usize] = c.clone();
    }
    UPoly::new(rows.into_iter().map(UPoly::new).collect())
}

fn from_bivariate(u: &UPoly<UPoly<BigInt>>) -> LaurentPoly2 {
    let mut p = LaurentPoly2::zero();
    for (j, row) in u.coeffs.iter().enumerate() {
        for (i, c) in row.coeffs.iter().enumerate() {
            p.add_term([i as i32, j as i32], c.clone());
        }
    }
    p
}

/// Gcd in `ℚ[s^±1, t^±1]` scaled to a primitive integer polynomial, in
/// normalized form. Zero inputs are skipped.
pub fn gcd_bivariate(polys: &[LaurentPoly2]) -> LaurentPoly2 {
    let mut g: Option<UPoly<UPoly<BigInt>>> = None;
    for p in polys.iter().filter(|p| !p.is_zero()) {
        let u = to_bivariate(p);
        g = Some(match g {
            None => u,
            Some(g) => g.gcd(&u),
        });
        // drop the integer content and any monomial factor as we go
        let h = from_bivariate(g.as_ref().unwrap());
        let h = primitive2(&h).shifted_to_origin();
        if h.is_one() {
            return h;
        }
        g = Some(to_bivariate(&h));
    }
    g.map(|g| primitive2(&from_bivariate(&g)).normalized()).unwrap_or_default()
}

fn primitive2(p: &LaurentPoly2) -> LaurentPoly2 {
    let mut c = BigInt::zero();
    for (_, x) in p.terms() {
        c = Integer::gcd(&c, x);
    }
    if c.is_zero() || c.is_one() {
        p.clone()
    } else {
        p.map_coeffs(|x| x / &c)
    }
}

// ---------------------------------------------------------------------------
// Determinants

pub type Matrix<C, const V: usize> = Vec<Vec<Laurent<C, V>>>;

/// Fraction-free Bareiss elimination. Pivots are chosen with the fewest
/// terms in the current column.
pub fn det_bareiss<C: Coeff, const V: usize>(m: &Matrix<C, V>) -> Laurent<C, V> {
    let n = m.len();
    if n == 0 {
        return Laurent::one();
    }
    let mut a = m.clone();
    let mut sign_neg = false;
    let mut prev = Laurent::<C, V>::one();
    for k in 0..n {
        let piv = (k..n).filter(|&i| !a[i][k].is_zero()).min_by_key(|&i| a[i][k].len());
        let Some(piv) = piv else { return Laurent::zero() };
        if piv != k {
            a.swap(piv, k);
            sign_neg = !sign_neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Laurent::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign_neg {
        -d
    } else {
        d
    }
}

/// Removes row `r` and column `c`.
pub fn minor<T: Clone>(m: &[Vec<T>], r: usize, c: usize) -> Vec<Vec<T>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Increasing `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn submatrix<T: Clone>(m: &[Vec<T>], rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn det_cofactor<C: Coeff, const V: usize>(m: &Matrix<C, V>) -> Laurent<C, V> {
        let n = m.len();
        if n == 0 {
            return Laurent::one();
        }
        let mut acc = Laurent::zero();
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let t = &m[0][j] * &det_cofactor(&minor(m, 0, j));
            acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
        }
        acc
    }

    fn p1(t: &[(i32, i64)]) -> LaurentPoly1 {
        LaurentPoly1::from_i64(t)
    }

    #[test]
    fn arithmetic() {
        let a = p1(&[(1, 1), (-1, 1)]);
        let sq = &a * &a;
        assert_eq!(sq, p1(&[(2, 1), (0, 2), (-2, 1)]));
        assert_eq!(sq.exact_div(&a), Some(a.clone()));
        assert_eq!(p1(&[(0, 1), (1, 1)]).exact_div(&p1(&[(0, 2)])), None);
        assert_eq!(p1(&[(3, 1)]).exact_div(&p1(&[(0, 1), (1, 1)])), None);
        assert_eq!(sq.span(), Some(4));
        assert_eq!(sq.to_string(), "A^-2+2+A^2");
        assert_eq!(LaurentPoly1::zero().to_string(), "0");
        assert_eq!((-&a).to_string(), "-A^-1-A");
    }

    #[test]
    fn json_rows() {
        let a = p1(&[(-4, -1), (2, 1), (0, 1)]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[-4,-1],[0,1],[2,1]]");
        assert_eq!(serde_json::from_str::<LaurentPoly1>(&s).unwrap(), a);
    }

    #[test]
    fn normalized_two_variable() {
        let p = LaurentPoly2::from_i64(&[((-1, 2), -3), ((0, 0), 1)]);
        let n = p.normalized();
        assert_eq!(n, LaurentPoly2::from_i64(&[((0, 2), 3), ((1, 0), -1)]));
        assert_eq!(n.to_string(), "3*t^2-s");
    }

    #[test]
    fn gauss_gcd_and_units() {
        let a = Complex::new(BigInt::from(3), BigInt::from(1));
        let b = Complex::new(BigInt::from(1), BigInt::from(1));
        // 3+i = (1+i)(2-i)
        let g = a.gcd(&b);
        assert_eq!(g, Complex::new(BigInt::from(1), BigInt::from(1)));
        let q = a.exact_div(&b).unwrap();
        assert_eq!(q, Complex::new(BigInt::from(2), BigInt::from(-1)));
    }

    #[test]
    fn univariate_gcd() {
        // (1 + t)(2 + t^2) and (1 + t)(3 - t)
        let f = p1(&[(0, 2), (1, 2), (2, 1), (3, 1)]);
        let g = p1(&[(0, 3), (1, 2), (2, -1)]);
        assert_eq!(gcd_univariate(&[f.shift([-5]), g.scale(&BigInt::from(6))]), p1(&[(0, 1), (1, 1)]));
        assert_eq!(gcd_univariate(&[p1(&[(0, 4)]), p1(&[(3, 6)])]), p1(&[(0, 1)]));
        assert!(gcd_univariate::<BigInt>(&[]).is_zero());
    }

    #[test]
    fn bivariate_gcd() {
        let s = LaurentPoly2::var_pow(0, 1);
        let t = LaurentPoly2::var_pow(1, 1);
        let one = LaurentPoly2::one();
        // (s^-1 - t - 1) times two different cofactors
        let common = &(&LaurentPoly2::var_pow(0, -1) - &t) - &one;
        let a = &common * &(&(&s * &t) + &LaurentPoly2::constant(BigInt::from(2)));
        let b = &common * &(&(&s * &s) - &t).scale(&BigInt::from(4));
        let g = gcd_bivariate(&[a, b]);
        assert_eq!(g, common.normalized());
        assert_eq!(gcd_bivariate(&[s.clone(), t.clone()]), one);
    }

    fn arb_poly2() -> impl Strategy<Value = LaurentPoly2> {
        prop::collection::vec(((-2i32..3, -2i32..3), -3i64..4), 0..4)
            .prop_map(|v| LaurentPoly2::from_i64(&v))
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = Matrix<BigInt, 2>> {
        prop::collection::vec(prop::collection::vec(arb_poly2(), n), n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bareiss_matches_cofactor(m in (1usize..6).prop_flat_map(arb_matrix)) {
            prop_assert_eq!(det_bareiss(&m), det_cofactor(&m));
        }

        #[test]
        fn exact_division_roundtrip(a in arb_poly2(), b in arb_poly2()) {
            prop_assume!(!b.is_zero());
            let prod = &a * &b;
            prop_assert_eq!(prod.exact_div(&b), Some(a));
        }

        #[test]
        fn gcd_divides_both(a in arb_poly2(), b in arb_poly2(), c in arb_poly2()) {
            prop_assume!(!c.is_zero() && !a.is_zero() && !b.is_zero());
            let x = &a * &c;
            let y = &b * &c;
            let g = gcd_bivariate(&[x.clone(), y.clone()]);
            // the common factor divides the gcd up to integer content
            let pc = primitive2(&c);
            prop_assert!(g.exact_div(&pc).is_some(), "{:?} !| {:?}", pc, g);
            prop_assert!(x.scale(&BigInt::from(1)).exact_div(&g).is_some() || primitive2(&x).exact_div(&g).is_some());
        }
    }

    #[test]
    fn mod_det_matches() {
        let m = vec![vec![3u64, 1], vec![4, 2]];
        assert_eq!(det_mod(m, 7), 2);
        let p = p1(&[(-1, 2), (2, 3)]);
        // 2/5 + 3*25 mod 101
        let v = p.eval_mod([5], 101, 0);
        assert_eq!(v, (2 * inv_mod(5, 101) + 75) % 101);
    }
}
