//! The quaternionic biquandle. Labels live in a left module over
//! `ℍ_ℤ[t^±1]` with `t` central, and the switch is
//! `S = ((1+i, jt), (−jt⁻¹, 1+i))`, read as `S(a,b) = (b_a, a^b)`:
//!
//! `a^b = −jt⁻¹a + (1+i)b`, `a_b = jta + (1+i)b`,
//! `a^b̄ = −jta + (1−i)b`, `a_b̄ = jt⁻¹a + (1−i)b`.
//!
//! At `t = −1` these are `a^b = ja + (1+i)b`, `a_b = −ja + (1+i)b` and the
//! barred forms with `1−i`.
//!
//! Determinants go through the complex adjoint: `q = z + wj` becomes the
//! block `((z, w), (−w̄, z̄))` over Gaussian-integer Laurent polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alexander::{presentation, CrossingForm, PresentationError};
use crate::code::{GaussCode, Sign};
use crate::poly::{det_bareiss, gcd_univariate, minor, GaussInt, GaussLaurent, LaurentPoly1, Matrix};

/// `w + xi + yj + zk` with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct IntegerQuaternion {
    pub w: i64,
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl IntegerQuaternion {
    pub const ZERO: Self = Self::new(0, 0, 0, 0);
    pub const ONE: Self = Self::new(1, 0, 0, 0);
    pub const I: Self = Self::new(0, 1, 0, 0);
    pub const J: Self = Self::new(0, 0, 1, 0);
    pub const K: Self = Self::new(0, 0, 0, 1);

    pub const fn new(w: i64, x: i64, y: i64, z: i64) -> Self {
        IntegerQuaternion { w, x, y, z }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm(&self) -> i64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// `(z, w)` with `self = z + w·j`.
    pub fn complex_pair(&self) -> (GaussInt, GaussInt) {
        (Complex::new(BigInt::from(self.w), BigInt::from(self.x)), Complex::new(BigInt::from(self.y), BigInt::from(self.z)))
    }

    fn scaled(&self, c: i64) -> Self {
        Self::new(c * self.w, c * self.x, c * self.y, c * self.z)
    }
}

impl Add for IntegerQuaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for IntegerQuaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for IntegerQuaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scaled(-1)
    }
}

impl Mul for IntegerQuaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Self::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl fmt::Display for IntegerQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

/// Laurent polynomial in the central variable `t` with quaternion
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QuatLaurent {
    terms: BTreeMap<i32, IntegerQuaternion>,
}

impl QuatLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(q: IntegerQuaternion) -> Self {
        Self::monomial(0, q)
    }

    pub fn monomial(e: i32, q: IntegerQuaternion) -> Self {
        let mut p = Self::zero();
        p.add_term(e, q);
        p
    }

    pub fn add_term(&mut self, e: i32, q: IntegerQuaternion) {
        let v = *self.terms.get(&e).unwrap_or(&IntegerQuaternion::ZERO) + q;
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, IntegerQuaternion)> + '_ {
        self.terms.iter().map(|(e, q)| (*e, *q))
    }

    pub fn coeff(&self, e: i32) -> IntegerQuaternion {
        self.terms.get(&e).copied().unwrap_or_default()
    }

    /// The coefficients summed, i.e. the value at `t = 1`.
    pub fn at_one(&self) -> IntegerQuaternion {
        self.terms.values().fold(IntegerQuaternion::ZERO, |a, &q| a + q)
    }

    /// `(z, w)` parts with `self = z + w·j`, as Gaussian Laurent polynomials.
    pub fn complex_parts(&self) -> (GaussLaurent, GaussLaurent) {
        let mut z = GaussLaurent::zero();
        let mut w = GaussLaurent::zero();
        for (e, q) in self.terms() {
            let (a, b) = q.complex_pair();
            z.add_term([e], a);
            w.add_term([e], b);
        }
        (z, w)
    }
}

impl Add for &QuatLaurent {
    type Output = QuatLaurent;
    fn add(self, o: &QuatLaurent) -> QuatLaurent {
        let mut r = self.clone();
        for (e, q) in o.terms() {
            r.add_term(e, q);
        }
        r
    }
}

impl Sub for &QuatLaurent {
    type Output = QuatLaurent;
    fn sub(self, o: &QuatLaurent) -> QuatLaurent {
        self + &-o
    }
}

impl Neg for &QuatLaurent {
    type Output = QuatLaurent;
    fn neg(self) -> QuatLaurent {
        QuatLaurent { terms: self.terms.iter().map(|(e, q)| (*e, -*q)).collect() }
    }
}

impl Mul for &QuatLaurent {
    type Output = QuatLaurent;
    fn mul(self, o: &QuatLaurent) -> QuatLaurent {
        let mut r = QuatLaurent::zero();
        for (e1, q1) in self.terms() {
            for (e2, q2) in o.terms() {
                r.add_term(e1 + e2, q1 * q2);
            }
        }
        r
    }
}

impl fmt::Display for QuatLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms().map(|(e, q)| format!("({q})*t^{e}")).collect();
        f.write_str(&parts.join("+"))
    }
}

impl Serialize for QuatLaurent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.terms().map(|(e, q)| (e, [q.w, q.x, q.y, q.z])).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuatLaurent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<(i32, [i64; 4])>::deserialize(d)?;
        let mut p = QuatLaurent::zero();
        for (e, [w, x, y, z]) in rows {
            p.add_term(e, IntegerQuaternion::new(w, x, y, z));
        }
        Ok(p)
    }
}

pub type QuatMatrix = Vec<Vec<QuatLaurent>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuatError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("matrix is not square")]
    NotSquare,
    #[error("a Study determinant has non-integral coefficients: {0}")]
    NonIntegral(String),
}

fn q(w: i64, x: i64, y: i64, z: i64, e: i32) -> QuatLaurent {
    QuatLaurent::monomial(e, IntegerQuaternion::new(w, x, y, z))
}

/// Crossing forms `u_out = A·u_in + B·o_in`, `o_out = C·u_in + D·o_in`.
pub fn quaternion_form(sign: Sign) -> CrossingForm<QuatLaurent> {
    match sign {
        Sign::Pos => [[q(0, 0, -1, 0, -1), q(1, 1, 0, 0, 0)], [q(1, 1, 0, 0, 0), q(0, 0, 1, 0, 1)]],
        Sign::Neg => [[q(0, 0, -1, 0, 1), q(1, -1, 0, 0, 0)], [q(1, -1, 0, 0, 0), q(0, 0, 1, 0, -1)]],
    }
}

pub fn quaternionic_relations(code: &GaussCode) -> Result<QuatMatrix, PresentationError> {
    if code.chord_count() == 0 {
        return Err(PresentationError::EmptyCode);
    }
    let minus_one = QuatLaurent::constant(-IntegerQuaternion::ONE);
    Ok(presentation(code, &QuatLaurent::zero(), &minus_one, |a, b| a + b, quaternion_form))
}

/// The complex adjoint of a quaternionic matrix.
pub fn complex_adjoint(m: &QuatMatrix) -> Matrix<GaussInt, 1> {
    let d = m.len();
    let mut out = vec![vec![GaussLaurent::zero(); 2 * d]; 2 * d];
    let conj = |p: &GaussLaurent| p.map_coeffs(|c| c.conj());
    for (r, row) in m.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            let (z, w) = x.complex_parts();
            out[2 * r][2 * c] = z.clone();
            out[2 * r][2 * c + 1] = w.clone();
            out[2 * r + 1][2 * c] = -conj(&w);
            out[2 * r + 1][2 * c + 1] = conj(&z);
        }
    }
    out
}

/// The Study determinant: the determinant of the complex adjoint.
pub fn study_det(m: &QuatMatrix) -> GaussLaurent {
    det_bareiss(&complex_adjoint(m))
}

fn integral(p: &GaussLaurent) -> Result<LaurentPoly1, QuatError> {
    if p.terms().any(|(_, c)| !c.im.is_zero()) {
        return Err(QuatError::NonIntegral(p.to_text(["t"])));
    }
    Ok(p.map_coeffs(|c| c.re.clone()))
}

/// Gcd of the Study determinants of all codimension-1 minors, as a
/// primitive integer polynomial in `t` with minimal exponent zero and
/// positive leading coefficient.
///
/// This is a property of the matrix, not of the knot: these minors are a
/// subset of the codimension-2 minors of the complex adjoint, and their gcd
/// can drop under a second Reidemeister move (see the tests).
pub fn codim1_gcd(m: &QuatMatrix) -> Result<LaurentPoly1, QuatError> {
    let d = m.len();
    if m.iter().any(|r| r.len() != d) {
        return Err(QuatError::NotSquare);
    }
    if d < 2 {
        return Ok(LaurentPoly1::one());
    }
    let dets: Vec<LaurentPoly1> = (0..d * d)
        .into_par_iter()
        .map(|k| integral(&study_det(&minor(m, k / d, k % d))))
        .collect::<Result<_, _>>()?;
    Ok(gcd_univariate(&dets).normalized_univariate())
}

/// Study determinant of the presentation matrix and the codimension-1 gcd.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionReport {
    pub study_det: LaurentPoly1,
    pub codim1_gcd: LaurentPoly1,
}

impl QuaternionReport {
    pub fn study_det_text(&self) -> String {
        self.study_det.to_text(["t"])
    }

    pub fn codim1_gcd_text(&self) -> String {
        self.codim1_gcd.to_text(["t"])
    }
}

/// Both quaternionic invariants of a knot code, normalized. A code without
/// crossings presents a free module of rank one: determinant 0, gcd 1.
pub fn quaternion_invariants(code: &GaussCode) -> Result<QuaternionReport, QuatError> {
    if code.chord_count() == 0 {
        return Ok(QuaternionReport { study_det: LaurentPoly1::zero(), codim1_gcd: LaurentPoly1::one() });
    }
    let m = quaternionic_relations(code)?;
    if m.iter().any(|r| r.len() != m.len()) {
        return Err(QuatError::NotSquare);
    }
    let det = integral(&study_det(&m))?.normalized_univariate();
    Ok(QuaternionReport { study_det: det, codim1_gcd: codim1_gcd(&m)? })
}

impl One for IntegerQuaternion {
    fn one() -> Self {
        Self::ONE
    }
}

impl Zero for IntegerQuaternion {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteBirack;
    use crate::code::parse_gauss;
    use crate::poly::pow_mod;
    use IntegerQuaternion as Q;

    #[test]
    fn unit_products() {
        let (one, i, j, k) = (Q::ONE, Q::I, Q::J, Q::K);
        assert_eq!(i * i, -one);
        assert_eq!(j * j, -one);
        assert_eq!(k * k, -one);
        assert_eq!(i * j * k, -one);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(j * k, i);
        assert_eq!(k * j, -i);
        assert_eq!(k * i, j);
        assert_eq!(i * k, -j);
        assert_eq!(Q::new(1, 1, 0, 0).to_string(), "1+1i+0j+0k");
    }

    #[test]
    fn t_is_central() {
        let t = QuatLaurent::monomial(1, Q::ONE);
        for x in [Q::I, Q::J, Q::K, Q::new(2, -1, 3, 5)] {
            let c = QuatLaurent::monomial(-2, x);
            assert_eq!(&t * &c, &c * &t);
        }
    }

    #[test]
    fn study_det_small_cases() {
        assert!(study_det(&vec![]).is_one());
        let m = vec![vec![QuatLaurent::constant(Q::new(1, 1, 0, 0))]];
        assert_eq!(study_det(&m), GaussLaurent::constant(Complex::new(BigInt::from(2), BigInt::zero())));
        // the Study determinant of a single quaternion is its squared norm
        let m = vec![vec![QuatLaurent::constant(Q::new(1, 2, 3, 4))]];
        assert_eq!(integral(&study_det(&m)).unwrap(), LaurentPoly1::from_i64(&[(0, 30)]));
        let one = QuatLaurent::constant(Q::ONE);
        let id = vec![vec![one.clone(), QuatLaurent::zero()], vec![QuatLaurent::zero(), one]];
        assert!(codim1_gcd(&id).unwrap().is_one());
    }

    #[test]
    fn adjoint_is_multiplicative() {
        let a = Q::new(1, -2, 3, 1);
        let b = Q::new(0, 4, -1, 2);
        let ca = complex_adjoint(&vec![vec![QuatLaurent::constant(a)]]);
        let cb = complex_adjoint(&vec![vec![QuatLaurent::constant(b)]]);
        let cab = complex_adjoint(&vec![vec![QuatLaurent::constant(a * b)]]);
        for r in 0..2 {
            for c in 0..2 {
                let v = &(&ca[r][0] * &cb[0][c]) + &(&ca[r][1] * &cb[1][c]);
                assert_eq!(v, cab[r][c]);
            }
        }
    }

    #[test]
    fn curl_matrix_entries() {
        let m = quaternionic_relations(&parse_gauss("O1+,U1+").unwrap()).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|r| r.len() == 2));
        // at t = 1 the (1,i) parts of the entries form a complex matrix
        let complex: Vec<Vec<(i64, i64)>> =
            m.iter().map(|r| r.iter().map(|x| (x.at_one().w, x.at_one().x)).collect()).collect();
        assert_eq!(complex.len(), 2);
    }

    /// Quaternions over `ℤ/3` with `t` specialized, as a finite biquandle of
    /// order 81 checked against the literal axioms.
    #[test]
    fn switch_is_a_biquandle_mod_three() {
        let p = 3i64;
        let label = |v: Q| -> usize {
            let r = |x: i64| x.rem_euclid(p) as usize;
            ((r(v.w) * 3 + r(v.x)) * 3 + r(v.y)) * 3 + r(v.z)
        };
        let elem = |n: usize| Q::new((n / 27) as i64, (n / 9 % 3) as i64, (n / 3 % 3) as i64, (n % 3) as i64);
        for t0 in [1i64, 2] {
            let tinv = pow_mod(t0 as u64, 1, 3) as i64; // t0 is its own inverse mod 3
            let at = |x: &QuatLaurent| -> Q {
                x.terms().fold(Q::ZERO, |acc, (e, c)| acc + c.scaled(if e >= 0 { t0.pow(e as u32) } else { tinv.pow((-e) as u32) }))
            };
            let pos = quaternion_form(Sign::Pos).map(|r| r.map(|x| at(&x)));
            let neg = quaternion_form(Sign::Neg).map(|r| r.map(|x| at(&x)));
            let table = |f: &dyn Fn(Q, Q) -> Q| -> Vec<Vec<usize>> {
                (0..81).map(|a| (0..81).map(|b| label(f(elem(a), elem(b)))).collect()).collect()
            };
            // a^b and a_b read off from u_out(a, b) and o_out(b, a)
            let b = FiniteBirack::new(
                table(&|a, b| pos[0][0] * a + pos[0][1] * b),
                table(&|a, b| pos[1][0] * b + pos[1][1] * a),
                table(&|a, b| neg[0][0] * a + neg[0][1] * b),
                table(&|a, b| neg[1][0] * b + neg[1][1] * a),
            )
            .unwrap();
            assert!(b.is_biquandle, "t = {t0}");
        }
    }

    #[test]
    fn codim1_gcd_changes_under_a_second_move() {
        use crate::moves::{apply_move, Move};
        let k = parse_gauss("U1+,O2-,O1+,U2-,O3-,U4+,U3-,O4+").unwrap();
        let m = Move::R2Plus { over_at: (0, 6), under_at: (0, 3), sign: Sign::Neg, antiparallel: false, under_first: false };
        let k2 = apply_move(&k, &m).unwrap();
        let (a, b) = (quaternion_invariants(&k).unwrap(), quaternion_invariants(&k2).unwrap());
        assert_eq!(a.codim1_gcd_text(), "2+5*t^2+2*t^4");
        assert_eq!(b.codim1_gcd_text(), "1");
        assert_eq!(a.study_det, b.study_det);
    }
}
