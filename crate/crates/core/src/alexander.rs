//! The Alexander biquandle over `ℤ[s^±1, t^±1]`:
//! `a^b = ta + (1−st)b`, `a_b = sa`, `a^b̄ = t⁻¹a + (1−s⁻¹t⁻¹)b`, `a_b̄ = s⁻¹a`.
//!
//! A diagram presents a module with one generator per edge and two
//! relations per crossing. With the coloring rule of [`crate::algebra`]
//! a positive crossing with under-input `a` and over-input `b` gives
//! `u_out = a^b` and `o_out = b_a`.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{EdgeLayout, GaussCode, Sign};
use crate::poly::{det_bareiss, gcd_bivariate, submatrix, subsets, LaurentPoly2, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("the code has no crossings")]
    EmptyCode,
}

/// Linear crossing data: `u_out = m[0][0]·u_in + m[0][1]·o_in` and
/// `o_out = m[1][0]·u_in + m[1][1]·o_in`, coefficients acting on the left.
pub(crate) type CrossingForm<T> = [[T; 2]; 2];

/// Builds the presentation matrix, rows two per crossing in order of first
/// passage and columns the edges in code position order. Each row reads
/// `coefficients · inputs − output`.
pub(crate) fn presentation<T: Clone>(
    code: &GaussCode,
    zero: &T,
    minus_one: &T,
    add: impl Fn(&T, &T) -> T,
    form: impl Fn(Sign) -> CrossingForm<T>,
) -> Vec<Vec<T>> {
    let layout = EdgeLayout::new(code);
    let mut chords: Vec<_> = code.chord_table().into_iter().enumerate().collect();
    chords.sort_by_key(|&(_, (o, u))| o.min(u));
    let cols = layout.edge_count();
    let mut rows = Vec::with_capacity(2 * chords.len());
    for (k, (o, u)) in chords {
        let f = form(code.sign(k + 1));
        let (ui, oi) = (layout.in_edge(u), layout.in_edge(o));
        let outs = [layout.out_edge(u), layout.out_edge(o)];
        for r in 0..2 {
            let mut row = vec![zero.clone(); cols];
            row[ui] = add(&row[ui], &f[r][0]);
            row[oi] = add(&row[oi], &f[r][1]);
            row[outs[r]] = add(&row[outs[r]], minus_one);
            rows.push(row);
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMatrix {
    pub entries: Matrix<BigInt, 2>,
}

impl RelationMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }
}

fn s_pow(e: i32) -> LaurentPoly2 {
    LaurentPoly2::monomial([e, 0], BigInt::from(1))
}

fn t_pow(e: i32) -> LaurentPoly2 {
    LaurentPoly2::monomial([0, e], BigInt::from(1))
}

/// The Alexander biquandle crossing forms.
pub fn alexander_form(sign: Sign) -> CrossingForm<LaurentPoly2> {
    let e = sign.value() as i32;
    let one = LaurentPoly2::one();
    let st = &s_pow(e) * &t_pow(e);
    [[t_pow(e), &one - &st], [LaurentPoly2::zero(), s_pow(e)]]
}

pub fn relation_matrix(code: &GaussCode) -> Result<RelationMatrix, PresentationError> {
    if code.chord_count() == 0 {
        return Err(PresentationError::EmptyCode);
    }
    let entries = presentation(code, &LaurentPoly2::zero(), &-LaurentPoly2::one(), |a, b| a + b, alexander_form);
    Ok(RelationMatrix { entries })
}

/// `G_K(s,t)` in canonical form. Codes without crossings give 0, as do
/// links with a crossingless component (a free generator).
pub fn generalized_alexander(code: &GaussCode) -> LaurentPoly2 {
    match relation_matrix(code) {
        Ok(m) if m.is_square() => det_bareiss(&m.entries).normalized(),
        _ => LaurentPoly2::zero(),
    }
}

/// Gcd of all `(d−k)`-minors of a `d×d` relation matrix, canonically
/// normalized. Minors are evaluated in parallel.
pub fn elementary_ideal_gcd(m: &RelationMatrix, k: usize) -> LaurentPoly2 {
    let d = m.rows().min(m.cols());
    assert!(k < d || d == 0, "codimension must be below the dimension");
    if d == 0 {
        return LaurentPoly2::one();
    }
    let size = d - k;
    let rows = subsets(m.rows(), size);
    let cols = subsets(m.cols(), size);
    let dets: Vec<LaurentPoly2> = rows
        .par_iter()
        .flat_map_iter(|r| cols.iter().map(move |c| (r, c)))
        .map(|(r, c)| det_bareiss(&submatrix(&m.entries, r, c)))
        .filter(|p| !p.is_zero())
        .collect();
    gcd_bivariate(&dets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteBirack;
    use crate::code::parse_gauss;
    use crate::poly::{det_mod, pow_mod, tests::det_cofactor};

    fn p(s: &str) -> GaussCode {
        parse_gauss(s).unwrap()
    }

    #[test]
    fn curl_and_virtual_trefoil_shapes() {
        let m = relation_matrix(&p("O1+,U1+")).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        let vt = relation_matrix(&p("O1+,O2+,U1+,U2+")).unwrap();
        assert_eq!((vt.rows(), vt.cols()), (4, 4));
        assert_eq!(relation_matrix(&GaussCode::unknot()), Err(PresentationError::EmptyCode));
    }

    #[test]
    fn rows_specialize_to_differences() {
        // at s = t = 1 every relation reads input − output
        for code in ["O1+,U2-,O3+,U1+,O2-,U3+", "O1+,O2+,U1+,U2+", "O1-,U2+|U1-,O2+"] {
            let m = relation_matrix(&p(code)).unwrap();
            for row in &m.entries {
                let vals: Vec<u64> = row.iter().map(|x| x.eval_mod([1, 1], 101, 0)).collect();
                let plus = vals.iter().filter(|&&v| v == 1).count();
                let minus = vals.iter().filter(|&&v| v == 100).count();
                let sum = vals.iter().sum::<u64>() % 101;
                assert_eq!(sum, 0);
                assert!(plus <= 1 && minus <= 1);
            }
        }
    }

    #[test]
    fn classical_knots_vanish() {
        assert!(generalized_alexander(&p("O1+,U2+,O3+,U1+,O2+,U3+")).is_zero());
        assert!(generalized_alexander(&p("O1-,U2+,O3+,U1-,O4-,U3+,O2+,U4-")).is_zero());
        assert!(generalized_alexander(&GaussCode::unknot()).is_zero());
    }

    #[test]
    fn virtual_trefoil_matches_cofactor_oracle() {
        let m = relation_matrix(&p("O1+,O2+,U1+,U2+")).unwrap();
        let g = generalized_alexander(&p("O1+,O2+,U1+,U2+"));
        assert!(!g.is_zero());
        assert_eq!(det_cofactor(&m.entries).normalized(), g);
    }

    #[test]
    fn identity_and_top_codimension() {
        let one = LaurentPoly2::one();
        let zero = LaurentPoly2::zero();
        let id = RelationMatrix { entries: vec![vec![one.clone(), zero.clone()], vec![zero, one]] };
        assert!(elementary_ideal_gcd(&id, 1).is_one());
        let m = relation_matrix(&p("O1+,O2+,U1+,U2+")).unwrap();
        let entries: Vec<LaurentPoly2> = m.entries.iter().flatten().cloned().collect();
        assert_eq!(elementary_ideal_gcd(&m, 3), gcd_bivariate(&entries));
    }

    #[test]
    fn specialization_commutes_with_determinant() {
        let p_ = 1_000_003u64;
        for code in ["O1+,O2+,U1+,U2+", "O1-,O2-,U1-,U2-", "O1+,U2-,O3+,O2-,U1+,U3+"] {
            let m = relation_matrix(&p(code)).unwrap();
            let g = det_bareiss(&m.entries);
            for (s0, t0) in [(2, 3), (5, 7), (11, 13)] {
                let num: Vec<Vec<u64>> =
                    m.entries.iter().map(|r| r.iter().map(|x| x.eval_mod([s0, t0], p_, 0)).collect()).collect();
                assert_eq!(det_mod(num, p_), g.eval_mod([s0, t0], p_, 0));
            }
        }
    }

    #[test]
    fn finite_alexander_biquandles_pass_the_axioms() {
        for (m, s, t) in [(5u64, 2u64, 3u64), (7, 3, 5), (5, 4, 4)] {
            let si = pow_mod(s, m - 2, m);
            let ti = pow_mod(t, m - 2, m);
            let table = |f: &dyn Fn(u64, u64) -> u64| -> Vec<Vec<usize>> {
                (0..m).map(|a| (0..m).map(|b| f(a, b) as usize).collect()).collect()
            };
            let b = FiniteBirack::new(
                table(&|a, b| (t * a + (1 + m * m - s * t % m) * b) % m),
                table(&|a, _| s * a % m),
                table(&|a, b| (ti * a + (1 + m * m - si * ti % m) * b) % m),
                table(&|a, _| si * a % m),
            )
            .unwrap();
            assert!(b.is_biquandle && b.is_strong);
        }
    }
}
