//! The Kauffman bracket by state sum on the chord diagram, the normalized
//! f-polynomial, the atom of a diagram, and the span estimate.
//!
//! A smoothing reconnects the four half-edges at a crossing in pairs. The
//! oriented smoothing joins (over-in, under-out) and (under-in, over-out);
//! the other one joins (over-in, under-in) and (over-out, under-out). At a
//! positive crossing the A-smoothing is the oriented one, at a negative
//! crossing it is the other. Virtual crossings never enter.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeKind, EdgeLayout, GaussCode, Sign};
use crate::poly::LaurentPoly1;
use crate::surface::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateSumError {
    #[error("the bracket is zero, so its span is undefined")]
    ZeroBracket,
}

/// Half-edge slots: `2e` is the tail of edge `e`, `2e + 1` its head.
struct Frame {
    slots: usize,
    /// (over-in, over-out, under-in, under-out) slots per chord
    crossings: Vec<[usize; 4]>,
    positive: Vec<bool>,
}

impl Frame {
    fn new(code: &GaussCode) -> Self {
        let layout = EdgeLayout::new(code);
        let table = code.chord_table();
        let crossings = table
            .iter()
            .map(|&(o, u)| {
                [
                    2 * layout.in_edge(o) + 1,
                    2 * layout.out_edge(o),
                    2 * layout.in_edge(u) + 1,
                    2 * layout.out_edge(u),
                ]
            })
            .collect();
        let positive = (1..=table.len()).map(|k| code.sign(k) == Sign::Pos).collect();
        Frame { slots: 2 * layout.edge_count(), crossings, positive }
    }

    /// Number of circles when chord `k` gets the A-smoothing iff bit `k` of
    /// `state` is set.
    fn loops(&self, state: u64) -> usize {
        let mut uf = UnionFind::new(self.slots);
        for e in 0..self.slots / 2 {
            uf.union(2 * e, 2 * e + 1);
        }
        for (k, &[oi, oo, ui, uo]) in self.crossings.iter().enumerate() {
            let a = state >> k & 1 == 1;
            if a == self.positive[k] {
                uf.union(oi, uo);
                uf.union(ui, oo);
            } else {
                uf.union(oi, ui);
                uf.union(oo, uo);
            }
        }
        uf.count()
    }
}

fn delta_pow(k: usize) -> LaurentPoly1 {
    // δ = −A² − A⁻²
    LaurentPoly1::from_i64(&[(2, -1), (-2, -1)]).pow(k as u32)
}

/// `⟨K⟩` with `⟨unknot⟩ = 1`; each crossing is `A⟨A-smoothing⟩ + A⁻¹⟨B-smoothing⟩`.
pub fn bracket(code: &GaussCode) -> LaurentPoly1 {
    assert!(code.kind() != CodeKind::Free, "the bracket needs signed chords");
    let n = code.chord_count();
    assert!(n < 40, "state sum over 2^{n} states is out of reach");
    let frame = Frame::new(code);
    let slots = frame.slots;
    // hist[a][l]: states with a A-smoothings and l circles
    let max_loops = slots / 2 + n + 1;
    let states: u64 = 1 << n;
    let chunk = 1u64 << 10.min(n);
    let hist = (0..states.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut h = vec![vec![0u64; max_loops + 1]; n + 1];
            for s in c * chunk..((c + 1) * chunk).min(states) {
                h[s.count_ones() as usize][frame.loops(s)] += 1;
            }
            h
        })
        .reduce(
            || vec![vec![0u64; max_loops + 1]; n + 1],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );
    let mut out = LaurentPoly1::zero();
    for (a, row) in hist.iter().enumerate() {
        for (l, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let mono = LaurentPoly1::monomial([a as i32 * 2 - n as i32], BigInt::from(count));
            out = &out + &(&mono * &delta_pow(l - 1));
        }
    }
    out
}

/// `(−A³)^(−w) ⟨K⟩`, invariant under every move.
pub fn f_polynomial(code: &GaussCode) -> LaurentPoly1 {
    normalize_writhe(&bracket(code), code.writhe())
}

pub(crate) fn normalize_writhe(b: &LaurentPoly1, w: i64) -> LaurentPoly1 {
    let sign = if w.rem_euclid(2) == 1 { -1 } else { 1 };
    b.shift([-3 * w as i32]).scale(&BigInt::from(sign))
}

/// A genus that may be a half-integer, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_i64(self.0 / 2)
        } else {
            s.serialize_f64(self.to_f64())
        }
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let t = v * 2.0;
        if t.fract() != 0.0 {
            return Err(serde::de::Error::custom("genus must be a multiple of 1/2"));
        }
        Ok(HalfInt(t as i64))
    }
}

/// The atom of a diagram: the frame with the A-circles and B-circles capped
/// by disks (A-circles black).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomProfile {
    #[serde(rename = "sA")]
    pub s_a: usize,
    #[serde(rename = "sB")]
    pub s_b: usize,
    /// `(2 + n − sA − sB) / 2` per connected piece. On a non-orientable atom
    /// this is half the non-orientable genus and can be a half-integer.
    pub atom_genus: HalfInt,
    pub orientable: bool,
}

pub fn atom_profile(code: &GaussCode) -> AtomProfile {
    let n = code.chord_count();
    let frame = Frame::new(code);
    let all_a = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let s_a = frame.loops(all_a);
    let s_b = frame.loops(0);
    let pieces = frame_pieces(code);
    AtomProfile {
        s_a,
        s_b,
        atom_genus: HalfInt(2 * pieces as i64 + n as i64 - s_a as i64 - s_b as i64),
        orientable: source_sink(code),
    }
}

/// Connected pieces of the frame; a chordless component is its own piece.
fn frame_pieces(code: &GaussCode) -> usize {
    let n = code.chord_count();
    let comps = code.component_count();
    let mut uf = UnionFind::new(n + comps);
    for (c, comp) in code.components().iter().enumerate() {
        for t in comp {
            uf.union(n + c, t.chord - 1);
        }
    }
    uf.count()
}

/// Whether the frame admits a source-sink orientation: along each strand
/// the two half-edges at a crossing both point in or both point out, and
/// the two strands at a crossing do opposite things.
///
/// With `b(e)` recording whether the orientation of edge `e` agrees with
/// the direction of travel, the first condition flips `b` at every passage
/// and the second asks `b(in(over)) ≠ b(in(under))`.
fn source_sink(code: &GaussCode) -> bool {
    let layout = EdgeLayout::new(code);
    let m = layout.edge_count();
    // parity union-find on 2m nodes: e and e + m (its negation)
    let mut uf = UnionFind::new(2 * m);
    let constrain_diff = |uf: &mut UnionFind, a: usize, b: usize| {
        uf.union(a, b + m);
        uf.union(a + m, b);
    };
    for (c, comp) in code.components().iter().enumerate() {
        for i in 0..comp.len() {
            let p = (c, i);
            constrain_diff(&mut uf, layout.in_edge(p), layout.out_edge(p));
        }
    }
    for (o, u) in code.chord_table() {
        constrain_diff(&mut uf, layout.in_edge(o), layout.in_edge(u));
    }
    (0..m).all(|e| uf.find(e) != uf.find(e + m))
}

/// (span, bound, holds) for `span⟨K⟩ ≤ 4n − 4g` with `g` the atom genus.
pub fn span_bound_check(code: &GaussCode) -> Result<(i64, i64, bool), StateSumError> {
    let b = bracket(code);
    let span = b.span().ok_or(StateSumError::ZeroBracket)? as i64;
    let g = atom_profile(code).atom_genus;
    let bound = 4 * code.chord_count() as i64 - 2 * g.twice();
    Ok((span, bound, span <= bound))
}

/// Everything the state sum knows about a code, in report form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSumReport {
    pub bracket: LaurentPoly1,
    pub f: LaurentPoly1,
    pub writhe: i64,
    #[serde(rename = "sA")]
    pub s_a: usize,
    #[serde(rename = "sB")]
    pub s_b: usize,
    pub atom_genus: HalfInt,
    pub orientable: bool,
    pub span: Option<i64>,
    pub bound: i64,
}

pub fn state_sum_report(code: &GaussCode) -> StateSumReport {
    let b = bracket(code);
    let atom = atom_profile(code);
    let w = code.writhe();
    StateSumReport {
        f: normalize_writhe(&b, w),
        writhe: w,
        s_a: atom.s_a,
        s_b: atom.s_b,
        atom_genus: atom.atom_genus,
        orientable: atom.orientable,
        span: b.span().map(i64::from),
        bound: 4 * code.chord_count() as i64 - 2 * atom.atom_genus.twice(),
        bracket: b,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::code::{parse_gauss, Passage};

    /// Independent state sum: every state is traced circle by circle through
    /// explicit neighbor tables over token positions.
    pub(crate) fn bracket_oracle(code: &GaussCode) -> LaurentPoly1 {
        let comps = code.components();
        // node (c, i, end): end 0 = arriving at token i, 1 = leaving it
        let idx = |c: usize, i: usize, end: usize| -> usize {
            let before: usize = comps[..c].iter().map(|x| 2 * x.len().max(1)).sum();
            before + 2 * i + end
        };
        let total: usize = comps.iter().map(|x| 2 * x.len().max(1)).sum();
        // along-edge partner: leaving i is joined to arriving at i + 1
        let mut along = vec![0; total];
        for (c, comp) in comps.iter().enumerate() {
            let len = comp.len();
            if len == 0 {
                along[idx(c, 0, 0)] = idx(c, 0, 1);
                along[idx(c, 0, 1)] = idx(c, 0, 0);
                continue;
            }
            for i in 0..len {
                let a = idx(c, i, 1);
                let b = idx(c, (i + 1) % len, 0);
                along[a] = b;
                along[b] = a;
            }
        }
        let n = code.chord_count();
        let mut over = vec![(0, 0); n];
        let mut under = vec![(0, 0); n];
        for (c, comp) in comps.iter().enumerate() {
            for (i, t) in comp.iter().enumerate() {
                if t.passage == Passage::Over {
                    over[t.chord - 1] = (c, i);
                } else {
                    under[t.chord - 1] = (c, i);
                }
            }
        }
        let mut out = LaurentPoly1::zero();
        for state in 0u64..1 << n {
            let mut across = vec![usize::MAX; total];
            for c in 0..comps.len() {
                if comps[c].is_empty() {
                    across[idx(c, 0, 0)] = idx(c, 0, 1);
                    across[idx(c, 0, 1)] = idx(c, 0, 0);
                }
            }
            let mut a_count = 0i32;
            for k in 0..n {
                let is_a = state >> k & 1 == 1;
                a_count += is_a as i32;
                let positive = code.sign(k + 1) == Sign::Pos;
                let (oc, oi) = over[k];
                let (uc, ui) = under[k];
                let (o_in, o_out, u_in, u_out) = (idx(oc, oi, 0), idx(oc, oi, 1), idx(uc, ui, 0), idx(uc, ui, 1));
                let pairs = if is_a == positive {
                    [(o_in, u_out), (u_in, o_out)]
                } else {
                    [(o_in, u_in), (o_out, u_out)]
                };
                for (x, y) in pairs {
                    across[x] = y;
                    across[y] = x;
                }
            }
            // alternate along/across until the walk closes
            let mut seen = vec![false; total];
            let mut circles = 0usize;
            for start in 0..total {
                if seen[start] {
                    continue;
                }
                circles += 1;
                let mut x = start;
                loop {
                    seen[x] = true;
                    let y = along[x];
                    seen[y] = true;
                    x = across[y];
                    if x == start {
                        break;
                    }
                }
            }
            let a_exp = 2 * a_count - n as i32;
            let mono = LaurentPoly1::monomial([a_exp], BigInt::from(1));
            out = &out + &(&mono * &delta_pow(circles - 1));
        }
        out
    }

    fn p(s: &str) -> GaussCode {
        parse_gauss(s).unwrap()
    }

    fn l(t: &[(i32, i64)]) -> LaurentPoly1 {
        LaurentPoly1::from_i64(t)
    }

    #[test]
    fn small_brackets() {
        assert_eq!(bracket(&GaussCode::unknot()), l(&[(0, 1)]));
        assert_eq!(bracket(&p("O1+,U1+")), l(&[(3, -1)]));
        assert_eq!(bracket(&p("O1-,U1-")), l(&[(-3, -1)]));
        assert_eq!(f_polynomial(&p("O1+,U1+")), l(&[(0, 1)]));
        // the four states of the virtual trefoil
        assert_eq!(bracket(&p("O1+,O2+,U1+,U2+")), l(&[(2, 1), (0, 1), (-4, -1)]));
        assert_eq!(f_polynomial(&p("O1+,O2+,U1+,U2+")), l(&[(-4, 1), (-6, 1), (-10, -1)]));
        let tre = p("O1+,U2+,O3+,U1+,O2+,U3+");
        assert_eq!(bracket(&tre), l(&[(5, -1), (-3, -1), (-7, 1)]));
        assert_eq!(f_polynomial(&tre), l(&[(-4, 1), (-12, 1), (-16, -1)]));
        // unlink of two circles
        assert_eq!(bracket(&p("|")), l(&[(2, -1), (-2, -1)]));
    }

    #[test]
    fn oracle_agrees() {
        for s in [
            "",
            "O1+,U1+",
            "O1+,O2+,U1+,U2+",
            "O1-,O2+,U1-,U2+",
            "O1+,U2+,O3+,U1+,O2+,U3+",
            "O1+,U2-|U1+,O2-",
            "O1+,U2-,O3+,U1+,O2-,U3+|",
        ] {
            let c = p(s);
            assert_eq!(bracket(&c), bracket_oracle(&c), "{s}");
        }
    }

    #[test]
    fn atoms() {
        let e = atom_profile(&GaussCode::unknot());
        assert_eq!((e.s_a, e.s_b, e.atom_genus, e.orientable), (1, 1, HalfInt(0), true));
        let t = atom_profile(&p("O1+,U2+,O3+,U1+,O2+,U3+"));
        assert_eq!((t.s_a, t.s_b, t.atom_genus, t.orientable), (2, 3, HalfInt(0), true));
        let v = atom_profile(&p("O1+,O2+,U1+,U2+"));
        assert_eq!((v.s_a, v.s_b, v.atom_genus, v.orientable), (1, 2, HalfInt(1), false));
        assert_eq!(v.atom_genus.to_string(), "1/2");
    }

    #[test]
    fn span_bounds() {
        assert_eq!(span_bound_check(&GaussCode::unknot()), Ok((0, 0, true)));
        assert_eq!(span_bound_check(&p("O1+,U2+,O3+,U1+,O2+,U3+")), Ok((12, 12, true)));
        let (span, bound, holds) = span_bound_check(&p("O1+,O2+,U1+,U2+")).unwrap();
        assert!(holds && span == 6 && bound == 6);
    }

    #[test]
    fn report_json_fields() {
        let r = state_sum_report(&p("O1+,O2+,U1+,U2+"));
        let v = serde_json::to_value(&r).unwrap();
        for k in ["bracket", "f", "writhe", "sA", "sB", "atom_genus", "orientable", "span", "bound"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["atom_genus"], serde_json::json!(0.5));
    }
}
