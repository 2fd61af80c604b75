//! Virtual braid words, the representation `VB_n → Aut(F_{n+1})`, the flat
//! quotient and braid closure.
//!
//! `F_{n+1} = ⟨x₁,…,x_n, y⟩`. On generators
//! `σ_i: x_i ↦ x_i x_{i+1} x_i⁻¹, x_{i+1} ↦ x_i` and
//! `ρ_i: x_i ↦ y x_{i+1} y⁻¹, x_{i+1} ↦ y⁻¹ x_i y`, all other generators
//! fixed. Words act left to right: the image of `uv` sends a generator to
//! its image under `u` with every letter then replaced by its image under
//! `v`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{GaussCode, Passage, Sign, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BraidLetter {
    /// `σ_i` (`inverse = false`) or `σ_i⁻¹`.
    Sigma { i: usize, inverse: bool },
    /// `ρ_i`, its own inverse.
    Rho { i: usize },
}

impl BraidLetter {
    pub fn index(self) -> usize {
        match self {
            BraidLetter::Sigma { i, .. } | BraidLetter::Rho { i } => i,
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            BraidLetter::Sigma { i, inverse } => BraidLetter::Sigma { i, inverse: !inverse },
            r => r,
        }
    }
}

impl fmt::Display for BraidLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BraidLetter::Sigma { i, inverse: false } => write!(f, "s{i}"),
            BraidLetter::Sigma { i, inverse: true } => write!(f, "S{i}"),
            BraidLetter::Rho { i } => write!(f, "r{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("bad braid token {0:?}")]
    BadToken(String),
    #[error("generator index {index} out of range for {strands} strands")]
    IndexOutOfRange { index: usize, strands: usize },
    #[error("a braid needs at least one strand")]
    NoStrands,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<BraidLetter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<BraidLetter>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        if let Some(l) = letters.iter().find(|l| l.index() == 0 || l.index() >= strands) {
            return Err(BraidError::IndexOutOfRange { index: l.index(), strands });
        }
        Ok(BraidWord { strands, letters })
    }

    /// Whitespace-separated `s<i>`, `S<i>` (inverse) and `r<i>` tokens.
    pub fn parse(text: &str, strands: usize) -> Result<Self, BraidError> {
        let letters = text
            .split_whitespace()
            .map(|tok| {
                let bad = || BraidError::BadToken(tok.to_string());
                let (head, num) = tok.split_at(tok.chars().next().map_or(0, |c| c.len_utf8()));
                let i: usize = num.parse().map_err(|_| bad())?;
                match head {
                    "s" => Ok(BraidLetter::Sigma { i, inverse: false }),
                    "S" => Ok(BraidLetter::Sigma { i, inverse: true }),
                    "r" => Ok(BraidLetter::Rho { i }),
                    _ => Err(bad()),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(strands, letters)
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.extend(&other.letters);
        BraidWord { strands: self.strands.max(other.strands), letters }
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// The underlying permutation: strand starting at position `p` ends at
    /// `perm[p]` (0-based).
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for l in &self.letters {
            let i = l.index();
            for p in at.iter_mut() {
                if *p == i - 1 {
                    *p = i;
                } else if *p == i {
                    *p = i - 1;
                }
            }
        }
        at
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Letters of a free group word: generator index and exponent ±1.
pub type FreeWord = Vec<(usize, i8)>;

pub fn free_reduce(w: &[(usize, i8)]) -> FreeWord {
    let mut out: FreeWord = Vec::with_capacity(w.len());
    for &x in w {
        match out.last() {
            Some(&(g, e)) if g == x.0 && e == -x.1 => {
                out.pop();
            }
            _ => out.push(x),
        }
    }
    out
}

fn invert(w: &[(usize, i8)]) -> FreeWord {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

/// An endomorphism of `F_rank` given by generator images, kept freely
/// reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeGroupAutomorphism {
    pub rank: usize,
    pub images: Vec<FreeWord>,
}

impl FreeGroupAutomorphism {
    pub fn identity(rank: usize) -> Self {
        FreeGroupAutomorphism { rank, images: (0..rank).map(|g| vec![(g, 1)]).collect() }
    }

    /// The image of a word.
    pub fn apply(&self, w: &[(usize, i8)]) -> FreeWord {
        let mut out = Vec::new();
        for &(g, e) in w {
            if e > 0 {
                out.extend_from_slice(&self.images[g]);
            } else {
                out.extend(invert(&self.images[g]));
            }
        }
        free_reduce(&out)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Self {
        FreeGroupAutomorphism { rank: self.rank, images: self.images.iter().map(|w| next.apply(w)).collect() }
    }
}

impl fmt::Display for FreeGroupAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |g: usize| if g + 1 == self.rank { "y".to_string() } else { format!("x{}", g + 1) };
        let word = |w: &FreeWord| -> String {
            if w.is_empty() {
                return "1".into();
            }
            let parts: Vec<String> =
                w.iter().map(|&(g, e)| if e > 0 { name(g) } else { format!("{}^-1", name(g)) }).collect();
            parts.join("*")
        };
        let parts: Vec<String> = self.images.iter().enumerate().map(|(g, w)| format!("{} -> {}", name(g), word(w))).collect();
        f.write_str(&parts.join("; "))
    }
}

fn letter_image(n: usize, l: BraidLetter) -> FreeGroupAutomorphism {
    let mut a = FreeGroupAutomorphism::identity(n + 1);
    let y = n;
    let (xi, xj) = (l.index() - 1, l.index());
    match l {
        BraidLetter::Sigma { inverse: false, .. } => {
            a.images[xi] = vec![(xi, 1), (xj, 1), (xi, -1)];
            a.images[xj] = vec![(xi, 1)];
        }
        BraidLetter::Sigma { inverse: true, .. } => {
            a.images[xi] = vec![(xj, 1)];
            a.images[xj] = vec![(xj, -1), (xi, 1), (xj, 1)];
        }
        BraidLetter::Rho { .. } => {
            a.images[xi] = vec![(y, 1), (xj, 1), (y, -1)];
            a.images[xj] = vec![(y, -1), (xi, 1), (y, 1)];
        }
    }
    a
}

pub fn rho_image(w: &BraidWord) -> FreeGroupAutomorphism {
    w.letters
        .iter()
        .fold(FreeGroupAutomorphism::identity(w.strands + 1), |acc, &l| acc.then(&letter_image(w.strands, l)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub family: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationReport {
    pub strands: usize,
    pub checks: Vec<RelationCheck>,
}

impl PresentationReport {
    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn family_holds(&self, family: &str) -> bool {
        self.checks.iter().filter(|c| c.family == family).all(|c| c.holds)
    }
}

/// The defining relations of `VB_n` and the welded forbidden relation,
/// each compared under [`rho_image`].
pub fn defining_relations(n: usize) -> Vec<(&'static str, Vec<BraidLetter>, Vec<BraidLetter>)> {
    let s = |i| BraidLetter::Sigma { i, inverse: false };
    let si = |i| BraidLetter::Sigma { i, inverse: true };
    let r = |i| BraidLetter::Rho { i };
    let mut rels = Vec::new();
    for i in 1..n {
        rels.push(("inverse", vec![s(i), si(i)], vec![]));
        rels.push(("symmetric", vec![r(i), r(i)], vec![]));
        for j in i + 2..n {
            rels.push(("braid", vec![s(i), s(j)], vec![s(j), s(i)]));
            rels.push(("symmetric", vec![r(i), r(j)], vec![r(j), r(i)]));
        }
        for j in 1..n {
            if i.abs_diff(j) > 1 {
                rels.push(("mixed", vec![s(i), r(j)], vec![r(j), s(i)]));
            }
        }
        if i + 1 < n {
            rels.push(("braid", vec![s(i), s(i + 1), s(i)], vec![s(i + 1), s(i), s(i + 1)]));
            rels.push(("symmetric", vec![r(i), r(i + 1), r(i)], vec![r(i + 1), r(i), r(i + 1)]));
            rels.push(("mixed", vec![s(i), r(i + 1), r(i)], vec![r(i + 1), r(i), s(i + 1)]));
            rels.push(("welded", vec![r(i), s(i + 1), s(i)], vec![s(i + 1), s(i), r(i + 1)]));
        }
    }
    rels
}

pub fn verify_presentation(n: usize) -> PresentationReport {
    assert!((2..=6).contains(&n), "presentation checks cover 2 to 6 strands");
    let checks = defining_relations(n)
        .into_par_iter()
        .map(|(family, l, r)| {
            let lw = BraidWord { strands: n, letters: l };
            let rw = BraidWord { strands: n, letters: r };
            RelationCheck {
                family: family.to_string(),
                holds: rho_image(&lw) == rho_image(&rw),
                lhs: lw.to_string(),
                rhs: rw.to_string(),
            }
        })
        .collect();
    PresentationReport { strands: n, checks }
}

/// Gauss code of the closure. At `σ_i^{±1}` the strand entering at
/// position `i` passes over the one entering at `i+1`; `σ_i` is a positive
/// crossing and `σ_i⁻¹` a negative one with the roles swapped. `ρ_i`
/// leaves no trace. Components are traced starting from the lowest
/// unused position.
pub fn close_braid(w: &BraidWord) -> GaussCode {
    let n = w.strands;
    // tokens met by the strand starting at each top position
    let mut at: Vec<usize> = (0..n).collect();
    let mut paths: Vec<Vec<Token>> = vec![Vec::new(); n];
    let mut chord = 0;
    for l in &w.letters {
        let i = l.index();
        let left = at.iter().position(|&p| p == i - 1).expect("every position is occupied");
        let right = at.iter().position(|&p| p == i).expect("every position is occupied");
        if let BraidLetter::Sigma { inverse, .. } = *l {
            chord += 1;
            let sign = if inverse { Sign::Neg } else { Sign::Pos };
            let (over, under) = if inverse { (right, left) } else { (left, right) };
            paths[over].push(Token::new(chord, Passage::Over, sign));
            paths[under].push(Token::new(chord, Passage::Under, sign));
        }
        at[left] = i;
        at[right] = i - 1;
    }
    let mut used = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if used[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut p = start;
        while !used[p] {
            used[p] = true;
            comp.extend_from_slice(&paths[p]);
            p = at[p];
        }
        components.push(comp);
    }
    GaussCode::new(components).expect("closure tokens pair up")
}

/// Image in `FVB_n`: signs dropped, then `σ_iσ_i` and `ρ_iρ_i` cancelled.
pub fn flat_quotient(w: &BraidWord) -> BraidWord {
    let mut out: Vec<BraidLetter> = Vec::new();
    for l in &w.letters {
        let l = match *l {
            BraidLetter::Sigma { i, .. } => BraidLetter::Sigma { i, inverse: false },
            r => r,
        };
        if out.last() == Some(&l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    BraidWord { strands: w.strands, letters: out }
}

impl FromStr for BraidLetter {
    type Err = BraidError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let w = BraidWord::parse(s, usize::MAX)?;
        match w.letters.as_slice() {
            [l] => Ok(*l),
            _ => Err(BraidError::BadToken(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alexander::generalized_alexander;
    use crate::code::parse_gauss;
    use crate::statesum::f_polynomial;
    use proptest::prelude::*;

    fn w(s: &str, n: usize) -> BraidWord {
        BraidWord::parse(s, n).unwrap()
    }

    #[test]
    fn parsing() {
        let b = w("s1 S2 r1", 3);
        assert_eq!(b.to_string(), "s1 S2 r1");
        assert!(BraidWord::parse("s3", 3).is_err());
        assert!(BraidWord::parse("t1", 3).is_err());
        assert!(BraidWord::parse("s0", 3).is_err());
    }

    #[test]
    fn basic_images() {
        assert_eq!(rho_image(&w("", 3)), FreeGroupAutomorphism::identity(4));
        assert_eq!(rho_image(&w("s1 S1", 2)), FreeGroupAutomorphism::identity(3));
        assert_eq!(rho_image(&w("s1 r2 r1", 3)), rho_image(&w("r2 r1 s2", 3)));
    }

    #[test]
    fn presentation_checks() {
        for n in 2..=6 {
            let rep = verify_presentation(n);
            for fam in ["inverse", "braid", "symmetric", "mixed"] {
                assert!(rep.family_holds(fam), "n = {n}, {fam}: {:?}", rep.failures().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn closures() {
        let tre = close_braid(&w("s1 s1 s1", 2));
        assert_eq!(f_polynomial(&tre), f_polynomial(&parse_gauss("O1+,U2+,O3+,U1+,O2+,U3+").unwrap()));
        assert!(close_braid(&w("r1", 2)).is_empty());
        let vt = close_braid(&w("s1 s1 r1", 2));
        assert_eq!(vt.rotation_key(), parse_gauss("O1+,O2+,U1+,U2+").unwrap().rotation_key());
        // σ₁ρ₁ is a pure braid, so its square closes to two components
        assert_eq!(close_braid(&w("s1 r1 s1 r1", 2)).component_count(), 2);
    }

    #[test]
    fn flat_quotients() {
        assert!(flat_quotient(&w("s1 s1", 2)).letters.is_empty());
        assert!(flat_quotient(&w("s1 S1", 2)).letters.is_empty());
        assert_eq!(flat_quotient(&w("s1 s2 s1", 3)), w("s1 s2 s1", 3));
    }

    fn word(n: usize, len: usize) -> impl Strategy<Value = BraidWord> {
        prop::collection::vec((1..n, 0..3u8), 0..len).prop_map(move |ls| BraidWord {
            strands: n,
            letters: ls
                .into_iter()
                .map(|(i, k)| match k {
                    0 => BraidLetter::Sigma { i, inverse: false },
                    1 => BraidLetter::Sigma { i, inverse: true },
                    _ => BraidLetter::Rho { i },
                })
                .collect(),
        })
    }

    proptest! {
        #[test]
        fn rho_is_a_homomorphism(u in word(4, 8), v in word(4, 8)) {
            prop_assert_eq!(rho_image(&u.concat(&v)), rho_image(&u).then(&rho_image(&v)));
            prop_assert_eq!(rho_image(&u.concat(&u.inverse())), FreeGroupAutomorphism::identity(5));
        }

        #[test]
        fn flat_quotient_is_idempotent(u in word(4, 12)) {
            let f = flat_quotient(&u);
            prop_assert_eq!(flat_quotient(&f), f);
        }

        #[test]
        fn free_reduction_is_confluent(raw in prop::collection::vec((0..3usize, prop::bool::ANY), 0..24), seed in any::<u64>()) {
            let word: FreeWord = raw.into_iter().map(|(g, s)| (g, if s { 1 } else { -1 })).collect();
            // cancel adjacent inverse pairs in a pseudo-random order
            let mut w = word.clone();
            let mut state = seed | 1;
            loop {
                let spots: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&k| w[k].0 == w[k + 1].0 && w[k].1 == -w[k + 1].1).collect();
                if spots.is_empty() { break; }
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                let k = spots[(state % spots.len() as u64) as usize];
                w.drain(k..k + 2);
            }
            prop_assert_eq!(w, free_reduce(&word));
        }

        #[test]
        fn closure_is_conjugation_stable(u in word(3, 5), c in word(3, 3)) {
            let conj = c.concat(&u).concat(&c.inverse());
            let (a, b) = (close_braid(&u), close_braid(&conj));
            prop_assert_eq!(f_polynomial(&a), f_polynomial(&b));
            prop_assert_eq!(generalized_alexander(&a), generalized_alexander(&b));
        }
    }
}
