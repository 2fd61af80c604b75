//! Gauss codes: the canonical representation of virtual knots and links.
//!
//! A code is a list of components, each a cyclic sequence of passages
//! through classical crossings ("chords"). Virtual crossings never
//! appear: they are artifacts of drawing a code in the plane.
//!
//! Text grammar (bit-exact):
//!
//! ```text
//! code      := component ("|" component)*
//! component := "" | token ("," token)*
//! token     := "O" id sign | "U" id sign     (classical)
//!            | "F" id sign                   (flat)
//!            | "C" id                        (free)
//! sign      := "+" | "-"
//! ```
//!
//! Flat chords carry an orientation but no over/under. A flat code stores
//! one lift of each chord (an over/under choice) and prints the sign
//! relative to the first occurrence: `F<k>+` means the chord reads like an
//! `O<k>+ … U<k>+` pair starting at its first occurrence. A lift and its
//! crossing switch describe the same flat chord.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Passage {
    Over,
    Under,
}

impl Passage {
    pub fn flip(self) -> Self {
        match self {
            Passage::Over => Passage::Under,
            Passage::Under => Passage::Over,
        }
    }
}

/// Local writhe of a classical crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            _ => Err(format!("sign must be 1 or -1, got {v}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeKind {
    Classical,
    Flat,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub chord: usize,
    pub passage: Passage,
    pub sign: Sign,
}

impl Token {
    pub fn new(chord: usize, passage: Passage, sign: Sign) -> Self {
        Token { chord, passage, sign }
    }
}

/// Location of a token: (component, index within component).
pub type Pos = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("syntax error at token {0:?}: {1}")]
    SyntaxError(String, &'static str),
    #[error("chord {0}: occurrences disagree in sign")]
    SignMismatch(usize),
    #[error("chord {0}: two occurrences with the same passage")]
    PassageDuplicate(usize),
    #[error("chord {0} occurs only once")]
    DanglingChord(usize),
    #[error("chord {0} occurs more than twice")]
    ChordOverused(usize),
    #[error("mixed token kinds in one code")]
    MixedKinds,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GaussCodeRepr", into = "GaussCodeRepr")]
pub struct GaussCode {
    kind: CodeKind,
    components: Vec<Vec<Token>>,
}

#[derive(Serialize, Deserialize)]
struct GaussCodeRepr {
    kind: CodeKind,
    components: Vec<Vec<Token>>,
}

impl From<GaussCode> for GaussCodeRepr {
    fn from(c: GaussCode) -> Self {
        GaussCodeRepr { kind: c.kind, components: c.components }
    }
}

impl TryFrom<GaussCodeRepr> for GaussCode {
    type Error = CodeError;
    fn try_from(r: GaussCodeRepr) -> Result<Self, CodeError> {
        GaussCode::with_kind(r.kind, r.components)
    }
}

impl Default for GaussCode {
    fn default() -> Self {
        GaussCode::unknot()
    }
}

impl GaussCode {
    /// The one-component code with no chords.
    pub fn unknot() -> Self {
        GaussCode { kind: CodeKind::Classical, components: vec![vec![]] }
    }

    /// Builds and validates a classical code. Chord ids are canonicalized.
    pub fn new(components: Vec<Vec<Token>>) -> Result<Self, CodeError> {
        Self::with_kind(CodeKind::Classical, components)
    }

    pub fn with_kind(kind: CodeKind, components: Vec<Vec<Token>>) -> Result<Self, CodeError> {
        let components = if components.is_empty() { vec![vec![]] } else { components };
        let code = GaussCode { kind, components };
        code.validate()?;
        Ok(code.canonicalized())
    }

    pub(crate) fn from_raw(kind: CodeKind, components: Vec<Vec<Token>>) -> Self {
        let components = if components.is_empty() { vec![vec![]] } else { components };
        GaussCode { kind, components }.canonicalized()
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn components(&self) -> &[Vec<Token>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn chord_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.chord_count() == 0
    }

    pub fn token(&self, pos: Pos) -> Token {
        self.components[pos.0][pos.1]
    }

    /// Cyclic successor of a position within its component.
    pub fn next_pos(&self, pos: Pos) -> Pos {
        let len = self.components[pos.0].len();
        (pos.0, (pos.1 + 1) % len)
    }

    pub fn prev_pos(&self, pos: Pos) -> Pos {
        let len = self.components[pos.0].len();
        (pos.0, (pos.1 + len - 1) % len)
    }

    /// Sign of chord `k` (1-based).
    pub fn sign(&self, k: usize) -> Sign {
        let (p, _) = self.chord_positions(k);
        self.token(p).sign
    }

    pub fn writhe(&self) -> i64 {
        (1..=self.chord_count()).map(|k| self.sign(k).value()).sum()
    }

    /// Positions of the over and under occurrences of every chord, indexed by
    /// chord id − 1. For flat and free codes these are the stored lift.
    pub fn chord_table(&self) -> Vec<(Pos, Pos)> {
        let n = self.chord_count();
        let mut over = vec![None; n];
        let mut under = vec![None; n];
        for (c, comp) in self.components.iter().enumerate() {
            for (i, t) in comp.iter().enumerate() {
                match t.passage {
                    Passage::Over => over[t.chord - 1] = Some((c, i)),
                    Passage::Under => under[t.chord - 1] = Some((c, i)),
                }
            }
        }
        over.into_iter()
            .zip(under)
            .map(|(o, u)| (o.expect("validated code"), u.expect("validated code")))
            .collect()
    }

    /// (over position, under position) of chord `k`.
    pub fn chord_positions(&self, k: usize) -> (Pos, Pos) {
        self.chord_table()[k - 1]
    }

    fn validate(&self) -> Result<(), CodeError> {
        let mut seen: HashMap<usize, Vec<Token>> = HashMap::new();
        for t in self.components.iter().flatten() {
            seen.entry(t.chord).or_default().push(*t);
        }
        let mut ids: Vec<_> = seen.keys().copied().collect();
        ids.sort_unstable();
        for k in ids {
            let occ = &seen[&k];
            match occ.len() {
                1 => return Err(CodeError::DanglingChord(k)),
                2 => {}
                _ => return Err(CodeError::ChordOverused(k)),
            }
            if occ[0].passage == occ[1].passage {
                return Err(CodeError::PassageDuplicate(k));
            }
            if occ[0].sign != occ[1].sign {
                return Err(CodeError::SignMismatch(k));
            }
        }
        Ok(())
    }

    /// Relabels chords 1..n in order of first appearance and, for flat and
    /// free codes, normalizes each lift so the first occurrence is the over
    /// passage.
    pub(crate) fn canonicalized(mut self) -> Self {
        let mut map: HashMap<usize, usize> = HashMap::new();
        for comp in &self.components {
            for t in comp {
                let next = map.len() + 1;
                map.entry(t.chord).or_insert(next);
            }
        }
        let mut first_seen = vec![false; map.len() + 1];
        for comp in &mut self.components {
            for t in comp.iter_mut() {
                t.chord = map[&t.chord];
            }
        }
        match self.kind {
            CodeKind::Classical => {}
            CodeKind::Flat => {
                // switch any chord whose first occurrence is an under passage
                let mut flip = vec![false; map.len() + 1];
                for t in self.components.iter().flatten() {
                    if !first_seen[t.chord] {
                        first_seen[t.chord] = true;
                        flip[t.chord] = t.passage == Passage::Under;
                    }
                }
                for t in self.components.iter_mut().flatten() {
                    if flip[t.chord] {
                        t.passage = t.passage.flip();
                        t.sign = t.sign.flip();
                    }
                }
            }
            CodeKind::Free => {
                for t in self.components.iter_mut().flatten() {
                    t.passage = if first_seen[t.chord] { Passage::Under } else { Passage::Over };
                    first_seen[t.chord] = true;
                    t.sign = Sign::Pos;
                }
            }
        }
        self
    }

    /// Cyclically rotates component `c` so that index `by` comes first.
    pub fn rotated(&self, c: usize, by: usize) -> Self {
        let mut comps = self.components.clone();
        if !comps[c].is_empty() {
            let by = by % comps[c].len();
            comps[c].rotate_left(by);
        }
        GaussCode { kind: self.kind, components: comps }.canonicalized()
    }

    /// Traverses every component backwards (global orientation reversal).
    pub fn reversed(&self) -> Self {
        let comps = self
            .components
            .iter()
            .map(|comp| comp.iter().rev().copied().collect())
            .collect();
        GaussCode { kind: self.kind, components: comps }.canonicalized()
    }

    /// Mirror image: every crossing switched.
    pub fn mirrored(&self) -> Self {
        let comps = self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .map(|t| Token::new(t.chord, t.passage.flip(), t.sign.flip()))
                    .collect()
            })
            .collect();
        GaussCode { kind: self.kind, components: comps }.canonicalized()
    }

    /// Smallest serialization over all rotations of all components; a
    /// canonical key for comparing codes up to where each loop is cut open.
    pub fn rotation_key(&self) -> String {
        // start each component at its minimal passage/sign pattern; ties are
        // broken by trying every tied start
        let mut best: Option<String> = None;
        let starts: Vec<Vec<usize>> = self
            .components
            .iter()
            .map(|comp| {
                if comp.is_empty() {
                    return vec![0];
                }
                let feats: Vec<Vec<(Passage, Sign)>> = (0..comp.len())
                    .map(|r| {
                        (0..comp.len())
                            .map(|i| {
                                let t = comp[(r + i) % comp.len()];
                                (t.passage, t.sign)
                            })
                            .collect()
                    })
                    .collect();
                let min = feats.iter().min().unwrap().clone();
                (0..comp.len()).filter(|&r| feats[r] == min).collect()
            })
            .collect();
        let mut idx = vec![0usize; starts.len()];
        loop {
            let comps: Vec<Vec<Token>> = self
                .components
                .iter()
                .zip(&idx)
                .enumerate()
                .map(|(c, (comp, &j))| {
                    let mut v = comp.clone();
                    if !v.is_empty() {
                        v.rotate_left(starts[c][j]);
                    }
                    v
                })
                .collect();
            let s = GaussCode { kind: self.kind, components: comps }.canonicalized().to_string();
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
            // odometer over tied starts
            let mut c = 0;
            loop {
                if c == idx.len() {
                    return best.unwrap();
                }
                idx[c] += 1;
                if idx[c] < starts[c].len() {
                    break;
                }
                idx[c] = 0;
                c += 1;
            }
        }
    }
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat_sign = flat_signs(self);
        for (c, comp) in self.components.iter().enumerate() {
            if c > 0 {
                f.write_str("|")?;
            }
            for (i, t) in comp.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                match self.kind {
                    CodeKind::Classical => {
                        let p = if t.passage == Passage::Over { 'O' } else { 'U' };
                        write!(f, "{p}{}{}", t.chord, t.sign.symbol())?;
                    }
                    CodeKind::Flat => write!(f, "F{}{}", t.chord, flat_sign[t.chord].symbol())?,
                    CodeKind::Free => write!(f, "C{}", t.chord)?,
                }
            }
        }
        Ok(())
    }
}

/// Sign of each flat chord relative to its first occurrence.
fn flat_signs(code: &GaussCode) -> Vec<Sign> {
    let n = code.chord_count();
    let mut out = vec![Sign::Pos; n + 1];
    let mut seen = vec![false; n + 1];
    for t in code.components.iter().flatten() {
        if !seen[t.chord] {
            seen[t.chord] = true;
            out[t.chord] = if t.passage == Passage::Over { t.sign } else { t.sign.flip() };
        }
    }
    out
}

impl FromStr for GaussCode {
    type Err = CodeError;
    fn from_str(s: &str) -> Result<Self, CodeError> {
        parse_gauss(s)
    }
}

pub fn parse_gauss(text: &str) -> Result<GaussCode, CodeError> {
    let mut kind: Option<CodeKind> = None;
    let mut components = Vec::new();
    let mut flat_seen: HashMap<usize, ()> = HashMap::new();
    for comp_text in text.trim().split('|') {
        let comp_text = comp_text.trim();
        let mut comp = Vec::new();
        if !comp_text.is_empty() {
            for raw in comp_text.split(',') {
                let tok = raw.trim();
                let (k, t) = parse_token(tok, &mut flat_seen)?;
                match kind {
                    None => kind = Some(k),
                    Some(prev) if prev != k => return Err(CodeError::MixedKinds),
                    _ => {}
                }
                comp.push(t);
            }
        }
        components.push(comp);
    }
    let kind = kind.unwrap_or(CodeKind::Classical);
    if kind == CodeKind::Free {
        // free tokens carry no data; check multiplicities then build a lift
        let mut count: HashMap<usize, usize> = HashMap::new();
        for t in components.iter().flatten() {
            *count.entry(t.chord).or_default() += 1;
        }
        let mut ids: Vec<_> = count.iter().collect();
        ids.sort();
        for (&k, &c) in ids {
            if c == 1 {
                return Err(CodeError::DanglingChord(k));
            }
            if c > 2 {
                return Err(CodeError::ChordOverused(k));
            }
        }
        return Ok(GaussCode::from_raw(kind, components));
    }
    GaussCode::with_kind(kind, components)
}

fn parse_token(tok: &str, flat_seen: &mut HashMap<usize, ()>) -> Result<(CodeKind, Token), CodeError> {
    let err = |why| CodeError::SyntaxError(tok.to_string(), why);
    let mut chars = tok.chars();
    let head = chars.next().ok_or_else(|| err("empty token"))?;
    let rest = chars.as_str();
    let (digits, sign) = match head {
        'C' => (rest, None),
        'O' | 'U' | 'F' => {
            let last = rest.chars().last().ok_or_else(|| err("missing chord id"))?;
            let sign = match last {
                '+' => Sign::Pos,
                '-' => Sign::Neg,
                _ => return Err(err("missing sign")),
            };
            (&rest[..rest.len() - 1], Some(sign))
        }
        _ => return Err(err("token must start with O, U, F or C")),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("chord id must be a positive integer"));
    }
    let chord: usize = digits.parse().map_err(|_| err("chord id out of range"))?;
    if chord == 0 {
        return Err(err("chord id must be a positive integer"));
    }
    Ok(match head {
        'O' => (CodeKind::Classical, Token::new(chord, Passage::Over, sign.unwrap())),
        'U' => (CodeKind::Classical, Token::new(chord, Passage::Under, sign.unwrap())),
        'F' => {
            // first occurrence is the over end of the lift
            let passage = if flat_seen.insert(chord, ()).is_none() { Passage::Over } else { Passage::Under };
            (CodeKind::Flat, Token::new(chord, passage, sign.unwrap()))
        }
        _ => (CodeKind::Free, Token::new(chord, Passage::Over, Sign::Pos)),
    })
}

/// Edge bookkeeping for a code: edge `e` of a nonempty component leaves the
/// token at its index and enters the next one; an empty component is a
/// single closed edge.
#[derive(Debug, Clone)]
pub struct EdgeLayout {
    offsets: Vec<usize>,
    lens: Vec<usize>,
    total: usize,
}

impl EdgeLayout {
    pub fn new(code: &GaussCode) -> Self {
        let mut offsets = Vec::new();
        let mut lens = Vec::new();
        let mut total = 0;
        for comp in code.components() {
            offsets.push(total);
            lens.push(comp.len());
            total += comp.len().max(1);
        }
        EdgeLayout { offsets, lens, total }
    }

    pub fn edge_count(&self) -> usize {
        self.total
    }

    /// Edge leaving the token at `pos`.
    pub fn out_edge(&self, pos: Pos) -> usize {
        self.offsets[pos.0] + pos.1
    }

    /// Edge entering the token at `pos`.
    pub fn in_edge(&self, pos: Pos) -> usize {
        let len = self.lens[pos.0];
        self.offsets[pos.0] + (pos.1 + len - 1) % len
    }

    /// Edges of empty components (free loops).
    pub fn free_loops(&self) -> impl Iterator<Item = usize> + '_ {
        self.lens
            .iter()
            .zip(&self.offsets)
            .filter(|(l, _)| **l == 0)
            .map(|(_, o)| *o)
    }

    pub fn component_of(&self, edge: usize) -> usize {
        match self.offsets.binary_search(&edge) {
            Ok(c) => {
                // skip components sharing an offset (none do, but keep it exact)
                let mut c = c;
                while c + 1 < self.offsets.len() && self.offsets[c + 1] == edge {
                    c += 1;
                }
                c
            }
            Err(c) => c - 1,
        }
    }
}
