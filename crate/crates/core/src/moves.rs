//! Reidemeister moves as Gauss-code rewrites, crossing switches and
//! virtualization, and a bounded simplifier.
//!
//! Virtual moves (vR1–vR3, the mixed move, the detour move) change only how a
//! code is drawn, so on codes they are the identity and have no descriptor.
//!
//! Sites are given by segments. A segment is the pair of consecutive tokens
//! `(p, next(p))` and is named by `p`. In a component of length 2 the
//! segments starting at index 0 and index 1 are different edges.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeKind, GaussCode, Passage, Pos, Sign, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Move {
    /// Delete a curl: the segment at `at` holds both ends of one chord.
    #[serde(rename = "R1-")]
    R1Minus { at: Pos },
    /// Delete a bigon: segments `first` and `second` hold the two ends of
    /// two chords of opposite sign, over ends together and under ends together.
    #[serde(rename = "R2-")]
    R2Minus { first: Pos, second: Pos },
    /// Slide a strand across a crossing. `top` holds two over ends, `bottom`
    /// two under ends, `middle` one of each.
    #[serde(rename = "R3")]
    R3 { top: Pos, middle: Pos, bottom: Pos },
    /// Insert a curl before index `at.1` of component `at.0`.
    #[serde(rename = "R1+")]
    R1Plus { at: Pos, first: Passage, sign: Sign },
    /// Insert a bigon: over ends before `over_at`, under ends before
    /// `under_at`. The first over end has sign `sign`, the second the
    /// opposite. With `antiparallel` the under ends come in reverse order.
    /// When both land on the same edge, `under_first` puts the under ends
    /// ahead of the over ends.
    #[serde(rename = "R2+")]
    R2Plus { over_at: Pos, under_at: Pos, sign: Sign, antiparallel: bool, under_first: bool },
}

impl Move {
    pub fn name(&self) -> &'static str {
        match self {
            Move::R1Minus { .. } => "R1-",
            Move::R2Minus { .. } => "R2-",
            Move::R3 { .. } => "R3",
            Move::R1Plus { .. } => "R1+",
            Move::R2Plus { .. } => "R2+",
        }
    }

    pub fn is_deletion(&self) -> bool {
        matches!(self, Move::R1Minus { .. } | Move::R2Minus { .. })
    }

    fn leftmost(&self) -> Pos {
        match *self {
            Move::R1Minus { at } => at,
            Move::R2Minus { first, second } => first.min(second),
            Move::R3 { top, middle, bottom } => top.min(middle).min(bottom),
            Move::R1Plus { at, .. } => at,
            Move::R2Plus { over_at, under_at, .. } => over_at.min(under_at),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move {0} does not apply at the given site")]
    NotApplicable(&'static str),
    #[error("no chord {0}")]
    NoSuchChord(usize),
    #[error("free codes carry no passage data")]
    FreeCode,
}

/// Oriented R3 triangles, derived from three straight lines in general
/// position under every orientation and height order (see the
/// `r3_table_matches_geometry` test). Each row is (t, m, b, s_tm, s_tb, s_mb):
/// `t` says the top strand meets the middle before the bottom, `m` that the
/// middle meets the top before the bottom, `b` that the bottom meets the top
/// before the middle, and the signs are those of the three crossings.
/// Performing the move negates t, m and b and keeps the signs.
pub(crate) const R3_TABLE: [(bool, bool, bool, i8, i8, i8); 16] = [
    (false, false, false, 1, 1, 1),
    (false, false, false, -1, -1, -1),
    (false, false, true, 1, -1, -1),
    (false, false, true, -1, 1, 1),
    (false, true, false, 1, -1, 1),
    (false, true, false, -1, 1, -1),
    (false, true, true, 1, 1, -1),
    (false, true, true, -1, -1, 1),
    (true, false, false, 1, 1, -1),
    (true, false, false, -1, -1, 1),
    (true, false, true, 1, -1, 1),
    (true, false, true, -1, 1, -1),
    (true, true, false, 1, -1, -1),
    (true, true, false, -1, 1, 1),
    (true, true, true, 1, 1, 1),
    (true, true, true, -1, -1, -1),
];

fn check_chord(code: &GaussCode, i: usize) -> Result<(), MoveError> {
    if i == 0 || i > code.chord_count() {
        return Err(MoveError::NoSuchChord(i));
    }
    Ok(())
}

fn retoken(code: &GaussCode, kind: CodeKind, f: impl Fn(Token) -> Token) -> GaussCode {
    let comps = code
        .components()
        .iter()
        .map(|comp| comp.iter().map(|t| f(*t)).collect())
        .collect();
    GaussCode::from_raw(kind, comps)
}

/// Switches crossing `i`: over and under exchange and the sign flips.
pub fn switch(code: &GaussCode, i: usize) -> Result<GaussCode, MoveError> {
    check_chord(code, i)?;
    Ok(retoken(code, code.kind(), |t| {
        if t.chord == i {
            Token::new(t.chord, t.passage.flip(), t.sign.flip())
        } else {
            t
        }
    }))
}

/// Replaces crossing `i` by the crossing flanked by two virtual crossings.
///
/// On a Gauss diagram this reverses the chord's sign and keeps its arrow.
/// The flat shadow is that of `K` with chord `i` reversed, and the bracket
/// agrees with that of the switched crossing.
pub fn virtualize(code: &GaussCode, i: usize) -> Result<GaussCode, MoveError> {
    check_chord(code, i)?;
    Ok(retoken(code, code.kind(), |t| {
        if t.chord == i {
            Token::new(t.chord, t.passage, t.sign.flip())
        } else {
            t
        }
    }))
}

/// Reads a flat code through the lift in which each position in `overs` is
/// an over passage. Classical codes are returned as they are if they already
/// satisfy this, otherwise `None`.
fn lifted(code: &GaussCode, overs: &[Pos]) -> Option<GaussCode> {
    match code.kind() {
        CodeKind::Classical => overs
            .iter()
            .all(|&p| code.token(p).passage == Passage::Over)
            .then(|| code.clone()),
        CodeKind::Flat => {
            let mut comps = code.components().to_vec();
            for &p in overs {
                let t = comps[p.0][p.1];
                if t.passage == Passage::Under {
                    for tt in comps.iter_mut().flatten() {
                        if tt.chord == t.chord {
                            tt.passage = tt.passage.flip();
                            tt.sign = tt.sign.flip();
                        }
                    }
                }
            }
            // a chord asked to be over at both ends has no such lift
            for (i, &p) in overs.iter().enumerate() {
                for &q in &overs[i + 1..] {
                    if p != q && comps[p.0][p.1].chord == comps[q.0][q.1].chord {
                        return None;
                    }
                }
            }
            Some(GaussCode::from_raw(CodeKind::Classical, comps))
        }
        CodeKind::Free => None,
    }
}

fn valid_pos(code: &GaussCode, p: Pos) -> bool {
    p.0 < code.component_count() && p.1 < code.components()[p.0].len()
}

fn is_segment(code: &GaussCode, p: Pos) -> bool {
    valid_pos(code, p) && code.components()[p.0].len() >= 2
}

fn segment(code: &GaussCode, p: Pos) -> (Pos, Pos) {
    (p, code.next_pos(p))
}

/// Position of the other end of the chord at `p`.
fn partner(code: &GaussCode, p: Pos) -> Pos {
    let k = code.token(p).chord;
    let (o, u) = code.chord_positions(k);
    if o == p {
        u
    } else {
        o
    }
}

fn check_r1(code: &GaussCode, at: Pos) -> bool {
    if !is_segment(code, at) {
        return false;
    }
    let (p, q) = segment(code, at);
    code.token(p).chord == code.token(q).chord
}

fn check_r2(code: &GaussCode, first: Pos, second: Pos) -> Option<GaussCode> {
    if !is_segment(code, first) || !is_segment(code, second) {
        return None;
    }
    let (p1, q1) = segment(code, first);
    let (p2, q2) = segment(code, second);
    let (a, b) = (code.token(p1).chord, code.token(q1).chord);
    if a == b {
        return None;
    }
    let mut s2 = [code.token(p2).chord, code.token(q2).chord];
    s2.sort_unstable();
    let mut s1 = [a, b];
    s1.sort_unstable();
    if s1 != s2 || [p1, q1].contains(&p2) || [p1, q1].contains(&q2) {
        return None;
    }
    if code.sign(a) == code.sign(b) && code.kind() == CodeKind::Classical {
        return None;
    }
    // either segment may carry the over ends
    let l = lifted(code, &[p1, q1]).or_else(|| lifted(code, &[p2, q2]))?;
    (l.sign(a) != l.sign(b)).then_some(l)
}

fn check_r3(code: &GaussCode, top: Pos, middle: Pos, bottom: Pos) -> Option<GaussCode> {
    if ![top, middle, bottom].iter().all(|&p| is_segment(code, p)) {
        return None;
    }
    let (t0, t1) = segment(code, top);
    let (m0, m1) = segment(code, middle);
    let (b0, b1) = segment(code, bottom);
    let all = [t0, t1, m0, m1, b0, b1];
    let set: HashSet<Pos> = all.iter().copied().collect();
    if set.len() != 6 {
        return None;
    }
    let ch = |p: Pos| code.token(p).chord;
    let (x, y) = (ch(t0), ch(t1));
    if x == y {
        return None;
    }
    // the middle segment meets exactly one top chord; its other token is the
    // middle-bottom chord, whose partner sits on the bottom next to the
    // partner of the other top chord
    let (tm_mid, mb_mid) = if ch(m0) == x || ch(m0) == y { (m0, m1) } else { (m1, m0) };
    let tm = ch(tm_mid);
    if tm != x && tm != y {
        return None;
    }
    let tb = if tm == x { y } else { x };
    let mb = ch(mb_mid);
    if mb == x || mb == y {
        return None;
    }
    let (bot_tb, bot_mb) = if ch(b0) == tb { (b0, b1) } else { (b1, b0) };
    if ch(bot_tb) != tb || ch(bot_mb) != mb {
        return None;
    }
    let tm_top = if ch(t0) == tm { t0 } else { t1 };
    let l = lifted(code, &[t0, t1, mb_mid])?;
    let t = tm_top == t0;
    let m = tm_mid == m0;
    let b = bot_tb == b0;
    let key = (t, m, b, l.sign(tm).value() as i8, l.sign(tb).value() as i8, l.sign(mb).value() as i8);
    R3_TABLE.contains(&key).then_some(l)
}

fn back_to_kind(l: GaussCode, kind: CodeKind) -> GaussCode {
    if kind == l.kind() {
        l
    } else {
        GaussCode::from_raw(kind, l.components().to_vec())
    }
}

fn delete(code: &GaussCode, drop: &[Pos]) -> Vec<Vec<Token>> {
    code.components()
        .iter()
        .enumerate()
        .map(|(c, comp)| {
            comp.iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(&(c, *i)))
                .map(|(_, t)| *t)
                .collect()
        })
        .collect()
}

fn insert(code: &GaussCode, mut inserts: Vec<(Pos, Vec<Token>)>) -> Result<GaussCode, MoveError> {
    for (p, _) in &inserts {
        if p.0 >= code.component_count() || p.1 > code.components()[p.0].len() {
            return Err(MoveError::NotApplicable("insertion"));
        }
    }
    // normalize index len to 0 (same edge)
    for (p, _) in inserts.iter_mut() {
        if p.1 == code.components()[p.0].len() {
            p.1 = 0;
        }
    }
    let mut comps = Vec::new();
    for (c, comp) in code.components().iter().enumerate() {
        let mut out = Vec::new();
        for i in 0..=comp.len() {
            if i < comp.len() || comp.is_empty() {
                for (p, toks) in &inserts {
                    if *p == (c, i) {
                        out.extend(toks.iter().copied());
                    }
                }
            }
            if i < comp.len() {
                out.push(comp[i]);
            }
        }
        comps.push(out);
    }
    // inserted before index 0 means after the last token on a cyclic list;
    // position is the same edge either way
    Ok(GaussCode::from_raw(code.kind(), comps))
}

pub fn apply_move(code: &GaussCode, m: &Move) -> Result<GaussCode, MoveError> {
    if code.kind() == CodeKind::Free {
        return Err(MoveError::FreeCode);
    }
    let fresh = code.chord_count() + 1;
    match *m {
        Move::R1Minus { at } => {
            if !check_r1(code, at) {
                return Err(MoveError::NotApplicable("R1-"));
            }
            let (p, q) = segment(code, at);
            Ok(GaussCode::from_raw(code.kind(), delete(code, &[p, q])))
        }
        Move::R2Minus { first, second } => {
            let l = check_r2(code, first, second).ok_or(MoveError::NotApplicable("R2-"))?;
            let (p1, q1) = segment(code, first);
            let (p2, q2) = segment(code, second);
            Ok(GaussCode::from_raw(code.kind(), delete(&l, &[p1, q1, p2, q2])))
        }
        Move::R3 { top, middle, bottom } => {
            let l = check_r3(code, top, middle, bottom).ok_or(MoveError::NotApplicable("R3"))?;
            let mut comps = l.components().to_vec();
            for s in [top, middle, bottom] {
                let (p, q) = segment(&l, s);
                let tmp = comps[p.0][p.1];
                comps[p.0][p.1] = comps[q.0][q.1];
                comps[q.0][q.1] = tmp;
            }
            Ok(back_to_kind(GaussCode::from_raw(CodeKind::Classical, comps), code.kind()))
        }
        Move::R1Plus { at, first, sign } => {
            let toks = vec![Token::new(fresh, first, sign), Token::new(fresh, first.flip(), sign)];
            insert(code, vec![(at, toks)])
        }
        Move::R2Plus { over_at, under_at, sign, antiparallel, under_first } => {
            let (a, b) = (fresh, fresh + 1);
            let overs = vec![Token::new(a, Passage::Over, sign), Token::new(b, Passage::Over, sign.flip())];
            let mut unders =
                vec![Token::new(a, Passage::Under, sign), Token::new(b, Passage::Under, sign.flip())];
            if antiparallel {
                unders.reverse();
            }
            let norm = |p: Pos| {
                if p.0 < code.component_count() && p.1 == code.components()[p.0].len() {
                    (p.0, 0)
                } else {
                    p
                }
            };
            if norm(over_at) == norm(under_at) {
                let toks = if under_first { [unders, overs].concat() } else { [overs, unders].concat() };
                insert(code, vec![(over_at, toks)])
            } else if under_first {
                Err(MoveError::NotApplicable("R2+"))
            } else {
                insert(code, vec![(over_at, overs), (under_at, unders)])
            }
        }
    }
}

/// Every applicable deletion and R3 move.
pub fn reducing_moves(code: &GaussCode) -> Vec<Move> {
    let mut out = deletions(code);
    out.extend(r3_moves(code));
    out
}

fn segments(code: &GaussCode) -> Vec<Pos> {
    let mut v = Vec::new();
    for (c, comp) in code.components().iter().enumerate() {
        if comp.len() >= 2 {
            v.extend((0..comp.len()).map(|i| (c, i)));
        }
    }
    v
}

/// Applicable R1− and R2− moves, R1− first, each group leftmost first.
pub fn deletions(code: &GaussCode) -> Vec<Move> {
    if code.kind() == CodeKind::Free {
        return Vec::new();
    }
    let segs = segments(code);
    let mut out = Vec::new();
    let mut curls = HashSet::new();
    for &s in &segs {
        if check_r1(code, s) && curls.insert(code.token(s).chord) {
            out.push(Move::R1Minus { at: s });
        }
    }
    let mut seen = HashSet::new();
    for &s in &segs {
        let (p, q) = segment(code, s);
        if code.token(p).chord == code.token(q).chord {
            continue;
        }
        // the second segment contains the partner of p
        let r = partner(code, p);
        for s2 in [code.prev_pos(r), r] {
            if check_r2(code, s, s2).is_some() {
                let key = if s < s2 { (s, s2) } else { (s2, s) };
                if seen.insert(key) {
                    out.push(Move::R2Minus { first: key.0, second: key.1 });
                }
            }
        }
    }
    out
}

fn r3_moves(code: &GaussCode) -> Vec<Move> {
    if code.kind() == CodeKind::Free {
        return Vec::new();
    }
    let mut out = Vec::new();
    let segs = segments(code);
    for &top in &segs {
        let (t0, t1) = segment(code, top);
        if code.token(t0).chord == code.token(t1).chord {
            continue;
        }
        for tm_top in [t0, t1] {
            let tb_top = if tm_top == t0 { t1 } else { t0 };
            let r = partner(code, tm_top);
            let s = partner(code, tb_top);
            for middle in [code.prev_pos(r), r] {
                let (m0, m1) = segment(code, middle);
                let mb_mid = if m0 == r { m1 } else { m0 };
                let w = partner(code, mb_mid);
                for bottom in [code.prev_pos(s), s] {
                    let (b0, b1) = segment(code, bottom);
                    let other = if b0 == s { b1 } else { b0 };
                    if other != w {
                        continue;
                    }
                    if check_r3(code, top, middle, bottom).is_some() {
                        let mv = Move::R3 { top, middle, bottom };
                        if !out.contains(&mv) {
                            out.push(mv);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Edges of the code, each named by the index it precedes.
fn edges(code: &GaussCode) -> Vec<Pos> {
    let mut v = Vec::new();
    for (c, comp) in code.components().iter().enumerate() {
        v.extend((0..comp.len().max(1)).map(|i| (c, i)));
    }
    v
}

fn r2_insertions(code: &GaussCode) -> Vec<Move> {
    let es = edges(code);
    let mut out = Vec::new();
    for &over_at in &es {
        for &under_at in &es {
            for sign in [Sign::Pos, Sign::Neg] {
                for antiparallel in [false, true] {
                    let firsts: &[bool] = if over_at == under_at { &[false, true] } else { &[false] };
                    for &under_first in firsts {
                        out.push(Move::R2Plus { over_at, under_at, sign, antiparallel, under_first });
                    }
                }
            }
        }
    }
    out
}

/// All deletions and R3 moves, plus every R1+ and R2+ insertion.
pub fn enumerate_moves(code: &GaussCode) -> Vec<Move> {
    if code.kind() == CodeKind::Free {
        return Vec::new();
    }
    let mut out = reducing_moves(code);
    for at in edges(code) {
        for first in [Passage::Over, Passage::Under] {
            for sign in [Sign::Pos, Sign::Neg] {
                out.push(Move::R1Plus { at, first, sign });
            }
        }
    }
    out.extend(r2_insertions(code));
    out
}

/// A replayable record of a simplification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub input: GaussCode,
    pub moves: Vec<Move>,
    pub output: GaussCode,
}

impl Certificate {
    /// Replays the moves from the input and checks the output.
    pub fn verify(&self) -> Result<bool, MoveError> {
        Ok(replay(&self.input, &self.moves)? == self.output)
    }
}

pub fn replay(code: &GaussCode, moves: &[Move]) -> Result<GaussCode, MoveError> {
    moves.iter().try_fold(code.clone(), |c, m| apply_move(&c, m))
}

/// Limits for the search phase of [`simplify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Longest move sequence tried between two reductions.
    pub depth: usize,
    /// Codes visited per search before giving up.
    pub max_states: usize,
}

impl Budget {
    pub fn steps(depth: usize) -> Self {
        Budget { depth, max_states: 20_000 }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::steps(4)
    }
}

fn greedy(code: GaussCode, moves: &mut Vec<Move>) -> GaussCode {
    let mut cur = code;
    while let Some(m) = first_deletion(&cur) {
        cur = apply_move(&cur, &m).expect("enumerated move applies");
        moves.push(m);
    }
    cur
}

/// R1− before R2−, then leftmost site.
fn first_deletion(code: &GaussCode) -> Option<Move> {
    let ds = deletions(code);
    let r1 = ds.iter().filter(|m| matches!(m, Move::R1Minus { .. })).min_by_key(|m| m.leftmost());
    r1.or_else(|| ds.iter().min_by_key(|m| m.leftmost())).copied()
}

/// Breadth-first search for a code with fewer chords than `start`.
fn search(start: &GaussCode, budget: Budget) -> Option<Vec<Move>> {
    let n = start.chord_count();
    let mut parent: HashMap<String, (String, Move)> = HashMap::new();
    let mut codes: HashMap<String, GaussCode> = HashMap::new();
    let root = start.to_string();
    codes.insert(root.clone(), start.clone());
    let mut frontier = VecDeque::from([root.clone()]);
    let mut visited: HashSet<String> = HashSet::from([start.rotation_key()]);

    let path_to = |parent: &HashMap<String, (String, Move)>, mut key: String| {
        let mut path = Vec::new();
        while let Some((prev, m)) = parent.get(&key) {
            path.push(*m);
            key = prev.clone();
        }
        path.reverse();
        path
    };

    for _ in 0..budget.depth {
        let level: Vec<String> = frontier.drain(..).collect();
        // expand the level in parallel, merge sequentially
        let expanded: Vec<(String, Vec<(Move, GaussCode)>)> = level
            .par_iter()
            .map(|key| {
                let code = &codes[key];
                let mut moves = reducing_moves(code);
                if code.chord_count() <= n + 1 {
                    moves.extend(r2_insertions(code));
                }
                let succ = moves
                    .into_iter()
                    .filter_map(|m| apply_move(code, &m).ok().map(|c| (m, c)))
                    .collect();
                (key.clone(), succ)
            })
            .collect();
        for (key, succ) in expanded {
            for (m, c) in succ {
                if !visited.insert(c.rotation_key()) {
                    continue;
                }
                let ck = c.to_string();
                parent.insert(ck.clone(), (key.clone(), m));
                if c.chord_count() < n {
                    return Some(path_to(&parent, ck));
                }
                codes.insert(ck.clone(), c);
                frontier.push_back(ck);
                if visited.len() >= budget.max_states {
                    return None;
                }
            }
        }
    }
    None
}

/// Greedy deletion followed by bounded search; never increases chord count.
pub fn simplify_with_certificate(code: &GaussCode, budget: Budget) -> Certificate {
    let mut moves = Vec::new();
    let mut cur = greedy(code.clone(), &mut moves);
    if code.kind() != CodeKind::Free {
        while !cur.is_empty() {
            let Some(path) = search(&cur, budget) else { break };
            cur = replay(&cur, &path).expect("search path replays");
            moves.extend(path);
            cur = greedy(cur, &mut moves);
        }
    }
    Certificate { input: code.clone(), moves, output: cur }
}

pub fn simplify(code: &GaussCode, budget: Budget) -> GaussCode {
    simplify_with_certificate(code, budget).output
}
