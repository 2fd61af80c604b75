//! Planar diagrams: crossings listing their four edge labels
//! counterclockwise. A classical crossing starts at the incoming under-edge,
//! a virtual or flat crossing at either incoming edge; slots 0 and 2 carry
//! one strand and slots 1 and 3 the other.
//!
//! Text form, one crossing per line: `X a b c d`, `V a b c d`, `F a b c d`,
//! plus `L e` for a loop without crossings. `#` starts a comment.
//!
//! Flat moves act on flat diagrams (flat and virtual crossings only) and
//! keep the diagram planar: curls, bigons and triangles of either kind,
//! except a triangle with two flat crossings and one virtual one.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeKind, EdgeLayout, GaussCode, Passage, Sign, Token};
use crate::surface::{carrier_genus, crossing_half_edges, rotation, End, HalfEdge, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossingKind {
    Classical,
    Virtual,
    Flat,
}

impl CrossingKind {
    fn letter(self) -> char {
        match self {
            CrossingKind::Classical => 'X',
            CrossingKind::Virtual => 'V',
            CrossingKind::Flat => 'F',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarCrossing {
    pub kind: CrossingKind,
    pub edges: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarDiagram {
    pub crossings: Vec<PlanarCrossing>,
    /// Labels of loops that meet no crossing.
    pub loops: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanarError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("edge {0} must occur exactly twice")]
    LabelCount(usize),
    #[error("edge {0} cannot be oriented consistently")]
    Orientation(usize),
    #[error("diagram mixes classical and flat crossings")]
    MixedKinds,
    #[error("flat moves need a diagram without classical crossings")]
    ClassicalCrossing,
    #[error("move does not apply: {0}")]
    NotApplicable(String),
}

/// Internal dart form: dart `4c + s` is slot `s` of crossing `c`.
#[derive(Debug, Clone)]
struct Darts {
    kind: Vec<CrossingKind>,
    link: Vec<usize>,
    incoming: Vec<bool>,
    loops: usize,
}

fn pass(d: usize) -> usize {
    d & !3 | (d + 2) & 3
}

fn ccw(d: usize, by: usize) -> usize {
    d & !3 | (d + by) & 3
}

impl Darts {
    fn n(&self) -> usize {
        self.kind.len()
    }

    fn add_crossing(&mut self, kind: CrossingKind) -> usize {
        self.kind.push(kind);
        self.link.extend([usize::MAX; 4]);
        self.incoming.extend([false; 4]);
        self.kind.len() - 1
    }

    fn connect(&mut self, a: usize, b: usize) {
        self.link[a] = b;
        self.link[b] = a;
    }

    fn from_diagram(d: &PlanarDiagram) -> Result<Self, PlanarError> {
        let n = d.crossings.len();
        let mut seen: HashMap<usize, Vec<usize>> = HashMap::new();
        for (c, x) in d.crossings.iter().enumerate() {
            for (s, &e) in x.edges.iter().enumerate() {
                seen.entry(e).or_default().push(4 * c + s);
            }
        }
        for &e in &d.loops {
            if seen.contains_key(&e) {
                return Err(PlanarError::LabelCount(e));
            }
        }
        let mut link = vec![usize::MAX; 4 * n];
        let mut label = vec![0; 4 * n];
        let mut labels: Vec<_> = seen.keys().copied().collect();
        labels.sort_unstable();
        for e in labels {
            match seen[&e].as_slice() {
                &[a, b] => {
                    link[a] = b;
                    link[b] = a;
                    label[a] = e;
                    label[b] = e;
                }
                _ => return Err(PlanarError::LabelCount(e)),
            }
        }
        // orient by propagation from the known incoming slot 0
        let mut inc: Vec<Option<bool>> = vec![None; 4 * n];
        let mut stack = Vec::new();
        let set = |inc: &mut Vec<Option<bool>>, stack: &mut Vec<usize>, d: usize, v: bool| -> Result<(), PlanarError> {
            match inc[d] {
                Some(old) if old != v => Err(PlanarError::Orientation(label[d])),
                Some(_) => Ok(()),
                None => {
                    inc[d] = Some(v);
                    stack.push(d);
                    Ok(())
                }
            }
        };
        for c in 0..n {
            set(&mut inc, &mut stack, 4 * c, true)?;
        }
        let mut next_free = 0;
        loop {
            while let Some(x) = stack.pop() {
                let v = inc[x].unwrap();
                set(&mut inc, &mut stack, pass(x), !v)?;
                set(&mut inc, &mut stack, link[x], !v)?;
            }
            // components met only through slots 1 and 3 get a free choice
            while next_free < 4 * n && inc[next_free].is_some() {
                next_free += 1;
            }
            if next_free == 4 * n {
                break;
            }
            set(&mut inc, &mut stack, next_free, true)?;
        }
        Ok(Darts {
            kind: d.crossings.iter().map(|x| x.kind).collect(),
            link,
            incoming: inc.into_iter().map(Option::unwrap).collect(),
            loops: d.loops.len(),
        })
    }

    /// Relabels edges along components, rotating flat and virtual crossings
    /// so slot 0 is incoming.
    fn to_diagram(&self) -> PlanarDiagram {
        let mut me = self.clone();
        me.normalize();
        let n = me.n();
        let mut label = vec![0usize; 4 * n];
        let mut next = 1;
        for start in 0..4 * n {
            if me.incoming[start] || label[start] != 0 {
                continue;
            }
            let mut d = start;
            while label[d] == 0 {
                label[d] = next;
                label[me.link[d]] = next;
                next += 1;
                d = pass(me.link[d]);
            }
        }
        let crossings = (0..n)
            .map(|c| PlanarCrossing { kind: me.kind[c], edges: [0, 1, 2, 3].map(|s| label[4 * c + s]) })
            .collect();
        PlanarDiagram { crossings, loops: (next..next + me.loops).collect() }
    }

    fn rotate(&mut self, c: usize, r: usize) {
        if r.is_multiple_of(4) {
            return;
        }
        let perm = |d: usize| if d / 4 == c { ccw(d, 4 - r % 4) } else { d };
        let old_link: Vec<usize> = (0..4).map(|s| self.link[4 * c + s]).collect();
        let old_inc: Vec<bool> = (0..4).map(|s| self.incoming[4 * c + s]).collect();
        for s in 0..4 {
            let nd = perm(4 * c + s);
            let partner = perm(old_link[s]);
            self.link[nd] = partner;
            self.link[partner] = nd;
            self.incoming[nd] = old_inc[s];
        }
    }

    fn normalize(&mut self) {
        for c in 0..self.n() {
            if self.kind[c] != CrossingKind::Classical {
                let r = (0..4).find(|&s| self.incoming[4 * c + s]).expect("a crossing has incoming edges");
                self.rotate(c, r);
            }
        }
    }

    /// Face boundaries, each a cycle of darts walked with the face on the left.
    fn faces(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.link.len()];
        let mut out = Vec::new();
        for start in 0..self.link.len() {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                face.push(d);
                d = ccw(self.link[d], 3);
            }
            out.push(face);
        }
        out
    }

    fn pieces(&self) -> usize {
        let mut uf = UnionFind::new(self.n());
        for d in 0..self.link.len() {
            uf.union(d / 4, self.link[d] / 4);
        }
        uf.count()
    }

    fn genus(&self) -> usize {
        let twice = 2 * self.pieces() as i64 + self.n() as i64 - self.faces().len() as i64;
        (twice / 2) as usize
    }

    /// Component of every dart, loops numbered after the traced components.
    fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.link.len()];
        let mut count = 0;
        for start in 0..self.link.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut d = start;
            while comp[d] == usize::MAX {
                comp[d] = count;
                comp[pass(d)] = count;
                d = self.link[pass(d)];
            }
            count += 1;
        }
        (comp, count + self.loops)
    }

    /// Removes crossings, letting each strand pass straight through.
    fn delete(&mut self, cs: &[usize]) {
        let gone = |d: usize| cs.contains(&(d / 4));
        let mut visited = vec![false; self.link.len()];
        for d in 0..self.link.len() {
            if gone(d) || !gone(self.link[d]) || visited[d] {
                continue;
            }
            let mut p = self.link[d];
            let end = loop {
                visited[p] = true;
                visited[pass(p)] = true;
                let r = self.link[pass(p)];
                if !gone(r) {
                    break r;
                }
                p = r;
            };
            visited[d] = true;
            visited[end] = true;
            self.connect(d, end);
        }
        for d in 0..self.link.len() {
            if gone(d) && !visited[d] {
                self.loops += 1;
                let mut p = d;
                while !visited[p] {
                    visited[p] = true;
                    visited[pass(p)] = true;
                    p = self.link[pass(p)];
                }
            }
        }
        let keep: Vec<usize> = (0..self.n()).filter(|c| !cs.contains(c)).collect();
        let mut new_index = vec![usize::MAX; self.n()];
        for (i, &c) in keep.iter().enumerate() {
            new_index[c] = i;
        }
        let remap = |d: usize| 4 * new_index[d / 4] + d % 4;
        let mut link = Vec::with_capacity(4 * keep.len());
        let mut incoming = Vec::with_capacity(4 * keep.len());
        for &c in &keep {
            for s in 0..4 {
                link.push(remap(self.link[4 * c + s]));
                incoming.push(self.incoming[4 * c + s]);
            }
        }
        self.kind = keep.iter().map(|&c| self.kind[c]).collect();
        self.link = link;
        self.incoming = incoming;
    }
}

impl PlanarDiagram {
    pub fn parse(text: &str) -> Result<Self, PlanarError> {
        let mut crossings = Vec::new();
        let mut loops = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| PlanarError::Syntax(lineno + 1, m.to_string());
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap_or_default();
            let nums: Vec<usize> = parts
                .map(|p| p.parse::<usize>().map_err(|_| err("edge labels are positive integers")))
                .collect::<Result<_, _>>()?;
            if nums.contains(&0) {
                return Err(err("edge labels are positive integers"));
            }
            let kind = match head {
                "X" => CrossingKind::Classical,
                "V" => CrossingKind::Virtual,
                "F" => CrossingKind::Flat,
                "L" => {
                    if nums.len() != 1 {
                        return Err(err("a loop line has one label"));
                    }
                    loops.push(nums[0]);
                    continue;
                }
                _ => return Err(err("expected X, V, F or L")),
            };
            let edges: [usize; 4] = nums.try_into().map_err(|_| err("a crossing has four labels"))?;
            crossings.push(PlanarCrossing { kind, edges });
        }
        let d = PlanarDiagram { crossings, loops };
        Darts::from_diagram(&d)?;
        Ok(d)
    }

    fn darts(&self) -> Darts {
        Darts::from_diagram(self).expect("diagram was validated on construction")
    }

    pub fn crossing_count(&self, kind: CrossingKind) -> usize {
        self.crossings.iter().filter(|x| x.kind == kind).count()
    }

    pub fn component_count(&self) -> usize {
        self.darts().components().1
    }

    /// Genus of the surface the diagram's rotation system embeds in; 0 for
    /// every diagram that is honestly drawn in the plane.
    pub fn genus(&self) -> usize {
        self.darts().genus()
    }

    /// The Gauss code read off the classical (or flat) crossings. Flat
    /// crossings are lifted with the slot 0 strand passing under.
    pub fn to_gauss(&self) -> Result<GaussCode, PlanarError> {
        let d = self.darts();
        let classical = d.kind.contains(&CrossingKind::Classical);
        let flat = d.kind.contains(&CrossingKind::Flat);
        if classical && flat {
            return Err(PlanarError::MixedKinds);
        }
        let mut chord = vec![0usize; d.n()];
        let mut next = 1;
        let mut visited = vec![false; 4 * d.n()];
        let mut comps = Vec::new();
        for start in 0..4 * d.n() {
            if d.incoming[start] || visited[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut out = start;
            while !visited[out] {
                visited[out] = true;
                let h = d.link[out];
                let c = h / 4;
                if d.kind[c] != CrossingKind::Virtual {
                    if chord[c] == 0 {
                        chord[c] = next;
                        next += 1;
                    }
                    // slot 3 incoming means a positive crossing
                    let sign = if d.incoming[4 * c] == d.incoming[4 * c + 3] { Sign::Pos } else { Sign::Neg };
                    let passage = if h.is_multiple_of(2) { Passage::Under } else { Passage::Over };
                    comp.push(Token::new(chord[c], passage, sign));
                }
                out = pass(h);
            }
            comps.push(comp);
        }
        comps.extend(std::iter::repeat_n(Vec::new(), d.loops));
        let kind = if flat { CodeKind::Flat } else { CodeKind::Classical };
        GaussCode::with_kind(kind, comps).map_err(|e| PlanarError::NotApplicable(e.to_string()))
    }

    pub fn stats(&self) -> Result<crate::surface::DiagramStats, PlanarError> {
        let code = self.to_gauss()?;
        Ok(crate::surface::DiagramStats {
            n: code.chord_count(),
            v: Some(self.crossing_count(CrossingKind::Virtual)),
            g: carrier_genus(&code).map_err(|e| PlanarError::NotApplicable(e.to_string()))?,
            components: self.component_count(),
        })
    }
}

impl fmt::Display for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.crossings {
            let [a, b, c, d] = x.edges;
            writeln!(f, "{} {a} {b} {c} {d}", x.kind.letter())?;
        }
        for l in &self.loops {
            writeln!(f, "L {l}")?;
        }
        Ok(())
    }
}

/// Slot order of a classical crossing read from the code's rotation,
/// starting at the incoming under-edge.
fn classical_slots(layout: &EdgeLayout, code: &GaussCode, k: usize) -> [HalfEdge; 4] {
    let (o, u) = code.chord_positions(k + 1);
    let h = crossing_half_edges(layout, o, u);
    let rot = rotation(h, code.sign(k + 1));
    let start = rot.iter().position(|&x| x == h[2]).expect("under-in is in the rotation");
    [0, 1, 2, 3].map(|i| rot[(start + i) % 4])
}

/// A planar diagram whose classical crossings carry the code. Codes of
/// carrier genus 0 are drawn without virtual crossings. Otherwise crossings
/// sit on a line and edges run as half-circles above and below it, every
/// meeting of two arcs becoming a virtual crossing; the port rotation of
/// each crossing is chosen greedily to reduce that count.
pub fn realize(code: &GaussCode) -> PlanarDiagram {
    let n = code.chord_count();
    let layout = EdgeLayout::new(code);
    let loops = layout.free_loops().count();
    let slots: Vec<[HalfEdge; 4]> = (0..n).map(|k| classical_slots(&layout, code, k)).collect();
    let mut dart_of: HashMap<HalfEdge, usize> = HashMap::new();
    for (k, s) in slots.iter().enumerate() {
        for (i, h) in s.iter().enumerate() {
            dart_of.insert(*h, 4 * k + i);
        }
    }
    let mut base = Darts { kind: vec![CrossingKind::Classical; n], link: vec![usize::MAX; 4 * n], incoming: vec![false; 4 * n], loops };
    for (h, &d) in &dart_of {
        base.incoming[d] = h.end == End::Head;
    }
    let edges: Vec<(usize, usize)> = (0..layout.edge_count())
        .filter_map(|e| {
            let t = dart_of.get(&HalfEdge { edge: e, end: End::Tail })?;
            let h = dart_of.get(&HalfEdge { edge: e, end: End::Head })?;
            Some((*t, *h))
        })
        .collect();
    if carrier_genus(code) == Ok(0) {
        for &(t, h) in &edges {
            base.connect(t, h);
        }
        return base.to_diagram();
    }
    let mut turn = vec![0usize; n];
    let mut best = book_crossings(n, &edges, &turn).len();
    for k in 0..n {
        for r in 1..4 {
            let mut trial = turn.clone();
            trial[k] = r;
            let count = book_crossings(n, &edges, &trial).len();
            if count < best {
                best = count;
                turn = trial;
            }
        }
    }
    book_diagram(base, &edges, &turn).to_diagram()
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    upper: bool,
    from: i64,
    to: i64,
}

impl Arc {
    fn lo(&self) -> i64 {
        self.from.min(self.to)
    }
    fn hi(&self) -> i64 {
        self.from.max(self.to)
    }
}

/// Port of dart `d`: the CCW rotation at a crossing is NE, NW, SW, SE,
/// shifted by `turn`.
fn port(d: usize, turn: &[usize]) -> (bool, i64) {
    let k = d / 4;
    let p = (d % 4 + turn[k]) % 4;
    let x = 4 * k as i64 + if p == 0 || p == 3 { 3 } else { 1 };
    (p < 2, x)
}

fn arcs(n: usize, edges: &[(usize, usize)], turn: &[usize]) -> Vec<Vec<Arc>> {
    edges
        .iter()
        .enumerate()
        .map(|(e, &(t, h))| {
            let (ut, xt) = port(t, turn);
            let (uh, xh) = port(h, turn);
            if ut == uh {
                vec![Arc { upper: ut, from: xt, to: xh }]
            } else {
                let s = 4 * n as i64 + 2 + 2 * e as i64;
                vec![Arc { upper: ut, from: xt, to: s }, Arc { upper: uh, from: s, to: xh }]
            }
        })
        .collect()
}

/// Meeting point of two interleaved half-circles as a fraction, with the
/// sign of the turn from the first arc's direction to the second's.
struct Meeting {
    a: (usize, usize),
    b: (usize, usize),
    x: (i128, i128),
    positive: bool,
}

fn book_crossings(n: usize, edges: &[(usize, usize)], turn: &[usize]) -> Vec<Meeting> {
    let all = arcs(n, edges, turn);
    let flat: Vec<((usize, usize), Arc)> =
        all.iter().enumerate().flat_map(|(e, v)| v.iter().enumerate().map(move |(j, a)| ((e, j), *a))).collect();
    let mut out = Vec::new();
    for (i, &(ia, a)) in flat.iter().enumerate() {
        for &(ib, b) in &flat[i + 1..] {
            if a.upper != b.upper {
                continue;
            }
            let (first, second, fa, fb) = if a.lo() < b.lo() { (a, b, ia, ib) } else { (b, a, ib, ia) };
            if !(first.lo() < second.lo() && second.lo() < first.hi() && first.hi() < second.hi()) {
                continue;
            }
            let (l1, h1, l2, h2) = (first.lo() as i128, first.hi() as i128, second.lo() as i128, second.hi() as i128);
            let x = (l2 * h2 - l1 * h1, l2 + h2 - l1 - h1);
            // both traversed left to right, the turn from first to second
            // is counterclockwise above the line and clockwise below
            let dir = |arc: Arc| arc.from < arc.to;
            let positive = first.upper == (dir(first) == dir(second));
            out.push(Meeting { a: fa, b: fb, x, positive });
        }
    }
    out
}

fn book_diagram(mut d: Darts, edges: &[(usize, usize)], turn: &[usize]) -> Darts {
    let n = d.n();
    let all = arcs(n, edges, turn);
    let meetings = book_crossings(n, edges, turn);
    // per arc: (position along the line, virtual crossing, on the first arc)
    let mut events: HashMap<(usize, usize), Vec<((i128, i128), usize, bool)>> = HashMap::new();
    for m in &meetings {
        let v = d.add_crossing(CrossingKind::Virtual);
        events.entry(m.a).or_default().push((m.x, v, true));
        events.entry(m.b).or_default().push((m.x, v, false));
        // slots: first-in, then the second arc's in or out end, first-out
        let (second_in, second_out) = if m.positive { (1, 3) } else { (3, 1) };
        d.incoming[4 * v] = true;
        d.incoming[4 * v + 2] = false;
        d.incoming[4 * v + second_in] = true;
        d.incoming[4 * v + second_out] = false;
    }
    for (e, &(t, h)) in edges.iter().enumerate() {
        let mut cur = t;
        for (j, arc) in all[e].iter().enumerate() {
            let mut ev = events.remove(&(e, j)).unwrap_or_default();
            ev.sort_by(|p, q| (p.0 .0 * q.0 .1).cmp(&(q.0 .0 * p.0 .1)));
            if arc.from > arc.to {
                ev.reverse();
            }
            for (_, v, first) in ev {
                let slots = if first { (0, 2) } else if d.incoming[4 * v + 1] { (1, 3) } else { (3, 1) };
                d.connect(cur, 4 * v + slots.0);
                cur = 4 * v + slots.1;
            }
        }
        d.connect(cur, h);
    }
    d
}

/// A move on a flat diagram, addressed by dart `4·crossing + slot` in the
/// diagram's crossing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlatMove {
    /// New curl on the edge at `dart`, on one side or the other.
    CurlAdd { dart: usize, left: bool, kind: CrossingKind },
    CurlRemove { crossing: usize },
    /// Pushes the edge at `first` across the edge at `second`; both darts
    /// lie on one face.
    BigonAdd { first: usize, second: usize, kind: CrossingKind },
    BigonRemove { first: usize, second: usize },
    /// Slides a strand across the triangular face containing `dart`.
    Triangle { dart: usize },
}

fn flat_darts(d: &PlanarDiagram) -> Result<Darts, PlanarError> {
    let darts = d.darts();
    if darts.kind.contains(&CrossingKind::Classical) {
        return Err(PlanarError::ClassicalCrossing);
    }
    Ok(darts)
}

fn triangle_ok(d: &Darts, face: &[usize]) -> bool {
    if face.len() != 3 {
        return false;
    }
    let cs: Vec<usize> = face.iter().map(|x| x / 4).collect();
    if cs[0] == cs[1] || cs[1] == cs[2] || cs[0] == cs[2] {
        return false;
    }
    let flats = cs.iter().filter(|&&c| d.kind[c] == CrossingKind::Flat).count();
    flats != 2
}

pub fn flat_moves(diagram: &PlanarDiagram) -> Result<Vec<FlatMove>, PlanarError> {
    let d = flat_darts(diagram)?;
    let kinds = [CrossingKind::Flat, CrossingKind::Virtual];
    let mut out = Vec::new();
    for dart in 0..d.link.len() {
        if !d.incoming[dart] {
            for kind in kinds {
                out.push(FlatMove::CurlAdd { dart, left: true, kind });
                out.push(FlatMove::CurlAdd { dart, left: false, kind });
            }
        }
    }
    for c in 0..d.n() {
        if (0..4).any(|s| d.link[4 * c + s] == ccw(4 * c + s, 1)) {
            out.push(FlatMove::CurlRemove { crossing: c });
        }
    }
    for face in d.faces() {
        for i in 0..face.len() {
            for j in i + 1..face.len() {
                let (a, b) = (face[i], face[j]);
                if b != d.link[a] {
                    for kind in kinds {
                        out.push(FlatMove::BigonAdd { first: a, second: b, kind });
                    }
                }
            }
        }
        if face.len() == 2 && face[0] / 4 != face[1] / 4 && d.kind[face[0] / 4] == d.kind[face[1] / 4] {
            out.push(FlatMove::BigonRemove { first: face[0] / 4, second: face[1] / 4 });
        }
        if triangle_ok(&d, &face) {
            out.push(FlatMove::Triangle { dart: face[0] });
        }
    }
    Ok(out)
}

pub fn apply_flat_move(diagram: &PlanarDiagram, mv: &FlatMove) -> Result<PlanarDiagram, PlanarError> {
    let mut d = flat_darts(diagram)?;
    let bad = || PlanarError::NotApplicable(format!("{mv:?}"));
    let in_range = |x: usize, d: &Darts| x < d.link.len();
    match *mv {
        FlatMove::CurlAdd { dart, left, kind } => {
            if !in_range(dart, &d) || kind == CrossingKind::Classical {
                return Err(bad());
            }
            let (t, h) = if d.incoming[dart] { (d.link[dart], dart) } else { (dart, d.link[dart]) };
            let x = d.add_crossing(kind);
            let (loop_end, exit) = if left { (1, 3) } else { (3, 1) };
            d.connect(t, 4 * x);
            d.connect(4 * x + 2, 4 * x + loop_end);
            d.connect(4 * x + exit, h);
            d.incoming[4 * x] = true;
            d.incoming[4 * x + loop_end] = true;
        }
        FlatMove::CurlRemove { crossing } => {
            if crossing >= d.n() || !(0..4).any(|s| d.link[4 * crossing + s] == ccw(4 * crossing + s, 1)) {
                return Err(bad());
            }
            d.delete(&[crossing]);
        }
        FlatMove::BigonAdd { first, second, kind } => {
            if !in_range(first, &d) || !in_range(second, &d) || kind == CrossingKind::Classical {
                return Err(bad());
            }
            let face = d.faces().into_iter().find(|f| f.contains(&first)).expect("every dart bounds a face");
            if !face.contains(&second) || second == first || second == d.link[first] {
                return Err(bad());
            }
            let (e_end, f_end) = (d.link[first], d.link[second]);
            let (e_along, f_along) = (!d.incoming[first], !d.incoming[second]);
            let x = d.add_crossing(kind);
            let y = d.add_crossing(kind);
            // e: first → x0, x2 → y0, y2 → e_end; f: second → y3, y1 → x1, x3 → f_end
            d.connect(first, 4 * x);
            d.connect(4 * x + 2, 4 * y);
            d.connect(4 * y + 2, e_end);
            d.connect(second, 4 * y + 3);
            d.connect(4 * y + 1, 4 * x + 1);
            d.connect(4 * x + 3, f_end);
            for (dart, v) in [
                (4 * x, e_along),
                (4 * x + 2, !e_along),
                (4 * y, e_along),
                (4 * y + 2, !e_along),
                (4 * y + 3, f_along),
                (4 * y + 1, !f_along),
                (4 * x + 1, f_along),
                (4 * x + 3, !f_along),
            ] {
                d.incoming[dart] = v;
            }
        }
        FlatMove::BigonRemove { first, second } => {
            let ok = first < d.n()
                && second < d.n()
                && first != second
                && d.kind[first] == d.kind[second]
                && d.faces().iter().any(|f| f.len() == 2 && {
                    let (a, b) = (f[0] / 4, f[1] / 4);
                    (a, b) == (first, second) || (b, a) == (first, second)
                });
            if !ok {
                return Err(bad());
            }
            d.delete(&[first, second]);
        }
        FlatMove::Triangle { dart } => {
            if !in_range(dart, &d) {
                return Err(bad());
            }
            let face = d.faces().into_iter().find(|f| f.contains(&dart)).expect("every dart bounds a face");
            if !triangle_ok(&d, &face) {
                return Err(bad());
            }
            let start = face.iter().position(|&x| x == dart).unwrap();
            let [ta, tb, tc] = [0, 1, 2].map(|i| face[(start + i) % 3]);
            let (a, b, c) = (ta / 4, tb / 4, tc / 4);
            let (sa, sb, sc) = (ta % 4, tb % 4, tc % 4);
            let at = |x: usize, s: usize, k: usize| 4 * x + (s + k) % 4;
            // old external darts and the new darts taking over their roles
            let roles = [
                (at(a, sa, 2), at(b, sb, 1)),
                (at(a, sa, 3), at(c, sc, 0)),
                (at(b, sb, 2), at(c, sc, 1)),
                (at(b, sb, 3), at(a, sa, 0)),
                (at(c, sc, 2), at(a, sa, 1)),
                (at(c, sc, 3), at(b, sb, 0)),
            ];
            let role_of: HashMap<usize, usize> = roles.iter().copied().collect();
            let partners: Vec<(usize, usize)> = roles
                .iter()
                .map(|&(old, new)| {
                    let p = d.link[old];
                    (new, *role_of.get(&p).unwrap_or(&p))
                })
                .collect();
            for (new, p) in partners {
                d.connect(new, p);
            }
            d.connect(at(a, sa, 2), at(b, sb, 3));
            d.connect(at(a, sa, 3), at(c, sc, 2));
            d.connect(at(b, sb, 2), at(c, sc, 3));
        }
    }
    Ok(d.to_diagram())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatLinking {
    pub components: usize,
    /// Virtual crossings whose strands lie on different components.
    pub inter_component_virtual: usize,
    pub parity: u8,
}

pub fn flat_linking(diagram: &PlanarDiagram) -> FlatLinking {
    let d = diagram.darts();
    let (comp, components) = d.components();
    let inter = (0..d.n())
        .filter(|&c| d.kind[c] == CrossingKind::Virtual && comp[4 * c] != comp[4 * c + 1])
        .count();
    FlatLinking { components, inter_component_virtual: inter, parity: (inter % 2) as u8 }
}
