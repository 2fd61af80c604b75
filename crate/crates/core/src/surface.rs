//! Carrier surfaces, intersection graphs, and flat/free projections.
//!
//! The rotation at a crossing is read off from its chord arrow and sign.
//! Counterclockwise around a positive crossing the four half-edges are
//! over-out, under-out, over-in, under-in; around a negative crossing
//! over-out, under-in, over-in, under-out. Switching a crossing (both arrow
//! and sign change) leaves the rotation unchanged, so flat codes use the
//! same rule on their stored lift.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeKind, EdgeLayout, GaussCode, Pos, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum End {
    Tail,
    Head,
}

/// A half-edge: one end of a diagram edge, sitting at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct HalfEdge {
    pub edge: usize,
    pub end: End,
}

/// The four half-edges at a crossing, as (over-in, over-out, under-in, under-out).
pub(crate) fn crossing_half_edges(layout: &EdgeLayout, over: Pos, under: Pos) -> [HalfEdge; 4] {
    [
        HalfEdge { edge: layout.in_edge(over), end: End::Head },
        HalfEdge { edge: layout.out_edge(over), end: End::Tail },
        HalfEdge { edge: layout.in_edge(under), end: End::Head },
        HalfEdge { edge: layout.out_edge(under), end: End::Tail },
    ]
}

/// Counterclockwise rotation of the half-edges at a crossing.
pub(crate) fn rotation(h: [HalfEdge; 4], sign: Sign) -> [HalfEdge; 4] {
    let [oi, oo, ui, uo] = h;
    match sign {
        Sign::Pos => [oo, uo, oi, ui],
        Sign::Neg => [oo, ui, oi, uo],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("operation needs a single-component code")]
    MultiComponent,
    #[error("free codes carry no rotation data")]
    FreeCode,
}

/// Genus of the closed oriented surface obtained by thickening the code's
/// 4-valent ribbon graph and capping every boundary circle with a disk.
pub fn carrier_genus(code: &GaussCode) -> Result<usize, SurfaceError> {
    if code.kind() == CodeKind::Free {
        return Err(SurfaceError::FreeCode);
    }
    let n = code.chord_count();
    if n == 0 {
        return Ok(0);
    }
    let layout = EdgeLayout::new(code);
    let table = code.chord_table();
    let loops: Vec<usize> = layout.free_loops().collect();

    // successor of each half-edge in the counterclockwise rotation
    let slot = |h: HalfEdge| h.edge * 2 + if h.end == End::Tail { 0 } else { 1 };
    let mut succ = vec![usize::MAX; layout.edge_count() * 2];
    let mut vertex_of = vec![usize::MAX; layout.edge_count() * 2];
    for (k, &(o, u)) in table.iter().enumerate() {
        let rot = rotation(crossing_half_edges(&layout, o, u), code.token(o).sign);
        for i in 0..4 {
            succ[slot(rot[i])] = slot(rot[(i + 1) % 4]);
            vertex_of[slot(rot[i])] = k;
        }
    }
    let opposite = |s: usize| s ^ 1;

    let mut seen = vec![false; succ.len()];
    for &e in &loops {
        seen[2 * e] = true;
        seen[2 * e + 1] = true;
    }
    let mut faces = 0usize;
    for start in 0..succ.len() {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            h = succ[opposite(h)];
        }
    }

    // connected pieces of the underlying graph
    let mut uf = UnionFind::new(n);
    for e in 0..layout.edge_count() {
        if loops.contains(&e) {
            continue;
        }
        uf.union(vertex_of[2 * e], vertex_of[2 * e + 1]);
    }
    let pieces = uf.count();
    let v = n as i64;
    let e = 2 * n as i64;
    let twice_genus = 2 * pieces as i64 - v + e - faces as i64;
    debug_assert!(twice_genus >= 0 && twice_genus % 2 == 0);
    Ok((twice_genus / 2) as usize)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), count: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.count -= 1;
        true
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionGraph {
    pub vertices: Vec<usize>,
    /// Unordered pairs (a, b) with a < b.
    pub edges: Vec<(usize, usize)>,
    /// Local writhe of each vertex, aligned with `vertices`.
    pub labels: Vec<i8>,
}

impl IntersectionGraph {
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search(&key).is_ok()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            deg[a - 1] += 1;
            deg[b - 1] += 1;
        }
        deg
    }
}

pub fn intersection_graph(code: &GaussCode) -> Result<IntersectionGraph, SurfaceError> {
    if code.component_count() != 1 {
        return Err(SurfaceError::MultiComponent);
    }
    let n = code.chord_count();
    let mut ends = vec![Vec::with_capacity(2); n];
    for (i, t) in code.components()[0].iter().enumerate() {
        ends[t.chord - 1].push(i);
    }
    let mut edges = Vec::new();
    for a in 0..n {
        let (lo, hi) = (ends[a][0], ends[a][1]);
        for b in a + 1..n {
            let inside = ends[b].iter().filter(|&&p| lo < p && p < hi).count();
            if inside == 1 {
                edges.push((a + 1, b + 1));
            }
        }
    }
    Ok(IntersectionGraph {
        vertices: (1..=n).collect(),
        edges,
        labels: (1..=n).map(|k| code.sign(k).value() as i8).collect(),
    })
}

/// Forgets over/under; chord orientations and interleaving are kept.
pub fn project_flat(code: &GaussCode) -> GaussCode {
    GaussCode::from_raw(CodeKind::Flat, code.components().to_vec())
}

/// Forgets over/under and signs.
pub fn project_free(code: &GaussCode) -> GaussCode {
    GaussCode::from_raw(CodeKind::Free, code.components().to_vec())
}

/// Classical crossings, virtual crossings (diagrams only), carrier genus,
/// and component count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramStats {
    pub n: usize,
    pub v: Option<usize>,
    pub g: usize,
    pub components: usize,
}

pub fn stats(code: &GaussCode) -> Result<DiagramStats, SurfaceError> {
    Ok(DiagramStats {
        n: code.chord_count(),
        v: None,
        g: carrier_genus(code)?,
        components: code.component_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::parse_gauss;

    fn g(s: &str) -> usize {
        carrier_genus(&parse_gauss(s).unwrap()).unwrap()
    }

    #[test]
    fn genus_examples() {
        assert_eq!(g(""), 0);
        assert_eq!(g("O1+,U1+"), 0);
        assert_eq!(g("O1+,U2+,O3+,U1+,O2+,U3+"), 0);
        assert_eq!(g("O1-,U2-,O3-,U1-,O2-,U3-"), 0);
        assert_eq!(g("O1+,O2+,U1+,U2+"), 1);
        // a classical Hopf link
        assert_eq!(g("O1+,U2+|U1+,O2+"), 0);
        // two planar pieces side by side
        assert_eq!(g("O1+,U1+|O2-,U2-"), 0);
    }

    #[test]
    fn genus_of_nonalternating_trefoil_shadow_is_planar() {
        // switching one crossing keeps the shadow planar
        assert_eq!(g("U1-,U2+,O3+,O1-,O2+,U3+"), 0);
    }

    #[test]
    fn flat_projection_keeps_genus() {
        for s in ["O1+,U2+,O3+,U1+,O2+,U3+", "O1+,O2+,U1+,U2+", "O1-,U2+,U1-,O2+"] {
            let c = parse_gauss(s).unwrap();
            assert_eq!(carrier_genus(&project_flat(&c)).unwrap(), carrier_genus(&c).unwrap());
        }
        assert_eq!(
            carrier_genus(&project_free(&parse_gauss("O1+,U1+").unwrap())),
            Err(SurfaceError::FreeCode)
        );
    }

    #[test]
    fn intersection_graph_examples() {
        let empty = intersection_graph(&GaussCode::unknot()).unwrap();
        assert!(empty.vertices.is_empty() && empty.edges.is_empty());

        let vt = intersection_graph(&parse_gauss("O1+,O2+,U1+,U2+").unwrap()).unwrap();
        assert_eq!(vt.edges, vec![(1, 2)]);
        assert_eq!(vt.labels, vec![1, 1]);

        let tre = intersection_graph(&parse_gauss("O1+,U2+,O3+,U1+,O2+,U3+").unwrap()).unwrap();
        assert_eq!(tre.edges, vec![(1, 2), (1, 3), (2, 3)]);

        assert_eq!(
            intersection_graph(&parse_gauss("O1+,U1+|").unwrap()),
            Err(SurfaceError::MultiComponent)
        );
    }

    #[test]
    fn projections() {
        let c = parse_gauss("O1+,U1+").unwrap();
        let f = project_flat(&c);
        assert_eq!(f.to_string(), "F1+,F1+");
        assert_eq!(project_free(&f).to_string(), "C1,C1");
        // switching does not change the flat projection
        let s = parse_gauss("U1-,O1-").unwrap();
        assert_eq!(project_flat(&s), f);
        let vt = project_flat(&parse_gauss("O1+,O2+,U1+,U2+").unwrap());
        assert_eq!(vt.to_string(), "F1+,F2+,F1+,F2+");
        assert_eq!(intersection_graph(&vt).unwrap().edges, vec![(1, 2)]);
    }
}
