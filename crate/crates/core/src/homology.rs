//! Cubical homology of finite biracks.
//!
//! Operations here are the switch-form ones, `S(a, b_a) = (b, a^b)`, read
//! off from [`FiniteBirack::switch_map`]. For quandles they coincide with
//! the coloring tables. "Rack homology" is the full complex of a birack
//! with trivial lower operation and "quandle homology" its quotient by the
//! degenerate subcomplex.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteBirack, SwitchMap, Table};

/// Default bound on the number of cubes in a single degree.
pub const DEFAULT_CUBE_CAP: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("face index {index} out of range for a {dim}-cube")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("{cubes} cubes in degree {degree} exceed the cap of {cap}")]
    SizeCap { degree: usize, cubes: usize, cap: usize },
    #[error("boundary squares to a nonzero map in degree {0}")]
    NotAComplex(usize),
    #[error("the quotient complex needs a biquandle (a^a = a_a)")]
    NotBiquandle,
    #[error("degree {degree} needs boundaries through degree {needed}; complex stops at {max}")]
    DegreeTooHigh { degree: usize, needed: usize, max: usize },
}

/// A word `a₁⋯a_n` of labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeWord(pub Vec<usize>);

impl CubeWord {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1])
    }

    /// Position of the word in the lexicographic basis of `order^dim` words.
    pub fn index(&self, order: usize) -> usize {
        self.0.iter().fold(0, |acc, &a| acc * order + a)
    }

    pub fn from_index(mut idx: usize, order: usize, dim: usize) -> Self {
        let mut w = vec![0; dim];
        for slot in w.iter_mut().rev() {
            *slot = idx % order;
            idx /= order;
        }
        CubeWord(w)
    }
}

impl fmt::Display for CubeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceSign {
    Minus,
    Plus,
}

/// Switch-form operations `up[a][b] = a^b`, `down[a][b] = a_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeOperations {
    pub order: usize,
    pub up: Table,
    pub down: Table,
}

impl CubeOperations {
    pub fn of(b: &FiniteBirack) -> Self {
        Self::from_switch(&b.switch_map())
    }

    pub fn from_switch(s: &SwitchMap) -> Self {
        let (up, down) = s.operations();
        CubeOperations { order: s.order, up, down }
    }

    /// `a^a = a_a` for every label.
    pub fn has_biquandle_property(&self) -> bool {
        (0..self.order).all(|a| self.up[a][a] == self.down[a][a])
    }
}

/// `∂_i^−` deletes `a_i`; `∂_i^+` replaces the letters before it by
/// `a_j^{a_i}` and those after it by `(a_j)_{a_i}`. `i` is 1-based.
pub fn face(ops: &CubeOperations, w: &CubeWord, i: usize, sign: FaceSign) -> Result<CubeWord, HomologyError> {
    let n = w.dim();
    if i == 0 || i > n {
        return Err(HomologyError::IndexOutOfRange { index: i, dim: n });
    }
    let ai = w.0[i - 1];
    let out = w
        .0
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i - 1)
        .map(|(j, &a)| match sign {
            FaceSign::Minus => a,
            FaceSign::Plus if j < i - 1 => ops.up[a][ai],
            FaceSign::Plus => ops.down[a][ai],
        })
        .collect();
    Ok(CubeWord(out))
}

/// Dense integer matrix, `rows × cols`.
pub type IntMatrix = Vec<Vec<i64>>;

/// The cubical complex through `max_dim`. `boundaries[n]` is `∂_n`, with
/// rows indexed by `(n−1)`-cubes and columns by `n`-cubes; `∂_0` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    pub order: usize,
    pub max_dim: usize,
    pub ranks: Vec<usize>,
    pub boundaries: Vec<IntMatrix>,
    pub biquandle: bool,
}

fn boundary(ops: &CubeOperations, n: usize) -> IntMatrix {
    let m = ops.order;
    let rows = m.pow(n as u32 - 1);
    let cols: Vec<Vec<(usize, i64)>> = (0..m.pow(n as u32))
        .into_par_iter()
        .map(|c| {
            let w = CubeWord::from_index(c, m, n);
            let mut entries = Vec::with_capacity(2 * n);
            for i in 1..=n {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                entries.push((face(ops, &w, i, FaceSign::Minus).unwrap().index(m), sign));
                entries.push((face(ops, &w, i, FaceSign::Plus).unwrap().index(m), -sign));
            }
            entries
        })
        .collect();
    let mut mat = vec![vec![0i64; cols.len()]; rows];
    for (c, entries) in cols.iter().enumerate() {
        for &(r, v) in entries {
            mat[r][c] += v;
        }
    }
    mat
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![0i64; cols];
            for k in 0..inner {
                if row[k] != 0 {
                    for (o, x) in out.iter_mut().zip(&b[k]) {
                        *o += row[k] * x;
                    }
                }
            }
            out
        })
        .collect()
}

impl ChainComplex {
    /// Builds `∂_1 … ∂_max_dim` and rejects operations for which `∂² ≠ 0`.
    pub fn from_operations(ops: &CubeOperations, max_dim: usize, cap: usize) -> Result<Self, HomologyError> {
        let m = ops.order;
        let mut ranks = Vec::with_capacity(max_dim + 1);
        for n in 0..=max_dim {
            let cubes = m.checked_pow(n as u32).unwrap_or(usize::MAX);
            if cubes > cap {
                return Err(HomologyError::SizeCap { degree: n, cubes, cap });
            }
            ranks.push(cubes);
        }
        let mut boundaries = vec![Vec::new()];
        for n in 1..=max_dim {
            boundaries.push(boundary(ops, n));
        }
        let c = ChainComplex { order: m, max_dim, ranks, boundaries, biquandle: ops.has_biquandle_property() };
        if let Some(n) = c.square_failure() {
            return Err(HomologyError::NotAComplex(n));
        }
        Ok(c)
    }

    /// First degree `n` with `∂_{n−1} ∘ ∂_n ≠ 0`.
    pub fn square_failure(&self) -> Option<usize> {
        (2..=self.max_dim).find(|&n| {
            mat_mul(&self.boundaries[n - 1], &self.boundaries[n]).iter().flatten().any(|&x| x != 0)
        })
    }

    /// Non-degenerate cube indices in degree `n`.
    pub fn nondegenerate(&self, n: usize) -> Vec<usize> {
        (0..self.ranks[n]).filter(|&i| !CubeWord::from_index(i, self.order, n).is_degenerate()).collect()
    }

    /// `∂_n` of the quotient by degenerate cubes.
    pub fn quotient_boundary(&self, n: usize) -> IntMatrix {
        let rows = self.nondegenerate(n - 1);
        let cols = self.nondegenerate(n);
        rows.iter().map(|&r| cols.iter().map(|&c| self.boundaries[n][r][c]).collect()).collect()
    }

    /// Whether `∂` maps every degenerate cube into the degenerate span.
    pub fn degenerate_is_subcomplex(&self) -> bool {
        (1..=self.max_dim).all(|n| {
            let deg_cols: Vec<usize> =
                (0..self.ranks[n]).filter(|&i| CubeWord::from_index(i, self.order, n).is_degenerate()).collect();
            self.nondegenerate(n - 1).iter().all(|&r| deg_cols.iter().all(|&c| self.boundaries[n][r][c] == 0))
        })
    }
}

pub fn boundary_matrices(b: &FiniteBirack, max_dim: usize) -> Result<ChainComplex, HomologyError> {
    ChainComplex::from_operations(&CubeOperations::of(b), max_dim, DEFAULT_CUBE_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Full,
    BiquandleQuotient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub degree: usize,
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z_{d}")));
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "H_{} = {}", self.degree, parts.join(" + "))
    }
}

/// `H_k` from `∂_k` (`rows_k × dim C_k`) and `∂_{k+1}` (`dim C_k × cols`).
pub fn homology_from(dim_k: usize, d_k: &IntMatrix, d_k1: &IntMatrix, degree: usize) -> HomologyGroup {
    let rank_k = smith_invariants(d_k).len();
    let inv = smith_invariants(d_k1);
    let torsion = inv
        .iter()
        .filter(|d| !d.is_one())
        .map(|d| d.to_u64().expect("torsion coefficient fits in u64"))
        .collect();
    HomologyGroup { degree, free_rank: dim_k - rank_k - inv.len(), torsion }
}

pub fn homology(c: &ChainComplex, k: usize, variant: Variant) -> Result<HomologyGroup, HomologyError> {
    if k + 1 > c.max_dim {
        return Err(HomologyError::DegreeTooHigh { degree: k, needed: k + 1, max: c.max_dim });
    }
    // the map into degree 0 has no rows
    match variant {
        Variant::Full => {
            let d_k = if k == 0 { IntMatrix::new() } else { c.boundaries[k].clone() };
            Ok(homology_from(c.ranks[k], &d_k, &c.boundaries[k + 1], k))
        }
        Variant::BiquandleQuotient => {
            if !c.biquandle {
                return Err(HomologyError::NotBiquandle);
            }
            let dim = c.nondegenerate(k).len();
            let d_k = if k == 0 { IntMatrix::new() } else { c.quotient_boundary(k) };
            Ok(homology_from(dim, &d_k, &c.quotient_boundary(k + 1), k))
        }
    }
}

/// Nonzero invariant factors of an integer matrix, each dividing the next.
/// Pivots are the smallest nonzero entry in the remaining block.
pub fn smith_invariants(m: &IntMatrix) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
            let Some((pi, pj)) = pivot else { return out };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&p);
                    for j in t..cols {
                        let v = &a[t][j] * &q;
                        a[i][j] -= v;
                    }
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&p);
                    for i in t..rows {
                        let v = &a[i][t] * &q;
                        a[i][j] -= v;
                    }
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // the pivot must divide the rest of the block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => {
                    out.push(p.abs());
                    break;
                }
            }
        }
    }
    out
}

/// The double of a birack: labels are pairs `(a, c)` with
/// `(a,c)^{(b,d)} = (a^b, c^b)` and `(b,d)_{(a,c)} = (b_a, d^a)`. On the
/// pair set `W = {(ac, bc) | c^a = c^b}` these are the doubled operations
/// `(ac)^{(bc)} = a^b c^b`, `(bc)_{(ac)} = b_a c^a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleBirack {
    /// Label `k` of the double is the pair `pairs[k]`.
    pub pairs: Vec<(usize, usize)>,
    pub w: Vec<((usize, usize), (usize, usize))>,
    pub operations: CubeOperations,
    pub birack: FiniteBirack,
}

impl FiniteBirack {
    /// The birack whose switch-form operations are `ops`.
    pub fn from_cube_operations(ops: &CubeOperations) -> Result<Self, AlgebraError> {
        let m = ops.order;
        // S(a, b_a) = (b, a^b) inverts B(x, y) = (y^x, x_y)
        let mut up = vec![vec![usize::MAX; m]; m];
        let mut down = vec![vec![usize::MAX; m]; m];
        for a in 0..m {
            for b in 0..m {
                let (x, y) = (b, ops.up[a][b]);
                let (p, q) = (a, ops.down[b][a]);
                up[y][x] = p;
                down[x][y] = q;
            }
        }
        if up.iter().flatten().chain(down.iter().flatten()).any(|&v| v == usize::MAX) {
            return Err(AlgebraError::NotBirack("switch is not a bijection".into()));
        }
        FiniteBirack::from_up_down(up, down)
    }
}

pub fn double_birack(b: &FiniteBirack) -> Result<DoubleBirack, AlgebraError> {
    let ops = CubeOperations::of(b);
    let m = ops.order;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (0..m).map(move |c| (a, c))).collect();
    let id = |(a, c): (usize, usize)| a * m + c;
    let mut up = vec![vec![0; m * m]; m * m];
    let mut down = vec![vec![0; m * m]; m * m];
    for &(a, c) in &pairs {
        for &(bb, d) in &pairs {
            up[id((a, c))][id((bb, d))] = id((ops.up[a][bb], ops.up[c][bb]));
            down[id((bb, d))][id((a, c))] = id((ops.down[bb][a], ops.up[d][a]));
        }
    }
    let mut w = Vec::new();
    for a in 0..m {
        for bb in 0..m {
            for c in 0..m {
                if ops.up[c][a] == ops.up[c][bb] {
                    w.push(((a, c), (bb, c)));
                }
            }
        }
    }
    let operations = CubeOperations { order: m * m, up, down };
    let birack = FiniteBirack::from_cube_operations(&operations)?;
    Ok(DoubleBirack { pairs, w, operations, birack })
}

/// A finite group presentation; relators are words of (generator, ±1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<(usize, i8)>>,
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self
            .relators
            .iter()
            .map(|r| {
                let letters: Vec<String> = r
                    .iter()
                    .map(|&(g, e)| if e > 0 { self.generators[g].clone() } else { format!("{}^-1", self.generators[g]) })
                    .collect();
                letters.join("*")
            })
            .collect();
        write!(f, "< {} | {} >", self.generators.join(", "), rels.join(", "))
    }
}

impl Presentation {
    /// Free rank and torsion of the abelianization.
    pub fn abelianization(&self) -> (usize, Vec<u64>) {
        let n = self.generators.len();
        let rows: IntMatrix = self
            .relators
            .iter()
            .map(|r| {
                let mut row = vec![0i64; n];
                for &(g, e) in r {
                    row[g] += e as i64;
                }
                row
            })
            .collect();
        let inv = smith_invariants(&rows);
        let torsion = inv.iter().filter(|d| !d.is_one()).map(|d| d.to_u64().expect("fits")).collect();
        (n - inv.len(), torsion)
    }
}

/// `⟨x ∈ X | x y_x = y x^y⟩`, one raw relator `x·y_x·(x^y)⁻¹·y⁻¹` per
/// ordered pair.
pub fn pi1_presentation(b: &FiniteBirack) -> Presentation {
    let ops = CubeOperations::of(b);
    let m = ops.order;
    let generators = (0..m).map(|a| format!("x{a}")).collect();
    let mut relators = Vec::with_capacity(m * m);
    for x in 0..m {
        for y in 0..m {
            relators.push(vec![(x, 1), (ops.down[y][x], 1), (ops.up[x][y], -1), (y, -1)]);
        }
    }
    Presentation { generators, relators }
}
