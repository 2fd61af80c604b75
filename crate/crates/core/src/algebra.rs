//! Finite biracks, biquandles and involutory quandles: axiom checks,
//! enumeration of small examples, and coloring counts.
//!
//! Tables are indexed `up[a][b] = a^b`, `down[a][b] = a_b`,
//! `up_bar[a][b] = a^b̄`, `down_bar[a][b] = a_b̄`.
//!
//! Colorings label every edge of a code. At a positive crossing with
//! under-input `a` and over-input `b` the under-output is `a^b` and the
//! over-output `b_a`. At a negative crossing the barred operations are used
//! the same way: under-output `a^b̄`, over-output `b_ā`. Reading the
//! directly oriented Reidemeister II move with this rule gives axiom 2
//! verbatim, and curls give axiom 1.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{EdgeLayout, GaussCode, Sign};

pub type Table = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("table shape does not match order {0}")]
    Shape(usize),
    #[error("table entry {0} out of range")]
    Range(usize),
    #[error("tables fail the birack axioms: {0}")]
    NotBirack(String),
    #[error("malformed table file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteBirack {
    pub order: usize,
    pub up: Table,
    pub down: Table,
    pub up_bar: Table,
    pub down_bar: Table,
    #[serde(rename = "isBiquandle")]
    pub is_biquandle: bool,
    #[serde(rename = "isStrong")]
    pub is_strong: bool,
}

fn check_shape(m: usize, t: &Table) -> Result<(), AlgebraError> {
    if t.len() != m || t.iter().any(|r| r.len() != m) {
        return Err(AlgebraError::Shape(m));
    }
    if let Some(&bad) = t.iter().flatten().find(|&&x| x >= m) {
        return Err(AlgebraError::Range(bad));
    }
    Ok(())
}

impl FiniteBirack {
    /// Validates the tables and records the biquandle and strong flags.
    pub fn new(up: Table, down: Table, up_bar: Table, down_bar: Table) -> Result<Self, AlgebraError> {
        let m = up.len();
        for t in [&up, &down, &up_bar, &down_bar] {
            check_shape(m, t)?;
        }
        let mut b = FiniteBirack { order: m, up, down, up_bar, down_bar, is_biquandle: false, is_strong: false };
        let rep = check_axioms(&b);
        if !rep.birack {
            let why = rep.failures.first().map(|f| f.to_string()).unwrap_or_default();
            return Err(AlgebraError::NotBirack(why));
        }
        b.is_biquandle = rep.biquandle;
        b.is_strong = rep.strong;
        Ok(b)
    }

    /// Builds the barred operations as the inverse of the positive switch.
    pub fn from_up_down(up: Table, down: Table) -> Result<Self, AlgebraError> {
        let m = up.len();
        check_shape(m, &up)?;
        check_shape(m, &down)?;
        let mut up_bar = vec![vec![usize::MAX; m]; m];
        let mut down_bar = vec![vec![usize::MAX; m]; m];
        for a in 0..m {
            for b in 0..m {
                let (c, d) = (up[a][b], down[b][a]);
                if up_bar[c][d] != usize::MAX {
                    return Err(AlgebraError::NotBirack("positive switch is not a bijection".into()));
                }
                up_bar[c][d] = a;
                down_bar[d][c] = b;
            }
        }
        Self::new(up, down, up_bar, down_bar)
    }

    /// All four operations trivial: `a^b = a_b = a`.
    pub fn trivial(m: usize) -> Self {
        let t: Table = (0..m).map(|a| vec![a; m]).collect();
        Self::new(t.clone(), t.clone(), t.clone(), t).expect("trivial tables are a biquandle")
    }

    /// The dihedral quandle `R_m`: `a^b = 2b − a mod m`, lower operations trivial.
    pub fn dihedral(m: usize) -> Self {
        let up: Table = (0..m).map(|a| (0..m).map(|b| (2 * b + m - a) % m).collect()).collect();
        let down: Table = (0..m).map(|a| vec![a; m]).collect();
        Self::new(up.clone(), down.clone(), up, down).expect("dihedral quandle is a biquandle")
    }

    pub fn positive(&self, a: usize, b: usize) -> (usize, usize) {
        (self.up[a][b], self.down[b][a])
    }

    pub fn negative(&self, a: usize, b: usize) -> (usize, usize) {
        (self.up_bar[a][b], self.down_bar[b][a])
    }

    /// The switch in the form `S(a, b_a) = (b, a^b)` used by cubical
    /// homology. It is the inverse of the braid-ordered switch
    /// `B(x, y) = (y^x, x_y)`.
    pub fn switch_map(&self) -> SwitchMap {
        let m = self.order;
        let mut map = vec![(0, 0); m * m];
        for x in 0..m {
            for y in 0..m {
                let image = (self.up[y][x], self.down[x][y]);
                map[image.0 * m + image.1] = (x, y);
            }
        }
        SwitchMap { order: m, map }
    }

    /// Table file text: the order, then the four tables row by row.
    pub fn to_table_text(&self) -> String {
        let mut s = format!("{}\n", self.order);
        for t in [&self.up, &self.down, &self.up_bar, &self.down_bar] {
            s.push('\n');
            for row in t {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                s.push_str(&cells.join(" "));
                s.push('\n');
            }
        }
        s
    }

    pub fn parse_table_text(text: &str) -> Result<Self, AlgebraError> {
        let nums: Vec<usize> = text
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| AlgebraError::Parse(format!("not a number: {w}"))))
            .collect::<Result<_, _>>()?;
        let (&m, rest) = nums.split_first().ok_or_else(|| AlgebraError::Parse("empty".into()))?;
        if rest.len() != 4 * m * m {
            return Err(AlgebraError::Parse(format!("expected {} entries, found {}", 4 * m * m, rest.len())));
        }
        let table = |k: usize| -> Table { (0..m).map(|r| rest[k * m * m + r * m..][..m].to_vec()).collect() };
        Self::new(table(0), table(1), table(2), table(3))
    }

    /// The same birack with labels renamed by `perm`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let m = self.order;
        let map = |t: &Table| -> Table {
            let mut out = vec![vec![0; m]; m];
            for a in 0..m {
                for b in 0..m {
                    out[perm[a]][perm[b]] = perm[t[a][b]];
                }
            }
            out
        };
        FiniteBirack {
            order: m,
            up: map(&self.up),
            down: map(&self.down),
            up_bar: map(&self.up_bar),
            down_bar: map(&self.down_bar),
            is_biquandle: self.is_biquandle,
            is_strong: self.is_strong,
        }
    }

    fn flat_key(&self) -> Vec<usize> {
        [&self.up, &self.down, &self.up_bar, &self.down_bar].iter().flat_map(|t| t.iter().flatten().copied()).collect()
    }

    /// Lexicographically least relabeling.
    pub fn canonical(&self) -> Self {
        permutations(self.order)
            .into_iter()
            .map(|p| self.relabeled(&p))
            .min_by(|x, y| x.flat_key().cmp(&y.flat_key()))
            .expect("at least the identity permutation")
    }
}

pub(crate) fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// A violated axiom with the labels witnessing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomFailure {
    pub axiom: String,
    pub witness: Vec<usize>,
}

impl fmt::Display for AxiomFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {:?}", self.axiom, self.witness)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub birack: bool,
    pub biquandle: bool,
    pub strong: bool,
    pub failures: Vec<AxiomFailure>,
}

/// Checks the four biquandle axioms as literally stated: axiom 1 (curls),
/// axiom 2 (direct second move), axiom 3 (reverse second move, with
/// uniqueness deciding strength), axiom 4 (third move, right and left).
/// A birack satisfies 2–4, a biquandle also 1.
pub fn check_axioms(b: &FiniteBirack) -> AxiomReport {
    let m = b.order;
    let (u, d, ub, db) = (&b.up, &b.down, &b.up_bar, &b.down_bar);
    let mut failures = Vec::new();
    let mut fail = |axiom: &str, witness: Vec<usize>| {
        if !failures.iter().any(|f: &AxiomFailure| f.axiom == axiom) {
            failures.push(AxiomFailure { axiom: axiom.to_string(), witness });
        }
    };

    let mut ax1 = true;
    for a in 0..m {
        if !(0..m).any(|x| d[a][x] == x && u[x][a] == a) {
            ax1 = false;
            fail("axiom 1 (x = a_x, a = x^a)", vec![a]);
        }
        if !(0..m).any(|y| ub[a][y] == y && db[y][a] == a) {
            ax1 = false;
            fail("axiom 1 (y = a^ȳ, a = y_ā)", vec![a]);
        }
    }

    let mut ax2 = true;
    for a in 0..m {
        for bb in 0..m {
            let checks = [
                (ub[u[a][bb]][d[bb][a]] == a, "axiom 2 (a = a^{b b_a‾})"),
                (db[d[bb][a]][u[a][bb]] == bb, "axiom 2 (b = b_{a a^b‾})"),
                (u[ub[a][bb]][db[bb][a]] == a, "axiom 2 (a = a^{b̄ b_ā})"),
                (d[db[bb][a]][ub[a][bb]] == bb, "axiom 2 (b = b_{ā a^b̄})"),
            ];
            for (ok, name) in checks {
                if !ok {
                    ax2 = false;
                    fail(name, vec![a, bb]);
                }
            }
        }
    }

    let (mut ax3, mut strong) = (true, true);
    for a in 0..m {
        for bb in 0..m {
            let xy = (0..m)
                .flat_map(|x| (0..m).map(move |y| (x, y)))
                .filter(|&(x, y)| d[x][bb] == a && ub[y][a] == bb && u[bb][x] == y && db[a][y] == x)
                .count();
            let zt = (0..m)
                .flat_map(|z| (0..m).map(move |t| (z, t)))
                .filter(|&(z, t)| u[t][a] == bb && d[a][t] == z && db[z][bb] == a && ub[bb][z] == t)
                .count();
            if xy == 0 || zt == 0 {
                ax3 = false;
                fail("axiom 3 (existence)", vec![a, bb]);
            }
            if xy != 1 || zt != 1 {
                strong = false;
            }
        }
    }

    let mut ax4 = true;
    for (up, dn, tag) in [(u, d, "right"), (ub, db, "left")] {
        for a in 0..m {
            for bb in 0..m {
                for c in 0..m {
                    let e1 = up[up[a][bb]][c] == up[up[a][dn[c][bb]]][up[bb][c]];
                    let e2 = dn[dn[c][bb]][a] == dn[dn[c][up[a][bb]]][dn[bb][a]];
                    let e3 = up[dn[bb][a]][dn[c][up[a][bb]]] == dn[up[bb][c]][up[a][dn[c][bb]]];
                    for (ok, k) in [(e1, 1), (e2, 2), (e3, 3)] {
                        if !ok {
                            ax4 = false;
                            fail(&format!("axiom 4 ({tag}, equation {k})"), vec![a, bb, c]);
                        }
                    }
                }
            }
        }
    }

    let birack = ax2 && ax3 && ax4;
    AxiomReport { birack, biquandle: birack && ax1, strong: ax3 && strong, failures }
}

/// The switch-map formulation, checked independently of [`check_axioms`]:
/// the positive and negative switches are mutually inverse, every
/// one-sided operation is a bijection, the sideways maps
/// `(u_in, o_out) ↦ (o_in, u_out)` are bijections, the braid-ordered
/// switches satisfy the Yang–Baxter equation, and (for biquandles) the
/// sideways maps carry the diagonal onto itself. Returns (birack, biquandle).
pub fn check_switch_form(b: &FiniteBirack) -> (bool, bool) {
    let m = b.order;
    let pairs = || (0..m).flat_map(move |x| (0..m).map(move |y| (x, y)));
    let inverse = pairs().all(|(x, y)| {
        let (p, q) = b.positive(x, y);
        let (r, s) = b.negative(x, y);
        b.negative(p, q) == (x, y) && b.positive(r, s) == (x, y)
    });
    let column_bijective = |t: &Table| {
        (0..m).all(|col| (0..m).map(|row| t[row][col]).collect::<HashSet<_>>().len() == m)
    };
    let ops_bijective = [&b.up, &b.down, &b.up_bar, &b.down_bar].iter().all(|t| column_bijective(t));
    if !inverse || !ops_bijective {
        return (false, false);
    }
    // sideways maps, well defined once the lower operations are bijective
    let sideways = |neg: bool| -> Vec<(usize, usize)> {
        pairs()
            .map(|(a, dd)| {
                let (lower, upper) = if neg { (&b.down_bar, &b.up_bar) } else { (&b.down, &b.up) };
                let o_in = (0..m).find(|&o| lower[o][a] == dd).expect("bijective column");
                (o_in, upper[a][o_in])
            })
            .collect()
    };
    let (sp, sn) = (sideways(false), sideways(true));
    let bijective = |s: &Vec<(usize, usize)>| s.iter().collect::<HashSet<_>>().len() == m * m;
    if !bijective(&sp) || !bijective(&sn) {
        return (false, false);
    }
    let braid = |neg: bool, x: usize, y: usize| {
        if neg {
            (b.up_bar[y][x], b.down_bar[x][y])
        } else {
            (b.up[y][x], b.down[x][y])
        }
    };
    let yb = [false, true].iter().all(|&neg| {
        pairs().all(|(x, y)| {
            (0..m).all(|z| {
                let l1 = braid(neg, x, y);
                let (p, q) = braid(neg, l1.1, z);
                let (r, s) = braid(neg, l1.0, p);
                let r1 = braid(neg, y, z);
                let (p2, q2) = braid(neg, x, r1.0);
                let (r2, s2) = braid(neg, q2, r1.1);
                (r, s, q) == (p2, r2, s2)
            })
        })
    });
    if !yb {
        return (false, false);
    }
    let diag = |s: &Vec<(usize, usize)>| (0..m).all(|a| s[a * m + a].0 == s[a * m + a].1);
    (true, diag(&sp) && diag(&sn))
}

/// A switch `S` on pairs of labels, in the form `S(a, b_a) = (b, a^b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchMap {
    pub order: usize,
    /// `map[a * order + c]` is `S(a, c)`.
    pub map: Vec<(usize, usize)>,
}

impl SwitchMap {
    pub fn apply(&self, a: usize, c: usize) -> (usize, usize) {
        self.map[a * self.order + c]
    }

    pub fn is_bijection(&self) -> bool {
        self.map.iter().collect::<HashSet<_>>().len() == self.order * self.order
    }

    /// Tables `(up, down)` with `up[a][b] = a^b` and `down[b][a] = b_a`
    /// read off from `S(a, b_a) = (b, a^b)`.
    pub fn operations(&self) -> (Table, Table) {
        let m = self.order;
        let mut up = vec![vec![0; m]; m];
        let mut down = vec![vec![0; m]; m];
        for a in 0..m {
            for c in 0..m {
                let (bb, dd) = self.apply(a, c);
                down[bb][a] = c;
                up[a][bb] = dd;
            }
        }
        (up, down)
    }

    /// The sideways map `G(a, b) = (b_a, a^b)`.
    pub fn sideways(&self, a: usize, b: usize) -> (usize, usize) {
        let (up, down) = self.operations();
        (down[b][a], up[a][b])
    }

    pub fn preserves_diagonal(&self) -> bool {
        let (up, down) = self.operations();
        (0..self.order).all(|a| up[a][a] == down[a][a])
    }

    /// `(S×1)(1×S)(S×1) = (1×S)(S×1)(1×S)` on all triples.
    pub fn yang_baxter(&self) -> bool {
        let m = self.order;
        let s = |x, y| self.apply(x, y);
        (0..m).all(|x| {
            (0..m).all(|y| {
                (0..m).all(|z| {
                    let (a1, b1) = s(x, y);
                    let (b2, c2) = s(b1, z);
                    let (a3, b3) = s(a1, b2);
                    let lhs = (a3, b3, c2);
                    let (b1, c1) = s(y, z);
                    let (a2, b2) = s(x, b1);
                    let (b3, c3) = s(b2, c1);
                    lhs == (a2, b3, c3)
                })
            })
        })
    }
}

/// All biracks of order `m` satisfying `pred`, one per isomorphism class.
/// Search covers `m ≤ 4`.
pub fn enumerate_biracks(m: usize, pred: impl Fn(&FiniteBirack) -> bool + Sync) -> Vec<FiniteBirack> {
    assert!(m <= 4, "enumeration is limited to order 4");
    if m == 0 {
        return Vec::new();
    }
    // the search fixes the positive switch column by column: column `b` of
    // `up` and column `b` of `down` are permutations of the labels
    let perms = permutations(m);
    let first: Vec<(usize, usize)> = (0..perms.len()).flat_map(|i| (0..perms.len()).map(move |j| (i, j))).collect();
    let found: Vec<FiniteBirack> = first
        .par_iter()
        .flat_map_iter(|&(i, j)| {
            let mut up = vec![vec![usize::MAX; m]; m];
            let mut down = vec![vec![usize::MAX; m]; m];
            for a in 0..m {
                up[a][0] = perms[i][a];
                down[a][0] = perms[j][a];
            }
            let mut out = Vec::new();
            if partial_ok(&up, &down) {
                extend(&perms, 1, &mut up, &mut down, &mut out);
            }
            out.into_iter().filter_map(|(u, d)| FiniteBirack::from_up_down(u, d).ok())
        })
        .filter(|b| pred(b))
        .map(|b| b.canonical())
        .collect();
    let mut seen = HashSet::new();
    let mut out: Vec<FiniteBirack> = found.into_iter().filter(|b| seen.insert(b.flat_key())).collect();
    out.sort_by_key(|b| b.flat_key());
    out
}

fn extend(perms: &[Vec<usize>], col: usize, up: &mut Table, down: &mut Table, out: &mut Vec<(Table, Table)>) {
    let m = up.len();
    if col == m {
        out.push((up.clone(), down.clone()));
        return;
    }
    for pu in perms {
        for a in 0..m {
            up[a][col] = pu[a];
        }
        for pd in perms {
            for a in 0..m {
                down[a][col] = pd[a];
            }
            if partial_ok(up, down) {
                extend(perms, col + 1, up, down, out);
            }
        }
    }
    for a in 0..m {
        up[a][col] = usize::MAX;
        down[a][col] = usize::MAX;
    }
}

/// Yang–Baxter for `B(x, y) = (y^x, x_y)` on every triple whose lookups
/// are already determined.
fn partial_ok(up: &Table, down: &Table) -> bool {
    let m = up.len();
    let get = |t: &Table, a: usize, b: usize| -> Option<usize> {
        let v = t[a][b];
        (v != usize::MAX).then_some(v)
    };
    let braid = |x: usize, y: usize| -> Option<(usize, usize)> { Some((get(up, y, x)?, get(down, x, y)?)) };
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                let lhs = (|| {
                    let l1 = braid(x, y)?;
                    let (p, q) = braid(l1.1, z)?;
                    let (r, s) = braid(l1.0, p)?;
                    Some((r, s, q))
                })();
                let rhs = (|| {
                    let r1 = braid(y, z)?;
                    let (p2, q2) = braid(x, r1.0)?;
                    let (r2, s2) = braid(q2, r1.1)?;
                    Some((p2, r2, s2))
                })();
                if let (Some(l), Some(r)) = (lhs, rhs) {
                    if l != r {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// An involutory quandle: `aa = a`, `(ab)b = a`, `(ab)c = (ac)(bc)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvolutoryQuandle {
    pub order: usize,
    /// `table[a][b] = ab`
    pub table: Table,
}

impl InvolutoryQuandle {
    pub fn new(table: Table) -> Result<Self, AlgebraError> {
        let m = table.len();
        check_shape(m, &table)?;
        let q = InvolutoryQuandle { order: m, table };
        if let Some(w) = q.violation() {
            return Err(AlgebraError::NotBirack(format!("not an involutory quandle at {w:?}")));
        }
        Ok(q)
    }

    /// `ab = 2b − a mod m`.
    pub fn dihedral(m: usize) -> Self {
        Self::new((0..m).map(|a| (0..m).map(|b| (2 * b + m - a) % m).collect()).collect())
            .expect("dihedral quandles are involutory")
    }

    fn violation(&self) -> Option<Vec<usize>> {
        let t = &self.table;
        let m = self.order;
        for a in 0..m {
            if t[a][a] != a {
                return Some(vec![a]);
            }
            for b in 0..m {
                if t[t[a][b]][b] != a {
                    return Some(vec![a, b]);
                }
                for c in 0..m {
                    if t[t[a][b]][c] != t[t[a][c]][t[b][c]] {
                        return Some(vec![a, b, c]);
                    }
                }
            }
        }
        None
    }

    fn relabeled(&self, perm: &[usize]) -> Table {
        let m = self.order;
        let mut out = vec![vec![0; m]; m];
        for a in 0..m {
            for b in 0..m {
                out[perm[a]][perm[b]] = perm[self.table[a][b]];
            }
        }
        out
    }
}

/// All involutory quandles of order `m`, one per isomorphism class.
pub fn enumerate_involutory_quandles(m: usize) -> Vec<InvolutoryQuandle> {
    assert!(m <= 5, "enumeration is limited to order 5");
    let mut t = vec![vec![usize::MAX; m]; m];
    for a in 0..m {
        t[a][a] = a;
    }
    let cells: Vec<(usize, usize)> =
        (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let mut raw = Vec::new();
    fill_iq(&cells, 0, &mut t, &mut raw);
    let perms = permutations(m);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for table in raw {
        let q = InvolutoryQuandle { order: m, table };
        let canon = perms.iter().map(|p| q.relabeled(p)).min().expect("identity");
        if seen.insert(canon.clone()) {
            out.push(InvolutoryQuandle { order: m, table: canon });
        }
    }
    out.sort_by(|a, b| a.table.cmp(&b.table));
    out
}

fn fill_iq(cells: &[(usize, usize)], k: usize, t: &mut Table, out: &mut Vec<Table>) {
    let m = t.len();
    if k == cells.len() {
        if InvolutoryQuandle::new(t.clone()).is_ok() {
            out.push(t.clone());
        }
        return;
    }
    let (a, b) = cells[k];
    for v in 0..m {
        // right multiplication by b is an involution fixing b
        if v == b {
            continue;
        }
        let back = t[v][b];
        if back != usize::MAX && back != a {
            continue;
        }
        if (0..m).any(|x| x != a && t[x][b] == v) {
            continue;
        }
        t[a][b] = v;
        let set_back = back == usize::MAX && v != a;
        if set_back {
            t[v][b] = a;
        }
        if iq_partial_ok(t) {
            fill_iq(cells, k + 1, t, out);
        }
        if set_back {
            t[v][b] = usize::MAX;
        }
        t[a][b] = usize::MAX;
    }
}

fn iq_partial_ok(t: &Table) -> bool {
    let m = t.len();
    let get = |a: usize, b: usize| (t[a][b] != usize::MAX).then_some(t[a][b]);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let l = get(a, b).and_then(|ab| get(ab, c));
                let r = (|| get(get(a, c)?, get(b, c)?))();
                if let (Some(l), Some(r)) = (l, r) {
                    if l != r {
                        return false;
                    }
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Colorings

/// One crossing constraint on four edge variables
/// `(under-in, over-in, under-out, over-out)`.
struct Constraint {
    vars: [usize; 4],
    /// allowed value tuples, same order as `vars`
    allowed: Vec<[usize; 4]>,
}

fn count_solutions(nvars: usize, m: usize, cons: &[Constraint]) -> u64 {
    let mut of_var: Vec<Vec<usize>> = vec![Vec::new(); nvars];
    for (i, c) in cons.iter().enumerate() {
        for &v in &c.vars {
            if !of_var[v].contains(&i) {
                of_var[v].push(i);
            }
        }
    }
    let mut vals = vec![usize::MAX; nvars];
    search(&mut vals, m, cons, &of_var)
}

/// Forces values from constraints with a single consistent tuple; returns
/// the list of newly set variables, or `None` on a contradiction.
fn propagate(vals: &mut [usize], cons: &[Constraint], of_var: &[Vec<usize>], start: usize) -> Option<Vec<usize>> {
    let mut set = Vec::new();
    let mut queue = vec![start];
    while let Some(v) = queue.pop() {
        for &ci in &of_var[v] {
            let c = &cons[ci];
            let mut only: Option<&[usize; 4]> = None;
            let mut count = 0;
            for t in &c.allowed {
                if (0..4).all(|k| vals[c.vars[k]] == usize::MAX || vals[c.vars[k]] == t[k]) {
                    count += 1;
                    only = Some(t);
                    if count > 1 {
                        break;
                    }
                }
            }
            match count {
                0 => {
                    for &s in &set {
                        vals[s] = usize::MAX;
                    }
                    return None;
                }
                1 => {
                    let t = only.unwrap();
                    for k in 0..4 {
                        let var = c.vars[k];
                        if vals[var] == usize::MAX {
                            vals[var] = t[k];
                            set.push(var);
                            queue.push(var);
                        } else if vals[var] != t[k] {
                            for &s in &set {
                                vals[s] = usize::MAX;
                            }
                            return None;
                        }
                    }
                }
                _ => {}
            }
        }
    }
    Some(set)
}

fn search(vals: &mut Vec<usize>, m: usize, cons: &[Constraint], of_var: &[Vec<usize>]) -> u64 {
    let Some(v) = vals.iter().position(|&x| x == usize::MAX) else { return 1 };
    let mut total = 0;
    for label in 0..m {
        vals[v] = label;
        if let Some(set) = propagate(vals, cons, of_var, v) {
            total += search(vals, m, cons, of_var);
            for s in set {
                vals[s] = usize::MAX;
            }
        }
        vals[v] = usize::MAX;
    }
    total
}

fn crossing_vars(code: &GaussCode) -> (usize, Vec<([usize; 4], Sign)>) {
    let layout = EdgeLayout::new(code);
    let vars = code
        .chord_table()
        .iter()
        .enumerate()
        .map(|(k, &(o, u))| {
            (
                [layout.in_edge(u), layout.in_edge(o), layout.out_edge(u), layout.out_edge(o)],
                code.sign(k + 1),
            )
        })
        .collect();
    (layout.edge_count(), vars)
}

/// Number of edge labelings by `b` satisfying the crossing relations.
pub fn colorings(code: &GaussCode, b: &FiniteBirack) -> u64 {
    let m = b.order;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for a in 0..m {
        for o in 0..m {
            let (uo, oo) = b.positive(a, o);
            pos.push([a, o, uo, oo]);
            let (uo, oo) = b.negative(a, o);
            neg.push([a, o, uo, oo]);
        }
    }
    let (nvars, xs) = crossing_vars(code);
    let cons: Vec<Constraint> = xs
        .into_iter()
        .map(|(vars, s)| Constraint { vars, allowed: if s == Sign::Pos { pos.clone() } else { neg.clone() } })
        .collect();
    count_solutions(nvars, m, &cons)
}

/// Colorings by an involutory quandle: the over edge keeps its label and
/// the under edges are related by `c = ab`, whatever the sign.
pub fn iq_colorings(code: &GaussCode, q: &InvolutoryQuandle) -> u64 {
    let m = q.order;
    let mut allowed = Vec::new();
    for a in 0..m {
        for o in 0..m {
            allowed.push([a, o, q.table[a][o], o]);
        }
    }
    let (nvars, xs) = crossing_vars(code);
    let cons: Vec<Constraint> =
        xs.into_iter().map(|(vars, _)| Constraint { vars, allowed: allowed.clone() }).collect();
    count_solutions(nvars, m, &cons)
}
