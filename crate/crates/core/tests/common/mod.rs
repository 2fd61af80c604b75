//! Brute-force oracles for the integration tests. They read codes from
//! text and use their own arithmetic, so they share no code with the crate.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

/// One passage: (over, chord, sign).
pub type Tok = (bool, usize, i8);

pub fn parse(text: &str) -> Vec<Vec<Tok>> {
    if text.trim().is_empty() {
        return vec![vec![]];
    }
    text.split('|')
        .map(|comp| {
            comp.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    let t = t.trim();
                    let over = t.starts_with('O');
                    let sign = if t.ends_with('+') { 1 } else { -1 };
                    (over, t[1..t.len() - 1].parse().unwrap(), sign)
                })
                .collect()
        })
        .collect()
}

pub fn chords(code: &[Vec<Tok>]) -> usize {
    code.iter().flatten().map(|t| t.1).max().unwrap_or(0)
}

/// Univariate Laurent polynomial, exponent to coefficient.
pub type P1 = BTreeMap<i32, i64>;

pub fn p1_mul(a: &P1, b: &P1) -> P1 {
    let mut out = P1::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry(ea + eb).or_default() += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

pub fn p1_add(a: &mut P1, b: &P1) {
    for (e, c) in b {
        *a.entry(*e).or_default() += c;
    }
    a.retain(|_, c| *c != 0);
}

/// Circles of the state in which chord `k` is A-smoothed iff bit `k - 1`
/// of `state` is set.
fn state_circles(code: &[Vec<Tok>], state: u32) -> usize {
    let n = chords(code);
    // ends: (component, index, leaving?)
    let mut ends = Vec::new();
    for (c, comp) in code.iter().enumerate() {
        for i in 0..comp.len().max(1) {
            ends.push((c, i, false));
            ends.push((c, i, true));
        }
    }
    let id = |e: (usize, usize, bool)| ends.iter().position(|&x| x == e).unwrap();
    let mut over = vec![(0, 0); n + 1];
    let mut under = vec![(0, 0); n + 1];
    let mut sign = vec![0; n + 1];
    for (c, comp) in code.iter().enumerate() {
        for (i, &(o, k, s)) in comp.iter().enumerate() {
            if o { over[k] = (c, i) } else { under[k] = (c, i) }
            sign[k] = s;
        }
    }
    let mut link = BTreeMap::new();
    let mut join = |a: usize, b: usize| {
        link.insert(a, b);
        link.insert(b, a);
    };
    for (c, comp) in code.iter().enumerate() {
        if comp.is_empty() {
            join(id((c, 0, false)), id((c, 0, true)));
        }
    }
    for k in 1..=n {
        let a = state >> (k - 1) & 1 == 1;
        let oi = id((over[k].0, over[k].1, false));
        let oo = id((over[k].0, over[k].1, true));
        let ui = id((under[k].0, under[k].1, false));
        let uo = id((under[k].0, under[k].1, true));
        if a == (sign[k] > 0) {
            join(oi, uo);
            join(ui, oo);
        } else {
            join(oi, ui);
            join(oo, uo);
        }
    }
    let next_along = |(c, i, leaving): (usize, usize, bool)| {
        let len = code[c].len().max(1);
        if leaving { (c, (i + 1) % len, false) } else { (c, (i + len - 1) % len, true) }
    };
    let mut seen = vec![false; ends.len()];
    let mut circles = 0;
    for s in 0..ends.len() {
        if seen[s] {
            continue;
        }
        circles += 1;
        let mut x = s;
        loop {
            seen[x] = true;
            let y = id(next_along(ends[x]));
            seen[y] = true;
            x = link[&y];
            if x == s {
                break;
            }
        }
    }
    circles
}

/// The bracket by listing every state and walking its circles.
pub fn bracket(text: &str) -> P1 {
    let code = parse(text);
    let n = chords(&code);
    let delta: P1 = [(2, -1), (-2, -1)].into_iter().collect();
    let mut out = P1::new();
    for state in 0u32..1 << n {
        let a_count = state.count_ones() as i32;
        let mut term: P1 = [(2 * a_count - n as i32, 1)].into_iter().collect();
        for _ in 1..state_circles(&code, state) {
            term = p1_mul(&term, &delta);
        }
        p1_add(&mut out, &term);
    }
    out
}

/// Twice the atom genus: `2·pieces + n − sA − sB`, where pieces are the
/// classes of components joined by chords.
pub fn atom_genus_twice(text: &str) -> i64 {
    let code = parse(text);
    let n = chords(&code);
    let mut piece: Vec<usize> = (0..code.len()).collect();
    for k in 1..=n {
        let cs: Vec<usize> = (0..code.len()).filter(|&c| code[c].iter().any(|t| t.1 == k)).collect();
        let (a, b) = (piece[cs[0]], piece[*cs.last().unwrap()]);
        for p in piece.iter_mut() {
            if *p == b {
                *p = a;
            }
        }
    }
    let pieces = piece.iter().collect::<std::collections::BTreeSet<_>>().len() as i64;
    let all_a = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    2 * pieces + n as i64 - state_circles(&code, all_a) as i64 - state_circles(&code, 0) as i64
}

/// Whether some orientation of the edges makes every crossing a source or a
/// sink on each strand, with the two strands doing opposite things. Tries
/// every orientation; bit `e` says edge `e` (leaving position `e`) runs
/// with the direction of travel.
pub fn orientable(text: &str) -> bool {
    let code = parse(text);
    let mut index = BTreeMap::new();
    for (c, comp) in code.iter().enumerate() {
        for i in 0..comp.len() {
            let next = index.len();
            index.insert((c, i), next);
        }
    }
    let edges = index.len();
    let in_edge = |c: usize, i: usize| index[&(c, (i + code[c].len() - 1) % code[c].len())];
    let mut differ = Vec::new();
    let mut ins = BTreeMap::new();
    for (c, comp) in code.iter().enumerate() {
        for (i, t) in comp.iter().enumerate() {
            differ.push((in_edge(c, i), index[&(c, i)]));
            ins.entry(t.1).or_insert_with(Vec::new).push(in_edge(c, i));
        }
    }
    differ.extend(ins.values().map(|v| (v[0], v[1])));
    (0u64..1 << edges).any(|b| differ.iter().all(|&(x, y)| (b >> x & 1) != (b >> y & 1)))
}

pub fn span(p: &P1) -> Option<i32> {
    Some(p.keys().next_back()? - p.keys().next()?)
}

/// Colorings by an involutory quandle, one label per arc. Arcs run from
/// one under passage to the next.
pub fn iq_colorings(text: &str, table: &[Vec<usize>]) -> u64 {
    let code = parse(text);
    let m = table.len();
    // arc of the edge leaving each position
    let mut arc = BTreeMap::new();
    let mut arcs = 0;
    for (c, comp) in code.iter().enumerate() {
        let len = comp.len();
        if len == 0 {
            continue;
        }
        let Some(first_under) = (0..len).find(|&i| !comp[i].0) else {
            for i in 0..len {
                arc.insert((c, i), arcs);
            }
            arcs += 1;
            continue;
        };
        let mut current = arcs;
        for step in 0..len {
            let i = (first_under + step) % len;
            if !comp[i].0 {
                current = arcs;
                arcs += 1;
            }
            arc.insert((c, i), current);
        }
    }
    let mut rels = Vec::new();
    for (c, comp) in code.iter().enumerate() {
        for (i, &(o, k, _)) in comp.iter().enumerate() {
            if o {
                continue;
            }
            let prev = (c, (i + comp.len() - 1) % comp.len());
            let over = code
                .iter()
                .enumerate()
                .flat_map(|(c2, cc)| cc.iter().enumerate().map(move |(j, t)| ((c2, j), *t)))
                .find(|&(_, t)| t.0 && t.1 == k)
                .unwrap()
                .0;
            rels.push((arc[&prev], arc[&over], arc[&(c, i)]));
        }
    }
    let free_loops = code.iter().filter(|c| c.is_empty()).count() as u32;
    let mut count = 0;
    let mut labels = vec![0; arcs];
    'outer: loop {
        if rels.iter().all(|&(a, b, c)| table[labels[a]][labels[b]] == labels[c]) {
            count += 1;
        }
        for l in labels.iter_mut() {
            *l += 1;
            if *l < m {
                continue 'outer;
            }
            *l = 0;
        }
        break;
    }
    count * (m as u64).pow(free_loops)
}

/// Bivariate Laurent polynomial.
pub type P2 = BTreeMap<(i32, i32), i64>;

pub fn p2_mul(a: &P2, b: &P2) -> P2 {
    let mut out = P2::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry((ea.0 + eb.0, ea.1 + eb.1)).or_default() += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Determinant by cofactor expansion along the first row.
pub fn det_cofactor(m: &[Vec<P2>]) -> P2 {
    let n = m.len();
    if n == 0 {
        return [((0, 0), 1)].into_iter().collect();
    }
    let mut out = P2::new();
    for j in 0..n {
        if m[0][j].is_empty() {
            continue;
        }
        let minor: Vec<Vec<P2>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = p2_mul(&m[0][j], &det_cofactor(&minor));
        let s = if j % 2 == 0 { 1 } else { -1 };
        for (e, c) in term {
            *out.entry(e).or_default() += s * c;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Invariant factors by repeated row and column gcd steps, with the
/// divisibility chain fixed up at the end.
pub fn smith(m: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pr, pc)) = (t..rows).flat_map(|r| (t..cols).map(move |c| (r, c))).find(|&(r, c)| !a[r][c].is_zero())
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut changed = false;
            for r in t + 1..rows {
                if !a[r][t].is_zero() {
                    let [u, v, q, p] = combination(&a[t][t], &a[r][t]);
                    for c in t..cols {
                        let (s, w) = (a[t][c].clone(), a[r][c].clone());
                        a[t][c] = &u * &s + &v * &w;
                        a[r][c] = &p * &w - &q * &s;
                    }
                    changed = true;
                }
            }
            for c in t + 1..cols {
                if !a[t][c].is_zero() {
                    let [u, v, q, p] = combination(&a[t][t], &a[t][c]);
                    for row in a.iter_mut().skip(t) {
                        let (s, w) = (row[t].clone(), row[c].clone());
                        row[t] = &u * &s + &v * &w;
                        row[c] = &p * &w - &q * &s;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        diag.push(a[t][t].abs());
    }
    // pairwise gcd and lcm until each factor divides the next
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

/// Unimodular `[[u, v], [−q, p]]` taking `(x, y)` to `(g, 0)`. Plain
/// elimination when `x` divides `y`, so the pivot only changes when it
/// shrinks.
fn combination(x: &BigInt, y: &BigInt) -> [BigInt; 4] {
    let one = BigInt::from(1);
    if (y % x).is_zero() {
        return [one.clone(), BigInt::zero(), y / x, one];
    }
    let e = x.extended_gcd(y);
    [e.x, e.y, y / &e.gcd, x / &e.gcd]
}

/// (components, virtual crossings between components, parity) of a planar
/// diagram text: slots 0/2 and 1/3 of each crossing continue one strand.
pub fn flat_linking(text: &str) -> (usize, usize, usize) {
    let mut rows = Vec::new();
    let mut loops = 0;
    for line in text.lines() {
        let mut it = line.split('#').next().unwrap().split_whitespace();
        let Some(kind) = it.next() else { continue };
        if kind == "L" {
            loops += 1;
            continue;
        }
        let labels: Vec<usize> = it.map(|x| x.parse().unwrap()).collect();
        rows.push((kind.to_string(), labels));
    }
    let max = rows.iter().flat_map(|r| r.1.iter()).copied().max().unwrap_or(0);
    let mut parent: Vec<usize> = (0..=max).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (_, l) in &rows {
        for (a, b) in [(l[0], l[2]), (l[1], l[3])] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let used: std::collections::BTreeSet<usize> = rows.iter().flat_map(|r| r.1.iter()).copied().collect();
    let comps: std::collections::BTreeSet<usize> = used.iter().map(|&x| find(&mut parent, x)).collect();
    let inter = rows.iter().filter(|(k, l)| k == "V" && find(&mut parent, l[0]) != find(&mut parent, l[1])).count();
    (comps.len() + loops, inter, inter % 2)
}

/// A random Gauss code with `n` chords on `comps` components (each
/// component gets at least one passage when possible).
pub fn random_code(rng: &mut impl Rng, n: usize, comps: usize) -> String {
    let mut ends: Vec<(usize, bool)> = (1..=n).flat_map(|k| [(k, true), (k, false)]).collect();
    ends.shuffle(rng);
    let signs: Vec<bool> = (0..=n).map(|_| rng.gen()).collect();
    let mut cuts: Vec<usize> = (1..2 * n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(comps.saturating_sub(1)).collect();
    cuts.sort();
    let text = |(k, o): (usize, bool)| format!("{}{}{}", if o { 'O' } else { 'U' }, k, if signs[k] { '+' } else { '-' });
    let mut parts = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain([2 * n]) {
        parts.push(ends[start..c].iter().map(|&e| text(e)).collect::<Vec<_>>().join(","));
        start = c;
    }
    parts.join("|")
}

/// Dimension over F_p of the solutions of a quaternionic presentation at
/// `t = t0`, through the real 4×4 form of left multiplication.
pub fn quat_nullity(entries: &[Vec<Vec<(i32, [i64; 4])>>], p: i64, t0: i64) -> usize {
    let d = entries.len();
    let pow = |e: i32| -> i64 {
        let base = if e >= 0 { t0 } else { (1..p).find(|x| t0 * x % p == 1).unwrap() };
        (0..e.abs()).fold(1, |a, _| a * base % p)
    };
    let mut m = vec![vec![0i64; 4 * d]; 4 * d];
    for (r, row) in entries.iter().enumerate() {
        for (c, terms) in row.iter().enumerate() {
            let mut q = [0i64; 4];
            for &(e, x) in terms {
                for i in 0..4 {
                    q[i] += x[i] * pow(e);
                }
            }
            let [w, x, y, z] = q;
            let l = [[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]];
            for a in 0..4 {
                for b in 0..4 {
                    m[4 * r + a][4 * c + b] = l[a][b].rem_euclid(p);
                }
            }
        }
    }
    4 * d - rank_mod(m, p)
}

fn rank_mod(mut m: Vec<Vec<i64>>, p: i64) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = (1..p).find(|&x| m[rank][col] * x % p == 1).unwrap();
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x - f * y).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}
