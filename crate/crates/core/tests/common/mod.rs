#![allow(dead_code)]
//! Random spaces and independent oracles shared by the integration tests.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coarsekit::space::BornCoarseSpace;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random explicit space: points split into blocks of at most `max_block`,
/// generator pairs drawn inside blocks, singleton bornology.
pub struct RandomSpace {
    pub space: BornCoarseSpace,
    pub blocks: Vec<Vec<usize>>,
    pub pairs: Vec<(usize, usize)>,
}

pub fn random_space(r: &mut ChaCha8Rng, max_points: usize, max_pairs: usize, max_block: usize) -> RandomSpace {
    let n = r.gen_range(1..=max_points);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut blocks = Vec::new();
    let mut rest = &order[..];
    while !rest.is_empty() {
        let b = r.gen_range(1..=max_block.min(rest.len()));
        blocks.push(rest[..b].to_vec());
        rest = &rest[b..];
    }
    let budget = r.gen_range(0..=max_pairs);
    let mut pairs = Vec::new();
    for _ in 0..budget {
        let blk = &blocks[r.gen_range(0..blocks.len())];
        let a = blk[r.gen_range(0..blk.len())];
        let b = blk[r.gen_range(0..blk.len())];
        pairs.push((a, b));
    }
    let n_gens = r.gen_range(1..=3);
    let mut gens: Vec<Vec<(String, String)>> = vec![Vec::new(); n_gens];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        gens[i % n_gens].push((format!("p{a}"), format!("p{b}")));
    }
    let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let born: Vec<Vec<String>> = ids.iter().map(|i| vec![i.clone()]).collect();
    let space = BornCoarseSpace::explicit(&ids, &gens, &born).expect("valid random space");
    RandomSpace { space, blocks, pairs }
}

/// Connected components of the graph on `0..n` with the given edges, by BFS.
pub fn bfs_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
    }
    count
}

/// Component count by union-find with path halving.
pub fn union_find_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut p: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut p, a), find(&mut p, b));
        if ra != rb {
            p[ra] = rb;
            count -= 1;
        }
    }
    count
}

/// Rank over Q by fraction-exact Gaussian elimination on dense rows.
pub fn rank_q(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let factor = &m[i][c] / &pivot;
                for j in c..cols {
                    let d = &factor * &m[rank][j];
                    m[i][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Boundary matrix rows for simplices given as sorted vertex lists.
fn boundary_rows(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> Vec<Vec<i64>> {
    let mut rows = vec![vec![0i64; upper.len()]; lower.len()];
    for (j, s) in upper.iter().enumerate() {
        for i in 0..s.len() {
            let mut face = s.clone();
            face.remove(i);
            let r = lower.iter().position(|f| *f == face).expect("face present");
            rows[r][j] += if i % 2 == 0 { 1 } else { -1 };
        }
    }
    rows
}

/// Betti numbers over Q in degrees `0..=d_max` of a complex given by its
/// simplices per dimension, which must reach dimension `d_max + 1`.
pub fn betti_q(simplices: &[Vec<Vec<usize>>], d_max: usize) -> Vec<usize> {
    let rank_of = |d: usize| -> usize {
        if d == 0 || d >= simplices.len() || simplices[d].is_empty() || simplices[d - 1].is_empty() {
            0
        } else {
            rank_q(&boundary_rows(&simplices[d - 1], &simplices[d]))
        }
    };
    (0..=d_max)
        .map(|d| {
            let count = simplices.get(d).map_or(0, Vec::len);
            count - rank_of(d) - rank_of(d + 1)
        })
        .collect()
}

/// Clique complex of a symmetric relation through dimension `top`, by brute
/// force over increasing vertex sequences.
pub fn clique_simplices(n: usize, related: impl Fn(usize, usize) -> bool, top: usize) -> Vec<Vec<Vec<usize>>> {
    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 1];
    fn grow(
        cur: &mut Vec<usize>,
        n: usize,
        top: usize,
        related: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        out[cur.len() - 1].push(cur.clone());
        if cur.len() == top + 1 {
            return;
        }
        let last = *cur.last().unwrap();
        for v in last + 1..n {
            if cur.iter().all(|&u| related(u, v)) {
                cur.push(v);
                grow(cur, n, top, related, out);
                cur.pop();
            }
        }
    }
    for v in 0..n {
        grow(&mut vec![v], n, top, &related, &mut by_dim);
    }
    by_dim
}

/// Betti numbers over Q of the unnormalized ordered-tuple complex: all
/// `(n+1)`-tuples with pairwise related entries, degenerate ones included.
pub fn unnormalized_betti_q(n_points: usize, related: impl Fn(usize, usize) -> bool, d_max: usize) -> Vec<usize> {
    let top = d_max + 1;
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![(0..n_points).map(|v| vec![v]).collect()];
    for _ in 0..top {
        let prev = tuples.last().unwrap();
        let mut next = Vec::new();
        for t in prev {
            for v in 0..n_points {
                if t.iter().all(|&u| related(u, v)) {
                    let mut s = t.clone();
                    s.push(v);
                    next.push(s);
                }
            }
        }
        tuples.push(next);
    }
    let index: Vec<std::collections::HashMap<Vec<usize>, usize>> = tuples
        .iter()
        .map(|ts| ts.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
        .collect();
    let rank_of = |d: usize| -> usize {
        if d == 0 || d > top {
            return 0;
        }
        let mut rows = vec![vec![0i64; tuples[d].len()]; tuples[d - 1].len()];
        for (j, t) in tuples[d].iter().enumerate() {
            for i in 0..t.len() {
                let mut face = t.clone();
                face.remove(i);
                rows[index[d - 1][&face]][j] += if i % 2 == 0 { 1 } else { -1 };
            }
        }
        rank_q(&rows)
    };
    (0..=d_max)
        .map(|d| tuples[d].len() - rank_of(d) - rank_of(d + 1))
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        n => {
            let mut total = BigInt::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `gcd` of all `k × k` minors, for `k = 1..=max_k`; zero when all vanish.
pub fn minor_gcds(a: &[Vec<i64>], max_k: usize) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    (1..=max_k.min(rows).min(cols))
        .map(|k| {
            let mut g = BigInt::zero();
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let sub: Vec<Vec<BigInt>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| BigInt::from(a[r][c])).collect())
                        .collect();
                    g = g.gcd(&det(&sub));
                }
            }
            g.abs()
        })
        .collect()
}

/// Invariant factors predicted by minors: `d_k = D_k / D_(k-1)` while `D_k ≠ 0`.
pub fn factors_from_minors(gcds: &[BigInt]) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for g in gcds {
        if g.is_zero() {
            break;
        }
        out.push(g / &prev);
        prev = g.clone();
    }
    out
}

pub fn sorted_pairs(pairs: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    pairs.iter().copied().collect()
}
