use super::CoarsifyError;
use crate::space::{BornCoarseSpace, Entourage, PointSet};

/// Maximal cliques enumerated before the Lebesgue check falls back to balls.
pub const CLIQUE_CAP: usize = 50_000;

/// Greedy `closure_at(k)`-separated net in point order: a point joins unless
/// an earlier member is related to it. The result is checked to be
/// separated and to have `closure_at(k)[D] = X`.
pub fn greedy_net(space: &BornCoarseSpace, k: usize) -> PointSet {
    greedy_net_ordered(space, k, &(0..space.len()).collect::<Vec<_>>())
}

/// Greedy net scanning points in the given order.
pub(crate) fn greedy_net_ordered(space: &BornCoarseSpace, k: usize, order: &[usize]) -> PointSet {
    let u = space.closure_at(k);
    let mut net = PointSet::with_capacity(space.len());
    let mut covered = PointSet::with_capacity(space.len());
    for &x in order {
        if !covered.contains(x) {
            net.insert(x);
            covered.union_with(u.row(x));
        }
    }
    assert!(is_net(&u, &net), "greedy net failed its own check");
    net
}

/// Whether `net` is `u`-separated and `u[net]` is everything.
pub fn is_net(u: &Entourage, net: &PointSet) -> bool {
    let separated = net
        .ones()
        .all(|a| net.ones().all(|b| a == b || !u.contains(a, b)));
    separated && u.thicken(net).count_ones(..) == u.size()
}

/// How a Lebesgue scale was verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LebesgueMethod {
    /// Every maximal `closure_at(k)`-bounded set was checked.
    MaximalCliques,
    /// Every ball `closure_at(k)[x]` was checked. Each bounded set meeting
    /// `x` lies in that ball, so success is sufficient but failure is not conclusive.
    Balls,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub members: Vec<PointSet>,
    /// Verified scale with every member `closure_at(k)`-bounded.
    pub bound_scale: Option<usize>,
    /// Verified scale at which every bounded set lies in some member.
    pub lebesgue_scale: Option<usize>,
    pub lebesgue_method: Option<LebesgueMethod>,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest number of members sharing a point, less one.
    pub fn nerve_dimension(&self) -> Option<usize> {
        let n = self.members.first().map_or(0, PointSet::len);
        (0..n)
            .map(|x| self.members.iter().filter(|m| m.contains(x)).count())
            .max()
            .and_then(|c| c.checked_sub(1))
    }
}

fn ensure_cover(space: &BornCoarseSpace, members: &[PointSet]) -> Result<(), CoarsifyError> {
    let mut union = PointSet::with_capacity(space.len());
    for m in members {
        union.union_with(m);
    }
    match space.ground().all().difference(&union).next() {
        Some(x) => Err(CoarsifyError::NotACover(space.ground().id(x).to_string())),
        None => Ok(()),
    }
}

fn bounded_at(space: &BornCoarseSpace, members: &[PointSet], k: usize) -> bool {
    let u = space.closure_at(k);
    members.iter().all(|m| u.bounds(m))
}

/// Least scale bounding every member, up to stabilization.
pub fn least_bound(space: &BornCoarseSpace, members: &[PointSet]) -> Option<usize> {
    (0..=space.stabilized_at()).find(|&k| bounded_at(space, members, k))
}

/// Maximal cliques of a reflexive symmetric relation, or `None` beyond `cap`.
pub fn maximal_cliques(u: &Entourage, cap: usize) -> Option<Vec<PointSet>> {
    let n = u.size();
    let mut adj: Vec<PointSet> = (0..n).map(|x| u.row(x).clone()).collect();
    for (x, row) in adj.iter_mut().enumerate() {
        row.set(x, false);
    }
    let mut out = Vec::new();
    let mut p = PointSet::with_capacity(n);
    p.insert_range(..);
    let mut r = Vec::new();
    bron_kerbosch(&adj, &mut r, p, PointSet::with_capacity(n), &mut out, cap)?;
    Some(out)
}

fn bron_kerbosch(
    adj: &[PointSet],
    r: &mut Vec<usize>,
    mut p: PointSet,
    mut x: PointSet,
    out: &mut Vec<PointSet>,
    cap: usize,
) -> Option<()> {
    if p.is_clear() && x.is_clear() {
        if !r.is_empty() {
            if out.len() >= cap {
                return None;
            }
            out.push(crate::space::point_set(adj.len(), r.iter().copied()));
        }
        return Some(());
    }
    // Tomita pivot: the vertex of P ∪ X with most neighbours in P.
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| adj[u].intersection(&p).count())
        .expect("P ∪ X is nonempty");
    let todo: Vec<usize> = p.difference(&adj[pivot]).collect();
    for v in todo {
        let mut np = p.clone();
        np.intersect_with(&adj[v]);
        let mut nx = x.clone();
        nx.intersect_with(&adj[v]);
        r.push(v);
        bron_kerbosch(adj, r, np, nx, out, cap)?;
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
    Some(())
}

/// Whether `closure_at(k)` is a Lebesgue scale for `members`.
pub fn is_lebesgue(
    space: &BornCoarseSpace,
    members: &[PointSet],
    k: usize,
) -> (bool, LebesgueMethod) {
    let u = space.closure_at(k);
    let fits = |s: &PointSet| members.iter().any(|m| s.is_subset(m));
    match maximal_cliques(&u, CLIQUE_CAP) {
        Some(cliques) => (cliques.iter().all(fits), LebesgueMethod::MaximalCliques),
        None => (
            (0..space.len()).all(|x| fits(u.row(x))),
            LebesgueMethod::Balls,
        ),
    }
}

/// Largest Lebesgue scale up to stabilization, scanning upward.
pub fn largest_lebesgue(
    space: &BornCoarseSpace,
    members: &[PointSet],
) -> (Option<usize>, Option<LebesgueMethod>) {
    let mut best = (None, None);
    for k in 0..=space.stabilized_at() {
        let (ok, method) = is_lebesgue(space, members, k);
        if !ok {
            break;
        }
        best = (Some(k), Some(method));
    }
    best
}

/// Ball cover `{closure_at(k)[d] : d ∈ greedy_net(X, k)}`.
pub fn cover_from_net(space: &BornCoarseSpace, k: usize) -> Cover {
    let net = greedy_net(space, k);
    ball_cover(space, &net, k)
}

pub(crate) fn ball_cover(space: &BornCoarseSpace, centers: &PointSet, radius: usize) -> Cover {
    let u = space.closure_at(radius);
    let members: Vec<PointSet> = centers.ones().map(|d| u.row(d).clone()).collect();
    let bound = 2 * radius;
    let bound_scale = if bounded_at(space, &members, bound) {
        Some(bound)
    } else {
        least_bound(space, &members)
    };
    let (lebesgue_scale, lebesgue_method) = largest_lebesgue(space, &members);
    Cover {
        members,
        bound_scale,
        lebesgue_scale,
        lebesgue_method,
    }
}

/// Verifies the claimed bound and Lebesgue scales of a cover; unverified
/// claims come back as `None`.
pub fn check_cover(
    space: &BornCoarseSpace,
    members: Vec<PointSet>,
    k_bound: usize,
    k_lebesgue: usize,
) -> Result<Cover, CoarsifyError> {
    ensure_cover(space, &members)?;
    let bound_scale = bounded_at(space, &members, k_bound).then_some(k_bound);
    let (ok, method) = is_lebesgue(space, &members, k_lebesgue);
    Ok(Cover {
        members,
        bound_scale,
        lebesgue_scale: ok.then_some(k_lebesgue),
        lebesgue_method: ok.then_some(method),
    })
}
