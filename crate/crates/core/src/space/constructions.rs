use fixedbitset::FixedBitSet;

use super::{BornCoarseSpace, Entourage, GroundSet, PointSet, SpaceError};

fn product_ground(x: &BornCoarseSpace, y: &BornCoarseSpace) -> GroundSet {
    let ids = x
        .ground()
        .ids()
        .iter()
        .flat_map(|a| y.ground().ids().iter().map(move |b| format!("({a},{b})")));
    GroundSet::new(ids).expect("pairs of distinct ids are distinct")
}

fn product_relation(u: &Entourage, v: &Entourage) -> Entourage {
    let m = v.size();
    let mut e = Entourage::empty(u.size() * m);
    for (a, b) in u.pairs() {
        for (c, d) in v.pairs() {
            e.insert(a * m + c, b * m + d);
        }
    }
    e
}

fn product_set(a: &PointSet, b: &PointSet, m: usize) -> PointSet {
    let mut s = FixedBitSet::with_capacity(a.len() * m);
    for i in a.ones() {
        for j in b.ones() {
            s.insert(i * m + j);
        }
    }
    s
}

/// `X ×_p X'`: coarse structure generated by products of entourages, bornology by `B × B'`.
///
/// The single generator is the product of the two scale-1 closures, so the
/// product's `closure_at(k)` equals `closure_at(k) × closure_at'(k)`.
pub fn product_p(x: &BornCoarseSpace, y: &BornCoarseSpace) -> Result<BornCoarseSpace, SpaceError> {
    let m = y.len();
    let ground = product_ground(x, y);
    let gen = product_relation(&x.closure_at(1), &y.closure_at(1));
    let mut born = Vec::new();
    for b in x.bornology().generators() {
        for c in y.bornology().generators() {
            born.push(product_set(b, c, m));
        }
    }
    BornCoarseSpace::from_parts(ground, vec![gen], born)
}

/// `X ⋉ X'`: product coarse structure, bornology generated by `X × B'`.
pub fn semidirect(x: &BornCoarseSpace, y: &BornCoarseSpace) -> Result<BornCoarseSpace, SpaceError> {
    let m = y.len();
    let ground = product_ground(x, y);
    let gen = product_relation(&x.closure_at(1), &y.closure_at(1));
    let all_x = x.ground().all();
    let born = y
        .bornology()
        .generators()
        .iter()
        .map(|c| product_set(&all_x, c, m))
        .collect();
    BornCoarseSpace::from_parts(ground, vec![gen], born)
}

struct Disjoint {
    ground: GroundSet,
    offsets: Vec<usize>,
    total: usize,
}

fn disjoint(spaces: &[&BornCoarseSpace]) -> Disjoint {
    let mut offsets = Vec::with_capacity(spaces.len());
    let mut ids = Vec::new();
    let mut total = 0;
    for (i, s) in spaces.iter().enumerate() {
        offsets.push(total);
        total += s.len();
        ids.extend(s.ground().ids().iter().map(|p| format!("{i}:{p}")));
    }
    Disjoint {
        ground: GroundSet::new(ids).expect("tagged ids are distinct"),
        offsets,
        total,
    }
}

fn embed_relation(e: &Entourage, offset: usize, total: usize) -> Entourage {
    Entourage::from_pairs(total, e.pairs().map(|(a, b)| (a + offset, b + offset)))
}

fn embed_set(s: &PointSet, offset: usize, total: usize) -> PointSet {
    let mut out = FixedBitSet::with_capacity(total);
    for i in s.ones() {
        out.insert(i + offset);
    }
    out
}

fn coproduct_generators(spaces: &[&BornCoarseSpace], d: &Disjoint) -> Vec<Entourage> {
    spaces
        .iter()
        .zip(&d.offsets)
        .flat_map(|(s, &o)| s.generators().iter().map(move |g| embed_relation(g, o, d.total)))
        .collect()
}

fn free_generators(spaces: &[&BornCoarseSpace], d: &Disjoint) -> Vec<Entourage> {
    let mut u = Entourage::empty(d.total);
    for g in coproduct_generators(spaces, d) {
        u.union_with(&g);
    }
    vec![u]
}

fn coproduct_bornology(spaces: &[&BornCoarseSpace], d: &Disjoint) -> Vec<PointSet> {
    // A set is bounded iff each trace is bounded; with finitely many generators
    // per factor the traces are bounded exactly when they lie in the factor's
    // generator union, so the union of those is the single maximal generator.
    let mut all = FixedBitSet::with_capacity(d.total);
    for (s, &o) in spaces.iter().zip(&d.offsets) {
        for b in s.bornology().generators() {
            all.union_with(&embed_set(b, o, d.total));
        }
    }
    if d.total == 0 {
        Vec::new()
    } else {
        vec![all]
    }
}

fn free_bornology(spaces: &[&BornCoarseSpace], d: &Disjoint) -> Vec<PointSet> {
    spaces
        .iter()
        .zip(&d.offsets)
        .flat_map(|(s, &o)| s.bornology().generators().iter().map(move |b| embed_set(b, o, d.total)))
        .collect()
}

/// Coproduct: factor generators embedded disjointly; bounded iff bounded in every factor.
pub fn coproduct(spaces: &[&BornCoarseSpace]) -> Result<BornCoarseSpace, SpaceError> {
    let d = disjoint(spaces);
    let gens = coproduct_generators(spaces, &d);
    let born = coproduct_bornology(spaces, &d);
    BornCoarseSpace::from_parts(d.ground, gens, born)
}

/// Free union: coarse structure generated by unions of one entourage per
/// factor; bornology generated by the factor bornologies.
pub fn free_union(spaces: &[&BornCoarseSpace]) -> Result<BornCoarseSpace, SpaceError> {
    let d = disjoint(spaces);
    let gens = free_generators(spaces, &d);
    let born = free_bornology(spaces, &d);
    BornCoarseSpace::from_parts(d.ground, gens, born)
}

/// Mixed union: coarse structure of the coproduct, bornology of the free union.
pub fn mixed_union(spaces: &[&BornCoarseSpace]) -> Result<BornCoarseSpace, SpaceError> {
    let d = disjoint(spaces);
    let gens = coproduct_generators(spaces, &d);
    let born = free_bornology(spaces, &d);
    BornCoarseSpace::from_parts(d.ground, gens, born)
}

/// Subspace on `A` with generators restricted to `A × A` and bornology generators traced on `A`.
pub fn subspace(x: &BornCoarseSpace, a: &PointSet) -> Result<BornCoarseSpace, SpaceError> {
    let members: Vec<usize> = a.ones().collect();
    if let Some(&bad) = members.iter().find(|&&i| i >= x.len()) {
        return Err(SpaceError::UnknownPoint(format!("#{bad}")));
    }
    let ground = GroundSet::new(members.iter().map(|&i| x.ground().id(i).to_string()))?;
    let gens = x.generators().iter().map(|g| g.restrict(&members)).collect();
    let born = x
        .bornology()
        .generators()
        .iter()
        .filter_map(|b| {
            let mut t = FixedBitSet::with_capacity(members.len());
            for (j, &i) in members.iter().enumerate() {
                if b.contains(i) {
                    t.insert(j);
                }
            }
            (!t.is_clear()).then_some(t)
        })
        .collect();
    let sub = BornCoarseSpace::from_parts(ground, gens, born)?;
    Ok(match x.metric() {
        Some(m) => sub.with_metric(m.restrict(&members)),
        None => sub,
    })
}
