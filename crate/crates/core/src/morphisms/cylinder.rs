use std::sync::Arc;

use super::{same_space, MorphismError, SpaceMap};
use crate::space::{BornCoarseSpace, Entourage, GroundSet, PointSet};

/// Bounds standing in for "controlled" and "bornological" on integer functions.
#[derive(Debug, Clone, Copy)]
pub struct CylinderCaps {
    /// Largest allowed `|p(x) - p(y)|` over a generator pair.
    pub max_jump: i64,
    /// Largest allowed `|p(x)|` on a bornology generator; `None` skips the check.
    pub max_height: Option<i64>,
}

impl Default for CylinderCaps {
    fn default() -> Self {
        CylinderCaps {
            max_jump: 1,
            max_height: None,
        }
    }
}

/// `{(t, x) : p_minus(x) ≤ t ≤ p_plus(x)}` with integer time.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub space: Arc<BornCoarseSpace>,
    pub projection: SpaceMap,
    pub i_minus: SpaceMap,
    pub i_plus: SpaceMap,
    pub p_minus: Vec<i64>,
    pub p_plus: Vec<i64>,
}

fn check_p(
    x: &BornCoarseSpace,
    p: &[i64],
    caps: &CylinderCaps,
) -> Result<(), MorphismError> {
    for g in x.generators() {
        for (a, b) in g.pairs() {
            let jump = (p[a] - p[b]).abs();
            if jump > caps.max_jump {
                return Err(MorphismError::PNotControlled {
                    x: x.ground().id(a).into(),
                    y: x.ground().id(b).into(),
                    jump,
                    cap: caps.max_jump,
                });
            }
        }
    }
    if let Some(cap) = caps.max_height {
        for b in x.bornology().generators() {
            for a in b.ones() {
                if p[a].abs() > cap {
                    return Err(MorphismError::PNotBornological {
                        x: x.ground().id(a).into(),
                        value: p[a].abs(),
                        cap,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Builds the cylinder as a subspace of `Z × X`, ordered by time then by point.
/// The coarse structure is generated by unit time steps paired with scale-1
/// steps in `X`; a subset is bounded when its projection is.
pub fn cylinder(
    x: Arc<BornCoarseSpace>,
    p_minus: Vec<i64>,
    p_plus: Vec<i64>,
    caps: &CylinderCaps,
) -> Result<Cylinder, MorphismError> {
    let n = x.len();
    for p in [&p_minus, &p_plus] {
        if p.len() != n {
            return Err(MorphismError::TableLength {
                got: p.len(),
                expected: n,
            });
        }
    }
    for a in 0..n {
        if p_minus[a] > 0 || p_plus[a] < 0 {
            return Err(MorphismError::PSign(x.ground().id(a).into()));
        }
    }
    check_p(&x, &p_minus, caps)?;
    check_p(&x, &p_plus, caps)?;

    let mut points: Vec<(i64, usize)> = (0..n)
        .flat_map(|a| (p_minus[a]..=p_plus[a]).map(move |t| (t, a)))
        .collect();
    points.sort_unstable();
    let index = |t: i64, a: usize| points.binary_search(&(t, a)).ok();
    let ground = GroundSet::new(
        points
            .iter()
            .map(|&(t, a)| format!("({},{})", t, x.ground().id(a))),
    )?;

    let base = x.closure_at(1);
    let mut gen = Entourage::empty(points.len());
    for (i, &(t, a)) in points.iter().enumerate() {
        for b in base.row(a).ones() {
            for dt in -1..=1 {
                if let Some(j) = index(t + dt, b) {
                    gen.insert(i, j);
                }
            }
        }
    }
    let bornology: Vec<PointSet> = x
        .bornology()
        .generators()
        .iter()
        .map(|b| {
            let mut s = PointSet::with_capacity(points.len());
            for (i, &(_, a)) in points.iter().enumerate() {
                if b.contains(a) {
                    s.insert(i);
                }
            }
            s
        })
        .collect();
    let space = Arc::new(BornCoarseSpace::from_parts(ground, vec![gen], bornology)?);

    let projection = SpaceMap::new(
        space.clone(),
        x.clone(),
        points.iter().map(|&(_, a)| a).collect(),
    )?;
    let section = |p: &[i64]| {
        (0..n)
            .map(|a| index(p[a], a).expect("section lies in the cylinder"))
            .collect::<Vec<_>>()
    };
    let i_minus = SpaceMap::new(x.clone(), space.clone(), section(&p_minus))?;
    let i_plus = SpaceMap::new(x, space.clone(), section(&p_plus))?;
    Ok(Cylinder {
        space,
        projection,
        i_minus,
        i_plus,
        p_minus,
        p_plus,
    })
}

/// Whether `h ∘ i_minus = f0` and `h ∘ i_plus = f1` pointwise.
pub fn check_homotopy(
    f0: &SpaceMap,
    f1: &SpaceMap,
    cyl: &Cylinder,
    h: &SpaceMap,
) -> Result<bool, MorphismError> {
    let base = cyl.projection.target();
    if !same_space(h.source(), &cyl.space)
        || !same_space(f0.source(), base)
        || !same_space(f1.source(), base)
        || !same_space(f0.target(), h.target())
        || !same_space(f1.target(), h.target())
    {
        return Err(MorphismError::CylinderMismatch);
    }
    let start = cyl.i_minus.then(h)?;
    let end = cyl.i_plus.then(h)?;
    Ok(start.table() == f0.table() && end.table() == f1.table())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphisms::check_morphism;

    fn point() -> Arc<BornCoarseSpace> {
        Arc::new(BornCoarseSpace::explicit(&["*"], &[], &[vec!["*"]]).unwrap())
    }

    #[test]
    fn point_cylinder_is_an_interval() {
        let c = cylinder(point(), vec![0], vec![5], &CylinderCaps::default()).unwrap();
        assert_eq!(c.space.len(), 6);
        assert_eq!(c.space.coarse_components().len(), 1);
        for m in [&c.projection, &c.i_minus, &c.i_plus] {
            assert!(check_morphism(m).is_morphism());
        }
    }

    #[test]
    fn sections_split_the_projection() {
        let x = Arc::new(
            BornCoarseSpace::explicit(&["a", "b"], &[vec![("a", "b")]], &[vec!["a", "b"]]).unwrap(),
        );
        let c = cylinder(x.clone(), vec![0, -1], vec![1, 2], &CylinderCaps { max_jump: 1, max_height: None })
            .unwrap();
        for s in [&c.i_minus, &c.i_plus] {
            let back = s.then(&c.projection).unwrap();
            assert_eq!(back.table(), &[0, 1]);
        }
    }

    #[test]
    fn jump_over_generator_is_rejected() {
        let x = Arc::new(
            BornCoarseSpace::explicit(&["a", "b"], &[vec![("a", "b")]], &[vec!["a", "b"]]).unwrap(),
        );
        let err = cylinder(x, vec![0, 0], vec![0, 7], &CylinderCaps::default()).unwrap_err();
        assert!(matches!(err, MorphismError::PNotControlled { jump: 7, .. }));
    }

    #[test]
    fn height_cap_is_enforced() {
        let caps = CylinderCaps {
            max_jump: 10,
            max_height: Some(3),
        };
        let err = cylinder(point(), vec![0], vec![5], &caps).unwrap_err();
        assert!(matches!(err, MorphismError::PNotBornological { value: 5, .. }));
    }

    #[test]
    fn trivial_homotopy() {
        let x = point();
        let c = cylinder(x.clone(), vec![0], vec![0], &CylinderCaps::default()).unwrap();
        let f = SpaceMap::identity(x);
        let h = c.projection.then(&f).unwrap();
        assert!(check_homotopy(&f, &f, &c, &h).unwrap());
    }

    #[test]
    fn wrong_endpoint_is_detected() {
        let two = Arc::new(
            BornCoarseSpace::explicit(&["a", "b"], &[vec![("a", "b")]], &[vec!["a", "b"]]).unwrap(),
        );
        let x = point();
        let c = cylinder(x.clone(), vec![0], vec![1], &CylinderCaps::default()).unwrap();
        let f0 = SpaceMap::constant(x.clone(), two.clone(), 0).unwrap();
        let f1 = SpaceMap::constant(x, two.clone(), 1).unwrap();
        let h = SpaceMap::new(c.space.clone(), two, vec![0, 0]).unwrap();
        assert!(!check_homotopy(&f0, &f1, &c, &h).unwrap());
        let h = SpaceMap::new(c.space.clone(), h.target().clone(), vec![0, 1]).unwrap();
        assert!(check_homotopy(&f0, &f1, &c, &h).unwrap());
    }
}
