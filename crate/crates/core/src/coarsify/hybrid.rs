use super::CoarsifyError;
use crate::space::{BigFamilyPrefix, BornCoarseSpace, Entourage, PointSet, Rational};

/// `U_φ ∩ closure_at(base_k)`: a pair is kept when, for every member `Y_i`,
/// both points lie in `Y_i` or the pair lies in `closure_at(phi[i])`.
pub fn hybrid_entourage(
    space: &BornCoarseSpace,
    family: &BigFamilyPrefix,
    phi: &[usize],
    base_k: usize,
) -> Result<Entourage, CoarsifyError> {
    if phi.len() != family.len() {
        return Err(CoarsifyError::PhiLength {
            phi: phi.len(),
            family: family.len(),
        });
    }
    if let Some(i) = phi.windows(2).position(|w| w[1] > w[0]) {
        return Err(CoarsifyError::PhiNotDecreasing(i + 1));
    }
    let base = space.closure_at(base_k);
    let levels: Vec<_> = phi.iter().map(|&k| space.closure_at(k)).collect();
    let mut out = Entourage::empty(space.len());
    for (a, b) in base.pairs() {
        let keep = family
            .members()
            .iter()
            .zip(&levels)
            .all(|(y, u)| (y.contains(a) && y.contains(b)) || u.contains(a, b));
        if keep {
            out.insert(a, b);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    /// `(r, s(r))`: least listed `s` with `U_r[Y] ∩ U_r[Z] ⊆ U_s[Y ∩ Z]`, or `None`.
    pub per_radius: Vec<(Rational, Option<Rational>)>,
}

impl DecompositionReport {
    pub fn holds(&self) -> bool {
        self.per_radius.iter().all(|(_, s)| s.is_some())
    }
}

/// Checks the uniform decomposition condition for `(Y, Z)` at each listed radius,
/// using the strict metric neighbourhoods `U_r = {d < r}`.
pub fn uniform_decomposition_check(
    space: &BornCoarseSpace,
    y: &PointSet,
    z: &PointSet,
    radii: &[Rational],
) -> Result<DecompositionReport, CoarsifyError> {
    let metric = space.metric().ok_or(CoarsifyError::NoMetric)?;
    let mut union = y.clone();
    union.union_with(z);
    if union != space.ground().all() {
        return Err(CoarsifyError::NotADecomposition);
    }
    let zero = Rational::from_integer(0);
    if radii.iter().any(|r| *r <= zero) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CoarsifyError::BadRadii);
    }
    let mut both = y.clone();
    both.intersect_with(z);
    let mut ascending: Vec<&Rational> = radii.iter().collect();
    ascending.sort();
    let per_radius = radii
        .iter()
        .map(|r| {
            let mut lhs = metric.thicken(r, y);
            lhs.intersect_with(&metric.thicken(r, z));
            let s = ascending
                .iter()
                .find(|s| lhs.is_subset(&metric.thicken(s, &both)))
                .map(|s| **s);
            (*r, s)
        })
        .collect();
    Ok(DecompositionReport { per_radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{point_set, BuiltinKind};

    fn path_metric(n: i64) -> BornCoarseSpace {
        let ids: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let dist = (0..=n)
            .map(|a| (0..=n).map(|b| Rational::from_integer((a - b).abs())).collect())
            .collect();
        BornCoarseSpace::from_metric(&ids, dist, vec![Rational::from_integer(2)]).unwrap()
    }

    #[test]
    fn whole_member_keeps_base() {
        let x = BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 10).unwrap();
        let fam = BigFamilyPrefix::new(&x, vec![x.ground().all()], 1).unwrap();
        let h = hybrid_entourage(&x, &fam, &[0], 2).unwrap();
        assert_eq!(h, *x.closure_at(2));
    }

    #[test]
    fn empty_members_and_zero_phi_give_diagonal() {
        let x = BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 10).unwrap();
        let fam = BigFamilyPrefix::new(&x, vec![point_set(11, []), point_set(11, [])], 1).unwrap();
        let h = hybrid_entourage(&x, &fam, &[0, 0], 3).unwrap();
        assert_eq!(h, Entourage::diagonal(11));
        assert_eq!(
            hybrid_entourage(&x, &fam, &[0, 1], 3),
            Err(CoarsifyError::PhiNotDecreasing(1))
        );
    }

    #[test]
    fn path_split_at_the_middle() {
        let x = path_metric(20);
        let y = point_set(21, 0..=10);
        let z = point_set(21, 10..=20);
        let radii: Vec<Rational> = [3, 2, 1].map(Rational::from_integer).to_vec();
        let r = uniform_decomposition_check(&x, &y, &z, &radii).unwrap();
        for (r, s) in &r.per_radius {
            assert_eq!(Some(*r), *s);
        }
        let all = x.ground().all();
        let r = uniform_decomposition_check(&x, &y, &all, &radii).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn disjoint_halves_fail() {
        let x = path_metric(20);
        let y = point_set(21, 0..=10);
        let z = point_set(21, 11..=20);
        let radii: Vec<Rational> = [3, 2].map(Rational::from_integer).to_vec();
        let r = uniform_decomposition_check(&x, &y, &z, &radii).unwrap();
        assert!(!r.holds());
        let short = point_set(21, 0..=5);
        assert_eq!(
            uniform_decomposition_check(&x, &short, &z, &radii),
            Err(CoarsifyError::NotADecomposition)
        );
    }
}
