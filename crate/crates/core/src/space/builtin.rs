use fixedbitset::FixedBitSet;

use super::{BornCoarseSpace, GroundSet, Metric, Rational, SpaceError, WindowTag};

/// Finite windows of standard infinite metric spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinKind {
    /// `{0, …, N}` inside `[0, ∞)`.
    HalfLine,
    /// `{−N, …, N}` inside `Z`.
    IntWindow,
    /// `{−N, …, N}²` inside `Z²` with the ℓ¹ metric.
    Grid2Window,
}

impl BuiltinKind {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinKind::HalfLine => "half_line",
            BuiltinKind::IntWindow => "int_window",
            BuiltinKind::Grid2Window => "grid2_window",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "half_line" => Some(BuiltinKind::HalfLine),
            "int_window" => Some(BuiltinKind::IntWindow),
            "grid2_window" => Some(BuiltinKind::Grid2Window),
            _ => None,
        }
    }

    /// Formats ambient coordinates as a point identifier.
    pub fn point_id(self, coords: &[i64]) -> String {
        match self {
            BuiltinKind::Grid2Window => format!("({},{})", coords[0], coords[1]),
            _ => coords[0].to_string(),
        }
    }
}

pub(super) fn build(kind: BuiltinKind, radius: u32) -> Result<BornCoarseSpace, SpaceError> {
    if radius == 0 {
        return Err(SpaceError::InvalidRadius);
    }
    let r = radius as i64;
    let coords: Vec<Vec<i64>> = match kind {
        BuiltinKind::HalfLine => (0..=r).map(|t| vec![t]).collect(),
        BuiltinKind::IntWindow => (-r..=r).map(|t| vec![t]).collect(),
        BuiltinKind::Grid2Window => (-r..=r)
            .flat_map(|x| (-r..=r).map(move |y| vec![x, y]))
            .collect(),
    };
    let ground = GroundSet::new(coords.iter().map(|c| kind.point_id(c)))?;
    let n = coords.len();
    let l1 = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(s, t)| (s - t).abs()).sum() };
    let dist: Vec<Vec<Rational>> = coords
        .iter()
        .map(|a| coords.iter().map(|b| Rational::from_integer(l1(a, b))).collect())
        .collect();
    // U_2 in the strict convention is the unit-step relation d ≤ 1.
    let metric = Metric::new(&ground, dist, vec![Rational::from_integer(2)])?;
    let step = metric.neighbourhood(&Rational::from_integer(2));

    // Metric balls about the origin; together they give every subset of the window.
    let origin = vec![0i64; coords[0].len()];
    let max_norm = coords.iter().map(|c| l1(c, &origin)).max().unwrap_or(0);
    let bornology = (0..=max_norm)
        .map(|m| {
            let mut b = FixedBitSet::with_capacity(n);
            for (i, c) in coords.iter().enumerate() {
                if l1(c, &origin) <= m {
                    b.insert(i);
                }
            }
            b
        })
        .collect();
    let window = WindowTag {
        kind,
        radius,
        coords,
    };
    Ok(BornCoarseSpace::from_parts(ground, vec![step], bornology)?
        .with_metric(metric)
        .with_window(window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Entourage;

    #[test]
    fn half_line_unit_steps() {
        let x = build(BuiltinKind::HalfLine, 3).unwrap();
        assert_eq!(x.len(), 4);
        let expected = Entourage::from_pairs(
            4,
            (0..4).map(|i| (i, i)).chain((0..3).flat_map(|i| [(i, i + 1), (i + 1, i)])),
        );
        assert_eq!(*x.closure_at(1), expected);
        assert_eq!(x.window().unwrap().describe(), "half_line(3)");
    }

    #[test]
    fn window_sizes() {
        let z = build(BuiltinKind::IntWindow, 1).unwrap();
        assert_eq!(z.ground().ids(), ["-1", "0", "1"]);
        assert_eq!(build(BuiltinKind::Grid2Window, 1).unwrap().len(), 9);
        assert_eq!(build(BuiltinKind::HalfLine, 0).unwrap_err(), SpaceError::InvalidRadius);
    }
}
