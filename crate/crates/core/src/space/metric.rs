use num_rational::Ratio;
use num_traits::{Signed, Zero};

use super::{Entourage, GroundSet, PointSet, SpaceError};

pub type Rational = Ratio<i64>;

/// Parses `p/q`, an integer, or a finite decimal such as `1.5`, exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Ok(r) = t.parse::<Rational>() {
        return Some(r);
    }
    let (int_part, frac_part) = t.split_once('.')?;
    if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let negative = int_part.starts_with('-');
    let int_val: i64 = match int_part {
        "" | "-" | "+" => 0,
        s => s.parse().ok()?,
    };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let frac: i64 = frac_part.parse().ok()?;
    let mag = int_val.abs().checked_mul(denom)?.checked_add(frac)?;
    Some(Rational::new(if negative { -mag } else { mag }, denom))
}

/// A finite metric with exact rational distances and the scales that generate
/// its coarse structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metric {
    dist: Vec<Vec<Rational>>,
    scales: Vec<Rational>,
}

impl Metric {
    pub fn new(
        ground: &GroundSet,
        dist: Vec<Vec<Rational>>,
        scales: Vec<Rational>,
    ) -> Result<Self, SpaceError> {
        let n = ground.len();
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(SpaceError::MatrixShape {
                rows: dist.len(),
                points: n,
            });
        }
        for i in 0..n {
            if !dist[i][i].is_zero() {
                return Err(SpaceError::NonzeroDiagonal(ground.id(i).into()));
            }
            for j in 0..n {
                if dist[i][j].is_negative() {
                    return Err(SpaceError::NegativeDistance(
                        ground.id(i).into(),
                        ground.id(j).into(),
                    ));
                }
                if dist[i][j] != dist[j][i] {
                    return Err(SpaceError::NonSymmetricMatrix(
                        ground.id(i).into(),
                        ground.id(j).into(),
                    ));
                }
            }
        }
        let increasing = scales.windows(2).all(|w| w[0] < w[1]);
        if !increasing || scales.iter().any(|r| !r.is_positive()) {
            return Err(SpaceError::BadScales);
        }
        Ok(Metric { dist, scales })
    }

    pub fn distance(&self, x: usize, y: usize) -> Rational {
        self.dist[x][y]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn scales(&self) -> &[Rational] {
        &self.scales
    }

    /// `U_r = {(x, y) : d(x, y) < r}`.
    pub fn neighbourhood(&self, r: &Rational) -> Entourage {
        let n = self.dist.len();
        let mut e = Entourage::empty(n);
        for x in 0..n {
            for y in 0..n {
                if self.dist[x][y] < *r {
                    e.insert(x, y);
                }
            }
        }
        e
    }

    /// `U_r[B]`.
    pub fn thicken(&self, r: &Rational, set: &PointSet) -> PointSet {
        self.neighbourhood(r).thicken(set)
    }

    pub fn restrict(&self, subset: &[usize]) -> Metric {
        let dist = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.dist[i][j]).collect())
            .collect();
        Metric {
            dist,
            scales: self.scales.clone(),
        }
    }
}
