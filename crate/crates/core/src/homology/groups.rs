use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

/// `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_t` with `d_1 | d_2 | … | d_t` and every `d_i ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FGAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FGAbGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FGAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Group in a degree with `dim` basis elements, from the nonzero invariant
    /// factors of the outgoing and incoming boundaries.
    pub fn from_ranks(dim: usize, outgoing: &[BigInt], incoming: &[BigInt]) -> Self {
        FGAbGroup {
            free_rank: dim - outgoing.len() - incoming.len(),
            torsion: incoming.iter().filter(|d| !d.is_one()).cloned().collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Number of cyclic summands.
    pub fn summands(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Orders of the cyclic summands, torsion first, `0` for each free summand.
    pub fn orders(&self) -> Vec<BigInt> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat_n(BigInt::from(0), self.free_rank));
        v
    }
}

impl fmt::Display for FGAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}
