//! Explicit generators and coordinates for homology groups.
//!
//! For `∂_n = U·S·V` the cycles are spanned by the last columns of `V⁻¹`, with
//! coordinates given by the matching rows of `V`. Boundaries in those
//! coordinates form a lattice whose Smith form `U'·D·V'` picks a basis of
//! cyclic summands: columns of `U'` with `d_i ≠ 1`, coordinates from `U'⁻¹`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::chains::ChainComplexAtScale;
use super::groups::FGAbGroup;
use super::int::Int;
use super::matrix::{BigMatrix, Matrix};
use super::snf::{snf_with, Track};
use super::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyBasis {
    pub degree: usize,
    pub group: FGAbGroup,
    /// Chain vectors (columns) representing the cyclic summands.
    pub generators: BigMatrix,
    /// Maps a cycle to its summand coordinates (before reduction).
    pub coordinates: BigMatrix,
    /// Order of each summand; `0` for free summands.
    pub orders: Vec<BigInt>,
}

struct Raw<T> {
    generators: Matrix<T>,
    coordinates: Matrix<T>,
    orders: Vec<T>,
}

fn compute<T: Int>(dn: Matrix<T>, dn1: Matrix<T>) -> Option<Raw<T>> {
    let cn = dn.cols();
    let p = snf_with(
        dn,
        Track {
            v: true,
            r: true,
            ..Track::NONE
        },
    )?;
    let r = p.rank;
    let cycle_cols: Vec<usize> = (r..cn).collect();
    let kernel = p.r.expect("r tracked").select_columns(&cycle_cols);
    let cycle_coords = p.v.expect("v tracked").select_rows(&cycle_cols);
    let m = cycle_coords.checked_mul(&dn1)?;
    let q = snf_with(
        m,
        Track {
            u: true,
            l: true,
            ..Track::NONE
        },
    )?;
    let dims = cycle_cols.len();
    let diag = q.diagonal();
    let mut kept = Vec::new();
    let mut orders = Vec::new();
    for i in 0..dims {
        if i < q.rank {
            if !diag[i].is_unit() {
                kept.push(i);
                orders.push(diag[i].clone());
            }
        } else {
            kept.push(i);
            orders.push(T::zero());
        }
    }
    let generators = kernel.checked_mul(&q.u.expect("u tracked").select_columns(&kept))?;
    let coordinates = q.l.expect("l tracked").select_rows(&kept).checked_mul(&cycle_coords)?;
    Some(Raw {
        generators,
        coordinates,
        orders,
    })
}

fn is_nil(v: &BigInt) -> bool {
    v.sign() == num_bigint::Sign::NoSign
}

fn dense<T: Int>(m: &SparseMatrix) -> Matrix<T> {
    let mut d = Matrix::<T>::zeros(m.rows(), m.cols());
    for j in 0..m.cols() {
        for &(i, v) in m.column(j) {
            d.set(i as usize, j, T::from_i64(v));
        }
    }
    d
}

fn finish<T: Int>(degree: usize, raw: Raw<T>) -> HomologyBasis {
    let orders: Vec<BigInt> = raw.orders.iter().map(Int::to_bigint).collect();
    let group = FGAbGroup {
        free_rank: orders.iter().filter(|d| is_nil(d)).count(),
        torsion: orders.iter().filter(|d| !is_nil(d)).cloned().collect(),
    };
    HomologyBasis {
        degree,
        group,
        generators: raw.generators.to_big(),
        coordinates: raw.coordinates.to_big(),
        orders,
    }
}

impl HomologyBasis {
    /// Basis of `H_n` for a complex built through degree `n + 1`.
    pub fn of(complex: &ChainComplexAtScale, n: usize) -> HomologyBasis {
        assert!(n < complex.top_degree(), "complex must reach degree n + 1");
        let dn = complex.boundary(n);
        let dn1 = complex.boundary(n + 1);
        match compute::<i64>(dense(dn), dense(dn1)) {
            Some(raw) => finish(n, raw),
            None => finish(
                n,
                compute::<BigInt>(dense(dn), dense(dn1)).expect("big integers do not overflow"),
            ),
        }
    }

    /// Summand coordinates of a cycle, torsion reduced to `0..d`.
    pub fn coordinates_of(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.orders.len());
        for (i, d) in self.orders.iter().enumerate() {
            let mut acc = BigInt::from(0);
            for (j, c) in cycle.iter().enumerate() {
                if !is_nil(c) {
                    acc += self.coordinates.get(i, j) * c;
                }
            }
            if !is_nil(d) {
                acc = acc.mod_floor(d);
            }
            out.push(acc);
        }
        out
    }
}

/// Matrix of a chain map between homology groups in the given bases.
pub fn homology_matrix(
    chain: &SparseMatrix,
    source: &HomologyBasis,
    target: &HomologyBasis,
) -> BigMatrix {
    let gs = source.orders.len();
    let gt = target.orders.len();
    let mut out = BigMatrix::zeros(gt, gs);
    for j in 0..gs {
        let mut image = vec![BigInt::from(0); chain.rows()];
        for c in 0..chain.cols() {
            let g = source.generators.get(c, j);
            if is_nil(g) {
                continue;
            }
            for &(i, v) in chain.column(c) {
                image[i as usize] += g * v;
            }
        }
        for (i, v) in target.coordinates_of(&image).into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

/// Whether a homomorphism between groups with these bases is an isomorphism.
/// Equal groups and a surjective map suffice, since finitely generated abelian
/// groups are Hopfian.
pub fn is_isomorphism(map: &BigMatrix, source: &HomologyBasis, target: &HomologyBasis) -> bool {
    if source.group != target.group {
        return false;
    }
    let gt = target.orders.len();
    let mut aug = BigMatrix::zeros(gt, map.cols() + gt);
    for i in 0..gt {
        for j in 0..map.cols() {
            aug.set(i, j, map.get(i, j).clone());
        }
        aug.set(i, map.cols() + i, target.orders[i].clone());
    }
    let p = snf_with(aug, Track::NONE).expect("big integers do not overflow");
    p.rank == gt && p.diagonal().iter().all(One::is_one)
}
