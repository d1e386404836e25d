//! Smith normal form over the integers.
//!
//! The reduction keeps `S = L·A·R` and `A = U·S·V` with `L = U⁻¹` and
//! `R = V⁻¹`, updating whichever transforms were requested. Pivots are the
//! smallest nonzero absolute value in the active block, ties broken by
//! row-major position.

use num_bigint::BigInt;

use super::int::Int;
use super::matrix::{BigMatrix, Matrix};

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Track {
    pub u: bool,
    pub v: bool,
    pub l: bool,
    pub r: bool,
}

impl Track {
    pub const NONE: Track = Track {
        u: false,
        v: false,
        l: false,
        r: false,
    };
}

#[derive(Clone)]
pub(crate) struct SnfParts<T> {
    pub s: Matrix<T>,
    pub u: Option<Matrix<T>>,
    pub v: Option<Matrix<T>>,
    pub l: Option<Matrix<T>>,
    pub r: Option<Matrix<T>>,
    pub rank: usize,
}

impl<T: Int> SnfParts<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rank).map(|i| self.s.get(i, i).clone()).collect()
    }
}

struct Reducer<T> {
    p: SnfParts<T>,
}

impl<T: Int> Reducer<T> {
    fn row_add(&mut self, i: usize, j: usize, c: &T) -> Option<()> {
        self.p.s.add_row_multiple(i, j, c)?;
        if let Some(l) = &mut self.p.l {
            l.add_row_multiple(i, j, c)?;
        }
        if let Some(u) = &mut self.p.u {
            u.add_col_multiple(j, i, &c.neg()?)?;
        }
        Some(())
    }

    fn col_add(&mut self, i: usize, j: usize, c: &T) -> Option<()> {
        self.p.s.add_col_multiple(i, j, c)?;
        if let Some(r) = &mut self.p.r {
            r.add_col_multiple(i, j, c)?;
        }
        if let Some(v) = &mut self.p.v {
            v.add_row_multiple(j, i, &c.neg()?)?;
        }
        Some(())
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        self.p.s.swap_rows(a, b);
        if let Some(l) = &mut self.p.l {
            l.swap_rows(a, b);
        }
        if let Some(u) = &mut self.p.u {
            u.swap_cols(a, b);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        self.p.s.swap_cols(a, b);
        if let Some(r) = &mut self.p.r {
            r.swap_cols(a, b);
        }
        if let Some(v) = &mut self.p.v {
            v.swap_rows(a, b);
        }
    }

    fn row_negate(&mut self, i: usize) -> Option<()> {
        self.p.s.negate_row(i)?;
        if let Some(l) = &mut self.p.l {
            l.negate_row(i)?;
        }
        if let Some(u) = &mut self.p.u {
            u.negate_col(i)?;
        }
        Some(())
    }

    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let s = &self.p.s;
        let mut best: Option<(usize, usize)> = None;
        for i in t..s.rows() {
            for j in t..s.cols() {
                let a = s.get(i, j);
                if a.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if !a.abs_lt(s.get(bi, bj)) => {}
                    _ => best = Some((i, j)),
                }
                if a.is_unit() {
                    return best;
                }
            }
        }
        best
    }

    /// Clears row and column `t` around the pivot. Returns `false` when a
    /// nonzero remainder was left, so a smaller pivot must be chosen.
    fn clear_cross(&mut self, t: usize) -> Option<bool> {
        let (m, n) = (self.p.s.rows(), self.p.s.cols());
        let mut clean = true;
        for i in t + 1..m {
            if self.p.s.get(i, t).is_zero() {
                continue;
            }
            let q = self.p.s.get(i, t).quot(self.p.s.get(t, t))?;
            if !q.is_zero() {
                self.row_add(i, t, &q.neg()?)?;
            }
            if !self.p.s.get(i, t).is_zero() {
                clean = false;
            }
        }
        for j in t + 1..n {
            if self.p.s.get(t, j).is_zero() {
                continue;
            }
            let q = self.p.s.get(t, j).quot(self.p.s.get(t, t))?;
            if !q.is_zero() {
                self.col_add(j, t, &q.neg()?)?;
            }
            if !self.p.s.get(t, j).is_zero() {
                clean = false;
            }
        }
        Some(clean)
    }

    fn non_divisible(&self, t: usize) -> Option<Option<usize>> {
        let s = &self.p.s;
        let d = s.get(t, t);
        for i in t + 1..s.rows() {
            for j in t + 1..s.cols() {
                let a = s.get(i, j);
                if a.is_zero() {
                    continue;
                }
                let r = a.sub(&a.quot(d)?.mul(d)?)?;
                if !r.is_zero() {
                    return Some(Some(i));
                }
            }
        }
        Some(None)
    }

    fn run(mut self) -> Option<SnfParts<T>> {
        let limit = self.p.s.rows().min(self.p.s.cols());
        let mut t = 0;
        while t < limit {
            if self.pivot(t).is_none() {
                break;
            }
            loop {
                // The block minimum strictly decreases after every nonzero remainder.
                let (pi, pj) = self.pivot(t).expect("active block is nonzero");
                self.row_swap(t, pi);
                self.col_swap(t, pj);
                if !self.clear_cross(t)? {
                    continue;
                }
                match self.non_divisible(t)? {
                    Some(i) => {
                        self.row_add(t, i, &T::one())?;
                    }
                    None => break,
                }
            }
            if self.p.s.get(t, t).is_negative() {
                self.row_negate(t)?;
            }
            t += 1;
        }
        self.p.rank = t;
        Some(self.p)
    }
}

pub(crate) fn snf_with<T: Int>(a: Matrix<T>, track: Track) -> Option<SnfParts<T>> {
    let (m, n) = (a.rows(), a.cols());
    let parts = SnfParts {
        s: a,
        u: track.u.then(|| Matrix::identity(m)),
        v: track.v.then(|| Matrix::identity(n)),
        l: track.l.then(|| Matrix::identity(m)),
        r: track.r.then(|| Matrix::identity(n)),
        rank: 0,
    };
    Reducer { p: parts }.run()
}

/// `A = U·S·V` with `U`, `V` unimodular and `S` diagonal with `S_ii | S_(i+1)(i+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub u: BigMatrix,
    pub s: BigMatrix,
    pub v: BigMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries of `S`, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k)
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !Int::is_zero(d))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn to_result<T: Int>(p: SnfParts<T>) -> SnfResult {
    SnfResult {
        u: p.u.expect("u tracked").to_big(),
        s: p.s.to_big(),
        v: p.v.expect("v tracked").to_big(),
    }
}

/// Smith normal form of an integer matrix; escalates to big integers when a
/// machine-word intermediate would overflow.
pub fn smith_normal_form(a: &Matrix<i64>) -> SnfResult {
    let track = Track {
        u: true,
        v: true,
        ..Track::NONE
    };
    match snf_with(a.clone(), track) {
        Some(p) => to_result(p),
        None => to_result(snf_with(a.to_big(), track).expect("big integers do not overflow")),
    }
}

pub fn smith_normal_form_big(a: &BigMatrix) -> SnfResult {
    let track = Track {
        u: true,
        v: true,
        ..Track::NONE
    };
    to_result(snf_with(a.clone(), track).expect("big integers do not overflow"))
}
