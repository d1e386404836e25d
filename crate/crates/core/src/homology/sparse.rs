use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::int::Int;
use super::matrix::Matrix;
use super::snf::{snf_with, Track};

/// Column-major sparse integer matrix; each column is sorted by row with no zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    /// Builds a column from unsorted entries, summing duplicates and dropping zeros.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Self {
        let cols = columns
            .into_iter()
            .map(|c| {
                let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
                for (r, v) in c {
                    debug_assert!((r as usize) < rows);
                    *acc.entry(r).or_insert(0) += v;
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect();
        SparseMatrix { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        let col = &self.cols[j];
        match col.binary_search_by_key(&(i as u32), |e| e.0) {
            Ok(p) => col[p].1,
            Err(_) => 0,
        }
    }

    pub fn to_dense(&self) -> Matrix<i64> {
        let mut m = Matrix::zeros(self.rows, self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m.set(i as usize, j, v);
            }
        }
        m
    }

    pub fn from_dense(m: &Matrix<i64>) -> Self {
        let cols = (0..m.cols())
            .map(|j| {
                (0..m.rows())
                    .filter(|&i| *m.get(i, j) != 0)
                    .map(|i| (i as u32, *m.get(i, j)))
                    .collect()
            })
            .collect();
        SparseMatrix { rows: m.rows(), cols }
    }

    /// `self · other`, with exact `i128` accumulation; `None` if an entry leaves `i64`.
    pub fn mul(&self, other: &SparseMatrix) -> Option<SparseMatrix> {
        assert_eq!(self.cols(), other.rows, "sparse shape mismatch");
        let mut out = Vec::with_capacity(other.cols());
        for col in &other.cols {
            let mut acc: BTreeMap<u32, i128> = BTreeMap::new();
            for &(k, b) in col {
                for &(i, a) in &self.cols[k as usize] {
                    *acc.entry(i).or_insert(0) += a as i128 * b as i128;
                }
            }
            let mut c = Vec::with_capacity(acc.len());
            for (i, v) in acc {
                if v != 0 {
                    c.push((i, i64::try_from(v).ok()?));
                }
            }
            out.push(c);
        }
        Some(SparseMatrix {
            rows: self.rows,
            cols: out,
        })
    }

    pub fn sub(&self, other: &SparseMatrix) -> Option<SparseMatrix> {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut acc: BTreeMap<u32, i64> = a.iter().copied().collect();
                for &(i, v) in b {
                    let e = acc.entry(i).or_insert(0);
                    *e = e.checked_sub(v)?;
                }
                Some(acc.into_iter().filter(|&(_, v)| v != 0).collect())
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SparseMatrix {
            rows: self.rows,
            cols,
        })
    }

    pub fn add(&self, other: &SparseMatrix) -> Option<SparseMatrix> {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut acc: BTreeMap<u32, i64> = a.iter().copied().collect();
                for &(i, v) in b {
                    let e = acc.entry(i).or_insert(0);
                    *e = e.checked_add(v)?;
                }
                Some(acc.into_iter().filter(|&(_, v)| v != 0).collect())
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SparseMatrix {
            rows: self.rows,
            cols,
        })
    }

    /// Keeps the listed rows (renumbered in order) and columns.
    pub fn submatrix(&self, keep_rows: &[usize], keep_cols: &[usize]) -> SparseMatrix {
        let mut map = vec![u32::MAX; self.rows];
        for (new, &old) in keep_rows.iter().enumerate() {
            map[old] = new as u32;
        }
        let cols = keep_cols
            .iter()
            .map(|&j| {
                self.cols[j]
                    .iter()
                    .filter(|(i, _)| map[*i as usize] != u32::MAX)
                    .map(|&(i, v)| (map[i as usize], v))
                    .collect()
            })
            .collect();
        SparseMatrix {
            rows: keep_rows.len(),
            cols,
        }
    }
}

/// Nonzero invariant factors of a sparse matrix, in divisibility order.
///
/// Unit pivots are eliminated sparsely first; whatever remains is reduced
/// densely. The computation runs on machine words and repeats over big
/// integers if anything overflows.
pub fn invariant_factors(m: &SparseMatrix) -> Vec<BigInt> {
    match eliminate::<i64>(m) {
        Some(f) => f.into_iter().map(|v| v.to_bigint()).collect(),
        None => eliminate::<BigInt>(m).expect("big integers do not overflow"),
    }
}

pub fn rank(m: &SparseMatrix) -> usize {
    invariant_factors(m).len()
}

fn eliminate<T: Int>(m: &SparseMatrix) -> Option<Vec<T>> {
    let nrows = m.rows;
    let mut cols: Vec<Vec<(u32, T)>> = m
        .cols
        .iter()
        .map(|c| c.iter().map(|&(i, v)| (i, T::from_i64(v))).collect())
        .collect();
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); nrows];
    for (j, c) in cols.iter().enumerate() {
        for &(i, _) in c {
            row_cols[i as usize].push(j as u32);
        }
    }
    let mut col_alive = vec![true; cols.len()];
    let mut units = 0usize;

    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by_key(|&j| (cols[j].len(), j));

    loop {
        let mut progress = false;
        for &c in &order {
            if !col_alive[c] || cols[c].is_empty() {
                continue;
            }
            // Unit entry whose row touches the fewest columns.
            let mut best: Option<(usize, usize)> = None;
            for (pos, (r, v)) in cols[c].iter().enumerate() {
                if !v.is_unit() {
                    continue;
                }
                let load = row_cols[*r as usize].len();
                if best.is_none_or(|(_, l)| load < l) {
                    best = Some((pos, load));
                }
            }
            let Some((pos, _)) = best else { continue };
            let (r, p) = cols[c][pos].clone();
            let pivot_col = std::mem::take(&mut cols[c]);
            col_alive[c] = false;

            let mut touched = std::mem::take(&mut row_cols[r as usize]);
            touched.sort_unstable();
            touched.dedup();
            for &c2 in &touched {
                let c2 = c2 as usize;
                if c2 == c || !col_alive[c2] {
                    continue;
                }
                let Ok(at) = cols[c2].binary_search_by_key(&r, |e| e.0) else {
                    continue;
                };
                // col_c2 -= (a / p) · col_c, and a / p = a · p for a unit p.
                let factor = cols[c2][at].1.mul(&p)?;
                let merged = axpy(&cols[c2], &pivot_col, &factor)?;
                for (i, _) in &merged {
                    if cols[c2].binary_search_by_key(i, |e| e.0).is_err() {
                        row_cols[*i as usize].push(c2 as u32);
                    }
                }
                cols[c2] = merged;
            }
            units += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }

    let rest_cols: Vec<usize> = (0..cols.len())
        .filter(|&j| col_alive[j] && !cols[j].is_empty())
        .collect();
    let mut factors: Vec<T> = vec![T::one(); units];
    if !rest_cols.is_empty() {
        let mut row_ids: Vec<u32> = rest_cols
            .iter()
            .flat_map(|&j| cols[j].iter().map(|e| e.0))
            .collect();
        row_ids.sort_unstable();
        row_ids.dedup();
        let mut dense = Matrix::<T>::zeros(row_ids.len(), rest_cols.len());
        for (jj, &j) in rest_cols.iter().enumerate() {
            for (i, v) in &cols[j] {
                let ii = row_ids.binary_search(i).expect("row collected");
                dense.set(ii, jj, v.clone());
            }
        }
        let parts = snf_with(dense, Track::NONE)?;
        factors.extend(parts.diagonal());
    }
    Some(factors)
}

/// `a - f·b` on sorted sparse columns.
fn axpy<T: Int>(a: &[(u32, T)], b: &[(u32, T)], f: &T) -> Option<Vec<(u32, T)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, b[j].1.mul(f)?.neg()?));
            j += 1;
        } else {
            let v = a[i].1.sub(&b[j].1.mul(f)?)?;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}
