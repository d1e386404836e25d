use std::fmt;

use num_bigint::BigInt;

use super::int::Int;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T = i64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type BigMatrix = Matrix<BigInt>;

impl<T: Int> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Int::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Product, or `None` on overflow. Panics on a shape mismatch.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b)?)?;
                }
            }
        }
        Some(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect::<Option<Vec<_>>>()?;
        Some(Matrix { data, ..*self })
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect::<Option<Vec<_>>>()?;
        Some(Matrix { data, ..*self })
    }

    /// Columns `cols` of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), self.cols);
        for (ii, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                m.set(ii, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn to_big(&self) -> BigMatrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Int::to_bigint).collect(),
        }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row_i += c · row_j`.
    pub(crate) fn add_row_multiple(&mut self, i: usize, j: usize, c: &T) -> Option<()> {
        for col in 0..self.cols {
            let src = &self.data[j * self.cols + col];
            if src.is_zero() {
                continue;
            }
            let delta = src.mul(c)?;
            let idx = i * self.cols + col;
            self.data[idx] = self.data[idx].add(&delta)?;
        }
        Some(())
    }

    /// `col_i += c · col_j`.
    pub(crate) fn add_col_multiple(&mut self, i: usize, j: usize, c: &T) -> Option<()> {
        for row in 0..self.rows {
            let src = &self.data[row * self.cols + j];
            if src.is_zero() {
                continue;
            }
            let delta = src.mul(c)?;
            let idx = row * self.cols + i;
            self.data[idx] = self.data[idx].add(&delta)?;
        }
        Some(())
    }

    pub(crate) fn negate_row(&mut self, i: usize) -> Option<()> {
        for col in 0..self.cols {
            let idx = i * self.cols + col;
            self.data[idx] = self.data[idx].neg()?;
        }
        Some(())
    }

    pub(crate) fn negate_col(&mut self, j: usize) -> Option<()> {
        for row in 0..self.rows {
            let idx = row * self.cols + j;
            self.data[idx] = self.data[idx].neg()?;
        }
        Some(())
    }
}

impl Matrix<i64> {
    /// Determinant by fraction-free elimination over big integers.
    pub fn determinant(&self) -> BigInt {
        self.to_big().determinant()
    }
}

impl BigMatrix {
    /// Bareiss determinant. Panics on non-square input.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::from(1);
        }
        let mut m = self.to_rows();
        let mut sign = BigInt::from(1);
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if m[k][k] == BigInt::from(0) {
                let Some(p) = (k + 1..n).find(|&i| m[i][k] != BigInt::from(0)) else {
                    return BigInt::from(0);
                };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }
}

impl<T: Int> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl<T: Int> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}
