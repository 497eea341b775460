use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix of arbitrary-precision integers.
///
/// Zero-row matrices are allowed: a conjugacy system over a presentation
/// with no central generators has no equations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = BigInt::one();
        }
        out
    }

    /// Builds from row vectors. Panics on ragged input.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        IntegerMatrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().copied().map(BigInt::from).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_default()
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Submatrix of the given rows, all columns.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_rows(self.cols, rows.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    /// Submatrix of the given columns, all rows.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_rows(
            cols.len(),
            (0..self.rows)
                .map(|i| cols.iter().map(|&j| self[(i, j)].clone()).collect())
                .collect(),
        )
    }

    /// `[self : b]`.
    pub fn augment(&self, b: &[BigInt]) -> Self {
        assert_eq!(b.len(), self.rows);
        Self::from_rows(
            self.cols + 1,
            (0..self.rows)
                .map(|i| {
                    let mut row = self.row(i).to_vec();
                    row.push(b[i].clone());
                    row
                })
                .collect(),
        )
    }

    pub(crate) fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub(crate) fn negate_column(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = &mut self[(i, j)];
            *v = -std::mem::take(v);
        }
    }

    /// `col[target] -= factor * col[source]`.
    pub(crate) fn sub_column_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = &self[(i, source)] * factor;
            self[(i, target)] -= delta;
        }
    }

    /// Replaces columns `a`, `b` by `(p*a + q*b, r*a + s*b)`.
    pub(crate) fn combine_columns(
        &mut self,
        a: usize,
        b: usize,
        [p, q, r, s]: [&BigInt; 4],
    ) {
        for i in 0..self.rows {
            let va = self[(i, a)].clone();
            let vb = self[(i, b)].clone();
            self[(i, a)] = p * &va + q * &vb;
            self[(i, b)] = r * &va + s * &vb;
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = 1;
        let mut previous = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let value = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = value / &previous;
                }
            }
            previous = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        let mut previous = BigInt::one();
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(rank, pivot);
            for i in rank + 1..self.rows {
                for j in col + 1..self.cols {
                    let value = &a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j];
                    a[i][j] = value / &previous;
                }
                a[i][col] = BigInt::zero();
            }
            previous = a[rank][col].clone();
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// CSV debug format: `rows,cols` then one comma-separated row per line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// A column vector in the same CSV debug format.
    pub fn vector_csv(v: &[BigInt]) -> String {
        Self::from_rows(1, v.iter().map(|x| vec![x.clone()]).collect()).to_csv()
    }
}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntegerMatrix {
    type Output = IntegerMatrix;
    fn mul(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = &self[(i, t)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(t, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
