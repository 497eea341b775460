use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{hermite_decomposition, IntegerMatrix, LinalgError};

/// All integer solutions of `M x = b`: `particular + span_Z(kernel_basis)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub particular: Vec<BigInt>,
    pub kernel_basis: Vec<Vec<BigInt>>,
}

impl SolutionSet {
    pub fn dimension(&self) -> usize {
        self.particular.len()
    }

    /// `particular + sum_i coefficients[i] * kernel_basis[i]`.
    pub fn point(&self, coefficients: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coefficients.len(), self.kernel_basis.len());
        let mut x = self.particular.clone();
        for (t, v) in coefficients.iter().zip(&self.kernel_basis) {
            if t.is_zero() {
                continue;
            }
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += t * vi;
            }
        }
        x
    }
}

/// Solves `M x = b` over the integers.
///
/// Returns `None` when there is no integer solution. A returned particular
/// solution and every kernel vector have been checked by multiplication.
pub fn solve_integer_system(m: &IntegerMatrix, b: &[BigInt]) -> Option<SolutionSet> {
    assert_eq!(b.len(), m.rows(), "right-hand side length mismatch");
    let d = m.cols();
    let decomposition = hermite_decomposition(m);
    let h = &decomposition.hnf;
    let rank = decomposition.rank();

    // H y = b, forward substitution along the pivots.
    let mut y = vec![BigInt::zero(); d];
    let mut next_pivot = 0;
    for row in 0..m.rows() {
        let partial: BigInt = (0..next_pivot).map(|j| &h[(row, j)] * &y[j]).sum();
        let residual = &b[row] - partial;
        if next_pivot < rank && decomposition.pivot_rows[next_pivot] == row {
            let (q, rem) = residual.div_rem(&h[(row, next_pivot)]);
            if !rem.is_zero() {
                return None;
            }
            y[next_pivot] = q;
            next_pivot += 1;
        } else if !residual.is_zero() {
            return None;
        }
    }

    let u = &decomposition.transform;
    let particular = u.mul_vec(&y);
    let kernel_basis: Vec<Vec<BigInt>> = (rank..d).map(|j| u.column(j)).collect();

    assert_eq!(m.mul_vec(&particular), b, "particular solution failed verification");
    for v in &kernel_basis {
        assert!(
            m.mul_vec(v).iter().all(Zero::is_zero),
            "kernel vector failed verification"
        );
    }
    Some(SolutionSet {
        particular,
        kernel_basis,
    })
}

/// Result of discarding dependent equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowReduction {
    Reduced {
        matrix: IntegerMatrix,
        rhs: Vec<BigInt>,
        kept_rows: Vec<usize>,
    },
    /// Some row of `M` depends on the others while the same row of `[M : b]`
    /// does not: no rational solution exists.
    Inconsistent,
}

/// Keeps a maximal set of linearly independent rows of `M` (greedily, in
/// order), provided the discarded rows of `[M : b]` are dependent on the
/// kept ones.
pub fn row_rank_reduce(m: &IntegerMatrix, b: &[BigInt]) -> RowReduction {
    assert_eq!(b.len(), m.rows(), "right-hand side length mismatch");
    let mut kept_rows: Vec<usize> = Vec::new();
    for i in 0..m.rows() {
        let mut candidate = kept_rows.clone();
        candidate.push(i);
        if m.select_rows(&candidate).rank() == candidate.len() {
            kept_rows = candidate;
        }
    }
    if m.augment(b).rank() != kept_rows.len() {
        return RowReduction::Inconsistent;
    }
    RowReduction::Reduced {
        matrix: m.select_rows(&kept_rows),
        rhs: kept_rows.iter().map(|&i| b[i].clone()).collect(),
        kept_rows,
    }
}

/// Largest absolute `r x r` minor of `[M : b]`, where `M` has full row rank
/// `r`.
pub fn max_minor_bound(m: &IntegerMatrix, b: &[BigInt]) -> Result<BigInt, LinalgError> {
    let r = m.rows();
    let rank = m.rank();
    if rank < r {
        return Err(LinalgError::RankDeficient { rows: r, rank });
    }
    let augmented = m.augment(b);
    let mut best = BigInt::zero();
    let mut columns: Vec<usize> = (0..r).collect();
    loop {
        let det = augmented.select_columns(&columns).determinant().abs();
        best = best.max(det);
        if !next_combination(&mut columns, augmented.cols()) {
            break;
        }
    }
    Ok(best)
}

/// Advances `c` to the next `c.len()`-subset of `0..n` in lexicographic
/// order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}
