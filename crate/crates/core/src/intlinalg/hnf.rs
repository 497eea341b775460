use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntegerMatrix;

/// Column-style Hermite normal form.
///
/// `matrix * transform = hnf` with `transform` unimodular. `hnf` is in
/// column echelon form: column `c < rank` has its pivot at row
/// `pivot_rows[c]`, is zero above it, pivot rows strictly increase, pivots
/// are positive, and entries to the left of a pivot lie in `[0, pivot)`.
/// Columns `rank..` are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteDecomposition {
    pub hnf: IntegerMatrix,
    pub transform: IntegerMatrix,
    pub pivot_rows: Vec<usize>,
}

impl HermiteDecomposition {
    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }
}

/// Returns `(H, U)` with `M U = H`.
pub fn hermite_normal_form(m: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let d = hermite_decomposition(m);
    (d.hnf, d.transform)
}

pub fn hermite_decomposition(m: &IntegerMatrix) -> HermiteDecomposition {
    let mut h = m.clone();
    let cols = h.cols();
    let mut u = IntegerMatrix::identity(cols);
    let mut pivot_rows = Vec::new();

    for row in 0..h.rows() {
        let c = pivot_rows.len();
        if c == cols {
            break;
        }
        // Fold every entry of this row in columns c+1.. into column c.
        for j in c + 1..cols {
            if h[(row, j)].is_zero() {
                continue;
            }
            if h[(row, c)].is_zero() {
                h.swap_columns(c, j);
                u.swap_columns(c, j);
                continue;
            }
            let a = h[(row, c)].clone();
            let b = h[(row, j)].clone();
            let eg = a.extended_gcd(&b);
            // [col_c, col_j] <- [x*col_c + y*col_j, -(b/g)*col_c + (a/g)*col_j]
            // which has determinant (a x + b y)/g = 1.
            let (ag, bg) = (&a / &eg.gcd, &b / &eg.gcd);
            let neg_bg = -bg;
            let coeffs = [&eg.x, &eg.y, &neg_bg, &ag];
            h.combine_columns(c, j, coeffs);
            u.combine_columns(c, j, coeffs);
        }
        if h[(row, c)].is_zero() {
            continue;
        }
        if h[(row, c)].is_negative() {
            h.negate_column(c);
            u.negate_column(c);
        }
        let pivot = h[(row, c)].clone();
        for j in 0..c {
            let q = h[(row, j)].div_floor(&pivot);
            h.sub_column_multiple(j, c, &q);
            u.sub_column_multiple(j, c, &q);
        }
        pivot_rows.push(row);
    }
    HermiteDecomposition {
        hnf: h,
        transform: u,
        pivot_rows,
    }
}
