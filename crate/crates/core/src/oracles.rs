//! Independent reference computations used by the self-test and the test
//! suites. They work on small `i64` instances by brute force and share no
//! code with the library paths they check.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::intlinalg::IntegerMatrix;
use crate::presentation::CentralExtensionPresentation;
use crate::words::{Generator, Word};
use num_traits::ToPrimitive;

/// Collects a word by literally swapping adjacent out-of-order letters,
/// one commutator at a time. Returns `(x, central)` with torsion
/// coordinates reduced into `[0, o)`.
pub fn collect_by_swaps(p: &CentralExtensionPresentation, w: &Word) -> (Vec<i64>, Vec<i64>) {
    let mut central = vec![0i64; p.r()];
    let mut letters: Vec<(usize, i64)> = Vec::new();
    for letter in w.letters() {
        let e = if letter.inverse { -1 } else { 1 };
        match letter.generator {
            Generator::Central(s) => central[s] += e,
            Generator::NonCentral(i) => letters.push((i, e)),
        }
    }
    // Bubble sort; swapping `a_j^f a_i^e` (j > i) into `a_i^e a_j^f` emits
    // `[a_j^f, a_i^e] = [a_j, a_i]^{fe}`.
    let mut sorted = false;
    while !sorted {
        sorted = true;
        for pos in 0..letters.len().saturating_sub(1) {
            let (j, f) = letters[pos];
            let (i, e) = letters[pos + 1];
            if j > i {
                for (s, c) in central.iter_mut().enumerate() {
                    *c += f * e * p.gamma(j, i, s).to_i64().unwrap();
                }
                letters.swap(pos, pos + 1);
                sorted = false;
            }
        }
    }
    let mut x = vec![0i64; p.k()];
    for (i, e) in letters {
        x[i] += e;
    }
    for (s, c) in central.iter_mut().enumerate() {
        if let Some(order) = p.torsion_order(s) {
            *c = c.rem_euclid(order.to_i64().unwrap());
        }
    }
    (x, central)
}

fn mat_vec(m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Calls `visit` on every point of `[-radius, radius]^d`.
pub fn for_each_in_box(d: usize, radius: i64, mut visit: impl FnMut(&[i64])) {
    let mut x = vec![-radius; d];
    loop {
        visit(&x);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if x[i] < radius {
                x[i] += 1;
                break;
            }
            x[i] = -radius;
            i += 1;
        }
    }
}

/// All integer solutions of `M x = b` inside `[-radius, radius]^d`.
pub fn solutions_in_box(m: &[Vec<i64>], b: &[i64], d: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_in_box(d, radius, |x| {
        if mat_vec(m, x) == b {
            out.push(x.to_vec());
        }
    });
    out
}

/// Minimum of `|x|_1` over solutions of `M x = b` found in the box, with
/// the lexicographically smallest minimiser.
pub fn min_l1_in_box(m: &[Vec<i64>], b: &[i64], d: usize, radius: i64) -> Option<(i64, Vec<i64>)> {
    solutions_in_box(m, b, d, radius)
        .into_iter()
        .map(|x| (x.iter().map(|v| v.abs()).sum::<i64>(), x))
        .min()
}

/// Determinant by cofactor expansion.
pub fn determinant_by_cofactors(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| *v).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] as i128 * determinant_by_cofactors(&minor)
        })
        .sum()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, max_abs: i64) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-max_abs..=max_abs)).collect())
        .collect()
}

pub fn to_matrix(m: &[Vec<i64>], cols: usize) -> IntegerMatrix {
    IntegerMatrix::from_rows(
        cols,
        m.iter()
            .map(|row| row.iter().copied().map(num_bigint::BigInt::from).collect())
            .collect(),
    )
}

pub fn to_big(v: &[i64]) -> Vec<num_bigint::BigInt> {
    v.iter().copied().map(num_bigint::BigInt::from).collect()
}

pub fn matrix_times(m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    mat_vec(m, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cofactor_determinant() {
        assert_eq!(determinant_by_cofactors(&[vec![1, 2], vec![3, 4]]), -2);
        assert_eq!(determinant_by_cofactors(&[]), 1);
    }

    #[test]
    fn box_enumeration_counts() {
        let mut count = 0;
        for_each_in_box(2, 1, |_| count += 1);
        assert_eq!(count, 9);
        let sols = solutions_in_box(&[vec![1, 1]], &[0], 2, 2);
        assert_eq!(sols.len(), 5);
    }
}
