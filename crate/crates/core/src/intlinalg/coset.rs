//! Exact searches over a solution coset `x0 + L`.
//!
//! The lattice is first projected onto the coordinates that matter and put
//! in column echelon form `h_0, ..., h_{rho-1}` (pivot rows increasing).
//! Coordinates before the first pivot are constant on the coset, and once
//! `t_0, ..., t_i` are fixed every coordinate before pivot `i + 1` is
//! determined. A depth-first search over `t_0, t_1, ...` therefore knows an
//! exact partial objective at every node, which gives sound pruning.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{hermite_decomposition, IntegerMatrix, LinalgError, SolutionSet};

/// Optimum (or best incumbent) of an l1 search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetMinimum {
    /// Full solution vector.
    pub point: Vec<BigInt>,
    /// Sum of `|x_i|` over the costed coordinates.
    pub objective: BigInt,
    /// Search nodes expanded.
    pub nodes: u64,
}

struct EchelonCoset {
    /// Projection of the particular solution onto the costed coordinates.
    offset: Vec<BigInt>,
    /// Echelon basis of the projected lattice, one vector per column.
    columns: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    /// Full-space lifts of `columns`.
    lifted: Vec<Vec<BigInt>>,
    particular: Vec<BigInt>,
}

impl EchelonCoset {
    fn new(s: &SolutionSet, costed: &[usize]) -> Self {
        let q = s.kernel_basis.len();
        let projected = IntegerMatrix::from_rows(
            q,
            costed
                .iter()
                .map(|&i| s.kernel_basis.iter().map(|v| v[i].clone()).collect())
                .collect(),
        );
        let decomposition = hermite_decomposition(&projected);
        let rank = decomposition.rank();
        let u = &decomposition.transform;
        let lifted = (0..rank)
            .map(|j| {
                let mut v = vec![BigInt::zero(); s.dimension()];
                for (i, basis) in s.kernel_basis.iter().enumerate() {
                    let coefficient = &u[(i, j)];
                    if coefficient.is_zero() {
                        continue;
                    }
                    for (acc, b) in v.iter_mut().zip(basis) {
                        *acc += coefficient * b;
                    }
                }
                v
            })
            .collect();
        EchelonCoset {
            offset: costed.iter().map(|&i| s.particular[i].clone()).collect(),
            columns: (0..rank).map(|j| decomposition.hnf.column(j)).collect(),
            pivots: decomposition.pivot_rows,
            lifted,
            particular: s.particular.clone(),
        }
    }

    fn rank(&self) -> usize {
        self.columns.len()
    }

    /// Rows whose value is fixed once level `i` has been chosen.
    fn block(&self, level: usize) -> std::ops::Range<usize> {
        let end = self
            .pivots
            .get(level + 1)
            .copied()
            .unwrap_or(self.offset.len());
        self.pivots[level]..end
    }

    fn lift(&self, t: &[BigInt]) -> Vec<BigInt> {
        let mut x = self.particular.clone();
        for (ti, v) in t.iter().zip(&self.lifted) {
            if ti.is_zero() {
                continue;
            }
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += ti * vi;
            }
        }
        x
    }
}

fn add_scaled(y: &mut [BigInt], t: &BigInt, h: &[BigInt]) {
    if t.is_zero() {
        return;
    }
    for (yi, hi) in y.iter_mut().zip(h) {
        if !hi.is_zero() {
            *yi += t * hi;
        }
    }
}

fn l1(values: &[BigInt]) -> BigInt {
    values.iter().map(|v| v.abs()).sum()
}

/// `sum_{r in rows} |y_r + t h_r|`.
fn shifted_l1(y: &[BigInt], h: &[BigInt], t: &BigInt, rows: std::ops::Range<usize>) -> BigInt {
    rows.map(|r| (&y[r] + t * &h[r]).abs()).sum()
}

/// Integer minimiser of the convex function `t -> shifted_l1(y, h, t, rows)`
/// (smallest one on ties). The real minimum sits at a breakpoint
/// `-y_r / h_r`, so the integer one is a floor or ceiling of a breakpoint.
fn l1_line_minimizer(y: &[BigInt], h: &[BigInt], rows: std::ops::Range<usize>) -> BigInt {
    let mut best: Option<(BigInt, BigInt)> = None;
    for r in rows.clone() {
        if h[r].is_zero() {
            continue;
        }
        let numerator = -&y[r];
        for t in [numerator.div_floor(&h[r]), numerator.div_ceil(&h[r])] {
            let cost = shifted_l1(y, h, &t, rows.clone());
            let better = match &best {
                None => true,
                Some((bc, bt)) => cost < *bc || (cost == *bc && t < *bt),
            };
            if better {
                best = Some((cost, t));
            }
        }
    }
    best.map(|(_, t)| t).unwrap_or_default()
}

struct L1Search<'a> {
    coset: &'a EchelonCoset,
    budget: u64,
    nodes: u64,
    best_cost: BigInt,
    best_y: Vec<BigInt>,
    best_t: Vec<BigInt>,
    t: Vec<BigInt>,
}

impl L1Search<'_> {
    fn consider_leaf(&mut self, y: &[BigInt], cost: BigInt) {
        if cost < self.best_cost || (cost == self.best_cost && y < self.best_y.as_slice()) {
            self.best_cost = cost;
            self.best_y = y.to_vec();
            self.best_t = self.t.clone();
        }
    }

    fn descend(&mut self, level: usize, y: &mut Vec<BigInt>, fixed: &BigInt) -> Result<(), ()> {
        if level == self.coset.rank() {
            self.consider_leaf(y, fixed.clone());
            return Ok(());
        }
        let coset = self.coset;
        let h = &coset.columns[level];
        let rows = coset.block(level);
        let center = l1_line_minimizer(y, h, rows.clone());
        let cost_at = |t: &BigInt, y: &[BigInt]| fixed + shifted_l1(y, h, t, rows.clone());

        let mut up = center.clone();
        let mut down = &center - 1;
        let mut up_cost = Some(cost_at(&up, y));
        let mut down_cost = Some(cost_at(&down, y));
        loop {
            // Each side is non-decreasing away from the minimiser, so a side
            // is finished once it exceeds the incumbent.
            for side in [&mut up_cost, &mut down_cost] {
                if matches!(side, Some(c) if *c > self.best_cost) {
                    *side = None;
                }
            }
            let take_down = match (&up_cost, &down_cost) {
                (None, None) => return Ok(()),
                (Some(_), None) => false,
                (None, Some(_)) => true,
                (Some(u), Some(d)) => d < u,
            };
            let (t, cost) = if take_down {
                let t = down.clone();
                down -= 1;
                let cost = down_cost.replace(cost_at(&down, y)).unwrap();
                (t, cost)
            } else {
                let t = up.clone();
                up += 1;
                let cost = up_cost.replace(cost_at(&up, y)).unwrap();
                (t, cost)
            };

            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(());
            }
            add_scaled(y, &t, h);
            self.t[level] = t.clone();
            let result = self.descend(level + 1, y, &cost);
            add_scaled(y, &-&t, h);
            self.t[level] = BigInt::zero();
            result?;
        }
    }
}

/// Coordinate descent with exact line minimisation along each basis
/// vector. Only used to seed the search with a good incumbent.
fn descent_incumbent(coset: &EchelonCoset) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut y = coset.offset.clone();
    let mut t = vec![BigInt::zero(); coset.rank()];
    let all = 0..y.len();
    loop {
        let mut improved = false;
        for (i, h) in coset.columns.iter().enumerate() {
            let step = l1_line_minimizer(&y, h, all.clone());
            if step.is_zero() {
                continue;
            }
            if shifted_l1(&y, h, &step, all.clone()) < l1(&y) {
                add_scaled(&mut y, &step, h);
                t[i] += step;
                improved = true;
            }
        }
        if !improved {
            return (y, t);
        }
    }
}

/// Minimises `sum_{i : costed[i]} |x_i|` over the coset `s`.
///
/// Every coset point whose objective is at most the returned one has been
/// examined, so the result is optimal. Among optimal points the one whose
/// costed coordinates are lexicographically smallest is returned. When the
/// node budget runs out, the best incumbent comes back inside
/// [`LinalgError::BudgetExceeded`].
pub fn min_l1_in_coset(
    s: &SolutionSet,
    costed: &[bool],
    budget: u64,
) -> Result<CosetMinimum, LinalgError> {
    assert_eq!(costed.len(), s.dimension(), "mask length mismatch");
    let indices: Vec<usize> = (0..costed.len()).filter(|&i| costed[i]).collect();
    let coset = EchelonCoset::new(s, &indices);

    let (best_y, best_t) = descent_incumbent(&coset);
    let mut search = L1Search {
        coset: &coset,
        budget,
        nodes: 0,
        best_cost: l1(&best_y),
        best_y,
        best_t,
        t: vec![BigInt::zero(); coset.rank()],
    };

    let first_pivot = coset.pivots.first().copied().unwrap_or(coset.offset.len());
    let fixed = l1(&coset.offset[..first_pivot]);
    let mut y = coset.offset.clone();
    let outcome = search.descend(0, &mut y, &fixed);

    let result = CosetMinimum {
        point: coset.lift(&search.best_t),
        objective: search.best_cost,
        nodes: search.nodes,
    };
    match outcome {
        Ok(()) => Ok(result),
        Err(()) => Err(LinalgError::BudgetExceeded {
            nodes: budget,
            incumbent: Some(Box::new(result)),
        }),
    }
}

struct LinfSearch<'a> {
    coset: &'a EchelonCoset,
    bound: &'a BigInt,
    budget: u64,
    nodes: u64,
    t: Vec<BigInt>,
}

impl LinfSearch<'_> {
    /// Integer interval of `t` keeping every block row within the bound,
    /// or `None` if a row not moved by `t` already violates it.
    fn interval(&self, level: usize, y: &[BigInt]) -> Option<(BigInt, BigInt)> {
        let h = &self.coset.columns[level];
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for r in self.coset.block(level) {
            if h[r].is_zero() {
                if y[r].abs() > *self.bound {
                    return None;
                }
                continue;
            }
            let (a, b) = (-self.bound - &y[r], self.bound - &y[r]);
            let (low, high) = if h[r].is_positive() {
                (a.div_ceil(&h[r]), b.div_floor(&h[r]))
            } else {
                (b.div_ceil(&h[r]), a.div_floor(&h[r]))
            };
            lo = Some(lo.map_or(low.clone(), |v| v.max(low)));
            hi = Some(hi.map_or(high.clone(), |v| v.min(high)));
        }
        Some((lo?, hi?))
    }

    fn descend(&mut self, level: usize, y: &mut Vec<BigInt>) -> Result<bool, ()> {
        if level == self.coset.rank() {
            return Ok(true);
        }
        let Some((lo, hi)) = self.interval(level, y) else {
            return Ok(false);
        };
        if lo > hi {
            return Ok(false);
        }
        let h = self.coset.columns[level].clone();
        let pivot = self.coset.pivots[level];
        let start = (-&y[pivot]).div_floor(&h[pivot]).clamp(lo.clone(), hi.clone());
        let mut up = start.clone();
        let mut down = &start - 1;
        while up <= hi || down >= lo {
            let t = if up <= hi && (down < lo || &up - &start <= &start - &down) {
                up += 1;
                &up - 1
            } else {
                down -= 1;
                &down + 1
            };
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(());
            }
            add_scaled(y, &t, &h);
            self.t[level] = t.clone();
            let found = self.descend(level + 1, y)?;
            if found {
                return Ok(true);
            }
            add_scaled(y, &-&t, &h);
        }
        Ok(false)
    }
}

/// Searches the coset for a point with every coordinate in `[-bound, bound]`.
pub fn find_point_within(
    s: &SolutionSet,
    bound: &BigInt,
    budget: u64,
) -> Result<Option<Vec<BigInt>>, LinalgError> {
    let all: Vec<usize> = (0..s.dimension()).collect();
    let coset = EchelonCoset::new(s, &all);
    let first_pivot = coset.pivots.first().copied().unwrap_or(coset.offset.len());
    if coset.offset[..first_pivot].iter().any(|v| v.abs() > *bound) {
        return Ok(None);
    }
    let mut search = LinfSearch {
        coset: &coset,
        bound,
        budget,
        nodes: 0,
        t: vec![BigInt::zero(); coset.rank()],
    };
    let mut y = coset.offset.clone();
    match search.descend(0, &mut y) {
        Ok(true) => Ok(Some(coset.lift(&search.t))),
        Ok(false) => Ok(None),
        Err(()) => Err(LinalgError::BudgetExceeded {
            nodes: budget,
            incumbent: None,
        }),
    }
}

/// Whether `M x = b` has an integer solution whose entries are bounded in
/// absolute value by the largest maximal minor of `[M : b]`.
pub fn bfrt_check(m: &IntegerMatrix, b: &[BigInt], budget: u64) -> Result<bool, LinalgError> {
    let bound = super::max_minor_bound(m, b)?;
    let solutions = super::solve_integer_system(m, b).ok_or(LinalgError::NoSolution)?;
    Ok(find_point_within(&solutions, &bound, budget)?.is_some())
}
