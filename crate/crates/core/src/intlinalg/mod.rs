//! Exact integer linear algebra: Hermite normal form, integer solving,
//! row-rank reduction, maximal minors and searches over solution cosets.

mod coset;
mod hnf;
mod matrix;
mod system;

pub use coset::{bfrt_check, find_point_within, min_l1_in_coset, CosetMinimum};
pub use hnf::{hermite_decomposition, hermite_normal_form, HermiteDecomposition};
pub use matrix::IntegerMatrix;
pub use system::{max_minor_bound, row_rank_reduce, solve_integer_system, RowReduction, SolutionSet};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix has {rows} rows but rank {rank}; reduce the system first")]
    RankDeficient { rows: usize, rank: usize },
    #[error("system has no integer solution")]
    NoSolution,
    #[error("search budget of {nodes} nodes exceeded")]
    BudgetExceeded {
        nodes: u64,
        /// Best point found before the budget ran out, when the search
        /// keeps one.
        incumbent: Option<Box<CosetMinimum>>,
    },
}
