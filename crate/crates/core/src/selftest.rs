//! Reduced-scale invariant suites, runnable from the command line.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conjugacy::{conjugator_length, decide_conjugacy, Conjugacy};
use crate::gm_lab::{
    brute_force_cl, defining_relators, make_gm, predicted_length, random_conjugate_pair,
    random_noncentral_word, witness_pair, OracleMode,
};
use crate::intlinalg::{
    bfrt_check, hermite_normal_form, min_l1_in_coset, row_rank_reduce, solve_integer_system,
    RowReduction,
};
use crate::oracles;
use crate::presentation::{commutator_bound, validate_presentation, GammaEntry, PresentationError};
use crate::words::{collect, nf_multiply, parse_word, Word};

/// Faults that can be planted to confirm a check actually fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Injection {
    /// Adds a `gamma(j, i, s)` entry that breaks antisymmetry.
    CorruptGamma,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }

    pub fn failed_names(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.failure.is_some())
            .map(|c| c.name)
            .collect()
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            match &check.failure {
                None => writeln!(f, "PASS {}", check.name)?,
                Some(why) => writeln!(f, "FAIL {}: {}", check.name, why)?,
            }
        }
        let failed = self.failed_names().len();
        writeln!(
            f,
            "{} passed, {} failed",
            self.checks.len() - failed,
            failed
        )
    }
}

type Check = Result<(), String>;
type Suite = (&'static str, Box<dyn Fn() -> Check>);

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Check {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

pub fn run_selftest(seed: u64, injection: Option<Injection>) -> SelftestReport {
    let suites: Vec<Suite> = vec![
        ("presentation.antisymmetry", Box::new(move || antisymmetry(injection))),
        ("presentation.idempotent", Box::new(idempotent)),
        ("presentation.relators", Box::new(relators)),
        ("words.homomorphism", Box::new(move || homomorphism(seed))),
        ("words.swap_oracle", Box::new(move || swap_oracle(seed))),
        ("words.inverse", Box::new(move || inverse(seed))),
        ("words.exponent_bound", Box::new(move || exponent_bound(seed))),
        ("intlinalg.hnf", Box::new(move || hnf(seed))),
        ("intlinalg.row_rank", Box::new(move || row_rank(seed))),
        ("intlinalg.l1_optimality", Box::new(move || l1_optimality(seed))),
        ("intlinalg.bfrt", Box::new(move || bfrt(seed))),
        ("conjugacy.completeness", Box::new(move || completeness(seed))),
        ("conjugacy.non_conjugate", Box::new(move || non_conjugate(seed))),
        ("gm.witness", Box::new(witness)),
        ("gm.oracle", Box::new(move || oracle(seed))),
    ];
    SelftestReport {
        checks: suites
            .into_iter()
            .map(|(name, suite)| CheckResult {
                name,
                failure: suite().err(),
            })
            .collect(),
    }
}

fn antisymmetry(injection: Option<Injection>) -> Check {
    for m in 1..=3 {
        let mut raw = make_gm(m).map_err(|e| e.to_string())?.to_raw();
        if injection == Some(Injection::CorruptGamma) {
            if let Some(first) = raw.gamma.first().cloned() {
                raw.gamma.push(GammaEntry {
                    i: first.j,
                    j: first.i,
                    ..first
                });
            }
        }
        match validate_presentation(&raw) {
            Ok(_) => {}
            Err(e @ PresentationError::Antisymmetry { .. }) => {
                return Err(format!("G_{m}: {e}"));
            }
            Err(e) => return Err(format!("G_{m}: unexpected error {e}")),
        }
    }
    Ok(())
}

fn idempotent() -> Check {
    for m in 1..=4 {
        let p = make_gm(m).map_err(|e| e.to_string())?;
        let again = validate_presentation(&p.to_raw()).map_err(|e| e.to_string())?;
        ensure(again == p, || format!("G_{m} changed on revalidation"))?;
    }
    Ok(())
}

fn relators() -> Check {
    for m in 1..=4 {
        let p = make_gm(m).map_err(|e| e.to_string())?;
        for r in defining_relators(&p) {
            ensure(collect(&p, &r).is_identity(), || {
                format!("G_{m}: relator {} is not trivial", r.display(&p))
            })?;
        }
    }
    Ok(())
}

fn homomorphism(seed: u64) -> Check {
    let p = make_gm(2).map_err(|e| e.to_string())?;
    for i in 0..200 {
        let (w1, _, w2) = random_conjugate_pair(&p, seed.wrapping_add(i), 6);
        let joined = collect(&p, &w1.concat(&w2));
        let product = nf_multiply(&p, &collect(&p, &w1), &collect(&p, &w2));
        ensure(joined == product, || {
            format!("collect({} {}) differs", w1.display(&p), w2.display(&p))
        })?;
    }
    Ok(())
}

fn swap_oracle(seed: u64) -> Check {
    let p = make_gm(3).map_err(|e| e.to_string())?;
    for i in 0..100 {
        let (w, _, _) = random_conjugate_pair(&p, seed.wrapping_add(1000 + i), 12);
        let nf = collect(&p, &w);
        let (x, central) = oracles::collect_by_swaps(&p, &w);
        ensure(
            nf.x == oracles::to_big(&x) && nf.central_vec() == oracles::to_big(&central),
            || format!("collect({}) disagrees with letter swapping", w.display(&p)),
        )?;
    }
    Ok(())
}

fn inverse(seed: u64) -> Check {
    let p = make_gm(3).map_err(|e| e.to_string())?;
    for i in 0..100 {
        let (w, _, _) = random_conjugate_pair(&p, seed.wrapping_add(2000 + i), 10);
        ensure(collect(&p, &w.concat(&w.inverse())).is_identity(), || {
            format!("w w^-1 != 1 for {}", w.display(&p))
        })?;
    }
    Ok(())
}

fn exponent_bound(seed: u64) -> Check {
    let p = make_gm(3).map_err(|e| e.to_string())?;
    let l = commutator_bound(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..200 {
        let n = rng.gen_range(0..=30usize);
        let w = random_noncentral_word(&p, seed.wrapping_add(3000 + i), n);
        let limit = &l * BigInt::from(n * n);
        let nf = collect(&p, &w);
        ensure(nf.z.iter().all(|z| z.abs() <= limit), || {
            format!("|z| exceeds L n^2 for {}", w.display(&p))
        })?;
    }
    Ok(())
}

fn hnf(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let m = oracles::random_matrix(&mut rng, 3, 5, 9);
        let matrix = oracles::to_matrix(&m, 5);
        let (h, u) = hermite_normal_form(&matrix);
        ensure(&matrix * &u == h, || format!("M U != H for {matrix:?}"))?;
        ensure(u.determinant().abs().is_one(), || format!("U not unimodular for {matrix:?}"))?;
    }
    Ok(())
}

fn row_rank(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..20 {
        let base = oracles::random_matrix(&mut rng, 2, 3, 4);
        let x: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
        let mut rows = base.clone();
        let combined: Vec<i64> = (0..3).map(|j| 2 * base[0][j] - base[1][j]).collect();
        rows.push(combined);
        let b = oracles::matrix_times(&rows, &x);
        let before = oracles::solutions_in_box(&rows, &b, 3, 6);
        match row_rank_reduce(&oracles::to_matrix(&rows, 3), &oracles::to_big(&b)) {
            RowReduction::Inconsistent => return Err("consistent system flagged".into()),
            RowReduction::Reduced { kept_rows, .. } => {
                let kept: Vec<Vec<i64>> = kept_rows.iter().map(|&i| rows[i].clone()).collect();
                let kept_b: Vec<i64> = kept_rows.iter().map(|&i| b[i]).collect();
                let after = oracles::solutions_in_box(&kept, &kept_b, 3, 6);
                ensure(before == after, || format!("solution set changed for {rows:?}"))?;
            }
        }
    }
    Ok(())
}

fn l1_optimality(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11);
    for _ in 0..30 {
        let m = oracles::random_matrix(&mut rng, 1, 3, 4);
        let x: Vec<i64> = (0..3).map(|_| rng.gen_range(-4..=4)).collect();
        let b = oracles::matrix_times(&m, &x);
        let known: i64 = x.iter().map(|v| v.abs()).sum();
        let Some(s) = solve_integer_system(&oracles::to_matrix(&m, 3), &oracles::to_big(&b)) else {
            return Err("solvable system reported unsolvable".into());
        };
        let found = min_l1_in_coset(&s, &[true; 3], 1_000_000).map_err(|e| e.to_string())?;
        let (best, point) = oracles::min_l1_in_box(&m, &b, 3, known).expect("x is in the box");
        ensure(found.objective == BigInt::from(best), || {
            format!("objective {} vs box optimum {best} for {m:?} b={b:?}", found.objective)
        })?;
        ensure(found.point == oracles::to_big(&point), || {
            format!("tie-break differs for {m:?} b={b:?}")
        })?;
    }
    Ok(())
}

fn bfrt(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbf);
    let mut tested = 0;
    while tested < 50 {
        let rows = rng.gen_range(1..=3);
        let cols = rng.gen_range(rows..=5);
        let m = oracles::random_matrix(&mut rng, rows, cols, 5);
        let matrix = oracles::to_matrix(&m, cols);
        if matrix.rank() < rows {
            continue;
        }
        let x: Vec<i64> = (0..cols).map(|_| rng.gen_range(-5..=5)).collect();
        let b = oracles::to_big(&oracles::matrix_times(&m, &x));
        ensure(bfrt_check(&matrix, &b, 10_000_000).map_err(|e| e.to_string())?, || {
            format!("no small solution for {matrix:?} b={b:?}")
        })?;
        tested += 1;
    }
    Ok(())
}

fn completeness(seed: u64) -> Check {
    for m in 1..=3 {
        let p = make_gm(m).map_err(|e| e.to_string())?;
        for i in 0..60 {
            let (u, v, w) = random_conjugate_pair(&p, seed.wrapping_add(4000 + i), 8);
            match decide_conjugacy(&p, &u, &v, 1_000_000).map_err(|e| e.to_string())? {
                Conjugacy::Conjugate(c) => {
                    ensure(c.verified && c.length <= w.len(), || {
                        format!("certificate longer than witness for {}", u.display(&p))
                    })?;
                }
                Conjugacy::NotConjugate => {
                    return Err(format!("G_{m}: missed conjugate pair {}", u.display(&p)));
                }
            }
        }
    }
    Ok(())
}

fn non_conjugate(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0);
    for m in 1..=3 {
        let p = make_gm(m).map_err(|e| e.to_string())?;
        let a1 = parse_word(&p, "a1").map_err(|e| e.to_string())?;
        for i in 0..20 {
            // Central elements are only conjugate to themselves.
            let s = rng.gen_range(0..p.r());
            let e: i64 = rng.gen_range(-5..=5);
            let z = Word::power(crate::words::Generator::Central(s), BigInt::from(e));
            let shifted = z.concat(&Word::power(crate::words::Generator::Central(s), BigInt::one()));
            let outcome = decide_conjugacy(&p, &z, &shifted, 1_000).map_err(|e| e.to_string())?;
            ensure(outcome == Conjugacy::NotConjugate, || {
                format!("G_{m}: {} reported conjugate to a shift", z.display(&p))
            })?;
            // Different abelian images.
            let (u, _, _) = random_conjugate_pair(&p, seed.wrapping_add(5000 + i), 6);
            let outcome = decide_conjugacy(&p, &u, &u.concat(&a1), 1_000).map_err(|e| e.to_string())?;
            ensure(outcome == Conjugacy::NotConjugate, || {
                format!("G_{m}: {} reported conjugate to u a1", u.display(&p))
            })?;
        }
    }
    Ok(())
}

fn witness() -> Check {
    for m in 1..=3 {
        let p = make_gm(m).map_err(|e| e.to_string())?;
        for n in 2..=6u64 {
            let (u, v) = witness_pair(m, n).map_err(|e| e.to_string())?;
            let cl = conjugator_length(&p, &u, &v, 1_000_000).map_err(|e| e.to_string())?;
            ensure(cl == predicted_length(m, n), || {
                format!("G_{m}, n={n}: got {cl}, expected {}", predicted_length(m, n))
            })?;
        }
    }
    Ok(())
}

fn oracle(seed: u64) -> Check {
    let p = make_gm(1).map_err(|e| e.to_string())?;
    let (u, v) = witness_pair(1, 2).map_err(|e| e.to_string())?;
    let found = brute_force_cl(&p, &u, &v, 5, OracleMode::Full, 2_000_000).map_err(|e| e.to_string())?;
    ensure(found == Some(4), || format!("oracle returned {found:?}"))?;
    for i in 0..10 {
        let (u, v, _) = random_conjugate_pair(&p, seed.wrapping_add(6000 + i), 3);
        let cl = conjugator_length(&p, &u, &v, 1_000_000).map_err(|e| e.to_string())?;
        let brute = brute_force_cl(&p, &u, &v, 6, OracleMode::Full, 2_000_000).map_err(|e| e.to_string())?;
        ensure(brute.map(BigInt::from) == Some(cl.clone()), || {
            format!("oracle {brute:?} vs conjugator_length {cl}")
        })?;
    }
    Ok(())
}
