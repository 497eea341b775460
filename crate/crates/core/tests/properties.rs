use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use nilconj::conjugacy::{build_conjugacy_system, change_of_variables};
use nilconj::gm_lab::{make_gm, random_conjugate_pair};
use nilconj::intlinalg::{
    bfrt_check, hermite_decomposition, max_minor_bound, min_l1_in_coset, row_rank_reduce,
    solve_integer_system, RowReduction,
};
use nilconj::oracles;
use nilconj::presentation::{validate_presentation, RawPresentation};
use nilconj::words::{collect, nf_invert, nf_multiply, nf_to_word, Generator, Letter, NormalForm, Word};
use nilconj::{decide_conjugacy, CentralExtensionPresentation, Conjugacy};

fn letters(p: &CentralExtensionPresentation, max_len: usize) -> impl Strategy<Value = Word> {
    let alphabet = p.k() + p.r();
    let k = p.k();
    prop::collection::vec((0..alphabet, any::<bool>()), 0..=max_len).prop_map(move |raw| {
        raw.into_iter()
            .map(|(index, inverse)| Letter {
                generator: if index < k {
                    Generator::NonCentral(index)
                } else {
                    Generator::Central(index - k)
                },
                inverse,
            })
            .collect()
    })
}

/// Heisenberg group with a torsion centre of order 4.
fn torsion_heisenberg() -> CentralExtensionPresentation {
    validate_presentation(&RawPresentation::new(2, 0, 1).with_orders([4]).gamma(1, 2, 1, 1)).unwrap()
}

fn groups() -> Vec<CentralExtensionPresentation> {
    vec![make_gm(1).unwrap(), make_gm(2).unwrap(), make_gm(3).unwrap(), torsion_heisenberg()]
}

fn small_matrix(rows: usize, cols: usize, max_abs: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-max_abs..=max_abs, cols), rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn collection_agrees_with_letter_swapping(g in 0usize..4, seed in any::<u64>()) {
        let p = &groups()[g];
        let (w, _, _) = random_conjugate_pair(p, seed, 14);
        let nf = collect(p, &w);
        let (x, central) = oracles::collect_by_swaps(p, &w);
        prop_assert_eq!(nf.x.clone(), oracles::to_big(&x));
        prop_assert_eq!(nf.central_vec(), oracles::to_big(&central));
    }

    #[test]
    fn collection_is_a_homomorphism(
        (w1, w2) in (letters(&make_gm(2).unwrap(), 10), letters(&make_gm(2).unwrap(), 10)),
    ) {
        let p = make_gm(2).unwrap();
        prop_assert_eq!(
            collect(&p, &w1.concat(&w2)),
            nf_multiply(&p, &collect(&p, &w1), &collect(&p, &w2))
        );
    }

    #[test]
    fn normal_form_word_round_trips(g in 0usize..4, seed in any::<u64>()) {
        let p = &groups()[g];
        let (w, _, _) = random_conjugate_pair(p, seed, 12);
        let nf = collect(p, &w);
        prop_assert_eq!(collect(p, &nf_to_word(p, &nf)), nf);
    }

    #[test]
    fn inverse_and_associativity(seed in any::<u64>()) {
        let p = make_gm(3).unwrap();
        let (a, b, c) = random_conjugate_pair(&p, seed, 10);
        let (a, b, c) = (collect(&p, &a), collect(&p, &b), collect(&p, &c));
        prop_assert_eq!(nf_multiply(&p, &a, &nf_invert(&p, &a)), NormalForm::identity(&p));
        prop_assert_eq!(nf_multiply(&p, &nf_invert(&p, &a), &a), NormalForm::identity(&p));
        prop_assert_eq!(
            nf_multiply(&p, &nf_multiply(&p, &a, &b), &c),
            nf_multiply(&p, &a, &nf_multiply(&p, &b, &c))
        );
    }

    #[test]
    fn hnf_shape_and_identities(m in small_matrix(3, 5, 9)) {
        let matrix = oracles::to_matrix(&m, 5);
        let d = hermite_decomposition(&matrix);
        prop_assert_eq!(&matrix * &d.transform, d.hnf.clone());
        prop_assert!(d.transform.determinant().abs().is_one());
        prop_assert_eq!(d.rank(), matrix.rank());
        let mut last_row = None;
        for (c, &row) in d.pivot_rows.iter().enumerate() {
            prop_assert!(last_row.is_none_or(|last| row > last));
            last_row = Some(row);
            let pivot = &d.hnf[(row, c)];
            prop_assert!(pivot.is_positive());
            for left in 0..c {
                let entry = &d.hnf[(row, left)];
                prop_assert!(!entry.is_negative() && entry < pivot);
            }
            for above in 0..row {
                prop_assert!(d.hnf[(above, c)].is_zero());
            }
        }
        for c in d.rank()..5 {
            prop_assert!(d.hnf.column(c).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn bareiss_determinant_matches_cofactors(m in small_matrix(4, 4, 9)) {
        prop_assert_eq!(
            oracles::to_matrix(&m, 4).determinant(),
            BigInt::from(oracles::determinant_by_cofactors(&m))
        );
    }

    #[test]
    fn solutions_match_box_enumeration(
        m in small_matrix(2, 3, 3),
        b in prop::collection::vec(-4i64..=4, 2),
    ) {
        let matrix = oracles::to_matrix(&m, 3);
        let in_box = oracles::solutions_in_box(&m, &b, 3, 4);
        match solve_integer_system(&matrix, &oracles::to_big(&b)) {
            None => prop_assert!(in_box.is_empty()),
            Some(s) => {
                prop_assert_eq!(matrix.mul_vec(&s.particular), oracles::to_big(&b));
                for k in &s.kernel_basis {
                    prop_assert!(matrix.mul_vec(k).iter().all(Zero::is_zero));
                }
                prop_assert_eq!(s.kernel_basis.len(), 3 - matrix.rank());
                prop_assert!(in_box.iter().all(|x| matrix.mul_vec(&oracles::to_big(x)) == oracles::to_big(&b)));
            }
        }
    }

    #[test]
    fn row_reduction_preserves_solutions(
        base in small_matrix(2, 3, 4),
        c in prop::collection::vec(-2i64..=2, 2),
        x in prop::collection::vec(-2i64..=2, 3),
        inconsistent in any::<bool>(),
    ) {
        let mut rows = base.clone();
        rows.push((0..3).map(|j| c[0] * base[0][j] + c[1] * base[1][j]).collect());
        let mut b = oracles::matrix_times(&rows, &x);
        if inconsistent {
            b[2] += 1;
        }
        let before = oracles::solutions_in_box(&rows, &b, 3, 5);
        match row_rank_reduce(&oracles::to_matrix(&rows, 3), &oracles::to_big(&b)) {
            RowReduction::Inconsistent => prop_assert!(before.is_empty()),
            RowReduction::Reduced { matrix, kept_rows, .. } => {
                prop_assert_eq!(matrix.rank(), matrix.rows());
                let kept: Vec<Vec<i64>> = kept_rows.iter().map(|&i| rows[i].clone()).collect();
                let kept_b: Vec<i64> = kept_rows.iter().map(|&i| b[i]).collect();
                prop_assert_eq!(oracles::solutions_in_box(&kept, &kept_b, 3, 5), before);
            }
        }
    }

    #[test]
    fn l1_minimum_matches_box(
        m in small_matrix(1, 3, 4),
        x in prop::collection::vec(-4i64..=4, 3),
    ) {
        let b = oracles::matrix_times(&m, &x);
        let known: i64 = x.iter().map(|v| v.abs()).sum();
        let s = solve_integer_system(&oracles::to_matrix(&m, 3), &oracles::to_big(&b)).unwrap();
        let found = min_l1_in_coset(&s, &[true; 3], 1_000_000).unwrap();
        let (best, point) = oracles::min_l1_in_box(&m, &b, 3, known).unwrap();
        prop_assert_eq!(found.objective, BigInt::from(best));
        prop_assert_eq!(found.point, oracles::to_big(&point));
    }

    #[test]
    fn partially_costed_minimum_matches_box(
        m in small_matrix(1, 2, 4),
        order in 2i64..=5,
        x in prop::collection::vec(-4i64..=4, 2),
        slack in -3i64..=3,
    ) {
        // One free slack column, as in a torsion row.
        let rows = vec![vec![m[0][0], m[0][1], order]];
        let b = oracles::matrix_times(&rows, &[x[0], x[1], slack]);
        let s = solve_integer_system(&oracles::to_matrix(&rows, 3), &oracles::to_big(&b)).unwrap();
        let found = min_l1_in_coset(&s, &[true, true, false], 1_000_000).unwrap();
        let known = x[0].abs() + x[1].abs();
        let mut best = known;
        oracles::for_each_in_box(2, known, |y| {
            if (b[0] - rows[0][0] * y[0] - rows[0][1] * y[1]) % order == 0 {
                best = best.min(y[0].abs() + y[1].abs());
            }
        });
        prop_assert_eq!(found.objective, BigInt::from(best));
    }

    #[test]
    fn bfrt_bound_holds(
        rows in 1usize..=3,
        extra in 0usize..=2,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let cols = rows + extra;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = oracles::random_matrix(&mut rng, rows, cols, 5);
        let matrix = oracles::to_matrix(&m, cols);
        prop_assume!(matrix.rank() == rows);
        let x: Vec<i64> = (0..cols).map(|_| rng.gen_range(-5..=5)).collect();
        let b = oracles::to_big(&oracles::matrix_times(&m, &x));
        prop_assert!(max_minor_bound(&matrix, &b).unwrap().is_positive());
        prop_assert!(bfrt_check(&matrix, &b, 10_000_000).unwrap());
    }

    #[test]
    fn conjugacy_is_exact_on_small_pairs(g in 0usize..4, seed in any::<u64>()) {
        let p = &groups()[g];
        let (u, v, w) = random_conjugate_pair(p, seed, 3);
        let Conjugacy::Conjugate(c) = decide_conjugacy(p, &u, &v, 1_000_000).unwrap() else {
            return Err(TestCaseError::fail("conjugate pair rejected"));
        };
        prop_assert!(c.length <= w.len());
        // An exhaustive search over a-exponent vectors of l1 norm below the
        // certificate finds nothing.
        let bound = c.length.clone();
        let radius = i64::try_from(&bound).unwrap();
        let (u_nf, v_nf) = (collect(p, &u), collect(p, &v));
        let mut shorter = false;
        oracles::for_each_in_box(p.k(), radius, |x| {
            let norm: i64 = x.iter().map(|e| e.abs()).sum();
            if BigInt::from(norm) < bound {
                let w = NormalForm::from_noncentral(p, oracles::to_big(x));
                shorter |= nilconj::nf_conjugate(p, &u_nf, &w) == v_nf;
            }
        });
        prop_assert!(!shorter);
    }

    #[test]
    fn non_conjugate_pairs_have_no_small_conjugator(g in 0usize..4, seed in any::<u64>(), s in 0usize..3) {
        let p = &groups()[g];
        let (u, _, _) = random_conjugate_pair(p, seed, 4);
        let s = s % p.r();
        let v = u.concat(&Word::power(Generator::Central(s), 1));
        let (u_nf, v_nf) = (collect(p, &u), collect(p, &v));
        let mut found = false;
        oracles::for_each_in_box(p.k(), 3, |x| {
            let w = NormalForm::from_noncentral(p, oracles::to_big(x));
            found |= nilconj::nf_conjugate(p, &u_nf, &w) == v_nf;
        });
        if let Conjugacy::NotConjugate = decide_conjugacy(p, &u, &v, 1_000_000).unwrap() {
            prop_assert!(!found);
        }
    }

    #[test]
    fn change_of_variables_is_unimodular_and_reduces(seed in any::<u64>()) {
        let p = torsion_heisenberg();
        let (u, v, _) = random_conjugate_pair(&p, seed, 8);
        let Ok(system) = build_conjugacy_system(&p, &collect(&p, &u), &collect(&p, &v)) else {
            return Ok(());
        };
        let (reduced, transform) = change_of_variables(&system);
        prop_assert!(transform.determinant().abs().is_one());
        prop_assert_eq!(&system.matrix * &transform, reduced.matrix.clone());
        let order = &system.matrix[(0, 2)];
        for t in 0..2 {
            let entry = &reduced.matrix[(0, t)];
            prop_assert!(!entry.is_negative() && entry < order);
        }
    }
}
