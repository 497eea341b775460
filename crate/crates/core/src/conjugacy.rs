//! Conjugacy via linear Diophantine systems.
//!
//! For `u = a^alpha c^p` and `v = a^alpha c^q` (conjugate elements share
//! their image in `A`), the element `w = a_1^{x_1} ... a_k^{x_k}` satisfies
//! `u w = w v` exactly when, for every central coordinate `s`,
//!
//! ```text
//! sum_j ( sum_t alpha_t gamma_{t j s} ) x_j  =  q_s - p_s      (mod o_s for torsion s)
//! ```
//!
//! Torsion congruences become integer equations through one slack column
//! per torsion generator. Central letters never help a conjugator, and each
//! letter moves the image in `A = Z^k` by one unit, so the shortest
//! conjugator has length `min |x|_1` over the solutions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::intlinalg::{
    max_minor_bound, min_l1_in_coset, row_rank_reduce, solve_integer_system, IntegerMatrix,
    LinalgError, RowReduction,
};
use crate::presentation::{commutator_bound, minimal_residue, CentralExtensionPresentation};
use crate::words::{collect, nf_conjugate, Generator, NormalForm, Word};

/// Default node budget for the l1 search.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConjugacyError {
    #[error("elements differ in the abelianisation; no conjugacy system exists")]
    DifferentAbelianImage,
    #[error("the words are not conjugate")]
    NotConjugate,
    #[error("search budget exceeded; best conjugator found has length {}", .incumbent.length)]
    BudgetExceeded { incumbent: Box<ConjugacyCertificate> },
    #[error("linear algebra produced a conjugator that fails verification")]
    VerificationFailed,
}

/// The system `M x = b` with `d = k + l` unknowns: the exponents of
/// `a_1..a_k` followed by one slack variable per torsion generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineSystem {
    pub matrix: IntegerMatrix,
    pub rhs: Vec<BigInt>,
    pub k: usize,
    pub l: usize,
    /// `|u| + |v|` of the words the system was built from.
    pub input_size: BigInt,
}

impl DiophantineSystem {
    /// Whether `|M_ij| <= k L n` holds for every non-slack column.
    pub fn entry_bound_holds(&self, p: &CentralExtensionPresentation) -> bool {
        let limit = BigInt::from(self.k) * commutator_bound(p) * &self.input_size;
        (0..self.matrix.rows()).all(|i| (0..self.k).all(|j| self.matrix[(i, j)].abs() <= limit))
    }
}

/// Builds the conjugacy system for `u`, `v` given as normal forms. The input
/// size is taken as the combined length of their normal-form words.
pub fn build_conjugacy_system(
    p: &CentralExtensionPresentation,
    u: &NormalForm,
    v: &NormalForm,
) -> Result<DiophantineSystem, ConjugacyError> {
    let size = crate::words::nf_to_word(p, u).len() + crate::words::nf_to_word(p, v).len();
    build_system_with_size(p, u, v, size)
}

fn build_system_with_size(
    p: &CentralExtensionPresentation,
    u: &NormalForm,
    v: &NormalForm,
    input_size: BigInt,
) -> Result<DiophantineSystem, ConjugacyError> {
    if u.x != v.x {
        return Err(ConjugacyError::DifferentAbelianImage);
    }
    let (k, m, l, r) = (p.k(), p.m(), p.l(), p.r());
    let alpha = &u.x;
    let mut matrix = IntegerMatrix::zeros(r, k + l);
    for s in 0..r {
        for j in 0..k {
            let mut entry = BigInt::zero();
            for (t, a) in alpha.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let gamma = p.gamma(t, j, s);
                // Torsion rows use the minimal residue; the slack column
                // absorbs the difference.
                let gamma = match p.torsion_order(s) {
                    Some(order) => minimal_residue(gamma, order),
                    None => gamma.clone(),
                };
                entry += a * gamma;
            }
            matrix[(s, j)] = entry;
        }
    }
    for (j, order) in p.orders().iter().enumerate() {
        matrix[(m + j, k + j)] = order.clone();
    }
    let rhs = (0..r).map(|s| v.central(s) - u.central(s)).collect();
    let system = DiophantineSystem {
        matrix,
        rhs,
        k,
        l,
        input_size,
    };
    assert!(system.entry_bound_holds(p), "entry bound |M_ij| <= kLn violated");
    Ok(system)
}

/// Replaces each torsion-row entry `m = s o + r` (with `0 <= r < o`) by `r`
/// through the unimodular change of variables `x = P x'`. Returns the new
/// system and `P`.
pub fn change_of_variables(system: &DiophantineSystem) -> (DiophantineSystem, IntegerMatrix) {
    let (k, l) = (system.k, system.l);
    let d = k + l;
    let mut transform = IntegerMatrix::identity(d);
    if l == 0 {
        return (system.clone(), transform);
    }
    let m = system.matrix.rows() - l;
    for j in 0..l {
        let order = &system.matrix[(m + j, k + j)];
        for t in 0..k {
            let quotient = system.matrix[(m + j, t)].div_floor(order);
            transform[(k + j, t)] = -quotient;
        }
    }
    let transformed = DiophantineSystem {
        matrix: &system.matrix * &transform,
        ..system.clone()
    };
    (transformed, transform)
}

/// A verified conjugator `w = a_1^{x_1} ... a_k^{x_k}` with `w^-1 u w = v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyCertificate {
    pub a_exponents: Vec<BigInt>,
    pub witness_word: Word,
    pub length: BigInt,
    pub verified: bool,
    /// `true` when `length` is the exact conjugator length, `false` when the
    /// search budget ran out first.
    pub optimal: bool,
}

/// Everything computed while deciding one conjugacy question.
#[derive(Debug, Clone)]
pub struct ConjugacyAnalysis {
    pub u: NormalForm,
    pub v: NormalForm,
    /// `None` when the images in `A` differ.
    pub system: Option<DiophantineSystem>,
    /// Torsion-reduced system and its change of variables.
    pub reduced: Option<(DiophantineSystem, IntegerMatrix)>,
    /// Whether the torsion-reduced system was the one solved.
    pub used_reduced: bool,
    /// Largest maximal minor of the full-row-rank system that was solved.
    pub minor_bound: Option<BigInt>,
    pub certificate: Option<ConjugacyCertificate>,
}

/// Outcome of [`decide_conjugacy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conjugacy {
    Conjugate(ConjugacyCertificate),
    NotConjugate,
}

/// Full pipeline: collect, build, reduce, solve, minimise, verify.
pub fn analyze_conjugacy(
    p: &CentralExtensionPresentation,
    u: &Word,
    v: &Word,
    budget: u64,
) -> Result<ConjugacyAnalysis, ConjugacyError> {
    let u_nf = collect(p, u);
    let v_nf = collect(p, v);
    let mut analysis = ConjugacyAnalysis {
        u: u_nf.clone(),
        v: v_nf.clone(),
        system: None,
        reduced: None,
        used_reduced: false,
        minor_bound: None,
        certificate: None,
    };
    let system = match build_system_with_size(p, &u_nf, &v_nf, u.len() + v.len()) {
        Ok(system) => system,
        Err(ConjugacyError::DifferentAbelianImage) => return Ok(analysis),
        Err(e) => return Err(e),
    };
    let (reduced, transform) = change_of_variables(&system);
    analysis.system = Some(system.clone());
    if system.l > 0 {
        analysis.reduced = Some((reduced.clone(), transform.clone()));
    }

    let full_rank = |s: &DiophantineSystem| match row_rank_reduce(&s.matrix, &s.rhs) {
        RowReduction::Reduced { matrix, rhs, .. } => Some((matrix, rhs)),
        RowReduction::Inconsistent => None,
    };
    let Some((plain_m, plain_b)) = full_rank(&system) else {
        return Ok(analysis);
    };
    let plain_bound = max_minor_bound(&plain_m, &plain_b).expect("reduced system has full rank");
    let (mut chosen_m, mut chosen_b, mut bound) = (plain_m, plain_b, plain_bound);
    if system.l > 0 {
        if let Some((m2, b2)) = full_rank(&reduced) {
            let bound2 = max_minor_bound(&m2, &b2).expect("reduced system has full rank");
            if bound2 < bound {
                (chosen_m, chosen_b, bound) = (m2, b2, bound2);
                analysis.used_reduced = true;
            }
        }
    }
    analysis.minor_bound = Some(bound);

    let Some(solutions) = solve_integer_system(&chosen_m, &chosen_b) else {
        return Ok(analysis);
    };
    let k = p.k();
    let mask: Vec<bool> = (0..solutions.dimension()).map(|i| i < k).collect();
    let (point, optimal) = match min_l1_in_coset(&solutions, &mask, budget) {
        Ok(minimum) => (minimum.point, true),
        Err(LinalgError::BudgetExceeded {
            incumbent: Some(best),
            ..
        }) => (best.point, false),
        Err(e) => unreachable!("l1 search failed unexpectedly: {e}"),
    };
    // x = P x' leaves the first k coordinates unchanged.
    let a_exponents = point[..k].to_vec();
    let certificate = certify(p, &u_nf, &v_nf, a_exponents, optimal)?;
    analysis.certificate = Some(certificate);
    Ok(analysis)
}

fn certify(
    p: &CentralExtensionPresentation,
    u: &NormalForm,
    v: &NormalForm,
    a_exponents: Vec<BigInt>,
    optimal: bool,
) -> Result<ConjugacyCertificate, ConjugacyError> {
    let w = NormalForm::from_noncentral(p, a_exponents.clone());
    if nf_conjugate(p, u, &w) != *v {
        return Err(ConjugacyError::VerificationFailed);
    }
    let mut witness_word = Word::empty();
    for (i, e) in a_exponents.iter().enumerate() {
        witness_word.push_power(Generator::NonCentral(i), e.clone());
    }
    Ok(ConjugacyCertificate {
        length: witness_word.len(),
        a_exponents,
        witness_word,
        verified: true,
        optimal,
    })
}

/// Decides whether `u` and `v` are conjugate. A returned certificate has
/// been re-checked by conjugating in normal form.
pub fn decide_conjugacy(
    p: &CentralExtensionPresentation,
    u: &Word,
    v: &Word,
    budget: u64,
) -> Result<Conjugacy, ConjugacyError> {
    let analysis = analyze_conjugacy(p, u, v, budget)?;
    Ok(match analysis.certificate {
        Some(certificate) => Conjugacy::Conjugate(certificate),
        None => Conjugacy::NotConjugate,
    })
}

/// Length of a shortest word `w` with `u w = w v`.
pub fn conjugator_length(
    p: &CentralExtensionPresentation,
    u: &Word,
    v: &Word,
    budget: u64,
) -> Result<BigInt, ConjugacyError> {
    match decide_conjugacy(p, u, v, budget)? {
        Conjugacy::NotConjugate => Err(ConjugacyError::NotConjugate),
        Conjugacy::Conjugate(c) if c.optimal => Ok(c.length),
        Conjugacy::Conjugate(c) => Err(ConjugacyError::BudgetExceeded {
            incumbent: Box::new(c),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gm_lab::{make_gm, witness_pair};
    use crate::presentation::{validate_presentation, RawPresentation};
    use crate::words::parse_word;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn abelian_system_is_zero_on_a_columns() {
        let p = validate_presentation(&RawPresentation::new(2, 1, 1).with_orders([3])).unwrap();
        let u = collect(&p, &parse_word(&p, "a1 c1 c2").unwrap());
        let v = collect(&p, &parse_word(&p, "a1 c2^4").unwrap());
        let s = build_conjugacy_system(&p, &u, &v).unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| s.matrix[(i, j)].is_zero())));
        assert_eq!(s.matrix[(1, 2)], big(3));
        assert_eq!(s.rhs, vec![big(-1), big(0)]);
        let words = |a: &str, b: &str| {
            decide_conjugacy(&p, &parse_word(&p, a).unwrap(), &parse_word(&p, b).unwrap(), 1000)
                .unwrap()
        };
        assert_eq!(words("a1 c1 c2", "a1 c2^4"), Conjugacy::NotConjugate);
        assert!(matches!(words("a1 c2", "c2^4 a1"), Conjugacy::Conjugate(_)));
    }

    #[test]
    fn gm_witness_system_is_triangular() {
        let p = make_gm(3).unwrap();
        let n = 2;
        let (u, v) = witness_pair(3, n).unwrap();
        let s = build_conjugacy_system(&p, &collect(&p, &u), &collect(&p, &v)).unwrap();
        let expected = IntegerMatrix::from_i64(&[
            &[1, 0, 0, 0, 0],
            &[-2, 1, 0, 0, 0],
            &[0, -2, 1, 0, 0],
        ]);
        assert_eq!(s.matrix, expected);
        assert_eq!(s.rhs, vec![big(4), big(0), big(0)]);
    }

    #[test]
    fn change_of_variables_reduces_torsion_rows() {
        let system = DiophantineSystem {
            matrix: IntegerMatrix::from_i64(&[&[13, 5]]),
            rhs: vec![big(2)],
            k: 1,
            l: 1,
            input_size: big(100),
        };
        let (reduced, transform) = change_of_variables(&system);
        assert_eq!(reduced.matrix, IntegerMatrix::from_i64(&[&[3, 5]]));
        assert_eq!(transform, IntegerMatrix::from_i64(&[&[1, 0], &[-2, 1]]));

        let plain = DiophantineSystem { k: 2, l: 0, ..system };
        let (same, identity) = change_of_variables(&plain);
        assert_eq!(same, plain);
        assert_eq!(identity, IntegerMatrix::identity(2));
    }

    #[test]
    fn central_elements_are_not_conjugate_unless_equal() {
        let p = make_gm(1).unwrap();
        let c1 = parse_word(&p, "c1").unwrap();
        assert_eq!(
            decide_conjugacy(&p, &c1, &Word::empty(), 1000).unwrap(),
            Conjugacy::NotConjugate
        );
        assert_eq!(
            conjugator_length(&p, &c1, &Word::empty(), 1000),
            Err(ConjugacyError::NotConjugate)
        );
    }

    #[test]
    fn equal_words_need_no_conjugator() {
        let p = make_gm(2).unwrap();
        let u = parse_word(&p, "a1 b2 c2^3 b1").unwrap();
        match decide_conjugacy(&p, &u, &u, 1000).unwrap() {
            Conjugacy::Conjugate(c) => {
                assert!(c.witness_word.is_empty());
                assert_eq!(c.length, big(0));
                assert!(c.verified && c.optimal);
            }
            Conjugacy::NotConjugate => panic!("u is conjugate to itself"),
        }
    }

    #[test]
    fn g2_witness_certificate() {
        let p = make_gm(2).unwrap();
        let (u, v) = witness_pair(2, 3).unwrap();
        match decide_conjugacy(&p, &u, &v, DEFAULT_BUDGET).unwrap() {
            Conjugacy::Conjugate(c) => {
                assert_eq!(c.a_exponents, vec![big(9), big(27), big(0), big(0)]);
                assert_eq!(c.length, big(36));
            }
            Conjugacy::NotConjugate => panic!("witness pair must be conjugate"),
        }
    }

    #[test]
    fn torsion_conjugacy_uses_slack() {
        // Heisenberg mod 4: [a1, a2] = c1 with c1^4 = 1.
        let p = validate_presentation(&RawPresentation::new(2, 0, 1).with_orders([4]).gamma(1, 2, 1, 1))
            .unwrap();
        let u = parse_word(&p, "a1^2").unwrap();
        let v = parse_word(&p, "a1^2 c1^2").unwrap();
        // w = a2^t: a2^-t a1^2 a2^t = a1^2 c1^{2t}; t = 1 works.
        assert_eq!(conjugator_length(&p, &u, &v, 1000).unwrap(), big(1));
        let v_odd = parse_word(&p, "a1^2 c1").unwrap();
        assert_eq!(
            decide_conjugacy(&p, &u, &v_odd, 1000).unwrap(),
            Conjugacy::NotConjugate
        );
    }
}
