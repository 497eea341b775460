//! The groups `G_m` and the experiments around their conjugator length.
//!
//! `G_m` has generators `a_1..a_m, b_1, b_2` over the centre
//! `<c_1, ..., c_m>`, with relations `b_1 a_i = a_i b_1 c_i`,
//! `b_2 a_i = a_i b_2 c_{i+1}^-1` (for `i < m`) and all other pairs of
//! generators commuting. The witness pair
//! `u = b_1 b_2^n a_1^-n b_1^-n a_1^n b_1^n`, `v = b_1 b_2^n` has the unique
//! conjugator image `(n^2, n^3, ..., n^{m+1})` in `<a_1, ..., a_m>`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::conjugacy::{analyze_conjugacy, ConjugacyError, ConjugacyAnalysis};
use crate::presentation::{validate_presentation, CentralExtensionPresentation, RawPresentation};
use crate::words::{collect, nf_conjugate, nf_multiply, nf_to_word, Generator, NormalForm, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabError {
    #[error("family index m must be at least 1")]
    BadFamilyIndex,
    #[error("witness parameter n must be at least 1")]
    BadParameter,
    #[error("n values must be non-empty and ascending")]
    BadRange,
    #[error("oracle state budget of {0} elements exceeded")]
    OracleBudget(usize),
    #[error("witness pair reported as not conjugate")]
    WitnessNotConjugate,
    #[error(transparent)]
    Conjugacy(#[from] ConjugacyError),
}

/// Index of `b_1` among the non-central generators of `G_m` (0-based);
/// `b_2` follows it.
pub fn b1_index(m: usize) -> usize {
    m
}

/// Builds `G_m` with non-central generators ordered `a_1..a_m, b_1, b_2`.
pub fn make_gm(m: usize) -> Result<CentralExtensionPresentation, LabError> {
    if m < 1 {
        return Err(LabError::BadFamilyIndex);
    }
    let (b1, b2) = (m + 1, m + 2); // 1-based
    let mut raw = RawPresentation::new((m + 2) as i64, m as i64, 0);
    // [b_1, a_i] = c_i, [b_2, a_i] = c_{i+1}^-1 under [x, y] = x^-1 y^-1 x y.
    for i in 1..=m {
        raw = raw.gamma(b1, i, i, 1);
        if i < m {
            raw = raw.gamma(b2, i, i + 1, -1);
        }
    }
    let names = (1..=m)
        .map(|i| format!("a{i}"))
        .chain(["b1".to_string(), "b2".to_string()])
        .chain((1..=m).map(|i| format!("c{i}")));
    let p = validate_presentation(&raw.with_names(names))
        .expect("the G_m presentation is well formed");
    debug_assert!(defining_relators(&p).iter().all(|w| collect(&p, w).is_identity()));
    Ok(p)
}

impl NormalForm {
    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).chain(&self.t).all(Zero::is_zero)
    }
}

/// The defining relators of `G_m` as words equal to the identity, e.g.
/// `b1 a_i (a_i b1 c_i)^-1`.
pub fn defining_relators(p: &CentralExtensionPresentation) -> Vec<Word> {
    let m = p.m();
    let a = |i: usize| Generator::NonCentral(i);
    let (b1, b2) = (a(m), a(m + 1));
    let c = |s: usize| Generator::Central(s);
    let word = |letters: &[(Generator, i64)]| {
        let mut w = Word::empty();
        for (g, e) in letters {
            w.push_power(*g, BigInt::from(*e));
        }
        w
    };
    let relation = |lhs: Word, rhs: Word| lhs.concat(&rhs.inverse());
    let mut relators = Vec::new();
    for i in 0..m {
        relators.push(relation(word(&[(b1, 1), (a(i), 1)]), word(&[(a(i), 1), (b1, 1), (c(i), 1)])));
        let rhs = if i + 1 < m {
            word(&[(a(i), 1), (b2, 1), (c(i + 1), -1)])
        } else {
            word(&[(a(i), 1), (b2, 1)])
        };
        relators.push(relation(word(&[(b2, 1), (a(i), 1)]), rhs));
        for j in 0..m {
            relators.push(relation(word(&[(a(i), 1), (a(j), 1)]), word(&[(a(j), 1), (a(i), 1)])));
        }
    }
    relators.push(relation(word(&[(b1, 1), (b2, 1)]), word(&[(b2, 1), (b1, 1)])));
    let noncentral: Vec<Generator> = (0..p.k()).map(a).collect();
    for s in 0..p.r() {
        for g in &noncentral {
            relators.push(relation(word(&[(*g, 1), (c(s), 1)]), word(&[(c(s), 1), (*g, 1)])));
        }
    }
    relators
}

/// `u = b_1 b_2^n a_1^-n b_1^-n a_1^n b_1^n` and `v = b_1 b_2^n`.
pub fn witness_pair(m: usize, n: u64) -> Result<(Word, Word), LabError> {
    if m < 1 {
        return Err(LabError::BadFamilyIndex);
    }
    if n < 1 {
        return Err(LabError::BadParameter);
    }
    let n = BigInt::from(n);
    let (a1, b1, b2) = (
        Generator::NonCentral(0),
        Generator::NonCentral(b1_index(m)),
        Generator::NonCentral(b1_index(m) + 1),
    );
    let mut v = Word::empty();
    v.push_power(b1, BigInt::from(1));
    v.push_power(b2, n.clone());
    let mut u = v.clone();
    for (g, e) in [(a1, -&n), (b1, -&n), (a1, n.clone()), (b1, n.clone())] {
        u.push_power(g, e);
    }
    Ok((u, v))
}

/// `(n^2, n^3, ..., n^{m+1})`.
pub fn expected_exponents(m: usize, n: u64) -> Vec<BigInt> {
    let n = BigInt::from(n);
    (2..=m as u32 + 1).map(|e| Pow::pow(&n, e)).collect()
}

/// `w_0 = a_1^{n^2} a_2^{n^3} ... a_m^{n^{m+1}}`.
pub fn expected_conjugator(m: usize, n: u64) -> Result<Word, LabError> {
    if m < 1 {
        return Err(LabError::BadFamilyIndex);
    }
    if n < 1 {
        return Err(LabError::BadParameter);
    }
    let mut w = Word::empty();
    for (i, e) in expected_exponents(m, n).into_iter().enumerate() {
        w.push_power(Generator::NonCentral(i), e);
    }
    Ok(w)
}

/// `sum_{i=1}^m n^{i+1}`.
pub fn predicted_length(m: usize, n: u64) -> BigInt {
    expected_exponents(m, n).into_iter().sum()
}

/// How the ball enumeration explores the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Breadth-first over all group elements using every generator,
    /// deduplicated by normal form. Independent of the linear algebra.
    Full,
    /// Breadth-first over `Z^k` using only the `a_i`: conjugation depends
    /// only on the image of `w` in `A`, so central letters are skipped.
    Abelianised,
}

/// Least `l <= radius` such that some word `w` of length `l` satisfies
/// `w^-1 u w = v`, found by breadth-first search of the Cayley ball.
/// `Ok(None)` means no conjugator of length `<= radius` exists.
pub fn brute_force_cl(
    p: &CentralExtensionPresentation,
    u: &Word,
    v: &Word,
    radius: usize,
    mode: OracleMode,
    max_states: usize,
) -> Result<Option<usize>, LabError> {
    let u_nf = collect(p, u);
    let v_nf = collect(p, v);
    let mut steps: Vec<NormalForm> = Vec::new();
    let generators: Vec<Generator> = match mode {
        OracleMode::Full => (0..p.k())
            .map(Generator::NonCentral)
            .chain((0..p.r()).map(Generator::Central))
            .collect(),
        OracleMode::Abelianised => (0..p.k()).map(Generator::NonCentral).collect(),
    };
    for g in generators {
        for e in [1, -1] {
            steps.push(collect(p, &Word::power(g, e)));
        }
    }

    let identity = NormalForm::identity(p);
    let mut seen: HashSet<NormalForm> = HashSet::new();
    seen.insert(identity.clone());
    let mut frontier = vec![identity];
    for length in 0..=radius {
        if frontier.iter().any(|w| nf_conjugate(p, &u_nf, w) == v_nf) {
            return Ok(Some(length));
        }
        if length == radius {
            break;
        }
        let mut next = Vec::new();
        for w in &frontier {
            for step in &steps {
                let candidate = nf_multiply(p, w, step);
                if seen.insert(candidate.clone()) {
                    if seen.len() > max_states {
                        return Err(LabError::OracleBudget(max_states));
                    }
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    Ok(None)
}

/// One row of a growth experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub m: usize,
    pub n: u64,
    pub input_size: u64,
    #[serde(serialize_with = "serialize_decimal")]
    pub cl: BigInt,
    #[serde(serialize_with = "serialize_decimal")]
    pub predicted: BigInt,
    #[serde(serialize_with = "serialize_decimal")]
    pub minor_bound: BigInt,
    pub wall_time_s: f64,
    /// Largest entry of the minimising conjugator.
    #[serde(skip)]
    pub max_exponent: BigInt,
    /// Exponents of the minimising conjugator on `a_1..a_m, b_1, b_2`.
    #[serde(skip)]
    pub minimizer: Vec<BigInt>,
}

fn serialize_decimal<S: serde::Serializer>(value: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    let number: serde_json::Number = value
        .to_string()
        .parse()
        .map_err(serde::ser::Error::custom)?;
    number.serialize(s)
}

pub const CSV_HEADER: &str = "m,n,input_size,cl,predicted,minor_bound,wall_time_s";

impl ExperimentRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6}",
            self.m, self.n, self.input_size, self.cl, self.predicted, self.minor_bound, self.wall_time_s
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub records: Vec<ExperimentRecord>,
    /// Least-squares slope of `log cl` against `log input_size`; absent for
    /// fewer than two distinct points.
    pub slope: Option<f64>,
}

impl GrowthReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{CSV_HEADER}").unwrap();
        for record in &self.records {
            writeln!(out, "{}", record.csv_row()).unwrap();
        }
        match self.slope {
            Some(slope) => writeln!(out, "# slope={slope:.6}").unwrap(),
            None => writeln!(out, "# slope=absent").unwrap(),
        }
        out
    }
}

/// Runs the witness pipeline for one `(m, n)`.
pub fn measure_witness(
    p: &CentralExtensionPresentation,
    m: usize,
    n: u64,
    budget: u64,
) -> Result<(ExperimentRecord, ConjugacyAnalysis), LabError> {
    let start = Instant::now();
    let (u, v) = witness_pair(m, n)?;
    let analysis = analyze_conjugacy(p, &u, &v, budget)?;
    let certificate = analysis
        .certificate
        .clone()
        .ok_or(LabError::WitnessNotConjugate)?;
    if !certificate.optimal {
        return Err(ConjugacyError::BudgetExceeded {
            incumbent: Box::new(certificate),
        }
        .into());
    }
    let record = ExperimentRecord {
        m,
        n,
        input_size: (u.len() + v.len()).to_u64().expect("witness length fits in u64"),
        cl: certificate.length.clone(),
        predicted: predicted_length(m, n),
        minor_bound: analysis.minor_bound.clone().unwrap_or_default(),
        // Microsecond resolution, so CSV and JSON rows agree.
        wall_time_s: (start.elapsed().as_secs_f64() * 1e6).round() / 1e6,
        max_exponent: certificate
            .a_exponents
            .iter()
            .map(|e| e.abs())
            .max()
            .unwrap_or_default(),
        minimizer: certificate.a_exponents,
    };
    Ok((record, analysis))
}

/// Measures the witness family over `n_values` and fits the growth exponent.
pub fn growth_experiment(m: usize, n_values: &[u64], budget: u64) -> Result<GrowthReport, LabError> {
    if n_values.is_empty() || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::BadRange);
    }
    let p = make_gm(m)?;
    let records = n_values
        .iter()
        .map(|&n| measure_witness(&p, m, n, budget).map(|(record, _)| record))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            (
                (r.input_size as f64).ln(),
                r.cl.to_f64().unwrap_or(f64::INFINITY).ln(),
            )
        })
        .collect();
    Ok(GrowthReport {
        slope: least_squares_slope(&points),
        records,
    })
}

/// Slope of the ordinary least-squares line through `points`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn random_word(p: &CentralExtensionPresentation, rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let alphabet = p.k() + p.r();
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let index = rng.gen_range(0..alphabet);
            let generator = if index < p.k() {
                Generator::NonCentral(index)
            } else {
                Generator::Central(index - p.k())
            };
            crate::words::Letter {
                generator,
                inverse: rng.gen_bool(0.5),
            }
        })
        .collect()
}

/// Draws `u` and `w` (lengths uniform in `0..=size`, letters uniform) and
/// returns `(u, v, w)` with `v` the normal-form word of `w^-1 u w`.
pub fn random_conjugate_pair(
    p: &CentralExtensionPresentation,
    seed: u64,
    size: usize,
) -> (Word, Word, Word) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_word(p, &mut rng, size);
    let w = random_word(p, &mut rng, size);
    let v = nf_to_word(p, &nf_conjugate(p, &collect(p, &u), &collect(p, &w)));
    (u, v, w)
}

/// A random word without central letters, of length exactly `len`.
pub fn random_noncentral_word(p: &CentralExtensionPresentation, seed: u64, len: usize) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| crate::words::Letter {
            generator: Generator::NonCentral(rng.gen_range(0..p.k())),
            inverse: rng.gen_bool(0.5),
        })
        .collect()
}
