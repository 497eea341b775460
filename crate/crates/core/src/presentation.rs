//! Central extensions `1 -> Z -> G -> A -> 1` with `A` free abelian of rank
//! `k` and `Z = Z^m x C_{o_1} x ... x C_{o_l}`.
//!
//! A presentation is fixed by its commutator table: for every pair of
//! non-central generators, `[a_i, a_j] = c_1^{g_ij1} ... c_r^{g_ijr}` with the
//! convention `[a, b] = a^-1 b^-1 a b`. Everything else about the group
//! (normal forms, multiplication, conjugation) is derived from that table.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("generator count {name} must be {requirement}, got {value}")]
    BadCount {
        name: &'static str,
        requirement: &'static str,
        value: i64,
    },
    #[error("expected {expected} torsion orders, got {got}")]
    OrderCount { expected: usize, got: usize },
    #[error("torsion order o_{index} = {value} must be at least 2")]
    OrderTooSmall { index: usize, value: BigInt },
    #[error("gamma index ({i}, {j}, {s}) out of range")]
    IndexOutOfRange { i: usize, j: usize, s: usize },
    #[error("diagonal commutator entry gamma({i}, {i}, {s}) = {value} must be zero")]
    NonzeroDiagonal { i: usize, s: usize, value: BigInt },
    #[error("antisymmetry violated: gamma({i}, {j}, {s}) = {forward} but gamma({j}, {i}, {s}) = {backward}")]
    Antisymmetry {
        i: usize,
        j: usize,
        s: usize,
        forward: BigInt,
        backward: BigInt,
    },
    #[error("conflicting values for gamma({i}, {j}, {s}): {first} and {second}")]
    Conflict {
        i: usize,
        j: usize,
        s: usize,
        first: BigInt,
        second: BigInt,
    },
    #[error("expected {expected} generator names, got {got}")]
    NameCount { expected: usize, got: usize },
    #[error("invalid or duplicate generator name `{0}`")]
    BadName(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("json: {0}")]
    Json(String),
}

/// One supplied commutator exponent, 1-based as in presentation files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaEntry {
    pub i: usize,
    pub j: usize,
    pub s: usize,
    pub value: BigInt,
}

/// Unvalidated presentation data, as read from a file or built by hand.
///
/// Counts are signed so that negative input can be rejected with a proper
/// error rather than failing to parse.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawPresentation {
    pub k: i64,
    pub m: i64,
    pub l: i64,
    pub orders: Vec<BigInt>,
    pub gamma: Vec<GammaEntry>,
    pub names: Option<Vec<String>>,
}

impl RawPresentation {
    pub fn new(k: i64, m: i64, l: i64) -> Self {
        RawPresentation {
            k,
            m,
            l,
            ..Default::default()
        }
    }

    pub fn with_orders<I: IntoIterator<Item = i64>>(mut self, orders: I) -> Self {
        self.orders = orders.into_iter().map(BigInt::from).collect();
        self
    }

    /// Adds `gamma(i, j, s) = value` (1-based indices).
    pub fn gamma(mut self, i: usize, j: usize, s: usize, value: i64) -> Self {
        self.gamma.push(GammaEntry {
            i,
            j,
            s,
            value: BigInt::from(value),
        });
        self
    }

    pub fn with_names<S: Into<String>, I: IntoIterator<Item = S>>(mut self, names: I) -> Self {
        self.names = Some(names.into_iter().map(Into::into).collect());
        self
    }

    /// Parses the line-oriented text format:
    ///
    /// ```text
    /// # comment
    /// k m l
    /// orders o_1 ... o_l
    /// names a1 a2 ... c1 ...
    /// gamma i j s value
    /// ```
    pub fn parse_text(text: &str) -> Result<Self, PresentationError> {
        let mut raw: Option<RawPresentation> = None;
        for (index, full_line) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = match full_line.find('#') {
                Some(pos) => &full_line[..pos],
                None => full_line,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let syntax = |message: String| PresentationError::Syntax {
                line: line_no,
                message,
            };
            let Some(current) = raw.as_mut() else {
                if tokens.len() != 3 {
                    return Err(syntax("header must be `k m l`".into()));
                }
                let mut counts = [0i64; 3];
                for (slot, token) in counts.iter_mut().zip(&tokens) {
                    *slot = token
                        .parse()
                        .map_err(|_| syntax(format!("bad count `{token}`")))?;
                }
                raw = Some(RawPresentation::new(counts[0], counts[1], counts[2]));
                continue;
            };
            match tokens[0] {
                "orders" => {
                    current.orders = tokens[1..]
                        .iter()
                        .map(|t| BigInt::from_str(t).map_err(|_| syntax(format!("bad order `{t}`"))))
                        .collect::<Result<_, _>>()?;
                }
                "names" => {
                    current.names = Some(tokens[1..].iter().map(|t| t.to_string()).collect());
                }
                "gamma" => {
                    if tokens.len() != 5 {
                        return Err(syntax("expected `gamma i j s value`".into()));
                    }
                    let index = |t: &str| {
                        t.parse::<usize>()
                            .map_err(|_| syntax(format!("bad index `{t}`")))
                    };
                    let (i, j, s) = (index(tokens[1])?, index(tokens[2])?, index(tokens[3])?);
                    if i >= j {
                        return Err(syntax(format!("gamma lines need i < j, got {i} {j}")));
                    }
                    let value = BigInt::from_str(tokens[4])
                        .map_err(|_| syntax(format!("bad value `{}`", tokens[4])))?;
                    current.gamma.push(GammaEntry { i, j, s, value });
                }
                other => return Err(syntax(format!("unknown directive `{other}`"))),
            }
        }
        raw.ok_or(PresentationError::Syntax {
            line: 0,
            message: "missing `k m l` header".into(),
        })
    }

    /// Parses the JSON form, which uses the same field names as the text
    /// format: `{"k":2,"m":1,"l":0,"orders":[],"gamma":[{"i":1,"j":2,"s":1,"value":1}]}`.
    pub fn parse_json(text: &str) -> Result<Self, PresentationError> {
        #[derive(Deserialize)]
        struct JsonGamma {
            i: usize,
            j: usize,
            s: usize,
            value: serde_json::Number,
        }
        #[derive(Deserialize)]
        struct JsonPresentation {
            k: i64,
            m: i64,
            l: i64,
            #[serde(default)]
            orders: Vec<serde_json::Number>,
            #[serde(default)]
            gamma: Vec<JsonGamma>,
            #[serde(default)]
            names: Option<Vec<String>>,
        }
        let json = |e: String| PresentationError::Json(e);
        let parsed: JsonPresentation =
            serde_json::from_str(text).map_err(|e| json(e.to_string()))?;
        let number = |n: &serde_json::Number| {
            BigInt::from_str(&n.to_string()).map_err(|_| json(format!("`{n}` is not an integer")))
        };
        Ok(RawPresentation {
            k: parsed.k,
            m: parsed.m,
            l: parsed.l,
            orders: parsed.orders.iter().map(number).collect::<Result<_, _>>()?,
            gamma: parsed
                .gamma
                .iter()
                .map(|g| {
                    Ok(GammaEntry {
                        i: g.i,
                        j: g.j,
                        s: g.s,
                        value: number(&g.value)?,
                    })
                })
                .collect::<Result<_, PresentationError>>()?,
            names: parsed.names,
        })
    }
}

/// A validated central-extension presentation. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralExtensionPresentation {
    k: usize,
    m: usize,
    orders: Vec<BigInt>,
    /// Flattened `k x k x r` table, index `(i * k + j) * r + s`.
    gamma: Vec<BigInt>,
    names: Vec<String>,
    commutator_bound: BigInt,
}

/// Checks and completes raw presentation data.
///
/// Entries with `i > j` may be omitted; they are derived by antisymmetry.
/// Torsion entries are reduced to their canonical residue in `[0, o)`.
pub fn validate_presentation(
    raw: &RawPresentation,
) -> Result<CentralExtensionPresentation, PresentationError> {
    if raw.k < 1 {
        return Err(PresentationError::BadCount {
            name: "k",
            requirement: "positive",
            value: raw.k,
        });
    }
    for (name, value) in [("m", raw.m), ("l", raw.l)] {
        if value < 0 {
            return Err(PresentationError::BadCount {
                name,
                requirement: "non-negative",
                value,
            });
        }
    }
    let (k, m, l) = (raw.k as usize, raw.m as usize, raw.l as usize);
    let r = m + l;
    if raw.orders.len() != l {
        return Err(PresentationError::OrderCount {
            expected: l,
            got: raw.orders.len(),
        });
    }
    for (index, order) in raw.orders.iter().enumerate() {
        if *order < BigInt::from(2) {
            return Err(PresentationError::OrderTooSmall {
                index: index + 1,
                value: order.clone(),
            });
        }
    }

    // Supplied values keyed by 0-based (i, j, s); duplicates must agree.
    let mut supplied: BTreeMap<(usize, usize, usize), BigInt> = BTreeMap::new();
    for entry in &raw.gamma {
        let (i, j, s) = (entry.i, entry.j, entry.s);
        if i == 0 || j == 0 || s == 0 || i > k || j > k || s > r {
            return Err(PresentationError::IndexOutOfRange { i, j, s });
        }
        let key = (i - 1, j - 1, s - 1);
        let value = reduce_central(&raw.orders, m, s - 1, &entry.value);
        if i == j {
            if !value.is_zero() {
                return Err(PresentationError::NonzeroDiagonal {
                    i,
                    s,
                    value: entry.value.clone(),
                });
            }
            continue;
        }
        if let Some(previous) = supplied.get(&key) {
            if *previous != value {
                return Err(PresentationError::Conflict {
                    i,
                    j,
                    s,
                    first: previous.clone(),
                    second: value,
                });
            }
        }
        supplied.insert(key, value);
    }

    let mut gamma = vec![BigInt::zero(); k * k * r];
    for (&(i, j, s), value) in &supplied {
        let negated = reduce_central(&raw.orders, m, s, &-value);
        if let Some(backward) = supplied.get(&(j, i, s)) {
            if *backward != negated {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                return Err(PresentationError::Antisymmetry {
                    i: a + 1,
                    j: b + 1,
                    s: s + 1,
                    forward: supplied[&(a, b, s)].clone(),
                    backward: supplied[&(b, a, s)].clone(),
                });
            }
        }
        gamma[(i * k + j) * r + s] = value.clone();
        gamma[(j * k + i) * r + s] = negated;
    }

    let names = match &raw.names {
        Some(names) => {
            if names.len() != k + r {
                return Err(PresentationError::NameCount {
                    expected: k + r,
                    got: names.len(),
                });
            }
            let mut seen = HashSet::new();
            for name in names {
                let valid = !name.is_empty()
                    && name.chars().all(|c| c.is_alphanumeric() || c == '_')
                    && !name.chars().all(|c| c.is_ascii_digit());
                if !valid || !seen.insert(name.as_str()) {
                    return Err(PresentationError::BadName(name.clone()));
                }
            }
            names.clone()
        }
        None => (1..=k)
            .map(|i| format!("a{i}"))
            .chain((1..=r).map(|s| format!("c{s}")))
            .collect(),
    };

    let mut presentation = CentralExtensionPresentation {
        k,
        m,
        orders: raw.orders.clone(),
        gamma,
        names,
        commutator_bound: BigInt::zero(),
    };
    presentation.commutator_bound = compute_commutator_bound(&presentation);
    Ok(presentation)
}

fn reduce_central(orders: &[BigInt], m: usize, s: usize, value: &BigInt) -> BigInt {
    if s < m {
        value.clone()
    } else {
        value.mod_floor(&orders[s - m])
    }
}

fn compute_commutator_bound(p: &CentralExtensionPresentation) -> BigInt {
    let mut best = BigInt::zero();
    for i in 0..p.k {
        for j in i + 1..p.k {
            let total: BigInt = (0..p.r())
                .map(|s| {
                    let value = p.gamma(i, j, s);
                    match p.torsion_order(s) {
                        Some(order) => minimal_residue(value, order).abs(),
                        None => value.abs(),
                    }
                })
                .sum();
            best = best.max(total);
        }
    }
    best
}

/// Representative of `value mod order` with the smallest absolute value
/// (ties resolved towards the non-negative one).
pub fn minimal_residue(value: &BigInt, order: &BigInt) -> BigInt {
    let canonical = value.mod_floor(order);
    let complement = &canonical - order;
    if canonical <= -&complement {
        canonical
    } else {
        complement
    }
}

/// `L = max_{i<j} sum_s |gamma_ijs|`, using minimal absolute residues for
/// torsion coordinates.
pub fn commutator_bound(p: &CentralExtensionPresentation) -> BigInt {
    p.commutator_bound.clone()
}

impl CentralExtensionPresentation {
    /// Number of non-central generators `a_1..a_k`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of infinite-order central generators.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of finite-order central generators.
    pub fn l(&self) -> usize {
        self.orders.len()
    }

    /// Total number of central generators, `m + l`.
    pub fn r(&self) -> usize {
        self.m + self.orders.len()
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    /// Order of central coordinate `s` (0-based), or `None` if it is free.
    pub fn torsion_order(&self, s: usize) -> Option<&BigInt> {
        s.checked_sub(self.m).map(|j| &self.orders[j])
    }

    /// `gamma_ijs` for 0-based indices.
    pub fn gamma(&self, i: usize, j: usize, s: usize) -> &BigInt {
        &self.gamma[(i * self.k + j) * self.r() + s]
    }

    /// The central row `[a_i, a_j]` as an exponent vector of length `r`.
    pub fn commutator(&self, i: usize, j: usize) -> &[BigInt] {
        let r = self.r();
        let start = (i * self.k + j) * r;
        &self.gamma[start..start + r]
    }

    /// Display labels: `k` non-central names followed by `r` central names.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn noncentral_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn central_name(&self, s: usize) -> &str {
        &self.names[self.k + s]
    }

    /// Reduces a central exponent into canonical range when `s` is a
    /// torsion coordinate.
    pub fn reduce_central(&self, s: usize, value: BigInt) -> BigInt {
        match self.torsion_order(s) {
            Some(order) => value.mod_floor(order),
            None => value,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.gamma.iter().all(Zero::is_zero)
    }

    /// Converts back to raw data listing every nonzero entry with `i < j`.
    pub fn to_raw(&self) -> RawPresentation {
        let mut gamma = Vec::new();
        for i in 0..self.k {
            for j in i + 1..self.k {
                for s in 0..self.r() {
                    let value = self.gamma(i, j, s);
                    if !value.is_zero() {
                        gamma.push(GammaEntry {
                            i: i + 1,
                            j: j + 1,
                            s: s + 1,
                            value: value.clone(),
                        });
                    }
                }
            }
        }
        RawPresentation {
            k: self.k as i64,
            m: self.m as i64,
            l: self.l() as i64,
            orders: self.orders.clone(),
            gamma,
            names: Some(self.names.clone()),
        }
    }
}

impl fmt::Display for CentralExtensionPresentation {
    /// Writes the text file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let raw = self.to_raw();
        writeln!(f, "{} {} {}", raw.k, raw.m, raw.l)?;
        if !self.orders.is_empty() {
            write!(f, "orders")?;
            for order in &self.orders {
                write!(f, " {order}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "names {}", self.names.join(" "))?;
        for entry in &raw.gamma {
            writeln!(f, "gamma {} {} {} {}", entry.i, entry.j, entry.s, entry.value)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg() -> CentralExtensionPresentation {
        validate_presentation(&RawPresentation::new(2, 1, 0).gamma(1, 2, 1, 1)).unwrap()
    }

    #[test]
    fn heisenberg_completes_antisymmetry() {
        let p = heisenberg();
        assert_eq!(*p.gamma(0, 1, 0), BigInt::from(1));
        assert_eq!(*p.gamma(1, 0, 0), BigInt::from(-1));
        assert_eq!(commutator_bound(&p), BigInt::from(1));
        assert_eq!(p.names(), ["a1", "a2", "c1"]);
    }

    #[test]
    fn abelian_presentation() {
        let p = validate_presentation(&RawPresentation::new(3, 1, 2).with_orders([2, 5])).unwrap();
        assert!(p.is_abelian());
        assert_eq!(commutator_bound(&p), BigInt::zero());
    }

    #[test]
    fn rejects_bad_input() {
        let diag = RawPresentation::new(2, 1, 0).gamma(1, 1, 1, 3);
        assert!(matches!(
            validate_presentation(&diag),
            Err(PresentationError::NonzeroDiagonal { .. })
        ));
        let anti = RawPresentation::new(2, 1, 0).gamma(1, 2, 1, 1).gamma(2, 1, 1, 1);
        assert!(matches!(
            validate_presentation(&anti),
            Err(PresentationError::Antisymmetry { .. })
        ));
        let small = RawPresentation::new(2, 0, 1).with_orders([1]);
        assert!(matches!(
            validate_presentation(&small),
            Err(PresentationError::OrderTooSmall { .. })
        ));
        let negative = RawPresentation::new(2, -1, 0);
        assert!(matches!(
            validate_presentation(&negative),
            Err(PresentationError::BadCount { .. })
        ));
        let zero_k = RawPresentation::new(0, 1, 0);
        assert!(validate_presentation(&zero_k).is_err());
    }

    #[test]
    fn torsion_antisymmetry_is_modular() {
        // gamma(1,2) = 2 and gamma(2,1) = 3 agree mod 5.
        let raw = RawPresentation::new(2, 0, 1)
            .with_orders([5])
            .gamma(1, 2, 1, 7)
            .gamma(2, 1, 1, 3);
        let p = validate_presentation(&raw).unwrap();
        assert_eq!(*p.gamma(0, 1, 0), BigInt::from(2));
        assert_eq!(*p.gamma(1, 0, 0), BigInt::from(3));
        // minimal residues: 2 and -2 -> L = 2
        assert_eq!(commutator_bound(&p), BigInt::from(2));

        let raw = RawPresentation::new(2, 0, 1).with_orders([7]).gamma(1, 2, 1, 6);
        assert_eq!(commutator_bound(&validate_presentation(&raw).unwrap()), BigInt::from(1));
    }

    #[test]
    fn validation_is_idempotent() {
        let raw = RawPresentation::new(3, 1, 1)
            .with_orders([4])
            .gamma(1, 2, 1, -2)
            .gamma(1, 3, 2, 9)
            .gamma(2, 3, 1, 1);
        let once = validate_presentation(&raw).unwrap();
        let twice = validate_presentation(&once.to_raw()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn text_format_round_trip() {
        let text = "# Heisenberg times C_3\n2 1 1\norders 3\ngamma 1 2 1 1  # [a1,a2]=c1\ngamma 1 2 2 -1\n";
        let p = validate_presentation(&RawPresentation::parse_text(text).unwrap()).unwrap();
        assert_eq!(*p.gamma(0, 1, 1), BigInt::from(2));
        let again =
            validate_presentation(&RawPresentation::parse_text(&p.to_string()).unwrap()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn text_format_errors() {
        assert!(RawPresentation::parse_text("").is_err());
        assert!(RawPresentation::parse_text("2 1\n").is_err());
        assert!(RawPresentation::parse_text("2 1 0\ngamma 2 1 1 1\n").is_err());
        assert!(RawPresentation::parse_text("2 1 0\nbogus\n").is_err());
    }

    #[test]
    fn json_format() {
        let json = r#"{"k":2,"m":1,"l":0,"gamma":[{"i":1,"j":2,"s":1,"value":1}]}"#;
        let p = validate_presentation(&RawPresentation::parse_json(json).unwrap()).unwrap();
        assert_eq!(p, heisenberg());
    }
}
