//! Words over the generators and normal forms
//! `a_1^{x_1} ... a_k^{x_k} c_1^{z_1} ... c_r^{z_r}`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::presentation::CentralExtensionPresentation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed exponent in `{0}`")]
    BadExponent(String),
}

/// A generator of `G`: one of the `a_i` or one of the central `c_s`
/// (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    NonCentral(usize),
    Central(usize),
}

/// A single letter `g^{+1}` or `g^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

/// A word, stored as maximal runs of equal letters.
///
/// Adjacent syllables never share both generator and sign, and exponents are
/// nonzero, so two words are equal exactly when their letter sequences are.
/// `a1 a1^-1` is kept as two syllables: words are not freely reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    syllables: Vec<(Generator, BigInt)>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn power(generator: Generator, exponent: impl Into<BigInt>) -> Self {
        let mut word = Word::empty();
        word.push_power(generator, exponent.into());
        word
    }

    /// Appends `generator^exponent` (`|exponent|` letters).
    pub fn push_power(&mut self, generator: Generator, exponent: BigInt) {
        if exponent.is_zero() {
            return;
        }
        if let Some((last, e)) = self.syllables.last_mut() {
            if *last == generator && e.is_positive() == exponent.is_positive() {
                *e += exponent;
                return;
            }
        }
        self.syllables.push((generator, exponent));
    }

    pub fn push(&mut self, letter: Letter) {
        let e = if letter.inverse { -1 } else { 1 };
        self.push_power(letter.generator, BigInt::from(e));
    }

    pub fn syllables(&self) -> &[(Generator, BigInt)] {
        &self.syllables
    }

    /// Number of letters.
    pub fn len(&self) -> BigInt {
        self.syllables.iter().map(|(_, e)| e.abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Iterates over the individual letters. Only sensible for words of
    /// modest length.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.syllables.iter().flat_map(|(generator, e)| {
            let count = e.magnitude().clone();
            let inverse = e.is_negative();
            num_iter_count(count).map(move |_| Letter {
                generator: *generator,
                inverse,
            })
        })
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for (generator, e) in &other.syllables {
            out.push_power(*generator, e.clone());
        }
        out
    }

    /// The formal inverse: letters reversed and inverted.
    pub fn inverse(&self) -> Word {
        let mut out = Word::empty();
        for (generator, e) in self.syllables.iter().rev() {
            out.push_power(*generator, -e);
        }
        out
    }

    /// Renders with the presentation's labels, e.g. `b1 b2^2 c1^-4`.
    pub fn display<'a>(&'a self, p: &'a CentralExtensionPresentation) -> WordDisplay<'a> {
        WordDisplay { word: self, p }
    }
}

fn num_iter_count(count: num_bigint::BigUint) -> impl Iterator<Item = ()> {
    let mut remaining = count;
    std::iter::from_fn(move || {
        if remaining.is_zero() {
            None
        } else {
            remaining -= 1u32;
            Some(())
        }
    })
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        let mut word = Word::empty();
        for letter in iter {
            word.push(letter);
        }
        word
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    p: &'a CentralExtensionPresentation,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (index, (generator, e)) in self.word.syllables.iter().enumerate() {
            if index > 0 {
                f.write_str(" ")?;
            }
            f.write_str(generator_name(self.p, *generator))?;
            if !e.is_one() {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn generator_name(p: &CentralExtensionPresentation, generator: Generator) -> &str {
    match generator {
        Generator::NonCentral(i) => p.noncentral_name(i),
        Generator::Central(s) => p.central_name(s),
    }
}

fn lookup_generator(p: &CentralExtensionPresentation, name: &str) -> Option<Generator> {
    let index = p.names().iter().position(|n| n == name)?;
    Some(if index < p.k() {
        Generator::NonCentral(index)
    } else {
        Generator::Central(index - p.k())
    })
}

/// Parses whitespace-separated tokens `name` or `name^e`.
pub fn parse_word(p: &CentralExtensionPresentation, text: &str) -> Result<Word, WordError> {
    let mut word = Word::empty();
    for token in text.split_whitespace() {
        let (name, exponent) = match token.split_once('^') {
            Some((name, e)) => {
                let valid = {
                    let digits = e.strip_prefix('-').unwrap_or(e);
                    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
                };
                if !valid {
                    return Err(WordError::BadExponent(token.to_string()));
                }
                let e: BigInt = e
                    .parse()
                    .map_err(|_| WordError::BadExponent(token.to_string()))?;
                (name, e)
            }
            None => (token, BigInt::one()),
        };
        let generator = lookup_generator(p, name)
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
        word.push_power(generator, exponent);
    }
    Ok(word)
}

/// Exponent data of the normal form. `t` holds the torsion coordinates in
/// canonical range `[0, o_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalForm {
    pub x: Vec<BigInt>,
    pub z: Vec<BigInt>,
    pub t: Vec<BigInt>,
}

impl NormalForm {
    pub fn identity(p: &CentralExtensionPresentation) -> Self {
        NormalForm {
            x: vec![BigInt::zero(); p.k()],
            z: vec![BigInt::zero(); p.m()],
            t: vec![BigInt::zero(); p.l()],
        }
    }

    /// `a_1^{x_1} ... a_k^{x_k}` with trivial central part.
    pub fn from_noncentral(p: &CentralExtensionPresentation, x: Vec<BigInt>) -> Self {
        assert_eq!(x.len(), p.k());
        NormalForm { x, ..NormalForm::identity(p) }
    }

    /// Builds a normal form from an `r`-vector of central exponents,
    /// reducing torsion coordinates.
    pub fn from_parts(p: &CentralExtensionPresentation, x: Vec<BigInt>, central: Vec<BigInt>) -> Self {
        assert_eq!(central.len(), p.r());
        let mut central = central.into_iter().enumerate();
        let z = central.by_ref().take(p.m()).map(|(_, v)| v).collect();
        let t = central.map(|(s, v)| p.reduce_central(s, v)).collect();
        NormalForm { x, z, t }
    }

    /// Central exponent `s` over all `r` central generators.
    pub fn central(&self, s: usize) -> &BigInt {
        if s < self.z.len() {
            &self.z[s]
        } else {
            &self.t[s - self.z.len()]
        }
    }

    pub fn central_vec(&self) -> Vec<BigInt> {
        self.z.iter().chain(&self.t).cloned().collect()
    }

    pub fn is_central(&self) -> bool {
        self.x.iter().all(Zero::is_zero)
    }
}

/// Collects `w` into normal form.
///
/// Generators are gathered in ascending index order: every `a_1^{+-1}` is
/// pushed to the left first, then every `a_2^{+-1}`, and so on. Moving
/// `a_g^e` left across `a_j^f` (with `j > g`) uses
/// `a_j^f a_g^e = a_g^e a_j^f [a_j, a_g]^{fe}`, and the commutator is sent
/// to the central tail.
pub fn collect(p: &CentralExtensionPresentation, w: &Word) -> NormalForm {
    let (k, r) = (p.k(), p.r());
    let mut x = vec![BigInt::zero(); k];
    let mut central = vec![BigInt::zero(); r];

    let mut noncentral: Vec<(usize, &BigInt)> = Vec::new();
    for (generator, e) in w.syllables() {
        match *generator {
            Generator::Central(s) => central[s] += e,
            Generator::NonCentral(i) => noncentral.push((i, e)),
        }
    }

    for (g, xg) in x.iter_mut().enumerate() {
        // `passed[s]` = central correction for one `a_g` letter moving past
        // everything of higher index currently to its left.
        let mut passed = vec![BigInt::zero(); r];
        for &(i, e) in &noncentral {
            if i == g {
                *xg += e;
                for (acc, value) in central.iter_mut().zip(&passed) {
                    if !value.is_zero() {
                        *acc += e * value;
                    }
                }
            } else if i > g {
                for (value, gamma) in passed.iter_mut().zip(p.commutator(i, g)) {
                    if !gamma.is_zero() {
                        *value += e * gamma;
                    }
                }
            }
        }
    }
    NormalForm::from_parts(p, x, central)
}

/// Bilinear collection correction for `g h`: the central element produced
/// when `h`'s non-central syllables are moved left past `g`'s.
fn correction(p: &CentralExtensionPresentation, gx: &[BigInt], hx: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.r()];
    for (i, xi) in gx.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in hx.iter().enumerate().take(i) {
            if yj.is_zero() {
                continue;
            }
            let weight = xi * yj;
            for (acc, gamma) in out.iter_mut().zip(p.commutator(i, j)) {
                if !gamma.is_zero() {
                    *acc += &weight * gamma;
                }
            }
        }
    }
    out
}

/// Normal form of `gh`: exponents add, plus `sum_{i>j} x_i y_j [a_i, a_j]`.
pub fn nf_multiply(p: &CentralExtensionPresentation, g: &NormalForm, h: &NormalForm) -> NormalForm {
    let x = g.x.iter().zip(&h.x).map(|(a, b)| a + b).collect();
    let mut central = correction(p, &g.x, &h.x);
    for (s, value) in central.iter_mut().enumerate() {
        *value += g.central(s) + h.central(s);
    }
    NormalForm::from_parts(p, x, central)
}

pub fn nf_invert(p: &CentralExtensionPresentation, g: &NormalForm) -> NormalForm {
    let x: Vec<BigInt> = g.x.iter().map(|v| -v).collect();
    // g * (a^{-x} c^w) = 1  =>  w = -z + sum_{i>j} x_i x_j gamma_ij
    let mut central = correction(p, &g.x, &g.x);
    for (s, value) in central.iter_mut().enumerate() {
        *value -= g.central(s);
    }
    NormalForm::from_parts(p, x, central)
}

/// Normal form of `w^-1 g w`.
pub fn nf_conjugate(p: &CentralExtensionPresentation, g: &NormalForm, w: &NormalForm) -> NormalForm {
    nf_multiply(p, &nf_multiply(p, &nf_invert(p, w), g), w)
}

/// Reads a normal form as a word. Torsion coordinates use whichever of
/// `c^t` and `c^{t-o}` is shorter.
pub fn nf_to_word(p: &CentralExtensionPresentation, g: &NormalForm) -> Word {
    let mut word = Word::empty();
    for (i, e) in g.x.iter().enumerate() {
        word.push_power(Generator::NonCentral(i), e.clone());
    }
    for s in 0..p.r() {
        let value = g.central(s);
        let e = match p.torsion_order(s) {
            Some(order) if value.clone() * 2 > *order => value - order,
            _ => value.clone(),
        };
        word.push_power(Generator::Central(s), e);
    }
    word
}
