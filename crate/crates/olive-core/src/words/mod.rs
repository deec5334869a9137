// SPDX-License-Identifier: Apache-2.0

//! Free-group words over typed generators.
//!
//! Words are stored unreduced; [`Word::reduce`] gives the free normal form.
//! The commutator convention throughout the crate is `[u, v] = u⁻¹ v⁻¹ u v`.

mod context;
mod formulas;

pub use context::{
    evaluate, find_nonvanishing_witness, CompiledWord, CyclicGroup, EvalError, GroupContext, Perm, SymmetricGroup,
};
pub use formulas::{
    check_formulas, conjugation_rules, symbolic_certificate, symbolic_certificate_with_rules, tuple_var, AtomKind, AtomicFormula,
    CompiledFormula, ConjugationRule, FormulaError, FormulaReport, FormulaSpec, SymbolicCertificate, TUPLE_WIDTH,
};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kgroup::SPair;

/// A typed free generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    /// A named variable, e.g. `x`, `y0`.
    Var(String),
    /// `x_{α,k}`: component `k` of the tuple attached to ladder index `α`.
    X {
        alpha: usize,
        k: usize,
    },
    /// `y_{j,ℓ}`: generator of level `j` in the tiered group.
    Y {
        level: usize,
        index: usize,
    },
    /// The formal conjugator `z_s`.
    Z(SPair),
    Opaque(u32),
}

impl Generator {
    pub fn var(name: &str) -> Self {
        Generator::Var(name.to_owned())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Var(name) => f.write_str(name),
            Generator::X { alpha, k } => write!(f, "x{alpha}_{k}"),
            Generator::Y { level, index } => write!(f, "y{level}_{index}"),
            Generator::Z(s) => write!(f, "z{}", s.tag()),
            Generator::Opaque(id) => write!(f, "o{id}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: Generator, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inverted(&self) -> Letter {
        Letter { gen: self.gen.clone(), inverse: !self.inverse }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A group word: a sequence of signed generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty token")]
    EmptyToken,
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("invalid exponent in {0:?}; only ^-1 is allowed")]
    InvalidExponent(String),
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn gen(g: Generator) -> Self {
        Word { letters: vec![Letter::new(g, false)] }
    }

    pub fn var(name: &str) -> Self {
        Word::gen(Generator::var(name))
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(Letter::inverted).collect() }
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn product<'a>(words: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut letters = Vec::new();
        for w in words {
            letters.extend_from_slice(&w.letters);
        }
        Word { letters }
    }

    /// Free reduction (stack based).
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            if out.last().is_some_and(|top| top.cancels(l)) {
                out.pop();
            } else {
                out.push(l.clone());
            }
        }
        Word { letters: out }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| !p[0].cancels(&p[1]))
    }

    /// Positions `i` such that letters `i` and `i + 1` cancel.
    pub fn cancellation_sites(&self) -> Vec<usize> {
        self.letters.windows(2).enumerate().filter(|(_, p)| p[0].cancels(&p[1])).map(|(i, _)| i).collect()
    }

    /// Removes the cancelling pair at `i`.
    pub fn cancel_at(&self, i: usize) -> Word {
        assert!(self.letters[i].cancels(&self.letters[i + 1]), "no cancelling pair at {i}");
        let mut letters = self.letters.clone();
        letters.drain(i..i + 2);
        Word { letters }
    }

    /// Replaces every generator for which `f` returns a word; other letters
    /// are kept. The result is not reduced.
    pub fn substitute(&self, f: impl Fn(&Generator) -> Option<Word>) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            match f(&l.gen) {
                Some(w) if l.inverse => letters.extend(w.inverse().letters),
                Some(w) => letters.extend(w.letters),
                None => letters.push(l.clone()),
            }
        }
        Word { letters }
    }

    /// Generators occurring in the word.
    pub fn generators(&self) -> BTreeSet<Generator> {
        self.letters.iter().map(|l| l.gen.clone()).collect()
    }

    /// Parses whitespace-separated generator names, each with an optional
    /// `^-1` suffix. Names `x<α>_<k>` and `y<j>_<ℓ>` become typed
    /// generators; any other identifier is a variable.
    pub fn parse(text: &str) -> Result<Word, ParseError> {
        text.split_whitespace().map(parse_letter).collect::<Result<Vec<_>, _>>().map(Word::from_letters)
    }
}

fn parse_letter(tok: &str) -> Result<Letter, ParseError> {
    let (name, inverse) = match tok.split_once('^') {
        Some((name, "-1")) => (name, true),
        Some(_) => return Err(ParseError::InvalidExponent(tok.to_owned())),
        None => (tok, false),
    };
    if name.is_empty() {
        return Err(ParseError::EmptyToken);
    }
    let ident_ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !ident_ok {
        return Err(ParseError::InvalidName(name.to_owned()));
    }
    Ok(Letter::new(typed_generator(name), inverse))
}

fn typed_generator(name: &str) -> Generator {
    let indexed = |prefix: char| -> Option<(usize, usize)> {
        let rest = name.strip_prefix(prefix)?;
        let (a, b) = rest.split_once('_')?;
        let canonical = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
        if !canonical(a) || !canonical(b) {
            return None;
        }
        Some((a.parse().ok()?, b.parse().ok()?))
    };
    if let Some((alpha, k)) = indexed('x') {
        Generator::X { alpha, k }
    } else if let Some((level, index)) = indexed('y') {
        Generator::Y { level, index }
    } else {
        Generator::Var(name.to_owned())
    }
}

impl FromStr for Word {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", l.gen)?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// `[u, v] = u⁻¹ v⁻¹ u v`, reduced.
pub fn commutator(u: &Word, v: &Word) -> Word {
    Word::product([&u.inverse(), &v.inverse(), u, v]).reduce()
}

/// Which word plays the role of `σ*(x, y, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaVariant {
    /// `[[x, y], [x, z]]`.
    #[default]
    Repaired,
    /// `[[x, y], z]`.
    PaperLiteral,
    /// `(x⁻¹ y⁻¹ x⁻¹ y)⁻¹ z⁻¹ (x⁻¹ y⁻¹ x y) z`, letter for letter.
    RawPrinted,
}

impl SigmaVariant {
    pub const ALL: [SigmaVariant; 3] = [SigmaVariant::Repaired, SigmaVariant::PaperLiteral, SigmaVariant::RawPrinted];

    pub fn name(self) -> &'static str {
        match self {
            SigmaVariant::Repaired => "repaired",
            SigmaVariant::PaperLiteral => "paper-literal",
            SigmaVariant::RawPrinted => "raw-printed",
        }
    }
}

impl fmt::Display for SigmaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown sigma variant {0:?} (expected repaired, paper-literal or raw-printed)")]
pub struct UnknownVariant(pub String);

impl FromStr for SigmaVariant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SigmaVariant::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| UnknownVariant(s.to_owned()))
    }
}

/// `σ*` as a word in the variables `x`, `y`, `z`.
pub fn sigma_star(variant: SigmaVariant) -> Word {
    let (x, y, z) = (Word::var("x"), Word::var("y"), Word::var("z"));
    match variant {
        SigmaVariant::Repaired => commutator(&commutator(&x, &y), &commutator(&x, &z)),
        SigmaVariant::PaperLiteral => commutator(&commutator(&x, &y), &z),
        SigmaVariant::RawPrinted => {
            let head = Word::product([&x.inverse(), &y.inverse(), &x.inverse(), &y]);
            let tail = Word::product([&x.inverse(), &y.inverse(), &x, &y]);
            Word::product([&head.inverse(), &z.inverse(), &tail, &z])
        }
    }
}

/// `σ*(a, b, c)`: substitutes `a, b, c` for `x, y, z` (unreduced).
pub fn sigma_at(variant: SigmaVariant, a: &Word, b: &Word, c: &Word) -> Word {
    substitute_xyz(&sigma_star(variant), a, b, c)
}

pub fn substitute_xyz(w: &Word, a: &Word, b: &Word, c: &Word) -> Word {
    w.substitute(|g| match g {
        Generator::Var(n) if n == "x" => Some(a.clone()),
        Generator::Var(n) if n == "y" => Some(b.clone()),
        Generator::Var(n) if n == "z" => Some(c.clone()),
        _ => None,
    })
}

/// True iff substituting the identity for `v` freely reduces `w` to the
/// empty word. This certifies `w = e` whenever `v = e`, in every group.
pub fn verify_vanishing(w: &Word, v: &Generator) -> bool {
    w.substitute(|g| (g == v).then(Word::empty)).reduce().is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(w("a a^-1").reduce().is_empty());
        assert_eq!(w("a b b^-1 a").reduce(), w("a a"));
        assert_eq!(w("a^-1 b a a^-1 b^-1 a").reduce(), Word::empty());
    }

    #[test]
    fn commutator_examples() {
        let (a, b) = (w("a"), w("b"));
        assert!(commutator(&a, &a).is_empty());
        assert!(commutator(&a, &Word::empty()).is_empty());
        assert_eq!(commutator(&a, &b), w("a^-1 b^-1 a b"));
    }

    #[test]
    fn sigma_shapes() {
        let rep = sigma_star(SigmaVariant::Repaired);
        assert!(rep.is_reduced() && !rep.is_empty());
        let lit = sigma_star(SigmaVariant::PaperLiteral);
        assert_eq!(lit, w("y^-1 x^-1 y x z^-1 x^-1 y^-1 x y z"));
        let raw = sigma_star(SigmaVariant::RawPrinted);
        assert_eq!(raw, w("y^-1 x y x z^-1 x^-1 y^-1 x y z"));
        let e = Word::empty();
        assert!(substitute_xyz(&rep, &e, &w("y"), &w("z")).reduce().is_empty());
        let raw_z = substitute_xyz(&raw, &w("x"), &w("y"), &e).reduce();
        assert_eq!(raw_z, w("y^-1 x x y"));
    }

    #[test]
    fn vanishing_certificates() {
        let rep = sigma_star(SigmaVariant::Repaired);
        let lit = sigma_star(SigmaVariant::PaperLiteral);
        let raw = sigma_star(SigmaVariant::RawPrinted);
        for v in ["x", "y", "z"] {
            assert!(verify_vanishing(&rep, &Generator::var(v)));
            assert!(verify_vanishing(&lit, &Generator::var(v)));
        }
        assert!(verify_vanishing(&raw, &Generator::var("x")));
        assert!(!verify_vanishing(&raw, &Generator::var("y")));
        assert!(!verify_vanishing(&raw, &Generator::var("z")));
        // A variable that does not occur leaves the word untouched.
        assert!(!verify_vanishing(&rep, &Generator::var("w")));
    }

    #[test]
    fn parse_errors_and_typed_names() {
        assert_eq!(Word::parse("x^2"), Err(ParseError::InvalidExponent("x^2".into())));
        assert_eq!(Word::parse("^-1"), Err(ParseError::EmptyToken));
        assert!(matches!(Word::parse("3a"), Err(ParseError::InvalidName(_))));
        let t = w("x3_4^-1 y0_12 x01_2");
        assert_eq!(t.letters()[0], Letter::new(Generator::X { alpha: 3, k: 4 }, true));
        assert_eq!(t.letters()[1].gen, Generator::Y { level: 0, index: 12 });
        assert_eq!(t.letters()[2].gen, Generator::var("x01_2"));
        assert_eq!(Word::parse("   ").unwrap(), Word::empty());
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        proptest::collection::vec((0u8..4, any::<bool>()), 0..40).prop_map(|v| {
            Word::from_letters(
                v.into_iter().map(|(g, inv)| Letter::new(Generator::var(["a", "b", "c", "d"][g as usize]), inv)).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_shortening(word in arb_word()) {
            let r = word.reduce();
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.reduce(), r.clone());
            prop_assert!(r.len() <= word.len());
            prop_assert_eq!((word.len() - r.len()) % 2, 0);
        }

        #[test]
        fn reduction_is_confluent(word in arb_word(), seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut cur = word.clone();
            loop {
                let sites = cur.cancellation_sites();
                let Some(&i) = sites.choose(&mut rng) else { break };
                cur = cur.cancel_at(i);
                if rng.gen_bool(0.1) {
                    // reduce from a random intermediate state as well
                    prop_assert_eq!(cur.reduce(), word.reduce());
                }
            }
            prop_assert_eq!(cur, word.reduce());
        }

        #[test]
        fn display_parse_round_trip(word in arb_word()) {
            let text = word.to_string();
            let back = if word.is_empty() { Word::empty() } else { Word::parse(&text).unwrap() };
            prop_assert_eq!(back, word);
        }

        #[test]
        fn inverse_cancels(word in arb_word()) {
            prop_assert!(word.concat(&word.inverse()).reduce().is_empty());
        }
    }
}
