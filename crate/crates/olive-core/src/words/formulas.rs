// SPDX-License-Identifier: Apache-2.0

//! The formulas `φ₀`, `φ₁`, `ψ` over 6-tuples and the forbidden quadruple.

use serde::Serialize;

use super::context::{CompiledWord, EvalError, GroupContext};
use super::{sigma_at, Generator, Letter, SigmaVariant, Word};

/// Tuple width `m`.
pub const TUPLE_WIDTH: usize = 6;

const TUPLE_NAMES: [char; 3] = ['x', 'y', 'z'];

/// The variable for component `k` of tuple `t` (`t = 0, 1, 2` for `x̄, ȳ, z̄`).
pub fn tuple_var(t: usize, k: usize) -> Generator {
    assert!(t < 3 && k < TUPLE_WIDTH, "tuple variable out of range");
    Generator::Var(format!("{}{k}", TUPLE_NAMES[t]))
}

fn tuple_slot(g: &Generator) -> Option<usize> {
    let Generator::Var(name) = g else { return None };
    let mut chars = name.chars();
    let first = chars.next()?;
    let t = TUPLE_NAMES.iter().position(|&c| c == first)?;
    let rest = chars.as_str();
    let k: usize = if rest.len() == 1 { rest.parse().ok()? } else { return None };
    (k < TUPLE_WIDTH).then_some(t * TUPLE_WIDTH + k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AtomKind {
    Eq,
    Neq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicFormula {
    pub lhs: Word,
    pub rhs: Word,
    pub kind: AtomKind,
}

/// A conjunction of atoms over the tuple variables `x̄, ȳ, z̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaSpec {
    pub name: &'static str,
    pub arity: usize,
    pub atoms: Vec<AtomicFormula>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("tuple {index} has length {len}, expected {TUPLE_WIDTH}")]
    TupleLength { index: usize, len: usize },
    #[error("formula {0} expects {1} tuples")]
    Arity(&'static str, usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn v(t: usize, k: usize) -> Word {
    Word::gen(tuple_var(t, k))
}

fn conj(c: &Word, g: &Word) -> Word {
    Word::product([&c.inverse(), g, c])
}

impl FormulaSpec {
    /// `y₅⁻¹ x₀ y₅ = x₂`.
    pub fn phi0() -> Self {
        FormulaSpec {
            name: "phi0",
            arity: 2,
            atoms: vec![AtomicFormula { lhs: conj(&v(1, 5), &v(0, 0)), rhs: v(0, 2), kind: AtomKind::Eq }],
        }
    }

    /// `x₅⁻¹ y₁ x₅ = y₃ ∧ x₅⁻¹ y₄ x₅ = y₄`.
    pub fn phi1() -> Self {
        FormulaSpec {
            name: "phi1",
            arity: 2,
            atoms: vec![
                AtomicFormula { lhs: conj(&v(0, 5), &v(1, 1)), rhs: v(1, 3), kind: AtomKind::Eq },
                AtomicFormula { lhs: conj(&v(0, 5), &v(1, 4)), rhs: v(1, 4), kind: AtomKind::Eq },
            ],
        }
    }

    /// `σ*(x₀, y₁, z₄) = e ∧ σ*(x₂, y₃, z₄) ≠ e`.
    pub fn psi(variant: SigmaVariant) -> Self {
        FormulaSpec {
            name: "psi",
            arity: 3,
            atoms: vec![
                AtomicFormula { lhs: sigma_at(variant, &v(0, 0), &v(1, 1), &v(2, 4)), rhs: Word::empty(), kind: AtomKind::Eq },
                AtomicFormula { lhs: sigma_at(variant, &v(0, 2), &v(1, 3), &v(2, 4)), rhs: Word::empty(), kind: AtomKind::Neq },
            ],
        }
    }

    /// `φ_ι` for a ladder colour `ι`.
    pub fn phi(iota: usize) -> Self {
        match iota {
            0 => FormulaSpec::phi0(),
            1 => FormulaSpec::phi1(),
            _ => panic!("no formula for colour {iota}"),
        }
    }

    /// Each atom as the single word `lhs · rhs⁻¹`, with tuple `t` of the
    /// formula replaced by `args[t]`.
    pub fn instantiate(&self, args: &[&dyn Fn(usize) -> Word]) -> Vec<(Word, AtomKind)> {
        assert_eq!(args.len(), self.arity);
        self.atoms
            .iter()
            .map(|a| {
                let w = a.lhs.concat(&a.rhs.inverse()).substitute(|g| {
                    let s = tuple_slot(g)?;
                    Some(args[s / TUPLE_WIDTH](s % TUPLE_WIDTH))
                });
                (w, a.kind)
            })
            .collect()
    }

    pub fn compile(&self) -> CompiledFormula {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let w = a.lhs.concat(&a.rhs.inverse());
                (CompiledWord::new(&w, tuple_slot).expect("formula variables are tuple variables"), a.kind)
            })
            .collect();
        CompiledFormula { name: self.name, arity: self.arity, atoms }
    }
}

/// A formula with variables resolved to slots `t * 6 + k`.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    pub name: &'static str,
    pub arity: usize,
    atoms: Vec<(CompiledWord, AtomKind)>,
}

impl CompiledFormula {
    pub fn atoms(&self) -> &[(CompiledWord, AtomKind)] {
        &self.atoms
    }

    pub fn holds<G: GroupContext + ?Sized>(&self, ctx: &G, args: &[&[G::Elem]]) -> Result<bool, FormulaError> {
        if args.len() != self.arity {
            return Err(FormulaError::Arity(self.name, self.arity));
        }
        for (i, a) in args.iter().enumerate() {
            if a.len() != TUPLE_WIDTH {
                return Err(FormulaError::TupleLength { index: i, len: a.len() });
            }
        }
        let values: Vec<G::Elem> = args.iter().flat_map(|a| a.iter().cloned()).collect();
        Ok(self.atoms.iter().all(|(w, kind)| {
            let trivial = ctx.is_identity(&w.eval(ctx, &values));
            trivial == (*kind == AtomKind::Eq)
        }))
    }
}

/// Truth values of the four formulas of the forbidden quadruple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaReport {
    pub phi0_01: bool,
    pub phi1_12: bool,
    pub phi1_13: bool,
    pub psi_023: bool,
}

impl FormulaReport {
    pub fn all(&self) -> bool {
        self.phi0_01 && self.phi1_12 && self.phi1_13 && self.psi_023
    }
}

/// Evaluates `φ₀[ā₀,ā₁]`, `φ₁[ā₁,ā₂]`, `φ₁[ā₁,ā₃]` and `ψ[ā₀,ā₂,ā₃]`.
pub fn check_formulas<G: GroupContext + ?Sized>(
    ctx: &G,
    tuples: [&[G::Elem]; 4],
    variant: SigmaVariant,
) -> Result<FormulaReport, FormulaError> {
    let [a0, a1, a2, a3] = tuples;
    let (p0, p1, psi) = (FormulaSpec::phi0().compile(), FormulaSpec::phi1().compile(), FormulaSpec::psi(variant).compile());
    for (i, t) in tuples.iter().enumerate() {
        if t.len() != TUPLE_WIDTH {
            return Err(FormulaError::TupleLength { index: i, len: t.len() });
        }
    }
    Ok(FormulaReport {
        phi0_01: p0.holds(ctx, &[a0, a1])?,
        phi1_12: p1.holds(ctx, &[a1, a2])?,
        phi1_13: p1.holds(ctx, &[a1, a3])?,
        psi_023: psi.holds(ctx, &[a0, a2, a3])?,
    })
}

/// `c⁻¹ g c = h` with single-letter `c`, `g`, `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugationRule {
    pub conjugator: Generator,
    pub source: Generator,
    pub target: Generator,
}

fn a(l: usize, k: usize) -> Word {
    Word::gen(Generator::X { alpha: l, k })
}

/// The conjugation rules supplied by the hypotheses `φ₀[ā₀,ā₁]`,
/// `φ₁[ā₁,ā₂]`, `φ₁[ā₁,ā₃]`, where `ā_ℓ = (a_{ℓ,0}, …, a_{ℓ,5})`.
pub fn conjugation_rules() -> Vec<ConjugationRule> {
    let tuple = |l: usize| move |k: usize| a(l, k);
    let (t0, t1, t2, t3) = (tuple(0), tuple(1), tuple(2), tuple(3));
    let mut atoms = FormulaSpec::phi0().instantiate(&[&t0, &t1]);
    atoms.extend(FormulaSpec::phi1().instantiate(&[&t1, &t2]));
    atoms.extend(FormulaSpec::phi1().instantiate(&[&t1, &t3]));
    atoms
        .into_iter()
        .filter_map(|(w, kind)| {
            // c⁻¹ g c h⁻¹
            let l = w.letters();
            let single = |x: &Letter, inv: bool| (x.inverse == inv).then(|| x.gen.clone());
            if kind != AtomKind::Eq || l.len() != 4 || l[0].gen != l[2].gen || !l[0].inverse {
                return None;
            }
            Some(ConjugationRule {
                conjugator: single(&l[2], false)?,
                source: single(&l[1], false)?,
                target: single(&l[3], true)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicCertificate {
    pub pass: bool,
    /// Conjugation by `c` respects concatenation on the sampled words.
    pub homomorphism: bool,
    pub start: String,
    pub rewritten: String,
    pub target: String,
    /// The first letter no rule covers, when rewriting blocks.
    pub blocked_at: Option<String>,
}

/// Mechanises the argument that the forbidden quadruple cannot occur:
/// conjugation by `a_{1,5}` maps `σ*(a_{0,0}, a_{2,1}, a_{3,4})` to
/// `σ*(a_{0,2}, a_{2,3}, a_{3,4})`, using only the hypothesis equations.
pub fn symbolic_certificate(sigma: &Word) -> SymbolicCertificate {
    symbolic_certificate_with_rules(sigma, &conjugation_rules())
}

pub fn symbolic_certificate_with_rules(sigma: &Word, rules: &[ConjugationRule]) -> SymbolicCertificate {
    let c = Word::gen(Generator::X { alpha: 1, k: 5 });
    let start = super::substitute_xyz(sigma, &a(0, 0), &a(2, 1), &a(3, 4));
    let target = super::substitute_xyz(sigma, &a(0, 2), &a(2, 3), &a(3, 4)).reduce();
    let homomorphism = conjugation_is_homomorphism(&c) && {
        // g(start) equals the product of the letterwise images
        let factors: Vec<Word> = start.letters().iter().map(|l| conj(&c, &Word::from_letters(vec![l.clone()]))).collect();
        Word::product(&factors).reduce() == conj(&c, &start).reduce()
    };
    let mut rewritten = Vec::new();
    let mut blocked_at = None;
    for l in start.letters() {
        let rule = rules.iter().find(|r| Word::gen(r.conjugator.clone()) == c && r.source == l.gen);
        match rule {
            Some(r) => rewritten.push(Letter::new(r.target.clone(), l.inverse)),
            None => {
                blocked_at = Some(l.gen.to_string());
                break;
            }
        }
    }
    let rewritten = Word::from_letters(rewritten).reduce();
    let pass = homomorphism && blocked_at.is_none() && rewritten == target;
    SymbolicCertificate {
        pass,
        homomorphism,
        start: start.reduce().to_string(),
        rewritten: if blocked_at.is_some() { String::new() } else { rewritten.to_string() },
        target: target.to_string(),
        blocked_at,
    }
}

/// `c⁻¹ (uv) c = (c⁻¹ u c)(c⁻¹ v c)` after free reduction, on a fixed
/// family of words over the 24 generators `a_{ℓ,k}`.
fn conjugation_is_homomorphism(c: &Word) -> bool {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x58);
    let word = |rng: &mut rand_chacha::ChaCha8Rng| {
        let n = rng.gen_range(0..12);
        Word::from_letters(
            (0..n)
                .map(|_| Letter::new(Generator::X { alpha: rng.gen_range(0..4), k: rng.gen_range(0..TUPLE_WIDTH) }, rng.gen()))
                .collect(),
        )
    };
    (0..256).all(|_| {
        let (u, v) = (word(&mut rng), word(&mut rng));
        conj(c, &u.concat(&v)).reduce() == conj(c, &u).concat(&conj(c, &v)).reduce()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{sigma_star, SymmetricGroup};

    #[test]
    fn rules_from_hypotheses() {
        let rules = conjugation_rules();
        let x = |l, k| Generator::X { alpha: l, k };
        assert_eq!(rules.len(), 5);
        assert!(rules.iter().all(|r| r.conjugator == x(1, 5)));
        let pairs: Vec<_> = rules.iter().map(|r| (r.source.clone(), r.target.clone())).collect();
        assert!(pairs.contains(&(x(0, 0), x(0, 2))));
        assert!(pairs.contains(&(x(2, 1), x(2, 3))));
        assert!(pairs.contains(&(x(3, 4), x(3, 4))));
    }

    #[test]
    fn certificate_variants() {
        assert!(symbolic_certificate(&sigma_star(SigmaVariant::Repaired)).pass);
        assert!(symbolic_certificate(&sigma_star(SigmaVariant::PaperLiteral)).pass);
        assert!(symbolic_certificate(&Word::var("z")).pass);
        let rules: Vec<_> = conjugation_rules().into_iter().filter(|r| r.source != Generator::X { alpha: 2, k: 1 }).collect();
        let cert = symbolic_certificate_with_rules(&sigma_star(SigmaVariant::Repaired), &rules);
        assert!(!cert.pass);
        assert_eq!(cert.blocked_at.as_deref(), Some("x2_1"));
    }

    #[test]
    fn identity_tuples_fail_psi() {
        let s3 = SymmetricGroup::new(3);
        let id = vec![s3.identity(); 6];
        let r = check_formulas(&s3, [&id, &id, &id, &id], SigmaVariant::Repaired).unwrap();
        assert!(r.phi0_01 && r.phi1_12 && r.phi1_13);
        assert!(!r.psi_023);
        let short = vec![s3.identity(); 5];
        assert_eq!(
            check_formulas(&s3, [&id, &short, &id, &id], SigmaVariant::Repaired),
            Err(FormulaError::TupleLength { index: 1, len: 5 })
        );
    }

    #[test]
    fn slots() {
        assert_eq!(tuple_slot(&tuple_var(2, 4)), Some(16));
        assert_eq!(tuple_slot(&Generator::var("x6")), None);
        assert_eq!(tuple_slot(&Generator::var("w0")), None);
    }
}
