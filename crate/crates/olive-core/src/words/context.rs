// SPDX-License-Identifier: Apache-2.0

//! Group contexts and homomorphic evaluation of words.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use super::{Generator, Word};

/// A group given by its operations.
pub trait GroupContext: Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    /// All elements, in a fixed order, for finite contexts.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("generator {0} is not assigned")]
    Unassigned(Generator),
    #[error("context is not enumerable")]
    NotEnumerable,
}

/// A word with generators resolved to slot indices, for repeated evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledWord {
    letters: Vec<(usize, bool)>,
}

impl CompiledWord {
    pub fn new(w: &Word, slot_of: impl Fn(&Generator) -> Option<usize>) -> Result<Self, EvalError> {
        let letters = w
            .letters()
            .iter()
            .map(|l| slot_of(&l.gen).map(|s| (s, l.inverse)).ok_or_else(|| EvalError::Unassigned(l.gen.clone())))
            .collect::<Result<_, _>>()?;
        Ok(CompiledWord { letters })
    }

    pub fn letters(&self) -> &[(usize, bool)] {
        &self.letters
    }

    /// Left fold of the letters; `values[s]` is the value of slot `s`.
    pub fn eval<G: GroupContext + ?Sized>(&self, ctx: &G, values: &[G::Elem]) -> G::Elem {
        let mut acc = ctx.identity();
        for &(s, inverse) in &self.letters {
            acc = if inverse { ctx.mul(&acc, &ctx.inv(&values[s])) } else { ctx.mul(&acc, &values[s]) };
        }
        acc
    }
}

/// Evaluates `w` under `assignment`.
pub fn evaluate<G: GroupContext + ?Sized>(
    w: &Word,
    assignment: &HashMap<Generator, G::Elem>,
    ctx: &G,
) -> Result<G::Elem, EvalError> {
    let mut acc = ctx.identity();
    for l in w.letters() {
        let v = assignment.get(&l.gen).ok_or_else(|| EvalError::Unassigned(l.gen.clone()))?;
        acc = if l.inverse { ctx.mul(&acc, &ctx.inv(v)) } else { ctx.mul(&acc, v) };
    }
    Ok(acc)
}

/// Values for the generators of a word.
pub type Assignment<E> = Vec<(Generator, E)>;

/// Exhaustive search for an assignment of the generators of `w` (in
/// generator order, elements in enumeration order) at which `w` is not the
/// identity. The first one found in lexicographic order is returned.
pub fn find_nonvanishing_witness<G: GroupContext + ?Sized>(w: &Word, ctx: &G) -> Result<Option<Assignment<G::Elem>>, EvalError> {
    let elems = ctx.elements().ok_or(EvalError::NotEnumerable)?;
    let gens: Vec<Generator> = w.generators().into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let compiled = CompiledWord::new(w, |g| gens.iter().position(|h| h == g))?;
    if gens.is_empty() {
        return Ok(None);
    }
    let mut idx = vec![0usize; gens.len()];
    let mut values: Vec<G::Elem> = vec![elems[0].clone(); gens.len()];
    loop {
        if !ctx.is_identity(&compiled.eval(ctx, &values)) {
            return Ok(Some(gens.into_iter().zip(values).collect()));
        }
        // odometer with the last generator fastest
        let mut pos = gens.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < elems.len() {
                values[pos] = elems[idx[pos]].clone();
                break;
            }
            idx[pos] = 0;
            values[pos] = elems[0].clone();
        }
    }
}

/// A permutation of `0..n` as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u8).collect())
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v as usize)
    }
}

/// The symmetric group on `n` points. Products act on the right:
/// `i^(ab) = (i^a)^b`.
#[derive(Clone, Debug)]
pub struct SymmetricGroup {
    n: usize,
}

impl SymmetricGroup {
    pub fn new(n: usize) -> Self {
        assert!((1..=255).contains(&n), "degree out of range");
        SymmetricGroup { n }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn random_element(&self, rng: &mut impl rand::Rng) -> Perm {
        use rand::seq::SliceRandom;
        let mut p: Vec<u8> = (0..self.n as u8).collect();
        p.shuffle(rng);
        Perm(p)
    }
}

impl GroupContext for SymmetricGroup {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        Perm::identity(self.n)
    }

    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        Perm(a.0.iter().map(|&i| b.0[i as usize]).collect())
    }

    fn inv(&self, a: &Perm) -> Perm {
        let mut r = vec![0u8; self.n];
        for (i, &v) in a.0.iter().enumerate() {
            r[v as usize] = i as u8;
        }
        Perm(r)
    }

    fn is_identity(&self, a: &Perm) -> bool {
        a.is_identity()
    }

    /// Lexicographic order of image lists.
    fn elements(&self) -> Option<Vec<Perm>> {
        let mut cur: Vec<u8> = (0..self.n as u8).collect();
        let mut out = vec![Perm(cur.clone())];
        loop {
            let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                return Some(out);
            };
            let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
            out.push(Perm(cur.clone()));
        }
    }
}

/// The cyclic group `Z/n`.
#[derive(Clone, Debug)]
pub struct CyclicGroup {
    n: u32,
}

impl CyclicGroup {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "order must be positive");
        CyclicGroup { n }
    }
}

impl GroupContext for CyclicGroup {
    type Elem = u32;

    fn identity(&self) -> u32 {
        0
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        (a + b) % self.n
    }

    fn inv(&self, a: &u32) -> u32 {
        (self.n - a) % self.n
    }

    fn elements(&self) -> Option<Vec<u32>> {
        Some((0..self.n).collect())
    }
}
