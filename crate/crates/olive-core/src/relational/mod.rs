// SPDX-License-Identifier: Apache-2.0

//! Finite structures over `{P, Q₀, Q₁}` and the universal class of those
//! omitting the forbidden structure `N*_{η,k̄}`.
//!
//! `P` is binary and `Q_ι` has arity `k_ι + 1`. Embeddings are induced:
//! injective, and both preserving and reflecting every relation.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ladder::{Ladder, LadderError};
use crate::par::{self, Exec};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RelError {
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("not an induced substructure: {0}")]
    NotInduced(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Ladder(#[from] LadderError),
}

/// `(η, k̄)` with `η ∈ ⁿ2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OliveSignature {
    pub eta: Vec<u8>,
    pub k: [usize; 2],
}

impl OliveSignature {
    pub fn new(eta: Vec<u8>, k: [usize; 2]) -> Result<Self, RelError> {
        let s = OliveSignature { eta, k };
        s.validate()?;
        Ok(s)
    }

    /// `η = (0,1,0,1)`, `k̄ = (2,2)`.
    pub fn default_test() -> Self {
        OliveSignature { eta: vec![0, 1, 0, 1], k: [2, 2] }
    }

    pub fn n(&self) -> usize {
        self.eta.len()
    }

    pub fn arity(&self, iota: usize) -> usize {
        self.k[iota] + 1
    }

    /// `η⁻¹{ι}` in increasing order.
    pub fn positions(&self, iota: u8) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.eta[i] == iota).collect()
    }

    /// The printed constraints: `η(0) = 0`, `η⁻¹{0}` not an initial
    /// segment, `|η⁻¹{ι}| ≥ k_ι ≥ 1` and `n ≥ k₀ + k₁ ≥ 3`.
    pub fn validate(&self) -> Result<(), RelError> {
        let bad = |m: &str| Err(RelError::Signature(m.to_owned()));
        if self.eta.iter().any(|&v| v > 1) {
            return bad("eta takes values in {0, 1}");
        }
        if self.eta.first() != Some(&0) {
            return bad("eta(0) must be 0");
        }
        let zeros = self.positions(0);
        if zeros.iter().enumerate().all(|(i, &p)| i == p) {
            return bad("the zeros of eta form an initial segment");
        }
        for iota in 0..2 {
            if self.k[iota] < 1 || self.positions(iota as u8).len() < self.k[iota] {
                return bad(&format!("need |eta^-1{{{iota}}}| >= k_{iota} >= 1"));
            }
        }
        let sum = self.k[0] + self.k[1];
        if sum < 3 || self.n() < sum {
            return bad("need n >= k0 + k1 >= 3");
        }
        Ok(())
    }

    /// The printed constraints plus `k_ι ≥ 2`, required for the class checks.
    pub fn validate_relational(&self) -> Result<(), RelError> {
        self.validate()?;
        if self.k.iter().any(|&k| k < 2) {
            return Err(RelError::Signature("the relational checks need k_0, k_1 >= 2".to_owned()));
        }
        Ok(())
    }
}

/// A finite `{P, Q₀, Q₁}`-structure on `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StructureFile", into = "StructureFile")]
pub struct FinStructure {
    pub signature: OliveSignature,
    pub universe: usize,
    pub p: BTreeSet<(usize, usize)>,
    pub q: [BTreeSet<Vec<usize>>; 2],
}

#[derive(Serialize, Deserialize)]
struct StructureFile {
    signature: OliveSignature,
    universe: usize,
    #[serde(rename = "P")]
    p: Vec<[usize; 2]>,
    #[serde(rename = "Q0")]
    q0: Vec<Vec<usize>>,
    #[serde(rename = "Q1")]
    q1: Vec<Vec<usize>>,
}

impl TryFrom<StructureFile> for FinStructure {
    type Error = RelError;

    fn try_from(f: StructureFile) -> Result<Self, RelError> {
        let s = FinStructure {
            signature: f.signature,
            universe: f.universe,
            p: f.p.into_iter().map(|[a, b]| (a, b)).collect(),
            q: [f.q0.into_iter().collect(), f.q1.into_iter().collect()],
        };
        s.check()?;
        Ok(s)
    }
}

impl From<FinStructure> for StructureFile {
    fn from(s: FinStructure) -> Self {
        let [q0, q1] = s.q;
        StructureFile {
            signature: s.signature,
            universe: s.universe,
            p: s.p.into_iter().map(|(a, b)| [a, b]).collect(),
            q0: q0.into_iter().collect(),
            q1: q1.into_iter().collect(),
        }
    }
}

impl FinStructure {
    pub fn empty(signature: OliveSignature, universe: usize) -> Self {
        FinStructure { signature, universe, p: BTreeSet::new(), q: [BTreeSet::new(), BTreeSet::new()] }
    }

    /// Indices in range and arities matching the signature.
    pub fn check(&self) -> Result<(), RelError> {
        let n = self.universe;
        if let Some(&(a, b)) = self.p.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(RelError::Structure(format!("P tuple ({a}, {b}) out of range")));
        }
        for iota in 0..2 {
            for t in &self.q[iota] {
                if t.len() != self.signature.arity(iota) {
                    return Err(RelError::Structure(format!("Q{iota} tuple {t:?} has the wrong arity")));
                }
                if t.iter().any(|&x| x >= n) {
                    return Err(RelError::Structure(format!("Q{iota} tuple {t:?} out of range")));
                }
            }
        }
        Ok(())
    }

    /// The substructure induced on `points`, renumbered in the given order.
    pub fn restrict(&self, points: &[usize]) -> FinStructure {
        let mut pos = vec![None; self.universe];
        for (i, &x) in points.iter().enumerate() {
            pos[x] = Some(i);
        }
        let map_t = |t: &[usize]| t.iter().map(|&x| pos[x]).collect::<Option<Vec<_>>>();
        FinStructure {
            signature: self.signature.clone(),
            universe: points.len(),
            p: self.p.iter().filter_map(|&(a, b)| Some((pos[a]?, pos[b]?))).collect(),
            q: [0, 1].map(|i| self.q[i].iter().filter_map(|t| map_t(t)).collect()),
        }
    }

    /// Whether `f` (indexed by the points of `sub`) is an induced embedding.
    pub fn is_embedding(sub: &FinStructure, sup: &FinStructure, f: &[usize]) -> bool {
        if f.len() != sub.universe || f.iter().any(|&x| x >= sup.universe) {
            return false;
        }
        let distinct: BTreeSet<_> = f.iter().collect();
        distinct.len() == f.len() && sup.restrict(f) == *sub
    }

    /// Tuples per relation, indexed by each element they contain.
    fn incidence(&self) -> Vec<Vec<(u8, Vec<usize>)>> {
        let mut inc: Vec<Vec<(u8, Vec<usize>)>> = vec![Vec::new(); self.universe];
        let mut add = |rel: u8, t: Vec<usize>| {
            let els: BTreeSet<usize> = t.iter().copied().collect();
            for x in els {
                inc[x].push((rel, t.clone()));
            }
        };
        for &(a, b) in &self.p {
            add(0, vec![a, b]);
        }
        for iota in 0..2 {
            for t in &self.q[iota] {
                add(1 + iota as u8, t.clone());
            }
        }
        inc
    }

    fn holds(&self, rel: u8, t: &[usize]) -> bool {
        match rel {
            0 => self.p.contains(&(t[0], t[1])),
            r => self.q[(r - 1) as usize].contains(t),
        }
    }
}

/// `N*_{η,k̄}` on `{0, …, n}`: every increasing pair in `P`, and in `Q_ι`
/// the tuples `(ℓ₀, …, ℓ_{k−1}, ℓ)` with `k = k_ι ≥ 2`, `ℓ_i ∈ η⁻¹{ι}`
/// increasing and `ℓ_{k−1} < ℓ ≤ n`.
pub fn build_nstar(sig: &OliveSignature) -> Result<FinStructure, RelError> {
    sig.validate()?;
    let n = sig.n();
    let mut s = FinStructure::empty(sig.clone(), n + 1);
    for j in 0..=n {
        for i in 0..j {
            s.p.insert((i, j));
        }
    }
    for iota in 0..2 {
        let k = sig.k[iota];
        if k < 2 {
            continue;
        }
        for head in combinations(&sig.positions(iota as u8), k) {
            for l in head[k - 1] + 1..=n {
                let mut t = head.clone();
                t.push(l);
                s.q[iota].insert(t);
            }
        }
    }
    Ok(s)
}

/// Increasing `k`-subsets of `items`, lexicographically.
pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut cur, &mut out);
    out
}

/// An induced embedding of `a` into `b`, by backtracking over the points
/// of `a` in order. The first one in lexicographic order of images.
pub fn embeds(a: &FinStructure, b: &FinStructure) -> Result<Option<Vec<usize>>, RelError> {
    if a.signature != b.signature {
        return Err(RelError::SignatureMismatch);
    }
    if a.universe > b.universe {
        return Ok(None);
    }
    let inc_a = a.incidence();
    let inc_b = b.incidence();
    let mut f = vec![usize::MAX; a.universe];
    let mut finv = vec![usize::MAX; b.universe];
    fn go(
        x: usize,
        a: &FinStructure,
        b: &FinStructure,
        inc_a: &[Vec<(u8, Vec<usize>)>],
        inc_b: &[Vec<(u8, Vec<usize>)>],
        f: &mut Vec<usize>,
        finv: &mut Vec<usize>,
    ) -> bool {
        if x == a.universe {
            return true;
        }
        for y in 0..b.universe {
            if finv[y] != usize::MAX {
                continue;
            }
            f[x] = y;
            finv[y] = x;
            // tuples through x whose points are all assigned must map into b
            let forward = inc_a[x].iter().all(|(r, t)| {
                if t.iter().any(|&u| u > x) {
                    return true;
                }
                let img: Vec<usize> = t.iter().map(|&u| f[u]).collect();
                b.holds(*r, &img)
            });
            // tuples of b through y inside the image must come from a
            let backward = forward
                && inc_b[y].iter().all(|(r, t)| {
                    let pre: Option<Vec<usize>> = t.iter().map(|&v| (finv[v] != usize::MAX).then_some(finv[v])).collect();
                    pre.is_none_or(|pre| a.holds(*r, &pre))
                });
            if backward && go(x + 1, a, b, inc_a, inc_b, f, finv) {
                return true;
            }
            finv[y] = usize::MAX;
            f[x] = usize::MAX;
        }
        false
    }
    Ok(go(0, a, b, &inc_a, &inc_b, &mut f, &mut finv).then_some(f))
}

/// Whether `m` omits `N*` (membership in `T⁰`).
pub fn omits_nstar(m: &FinStructure) -> Result<bool, RelError> {
    Ok(embeds(&build_nstar(&m.signature)?, m)?.is_none())
}

/// The model of a ladder: universe `λ`, `P` the increasing pairs, `Q_ι`
/// the increasing tuples `(α₀, …, α_{k−1}, β)` with `k = k_ι ≥ 2` and
/// `f_β` constantly `ι` on `[α₀, α_{k−1}]`.
pub fn model_from_ladder(ladder: &Ladder, sig: &OliveSignature) -> Result<FinStructure, RelError> {
    if ladder.iota() != 2 {
        return Err(LadderError::NotBinary(ladder.iota()).into());
    }
    let lam = ladder.lambda();
    let mut s = FinStructure::empty(sig.clone(), lam);
    for b in 0..lam {
        for a in 0..b {
            s.p.insert((a, b));
        }
    }
    let all: Vec<usize> = (0..lam).collect();
    for iota in 0..2 {
        let k = sig.k[iota];
        if k < 2 {
            continue;
        }
        for head in combinations(&all, k) {
            for beta in head[k - 1] + 1..lam {
                if ladder.constant_on(beta, head[0], head[k - 1], iota as u8) {
                    let mut t = head.clone();
                    t.push(beta);
                    s.q[iota].insert(t);
                }
            }
        }
    }
    Ok(s)
}

/// The union of `m1` and `m2` over a common substructure `m0`, where
/// `e1`, `e2` give the positions of the points of `m0` in `m1`, `m2`.
/// The union lists the points of `m1` first, then the points of `m2`
/// outside the image of `e2`; the second returned map sends the points of
/// `m2` into the union.
pub fn disjoint_union(
    m0: &FinStructure,
    m1: &FinStructure,
    e1: &[usize],
    m2: &FinStructure,
    e2: &[usize],
) -> Result<(FinStructure, Vec<usize>), RelError> {
    if m0.signature != m1.signature || m0.signature != m2.signature {
        return Err(RelError::SignatureMismatch);
    }
    if !FinStructure::is_embedding(m0, m1, e1) {
        return Err(RelError::NotInduced("base in the first structure".to_owned()));
    }
    if !FinStructure::is_embedding(m0, m2, e2) {
        return Err(RelError::NotInduced("base in the second structure".to_owned()));
    }
    let mut g = vec![usize::MAX; m2.universe];
    for (i, &y) in e2.iter().enumerate() {
        g[y] = e1[i];
    }
    let mut next = m1.universe;
    for slot in g.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let mut u = m1.clone();
    u.universe = next;
    u.p.extend(m2.p.iter().map(|&(a, b)| (g[a], g[b])));
    for iota in 0..2 {
        u.q[iota].extend(m2.q[iota].iter().map(|t| t.iter().map(|&x| g[x]).collect::<Vec<_>>()));
    }
    Ok((u, g))
}

/// The four-cycle of parts.
pub const CYCLE: [(usize, usize); 4] = [(0, 1), (1, 2), (2, 3), (0, 3)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmalgamReport {
    pub universe: usize,
    pub edge_models_omit: bool,
    pub union_omits: bool,
    pub extends_edges: bool,
    pub pass: bool,
}

/// Amalgamates edge models over the four-cycle of disjoint parts.
///
/// `edges[i]` lives on the points of part `CYCLE[i].0` followed by those of
/// part `CYCLE[i].1`, and must restrict to both parts. The union lists the
/// parts in order.
pub fn nsop4_amalgam(parts: &[FinStructure; 4], edges: &[FinStructure; 4]) -> Result<(FinStructure, AmalgamReport), RelError> {
    let sig = &parts[0].signature;
    if parts.iter().chain(edges.iter()).any(|s| s.signature != *sig) {
        return Err(RelError::SignatureMismatch);
    }
    let mut offset = [0usize; 5];
    for i in 0..4 {
        offset[i + 1] = offset[i] + parts[i].universe;
    }
    let mut union = FinStructure::empty(sig.clone(), offset[4]);
    let mut edge_models_omit = true;
    let mut layouts = Vec::new();
    for (e, &(i, j)) in edges.iter().zip(&CYCLE) {
        let (ni, nj) = (parts[i].universe, parts[j].universe);
        if e.universe != ni + nj {
            return Err(RelError::Precondition(format!("edge {{{i},{j}}} has {} points, expected {}", e.universe, ni + nj)));
        }
        let left: Vec<usize> = (0..ni).collect();
        let right: Vec<usize> = (ni..ni + nj).collect();
        if e.restrict(&left) != parts[i] || e.restrict(&right) != parts[j] {
            return Err(RelError::Precondition(format!("edge {{{i},{j}}} does not extend its parts")));
        }
        if !omits_nstar(e)? {
            edge_models_omit = false;
        }
        let layout: Vec<usize> = (offset[i]..offset[i] + ni).chain(offset[j]..offset[j] + nj).collect();
        union.p.extend(e.p.iter().map(|&(a, b)| (layout[a], layout[b])));
        for iota in 0..2 {
            union.q[iota].extend(e.q[iota].iter().map(|t| t.iter().map(|&x| layout[x]).collect::<Vec<_>>()));
        }
        layouts.push(layout);
    }
    if !edge_models_omit {
        return Err(RelError::Precondition("an edge model contains a copy of N*".to_owned()));
    }
    let extends_edges = edges.iter().zip(&layouts).all(|(e, l)| union.restrict(l) == *e);
    let union_omits = omits_nstar(&union)?;
    let report = AmalgamReport {
        universe: union.universe,
        edge_models_omit,
        union_omits,
        extends_edges,
        pass: union_omits && extends_edges,
    };
    Ok((union, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassOliveReport {
    pub signature: OliveSignature,
    pub lambda_max: usize,
    pub ladders: u64,
    /// Ladders whose model misses a required `P` or `Q_ι` instance.
    pub clause_b_failures: u64,
    /// Ladders whose model contains `N*`.
    pub embeddings_found: u64,
    pub first_failure: Option<Ladder>,
    pub pass: bool,
}

fn clause_b_holds(m: &FinStructure, ladder: &Ladder) -> bool {
    let lam = ladder.lambda();
    let all: Vec<usize> = (0..lam).collect();
    let pairs = (0..lam).all(|b| (0..b).all(|a| m.p.contains(&(a, b))));
    pairs
        && (0..2).all(|iota| {
            let k = m.signature.k[iota];
            combinations(&all, k + 1).into_iter().all(|t| {
                let (head, beta) = (&t[..k], t[k]);
                !(head[k - 1] < beta && (head[0]..=head[k - 1]).all(|a| ladder.f(beta, a) == iota as u8))
                    || m.q[iota].contains(&t)
            })
        })
}

/// Every ladder of length `1..=lambda_max`: its model realises clause (b)
/// and omits `N*`.
pub fn check_class_olive(sig: &OliveSignature, lambda_max: usize, exec: Exec) -> Result<ClassOliveReport, RelError> {
    sig.validate_relational()?;
    let ladders: Vec<Ladder> =
        (1..=lambda_max).flat_map(|lam| (0..Ladder::count(lam)).map(move |c| Ladder::from_index(lam, c))).collect();
    let results = par::map(exec, &ladders, |l| -> Result<(bool, bool), RelError> {
        let m = model_from_ladder(l, sig)?;
        Ok((clause_b_holds(&m, l), omits_nstar(&m)?))
    });
    let mut r = ClassOliveReport {
        signature: sig.clone(),
        lambda_max,
        ladders: ladders.len() as u64,
        clause_b_failures: 0,
        embeddings_found: 0,
        first_failure: None,
        pass: true,
    };
    for (l, res) in ladders.iter().zip(results) {
        let (b, omit) = res?;
        r.clause_b_failures += u64::from(!b);
        r.embeddings_found += u64::from(!omit);
        if (!b || !omit) && r.first_failure.is_none() {
            r.first_failure = Some(l.clone());
        }
    }
    r.pass = r.clause_b_failures == 0 && r.embeddings_found == 0;
    Ok(r)
}

/// A random structure: each ordered pair of distinct points in `P` with
/// probability `density`, and each increasing tuple of the right arity in
/// `Q_ι` with the same probability.
pub fn random_structure(sig: &OliveSignature, universe: usize, density: f64, rng: &mut impl Rng) -> FinStructure {
    let mut s = FinStructure::empty(sig.clone(), universe);
    for a in 0..universe {
        for b in 0..universe {
            if a != b && rng.gen_bool(density) {
                s.p.insert((a, b));
            }
        }
    }
    let all: Vec<usize> = (0..universe).collect();
    for iota in 0..2 {
        for t in combinations(&all, sig.arity(iota)) {
            if rng.gen_bool(density) {
                s.q[iota].insert(t);
            }
        }
    }
    s
}

/// A random member of `T⁰`: random structures are redrawn until one omits
/// `N*`, lowering the density after each miss.
pub fn random_t0_member(sig: &OliveSignature, universe: usize, rng: &mut impl Rng) -> Result<FinStructure, RelError> {
    let mut density: f64 = 0.6;
    loop {
        let s = random_structure(sig, universe, density, rng);
        if omits_nstar(&s)? {
            return Ok(s);
        }
        density = (density * 0.9).max(0.05);
    }
}

/// A random member of `T⁰` on the points of `a` followed by those of `b`
/// that restricts to `a` and `b`: cross relations are drawn at random and
/// redrawn, sparser, until the result omits `N*`.
pub fn random_edge_model(a: &FinStructure, b: &FinStructure, rng: &mut impl Rng) -> Result<FinStructure, RelError> {
    let empty = FinStructure::empty(a.signature.clone(), 0);
    let (base, _) = disjoint_union(&empty, a, &[], b, &[])?;
    let na = a.universe;
    let all: Vec<usize> = (0..base.universe).collect();
    let crosses = |t: &[usize]| t.iter().any(|&x| x < na) && t.iter().any(|&x| x >= na);
    let mut density: f64 = 0.5;
    loop {
        let mut m = base.clone();
        for x in 0..base.universe {
            for y in 0..base.universe {
                if x != y && crosses(&[x, y]) && rng.gen_bool(density) {
                    m.p.insert((x, y));
                }
            }
        }
        for iota in 0..2 {
            for t in combinations(&all, a.signature.arity(iota)) {
                if crosses(&t) && rng.gen_bool(density) {
                    m.q[iota].insert(t);
                }
            }
        }
        if omits_nstar(&m)? {
            return Ok(m);
        }
        density *= 0.8;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> OliveSignature {
        OliveSignature::default_test()
    }

    #[test]
    fn signatures() {
        assert!(sig().validate_relational().is_ok());
        let group_sig = OliveSignature { eta: vec![0, 1, 0], k: [2, 1] };
        assert!(group_sig.validate().is_ok());
        assert!(group_sig.validate_relational().is_err());
        assert!(OliveSignature::new(vec![0, 0, 1, 1], [2, 2]).is_err());
        assert!(OliveSignature::new(vec![1, 0, 0, 1], [2, 2]).is_err());
        assert!(OliveSignature::new(vec![0, 1, 0], [2, 2]).is_err());
    }

    #[test]
    fn nstar_examples() {
        let n = build_nstar(&sig()).unwrap();
        assert_eq!(n.universe, 5);
        assert_eq!(n.p.len(), 10);
        assert_eq!(n.q[0], [vec![0, 2, 3], vec![0, 2, 4]].into_iter().collect());
        assert_eq!(n.q[1], [vec![1, 3, 4]].into_iter().collect());
        let group_nstar = build_nstar(&OliveSignature { eta: vec![0, 1, 0], k: [2, 1] }).unwrap();
        assert_eq!(group_nstar.q[0], [vec![0, 2, 3]].into_iter().collect());
        assert!(group_nstar.q[1].is_empty());
        assert_eq!(embeds(&n, &n).unwrap(), Some(vec![0, 1, 2, 3, 4]));
        assert!(!omits_nstar(&n).unwrap());
        assert_eq!(embeds(&n, &FinStructure::empty(sig(), 1)).unwrap(), None);
    }

    #[test]
    fn ladder_models() {
        let s = sig();
        let m = model_from_ladder(&Ladder::binary(&[&[0]]).unwrap(), &s).unwrap();
        assert_eq!(m.p, [(0, 1)].into_iter().collect());
        assert!(m.q[0].is_empty() && m.q[1].is_empty());
        let m = model_from_ladder(&Ladder::binary(&[&[0], &[0, 0]]).unwrap(), &s).unwrap();
        assert_eq!(m.q[0], [vec![0, 1, 2]].into_iter().collect());
        assert!(m.q[1].is_empty());
        let m = model_from_ladder(&Ladder::binary(&[&[0], &[1, 1]]).unwrap(), &s).unwrap();
        assert_eq!(m.q[1], [vec![0, 1, 2]].into_iter().collect());
        assert!(m.q[0].is_empty());
    }

    #[test]
    fn unions() {
        let s = sig();
        let pt = FinStructure::empty(s.clone(), 1);
        let (u, g) = disjoint_union(&FinStructure::empty(s.clone(), 0), &pt, &[], &pt, &[]).unwrap();
        assert_eq!(u, FinStructure::empty(s.clone(), 2));
        assert_eq!(g, vec![1]);
        let n = build_nstar(&s).unwrap();
        let id: Vec<usize> = (0..5).collect();
        let (u, _) = disjoint_union(&n, &n, &id, &n, &id).unwrap();
        assert_eq!(u, n);
    }

    #[test]
    fn single_point_cycle() {
        let s = sig();
        let pt = FinStructure::empty(s.clone(), 1);
        let parts = [pt.clone(), pt.clone(), pt.clone(), pt];
        let edge = FinStructure::empty(s, 2);
        let (u, r) = nsop4_amalgam(&parts, &[edge.clone(), edge.clone(), edge.clone(), edge]).unwrap();
        assert_eq!(u.universe, 4);
        assert!(r.pass);
    }

    #[test]
    fn json_round_trip() {
        let n = build_nstar(&sig()).unwrap();
        let text = serde_json::to_string(&n).unwrap();
        assert!(text.contains("\"Q0\":[[0,2,3],[0,2,4]]"));
        let back: FinStructure = serde_json::from_str(&text).unwrap();
        assert_eq!(back, n);
        let bad = text.replace("[1,3,4]", "[1,3]");
        assert!(serde_json::from_str::<FinStructure>(&bad).is_err());
    }
}
