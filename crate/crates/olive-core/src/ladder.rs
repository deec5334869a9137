// SPDX-License-Identifier: Apache-2.0

//! Ladders `f̄ = ⟨f_α : α < λ⟩` with `f_α : α → {0, …, ι*−1}`, the triple
//! set `J`, s-pairs, the equation families and the partial maps `F_β`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kgroup::SPair;
use crate::words::Generator;

pub type Triple = (usize, usize, usize);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LadderError {
    #[error("lambda must be positive")]
    EmptyLadder,
    #[error("expected {expected} rows, found {got}")]
    RowCount { expected: usize, got: usize },
    #[error("row for alpha = {alpha} has length {got}, expected {alpha}")]
    RowLength { alpha: usize, got: usize },
    #[error("value {value} at f_{alpha}({delta}) is not below iota = {iota}")]
    Value { alpha: usize, delta: usize, value: u8, iota: u8 },
    #[error("this operation needs a two-colour ladder (iota = 2), found iota = {0}")]
    NotBinary(u8),
    #[error("iota must be at least 1")]
    NoColours,
    #[error("({0}, {1}, {2}) is not in J")]
    NotInJ(usize, usize, usize),
    #[error("index {0} out of range")]
    Index(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LadderFile", into = "LadderFile")]
pub struct Ladder {
    lambda: usize,
    iota: u8,
    /// `rows[α]` has length `α`; `rows[0]` is empty.
    rows: Vec<Vec<u8>>,
}

/// File form: `rows[i]` is the row of `α = i + 1`.
#[derive(Serialize, Deserialize)]
struct LadderFile {
    lambda: usize,
    iota: u8,
    rows: Vec<Vec<u8>>,
}

impl TryFrom<LadderFile> for Ladder {
    type Error = LadderError;

    fn try_from(f: LadderFile) -> Result<Self, LadderError> {
        let mut rows = vec![Vec::new()];
        rows.extend(f.rows);
        Ladder::new(f.lambda, f.iota, rows)
    }
}

impl From<Ladder> for LadderFile {
    fn from(l: Ladder) -> Self {
        LadderFile { lambda: l.lambda, iota: l.iota, rows: l.rows.into_iter().skip(1).collect() }
    }
}

/// Number of entries of a ladder of length `λ`.
pub fn entries(lambda: usize) -> usize {
    lambda * lambda.saturating_sub(1) / 2
}

impl Ladder {
    /// `rows[α]` for every `α < λ`, including the empty row 0.
    pub fn new(lambda: usize, iota: u8, rows: Vec<Vec<u8>>) -> Result<Self, LadderError> {
        if lambda == 0 {
            return Err(LadderError::EmptyLadder);
        }
        if iota == 0 {
            return Err(LadderError::NoColours);
        }
        if rows.len() != lambda {
            return Err(LadderError::RowCount { expected: lambda.saturating_sub(1), got: rows.len().saturating_sub(1) });
        }
        for (alpha, row) in rows.iter().enumerate() {
            if row.len() != alpha {
                return Err(LadderError::RowLength { alpha, got: row.len() });
            }
            if let Some((delta, &value)) = row.iter().enumerate().find(|(_, &v)| v >= iota) {
                return Err(LadderError::Value { alpha, delta, value, iota });
            }
        }
        Ok(Ladder { lambda, iota, rows })
    }

    /// Two-colour ladder from the rows of `α = 1, …, λ−1`.
    pub fn binary(rows: &[&[u8]]) -> Result<Self, LadderError> {
        let mut all = vec![Vec::new()];
        all.extend(rows.iter().map(|r| r.to_vec()));
        Ladder::new(rows.len() + 1, 2, all)
    }

    /// The `code`-th two-colour ladder of length `λ`: bit `t` of `code` is
    /// the `t`-th entry in the order `f₁(0), f₂(0), f₂(1), f₃(0), …`.
    pub fn from_index(lambda: usize, code: u64) -> Self {
        assert!(lambda >= 1 && entries(lambda) <= 63, "ladder too long to index");
        let mut t = 0;
        let rows = (0..lambda)
            .map(|alpha| {
                (0..alpha)
                    .map(|_| {
                        let v = (code >> t & 1) as u8;
                        t += 1;
                        v
                    })
                    .collect()
            })
            .collect();
        Ladder { lambda, iota: 2, rows }
    }

    /// Number of two-colour ladders of length `λ`.
    pub fn count(lambda: usize) -> u64 {
        1u64 << entries(lambda)
    }

    /// Uniform random ladder.
    pub fn random(lambda: usize, iota: u8, rng: &mut impl Rng) -> Self {
        assert!(lambda >= 1 && iota >= 1);
        let rows = (0..lambda).map(|alpha| (0..alpha).map(|_| rng.gen_range(0..iota)).collect()).collect();
        Ladder { lambda, iota, rows }
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn iota(&self) -> u8 {
        self.iota
    }

    /// `f_β(α)` for `α < β`.
    #[inline]
    pub fn f(&self, beta: usize, alpha: usize) -> u8 {
        self.rows[beta][alpha]
    }

    pub fn row(&self, beta: usize) -> &[u8] {
        &self.rows[beta]
    }

    fn require_binary(&self) -> Result<(), LadderError> {
        if self.iota == 2 {
            Ok(())
        } else {
            Err(LadderError::NotBinary(self.iota))
        }
    }

    /// `f_γ` is constantly `value` on the closed interval `[α, β]`.
    pub fn constant_on(&self, gamma: usize, alpha: usize, beta: usize, value: u8) -> bool {
        self.rows[gamma][alpha..=beta].iter().all(|&v| v == value)
    }

    /// `J = {(α,β,γ) : α<β<γ<λ, f_γ↾[α,β] ≡ 0}` in lexicographic order.
    pub fn j_of(&self) -> Result<Vec<Triple>, LadderError> {
        self.require_binary()?;
        let mut out = Vec::new();
        for a in 0..self.lambda {
            for b in a + 1..self.lambda {
                for c in b + 1..self.lambda {
                    if self.constant_on(c, a, b, 0) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn in_j(&self, t: Triple) -> bool {
        let (a, b, c) = t;
        a < b && b < c && c < self.lambda && self.iota == 2 && self.constant_on(c, a, b, 0)
    }

    /// `s_{ᾱ,β} = ({ℓ : α_ℓ < β, f_β(α_ℓ) = 0}, {ℓ : β < α_ℓ, f_{α_ℓ}(β) = 1})`.
    pub fn s_pair(&self, t: Triple, beta: usize) -> Result<SPair, LadderError> {
        if !self.in_j(t) {
            return Err(LadderError::NotInJ(t.0, t.1, t.2));
        }
        if beta >= self.lambda {
            return Err(LadderError::Index(beta));
        }
        let alphas = [t.0, t.1, t.2];
        let mut u1 = 0u8;
        let mut u2 = 0u8;
        for (l, &a) in alphas.iter().enumerate() {
            if a < beta && self.f(beta, a) == 0 {
                u1 |= 1 << l;
            }
            if beta < a && self.f(a, beta) == 1 {
                u2 |= 1 << l;
            }
        }
        Ok(SPair::from_masks(u1, u2).expect("masks below 8"))
    }

    pub fn gamma_sets(&self) -> Result<GammaSets, LadderError> {
        self.require_binary()?;
        let mut gamma0 = Vec::new();
        let mut gamma1 = Vec::new();
        for b in 0..self.lambda {
            for a in 0..b {
                if self.f(b, a) == 0 {
                    gamma0.push((a, b));
                } else {
                    gamma1.push((a, b));
                }
            }
        }
        gamma0.sort_unstable();
        gamma1.sort_unstable();
        Ok(GammaSets { gamma0, gamma1, gamma2: self.j_of()? })
    }

    /// `F_β`: `x_{α,0} ↦ x_{α,2}` when `α < β` and `f_β(α) = 0`;
    /// `x_{γ,1} ↦ x_{γ,3}` and `x_{γ,4} ↦ x_{γ,4}` when `γ > β` and
    /// `f_γ(β) = 1`.
    pub fn f_beta(&self, beta: usize) -> Result<PartialGenMap, LadderError> {
        self.require_binary()?;
        if beta >= self.lambda {
            return Err(LadderError::Index(beta));
        }
        let x = |alpha, k| Generator::X { alpha, k };
        let mut map = PartialGenMap::default();
        for a in 0..beta {
            if self.f(beta, a) == 0 {
                map.pairs.push((x(a, 0), x(a, 2)));
            }
        }
        for g in beta + 1..self.lambda {
            if self.f(g, beta) == 1 {
                map.pairs.push((x(g, 1), x(g, 3)));
                map.pairs.push((x(g, 4), x(g, 4)));
            }
        }
        Ok(map)
    }

    /// Well-definedness of `F_β`: a function, one-to-one, and neither its
    /// domain nor its range contains all three generators of a `Γ²` equation.
    pub fn check_f_beta(&self, beta: usize) -> Result<FBetaReport, LadderError> {
        let map = self.f_beta(beta)?;
        check_partial_map(self, beta, &map)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaSets {
    /// Pairs `(α, β)` with `f_β(α) = 0`, carrying `φ₀(x̄_α, x̄_β)`.
    pub gamma0: Vec<(usize, usize)>,
    /// Pairs with `f_β(α) = 1`, carrying `φ₁(x̄_α, x̄_β)`.
    pub gamma1: Vec<(usize, usize)>,
    /// Triples carrying `σ*(x_{α,0}, x_{β,1}, x_{γ,4}) = e`.
    pub gamma2: Vec<Triple>,
}

/// A finite partial map between generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PartialGenMap {
    pub pairs: Vec<(Generator, Generator)>,
}

impl PartialGenMap {
    pub fn domain(&self) -> BTreeSet<Generator> {
        self.pairs.iter().map(|p| p.0.clone()).collect()
    }

    pub fn range(&self) -> BTreeSet<Generator> {
        self.pairs.iter().map(|p| p.1.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FBetaReport {
    pub beta: usize,
    pub size: usize,
    pub function: bool,
    pub injective: bool,
    /// A `Γ²` triple whose generators all lie in the domain.
    pub domain_blocked_by: Option<Triple>,
    pub range_blocked_by: Option<Triple>,
    pub pass: bool,
}

/// The free-generation criterion: no `Γ²` triple has all of
/// `x_{α,0}, x_{β,1}, x_{γ,4}` in `set`. Returns the first offending triple.
pub fn freeness_violation(ladder: &Ladder, set: &BTreeSet<Generator>) -> Result<Option<Triple>, LadderError> {
    let x = |alpha, k| Generator::X { alpha, k };
    Ok(ladder.j_of()?.into_iter().find(|&(a, b, c)| set.contains(&x(a, 0)) && set.contains(&x(b, 1)) && set.contains(&x(c, 4))))
}

pub fn check_partial_map(ladder: &Ladder, beta: usize, map: &PartialGenMap) -> Result<FBetaReport, LadderError> {
    let mut by_src: BTreeMap<&Generator, BTreeSet<&Generator>> = BTreeMap::new();
    for (a, b) in &map.pairs {
        by_src.entry(a).or_default().insert(b);
    }
    let function = by_src.values().all(|t| t.len() == 1);
    let dom = map.domain();
    let rng = map.range();
    let injective = function && rng.len() == dom.len();
    let domain_blocked_by = freeness_violation(ladder, &dom)?;
    let range_blocked_by = freeness_violation(ladder, &rng)?;
    Ok(FBetaReport {
        beta,
        size: dom.len(),
        function,
        injective,
        domain_blocked_by,
        range_blocked_by,
        pass: function && injective && domain_blocked_by.is_none() && range_blocked_by.is_none(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example4() -> Ladder {
        Ladder::binary(&[&[0], &[0, 0], &[0, 0, 1]]).unwrap()
    }

    #[test]
    fn j_examples() {
        let l3 = Ladder::binary(&[&[0], &[0, 0]]).unwrap();
        assert_eq!(l3.j_of().unwrap(), vec![(0, 1, 2)]);
        assert_eq!(example4().j_of().unwrap(), vec![(0, 1, 2), (0, 1, 3)]);
        assert!(Ladder::binary(&[&[1]]).unwrap().j_of().unwrap().is_empty());
    }

    #[test]
    fn s_pair_examples() {
        let l = example4();
        assert_eq!(l.s_pair((0, 1, 3), 2).unwrap(), SPair::from_sets(&[0, 1], &[2]).unwrap());
        assert_eq!(l.s_pair((0, 1, 2), 3).unwrap(), SPair::from_sets(&[0, 1], &[]).unwrap());
        assert_eq!(l.s_pair((0, 1, 2), 0).unwrap(), SPair::from_sets(&[], &[]).unwrap());
        assert_eq!(l.s_pair((0, 2, 3), 1), Err(LadderError::NotInJ(0, 2, 3)));
    }

    #[test]
    fn gamma_examples() {
        let g = Ladder::binary(&[&[1]]).unwrap().gamma_sets().unwrap();
        assert!(g.gamma0.is_empty() && g.gamma1 == vec![(0, 1)] && g.gamma2.is_empty());
        let g = Ladder::binary(&[&[0]]).unwrap().gamma_sets().unwrap();
        assert!(g.gamma0 == vec![(0, 1)] && g.gamma1.is_empty());
        assert_eq!(example4().gamma_sets().unwrap().gamma2.len(), 2);
    }

    #[test]
    fn f_beta_examples() {
        let x = |alpha, k| Generator::X { alpha, k };
        let l = Ladder::binary(&[&[0], &[0, 1]]).unwrap();
        let f = l.f_beta(1).unwrap();
        assert_eq!(f.pairs, vec![(x(0, 0), x(0, 2)), (x(2, 1), x(2, 3)), (x(2, 4), x(2, 4))]);
        let f0 = l.f_beta(0).unwrap();
        assert!(f0.domain().iter().all(|g| matches!(g, Generator::X { alpha: 1 | 2, .. })));
        assert!(Ladder::binary(&[&[1], &[1, 1]]).unwrap().f_beta(2).unwrap().pairs.is_empty());
        assert!(l.check_f_beta(1).unwrap().pass);
    }

    #[test]
    fn corrupted_f_beta_fails() {
        // f₂ ≡ 0 puts (0,1,2) in J; a map whose domain holds x₀,₀, x₁,₁, x₂,₄
        let l = Ladder::binary(&[&[1], &[0, 0]]).unwrap();
        let x = |alpha, k| Generator::X { alpha, k };
        let mut map = l.f_beta(1).unwrap();
        assert!(map.pairs.is_empty());
        map.pairs.push((x(0, 0), x(0, 2)));
        map.pairs.push((x(1, 1), x(1, 3)));
        map.pairs.push((x(2, 4), x(2, 4)));
        let r = check_partial_map(&l, 1, &map).unwrap();
        assert_eq!(r.domain_blocked_by, Some((0, 1, 2)));
        assert!(!r.pass);
        let empty = check_partial_map(&l, 1, &PartialGenMap::default()).unwrap();
        assert!(empty.pass);
    }

    #[test]
    fn file_format() {
        let l = example4();
        let text = serde_json::to_string(&l).unwrap();
        assert_eq!(text, r#"{"lambda":4,"iota":2,"rows":[[0],[0,0],[0,0,1]]}"#);
        assert_eq!(serde_json::from_str::<Ladder>(&text).unwrap(), l);
        let bad = r#"{"lambda":3,"iota":2,"rows":[[0],[0]]}"#;
        assert!(serde_json::from_str::<Ladder>(bad).is_err());
        let bad = r#"{"lambda":2,"iota":2,"rows":[[2]]}"#;
        assert!(serde_json::from_str::<Ladder>(bad).is_err());
    }

    #[test]
    fn index_enumeration_is_a_bijection() {
        let all: BTreeSet<Vec<Vec<u8>>> = (0..Ladder::count(4)).map(|c| Ladder::from_index(4, c).rows).collect();
        assert_eq!(all.len(), 64);
    }

    #[test]
    fn s_pairs_land_in_s_star_exhaustively() {
        for lambda in 3..=6 {
            for code in 0..Ladder::count(lambda) {
                let l = Ladder::from_index(lambda, code);
                for t in l.j_of().unwrap() {
                    for beta in 0..lambda {
                        assert!(l.s_pair(t, beta).unwrap().in_s_star(), "{l:?} {t:?} {beta}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn j_is_monotone_under_flips(code in any::<u64>(), lambda in 3usize..8, pick in any::<prop::sample::Index>()) {
            let l = Ladder::from_index(lambda, code & ((1u64 << entries(lambda)) - 1));
            let before: BTreeSet<_> = l.j_of().unwrap().into_iter().collect();
            let cells: Vec<(usize, usize)> = (1..lambda).flat_map(|g| (0..g).map(move |d| (g, d))).filter(|&(g, d)| l.f(g, d) == 0).collect();
            if cells.is_empty() { return Ok(()); }
            let (g, d) = cells[pick.index(cells.len())];
            let mut rows = l.rows.clone();
            rows[g][d] = 1;
            let flipped = Ladder::new(lambda, 2, rows).unwrap();
            for t in flipped.j_of().unwrap() {
                if t.2 == g { prop_assert!(before.contains(&t)); }
            }
        }

        #[test]
        fn f_beta_shape(code in any::<u64>(), lambda in 2usize..10) {
            let l = Ladder::from_index(lambda, code & ((1u64 << entries(lambda)) - 1));
            for beta in 0..lambda {
                let f = l.f_beta(beta).unwrap();
                for (a, b) in &f.pairs {
                    let (Generator::X { alpha: a1, k: k1 }, Generator::X { alpha: a2, k: k2 }) = (a, b) else { unreachable!() };
                    prop_assert_eq!(a1, a2);
                    prop_assert!([(0, 2), (1, 3), (4, 4)].contains(&(*k1, *k2)));
                }
                prop_assert!(l.check_f_beta(beta).unwrap().pass);
            }
        }
    }
}
