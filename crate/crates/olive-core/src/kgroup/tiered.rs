// SPDX-License-Identifier: Apache-2.0

//! The printed three-level presentation and its collection product.
//!
//! Generators `y_{j,ℓ}` for `j = 0, 1, 2` with `ℓ < n_j`. Relations:
//! `y_{j,ℓ}² = e`; `[y_{j+1,a}, y_{j+1,b}] = y_{j, f_j{a,b}}` for `a ≠ b`;
//! generators on different levels commute, and level-0 generators commute.
//! The pairings `f_j` are colexicographic ranks of unordered pairs.
//!
//! The product of two normal forms is the result of leftmost-first
//! collection of their concatenation. [`collect_literal`] runs that
//! procedure letter by letter; [`KParams::mul`] is a closed form of the same
//! procedure, checked against it in tests.

use serde::Serialize;

use super::{Fingerprint, KError, KModel, KernelCheck, PartialIso};
use crate::bits::{Bits, HexError};
use crate::words::{sigma_star, Generator, GroupContext, SigmaVariant, Word};

/// Colexicographic rank of the unordered pair `{a, b}`, `a ≠ b`.
#[inline]
pub fn pair_rank(a: usize, b: usize) -> usize {
    debug_assert_ne!(a, b);
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    hi * (hi - 1) / 2 + lo
}

/// Inverse of [`pair_rank`]: `(lo, hi)` with `lo < hi`.
pub fn pair_unrank(r: usize) -> (usize, usize) {
    let mut hi = ((((8 * r + 1) as f64).sqrt() + 1.0) / 2.0) as usize;
    while hi * (hi - 1) / 2 > r {
        hi -= 1;
    }
    while (hi + 1) * hi / 2 <= r {
        hi += 1;
    }
    (r - hi * (hi - 1) / 2, hi)
}

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KParams {
    pub m: usize,
    pub n2: usize,
    pub n1: usize,
    pub n0: usize,
    /// Level-0 index `ℓ*` of the factored-out central generator.
    pub quotient_mask: Option<usize>,
    /// The σ* variant `ℓ*` was computed from, for fingerprints.
    pub sigma_variant: Option<SigmaVariant>,
}

impl KParams {
    pub fn new(m: usize) -> Self {
        let n2 = 3 * m;
        let n1 = binom2(n2);
        KParams { m, n2, n1, n0: binom2(n1), quotient_mask: None, sigma_variant: None }
    }

    pub fn level_size(&self, level: usize) -> usize {
        [self.n0, self.n1, self.n2][level]
    }

    pub fn with_mask(mut self, l_star: usize, variant: SigmaVariant) -> Self {
        assert!(l_star < self.n0, "mask index out of range");
        self.quotient_mask = Some(l_star);
        self.sigma_variant = Some(variant);
        self
    }
}

/// Toy parameters: `m = 1`, so `n₂ = n₁ = n₀ = 3`.
pub fn toy_params() -> KParams {
    KParams::new(1)
}

/// A normal form: one bit vector per level.
#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KElement {
    pub v2: Bits,
    pub v1: Bits,
    pub v0: Bits,
}

impl Clone for KElement {
    fn clone(&self) -> Self {
        KElement { v2: self.v2.clone(), v1: self.v1.clone(), v0: self.v0.clone() }
    }

    fn clone_from(&mut self, src: &Self) {
        self.v2.clone_from(&src.v2);
        self.v1.clone_from(&src.v1);
        self.v0.clone_from(&src.v0);
    }
}

impl KElement {
    pub fn level(&self, j: usize) -> &Bits {
        [&self.v0, &self.v1, &self.v2][j]
    }

    fn level_mut(&mut self, j: usize) -> &mut Bits {
        match j {
            0 => &mut self.v0,
            1 => &mut self.v1,
            _ => &mut self.v2,
        }
    }

    /// The canonical word: level 2 ascending, then level 1, then level 0.
    pub fn word(&self) -> Vec<(usize, usize)> {
        (0..3).rev().flat_map(|j| self.level(j).ones().map(move |i| (j, i))).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.v2.is_zero() && self.v1.is_zero() && self.v0.is_zero()
    }
}

#[derive(Serialize)]
struct LevelJson {
    len: usize,
    hex: String,
}

impl KParams {
    fn fits(&self, a: &KElement) -> bool {
        a.v2.len() == self.n2 && a.v1.len() == self.n1 && a.v0.len() == self.n0
    }

    fn check(&self, a: &KElement) -> Result<(), KError> {
        if self.fits(a) {
            Ok(())
        } else {
            Err(KError::Dimension)
        }
    }

    pub fn k_identity(&self) -> KElement {
        KElement { v2: Bits::zeros(self.n2), v1: Bits::zeros(self.n1), v0: Bits::zeros(self.n0) }
    }

    pub fn k_generator(&self, level: usize, index: usize) -> Result<KElement, KError> {
        let size = if level < 3 { self.level_size(level) } else { 0 };
        if level >= 3 || index >= size {
            return Err(KError::GeneratorRange { level, index, size });
        }
        let mut e = self.k_identity();
        e.level_mut(level).toggle(index);
        self.apply_mask(&mut e);
        Ok(e)
    }

    /// `z_{i,k} = y_{2, m·i + k}`.
    pub fn z_gen(&self, i: usize, k: usize) -> Result<KElement, KError> {
        if i >= 3 || k >= self.m {
            return Err(KError::ZRange { i, k, m: self.m });
        }
        self.k_generator(2, self.m * i + k)
    }

    fn apply_mask(&self, e: &mut KElement) {
        if let Some(l) = self.quotient_mask {
            e.v0.set(l, false);
        }
    }

    pub fn k_mul(&self, a: &KElement, b: &KElement) -> Result<KElement, KError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    fn mul_unchecked(&self, a: &KElement, b: &KElement) -> KElement {
        let mut out = a.clone();
        self.mul_assign(&mut out, b);
        out
    }

    /// `acc ← acc · b`.
    ///
    /// Each level-2 letter `b` of the right factor bubbles left through the
    /// current level-2 letters above it, emitting `y_{1,f₁{b,a}}` for each
    /// such `a` in ascending order; those letters then join the level-1
    /// block from the left. Inside the level-1 block collection is the
    /// class-2 product `(v,c)(w,d) = (v⊕w, c⊕d⊕β(v,w))` with
    /// `β(v,w) = Σ_{a∈v, b∈w, b<a} e_{f₀{b,a}}`.
    pub fn mul_assign(&self, acc: &mut KElement, b: &KElement) {
        debug_assert!(self.fits(acc) && self.fits(b));
        acc.v0.xor_assign(&b.v0);
        let mut emitted: Vec<usize> = Vec::new();
        for bb in b.v2.ones() {
            emitted.clear();
            emitted.extend(acc.v2.ones().filter(|&a| a > bb).map(|a| pair_rank(bb, a)));
            // (E, 0) · (v, c)
            for &e in &emitted {
                acc.v0.xor_range_from(binom2(e), &acc.v1, 0, e);
            }
            for &e in &emitted {
                acc.v1.toggle(e);
            }
            acc.v2.toggle(bb);
        }
        // (v, c) · (B₁, 0)
        let KElement { v1, v0, .. } = acc;
        for a in v1.ones() {
            v0.xor_range_from(binom2(a), &b.v1, 0, a);
        }
        acc.v1.xor_assign(&b.v1);
        self.apply_mask(acc);
    }

    /// The unique `x` with `a · x = e`.
    pub fn k_inv(&self, a: &KElement) -> Result<KElement, KError> {
        self.check(a)?;
        Ok(self.inv_unchecked(a))
    }

    fn inv_unchecked(&self, a: &KElement) -> KElement {
        // Level 2 of x must be A₂. Run the level-2 phase of a · x, then
        // solve the level-1 and level-0 parts.
        let mut probe = a.clone();
        probe.v0.clear();
        let x2 = KElement { v2: a.v2.clone(), v1: Bits::zeros(self.n1), v0: Bits::zeros(self.n0) };
        let saved_mask = self.quotient_mask;
        let unmasked = KParams { quotient_mask: None, ..self.clone() };
        unmasked.mul_assign(&mut probe, &x2);
        // probe = (0, v', c'), so X₁ = v' and X₀ = A₀ ⊕ c' ⊕ β(v', v')
        let v = probe.v1.clone();
        let mut x0 = probe.v0.clone();
        x0.xor_assign(&a.v0);
        for p in v.ones() {
            x0.xor_range_from(binom2(p), &v, 0, p);
        }
        let mut x = KElement { v2: a.v2.clone(), v1: v, v0: x0 };
        if saved_mask.is_some() {
            self.apply_mask(&mut x);
        }
        x
    }

    /// Evaluates `w` letter by letter (left fold); generators must be
    /// `Y { level, index }`.
    pub fn eval_word(&self, w: &Word) -> Result<KElement, KError> {
        let mut acc = self.k_identity();
        for l in w.letters() {
            let Generator::Y { level, index } = l.gen else {
                return Err(KError::GeneratorRange { level: usize::MAX, index: 0, size: 0 });
            };
            let g = self.k_generator(level, index)?;
            let g = if l.inverse { self.inv_unchecked(&g) } else { g };
            self.mul_assign(&mut acc, &g);
        }
        Ok(acc)
    }

    /// Evaluates `σ*(a, b, c)` by left fold of `·` and the solved inverse.
    pub fn eval_sigma(&self, variant: SigmaVariant, args: [&KElement; 3]) -> KElement {
        let mut acc = self.k_identity();
        for l in sigma_star(variant).letters() {
            let Generator::Var(name) = &l.gen else { unreachable!("sigma is over x, y, z") };
            let v = args[["x", "y", "z"].iter().position(|n| n == name).expect("sigma variable")];
            let g = if l.inverse { self.inv_unchecked(v) } else { v.clone() };
            self.mul_assign(&mut acc, &g);
        }
        acc
    }

    pub fn to_json(&self, e: &KElement) -> serde_json::Value {
        let lv = |b: &Bits| LevelJson { len: b.len(), hex: b.to_hex() };
        serde_json::json!({
            "levels": [lv(&e.v2), lv(&e.v1), lv(&e.v0)],
            "params": {
                "m": self.m,
                "sigma_variant": self.sigma_variant.map(|v| v.name()),
                "mask": self.quotient_mask,
            },
        })
    }

    pub fn from_hex(&self, v2: &str, v1: &str, v0: &str) -> Result<KElement, HexError> {
        Ok(KElement { v2: Bits::from_hex(self.n2, v2)?, v1: Bits::from_hex(self.n1, v1)?, v0: Bits::from_hex(self.n0, v0)? })
    }

    pub fn random(&self, rng: &mut dyn rand::RngCore) -> KElement {
        let v2 = Bits::random(self.n2, rng);
        let v1 = Bits::random(self.n1, rng);
        let mut e = KElement { v2, v1, v0: Bits::random(self.n0, rng) };
        self.apply_mask(&mut e);
        e
    }
}

/// Leftmost-first collection of a word of generators `(level, index)`.
///
/// Level-0 letters commute with everything and square to `e`, so they are
/// accumulated as a parity vector; moving them never changes the order in
/// which the other letters meet.
pub fn collect_literal(p: &KParams, word: &[(usize, usize)]) -> KElement {
    let key = |l: (usize, usize)| (2 - l.0, l.1);
    let mut w: Vec<(usize, usize)> = Vec::with_capacity(word.len());
    let mut v0 = Bits::zeros(p.n0);
    for &l in word {
        if l.0 == 0 {
            v0.toggle(l.1);
        } else {
            w.push(l);
        }
    }
    let mut i = 0;
    while i + 1 < w.len() {
        let (x, y) = (w[i], w[i + 1]);
        if x == y {
            w.drain(i..i + 2);
        } else if key(x) > key(y) {
            if x.0 == y.0 {
                let emitted = (x.0 - 1, pair_rank(x.1, y.1));
                w[i] = y;
                w[i + 1] = x;
                if emitted.0 == 0 {
                    v0.toggle(emitted.1);
                } else {
                    w.insert(i + 2, emitted);
                }
            } else {
                w.swap(i, i + 1);
            }
        } else {
            i += 1;
            continue;
        }
        i = i.saturating_sub(1);
    }
    let mut e = p.k_identity();
    for (j, idx) in w {
        e.level_mut(j).toggle(idx);
    }
    e.v0.xor_assign(&v0);
    p.apply_mask(&mut e);
    e
}

/// Evaluates `σ*(z₀,₀, z₁,₁, z₂,₄)` in the unmasked group and returns the
/// level-0 index it equals.
pub fn compute_ell_star(p: &KParams, variant: SigmaVariant) -> Result<usize, KError> {
    assert!(p.m >= 5, "compute_ell_star needs m >= 5");
    let base = KParams { quotient_mask: None, sigma_variant: None, ..p.clone() };
    let z = |i, k| base.z_gen(i, k).expect("in range");
    let r = base.eval_sigma(variant, [&z(0, 0), &z(1, 1), &z(2, 4)]);
    single_level0(&r)
}

fn single_level0(r: &KElement) -> Result<usize, KError> {
    if r.is_identity() {
        return Err(KError::TrivialSigma);
    }
    let ones: Vec<usize> = r.v0.ones().collect();
    if r.v2.is_zero() && r.v1.is_zero() && ones.len() == 1 {
        Ok(ones[0])
    } else {
        let word: Vec<String> = r.word().iter().map(|(j, i)| format!("y{j}_{i}")).collect();
        Err(KError::NotCentralGenerator(word.join(" ")))
    }
}

/// `K₂`: the parameters with `y_{0,ℓ*}` factored out.
pub fn make_k2(p: &KParams, variant: SigmaVariant) -> Result<KParams, KError> {
    let l = compute_ell_star(p, variant)?;
    Ok(p.clone().with_mask(l, variant))
}

/// The analogue of `ℓ*` on the toy: `σ*(y₂,₀, y₂,₁, y₂,₂)`.
pub fn toy_ell_star(p: &KParams, variant: SigmaVariant) -> Result<usize, KError> {
    let base = KParams { quotient_mask: None, sigma_variant: None, ..p.clone() };
    let g = |i| base.k_generator(2, i).expect("in range");
    single_level0(&base.eval_sigma(variant, [&g(0), &g(1), &g(2)]))
}

impl GroupContext for KParams {
    type Elem = KElement;

    fn identity(&self) -> KElement {
        self.k_identity()
    }

    fn mul(&self, a: &KElement, b: &KElement) -> KElement {
        self.mul_unchecked(a, b)
    }

    fn inv(&self, a: &KElement) -> KElement {
        self.inv_unchecked(a)
    }

    fn is_identity(&self, a: &KElement) -> bool {
        a.is_identity()
    }
}

impl KParams {
    /// Level-1 and level-0 index sets generated by the level-2 set `dom`.
    fn span_levels(&self, dom: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let l1: Vec<bool> = (0..self.n1)
            .map(|r| {
                let (a, b) = pair_unrank(r);
                b < self.n2 && dom[a] && dom[b]
            })
            .collect();
        let l0: Vec<bool> = (0..self.n0)
            .map(|r| {
                let (a, b) = pair_unrank(r);
                b < self.n1 && l1[a] && l1[b]
            })
            .collect();
        (l1, l0)
    }

    fn relabel_index(&self, t2: &[Option<usize>], level: usize, i: usize) -> Option<usize> {
        match level {
            2 => t2[i],
            _ => {
                let (a, b) = pair_unrank(i);
                Some(pair_rank(self.relabel_index(t2, level + 1, a)?, self.relabel_index(t2, level + 1, b)?))
            }
        }
    }

    fn relabel_exact(&self, t2: &[Option<usize>], x: &KElement) -> Option<KElement> {
        let mut out = self.k_identity();
        for j in 0..3 {
            for i in x.level(j).ones() {
                out.level_mut(j).toggle(self.relabel_index(t2, j, i)?);
            }
        }
        Some(out)
    }
}

impl KModel for KParams {
    const ASSOCIATIVE: bool = false;

    fn width(&self) -> usize {
        self.m
    }

    fn top_generator(&self, idx: usize) -> KElement {
        self.k_generator(2, idx).expect("top generator in range")
    }

    fn relabel(&self, pi: &PartialIso, x: &KElement) -> Option<KElement> {
        let t2 = pi.lookup_table(self.n2);
        let mut img = self.relabel_exact(&t2, x).or_else(|| {
            let l = self.quotient_mask?;
            let mut y = x.clone();
            y.v0.toggle(l);
            self.relabel_exact(&t2, &y)
        })?;
        self.apply_mask(&mut img);
        Some(img)
    }

    fn kernel_check(&self, pi: &PartialIso) -> KernelCheck {
        let Some(l) = self.quotient_mask else {
            return KernelCheck { ok: true, in_domain_span: false, in_range_span: false, fixed: true };
        };
        let mark = |s: std::collections::BTreeSet<usize>| {
            let mut v = vec![false; self.n2];
            s.into_iter().filter(|&i| i < self.n2).for_each(|i| v[i] = true);
            v
        };
        let (_, d0) = self.span_levels(&mark(pi.domain()));
        let (_, r0) = self.span_levels(&mark(pi.range()));
        let t2 = pi.lookup_table(self.n2);
        let fixed = self.relabel_index(&t2, 0, l) == Some(l);
        let (in_d, in_r) = (d0[l], r0[l]);
        KernelCheck { ok: (!in_d && !in_r) || (in_d && in_r && fixed), in_domain_span: in_d, in_range_span: in_r, fixed }
    }

    fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            model: "printed",
            m: self.m,
            sigma_variant: self.sigma_variant.map(|v| v.name().to_owned()),
            kernel: self.quotient_mask.map(|l| format!("y0_{l}")),
        }
    }

    fn encode(&self, x: &KElement) -> serde_json::Value {
        self.to_json(x)
    }

    fn random_element(&self, rng: &mut dyn rand::RngCore) -> KElement {
        self.random(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgroup::{closure, pi_s, pi_s_unchecked, verify_partial_iso, SPair};
    use crate::par::Exec;
    use rand::{Rng, SeedableRng};

    #[test]
    fn params_and_pairing() {
        let p = KParams::new(6);
        assert_eq!((p.n2, p.n1, p.n0), (18, 153, 11628));
        for r in 0..p.n1 {
            let (a, b) = pair_unrank(r);
            assert!(a < b && b < p.n2);
            assert_eq!(pair_rank(a, b), r);
            assert_eq!(pair_rank(b, a), r);
        }
        assert_eq!(pair_unrank(p.n0 - 1), (151, 152));
    }

    #[test]
    fn generator_examples() {
        let p = KParams::new(6);
        assert_eq!(p.z_gen(0, 0).unwrap(), p.k_generator(2, 0).unwrap());
        assert_eq!(p.z_gen(2, 4).unwrap(), p.k_generator(2, 16).unwrap());
        assert_eq!(p.z_gen(1, 1).unwrap(), p.k_generator(2, 7).unwrap());
        assert!(p.z_gen(3, 0).is_err());
        assert!(p.k_generator(1, 153).is_err());
        let g = p.k_generator(2, 5).unwrap();
        assert!(p.k_mul(&g, &g).unwrap().is_identity());
        assert_eq!(p.k_inv(&g).unwrap(), g);
        assert!(p.k_inv(&p.k_identity()).unwrap().is_identity());
        assert_eq!(p.k_mul(&g, &p.k_identity()).unwrap(), g);
        assert_eq!(p.k_mul(&g, &toy_params().k_identity()), Err(KError::Dimension));
    }

    #[test]
    fn level_two_commutator_and_inverse() {
        let p = KParams::new(6);
        let (a, b) = (p.k_generator(2, 0).unwrap(), p.k_generator(2, 7).unwrap());
        let c = p.mul(&p.mul(&p.mul(&p.inv(&a), &p.inv(&b)), &a), &b);
        assert_eq!(c, p.k_generator(1, pair_rank(0, 7)).unwrap());
        let ab = p.mul(&a, &b);
        let mut expect = ab.clone();
        expect.v1.toggle(pair_rank(0, 7));
        assert_eq!(p.inv(&ab), expect);
        assert!(p.mul(&ab, &p.inv(&ab)).is_identity());
    }

    #[test]
    fn fast_product_matches_literal_collection_on_toy() {
        let p = toy_params();
        let all = closure(
            &p,
            &(0..3).flat_map(|j| (0..3).map(move |i| (j, i))).map(|(j, i)| p.k_generator(j, i).unwrap()).collect::<Vec<_>>(),
            Exec::Sequential,
        );
        assert_eq!(all.len(), 512);
        for a in all.iter().step_by(7) {
            for b in all.iter().step_by(5) {
                let mut w = a.word();
                w.extend(b.word());
                assert_eq!(p.mul(a, b), collect_literal(&p, &w));
            }
        }
    }

    #[test]
    fn fast_product_matches_literal_collection_full_size() {
        let p = KParams::new(6);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let sparse = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut e = p.k_identity();
                for _ in 0..rng.gen_range(0..8) {
                    e.v2.toggle(rng.gen_range(0..p.n2));
                }
                for _ in 0..rng.gen_range(0..20) {
                    e.v1.toggle(rng.gen_range(0..p.n1));
                }
                for _ in 0..rng.gen_range(0..5) {
                    e.v0.toggle(rng.gen_range(0..p.n0));
                }
                e
            };
            let (a, b) = (sparse(&mut rng), sparse(&mut rng));
            let mut w = a.word();
            w.extend(b.word());
            assert_eq!(p.mul(&a, &b), collect_literal(&p, &w));
        }
    }

    #[test]
    fn solved_inverse_is_a_right_inverse() {
        let p = KParams::new(6);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let a = p.random(&mut rng);
            assert!(p.mul(&a, &p.inv(&a)).is_identity());
        }
    }

    #[test]
    fn printed_ell_star_and_excluded_pair() {
        let p = KParams::new(6);
        // the left-fold value of [[x,y],z] is two level-0 letters, not e
        let lit = compute_ell_star(&p, SigmaVariant::PaperLiteral).unwrap_err();
        assert!(matches!(lit, KError::NotCentralGenerator(_)));
        let k2 = make_k2(&p, SigmaVariant::Repaired).unwrap();
        let l = k2.quotient_mask.unwrap();
        assert_eq!(l, pair_rank(pair_rank(0, 7), pair_rank(0, 16)));
        for s in crate::kgroup::enumerate_s_star() {
            assert!(k2.kernel_check(&pi_s(s, 6).unwrap()).ok, "{s}");
        }
        assert!(!k2.kernel_check(&pi_s_unchecked(SPair::EXCLUDED, 6)).ok);
        let r = verify_partial_iso(&k2, &pi_s_unchecked(SPair::EXCLUDED, 6), 50, 1, Exec::Sequential);
        assert!(!r.pass);
        let z = |i, k| k2.z_gen(i, k).unwrap();
        assert!(k2.eval_sigma(SigmaVariant::Repaired, [&z(0, 0), &z(1, 1), &z(2, 4)]).is_identity());
        assert!(!k2.eval_sigma(SigmaVariant::Repaired, [&z(0, 2), &z(1, 3), &z(2, 4)]).is_identity());
    }

    #[test]
    fn json_round_trip() {
        let p = KParams::new(6);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let e = p.random(&mut rng);
        let j = p.to_json(&e);
        let hex = |i: usize| j["levels"][i]["hex"].as_str().unwrap().to_owned();
        assert_eq!(p.from_hex(&hex(0), &hex(1), &hex(2)).unwrap(), e);
        assert_eq!(j["levels"][2]["len"], 11628);
    }
}
