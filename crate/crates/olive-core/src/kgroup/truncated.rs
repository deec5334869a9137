// SPDX-License-Identifier: Apache-2.0

//! A consistent model of the tiered group.
//!
//! Elements are units `1 + p` of `A = F₂⟨X₀,…,X_{n-1}⟩ / (X_i², deg ≥ 5)`,
//! stored as the bits of `p`. The degree-`d` part occupies `n^d` slots,
//! slot `Σ c_t n^{d-1-t}` holding the monomial `X_{c₀}⋯X_{c_{d-1}}`; slots
//! with two equal adjacent letters are always zero.
//!
//! The generators `1 + X_i` are involutions, commutators of two generators
//! start in degree 2, and `[[g_a,g_b],[g_a,g_c]]` is `1 + L` with `L`
//! homogeneous of degree 4, hence central. Factoring out `⟨1 + L⟩` gives the
//! quotient used as `K₂`: cosets are `{p, p ⊕ L}`, canonicalised by clearing
//! the lowest set bit of `L`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{Fingerprint, KError, KModel, KernelCheck, PartialIso};
use crate::bits::{Bits, HexError};
use crate::words::{sigma_star, Generator, GroupContext, SigmaVariant};

pub const DEGREE: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Kernel {
    l: Bits,
    pivot: usize,
    variant: SigmaVariant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncated {
    m: usize,
    n: usize,
    pow: [usize; DEGREE + 1],
    offset: [usize; DEGREE + 2],
    /// Slots without two equal adjacent letters.
    valid: Bits,
    kernel: Option<Kernel>,
}

/// An element `1 + p`, stored as `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TElement(pub Bits);

impl TElement {
    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Monomial(pub Vec<usize>);

impl Truncated {
    /// `K₁` on `3m` generators.
    pub fn k1(m: usize) -> Self {
        assert!(m >= 1, "m must be positive");
        let n = 3 * m;
        let mut pow = [1usize; DEGREE + 1];
        for d in 1..=DEGREE {
            pow[d] = pow[d - 1] * n;
        }
        let mut offset = [0usize; DEGREE + 2];
        for d in 2..=DEGREE + 1 {
            offset[d] = offset[d - 1] + pow[d - 1];
        }
        let mut t = Truncated { m, n, pow, offset, valid: Bits::zeros(0), kernel: None };
        t.valid =
            Bits::from_indices(t.bit_len(), (0..t.bit_len()).filter(|&pos| t.monomial(pos).0.windows(2).all(|w| w[0] != w[1])));
        t
    }

    /// The toy: three generators.
    pub fn toy() -> Self {
        Truncated::k1(1)
    }

    /// Arguments of `σ*` defining the kernel: `(z₀,₀, z₁,₁, z₂,₄)` when
    /// `m ≥ 5`, else `(z₀,₀, z₁,₀, z₂,₀)`.
    pub fn kernel_args(m: usize) -> [(usize, usize); 3] {
        if m >= 5 {
            [(0, 0), (1, 1), (2, 4)]
        } else {
            [(0, 0), (1, 0), (2, 0)]
        }
    }

    /// `K₂ = K₁ / ⟨σ*(kernel args)⟩`. The σ* value must be a non-trivial
    /// central element.
    pub fn k2(m: usize, variant: SigmaVariant) -> Result<Self, KError> {
        let mut t = Truncated::k1(m);
        let [a, b, c] = Truncated::kernel_args(m).map(|(i, k)| t.z(i, k));
        let s = t.eval_sigma(variant, [&a, &b, &c]);
        if s.is_identity() {
            return Err(KError::TrivialSigma);
        }
        if s.0.ones().any(|i| i < t.offset[DEGREE]) {
            return Err(KError::NotCentralGenerator(t.describe(&s)));
        }
        let pivot = s.0.ones().next().expect("non-zero");
        t.kernel = Some(Kernel { l: s.0, pivot, variant });
        Ok(t)
    }

    pub fn letters(&self) -> usize {
        self.n
    }

    pub fn bit_len(&self) -> usize {
        self.offset[DEGREE + 1]
    }

    pub fn has_kernel(&self) -> bool {
        self.kernel.is_some()
    }

    /// The central element factored out, as `p`.
    pub fn kernel_element(&self) -> Option<TElement> {
        self.kernel.as_ref().map(|k| TElement(k.l.clone()))
    }

    pub fn generator(&self, i: usize) -> TElement {
        assert!(i < self.n, "generator out of range");
        TElement(Bits::from_indices(self.bit_len(), [self.offset[1] + i]))
    }

    /// Decodes bit position `pos` as a monomial.
    pub fn monomial(&self, pos: usize) -> Monomial {
        let d = (1..=DEGREE).rev().find(|&d| pos >= self.offset[d]).expect("valid slot");
        let mut u = pos - self.offset[d];
        let mut letters = vec![0; d];
        for t in (0..d).rev() {
            letters[t] = u % self.n;
            u /= self.n;
        }
        Monomial(letters)
    }

    pub fn slot(&self, letters: &[usize]) -> usize {
        let d = letters.len();
        assert!((1..=DEGREE).contains(&d));
        self.offset[d] + letters.iter().fold(0, |acc, &c| acc * self.n + c)
    }

    /// `p` as a sum of monomials, e.g. `X0X7X0X16 + …`.
    pub fn describe(&self, x: &TElement) -> String {
        if x.is_identity() {
            return "1".into();
        }
        let terms: Vec<String> =
            x.0.ones().map(|pos| self.monomial(pos).0.iter().map(|c| format!("X{c}")).collect::<String>()).collect();
        format!("1 + {}", terms.join(" + "))
    }

    /// The algebra product `pq`, truncated.
    fn amul(&self, p: &Bits, q: &Bits) -> Bits {
        let mut out = Bits::zeros(self.bit_len());
        self.amul_into(&mut out, p, q);
        out
    }

    fn amul_into(&self, out: &mut Bits, p: &Bits, q: &Bits) {
        let n = self.n;
        for pos in p.ones() {
            if pos >= self.offset[DEGREE] {
                break;
            }
            let i = (1..DEGREE).rev().find(|&d| pos >= self.offset[d]).expect("valid slot");
            let u = pos - self.offset[i];
            let last = u % n;
            for j in 1..=DEGREE - i {
                let dst = self.offset[i + j] + u * self.pow[j];
                let src = self.offset[j];
                let blk = self.pow[j - 1];
                // skip monomials of q starting with the last letter of u
                out.xor_range_from(dst, q, src, src + last * blk);
                out.xor_range_from(dst + (last + 1) * blk, q, src + (last + 1) * blk, src + self.pow[j]);
            }
        }
    }

    fn canonical(&self, mut p: Bits) -> TElement {
        if let Some(k) = &self.kernel {
            if p.get(k.pivot) {
                p.xor_assign(&k.l);
            }
        }
        TElement(p)
    }

    pub fn eval_sigma(&self, variant: SigmaVariant, args: [&TElement; 3]) -> TElement {
        let mut acc = self.identity();
        for l in sigma_star(variant).letters() {
            let Generator::Var(name) = &l.gen else { unreachable!("sigma is over x, y, z") };
            let v = args[["x", "y", "z"].iter().position(|n| n == name).expect("sigma variable")];
            acc = if l.inverse { self.mul(&acc, &self.inv(v)) } else { self.mul(&acc, v) };
        }
        acc
    }

    pub fn from_hex(&self, s: &str) -> Result<TElement, HexError> {
        Ok(TElement(Bits::from_hex(self.bit_len(), s)?))
    }

    fn support_ok(&self, allowed: &[bool], p: &Bits) -> bool {
        p.ones().all(|pos| self.monomial(pos).0.iter().all(|&c| allowed[c]))
    }

    fn relabel_exact(&self, table: &[Option<usize>], p: &Bits) -> Option<Bits> {
        let mut out = Bits::zeros(self.bit_len());
        for pos in p.ones() {
            let letters: Option<Vec<usize>> = self.monomial(pos).0.iter().map(|&c| table[c]).collect();
            out.toggle(self.slot(&letters?));
        }
        Some(out)
    }

    fn mask_of(&self, s: BTreeSet<usize>) -> Vec<bool> {
        let mut v = vec![false; self.n];
        s.into_iter().filter(|&i| i < self.n).for_each(|i| v[i] = true);
        v
    }
}

impl GroupContext for Truncated {
    type Elem = TElement;

    fn identity(&self) -> TElement {
        TElement(Bits::zeros(self.bit_len()))
    }

    /// `(1+p)(1+q) = 1 + (p + q + pq)`.
    fn mul(&self, a: &TElement, b: &TElement) -> TElement {
        let mut r = a.0.clone();
        r.xor_assign(&b.0);
        self.amul_into(&mut r, &a.0, &b.0);
        self.canonical(r)
    }

    /// `(1+p)⁻¹ = 1 + p + p² + p³ + p⁴`.
    fn inv(&self, a: &TElement) -> TElement {
        let mut acc = a.0.clone();
        let mut pk = a.0.clone();
        for _ in 2..=DEGREE {
            pk = self.amul(&pk, &a.0);
            if pk.is_zero() {
                break;
            }
            acc.xor_assign(&pk);
        }
        self.canonical(acc)
    }

    fn is_identity(&self, a: &TElement) -> bool {
        a.is_identity()
    }
}

impl KModel for Truncated {
    fn width(&self) -> usize {
        self.m
    }

    fn top_generator(&self, idx: usize) -> TElement {
        self.generator(idx)
    }

    fn relabel(&self, pi: &PartialIso, x: &TElement) -> Option<TElement> {
        let table = pi.lookup_table(self.n);
        let img = self.relabel_exact(&table, &x.0).or_else(|| {
            let k = self.kernel.as_ref()?;
            let mut y = x.0.clone();
            y.xor_assign(&k.l);
            self.relabel_exact(&table, &y)
        })?;
        Some(self.canonical(img))
    }

    fn kernel_check(&self, pi: &PartialIso) -> KernelCheck {
        let Some(k) = &self.kernel else {
            return KernelCheck { ok: true, in_domain_span: false, in_range_span: false, fixed: true };
        };
        let in_d = self.support_ok(&self.mask_of(pi.domain()), &k.l);
        let in_r = self.support_ok(&self.mask_of(pi.range()), &k.l);
        let fixed = self.relabel_exact(&pi.lookup_table(self.n), &k.l).as_ref() == Some(&k.l);
        KernelCheck { ok: (!in_d && !in_r) || (in_d && in_r && fixed), in_domain_span: in_d, in_range_span: in_r, fixed }
    }

    fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            model: "truncated",
            m: self.m,
            sigma_variant: self.kernel.as_ref().map(|k| k.variant.name().to_owned()),
            kernel: self.kernel.as_ref().map(|_| {
                let [a, b, c] = Truncated::kernel_args(self.m);
                format!("sigma(z{}_{}, z{}_{}, z{}_{})", a.0, a.1, b.0, b.1, c.0, c.1)
            }),
        }
    }

    fn encode(&self, x: &TElement) -> serde_json::Value {
        serde_json::json!({ "len": self.bit_len(), "hex": x.0.to_hex() })
    }

    fn random_element(&self, rng: &mut dyn rand::RngCore) -> TElement {
        let mut p = Bits::random(self.bit_len(), rng);
        p.and_assign(&self.valid);
        self.canonical(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgroup::{closure, enumerate_s_star, pi_s, pi_s_unchecked, verify_partial_iso, SPair};
    use crate::par::Exec;
    use crate::words::commutator;
    use rand::SeedableRng;

    /// Independent oracle: elements as sets of monomials (letter tuples).
    type Poly = BTreeSet<Vec<usize>>;

    fn omul(p: &Poly, q: &Poly) -> Poly {
        let mut out: Poly = p.symmetric_difference(q).cloned().collect();
        for u in p {
            for v in q {
                if u.len() + v.len() <= DEGREE && u.last() != v.first() {
                    let w: Vec<usize> = u.iter().chain(v).copied().collect();
                    if !out.remove(&w) {
                        out.insert(w);
                    }
                }
            }
        }
        out
    }

    fn to_poly(t: &Truncated, x: &TElement) -> Poly {
        x.0.ones().map(|pos| t.monomial(pos).0).collect()
    }

    #[test]
    fn layout() {
        let t = Truncated::k1(6);
        assert_eq!(t.bit_len(), 18 + 324 + 5832 + 104976);
        assert_eq!(t.monomial(t.slot(&[3, 0, 17, 2])).0, vec![3, 0, 17, 2]);
        assert_eq!(t.monomial(5).0, vec![5]);
    }

    #[test]
    fn product_matches_set_oracle() {
        let t = Truncated::toy();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let (a, b) = (t.random_element(&mut rng), t.random_element(&mut rng));
            let prod = t.mul(&a, &b);
            assert_eq!(to_poly(&t, &prod), omul(&to_poly(&t, &a), &to_poly(&t, &b)));
            assert!(t.mul(&a, &t.inv(&a)).is_identity());
            assert!(t.mul(&t.inv(&a), &a).is_identity());
        }
    }

    #[test]
    fn toy_orders() {
        let t = Truncated::toy();
        let gens: Vec<_> = (0..3).map(|i| t.generator(i)).collect();
        assert_eq!(closure(&t, &gens, Exec::Sequential).len(), 16384);
        let t2 = Truncated::k2(1, SigmaVariant::Repaired).unwrap();
        let gens: Vec<_> = (0..3).map(|i| t2.generator(i)).collect();
        assert_eq!(closure(&t2, &gens, Exec::Sequential).len(), 8192);
    }

    #[test]
    fn kernel_is_central_degree_four() {
        let t = Truncated::k1(6);
        let [a, b, c] = [t.z(0, 0), t.z(1, 1), t.z(2, 4)];
        let s = t.eval_sigma(SigmaVariant::Repaired, [&a, &b, &c]);
        let terms = to_poly(&t, &s);
        assert!(!terms.is_empty() && terms.iter().all(|u| u.len() == 4));
        // the leading terms of [[x,y],[x,z]] in the letters 0, 7, 16
        assert!(terms.contains(&vec![0, 7, 0, 16]));
        assert!(terms.iter().all(|u| u.iter().all(|c| [0, 7, 16].contains(c))));
        assert!(Truncated::k2(6, SigmaVariant::PaperLiteral).unwrap_err().to_string().contains("central"));
    }

    #[test]
    fn quotient_outcomes() {
        let k2 = Truncated::k2(6, SigmaVariant::Repaired).unwrap();
        let z = |i, k| k2.z(i, k);
        assert!(k2.eval_sigma(SigmaVariant::Repaired, [&z(0, 0), &z(1, 1), &z(2, 4)]).is_identity());
        assert!(!k2.eval_sigma(SigmaVariant::Repaired, [&z(0, 2), &z(1, 3), &z(2, 4)]).is_identity());
        // the word-level commutator agrees with the built-in evaluation
        let w = commutator(
            &commutator(&crate::words::Word::var("x"), &crate::words::Word::var("y")),
            &commutator(&crate::words::Word::var("x"), &crate::words::Word::var("z")),
        );
        assert_eq!(w, sigma_star(SigmaVariant::Repaired));
    }

    #[test]
    fn partial_isos() {
        let k2 = Truncated::k2(6, SigmaVariant::Repaired).unwrap();
        for s in enumerate_s_star() {
            let r = verify_partial_iso(&k2, &pi_s(s, 6).unwrap(), 200, 7, Exec::Sequential);
            assert!(r.pass, "{s}: {r:?}");
        }
        let bad = verify_partial_iso(&k2, &pi_s_unchecked(SPair::EXCLUDED, 6), 200, 7, Exec::Sequential);
        assert!(!bad.pass && bad.kernel.in_domain_span && !bad.kernel.in_range_span);
    }

    #[test]
    fn relabel_is_multiplicative_on_quotient() {
        let k2 = Truncated::k2(6, SigmaVariant::Repaired).unwrap();
        let pi = pi_s(SPair::from_sets(&[0, 1], &[2]).unwrap(), 6).unwrap();
        let a = k2.mul(&k2.z(0, 0), &k2.z(2, 1));
        let b = k2.mul(&k2.z(2, 4), &k2.z(1, 0));
        let ra = k2.relabel(&pi, &a).unwrap();
        let rb = k2.relabel(&pi, &b).unwrap();
        assert_eq!(k2.relabel(&pi, &k2.mul(&a, &b)).unwrap(), k2.mul(&ra, &rb));
        assert_eq!(k2.relabel(&pi, &k2.z(0, 0)).unwrap(), k2.z(0, 2));
        assert_eq!(k2.relabel(&pi, &k2.z(1, 1)), None);
    }
}
