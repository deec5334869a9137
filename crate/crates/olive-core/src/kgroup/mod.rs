// SPDX-License-Identifier: Apache-2.0

//! The tiered finite 2-group, its central quotient and partial isomorphisms.
//!
//! Two models are provided.
//!
//! * [`tiered`]: the printed three-level presentation (`n₂ = 3m`,
//!   `n₁ = C(n₂,2)`, `n₀ = C(n₁,2)`) with multiplication defined by
//!   leftmost-first collection. Collection is a total function but the
//!   presentation is not consistent: level-1 generators are commutators of
//!   level-2 generators, which commute with every level-1 generator, so every
//!   level-1 commutator is forced to be trivial. The resulting product is
//!   not associative. Self-tests report this rather than hide it.
//! * [`truncated`]: units `1 + p` of the free algebra `F₂⟨X₀,…,X_{n-1}⟩`
//!   modulo `X_i² = 0` and all monomials of degree ≥ 5. This is a genuine
//!   finite 2-group in which `[[x,y],[x,z]]` of three generators is central
//!   and non-trivial, so it realises everything the witness construction
//!   needs of the tiered group.
//!
//! Both implement [`KModel`], which is what the witness pipeline consumes.

pub mod conjugator;
pub mod selftest;
pub mod tiered;
pub mod truncated;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::par::{self, Exec};
use crate::words::GroupContext;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum KError {
    #[error("generator index {index} out of range for level {level} (size {size})")]
    GeneratorRange { level: usize, index: usize, size: usize },
    #[error("z-generator ({i}, {k}) out of range for m = {m}")]
    ZRange { i: usize, k: usize, m: usize },
    #[error("element dimensions do not match the parameters")]
    Dimension,
    #[error("{0} is not in S*")]
    NotInSStar(SPair),
    #[error("partial map is not injective")]
    NotInjective,
    #[error("sigma word evaluates to {0}, not a single central generator")]
    NotCentralGenerator(String),
    #[error("sigma word evaluates to the identity")]
    TrivialSigma,
    #[error("domain and range subgroups have different orders ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("partial map does not extend to an isomorphism")]
    NotIsomorphism,
}

/// A pair `(u₁, u₂)` of subsets of `{0, 1, 2}`, stored as bit masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "SPairRepr", try_from = "SPairRepr")]
pub struct SPair {
    u1: u8,
    u2: u8,
}

#[derive(Serialize, Deserialize)]
struct SPairRepr {
    u1: Vec<u8>,
    u2: Vec<u8>,
}

impl From<SPair> for SPairRepr {
    fn from(s: SPair) -> Self {
        SPairRepr { u1: s.u1().collect(), u2: s.u2().collect() }
    }
}

impl TryFrom<SPairRepr> for SPair {
    type Error = String;

    fn try_from(r: SPairRepr) -> Result<Self, String> {
        SPair::from_sets(&r.u1, &r.u2).ok_or_else(|| "s-pair members must be below 3".to_owned())
    }
}

fn members(mask: u8) -> impl Iterator<Item = u8> {
    (0..3).filter(move |i| mask >> i & 1 == 1)
}

impl SPair {
    /// The pair excluded from `S*`.
    pub const EXCLUDED: SPair = SPair { u1: 0b001, u2: 0b110 };

    pub fn from_masks(u1: u8, u2: u8) -> Option<Self> {
        (u1 < 8 && u2 < 8).then_some(SPair { u1, u2 })
    }

    pub fn from_sets(u1: &[u8], u2: &[u8]) -> Option<Self> {
        let mask = |s: &[u8]| s.iter().try_fold(0u8, |m, &i| (i < 3).then_some(m | 1 << i));
        SPair::from_masks(mask(u1)?, mask(u2)?)
    }

    pub fn u1(self) -> impl Iterator<Item = u8> {
        members(self.u1)
    }

    pub fn u2(self) -> impl Iterator<Item = u8> {
        members(self.u2)
    }

    pub fn in_u1(self, l: usize) -> bool {
        l < 3 && self.u1 >> l & 1 == 1
    }

    pub fn in_u2(self, l: usize) -> bool {
        l < 3 && self.u2 >> l & 1 == 1
    }

    /// Every member of `u₁` is below every member of `u₂`, and the pair is
    /// not the excluded one.
    pub fn in_s_star(self) -> bool {
        let separated = self.u1().all(|a| self.u2().all(|b| a < b));
        separated && self != SPair::EXCLUDED
    }

    /// Short display form, e.g. `01|2`.
    pub fn tag(self) -> String {
        let s = |m: u8| members(m).map(|i| char::from(b'0' + i)).collect::<String>();
        format!("{}|{}", s(self.u1), s(self.u2))
    }
}

impl fmt::Display for SPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |it: &mut dyn Iterator<Item = u8>| it.map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({{{}}}, {{{}}})", s(&mut self.u1()), s(&mut self.u2()))
    }
}

/// `S*` in order of `(u₁, u₂)` masks.
pub fn enumerate_s_star() -> Vec<SPair> {
    (0..8u8).flat_map(|u1| (0..8u8).map(move |u2| SPair { u1, u2 })).filter(|s| s.in_s_star()).collect()
}

/// `(i, k)` naming the z-generator `z_{i,k}`.
pub type ZIndex = (usize, usize);

/// A partial injective map between level-2 generators (by index).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialIso {
    pairs: Vec<(usize, usize)>,
}

impl PartialIso {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self, KError> {
        pairs.sort_unstable();
        pairs.dedup();
        let sources: HashSet<_> = pairs.iter().map(|p| p.0).collect();
        let targets: HashSet<_> = pairs.iter().map(|p| p.1).collect();
        if sources.len() != pairs.len() || targets.len() != pairs.len() {
            return Err(KError::NotInjective);
        }
        Ok(PartialIso { pairs })
    }

    /// From `((i, k), (i', k'))` pairs of z-generators `z_{i,k} = y_{2, m·i + k}`.
    pub fn from_z_pairs(m: usize, pairs: &[(ZIndex, ZIndex)]) -> Result<Self, KError> {
        let idx = |(i, k): (usize, usize)| {
            if i < 3 && k < m {
                Ok(m * i + k)
            } else {
                Err(KError::ZRange { i, k, m })
            }
        };
        PartialIso::new(pairs.iter().map(|&(a, b)| Ok((idx(a)?, idx(b)?))).collect::<Result<_, KError>>()?)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn range(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn get(&self, src: usize) -> Option<usize> {
        self.pairs.binary_search_by_key(&src, |p| p.0).ok().map(|i| self.pairs[i].1)
    }

    pub fn inverse(&self) -> PartialIso {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        PartialIso { pairs }
    }

    pub(crate) fn lookup_table(&self, n: usize) -> Vec<Option<usize>> {
        let mut t = vec![None; n];
        for &(a, b) in &self.pairs {
            if a < n {
                t[a] = Some(b);
            }
        }
        t
    }
}

/// `π_s` without the `S*` check: `z_{ℓ,0} ↦ z_{ℓ,2}` for `ℓ ∈ u₁`,
/// `z_{ℓ,1} ↦ z_{ℓ,3}` and `z_{ℓ,4} ↦ z_{ℓ,4}` for `ℓ ∈ u₂`.
pub fn pi_s_unchecked(s: SPair, m: usize) -> PartialIso {
    assert!(m >= 5, "pi_s needs tuple width at least 5");
    let mut pairs = Vec::new();
    for l in s.u1() {
        pairs.push(((l as usize, 0), (l as usize, 2)));
    }
    for l in s.u2() {
        pairs.push(((l as usize, 1), (l as usize, 3)));
        pairs.push(((l as usize, 4), (l as usize, 4)));
    }
    PartialIso::from_z_pairs(m, &pairs).expect("pi_s is injective")
}

pub fn pi_s(s: SPair, m: usize) -> Result<PartialIso, KError> {
    if !s.in_s_star() {
        return Err(KError::NotInSStar(s));
    }
    Ok(pi_s_unchecked(s, m))
}

/// Identifies a model and its parameters in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub model: &'static str,
    pub m: usize,
    pub sigma_variant: Option<String>,
    /// Description of the central subgroup factored out, if any.
    pub kernel: Option<String>,
}

/// How a partial map interacts with the factored-out central subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelCheck {
    pub ok: bool,
    pub in_domain_span: bool,
    pub in_range_span: bool,
    pub fixed: bool,
}

/// The interface the witness pipeline needs from a tiered group model.
pub trait KModel: GroupContext {
    /// Whether `mul` is associative, so products may be regrouped.
    const ASSOCIATIVE: bool = true;

    /// Tuple width `m`.
    fn width(&self) -> usize;

    /// Number of top-level generators (`3m`).
    fn top_generators(&self) -> usize {
        3 * self.width()
    }

    fn top_generator(&self, idx: usize) -> Self::Elem;

    /// `z_{i,k} = y_{2, m·i + k}`.
    fn z(&self, i: usize, k: usize) -> Self::Elem {
        assert!(i < 3 && k < self.width(), "z-generator out of range");
        self.top_generator(self.width() * i + k)
    }

    /// The image of `x` under the homomorphism induced by `π`, if `x` lies
    /// in the subgroup generated by `Dom(π)`. Membership is decided by
    /// generator support of the normal form.
    fn relabel(&self, pi: &PartialIso, x: &Self::Elem) -> Option<Self::Elem>;

    /// Whether the factored-out central subgroup is respected by `π`.
    fn kernel_check(&self, pi: &PartialIso) -> KernelCheck;

    fn fingerprint(&self) -> Fingerprint;

    fn encode(&self, x: &Self::Elem) -> serde_json::Value;

    /// A uniformly random normal form.
    fn random_element(&self, rng: &mut dyn rand::RngCore) -> Self::Elem;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialIsoReport {
    pub pass: bool,
    pub pairs: Vec<(usize, usize)>,
    pub kernel: KernelCheck,
    pub samples: u64,
    pub homomorphism_failures: u64,
    /// Samples whose image fell outside the support test.
    pub support_failures: u64,
}

/// Checks that `π` induces a partial isomorphism: the kernel condition,
/// then `relabel(x₁⋯x_r) = π(x₁)⋯π(x_r)` and `relabel` of the product equal
/// to the product of `relabel`s on `samples` random words in the domain
/// generators.
pub fn verify_partial_iso<M: KModel>(model: &M, pi: &PartialIso, samples: u64, seed: u64, exec: Exec) -> PartialIsoReport {
    let kernel = model.kernel_check(pi);
    let pairs = pi.pairs().to_vec();
    let outcome = |i: u64| -> (bool, bool) {
        if pairs.is_empty() {
            let e = model.identity();
            return (model.relabel(pi, &e) == Some(model.identity()), true);
        }
        let mut rng = crate::rng::stream(seed, i);
        let word = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<(usize, usize)> {
            let len = rng.gen_range(1..=8);
            (0..len).map(|_| pairs[rng.gen_range(0..pairs.len())]).collect()
        };
        let (w1, w2) = (word(&mut rng), word(&mut rng));
        let eval = |w: &[(usize, usize)], tgt: bool| {
            w.iter().fold(model.identity(), |acc, &(a, b)| model.mul(&acc, &model.top_generator(if tgt { b } else { a })))
        };
        let (x1, x2) = (eval(&w1, false), eval(&w2, false));
        let prod = model.mul(&x1, &x2);
        let (Some(r1), Some(r2), Some(rp)) = (model.relabel(pi, &x1), model.relabel(pi, &x2), model.relabel(pi, &prod)) else {
            return (false, false);
        };
        let ok = r1 == eval(&w1, true) && r2 == eval(&w2, true) && rp == model.mul(&r1, &r2);
        (ok, true)
    };
    let results = par::map_range(exec, samples, outcome);
    let support_failures = results.iter().filter(|r| !r.1).count() as u64;
    let homomorphism_failures = results.iter().filter(|r| !r.0).count() as u64;
    PartialIsoReport {
        pass: kernel.ok && homomorphism_failures == 0,
        pairs,
        kernel,
        samples,
        homomorphism_failures,
        support_failures,
    }
}

/// Breadth-first closure of `gens` under right multiplication, in
/// discovery order.
pub fn closure<G: GroupContext>(ctx: &G, gens: &[G::Elem], exec: Exec) -> Vec<G::Elem> {
    let mut seen: HashMap<G::Elem, usize> = HashMap::new();
    let mut all = vec![ctx.identity()];
    seen.insert(ctx.identity(), 0);
    let mut frontier = vec![ctx.identity()];
    while !frontier.is_empty() {
        let products: Vec<Vec<G::Elem>> = par::map(exec, &frontier, |x| gens.iter().map(|g| ctx.mul(x, g)).collect());
        let mut next = Vec::new();
        for p in products.into_iter().flatten() {
            if !seen.contains_key(&p) {
                seen.insert(p.clone(), all.len());
                all.push(p.clone());
                next.push(p);
            }
        }
        frontier = next;
    }
    all
}
