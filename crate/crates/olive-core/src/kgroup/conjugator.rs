// SPDX-License-Identifier: Apache-2.0

//! Conjugators realising partial isomorphisms inside `Sym(K)`.
//!
//! `K` acts on itself by right multiplication, `ρ(x): g ↦ g·x`. For a
//! partial isomorphism `π: A → B` between subgroups of equal order, the
//! orbits of `ρ(A)` are the left cosets `tA`. Pairing the `k`-th left coset
//! of `A` with the `k`-th left coset of `B` and setting `z(t·a) = t'·π(a)`
//! gives a permutation with `z(g·x) = z(g)·π(x)`, i.e. `z⁻¹ ρ(x) z = ρ(π(x))`.

use std::collections::HashMap;

use serde::Serialize;

use super::{closure, KError, KModel, PartialIso};
use crate::par::{self, Exec};

/// A finite model materialised as an indexed carrier.
pub struct Carrier<M: KModel> {
    pub elements: Vec<M::Elem>,
    pub index: HashMap<M::Elem, u32>,
}

impl<M: KModel> Carrier<M> {
    pub fn new(model: &M, exec: Exec) -> Self {
        let gens: Vec<_> = (0..model.top_generators()).map(|i| model.top_generator(i)).collect();
        let elements = closure(model, &gens, exec);
        let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        Carrier { elements, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn idx(&self, x: &M::Elem) -> u32 {
        self.index[x]
    }

    /// `ρ(x)` as an image list.
    pub fn right_action(&self, model: &M, x: &M::Elem, exec: Exec) -> Vec<u32> {
        par::map(exec, &self.elements, |g| self.idx(&model.mul(g, x)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugatorReport {
    pub carrier_size: usize,
    pub domain_order: usize,
    pub range_order: usize,
    pub cosets: usize,
    pub fixed_points: usize,
    /// `|carrier| · |A|` pointwise checks of `z(g·x) = z(g)·π(x)`.
    pub checks: u64,
    pub failures: u64,
    pub pass: bool,
}

pub struct Conjugator {
    /// `perm[i]` is the index of `z(carrier[i])`.
    pub perm: Vec<u32>,
    pub report: ConjugatorReport,
}

impl Conjugator {
    pub fn inverse(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        inv
    }
}

fn left_coset_reps<M: KModel>(model: &M, carrier: &Carrier<M>, sub: &[M::Elem]) -> Vec<u32> {
    let mut seen = vec![false; carrier.len()];
    let mut reps = Vec::new();
    for (i, t) in carrier.elements.iter().enumerate() {
        if seen[i] {
            continue;
        }
        reps.push(i as u32);
        for a in sub {
            seen[carrier.idx(&model.mul(t, a)) as usize] = true;
        }
    }
    reps
}

/// Builds and verifies the conjugator for `π` on a finite model.
pub fn toy_conjugator<M: KModel>(model: &M, carrier: &Carrier<M>, pi: &PartialIso, exec: Exec) -> Result<Conjugator, KError> {
    let dom: Vec<_> = pi.pairs().iter().map(|p| model.top_generator(p.0)).collect();
    let rng: Vec<_> = pi.pairs().iter().map(|p| model.top_generator(p.1)).collect();
    let a = closure(model, &dom, exec);
    let b = closure(model, &rng, exec);
    if a.len() != b.len() {
        return Err(KError::OrderMismatch(a.len(), b.len()));
    }
    let pi_a: Vec<M::Elem> = a.iter().map(|x| model.relabel(pi, x).ok_or(KError::NotIsomorphism)).collect::<Result<_, _>>()?;
    let ta = left_coset_reps(model, carrier, &a);
    let tb = left_coset_reps(model, carrier, &b);
    debug_assert_eq!(ta.len(), tb.len());
    let mut perm = vec![u32::MAX; carrier.len()];
    for (&t, &u) in ta.iter().zip(&tb) {
        let (t, u) = (&carrier.elements[t as usize], &carrier.elements[u as usize]);
        for (x, px) in a.iter().zip(&pi_a) {
            perm[carrier.idx(&model.mul(t, x)) as usize] = carrier.idx(&model.mul(u, px));
        }
    }
    let mut hit = vec![false; carrier.len()];
    for &p in &perm {
        if p == u32::MAX || std::mem::replace(&mut hit[p as usize], true) {
            return Err(KError::NotIsomorphism);
        }
    }
    let failures = if M::ASSOCIATIVE {
        check_by_tables(model, carrier, &perm, &dom, &rng, &a, &pi_a, exec)
    } else {
        check_direct(model, carrier, &perm, &a, &pi_a, exec)
    };
    let report = ConjugatorReport {
        carrier_size: carrier.len(),
        domain_order: a.len(),
        range_order: b.len(),
        cosets: ta.len(),
        fixed_points: perm.iter().enumerate().filter(|(i, &p)| *i as u32 == p).count(),
        checks: (carrier.len() * a.len()) as u64,
        failures,
        pass: failures == 0,
    };
    Ok(Conjugator { perm, report })
}

/// Counts the `(g, x)` with `z(g·x) != z(g)·π(x)`, multiplying directly.
fn check_direct<M: KModel>(model: &M, carrier: &Carrier<M>, perm: &[u32], a: &[M::Elem], pi_a: &[M::Elem], exec: Exec) -> u64 {
    par::map(exec, &carrier.elements, |g| {
        let zg = &carrier.elements[perm[carrier.idx(g) as usize] as usize];
        a.iter()
            .zip(pi_a)
            .filter(|(x, px)| perm[carrier.idx(&model.mul(g, x)) as usize] != carrier.idx(&model.mul(zg, px)))
            .count() as u64
    })
    .into_iter()
    .sum()
}

/// The same count for associative models. Each `x ∈ A` is reached from `e`
/// along a spanning tree, `x = x'·d_i`, so `g·x = (g·x')·d_i` is one lookup
/// in the table of `ρ(d_i)`. The right-hand side follows the same tree with
/// `ρ(π(d_i))` on the edges where `π(x) = π(x')·π(d_i)`; on the others
/// `z(g)·π(x)` is multiplied out.
#[allow(clippy::too_many_arguments)]
fn check_by_tables<M: KModel>(
    model: &M,
    carrier: &Carrier<M>,
    perm: &[u32],
    dom: &[M::Elem],
    rng: &[M::Elem],
    a: &[M::Elem],
    pi_a: &[M::Elem],
    exec: Exec,
) -> u64 {
    let d_tab: Vec<Vec<u32>> = dom.iter().map(|d| carrier.right_action(model, d, exec)).collect();
    let r_tab: Vec<Vec<u32>> = rng.iter().map(|r| carrier.right_action(model, r, exec)).collect();
    let e = carrier.idx(&model.identity());
    // breadth-first tree over A: (carrier index, parent position, generator)
    let mut tree: Vec<(u32, usize, usize)> = vec![(e, 0, 0)];
    let mut seen = vec![false; carrier.len()];
    seen[e as usize] = true;
    let mut next = 0;
    while next < tree.len() {
        let x = tree[next].0;
        for (i, t) in d_tab.iter().enumerate() {
            let y = t[x as usize];
            if !std::mem::replace(&mut seen[y as usize], true) {
                tree.push((y, next, i));
            }
        }
        next += 1;
    }
    let pi_idx: HashMap<u32, u32> = a.iter().zip(pi_a).map(|(x, px)| (carrier.idx(x), carrier.idx(px))).collect();
    if tree.len() != a.len() || tree.iter().any(|t| !pi_idx.contains_key(&t.0)) {
        // the tables disagree with the closure; fall back to multiplying
        return check_direct(model, carrier, perm, a, pi_a, exec);
    }
    let pi_of: Vec<u32> = tree.iter().map(|t| pi_idx[&t.0]).collect();
    let edge_ok: Vec<bool> = tree
        .iter()
        .enumerate()
        .map(|(k, &(_, p, i))| if k == 0 { pi_of[0] == e } else { r_tab[i][pi_of[p] as usize] == pi_of[k] })
        .collect();
    par::map(exec, &carrier.elements, |g| {
        let zg = perm[carrier.idx(g) as usize];
        let mut gx = vec![0u32; tree.len()];
        let mut rhs = vec![0u32; tree.len()];
        let mut failures = 0u64;
        for (k, &(_, p, i)) in tree.iter().enumerate() {
            if k == 0 {
                gx[0] = carrier.idx(g);
            } else {
                gx[k] = d_tab[i][gx[p] as usize];
            }
            rhs[k] = if k > 0 && edge_ok[k] {
                r_tab[i][rhs[p] as usize]
            } else {
                carrier.idx(&model.mul(&carrier.elements[zg as usize], &carrier.elements[pi_of[k] as usize]))
            };
            failures += u64::from(perm[gx[k] as usize] != rhs[k]);
        }
        failures
    })
    .into_iter()
    .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgroup::truncated::Truncated;
    use crate::words::{GroupContext, SigmaVariant};

    #[test]
    fn toy_conjugators() {
        let k2 = Truncated::k2(1, SigmaVariant::Repaired).unwrap();
        let carrier = Carrier::new(&k2, Exec::Sequential);
        assert_eq!(carrier.len(), 8192);
        let id = toy_conjugator(&k2, &carrier, &PartialIso::default(), Exec::Sequential).unwrap();
        assert!(id.report.pass && id.report.fixed_points == 8192);
        let pi = PartialIso::new(vec![(0, 1), (2, 2)]).unwrap();
        let c = toy_conjugator(&k2, &carrier, &pi, Exec::Sequential).unwrap();
        assert!(c.report.pass, "{:?}", c.report);
        // z⁻¹ ρ(x) z = ρ(π(x)) as permutations, for a generator
        let x = k2.generator(0);
        let rho = carrier.right_action(&k2, &x, Exec::Sequential);
        let rho_pi = carrier.right_action(&k2, &k2.generator(1), Exec::Sequential);
        let zinv = c.inverse();
        for g in 0..carrier.len() {
            // right actions compose left to right: g^(z⁻¹ ρ z)
            let img = c.perm[rho[zinv[g] as usize] as usize];
            assert_eq!(img, rho_pi[g]);
        }
    }

    #[test]
    fn table_check_matches_direct_check() {
        let k2 = Truncated::k2(1, SigmaVariant::Repaired).unwrap();
        let carrier = Carrier::new(&k2, Exec::Sequential);
        let pi = PartialIso::new(vec![(0, 1), (1, 0)]).unwrap();
        let dom = [k2.top_generator(0), k2.top_generator(1)];
        let rng = [k2.top_generator(1), k2.top_generator(0)];
        let a = closure(&k2, &dom, Exec::Sequential);
        let pi_a: Vec<_> = a.iter().map(|x| k2.relabel(&pi, x).unwrap()).collect();
        let mut perm = toy_conjugator(&k2, &carrier, &pi, Exec::Sequential).unwrap().perm;
        let count = |perm: &[u32], pi_a: &[_]| {
            let t = check_by_tables(&k2, &carrier, perm, &dom, &rng, &a, pi_a, Exec::Sequential);
            assert_eq!(t, check_direct(&k2, &carrier, perm, &a, pi_a, Exec::Sequential));
            t
        };
        assert_eq!(count(&perm, &pi_a), 0);
        perm.swap(3, 700);
        let broken = count(&perm, &pi_a);
        assert!(broken > 0);
        // a wrong image of one element breaks a tree edge
        let mut bad_pi = pi_a.clone();
        bad_pi[5] = k2.identity();
        assert!(count(&perm, &bad_pi) > broken);
    }
}
