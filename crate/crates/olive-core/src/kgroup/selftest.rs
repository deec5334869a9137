// SPDX-License-Identifier: Apache-2.0

//! Consistency checks for the group models: closure size, the defining
//! relations of the printed presentation, and sampled associativity.

use serde::Serialize;

use super::tiered::{pair_rank, KElement, KParams};
use super::KModel;
use crate::par::{self, Exec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub generators: u64,
    pub checks: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssocReport {
    pub seed: u64,
    pub samples: u64,
    pub failures: u64,
    /// Index of the first failing sample; replay with `rng::stream(seed, i)`.
    pub first_failure: Option<u64>,
}

fn gen_name(g: (usize, usize)) -> String {
    format!("y{}_{}", g.0, g.1)
}

/// Checks the identity and inverse laws on every generator, and every
/// defining relation of the printed presentation on every generator and
/// every unordered pair of generators: `g² = e`,
/// `[y_{j+1,a}, y_{j+1,b}] = y_{j,f{a,b}}`, and `gh = hg` for the pairs
/// that commute (different levels, or both on level 0).
///
/// Runs on the unmasked group of the same width.
pub fn check_relations(p: &KParams, exec: Exec) -> RelationReport {
    let p = KParams { quotient_mask: None, sigma_variant: None, ..p.clone() };
    let gens: Vec<(usize, usize)> = (0..3).rev().flat_map(|j| (0..p.level_size(j)).map(move |i| (j, i))).collect();
    let elems: Vec<KElement> = gens.iter().map(|g| p.k_generator(g.0, g.1).expect("in range")).collect();
    // gens lists level 2, then level 1, then level 0
    let offset = |g: (usize, usize)| [p.n2 + p.n1, p.n2, 0][g.0] + g.1;
    let n = gens.len() as u64;
    // One row per generator: the laws for it alone, then every later generator.
    let rows = par::map_range(exec, n, |i| {
        let gi = gens[i as usize];
        let x = &elems[i as usize];
        let mut failures = 0u64;
        let mut first = None;
        let mut fail = |what: String| {
            failures += 1;
            first.get_or_insert(what);
        };
        let mut l = x.clone();
        p.mul_assign(&mut l, x);
        if !l.is_identity() {
            fail(format!("{}^2 != e", gen_name(gi)));
        }
        // identity and inverse laws
        let e = p.k_identity();
        let xi = p.k_inv(x).expect("dimensions match");
        let mut r = e.clone();
        p.mul_assign(&mut r, x);
        l.clone_from(x);
        p.mul_assign(&mut l, &e);
        if r != *x || l != *x {
            fail(format!("e is not neutral for {}", gen_name(gi)));
        }
        l.clone_from(x);
        p.mul_assign(&mut l, &xi);
        r.clone_from(&xi);
        p.mul_assign(&mut r, x);
        if !l.is_identity() || !r.is_identity() {
            fail(format!("inverse law fails for {}", gen_name(gi)));
        }
        let mut checks = 3u64;
        for (&gj, y) in gens.iter().zip(&elems).skip(i as usize + 1) {
            checks += 1;
            if gi.0 == gj.0 && gi.0 > 0 {
                // x⁻¹ y⁻¹ x y with x, y involutions
                l.clone_from(x);
                p.mul_assign(&mut l, y);
                p.mul_assign(&mut l, x);
                p.mul_assign(&mut l, y);
                let want = (gi.0 - 1, pair_rank(gi.1, gj.1));
                if l != elems[offset(want)] {
                    fail(format!("[{}, {}] != {}", gen_name(gi), gen_name(gj), gen_name(want)));
                }
            } else {
                l.clone_from(x);
                p.mul_assign(&mut l, y);
                r.clone_from(y);
                p.mul_assign(&mut r, x);
                if l != r {
                    fail(format!("{} {} != {} {}", gen_name(gi), gen_name(gj), gen_name(gj), gen_name(gi)));
                }
            }
        }
        (checks, failures, first)
    });
    let mut rep = RelationReport { generators: n, checks: 0, failures: 0, first_failure: None };
    for (c, f, first) in rows {
        rep.checks += c;
        rep.failures += f;
        if rep.first_failure.is_none() {
            rep.first_failure = first;
        }
    }
    rep
}

/// Compares `(ab)c` with `a(bc)` on `samples` random triples of normal
/// forms; sample `i` draws from `rng::stream(seed, i)`.
pub fn check_associativity<M: KModel>(model: &M, samples: u64, seed: u64, exec: Exec) -> AssocReport {
    let bad = |i: u64| {
        let mut rng = crate::rng::stream(seed, i);
        let a = model.random_element(&mut rng);
        let b = model.random_element(&mut rng);
        let c = model.random_element(&mut rng);
        model.mul(&model.mul(&a, &b), &c) != model.mul(&a, &model.mul(&b, &c))
    };
    let failures = par::count_range(exec, samples, bad);
    let first_failure = if failures > 0 { par::first_in_range(exec, samples, bad) } else { None };
    AssocReport { seed, samples, failures, first_failure }
}

/// Same as [`check_associativity`] for the printed model, multiplying in
/// place.
pub fn check_associativity_printed(p: &KParams, samples: u64, seed: u64, exec: Exec) -> AssocReport {
    let bad = |i: u64| {
        let mut rng = crate::rng::stream(seed, i);
        let a = p.random(&mut rng);
        let b = p.random(&mut rng);
        let c = p.random(&mut rng);
        let mut left: KElement = a.clone();
        p.mul_assign(&mut left, &b);
        p.mul_assign(&mut left, &c);
        let mut bc = b;
        p.mul_assign(&mut bc, &c);
        let mut right = a;
        p.mul_assign(&mut right, &bc);
        left != right
    };
    let failures = par::count_range(exec, samples, bad);
    let first_failure = if failures > 0 { par::first_in_range(exec, samples, bad) } else { None };
    AssocReport { seed, samples, failures, first_failure }
}
