// SPDX-License-Identifier: Apache-2.0

//! Expanded trees and their flattened structures.
//!
//! An expanded tree is a finite forest `(T, ≤_tr)` with a linear order
//! `<_lin`, a subset `P` and injections `F₀, F₁ : P → T ∖ P` sending each
//! `t ∈ P` to two of its immediate successors, with everything above `t`
//! lying above `F₀(t)` or `F₁(t)`, and `<_lin` placing the cone of `F₀(s)`
//! before `s` and the cone of `F₁(s)` after it.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// File form: `parent[v]` is the tree predecessor of `v`, `lin` lists the
/// nodes in increasing `<_lin` order, `F0`/`F1` are `[t, F(t)]` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedTree {
    pub nodes: usize,
    pub parent: Vec<Option<usize>>,
    pub lin: Vec<usize>,
    #[serde(rename = "P")]
    pub p: Vec<usize>,
    #[serde(rename = "F0")]
    pub f0: Vec<[usize; 2]>,
    #[serde(rename = "F1")]
    pub f1: Vec<[usize; 2]>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EtrError {
    #[error("malformed input: {0}")]
    Structural(String),
    #[error("the tree violates axioms {0:?}")]
    Invalid(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Axiom label, `a` to `h`.
    pub clause: char,
    pub witness: Vec<usize>,
    pub detail: String,
}

/// Validated lookups for an expanded tree.
struct View<'a> {
    t: &'a ExpandedTree,
    in_p: Vec<bool>,
    /// Position of each node in `<_lin`.
    rank: Vec<usize>,
    /// `F_ℓ` as partial functions; the first pair for a repeated source.
    f: [Vec<Option<usize>>; 2],
}

fn structural(t: &ExpandedTree) -> Result<View<'_>, EtrError> {
    let n = t.nodes;
    let err = |m: String| Err(EtrError::Structural(m));
    if t.parent.len() != n {
        return err(format!("parent has {} entries for {n} nodes", t.parent.len()));
    }
    if let Some(v) = t.parent.iter().flatten().find(|&&v| v >= n) {
        return err(format!("parent {v} out of range"));
    }
    let mut rank = vec![usize::MAX; n];
    if t.lin.len() != n {
        return err("lin is not a permutation of the nodes".to_owned());
    }
    for (i, &v) in t.lin.iter().enumerate() {
        if v >= n || rank[v] != usize::MAX {
            return err("lin is not a permutation of the nodes".to_owned());
        }
        rank[v] = i;
    }
    let mut in_p = vec![false; n];
    for &v in &t.p {
        if v >= n {
            return err(format!("P member {v} out of range"));
        }
        in_p[v] = true;
    }
    let mut f = [vec![None; n], vec![None; n]];
    for (l, pairs) in [&t.f0, &t.f1].into_iter().enumerate() {
        for &[a, b] in pairs {
            if a >= n || b >= n {
                return err(format!("F{l} pair ({a}, {b}) out of range"));
            }
            f[l][a].get_or_insert(b);
        }
    }
    Ok(View { t, in_p, rank, f })
}

impl View<'_> {
    /// Ancestors of `v` from its parent up, or `None` on a cycle.
    fn ancestors(&self, v: usize) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = self.t.parent[v];
        while let Some(u) = cur {
            if u == v || out.len() > self.t.nodes {
                return None;
            }
            out.push(u);
            cur = self.t.parent[u];
        }
        Some(out)
    }

    /// `a ≤_tr b`, assuming acyclicity.
    fn le(&self, a: usize, b: usize) -> bool {
        let mut cur = Some(b);
        while let Some(u) = cur {
            if u == a {
                return true;
            }
            cur = self.t.parent[u];
        }
        false
    }
}

/// Violated axioms with witnesses; empty iff `t` is an expanded tree.
/// Axiom (a) failures (cycles) suppress the remaining checks.
pub fn validate_etr(t: &ExpandedTree) -> Result<Vec<Violation>, EtrError> {
    let v = structural(t)?;
    let n = t.nodes;
    let mut out = Vec::new();
    let viol = |clause, witness: Vec<usize>, detail: String| Violation { clause, witness, detail };
    for x in 0..n {
        if v.ancestors(x).is_none() {
            out.push(viol('a', vec![x], "node lies on a cycle of the parent relation".to_owned()));
        }
    }
    if !out.is_empty() {
        return Ok(out);
    }
    // (b) holds by construction: P is given as a list of nodes
    for (l, pairs) in [&t.f0, &t.f1].into_iter().enumerate() {
        let mut sources = BTreeSet::new();
        let mut targets = BTreeSet::new();
        for &[a, b] in pairs {
            if !sources.insert(a) {
                out.push(viol('c', vec![a], format!("F{l} has two values at {a}")));
            }
            if !targets.insert(b) {
                out.push(viol('c', vec![b], format!("F{l} is not one-to-one at {b}")));
            }
            if !v.in_p[a] {
                out.push(viol('c', vec![a, b], format!("F{l} is defined at {a} outside P")));
            }
            if v.in_p[b] {
                out.push(viol('c', vec![a, b], format!("F{l}({a}) = {b} lies in P")));
            }
        }
        for &s in &t.p {
            if v.f[l][s].is_none() {
                out.push(viol('c', vec![s], format!("F{l} is undefined at {s} in P")));
            }
        }
    }
    let p_set: BTreeSet<usize> = t.p.iter().copied().collect();
    let r0: BTreeSet<usize> = t.f0.iter().map(|p| p[1]).collect();
    let r1: BTreeSet<usize> = t.f1.iter().map(|p| p[1]).collect();
    for x in 0..n {
        let count = [&p_set, &r0, &r1].iter().filter(|s| s.contains(&x)).count();
        if count != 1 {
            out.push(viol('d', vec![x], format!("node {x} lies in {count} of P, Rang F0, Rang F1")));
        }
    }
    for l in 0..2 {
        for &s in &t.p {
            if let Some(c) = v.f[l][s] {
                if t.parent[c] != Some(s) {
                    out.push(viol('e', vec![s, c], format!("F{l}({s}) = {c} is not an immediate successor of {s}")));
                }
            }
        }
    }
    for &s in &t.p {
        for x in 0..n {
            if x != s && v.le(s, x) {
                let through = (0..2).any(|l| v.f[l][s].is_some_and(|c| v.le(c, x)));
                if !through {
                    out.push(viol('f', vec![s, x], format!("{x} lies above {s} but above neither F0({s}) nor F1({s})")));
                }
            }
        }
    }
    // (g) holds once lin is a permutation
    for &s in &t.p {
        let (Some(c0), Some(c1)) = (v.f[0][s], v.f[1][s]) else { continue };
        for x in 0..n {
            if v.le(c0, x) && v.rank[x] >= v.rank[s] {
                out.push(viol('h', vec![s, x], format!("{x} lies above F0({s}) but not before {s}")));
            }
            if v.le(c1, x) && v.rank[x] <= v.rank[s] {
                out.push(viol('h', vec![s, x], format!("{x} lies above F1({s}) but not after {s}")));
            }
        }
    }
    Ok(out)
}

/// The structure induced on `P` with the two successor-cone relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatStructure {
    /// The members of `P`, increasing.
    pub points: Vec<usize>,
    /// Pairs `(η, ν)` of `P` with `η <_tr ν`.
    pub tree: Vec<(usize, usize)>,
    /// `P` in `<_lin` order.
    pub lin: Vec<usize>,
    /// `Q_ι = {(η, ν) : F_ι(η) ≤_tr ν}` over `P`.
    pub q: [Vec<(usize, usize)>; 2],
}

pub fn derive_ftr(t: &ExpandedTree) -> Result<FlatStructure, EtrError> {
    let bad = validate_etr(t)?;
    if !bad.is_empty() {
        return Err(EtrError::Invalid(bad.iter().map(|v| format!("({}) {}", v.clause, v.detail)).collect()));
    }
    let v = structural(t)?;
    let mut points = t.p.clone();
    points.sort_unstable();
    points.dedup();
    let mut tree = Vec::new();
    let mut q = [Vec::new(), Vec::new()];
    for &a in &points {
        for &b in &points {
            if a != b && v.le(a, b) {
                tree.push((a, b));
            }
            for (f, q) in v.f.iter().zip(q.iter_mut()) {
                if f[a].is_some_and(|c| v.le(c, b)) {
                    q.push((a, b));
                }
            }
        }
    }
    let lin = t.lin.iter().copied().filter(|&x| v.in_p[x]).collect();
    Ok(FlatStructure { points, tree, lin, q })
}

/// A random expanded tree with at most `max_p` members of `P`, nodes
/// relabelled at random. Each `F`-successor gets up to two `P` children.
pub fn random_etr(max_p: usize, rng: &mut impl Rng) -> ExpandedTree {
    // build with provisional labels, then permute
    let mut parent: Vec<Option<usize>> = Vec::new();
    let mut is_p: Vec<bool> = Vec::new();
    let mut f: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut new_node = |parent_of: Option<usize>, p: bool, parent: &mut Vec<Option<usize>>, children: &mut Vec<Vec<usize>>| {
        let id = parent.len();
        parent.push(parent_of);
        is_p.push(p);
        children.push(Vec::new());
        if let Some(u) = parent_of {
            children[u].push(id);
        }
        id
    };
    let roots = if max_p == 0 { 0 } else { rng.gen_range(1..=2.min(max_p)) };
    let mut queue: Vec<usize> = Vec::new();
    let mut p_count = 0;
    let mut root_ids = Vec::new();
    for _ in 0..roots {
        let r = new_node(None, true, &mut parent, &mut children);
        root_ids.push(r);
        queue.push(r);
        p_count += 1;
    }
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head];
        head += 1;
        for fl in f.iter_mut() {
            let c = new_node(Some(s), false, &mut parent, &mut children);
            fl.push((s, c));
            for _ in 0..rng.gen_range(0..=2) {
                if p_count < max_p {
                    let d = new_node(Some(c), true, &mut parent, &mut children);
                    queue.push(d);
                    p_count += 1;
                }
            }
        }
    }
    // in-order placement: cone of F0(s), s, cone of F1(s); an F-successor
    // precedes or follows its children's blocks, which are shuffled
    fn place(
        x: usize,
        rng: &mut impl Rng,
        parent_is_p: &[bool],
        children: &[Vec<usize>],
        f: &[Vec<(usize, usize)>; 2],
        out: &mut Vec<usize>,
    ) {
        if parent_is_p[x] {
            let c0 = f[0].iter().find(|p| p.0 == x).expect("F0 defined").1;
            let c1 = f[1].iter().find(|p| p.0 == x).expect("F1 defined").1;
            place(c0, rng, parent_is_p, children, f, out);
            out.push(x);
            place(c1, rng, parent_is_p, children, f, out);
        } else {
            let mut kids = children[x].clone();
            kids.shuffle(rng);
            let at = rng.gen_range(0..=kids.len());
            for (i, &k) in kids.iter().enumerate() {
                if i == at {
                    out.push(x);
                }
                place(k, rng, parent_is_p, children, f, out);
            }
            if at == kids.len() {
                out.push(x);
            }
        }
    }
    let mut order = Vec::new();
    root_ids.shuffle(rng);
    for &r in &root_ids {
        place(r, rng, &is_p, &children, &f, &mut order);
    }
    let n = parent.len();
    let mut relabel: Vec<usize> = (0..n).collect();
    relabel.shuffle(rng);
    let mut new_parent = vec![None; n];
    for (x, &p) in parent.iter().enumerate() {
        new_parent[relabel[x]] = p.map(|u| relabel[u]);
    }
    let mut p: Vec<usize> = (0..n).filter(|&x| is_p[x]).map(|x| relabel[x]).collect();
    p.sort_unstable();
    let map_f = |v: &[(usize, usize)]| {
        let mut out: Vec<[usize; 2]> = v.iter().map(|&(a, b)| [relabel[a], relabel[b]]).collect();
        out.sort_unstable();
        out
    };
    ExpandedTree {
        nodes: n,
        parent: new_parent,
        lin: order.iter().map(|&x| relabel[x]).collect(),
        p,
        f0: map_f(&f[0]),
        f1: map_f(&f[1]),
    }
}
