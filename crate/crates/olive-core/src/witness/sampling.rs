// SPDX-License-Identifier: Apache-2.0

//! Random search for the forbidden quadruple in small groups.
//!
//! Uniform tuples almost never satisfy the hypotheses, so each sample
//! plants them: with `c = a_{1,5}`, it sets `a_{0,2} = c⁻¹ a_{0,0} c`,
//! `a_{t,3} = c⁻¹ a_{t,1} c` and picks `a_{t,4}` commuting with `c`
//! (`t = 2, 3`). All four formulas are then evaluated as written; a sample
//! is a finding when all four hold.

use rand::Rng;
use serde::Serialize;

use crate::kgroup::truncated::Truncated;
use crate::kgroup::KModel;
use crate::par::{self, Exec};
use crate::words::{CompiledFormula, FormulaSpec, GroupContext, SigmaVariant, SymmetricGroup, TUPLE_WIDTH};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupSampleReport {
    pub group: String,
    pub samples: u64,
    /// Samples where `φ₀[ā₀,ā₁] ∧ φ₁[ā₁,ā₂] ∧ φ₁[ā₁,ā₃]` held.
    pub hypotheses_held: u64,
    /// Samples where additionally `σ*(a_{0,0}, a_{2,1}, a_{3,4}) = e`.
    pub first_psi_atom_held: u64,
    pub findings: u64,
    pub first_finding: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplingReport {
    pub seed: u64,
    pub sigma_variant: SigmaVariant,
    pub samples: u64,
    pub groups: Vec<GroupSampleReport>,
    pub findings: u64,
    pub pass: bool,
}

/// The groups sampled, in round-robin order.
pub const GROUPS: [&str; 5] = ["toy-k", "S2", "S3", "S4", "S5"];

struct Outcome {
    hyp: bool,
    atom: bool,
    all: bool,
}

/// The formulas of the quadruple, compiled once per run.
struct Formulas {
    phi0: CompiledFormula,
    phi1: CompiledFormula,
    psi: CompiledFormula,
}

impl Formulas {
    fn new(variant: SigmaVariant) -> Self {
        Formulas {
            phi0: FormulaSpec::phi0().compile(),
            phi1: FormulaSpec::phi1().compile(),
            psi: FormulaSpec::psi(variant).compile(),
        }
    }
}

fn sample_one<G, F>(ctx: &G, draw: F, f: &Formulas, rng: &mut impl Rng) -> Outcome
where
    G: GroupContext,
    F: Fn(&mut dyn rand::RngCore) -> G::Elem,
{
    let mut t: Vec<Vec<G::Elem>> = (0..4).map(|_| (0..TUPLE_WIDTH).map(|_| draw(rng)).collect()).collect();
    let c = t[1][5].clone();
    let ci = ctx.inv(&c);
    let conj = |x: &G::Elem| ctx.mul(&ctx.mul(&ci, x), &c);
    t[0][2] = conj(&t[0][0]);
    for tt in [2, 3] {
        t[tt][3] = conj(&t[tt][1]);
        // rejection sampling for the centraliser, falling back to c or e
        let mut w = None;
        for _ in 0..16 {
            let x = draw(rng);
            if ctx.mul(&x, &c) == ctx.mul(&c, &x) {
                w = Some(x);
                break;
            }
        }
        t[tt][4] = w.unwrap_or_else(|| if rng.gen() { c.clone() } else { ctx.identity() });
    }
    let holds = |phi: &CompiledFormula, args: &[&[G::Elem]]| phi.holds(ctx, args).expect("tuples have width 6");
    let hyp = holds(&f.phi0, &[&t[0], &t[1]]) && holds(&f.phi1, &[&t[1], &t[2]]) && holds(&f.phi1, &[&t[1], &t[3]]);
    let (eq_atom, _) = &f.psi.atoms()[0];
    let values: Vec<G::Elem> = [&t[0], &t[2], &t[3]].iter().flat_map(|a| a.iter().cloned()).collect();
    let atom = hyp && ctx.is_identity(&eq_atom.eval(ctx, &values));
    let all = atom && holds(&f.psi, &[&t[0], &t[2], &t[3]]);
    Outcome { hyp, atom, all }
}

/// Draws `samples` planted quadruples, sample `i` in group
/// `GROUPS[i % 5]` from `rng::stream(seed, i)`.
pub fn sample_forbidden(samples: u64, seed: u64, variant: SigmaVariant, exec: Exec) -> SamplingReport {
    let toy = Truncated::toy();
    let sym: Vec<SymmetricGroup> = (2..=5).map(SymmetricGroup::new).collect();
    let f = Formulas::new(variant);
    let n = GROUPS.len() as u64;
    let outcomes = par::map_range(exec, samples, |i| {
        let mut rng = crate::rng::stream(seed, i);
        match (i % n) as usize {
            0 => sample_one(&toy, |r| toy.random_element(r), &f, &mut rng),
            g => {
                let s = &sym[g - 1];
                sample_one(s, |mut r| s.random_element(&mut r), &f, &mut rng)
            }
        }
    });
    let mut groups: Vec<GroupSampleReport> = GROUPS
        .iter()
        .map(|g| GroupSampleReport {
            group: g.to_string(),
            samples: 0,
            hypotheses_held: 0,
            first_psi_atom_held: 0,
            findings: 0,
            first_finding: None,
        })
        .collect();
    for (i, o) in outcomes.iter().enumerate() {
        let g = &mut groups[i % GROUPS.len()];
        g.samples += 1;
        g.hypotheses_held += o.hyp as u64;
        g.first_psi_atom_held += o.atom as u64;
        if o.all {
            g.findings += 1;
            g.first_finding.get_or_insert(i as u64);
        }
    }
    let findings = groups.iter().map(|g| g.findings).sum();
    SamplingReport { seed, sigma_variant: variant, samples, groups, findings, pass: findings == 0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_hypotheses_hold() {
        let r = sample_forbidden(500, 1, SigmaVariant::Repaired, Exec::Sequential);
        assert_eq!(r.findings, 0);
        for g in &r.groups {
            assert_eq!(g.samples, 100);
            assert_eq!(g.hypotheses_held, 100, "{}", g.group);
        }
        // non-abelian groups make the first atom fail sometimes and hold sometimes
        let s4 = &r.groups[3];
        assert!(s4.first_psi_atom_held > 0 && s4.first_psi_atom_held < 100);
    }
}
