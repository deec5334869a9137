// SPDX-License-Identifier: Apache-2.0

//! Product-group witnesses for ladders.
//!
//! For a two-colour ladder `f̄` with triple set `J`, the witness assigns to
//! each `β < λ` a 6-tuple `ḡ_β` of functions `J → K₂ ⋊ ⟨z_s⟩`. Coordinate
//! `ᾱ = (α₀, α₁, α₂)` of `g_{β,k}` is `z_{ℓ,k}` when `β = α_ℓ`, `e` when
//! `β ∉ ᾱ` (components `k < 5`), and the formal conjugator `z_s` with
//! `s = s_{ᾱ,β}` for `k = 5`.
//!
//! Values are interned once and atom evaluations are memoised on the
//! interned arguments, so a sweep over many ladders performs only a few
//! hundred group operations at full size.

pub mod eval;
pub mod retract;
pub mod sampling;

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;

use crate::kgroup::{pi_s_unchecked, Fingerprint, KModel, SPair};
use crate::ladder::{Ladder, LadderError, Triple};
use crate::par::{self, Exec};
use crate::words::{AtomKind, FormulaSpec, SigmaVariant, TUPLE_WIDTH};

pub use eval::{eval_relative, Relative, Token};
pub use retract::{g5_negative_check, g5_retract, G5Error, G5LadderReport};

/// Index of an interned group element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ValueId(pub u32);

/// One coordinate of a witness component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoordValue {
    Concrete(ValueId),
    /// The formal conjugator `z_s`.
    Conj(SPair),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error("tuple width {0} is below 5")]
    Width(usize),
}

/// Three-valued result of an atom at one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    True,
    False,
    Undecided,
}

struct Atom {
    /// Letters as (position in `slots`, inverse).
    letters: Vec<(u8, bool)>,
    /// Distinct formula slots `t·6 + k`, in order of first use.
    slots: Vec<usize>,
    kind: AtomKind,
}

const PHI0: usize = 0;
const PHI1: [usize; 2] = [1, 2];
const PSI_EQ: usize = 3;
const PSI_NEQ: usize = 4;

struct Values<E> {
    elems: Vec<E>,
    ids: HashMap<E, u32>,
}

type MemoKey = (u8, [Option<CoordValue>; 3]);

/// Interning table, compiled formulas and atom memo for one model.
pub struct Evaluator<'m, M: KModel> {
    model: &'m M,
    variant: SigmaVariant,
    atoms: Vec<Atom>,
    values: Mutex<Values<M::Elem>>,
    memo: Mutex<HashMap<MemoKey, Outcome>>,
    /// `z[ℓ][k]` for `ℓ < 3`, `k < 5`.
    z: [[ValueId; 5]; 3],
    identity: ValueId,
}

impl<'m, M: KModel> Evaluator<'m, M> {
    pub fn new(model: &'m M, variant: SigmaVariant) -> Result<Self, WitnessError> {
        if model.width() < 5 {
            return Err(WitnessError::Width(model.width()));
        }
        let mut atoms = Vec::new();
        for spec in [FormulaSpec::phi0(), FormulaSpec::phi1(), FormulaSpec::psi(variant)] {
            for (w, kind) in spec.compile().atoms() {
                let mut slots: Vec<usize> = Vec::new();
                let letters = w
                    .letters()
                    .iter()
                    .map(|&(s, inv)| {
                        let pos = slots.iter().position(|&t| t == s).unwrap_or_else(|| {
                            slots.push(s);
                            slots.len() - 1
                        });
                        (pos as u8, inv)
                    })
                    .collect();
                assert!(slots.len() <= 3);
                atoms.push(Atom { letters, slots, kind: *kind });
            }
        }
        let mut ev = Evaluator {
            model,
            variant,
            atoms,
            values: Mutex::new(Values { elems: Vec::new(), ids: HashMap::new() }),
            memo: Mutex::new(HashMap::new()),
            z: [[ValueId(0); 5]; 3],
            identity: ValueId(0),
        };
        ev.identity = ev.intern(model.identity());
        for l in 0..3 {
            for k in 0..5 {
                ev.z[l][k] = ev.intern(model.z(l, k));
            }
        }
        Ok(ev)
    }

    pub fn model(&self) -> &M {
        self.model
    }

    pub fn variant(&self) -> SigmaVariant {
        self.variant
    }

    pub fn identity_id(&self) -> ValueId {
        self.identity
    }

    pub fn z_id(&self, l: usize, k: usize) -> ValueId {
        self.z[l][k]
    }

    pub fn intern(&self, x: M::Elem) -> ValueId {
        let mut v = self.values.lock().expect("value table poisoned");
        if let Some(&id) = v.ids.get(&x) {
            return ValueId(id);
        }
        let id = v.elems.len() as u32;
        v.elems.push(x.clone());
        v.ids.insert(x, id);
        ValueId(id)
    }

    pub fn value(&self, id: ValueId) -> M::Elem {
        self.values.lock().expect("value table poisoned").elems[id.0 as usize].clone()
    }

    /// Evaluates an arbitrary relative word over interned values.
    pub fn eval_coords(&self, word: &[(CoordValue, bool)]) -> Relative<M::Elem> {
        let tokens: Vec<(Token<M::Elem, SPair>, bool)> = word
            .iter()
            .map(|&(c, inv)| {
                let t = match c {
                    CoordValue::Concrete(id) => Token::Concrete(self.value(id)),
                    CoordValue::Conj(s) => Token::Conj(s),
                };
                (t, inv)
            })
            .collect();
        let m = self.model.width();
        eval_relative(self.model, &tokens, |s| pi_s_unchecked(s, m))
    }

    /// Atom `a` with its distinct slots bound to `args`.
    fn atom(&self, a: usize, args: [Option<CoordValue>; 3]) -> Outcome {
        let key = (a as u8, args);
        if let Some(&o) = self.memo.lock().expect("memo poisoned").get(&key) {
            return o;
        }
        let atom = &self.atoms[a];
        let word: Vec<(CoordValue, bool)> =
            atom.letters.iter().map(|&(p, inv)| (args[p as usize].expect("bound slot"), inv)).collect();
        let o = match self.eval_coords(&word) {
            Relative::Undecided => Outcome::Undecided,
            Relative::Concrete(x) => {
                if self.model.is_identity(&x) == (atom.kind == AtomKind::Eq) {
                    Outcome::True
                } else {
                    Outcome::False
                }
            }
        };
        self.memo.lock().expect("memo poisoned").insert(key, o);
        o
    }

    /// Atom `a` on the witness tuples `tuples` at coordinate `c`.
    fn atom_at(&self, w: &WitnessFamily, a: usize, tuples: &[usize], c: usize) -> Outcome {
        let mut args = [None; 3];
        for (i, &s) in self.atoms[a].slots.iter().enumerate() {
            args[i] = Some(w.values[tuples[s / TUPLE_WIDTH]][s % TUPLE_WIDTH][c]);
        }
        self.atom(a, args)
    }

    /// Number of distinct values interned so far.
    pub fn interned(&self) -> usize {
        self.values.lock().expect("value table poisoned").elems.len()
    }
}

/// The tuples `ḡ_β` as coordinate arrays over `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessFamily {
    pub ladder: Ladder,
    pub j: Vec<Triple>,
    /// `values[β][k][c]` is coordinate `j[c]` of `g_{β,k}`.
    pub values: Vec<Vec<Vec<CoordValue>>>,
}

impl WitnessFamily {
    pub fn lambda(&self) -> usize {
        self.ladder.lambda()
    }

    pub fn component(&self, beta: usize, k: usize) -> &[CoordValue] {
        &self.values[beta][k]
    }

    /// Exchanges components `k1` and `k2` of `ḡ_β`.
    pub fn swap_components(&mut self, beta: usize, k1: usize, k2: usize) {
        self.values[beta].swap(k1, k2);
    }
}

/// The coordinate `ᾱ` of `x_{β,k}`.
pub fn pi6<M: KModel>(
    ev: &Evaluator<M>,
    ladder: &Ladder,
    alpha: Triple,
    beta: usize,
    k: usize,
) -> Result<CoordValue, LadderError> {
    if !ladder.in_j(alpha) {
        return Err(LadderError::NotInJ(alpha.0, alpha.1, alpha.2));
    }
    if k >= TUPLE_WIDTH || beta >= ladder.lambda() {
        return Err(LadderError::Index(if k >= TUPLE_WIDTH { k } else { beta }));
    }
    if k == 5 {
        return Ok(CoordValue::Conj(ladder.s_pair(alpha, beta)?));
    }
    let alphas = [alpha.0, alpha.1, alpha.2];
    Ok(CoordValue::Concrete(match alphas.iter().position(|&a| a == beta) {
        Some(l) => ev.z_id(l, k),
        None => ev.identity_id(),
    }))
}

pub fn build_witness<M: KModel>(ev: &Evaluator<M>, ladder: &Ladder) -> Result<WitnessFamily, WitnessError> {
    let j = ladder.j_of()?;
    let mut values = Vec::with_capacity(ladder.lambda());
    for beta in 0..ladder.lambda() {
        let mut comps = Vec::with_capacity(TUPLE_WIDTH);
        for k in 0..TUPLE_WIDTH {
            comps.push(j.iter().map(|&t| pi6(ev, ladder, t, beta, k)).collect::<Result<Vec<_>, _>>()?);
        }
        values.push(comps);
    }
    Ok(WitnessFamily { ladder: ladder.clone(), j, values })
}

/// A failed or undecided instance of clause (b).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseIssue {
    /// `phi0`, `phi1`, `psi-eq` or `psi-neq`.
    pub clause: &'static str,
    pub indices: Vec<usize>,
    /// The coordinate, or `None` for a conjunct required somewhere.
    pub coordinate: Option<Triple>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseReport {
    pub lambda: usize,
    pub j_size: usize,
    /// Atom evaluations for `φ_{f_β(α)}[ḡ_α, ḡ_β]`, over all pairs and coordinates.
    pub phi_checks: u64,
    pub psi_eq_checks: u64,
    pub psi_neq_checks: u64,
    pub failures: u64,
    pub undecided: u64,
    pub first_issue: Option<ClauseIssue>,
    pub pass: bool,
}

/// Checks clause (b) of the olive property for a built family: every
/// `φ_{f_β(α)}[ḡ_α, ḡ_β]` at every coordinate, and for `(α,β,γ) ∈ J` the
/// equation of `ψ` at every coordinate and its inequation at `(α,β,γ)`.
pub fn verify_clause_b<M: KModel>(ev: &Evaluator<M>, w: &WitnessFamily) -> ClauseReport {
    let lambda = w.lambda();
    let ncoord = w.j.len();
    let mut r = ClauseReport {
        lambda,
        j_size: ncoord,
        phi_checks: 0,
        psi_eq_checks: 0,
        psi_neq_checks: 0,
        failures: 0,
        undecided: 0,
        first_issue: None,
        pass: true,
    };
    let note = |r: &mut ClauseReport, clause, indices: &[usize], coordinate, o: Outcome| match o {
        Outcome::True => {}
        _ => {
            if o == Outcome::False {
                r.failures += 1;
            } else {
                r.undecided += 1;
            }
            if r.first_issue.is_none() {
                r.first_issue = Some(ClauseIssue { clause, indices: indices.to_vec(), coordinate, outcome: o });
            }
        }
    };
    for b in 0..lambda {
        for a in 0..b {
            let (clause, atoms): (&str, &[usize]) = if w.ladder.f(b, a) == 0 { ("phi0", &[PHI0]) } else { ("phi1", &PHI1) };
            for c in 0..ncoord {
                for &at in atoms {
                    r.phi_checks += 1;
                    let o = ev.atom_at(w, at, &[a, b], c);
                    note(&mut r, clause, &[a, b], Some(w.j[c]), o);
                }
            }
        }
    }
    for (own, &(a, b, g)) in w.j.iter().enumerate() {
        for c in 0..ncoord {
            r.psi_eq_checks += 1;
            let o = ev.atom_at(w, PSI_EQ, &[a, b, g], c);
            note(&mut r, "psi-eq", &[a, b, g], Some(w.j[c]), o);
        }
        r.psi_neq_checks += 1;
        let o = ev.atom_at(w, PSI_NEQ, &[a, b, g], own);
        note(&mut r, "psi-neq", &[a, b, g], Some(w.j[own]), o);
    }
    r.pass = r.failures == 0 && r.undecided == 0;
    r
}

/// Whether a conjunction of equations holds at every coordinate.
fn everywhere<M: KModel>(ev: &Evaluator<M>, w: &WitnessFamily, atoms: &[usize], tuples: &[usize]) -> bool {
    (0..w.j.len()).all(|c| atoms.iter().all(|&a| ev.atom_at(w, a, tuples, c) == Outcome::True))
}

/// Index quadruples `(a₀, a₁, a₂, a₃)` at which `φ₀[ḡ_{a₀}, ḡ_{a₁}]`,
/// `φ₁[ḡ_{a₁}, ḡ_{a₂}]`, `φ₁[ḡ_{a₁}, ḡ_{a₃}]` and `ψ[ḡ_{a₀}, ḡ_{a₂}, ḡ_{a₃}]`
/// are all established in the product group. Undecided atoms count as not
/// established. Indices range over all of `λ⁴`, repeats included.
pub fn forbidden_scan<M: KModel>(ev: &Evaluator<M>, w: &WitnessFamily) -> Vec<[usize; 4]> {
    let n = w.lambda();
    let ncoord = w.j.len();
    let mut t0 = vec![false; n * n];
    let mut t1 = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            t0[a * n + b] = everywhere(ev, w, &[PHI0], &[a, b]);
            t1[a * n + b] = everywhere(ev, w, &PHI1, &[a, b]);
        }
    }
    // ψ in the product: the equation at every coordinate, the inequation at some
    let mut psi = vec![false; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let t = [a, b, c];
                psi[(a * n + b) * n + c] =
                    everywhere(ev, w, &[PSI_EQ], &t) && (0..ncoord).any(|k| ev.atom_at(w, PSI_NEQ, &t, k) == Outcome::True);
            }
        }
    }
    let mut found = Vec::new();
    for a0 in 0..n {
        for a1 in 0..n {
            if !t0[a0 * n + a1] {
                continue;
            }
            for a2 in 0..n {
                if !t1[a1 * n + a2] {
                    continue;
                }
                for a3 in 0..n {
                    if t1[a1 * n + a3] && psi[(a0 * n + a2) * n + a3] {
                        found.push([a0, a1, a2, a3]);
                    }
                }
            }
        }
    }
    found
}

/// Per-ladder outcome of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderOutcome {
    pub ladder: Ladder,
    pub clause: ClauseReport,
    pub forbidden: Vec<[usize; 4]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub lambda: usize,
    pub mode: String,
    pub seed: Option<u64>,
    pub sigma_variant: SigmaVariant,
    pub params: Fingerprint,
    pub ladders: u64,
    pub failures: u64,
    pub undecided: u64,
    pub forbidden_findings: u64,
    /// The first ladder with a failure, undecided instance or finding.
    pub first_bad: Option<LadderOutcome>,
    pub pass: bool,
}

/// Builds, verifies and scans the family of every ladder in `ladders`.
pub fn sweep<M: KModel>(
    ev: &Evaluator<M>,
    lambda: usize,
    mode: &str,
    seed: Option<u64>,
    ladders: &[Ladder],
    exec: Exec,
) -> Result<SweepReport, WitnessError> {
    let outcomes = par::map(exec, ladders, |l| -> Result<LadderOutcome, WitnessError> {
        let w = build_witness(ev, l)?;
        Ok(LadderOutcome { ladder: l.clone(), clause: verify_clause_b(ev, &w), forbidden: forbidden_scan(ev, &w) })
    });
    let mut report = SweepReport {
        lambda,
        mode: mode.to_string(),
        seed,
        sigma_variant: ev.variant(),
        params: ev.model().fingerprint(),
        ladders: ladders.len() as u64,
        failures: 0,
        undecided: 0,
        forbidden_findings: 0,
        first_bad: None,
        pass: true,
    };
    for o in outcomes {
        let o = o?;
        report.failures += o.clause.failures;
        report.undecided += o.clause.undecided;
        report.forbidden_findings += o.forbidden.len() as u64;
        if report.first_bad.is_none() && (!o.clause.pass || !o.forbidden.is_empty()) {
            report.first_bad = Some(o);
        }
    }
    report.pass = report.failures == 0 && report.undecided == 0 && report.forbidden_findings == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgroup::truncated::Truncated;

    fn k2() -> Truncated {
        Truncated::k2(6, SigmaVariant::Repaired).unwrap()
    }

    #[test]
    fn pi6_cases() {
        let k = k2();
        let ev = Evaluator::new(&k, SigmaVariant::Repaired).unwrap();
        let l = Ladder::binary(&[&[0], &[0, 0], &[1, 0, 1]]).unwrap();
        let t = (0, 1, 2);
        assert_eq!(pi6(&ev, &l, t, 3, 2).unwrap(), CoordValue::Concrete(ev.identity_id()));
        assert_eq!(pi6(&ev, &l, t, 1, 3).unwrap(), CoordValue::Concrete(ev.z_id(1, 3)));
        assert_eq!(pi6(&ev, &l, t, 3, 5).unwrap(), CoordValue::Conj(l.s_pair(t, 3).unwrap()));
        assert_eq!(pi6(&ev, &l, (0, 1, 3), 0, 0), Err(LadderError::NotInJ(0, 1, 3)));
        assert_eq!(ev.value(ev.z_id(2, 4)), k.z(2, 4));
    }

    #[test]
    fn small_families() {
        let k = k2();
        let ev = Evaluator::new(&k, SigmaVariant::Repaired).unwrap();
        let l = Ladder::binary(&[&[1]]).unwrap();
        let w = build_witness(&ev, &l).unwrap();
        assert!(w.j.is_empty());
        let r = verify_clause_b(&ev, &w);
        assert!(r.pass && r.phi_checks == 0);
        let l = Ladder::binary(&[&[0], &[0, 0]]).unwrap();
        let w = build_witness(&ev, &l).unwrap();
        assert_eq!(w.j, vec![(0, 1, 2)]);
        assert!(w.values.iter().all(|t| t.iter().all(|c| c.len() == 1)));
        let r = verify_clause_b(&ev, &w);
        assert!(r.pass, "{r:?}");
        assert!(forbidden_scan(&ev, &w).is_empty());
    }

    #[test]
    fn mutation_is_detected() {
        let k = k2();
        let ev = Evaluator::new(&k, SigmaVariant::Repaired).unwrap();
        let l = Ladder::binary(&[&[1], &[0, 0], &[0, 1, 1]]).unwrap();
        let mut w = build_witness(&ev, &l).unwrap();
        assert!(verify_clause_b(&ev, &w).pass);
        w.swap_components(2, 3, 4);
        let r = verify_clause_b(&ev, &w);
        assert!(r.failures > 0 && !r.pass, "{r:?}");
    }
}
