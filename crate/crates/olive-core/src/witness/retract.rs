// SPDX-License-Identifier: Apache-2.0

//! Retractions of `G⁵_f̄` onto free subgroups.
//!
//! `G⁵_f̄` is generated by `x_{α,k}` (`α < λ`, `k < 5`) subject to
//! `σ*(x_{α,0}, x_{β,1}, x_{γ,4}) = e` for `(α,β,γ) ∈ J`. If a set `X` of
//! generators contains no triple `x_{α,0}, x_{β,1}, x_{γ,4}` from `J`, the
//! map fixing `X` and killing every other generator respects all relations
//! (each relator loses a variable and `σ*` vanishes), so `X` is free and a
//! word whose image is not freely trivial is not `e` in `G⁵_f̄`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ladder::{freeness_violation, Ladder, LadderError, Triple};
use crate::words::{sigma_at, Generator, SigmaVariant, Word};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum G5Error {
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error("{0} is not a generator of G5")]
    NotAGenerator(Generator),
    #[error("the set contains the generators of the relation at {0:?}")]
    Criterion(Triple),
}

/// The image of `w` under the retraction onto `⟨X⟩`, freely reduced.
pub fn g5_retract(ladder: &Ladder, x: &BTreeSet<Generator>, w: &Word) -> Result<Word, G5Error> {
    for g in x.iter().chain(w.generators().iter()) {
        match *g {
            Generator::X { alpha, k } if alpha < ladder.lambda() && k < 5 => {}
            _ => return Err(G5Error::NotAGenerator(g.clone())),
        }
    }
    if let Some(t) = freeness_violation(ladder, x)? {
        return Err(G5Error::Criterion(t));
    }
    let kept = w.letters().iter().filter(|l| x.contains(&l.gen)).cloned().collect();
    Ok(Word::from_letters(kept).reduce())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct G5LadderReport {
    /// Triples outside `J` tested with `σ*(x_{α,0}, x_{β,1}, x_{γ,4})`.
    pub outside_j: u64,
    /// All triples tested with `σ*(x_{α,2}, x_{β,3}, x_{γ,4})`.
    pub all_triples: u64,
    pub exceptions: u64,
    pub first_exception: Option<Triple>,
}

/// Certifies the two families of inequations for one ladder: for each
/// `α < β < γ` outside `J`, `σ*(x_{α,0}, x_{β,1}, x_{γ,4}) ≠ e` via the
/// generators of the three indices below component 5; for every triple,
/// `σ*(x_{α,2}, x_{β,3}, x_{γ,4}) ≠ e` via the components `1..5`.
pub fn g5_negative_check(ladder: &Ladder, variant: SigmaVariant) -> Result<G5LadderReport, G5Error> {
    let lam = ladder.lambda();
    let x = |alpha, k| Word::gen(Generator::X { alpha, k });
    let upper: BTreeSet<Generator> = (0..lam).flat_map(|alpha| (1..5).map(move |k| Generator::X { alpha, k })).collect();
    let mut r = G5LadderReport { outside_j: 0, all_triples: 0, exceptions: 0, first_exception: None };
    let fail = |r: &mut G5LadderReport, t| {
        r.exceptions += 1;
        r.first_exception.get_or_insert(t);
    };
    for a in 0..lam {
        for b in a + 1..lam {
            for c in b + 1..lam {
                let t = (a, b, c);
                if !ladder.in_j(t) {
                    r.outside_j += 1;
                    let local: BTreeSet<Generator> =
                        [a, b, c].iter().flat_map(|&alpha| (0..5).map(move |k| Generator::X { alpha, k })).collect();
                    let w = sigma_at(variant, &x(a, 0), &x(b, 1), &x(c, 4));
                    if g5_retract(ladder, &local, &w)?.is_empty() {
                        fail(&mut r, t);
                    }
                }
                r.all_triples += 1;
                let w = sigma_at(variant, &x(a, 2), &x(b, 3), &x(c, 4));
                if g5_retract(ladder, &upper, &w)?.is_empty() {
                    fail(&mut r, t);
                }
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retraction_basics() {
        let l = Ladder::binary(&[&[0], &[0, 0], &[1, 0, 0]]).unwrap();
        let g = |alpha, k| Generator::X { alpha, k };
        let x: BTreeSet<_> = [g(0, 0), g(0, 1)].into_iter().collect();
        assert_eq!(g5_retract(&l, &x, &Word::empty()).unwrap(), Word::empty());
        let w = Word::parse("x0_0 x1_1 x0_0^-1 x0_1").unwrap();
        assert_eq!(g5_retract(&l, &x, &w).unwrap(), Word::parse("x0_1").unwrap());
        let bad: BTreeSet<_> = [g(0, 0), g(1, 1), g(2, 4)].into_iter().collect();
        assert_eq!(g5_retract(&l, &bad, &w), Err(G5Error::Criterion((0, 1, 2))));
        let five: BTreeSet<_> = [g(0, 5)].into_iter().collect();
        assert_eq!(g5_retract(&l, &five, &w), Err(G5Error::NotAGenerator(g(0, 5))));
    }

    #[test]
    fn negative_direction_small() {
        for code in 0..Ladder::count(5) {
            let l = Ladder::from_index(5, code);
            let r = g5_negative_check(&l, SigmaVariant::Repaired).unwrap();
            assert_eq!(r.exceptions, 0, "{l:?}");
            assert_eq!(r.all_triples, 10);
        }
    }
}
