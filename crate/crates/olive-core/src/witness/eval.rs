// SPDX-License-Identifier: Apache-2.0

//! Evaluation of words mixing concrete elements and formal conjugators.
//!
//! The only facts used about a conjugator `z` labelled `s` are
//! `z⁻¹ x z = π_s(x)` for `x` in the subgroup generated by `Dom(π_s)` and
//! `z z⁻¹ = e`. Any group containing `K` and such a `z` therefore agrees
//! with every `Concrete` answer.

use crate::kgroup::{KModel, PartialIso};

/// One letter of a relative word before its exponent is applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Token<E, L> {
    Concrete(E),
    Conj(L),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relative<E> {
    Concrete(E),
    Undecided,
}

enum Item<E, L> {
    C(E),
    Z(L, bool),
}

/// Normalises `word` (tokens with inverse flags) from the left.
///
/// Identity factors are dropped, adjacent concrete factors multiplied,
/// `z z⁻¹` and `z⁻¹ z` cancelled, and `z⁻¹ c z` (resp. `z c z⁻¹`) replaced
/// by `π(c)` (resp. `π⁻¹(c)`) when `relabel` accepts `c`.
pub fn eval_relative<M, L>(model: &M, word: &[(Token<M::Elem, L>, bool)], iso: impl Fn(L) -> PartialIso) -> Relative<M::Elem>
where
    M: KModel,
    L: Copy + Eq,
{
    let mut stack: Vec<Item<M::Elem, L>> = Vec::new();
    for (tok, inverse) in word {
        match tok {
            Token::Concrete(x) => {
                let x = if *inverse { model.inv(x) } else { x.clone() };
                push_concrete(model, &mut stack, x);
            }
            &Token::Conj(s) => push_conj(model, &mut stack, s, *inverse, &iso),
        }
    }
    match stack.as_slice() {
        [] => Relative::Concrete(model.identity()),
        [Item::C(x)] => Relative::Concrete(x.clone()),
        _ => Relative::Undecided,
    }
}

fn push_concrete<M: KModel, L>(model: &M, stack: &mut Vec<Item<M::Elem, L>>, x: M::Elem) {
    if model.is_identity(&x) {
        return;
    }
    if let Some(Item::C(y)) = stack.last() {
        let p = model.mul(y, &x);
        stack.pop();
        if !model.is_identity(&p) {
            stack.push(Item::C(p));
        }
    } else {
        stack.push(Item::C(x));
    }
}

fn push_conj<M: KModel, L: Copy + Eq>(
    model: &M,
    stack: &mut Vec<Item<M::Elem, L>>,
    s: L,
    inverse: bool,
    iso: &impl Fn(L) -> PartialIso,
) {
    if let Some(&Item::Z(t, inv_t)) = stack.last() {
        if t == s && inv_t != inverse {
            stack.pop();
            return;
        }
    }
    let n = stack.len();
    if n >= 2 {
        if let (Item::Z(t, inv_t), Item::C(c)) = (&stack[n - 2], &stack[n - 1]) {
            if *t == s && *inv_t != inverse {
                // z⁻¹ c z when the closing letter is positive, z c z⁻¹ otherwise
                let pi = if inverse { iso(s).inverse() } else { iso(s) };
                if let Some(d) = model.relabel(&pi, c) {
                    stack.truncate(n - 2);
                    push_concrete(model, stack, d);
                    return;
                }
            }
        }
    }
    stack.push(Item::Z(s, inverse));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgroup::truncated::Truncated;
    use crate::kgroup::{pi_s, SPair};
    use crate::words::{GroupContext, SigmaVariant};

    type T = Token<crate::kgroup::truncated::TElement, SPair>;

    #[test]
    fn rewrite_rules() {
        let k = Truncated::k2(6, SigmaVariant::Repaired).unwrap();
        let iso = |s: SPair| pi_s(s, 6).unwrap();
        let s = SPair::from_sets(&[0], &[1]).unwrap();
        let t = SPair::from_sets(&[1], &[0]).unwrap();
        let e = k.identity();
        let w: Vec<(T, bool)> = vec![(Token::Conj(s), true), (Token::Concrete(e.clone()), false), (Token::Conj(s), false)];
        assert_eq!(eval_relative(&k, &w, iso), Relative::Concrete(e.clone()));
        let w: Vec<(T, bool)> = vec![(Token::Conj(s), true), (Token::Concrete(k.z(0, 0)), false), (Token::Conj(s), false)];
        assert_eq!(eval_relative(&k, &w, iso), Relative::Concrete(k.z(0, 2)));
        // z c z⁻¹ runs the map backwards
        let w: Vec<(T, bool)> = vec![(Token::Conj(s), false), (Token::Concrete(k.z(0, 2)), false), (Token::Conj(s), true)];
        assert_eq!(eval_relative(&k, &w, iso), Relative::Concrete(k.z(0, 0)));
        let w: Vec<(T, bool)> = vec![(Token::Conj(s), false), (Token::Conj(t), false)];
        assert_eq!(eval_relative(&k, &w, iso), Relative::Undecided);
        // outside the domain: z_{1,0} with 1 ∉ u₁
        let w: Vec<(T, bool)> = vec![(Token::Conj(s), true), (Token::Concrete(k.z(1, 0)), false), (Token::Conj(s), false)];
        assert_eq!(eval_relative(&k, &w, iso), Relative::Undecided);
        // a conjugated product cancelling against its image
        let y = k.mul(&k.z(1, 3), &k.z(1, 4));
        let w: Vec<(T, bool)> = vec![
            (Token::Conj(s), true),
            (Token::Concrete(k.z(1, 1)), false),
            (Token::Conj(t), false),
            (Token::Conj(t), true),
            (Token::Concrete(k.z(1, 4)), false),
            (Token::Conj(s), false),
            (Token::Concrete(y), true),
        ];
        assert_eq!(eval_relative(&k, &w, iso), Relative::Concrete(e));
    }
}
