// SPDX-License-Identifier: Apache-2.0

//! Brute-force oracles the fast checks are compared against.

use olive_core::relational::FinStructure;

/// The first embedding of `a` into `b` in lexicographic order, found by
/// trying every injective map.
pub fn all_injections(a: &FinStructure, b: &FinStructure) -> Option<Vec<usize>> {
    fn go(a: &FinStructure, b: &FinStructure, f: &mut Vec<usize>) -> Option<Vec<usize>> {
        if f.len() == a.universe {
            return FinStructure::is_embedding(a, b, f).then(|| f.clone());
        }
        for y in 0..b.universe {
            if !f.contains(&y) {
                f.push(y);
                if let Some(r) = go(a, b, f) {
                    return Some(r);
                }
                f.pop();
            }
        }
        None
    }
    go(a, b, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use olive_core::relational::{build_nstar, OliveSignature};

    #[test]
    fn finds_identity_first() {
        let n = build_nstar(&OliveSignature::default_test()).unwrap();
        assert_eq!(all_injections(&n, &n), Some((0..n.universe).collect()));
        let empty = FinStructure::empty(n.signature.clone(), 0);
        assert_eq!(all_injections(&empty, &n), Some(vec![]));
        assert_eq!(all_injections(&n, &empty), None);
    }
}
