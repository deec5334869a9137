// SPDX-License-Identifier: Apache-2.0

use olive_core::ladder::Ladder;
use olive_core::par::Exec;
use olive_core::relational::*;
use olive_core::rng::stream;
use rand::Rng;

/// Every injective map, in lexicographic order.
fn oracle(a: &FinStructure, b: &FinStructure) -> Option<Vec<usize>> {
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

#[test]
fn backtracking_agrees_with_all_injections() {
    let sig = OliveSignature::default_test();
    let mut hits = 0;
    for i in 0..400 {
        let mut rng = stream(21, i);
        let na = rng.gen_range(0..=4);
        let nb = rng.gen_range(0..=6);
        let b = random_structure(&sig, nb, rng.gen_range(0.1..0.9), &mut rng);
        // half the time, take a substructure so that embeddings exist
        let a = if rng.gen_bool(0.5) && na <= nb {
            let mut pts: Vec<usize> = (0..nb).collect();
            rand::seq::SliceRandom::shuffle(pts.as_mut_slice(), &mut rng);
            b.restrict(&pts[..na])
        } else {
            random_structure(&sig, na, rng.gen_range(0.1..0.9), &mut rng)
        };
        let got = embeds(&a, &b).unwrap();
        assert_eq!(got, oracle(&a, &b), "instance {i}");
        hits += usize::from(got.is_some());
    }
    assert!(hits > 100, "{hits}");
}

#[test]
fn embeddings_compose() {
    let sig = OliveSignature::default_test();
    for i in 0..100 {
        let mut rng = stream(22, i);
        let c = random_structure(&sig, 7, 0.5, &mut rng);
        let mut pts: Vec<usize> = (0..7).collect();
        rand::seq::SliceRandom::shuffle(pts.as_mut_slice(), &mut rng);
        let b = c.restrict(&pts[..5]);
        let a = b.restrict(&[3, 0, 1]);
        assert!(embeds(&a, &b).unwrap().is_some() && embeds(&b, &c).unwrap().is_some());
        assert!(embeds(&a, &c).unwrap().is_some());
    }
}

#[test]
fn ladder_models_omit_nstar() {
    let sig = OliveSignature::default_test();
    let r = check_class_olive(&sig, 6, Exec::default()).unwrap();
    assert_eq!(r.ladders, (1..=6).map(Ladder::count).sum::<u64>());
    assert!(r.pass, "{r:?}");
    assert!(check_class_olive(&sig, 2, Exec::default()).unwrap().pass);
    for i in 0..100 {
        let mut rng = stream(23, i);
        let lam = rng.gen_range(7..=10);
        let m = model_from_ladder(&Ladder::random(lam, 2, &mut rng), &sig).unwrap();
        assert!(omits_nstar(&m).unwrap());
    }
    let initial = OliveSignature { eta: vec![0, 0, 1, 1], k: [2, 2] };
    assert!(check_class_olive(&initial, 3, Exec::default()).is_err());
}

#[test]
fn unions_stay_in_the_class() {
    let sig = OliveSignature::default_test();
    for i in 0..100 {
        let mut rng = stream(24, i);
        let m1 = random_t0_member(&sig, rng.gen_range(0..=4), &mut rng).unwrap();
        let m2 = random_t0_member(&sig, rng.gen_range(0..=4), &mut rng).unwrap();
        let empty = FinStructure::empty(sig.clone(), 0);
        let (u, _) = disjoint_union(&empty, &m1, &[], &m2, &[]).unwrap();
        assert!(omits_nstar(&u).unwrap(), "instance {i}");
    }
}

#[test]
fn planted_copy_is_rejected() {
    let sig = OliveSignature::default_test();
    let n = build_nstar(&sig).unwrap();
    // parts of sizes 2 and 3 carrying N* between them on edge {0, 1}
    let parts =
        [n.restrict(&[0, 1]), n.restrict(&[2, 3, 4]), FinStructure::empty(sig.clone(), 1), FinStructure::empty(sig.clone(), 1)];
    let plain = |i: usize, j: usize| {
        let (u, _) = disjoint_union(&FinStructure::empty(sig.clone(), 0), &parts[i], &[], &parts[j], &[]).unwrap();
        u
    };
    let edges = [n.clone(), plain(1, 2), plain(2, 3), plain(0, 3)];
    assert!(matches!(nsop4_amalgam(&parts, &edges), Err(RelError::Precondition(_))));
    let edges = [plain(0, 1), plain(1, 2), plain(2, 3), plain(0, 3)];
    assert!(nsop4_amalgam(&parts, &edges).unwrap().1.pass);
}

#[test]
fn random_four_cycles_amalgamate() {
    let sig = OliveSignature::default_test();
    for i in 0..50 {
        let mut rng = stream(25, i);
        let parts: Vec<FinStructure> = (0..4).map(|_| random_t0_member(&sig, rng.gen_range(1..=3), &mut rng).unwrap()).collect();
        let parts: [FinStructure; 4] = parts.try_into().unwrap();
        let edges: Vec<FinStructure> =
            CYCLE.iter().map(|&(a, b)| random_edge_model(&parts[a], &parts[b], &mut rng).unwrap()).collect();
        let (_, r) = nsop4_amalgam(&parts, &edges.try_into().unwrap()).unwrap();
        assert!(r.pass, "instance {i}: {r:?}");
    }
}
