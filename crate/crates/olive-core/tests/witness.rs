// SPDX-License-Identifier: Apache-2.0

use std::time::Instant;

use olive_core::kgroup::conjugator::{toy_conjugator, Carrier, Conjugator};
use olive_core::kgroup::truncated::Truncated;
use olive_core::kgroup::{verify_partial_iso, KModel, PartialIso};
use olive_core::par::Exec;
use olive_core::witness::{eval_relative, sweep, Evaluator, Relative, Token};
use olive_core::{GroupContext, Ladder, SigmaVariant};
use rand::Rng;

#[test]
fn all_ladders_of_length_five() {
    let k = Truncated::k2(6, SigmaVariant::Repaired).unwrap();
    let ev = Evaluator::new(&k, SigmaVariant::Repaired).unwrap();
    let ladders: Vec<Ladder> = (0..Ladder::count(5)).map(|c| Ladder::from_index(5, c)).collect();
    let t = Instant::now();
    let r = sweep(&ev, 5, "exhaustive", None, &ladders, Exec::default()).unwrap();
    eprintln!("lambda 5: {:?}, {} values", t.elapsed(), ev.interned());
    assert_eq!(r.ladders, 1024);
    assert!(r.pass, "{:?}", r.first_bad);
}

#[test]
fn seeded_ladders_of_length_eight() {
    let k = Truncated::k2(6, SigmaVariant::Repaired).unwrap();
    let ev = Evaluator::new(&k, SigmaVariant::Repaired).unwrap();
    let ladders: Vec<Ladder> = (0..20).map(|i| Ladder::random(8, 2, &mut olive_core::rng::stream(7, i))).collect();
    let t = Instant::now();
    let r = sweep(&ev, 8, "seeded", Some(7), &ladders, Exec::default()).unwrap();
    eprintln!("lambda 8 x20: {:?}", t.elapsed());
    assert!(r.pass, "{:?}", r.first_bad);
}

fn compose(p: &[u32], q: &[u32]) -> Vec<u32> {
    p.iter().map(|&i| q[i as usize]).collect()
}

fn invert(p: &[u32]) -> Vec<u32> {
    let mut r = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        r[j as usize] = i as u32;
    }
    r
}

/// A random product of top generators; the carrier is the subgroup they span.
fn rand_word(k: &Truncated, rng: &mut impl Rng) -> <Truncated as GroupContext>::Elem {
    (0..rng.gen_range(0..12)).fold(k.identity(), |acc, _| k.mul(&acc, &k.generator(rng.gen_range(0..3))))
}

/// Relative evaluation agrees with the permutation representation of the
/// toy quotient extended by honest conjugators.
#[test]
fn relative_evaluation_is_sound_on_the_toy() {
    let k = Truncated::k2(1, SigmaVariant::Repaired).unwrap();
    let exec = Exec::default();
    let carrier = Carrier::new(&k, exec);
    let candidates = [vec![(0, 1), (2, 2)], vec![(0, 2)], vec![(1, 1), (2, 0)], vec![(0, 0), (1, 2)], vec![]];
    let mut isos: Vec<(PartialIso, Conjugator)> = Vec::new();
    for pairs in candidates {
        let pi = PartialIso::new(pairs).unwrap();
        if !verify_partial_iso(&k, &pi, 64, 1, exec).pass {
            continue;
        }
        if let Ok(c) = toy_conjugator(&k, &carrier, &pi, exec) {
            assert!(c.report.pass);
            isos.push((pi, c));
        }
    }
    assert!(isos.len() >= 2);
    let mut rng = olive_core::rng::stream(11, 0);
    let mut concrete = 0;
    for q in 0..400 {
        let mut word: Vec<(Token<_, usize>, bool)> = Vec::new();
        let label = rng.gen_range(0..isos.len());
        if q % 2 == 0 {
            // the shape of the witness atoms: c⁻¹ g c h⁻¹ with g in the domain subgroup
            let dom: Vec<usize> = isos[label].0.domain().into_iter().collect();
            let mut g = k.identity();
            for _ in 0..rng.gen_range(0..5) {
                if !dom.is_empty() {
                    g = k.mul(&g, &k.generator(dom[rng.gen_range(0..dom.len())]));
                }
            }
            let h = if rng.gen_bool(0.5) { k.relabel(&isos[label].0, &g).unwrap() } else { rand_word(&k, &mut rng) };
            word.extend([
                (Token::Conj(label), true),
                (Token::Concrete(g), false),
                (Token::Conj(label), false),
                (Token::Concrete(h), true),
            ]);
        } else {
            for _ in 0..rng.gen_range(1..9) {
                let tok = if rng.gen_bool(0.4) {
                    Token::Conj(rng.gen_range(0..isos.len()))
                } else {
                    Token::Concrete(rand_word(&k, &mut rng))
                };
                word.push((tok, rng.gen_bool(0.5)));
            }
        }
        let Relative::Concrete(x) = eval_relative(&k, &word, |l| isos[l].0.clone()) else { continue };
        concrete += 1;
        let mut perm: Vec<u32> = (0..carrier.len() as u32).collect();
        for (tok, inv) in &word {
            let p = match tok {
                Token::Concrete(y) => carrier.right_action(&k, y, Exec::Sequential),
                Token::Conj(l) => isos[*l].1.perm.clone(),
            };
            perm = compose(&perm, &if *inv { invert(&p) } else { p });
        }
        assert_eq!(perm, carrier.right_action(&k, &x, Exec::Sequential), "query {q}");
    }
    assert!(concrete >= 200, "{concrete}");
}
