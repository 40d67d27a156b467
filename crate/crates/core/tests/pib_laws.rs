use kakutani_core::pib::{apply_reorder, compose_reorder, reorder_after, Interval, Mode, Pib, ReorderingMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn perm(r: &mut ChaCha8Rng, j: Interval) -> ReorderingMap {
    let mut v: Vec<i128> = (j.lo..j.hi).collect();
    for x in (1..v.len()).rev() {
        let y = r.gen_range(0..=x);
        v.swap(x, y);
    }
    ReorderingMap::from_images(j, v).unwrap()
}

fn noted(r: &mut ChaCha8Rng, top: Option<&Pib>) -> Pib {
    let bottom = Pib::random(r, 4, 0);
    let body = Pib::random(r, 8, 0);
    let top = top.cloned().unwrap_or_else(|| Pib::random(r, 4, 0));
    Pib::decomposed(Mode::Disjoint, bottom, body, top).unwrap()
}

proptest! {
    #[test]
    fn inverse_is_an_involution(seed in any::<u64>()) {
        let f = Pib::random(&mut rng(seed), 12, -3);
        prop_assert_eq!(f.invert().invert(), f.clone());
        for &(a, b) in &f.pairs {
            prop_assert_eq!(f.invert().image(b), Some(a));
        }
    }

    #[test]
    fn concatenation_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g, h) = (Pib::random(&mut r, 6, 0), Pib::random(&mut r, 6, 2), Pib::random(&mut r, 6, -1));
        prop_assert_eq!(f.concat(&g).concat(&h), f.concat(&g.concat(&h)));
        prop_assert_eq!(f.concat(&Pib::empty()), f.clone());
        prop_assert_eq!(Pib::empty().concat(&f), f);
    }

    #[test]
    fn equivalence_is_an_equivalence(seed in any::<u64>(), t in -50i128..50, s in -50i128..50, u in -9i128..9) {
        let f = Pib::random(&mut rng(seed), 10, 0);
        let g = f.shift(t, s);
        let h = g.shift(u, -u);
        prop_assert!(f.equivalent(&f));
        prop_assert!(f.equivalent(&g) && g.equivalent(&f));
        prop_assert!(g.equivalent(&h) && f.equivalent(&h));
        let other = Pib::random(&mut rng(seed ^ 1), 10, 0);
        prop_assert_eq!(f.equivalent(&other), other.equivalent(&f));
    }

    #[test]
    fn overlap_concat_defined_iff_notes_agree(seed in any::<u64>(), same in any::<bool>(), t in -20i128..20) {
        let mut r = rng(seed);
        let f1 = noted(&mut r, None);
        let top = f1.top_note().unwrap().clone();
        let mut f2 = noted(&mut r, None);
        if same {
            // a bottom note equivalent to f1's top
            let head = f2.top_note().unwrap().clone();
            f2 = Pib::decomposed(Mode::Disjoint, top.shift(t, t), Pib::random(&mut r, 8, 0), head).unwrap();
        }
        let agree = f1.top_note().unwrap().equivalent(f2.bottom_note().unwrap());
        let res = f1.overlap_concat(&f2);
        prop_assert_eq!(res.is_ok(), agree);
        if let Ok(g) = res {
            prop_assert!(g.decomposition_consistent().unwrap());
            prop_assert!(g.bottom_note().unwrap().equivalent(f1.bottom_note().unwrap()));
            prop_assert!(g.top_note().unwrap().equivalent(f2.top_note().unwrap()));
        }
    }

    #[test]
    fn reorderings_permute(seed in any::<u64>(), n in 1i128..40) {
        let mut r = rng(seed);
        let j = Interval::new(0, n);
        let (p, q) = (perm(&mut r, j), perm(&mut r, j));
        let items: Vec<i128> = (0..n).map(|x| x * 7 + 1).collect();
        let mut out = apply_reorder(&p, &items).unwrap();
        out.sort_unstable();
        prop_assert_eq!(&out, &items);
        prop_assert!(compose_reorder(&p.inverse(), &p).unwrap().to_explicit().is_identity());
        let pq = compose_reorder(&q, &p).unwrap();
        prop_assert_eq!(apply_reorder(&pq, &items).unwrap(), apply_reorder(&q, &apply_reorder(&p, &items).unwrap()).unwrap());
        // p̂ ∘ f keeps I, A and the number of pairs
        let f = Pib::random(&mut r, n + 1, 0);
        let f = Pib::new(f.i, j, f.pairs.into_iter().filter(|&(_, b)| b < n).collect()).unwrap();
        let g = reorder_after(&p, &f).unwrap();
        prop_assert_eq!(g.a(), f.a());
        prop_assert_eq!(g.b(), f.pairs.iter().map(|&(_, b)| p.apply(b)).collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>());
    }
}
