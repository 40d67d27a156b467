//! Family-count oracle: basic templates rebuilt from the towers by hand and compared
//! with the enumeration, plus variant counts per basic template.

use std::collections::BTreeSet;

use kakutani_core::templates::{augmented, basic_count, diminished, enumerate_basic, Side};
use kakutani_core::{Level, System};

/// Every cyclic cut of the towers: the top n − g levels of one tower, then the bottom g
/// of another (Morse) or the same one (odometer).
fn oracle(system: System, k: u32) -> BTreeSet<Vec<Level>> {
    let n = 1u128 << k;
    let lv = |bar: bool, i: u128| match system {
        System::Morse => Level::morse(k, i, bar),
        System::Odometer => Level::v(k, i),
    };
    let bars: &[bool] = match system {
        System::Morse => &[false, true],
        System::Odometer => &[false],
    };
    let mut out = BTreeSet::new();
    for &pre in bars {
        for &suf in bars {
            for g in 0..n {
                if g == 0 && pre != suf {
                    continue;
                }
                let t: Vec<Level> = (0..n).map(|j| if j < g { lv(pre, n - g + j) } else { lv(suf, j - g) }).collect();
                out.insert(t);
            }
        }
    }
    out
}

#[test]
fn basic_templates_match_the_oracle() {
    for k in 1..=6 {
        for sys in [System::Morse, System::Odometer] {
            let want = oracle(sys, k);
            let got: BTreeSet<Vec<Level>> = enumerate_basic(sys, k).map(|b| kakutani_core::templates::Template::from(b).levels().unwrap()).collect();
            assert_eq!(got.len() as u128, basic_count(sys, k), "{sys:?} k = {k} has duplicates");
            assert_eq!(got, want, "{sys:?} k = {k}");
        }
    }
}

#[test]
fn variant_counts() {
    for k in 2..=5 {
        for b in enumerate_basic(System::Morse, k) {
            let js: Vec<Option<bool>> = if b.is_zero_one() { vec![Some(false), Some(true)] } else { vec![None] };
            let mut n = 0;
            for side in [Side::D, Side::U] {
                for &j in &js {
                    let t = diminished(&b, side, j).unwrap();
                    assert_eq!(t.len(), b.height());
                    n += 1;
                }
            }
            assert_eq!(n, if b.is_zero_one() { 4 } else { 2 });
            for side in [Side::D, Side::U] {
                for j in [false, true] {
                    let t = augmented(&b, side, Some(j)).unwrap();
                    // an extra global cut is inserted and one end level removed
                    let cuts = t.levels().unwrap().iter().filter(|l| l.i() == 0).count();
                    assert!(cuts >= 1 && t.len() == b.height());
                }
            }
        }
    }
}
