use kakutani_core::towers::{project_morse, project_morse_bruteforce, project_odometer, MorseLevel, OdometerLevel};
use kakutani_core::words::{flip, morse_prefix, parse_partition, substitute, tm_bit, Word};
use kakutani_core::{Level, System};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

proptest! {
    #[test]
    fn morse_projection_matches_block_comparison(k in 1u32..16, i in any::<u128>(), bar in any::<bool>(), d in 0u32..16) {
        let l = MorseLevel::new(k, i % (1 << k), bar);
        let k2 = k.saturating_sub(d);
        prop_assert_eq!(project_morse(&l, k2).unwrap(), project_morse_bruteforce(&l, k2).unwrap());
    }

    #[test]
    fn projection_composes(k in 2u32..60, i in any::<u128>(), bar in any::<bool>(), a in 0u32..60, b in 0u32..60) {
        let l = Level::morse(k, i % (1 << k), bar);
        let (hi, lo) = (a.max(b) % (k + 1), a.min(b) % (k + 1));
        let (hi, lo) = (hi.max(lo), hi.min(lo));
        prop_assert_eq!(l.project(hi).unwrap().project(lo).unwrap(), l.project(lo).unwrap());
        let o = OdometerLevel::new(k, i % (1 << k));
        prop_assert_eq!(project_odometer(&o, lo).unwrap().i, o.i % (1 << lo));
    }

    #[test]
    fn symbol_is_thue_morse(k in 1u32..40, i in any::<u128>(), bar in any::<bool>()) {
        let l = MorseLevel::new(k, i % (1 << k), bar);
        prop_assert_eq!(l.symbol(), tm_bit(l.i) ^ bar);
        let p = project_morse(&l, 0).unwrap();
        prop_assert_eq!(p.bar, l.symbol());
    }

    #[test]
    fn substitution_is_a_morphism(a in proptest::collection::vec(any::<bool>(), 1..50), b in proptest::collection::vec(any::<bool>(), 1..50)) {
        let (u, v) = (Word::from_bits(a), Word::from_bits(b));
        prop_assert_eq!(substitute(&u.concat(&v)).unwrap(), substitute(&u).unwrap().concat(&substitute(&v).unwrap()));
        prop_assert_eq!(flip(&flip(&u)), u);
    }

    #[test]
    fn factors_parse_at_their_offset(k in 1u32..7, start in 0usize..20000) {
        let u = morse_prefix(16);
        let n = 1usize << k;
        let w = u.slice(start, 3 * n + n / 2);
        prop_assert_eq!(parse_partition(&w, k).unwrap() as usize, (n - start % n) % n);
    }
}

#[test]
fn tower_measures_sum_to_one() {
    for k in 0..8u32 {
        let m: BigRational = (0..1u128 << k).flat_map(|i| [Level::u(k, i), Level::ubar(k, i)]).map(|l| l.measure()).sum();
        assert!(m.is_one(), "Morse k = {k}");
        let o: BigRational = (0..1u128 << k).map(|i| Level::v(k, i).measure()).sum();
        assert!(o.is_one(), "odometer k = {k}");
    }
    assert!(!Level::v(3, 1).measure().is_zero());
    assert_eq!(Level::u(2, 0).system(), System::Morse);
}
