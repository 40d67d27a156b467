//! Good sets: the positions on which every reordered template agrees after projection.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::block_reorder::{Direction, LazyHat, StageGeometry};
use crate::error::{Error, Result};
use crate::report::{rational_string, Check};
use crate::templates::Basic;
use crate::towers::{Level, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParityMode {
    /// local blocks 2^{k_n} + 2t for t < L'/2 - 2^{k_n}
    Formula,
    /// every other block outside the intermediate safe zones, parity fixed by the
    /// matching property
    Auto,
    /// blocks ≡ parity (mod 2) from `offset` up to the top intermediate safe zone
    Explicit { parity: u8, offset: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Layout {
    /// {u_2(2), ū_2(2)} in towers of height 4
    Stage2,
    /// G' = `blocks` (local block indices) repeated over intermediate blocks s_lo..=s_hi
    Blocks { blocks: Vec<u128>, s_lo: u128, s_hi: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodSet {
    pub kn: u32,
    pub kn1: u32,
    pub kn2: u32,
    pub layout: Layout,
    /// parities that passed during auto resolution
    pub passing: Vec<u8>,
}

impl GoodSet {
    pub fn stage2() -> Self {
        GoodSet { kn: 0, kn1: 0, kn2: 2, layout: Layout::Stage2, passing: vec![] }
    }

    pub fn n(&self) -> u128 {
        1 << self.kn
    }
    pub fn m(&self) -> u128 {
        1 << self.kn1
    }
    pub fn k(&self) -> u128 {
        1 << self.kn2
    }

    /// Maximal runs (start, len) in increasing order; each is one local block.
    pub fn runs(&self) -> Vec<(u128, u128)> {
        match &self.layout {
            Layout::Stage2 => vec![(2, 1)],
            Layout::Blocks { blocks, s_lo, s_hi } => {
                let mut out = vec![];
                for s in *s_lo..=*s_hi {
                    out.extend(blocks.iter().map(|&t| (s * self.m() + t * self.n(), self.n())));
                }
                out
            }
        }
    }

    pub fn contains(&self, pos: u128) -> bool {
        match &self.layout {
            Layout::Stage2 => pos == 2,
            Layout::Blocks { blocks, s_lo, s_hi } => {
                let s = pos / self.m();
                *s_lo <= s && s <= *s_hi && blocks.binary_search(&(pos % self.m() / self.n())).is_ok()
            }
        }
    }

    pub fn count(&self) -> u128 {
        match &self.layout {
            Layout::Stage2 => 1,
            Layout::Blocks { blocks, s_lo, s_hi } => (s_hi + 1 - s_lo) * blocks.len() as u128 * self.n(),
        }
    }

    /// (#s-values)·(L'/2 − 2^{k_n})·2^{k_n}.
    pub fn formula_count(&self) -> Option<u128> {
        match &self.layout {
            Layout::Stage2 => None,
            Layout::Blocks { s_lo, s_hi, .. } => {
                Some((s_hi + 1 - s_lo) * (self.m() / self.n() / 2 - self.n()) * self.n())
            }
        }
    }

    /// ν of the level set (odometer) or μ summed over both Morse towers; both are
    /// |positions| / 2^{k_{n+2}}.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::from(self.count()), BigInt::from(self.k()))
    }

    pub fn contains_level(&self, l: &Level) -> bool {
        l.k() == self.kn2 && self.contains(l.i())
    }

    /// First run touching a global or intermediate safe zone.
    pub fn safe_zone_violation(&self) -> Option<String> {
        let Layout::Blocks { .. } = self.layout else { return None };
        let geom = StageGeometry::new(self.kn, self.kn1, self.kn2, 0).ok()?;
        self.runs().into_iter().find_map(|(s, l)| {
            (s..s + l)
                .find(|&p| geom.in_global_safe(p) || geom.in_inter_safe(p % self.m()))
                .map(|p| format!("run [{s}, {}) reaches safe position {p}", s + l))
        })
    }
}

/// Intermediate blocks carrying G', inclusive; the literal reading uses the safe-zone
/// width as a block count.
pub fn s_bounds(geom: &StageGeometry, literal: bool) -> Option<(u128, u128)> {
    let (m, l) = (geom.m(), geom.big_l);
    let hi = if literal { l.checked_sub(m * m + m + 1)? } else { l.checked_sub(m + 2)? };
    (m < hi).then_some((m + 1, hi))
}

fn blocks_for(geom: &StageGeometry, mode: ParityMode, parity: u8) -> Vec<u128> {
    let (n, lp) = (geom.n(), geom.small_l);
    match mode {
        ParityMode::Formula => (0..lp / 2 - n).map(|t| n + 2 * t).collect(),
        ParityMode::Auto => (n + 1..=lp - n - 2).filter(|b| b % 2 == parity as u128).collect(),
        ParityMode::Explicit { parity, offset } => {
            (offset..=lp - n - 2).filter(|b| b % 2 == parity as u128).collect()
        }
    }
}

/// Stage direction of the maps built at stage n+2.
pub fn direction_for_stage(stage: usize) -> Direction {
    if stage.is_multiple_of(4) {
        Direction::MorseTarget
    } else {
        Direction::OdometerTarget
    }
}

/// π∘ζ: projection to stage k keeping the tower.
pub fn pi_zeta(l: &Level, k: u32) -> Level {
    l.project(k).expect("projection downwards")
}

/// Reference value at position p: the zero template is left alone by both reorderings.
fn zero_value(system: System, kn2: u32, kn: u32, p: u128) -> Level {
    let l = match system {
        System::Morse => Level::u(kn2, p),
        System::Odometer => Level::v(kn2, p),
    };
    pi_zeta(&l, kn)
}

fn system_of(dir: Direction) -> System {
    match dir {
        Direction::MorseTarget => System::Morse,
        Direction::OdometerTarget => System::Odometer,
    }
}

/// Compare every target in `targets` with the zero template on all good positions;
/// agreement with one common reference gives agreement of every pair.
pub fn every_other_vs_zero(gs: &GoodSet, dir: Direction, targets: &[Basic]) -> Check {
    let runs = gs.runs();
    let sys = system_of(dir);
    let fail = crate::par::find_first(targets, |t| {
        let h = LazyHat::new(gs.kn, gs.kn1, *t, dir).ok()?;
        runs.iter().flat_map(|&(s, l)| s..s + l).find_map(|p| {
            let got = pi_zeta(&h.level_at(p), gs.kn);
            (got != zero_value(sys, gs.kn2, gs.kn, p)).then(|| format!("{} at position {p}: {got}", h.base))
        })
    });
    Check::new("every-other matching against the zero template", (targets.len() * runs.len()) as u64, fail)
}

/// Pairwise form: for each (τ1, τ2) and good position g, π∘ζ(τ̂1[g]) = π∘ζ(τ̂2[g]).
pub fn verify_every_other(gs: &GoodSet, dir: Direction, pairs: &[(Basic, Basic)]) -> Check {
    let runs = gs.runs();
    let fail = crate::par::find_first(pairs, |(t1, t2)| {
        let h1 = LazyHat::new(gs.kn, gs.kn1, *t1, dir).ok()?;
        let h2 = LazyHat::new(gs.kn, gs.kn1, *t2, dir).ok()?;
        runs.iter().flat_map(|&(s, l)| s..s + l).find_map(|p| {
            let (x, y) = (pi_zeta(&h1.level_at(p), gs.kn), pi_zeta(&h2.level_at(p), gs.kn));
            (x != y).then(|| format!("({}, {}) at {p}: {x} vs {y}", t1, t2))
        })
    });
    Check::new("every-other matching on template pairs", (pairs.len() * runs.len()) as u64, fail)
}

/// Good positions at stage n+2 with exponents (k_n, k_{n+1}, k_{n+2}).
/// Auto mode checks both parities exhaustively against `targets` and requires that
/// one passes; `passing` records every parity that did.
pub fn good_positions(
    kn: u32,
    kn1: u32,
    kn2: u32,
    mode: ParityMode,
    literal: bool,
    dir: Direction,
    targets: &[Basic],
) -> Result<GoodSet> {
    let geom = StageGeometry::new(kn, kn1, kn2, 0)?;
    let (s_lo, s_hi) = s_bounds(&geom, literal).ok_or(Error::StageTooSmall)?;
    let make = |blocks: Vec<u128>| GoodSet { kn, kn1, kn2, layout: Layout::Blocks { blocks, s_lo, s_hi }, passing: vec![] };
    let gs = match mode {
        ParityMode::Auto => {
            let passing: Vec<u8> = (0..2u8)
                .filter(|&p| every_other_vs_zero(&make(blocks_for(&geom, mode, p)), dir, targets).passed)
                .collect();
            // the proof's parity is even; ties happen only on very small stages
            let chosen = match passing.first() {
                Some(&p) => p,
                None => return Err(Error::NotGood("auto parity resolution: no parity passes".into())),
            };
            GoodSet { passing, ..make(blocks_for(&geom, mode, chosen)) }
        }
        _ => make(blocks_for(&geom, mode, 0)),
    };
    if gs.count() == 0 {
        return Err(Error::StageTooSmall);
    }
    Ok(gs)
}

/// Exact counting behind independence: the lower good set inside towers of height
/// 2^{k_{n+2}+delta}, copy by copy, then against the union of the copies chosen by `upper`.
pub fn verify_independence(gs: &GoodSet, system: System, delta: u32, upper: &dyn Fn(u128) -> bool) -> Vec<Check> {
    let km = gs.kn2 + delta;
    let (k, p) = (gs.k(), 1u128 << delta);
    let towers: &[bool] = match system {
        System::Morse => &[false, true],
        System::Odometer => &[false],
    };
    let unit = match system {
        System::Morse => BigRational::new(BigInt::from(1), BigInt::from(1) << (km + 1)),
        System::Odometer => BigRational::new(BigInt::from(1), BigInt::from(1) << km),
    };
    let nu_g = gs.measure();
    let mut per_copy_fail = None;
    let (mut inter, mut upper_measure) = (BigRational::from_integer(0.into()), BigRational::from_integer(0.into()));
    let mut copies = 0u64;
    for &bar in towers {
        for i in 0..p {
            copies += 1;
            let hits = (i * k..(i + 1) * k)
                .filter(|&pos| {
                    let l = match system {
                        System::Morse => Level::morse(km, pos, bar),
                        System::Odometer => Level::v(km, pos),
                    };
                    gs.contains_level(&pi_zeta(&l, gs.kn2))
                })
                .count();
            let lhs = &unit * BigInt::from(hits);
            let nu_l = &unit * BigInt::from(k);
            let rhs = &nu_l * &nu_g;
            if lhs != rhs && per_copy_fail.is_none() {
                per_copy_fail = Some(format!(
                    "copy {i} (tower {}): {} vs {}",
                    bar as u8,
                    rational_string(&lhs),
                    rational_string(&rhs)
                ));
            }
            if upper(i) {
                inter += &lhs;
                upper_measure += &nu_l;
            }
        }
    }
    let prod = &upper_measure * &nu_g;
    let whole = (inter != prod).then(|| format!("{} vs {}", rational_string(&inter), rational_string(&prod)));
    vec![
        Check::new(format!("ν(G ∩ L_i) = ν(L_i)ν(G) in height 2^{km}"), copies, per_copy_fail),
        Check::new(format!("ν(G ∩ G') = ν(G)ν(G') in height 2^{km}"), 1, whole)
            .with_detail(format!("ν(G) = {}, ν(G') = {}", rational_string(&nu_g), rational_string(&upper_measure))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates::enumerate_basic;

    fn all(k: u32) -> Vec<Basic> {
        enumerate_basic(System::Morse, k).collect()
    }

    #[test]
    fn small_auto_resolves() {
        let t = all(10);
        let gs = good_positions(1, 4, 10, ParityMode::Auto, false, Direction::MorseTarget, &t).unwrap();
        assert_eq!(gs.passing, vec![0, 1]);
        assert!(gs.safe_zone_violation().is_none());
        let p = good_positions(1, 4, 10, ParityMode::Formula, false, Direction::MorseTarget, &t).unwrap();
        assert_eq!(Some(p.count()), p.formula_count());
        assert!(every_other_vs_zero(&p, Direction::MorseTarget, &t).passed);
    }

    #[test]
    fn stage2_set() {
        let g = GoodSet::stage2();
        assert_eq!(g.measure(), BigRational::new(1.into(), 4.into()));
        assert!(g.contains_level(&Level::ubar(2, 2)) && !g.contains_level(&Level::u(2, 1)));
    }

    #[test]
    fn literal_range_is_empty() {
        let g = StageGeometry::new(2, 6, 14, 0).unwrap();
        assert_eq!(s_bounds(&g, true), None);
        assert_eq!(s_bounds(&g, false), Some((65, 190)));
    }

    #[test]
    fn independence_small() {
        let gs = good_positions(1, 4, 10, ParityMode::Explicit { parity: 0, offset: 4 }, false, Direction::MorseTarget, &[])
            .unwrap();
        for sys in [System::Morse, System::Odometer] {
            for c in verify_independence(&gs, sys, 3, &|i| i % 3 == 1) {
                assert!(c.passed, "{c:?}");
            }
        }
    }
}
