//! Finite-precision probes of the limit maps: cylinders of windows and prefixes,
//! the restricted stage maps φ^n, chains, inverse and orbit checks, and the
//! measure counting bound.
//!
//! Stage 6 is only reachable on windows through its good blocks: on a ZO block the
//! stage-6 map is the inverse of the stage-4 map of the zero template, so its value
//! at k4 precision is read off c_{k4}(x). Entries computed this way are marked local.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::block_reorder::{Direction, LazyHat};
use crate::error::{Error, Result};
use crate::good_sets::{good_positions, pi_zeta, GoodSet, ParityMode};
use crate::par;
use crate::report::{rational_string, ser_rational};
use crate::stage_builder::stage2::K2;
use crate::stage_builder::stage4::{sample_targets, LazyPhi4, Stage4};
use crate::templates::Basic;
use crate::towers::{Level, System};
use crate::words::{parse_partition, Word};

/// A finite piece of a Morse point; `center` is coordinate 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseWindow {
    pub symbols: Word,
    pub center: usize,
}

impl MorseWindow {
    pub fn new(symbols: Word, center: usize) -> Result<Self> {
        if center >= symbols.len() {
            return Err(Error::Invalid(format!("center {center} outside window of length {}", symbols.len())));
        }
        Ok(MorseWindow { symbols, center })
    }

    /// T^r: the same symbols with coordinate 0 moved by r.
    pub fn shifted(&self, r: i128) -> Result<Self> {
        let c = self.center as i128 + r;
        if c < 0 || c >= self.symbols.len() as i128 {
            return Err(Error::InsufficientPrecision(format!("shift {r} leaves the window")));
        }
        Ok(MorseWindow { symbols: self.symbols.clone(), center: c as usize })
    }

    /// c_k(x): the k-canonical cylinder containing coordinate 0.
    pub fn cylinder(&self, k: u32) -> Result<Level> {
        let n = 1usize << k;
        let o = match parse_partition(&self.symbols, k) {
            Ok(o) => o as usize,
            Err(Error::WindowTooShort(_)) => {
                return Err(Error::InsufficientPrecision(format!(
                    "window of length {} does not parse at k = {k}",
                    self.symbols.len()
                )))
            }
            Err(e) => return Err(e),
        };
        let (c, len) = (self.center, self.symbols.len());
        let start = if c >= o { o + (c - o) / n * n } else { return Err(short(k)) };
        if start + n > len {
            return Err(short(k));
        }
        // u_k starts with 0
        Ok(Level::morse(k, (c - start) as u128, self.symbols.get(start)))
    }
}

fn short(k: u32) -> Error {
    Error::InsufficientPrecision(format!("block of size 2^{k} around coordinate 0 is cut by the window"))
}

/// A finite prefix of an odometer point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdometerPrefix {
    pub symbols: Word,
}

impl OdometerPrefix {
    pub fn new(symbols: Word) -> Self {
        OdometerPrefix { symbols }
    }

    /// Shortest prefix lying in the given odometer level.
    pub fn of_level(d: &Level) -> Result<Self> {
        match d {
            Level::O(l) => Ok(OdometerPrefix { symbols: crate::towers::odometer_word(l) }),
            _ => Err(Error::MixedSystems),
        }
    }

    pub fn cylinder(&self, k: u32) -> Result<Level> {
        if (self.symbols.len() as u32) < k || k >= 128 {
            return Err(Error::InsufficientPrecision(format!("prefix of length {} at k = {k}", self.symbols.len())));
        }
        Ok(Level::v(k, (0..k as usize).filter(|&j| self.symbols.get(j)).map(|j| 1u128 << j).sum()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainEntry {
    pub stage: usize,
    pub source: Level,
    pub image: Level,
    pub local: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderChain {
    pub entries: Vec<ChainEntry>,
    pub nested: bool,
}

impl CylinderChain {
    fn from_entries(entries: Vec<ChainEntry>) -> Self {
        let nested = nesting_violation(&entries).is_none();
        CylinderChain { entries, nested }
    }
}

/// First pair of entries of one parity whose images fail to nest under π.
pub fn nesting_violation(entries: &[ChainEntry]) -> Option<String> {
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i + 1..] {
            if a.stage % 4 != b.stage % 4 || b.stage <= a.stage {
                continue;
            }
            let ok = b.image.system() == a.image.system()
                && b.image.k() >= a.image.k()
                && b.image.project(a.image.k()).map(|p| p == a.image).unwrap_or(false);
            if !ok {
                return Some(format!("stage {} image {} not inside stage {} image {}", b.stage, b.image, a.stage, a.image));
            }
        }
    }
    None
}

/// Explicit stage-6 value on ZO blocks: P offset → Q offset, completed order-preservingly.
#[derive(Clone, Debug)]
struct ZoMap {
    fwd: Vec<u128>,
    matched: Vec<bool>,
}

/// Stage-4 data for the probes; immutable once built.
#[derive(Clone, Debug)]
pub struct Probe {
    pub stage: Stage4,
    pub targets: Vec<Basic>,
    lazy: Vec<LazyPhi4>,
    zo: [ZoMap; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail { stage: usize, reason: String },
    Unresolved(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InverseReport {
    pub phi: CylinderChain,
    pub psi: Option<CylinderChain>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitEntry {
    pub stage: usize,
    pub t: i128,
    pub local: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub r: i128,
    pub entries: Vec<OrbitEntry>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureReport {
    pub level: Level,
    pub depth: u32,
    pub j_count: u128,
    #[serde(serialize_with = "ser_rational")]
    pub fraction: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub bound: BigRational,
    pub bound_ok: bool,
    pub d_count: u128,
    pub e_count: u128,
    #[serde(serialize_with = "ser_rational")]
    pub ratio: BigRational,
    pub ratio_ok: bool,
}

fn rat(n: u128, d: u128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// h(n) = 2^{k_{n−1}} + 2^{2k_{n−1}}.
pub fn safe_height(k_prev: u32) -> i128 {
    (1i128 << k_prev) + (1i128 << (2 * k_prev))
}

impl Probe {
    pub fn new(stage: Stage4, targets: Vec<Basic>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Invalid("probe needs at least one target".into()));
        }
        let lazy = par::map(&targets, |t| LazyPhi4::new(&stage, *t, (0, 0))).into_iter().collect::<Result<Vec<_>>>()?;
        let zo = [zo_map(&stage, false)?, zo_map(&stage, true)?];
        Ok(Probe { stage, targets, lazy, zo })
    }

    /// Chain (2, k3, k4) with the auto-resolved good set and `count` seeded targets.
    pub fn desk(k3: u32, k4: u32, count: usize, seed: u64) -> Result<Self> {
        let targets = sample_targets(k4, count, seed, false);
        let good = good_positions(K2, k3, k4, ParityMode::Auto, false, Direction::MorseTarget, &targets)?;
        Probe::new(Stage4::new(k3, k4, good)?, targets)
    }

    pub fn k4(&self) -> u32 {
        self.stage.k4
    }

    pub fn good4(&self) -> &GoodSet {
        &self.stage.good
    }

    /// φ^n on a level of the stage-n good set (n = 2 or 4).
    pub fn phi_n(&self, level: &Level, n: usize) -> Result<Level> {
        match n {
            2 => phi2(level),
            4 => self.phi4(level),
            _ => Err(Error::StageUnavailable(format!("φ^{n} needs a materialized stage {n}; see phi6 for cylinders of 𝒫_{{k6}}"))),
        }
    }

    /// Common value of π∘ζ∘φ_τ over all sampled targets.
    pub fn phi4(&self, d: &Level) -> Result<Level> {
        if d.system() != System::Odometer || !self.stage.good.contains_level(d) {
            return Err(Error::NotGood(format!("{d} is not in 𝒢_4")));
        }
        let x = d.i() as i128;
        let mut value: Option<(Level, Basic)> = None;
        for (lz, t) in self.lazy.iter().zip(&self.targets) {
            let y = lz.image(x).ok_or_else(|| Error::Disagreement(format!("φ_{t} undefined at {d}")))?;
            let v = pi_zeta(&t.level_at(y as u128), K2);
            match &value {
                None => value = Some((v, *t)),
                Some((w, s)) if *w != v => {
                    return Err(Error::Disagreement(format!("{d}: φ_{s} gives {w}, φ_{t} gives {v}")))
                }
                _ => {}
            }
        }
        Ok(value.expect("targets nonempty").0)
    }

    /// Stage-6 value at k4 precision from a k4 cylinder, valid when c_{k6} lies in 𝒢_6.
    pub fn phi6_local(&self, c4: &Level) -> Result<Level> {
        let (k4, bar) = match c4 {
            Level::M(l) => (l.k, l.bar),
            _ => return Err(Error::MixedSystems),
        };
        if k4 != self.k4() {
            return Err(Error::Invalid(format!("{c4} is not a k4 level")));
        }
        Ok(Level::v(k4, self.zo[bar as usize].fwd[c4.i() as usize]))
    }

    /// φ^6 on a level of 𝒫_{k6}: per ω, the ZO piece of ω̂ holding it and the completed
    /// zero-template inverse, projected to k4. Asserted equal across `omegas`.
    pub fn phi6(&self, c: &Level, good6: &GoodSet, omegas: &[Basic]) -> Result<Level> {
        let (k6, bar) = match c {
            Level::M(l) => (l.k, l.bar),
            _ => return Err(Error::MixedSystems),
        };
        if !good6.contains_level(c) || good6.kn != self.k4() {
            return Err(Error::NotGood(format!("{c} is not in 𝒢_6")));
        }
        let (p, n) = (c.i(), 1u128 << self.k4());
        let beta = crate::words::tm_bit(p >> self.k4()) ^ bar;
        let x = self.zo[beta as usize].fwd[(p % n) as usize];
        let mut value: Option<Level> = None;
        for w in omegas {
            if w.k != k6 || w.system != System::Odometer {
                return Err(Error::InvalidTemplate(format!("{w} is not a stage-6 target")));
            }
            let hat = LazyHat::new(self.k4(), good6.kn1, *w, Direction::OdometerTarget)?;
            let piece = hat.piece_at(p);
            if piece.len != n || piece.start % n != 0 {
                return Err(Error::NotGood(format!("{c} sits in a piece of length {} of ω̂ for {w}", piece.len)));
            }
            let v = pi_zeta(&hat.level_at(piece.start + x), self.k4());
            match &value {
                None => value = Some(v),
                Some(u) if *u != v => return Err(Error::Disagreement(format!("{c}: {u} vs {v} at {w}"))),
                _ => {}
            }
        }
        value.ok_or_else(|| Error::Invalid("no stage-6 targets".into()))
    }

    /// Stages n ≡ 2 (mod 4) up to max_stage. Stage 6 needs a k6 cylinder, out of reach
    /// for windows; use phi6_local for its value on good blocks.
    pub fn eval_phi(&self, x: &MorseWindow, max_stage: usize) -> Result<CylinderChain> {
        let mut entries = vec![];
        for n in (2..=max_stage).step_by(4) {
            match n {
                2 => {
                    let c = x.cylinder(K2)?;
                    if let Ok(v) = phi2(&c) {
                        entries.push(ChainEntry { stage: 2, source: c, image: v, local: false });
                    }
                }
                _ => return Err(Error::InsufficientPrecision(format!("stage {n} needs a cylinder of 𝒫_{{k{n}}}"))),
            }
        }
        Ok(CylinderChain::from_entries(entries))
    }

    /// Stages n ≡ 0 (mod 4) up to max_stage.
    pub fn eval_psi(&self, y: &OdometerPrefix, max_stage: usize) -> Result<CylinderChain> {
        let mut entries = vec![];
        for n in (4..=max_stage).step_by(4) {
            match n {
                4 => {
                    let d = y.cylinder(self.k4())?;
                    if self.stage.good.contains_level(&d) {
                        entries.push(ChainEntry { stage: 4, image: self.phi4(&d)?, source: d, local: false });
                    }
                }
                _ => return Err(Error::StageUnavailable(format!("stage {n}"))),
            }
        }
        Ok(CylinderChain::from_entries(entries))
    }

    /// φ-chain of x with the local stage-6 entry, and the ψ-chain of its image:
    /// the ψ side must land back in c_{k2}(x).
    pub fn check_inverse(&self, x: &MorseWindow, stages: &[usize]) -> Result<InverseReport> {
        let mut phi = self.eval_phi(x, 2)?;
        if !stages.contains(&4) {
            let status = match phi.entries.len() {
                1 => Status::Pass,
                _ => Status::Unresolved("c_{k2}(x) outside 𝒢_2".into()),
            };
            return Ok(InverseReport { phi, psi: None, status });
        }
        let c2 = x.cylinder(K2)?;
        let c4 = x.cylinder(self.k4())?;
        let d = self.phi6_local(&c4)?;
        phi.entries.push(ChainEntry { stage: 6, source: c4, image: d, local: true });
        phi = CylinderChain::from_entries(phi.entries);
        if let Some(v) = nesting_violation(&phi.entries) {
            return Ok(InverseReport { phi, psi: None, status: Status::Fail { stage: 6, reason: v } });
        }
        let psi = self.eval_psi(&OdometerPrefix::of_level(&d)?, 4)?;
        let status = match psi.entries.first() {
            None => Status::Unresolved(format!("{d} outside 𝒢_4")),
            Some(e) if e.image == c2 => Status::Pass,
            Some(e) => Status::Fail { stage: 4, reason: format!("ψ^4({d}) = {} but c_{{k2}}(x) = {c2}", e.image) },
        };
        Ok(InverseReport { phi, psi: Some(psi), status })
    }

    /// Displacements of the images of x and T^r x at every usable stage.
    pub fn orbit_sign_check(&self, x: &MorseWindow, r: i128) -> Result<OrbitReport> {
        // the last usable desk stage compares points inside one k4 block
        if r.abs() >= 1i128 << self.k4() {
            return Err(Error::RTooLarge);
        }
        let y = x.shifted(r)?;
        let mut entries = vec![];
        let mut fail = None;
        // stage 2: both in u_2(2) or ū_2(2) forces r = 0
        if r.abs() < safe_height(0) {
            let (a, b) = (x.cylinder(K2)?, y.cylinder(K2)?);
            if phi2(&a).is_ok() && phi2(&b).is_ok() {
                entries.push(OrbitEntry { stage: 2, t: 0, local: false });
                if r != 0 {
                    fail = Some((2, format!("r = {r} but both points sit at level 2")));
                }
            }
        }
        // stage 6 on ZO blocks: both points in one k4 block and both images in 𝒢_4
        let n = 1i128 << self.k4();
        let (a, b) = (x.cylinder(self.k4())?, y.cylinder(self.k4())?);
        let same_block = a.bar() == b.bar() && a.i() as i128 + r == b.i() as i128 && (0..n).contains(&(a.i() as i128 + r));
        if same_block {
            let (d1, d2) = (self.phi6_local(&a)?, self.phi6_local(&b)?);
            if self.stage.good.contains_level(&d1) && self.stage.good.contains_level(&d2) {
                let t = d2.i() as i128 - d1.i() as i128;
                entries.push(OrbitEntry { stage: 6, t, local: true });
                let (e1, e2) = (self.phi4(&d1)?, self.phi4(&d2)?);
                if t.signum() != r.signum() {
                    fail = fail.or(Some((6, format!("r = {r} but t = {t}"))));
                } else if d1.i() >> K2 == d2.i() >> K2 && (e1.bar() != e2.bar() || e1.i() as i128 + t != e2.i() as i128) {
                    fail = fail.or(Some((4, format!("φ^4 moves {e1} to {e2}, not by t = {t}"))));
                }
            }
        }
        let status = match (fail, entries.is_empty()) {
            (Some((stage, reason)), _) => Status::Fail { stage, reason },
            (None, true) => Status::Unresolved("no stage resolves both points".into()),
            (None, false) => Status::Pass,
        };
        Ok(OrbitReport { r, entries, status })
    }

    /// Exact counting for d ∈ 𝒬_{k2} at depth n ≤ 1, using the stage-6 structure on ZO
    /// blocks at k4 precision.
    pub fn measure_bound(&self, d: &Level, n: u32) -> Result<MeasureReport> {
        if d.system() != System::Odometer || d.k() != K2 {
            return Err(Error::Invalid(format!("{d} is not a level of 𝒬_{{k2}}")));
        }
        let zero = |c: u128| MeasureReport {
            level: *d,
            depth: n,
            j_count: c,
            fraction: rat(c, 2 * self.stage.k()),
            bound: BigRational::zero(),
            bound_ok: true,
            d_count: 0,
            e_count: 0,
            ratio: BigRational::zero(),
            ratio_ok: true,
        };
        let k = self.stage.k();
        match n {
            0 => return Ok(zero(2 * k)),
            1 => {}
            _ => return Err(Error::StageUnavailable(format!("depth {n} needs stage {}", 4 * n + 2))),
        }
        let (mut j, mut dd, mut e) = (0u128, 0u128, 0u128);
        for z in &self.zo {
            for p in 0..k as usize {
                if !z.matched[p] {
                    continue;
                }
                let q = z.fwd[p];
                let hit = q % (1 << K2) == d.i();
                j += hit as u128;
                if self.stage.good.contains(q) {
                    dd += 1;
                    e += hit as u128;
                }
            }
        }
        let fraction = rat(j, 2 * k);
        let two_thirds = rat(2, 3);
        let quarter = rat(1, 1 << K2);
        let bound = &quarter * (BigRational::one() - two_thirds);
        let ratio = if dd == 0 { BigRational::zero() } else { rat(e, dd) };
        Ok(MeasureReport {
            bound_ok: fraction >= bound,
            ratio_ok: ratio == quarter,
            level: *d,
            depth: n,
            j_count: j,
            fraction,
            bound,
            d_count: dd,
            e_count: e,
            ratio,
        })
    }

    /// Swap two completed stage-6 values whose ψ^4 images differ (sanity injection).
    pub fn with_fault(mut self) -> Result<Self> {
        let z = &self.zo[0];
        let (s, _) = self.stage.good.runs()[0];
        let find = |q: u128| (0..z.fwd.len()).find(|&p| z.fwd[p] == q);
        let (p1, p2) = match (find(s), find(s + 1)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Invalid("fault injection found no good pair".into())),
        };
        self.zo[0].fwd.swap(p1, p2);
        Ok(self)
    }

    /// First k4 local level of P(0) whose stage-6 value is mapped into 𝒢_4.
    pub fn good_source(&self, bar: bool) -> Option<u128> {
        let z = &self.zo[bar as usize];
        (0..z.fwd.len()).find(|&p| self.stage.good.contains(z.fwd[p])).map(|p| p as u128)
    }
}

/// φ^2: 𝒢_2 = {u_2(2), ū_2(2)} to the single level of 𝒬_{k0}.
pub fn phi2(level: &Level) -> Result<Level> {
    match level {
        Level::M(l) if l.k == K2 && l.i == 2 => Ok(Level::v(0, 0)),
        _ => Err(Error::NotGood(format!("{level} is not in 𝒢_2"))),
    }
}

fn zo_map(stage: &Stage4, bar: bool) -> Result<ZoMap> {
    let map = stage.build(&Basic::zero(System::Morse, stage.k4, bar), (0, 0))?;
    let k = stage.k() as usize;
    let mut fwd = vec![0u128; k];
    let mut matched = vec![false; k];
    let mut used = HashSet::new();
    for &(q, p) in &map.pib.pairs {
        fwd[p as usize] = q as u128;
        matched[p as usize] = true;
        used.insert(q as u128);
    }
    let free: Vec<u128> = (0..k as u128).filter(|q| !used.contains(q)).collect();
    for (p, q) in (0..k).filter(|&p| !matched[p]).zip(free) {
        fwd[p] = q;
    }
    Ok(ZoMap { fwd, matched })
}

/// Seeded windows inside a Morse prefix, with coordinate 0 in the middle.
pub fn sample_windows(prefix: &Word, len: usize, count: usize, seed: u64) -> Result<Vec<MorseWindow>> {
    use rand::{Rng, SeedableRng};
    if prefix.len() < len {
        return Err(Error::Invalid("prefix shorter than the window".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = rng.gen_range(0..=prefix.len() - len);
            MorseWindow::new(prefix.slice(s, len), len / 2)
        })
        .collect()
}

/// Human-readable fraction for reports.
pub fn fraction_string(m: &MeasureReport) -> String {
    format!("{} (bound {})", rational_string(&m.fraction), rational_string(&m.bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::morse_prefix;

    fn probe() -> Probe {
        Probe::desk(6, 14, 24, 1).unwrap()
    }

    #[test]
    fn cylinders() {
        let u = morse_prefix(8);
        let x = MorseWindow::new(u.clone(), 37).unwrap();
        assert_eq!(x.cylinder(2).unwrap(), Level::morse(2, 1, false));
        assert_eq!(x.cylinder(5).unwrap(), Level::morse(5, 5, true));
        assert!(matches!(x.cylinder(7), Err(Error::InsufficientPrecision(_))));
        let y = OdometerPrefix::new(Word::parse("1011").unwrap());
        assert_eq!(y.cylinder(4).unwrap(), Level::v(4, 13));
        assert!(y.cylinder(5).is_err());
        assert_eq!(phi2(&Level::u(2, 2)).unwrap(), Level::v(0, 0));
        assert!(phi2(&Level::u(2, 1)).is_err());
    }

    #[test]
    fn probes_at_desk_stage() {
        let pr = probe();
        let g = pr.good4().runs()[0].0;
        assert!(pr.phi4(&Level::v(14, g)).is_ok());
        assert!(matches!(pr.phi4(&Level::v(14, 0)), Err(Error::NotGood(_))));
        let prefix = morse_prefix(20);
        let ws = sample_windows(&prefix, 1 << 16, 12, 4).unwrap();
        for w in &ws {
            let rep = pr.check_inverse(w, &[2, 4]).unwrap();
            assert!(rep.phi.nested);
            assert!(!matches!(rep.status, Status::Fail { .. }), "{rep:?}");
            for r in -3..=3 {
                let o = pr.orbit_sign_check(w, r).unwrap();
                assert!(!matches!(o.status, Status::Fail { .. }), "{o:?}");
            }
        }
        // a window centred on a good source level resolves and passes
        let p = pr.good_source(false).unwrap() as usize;
        // an aligned block of u_20 equal to u_14, far from both ends
        let blk = (4usize..).find(|b| !crate::words::tm_bit(*b as u128)).unwrap() << 14;
        let w = MorseWindow::new(prefix.slice(blk + p - (1 << 15), 1 << 16), 1 << 15).unwrap();
        assert_eq!(w.cylinder(14).unwrap(), Level::u(14, p as u128));
        assert_eq!(pr.check_inverse(&w, &[2, 4]).unwrap().status, Status::Pass);
        let o = pr.orbit_sign_check(&w, 1).unwrap();
        assert_eq!(o.status, Status::Pass);
        assert_eq!(o.entries.iter().find(|e| e.stage == 6).unwrap().t, 1);
        let back = pr.orbit_sign_check(&w.shifted(1).unwrap(), -1).unwrap();
        assert_eq!(back.entries.iter().find(|e| e.stage == 6).unwrap().t, -1);
        assert_eq!(pr.orbit_sign_check(&w, 0).unwrap().status, Status::Pass);
        let bad = pr.clone().with_fault().unwrap();
        let fails = (0..4u128)
            .filter_map(|j| {
                let p = (0..1usize << 14).find(|&p| bad.zo[0].fwd[p] == pr.good4().runs()[0].0 + j)?;
                let w = MorseWindow::new(prefix.slice(blk + p - (1 << 15), 1 << 16), 1 << 15).ok()?;
                Some(bad.check_inverse(&w, &[2, 4]).unwrap().status)
            })
            .filter(|s| matches!(s, Status::Fail { stage: 4, .. }))
            .count();
        assert!(fails >= 1);
        let only2 = pr.check_inverse(&w, &[2]).unwrap().status;
        assert_eq!(only2 == Status::Pass, p % 4 == 2);
    }

    #[test]
    fn counting() {
        let pr = probe();
        for i in 0..4 {
            let m = pr.measure_bound(&Level::v(2, i), 1).unwrap();
            assert!(m.ratio_ok, "{m:?}");
            assert_eq!(m.e_count * 4, m.d_count);
            let z = pr.measure_bound(&Level::v(2, i), 0).unwrap();
            assert!(z.bound_ok && z.bound.is_zero());
        }
        assert!(pr.measure_bound(&Level::v(2, 0), 2).is_err());
    }

    #[test]
    fn nesting_detects_violations() {
        let e = |stage, image| ChainEntry { stage, source: Level::u(2, 2), image, local: false };
        assert!(nesting_violation(&[e(2, Level::v(0, 0)), e(6, Level::v(14, 5))]).is_none());
        assert!(nesting_violation(&[e(4, Level::u(2, 1)), e(8, Level::u(6, 2))]).is_some());
        assert!(nesting_violation(&[e(4, Level::u(2, 2)), e(8, Level::u(6, 2))]).is_none());
    }
}
