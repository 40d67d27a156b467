//! Stage 4: maps from 𝒬_{k_4} to basic Morse templates, built as concatenations of
//! inverted stage-2 maps over the local block partition of τ̂, with sticky notes.

use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stage2::{omega2, phi_for, K2};
use crate::block_reorder::{hat, Direction, Hat, LazyHat, StageGeometry};
use crate::error::{Error, Result};
use crate::good_sets::{pi_zeta, GoodSet};
use crate::par;
use crate::pib::{transport, Interval, Mode, Pib, TplRef};
use crate::report::Check;
use crate::templates::{
    augmented, basic_predecessors, canonical, diminished, extra, missing, Basic, Kind, Side, Template,
};
use crate::towers::{Level, System};

const N2: u128 = 1 << K2;

/// Which version of 𝒬_{k} is the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum DomainKind {
    Full,
    Missing,
    Extra,
}

/// 𝒬_{k}, 𝒬_{k}^m (bottom removed) or 𝒬_{k}^e (v_k(0) appended).
pub fn domain_template(k: u32, kind: DomainKind) -> Template {
    let q = Basic::odometer(k, 0);
    match kind {
        DomainKind::Full => q.into(),
        DomainKind::Missing => missing(&q).unwrap(),
        DomainKind::Extra => extra(&q, None).unwrap(),
    }
}

/// Real levels covered by the bottom and top sticky notes, given b = g mod 2^{k_2}.
/// Partial local blocks of height 1..3 are notes; a full block of 4 is body.
pub fn note_span(b: u128, kind: DomainKind) -> (u128, u128) {
    let head = (N2 - b) % N2;
    match kind {
        DomainKind::Full => (b, head),
        DomainKind::Missing => ((b + N2 - 1) % N2, head),
        DomainKind::Extra => (b, (head + 1) % N2),
    }
}

/// Templates of Ω_2 whose top `real` levels are the bottom ones of `dom`.
pub fn tail_set(dom: &Template, real: u128) -> Vec<Template> {
    if real == 0 {
        return vec![];
    }
    let want: Vec<Level> = (0..real).map(|j| pi_zeta(&dom.level_at(j), K2)).collect();
    omega2().0.into_iter().filter(|w| (0..real).all(|j| w.level_at(N2 - real + j) == want[j as usize])).collect()
}

/// Templates of Ω_2 whose bottom `real` levels are the top ones of `dom`.
pub fn head_set(dom: &Template, real: u128) -> Vec<Template> {
    if real == 0 {
        return vec![];
    }
    let n = dom.len();
    let want: Vec<Level> = (0..real).map(|j| pi_zeta(&dom.level_at(n - real + j), K2)).collect();
    omega2().0.into_iter().filter(|w| (0..real).all(|j| w.level_at(j) == want[j as usize])).collect()
}

/// φ_ω^{-1} in ω's own coordinates.
pub fn note_pib(w: &Template) -> Pib {
    let mut p = phi_for(false, w).expect("stage-2 map").invert();
    p.decomp = None;
    p
}

/// Inverted stage-2 pair (domain offset, range offset) for a body block of height h
/// whose first position is s.
fn body_pair(h: u128, s: u128) -> Result<(i128, i128)> {
    static TABLE: OnceLock<Vec<((u128, u128), (i128, i128))>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![];
        for r in 0..N2 {
            for h in [3, 4, 5] {
                // the template of Ω_2 ∪ Ω̃_2 read off v_2(r), v_2(r+1), ...
                let (start, origin) = if h == 3 { ((r + N2 - 1) % N2, 1) } else { (r, 0) };
                let w = Basic::odometer(K2, (N2 - start) % N2);
                let tpl = match h {
                    3 => missing(&w).unwrap(),
                    4 => w.into(),
                    _ => extra(&w, None).unwrap(),
                };
                let p = phi_for(false, &tpl).unwrap().invert();
                let (a, b) = p.pairs[0];
                t.push(((r, h), (a - origin, b - origin)));
            }
        }
        t
    });
    table
        .iter()
        .find(|e| e.0 == (s % N2, h))
        .map(|e| e.1)
        .ok_or_else(|| Error::InvalidTemplate(format!("local block of height {h} at {s}")))
}

/// Which members of the head and tail sets a map may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum NotePolicy {
    /// every ω whose real levels agree with the domain tower
    Literal,
    /// only those whose note keeps the bottom and top of the domain tower out of the domain
    Admissible,
}

/// Drop notes whose domain meets the bottom (tail) or top (head) level of a tower of length n.
pub fn admissible(notes: Vec<Template>, real: u128, tail: bool) -> Vec<Template> {
    let forbidden = if tail { (N2 - real) as i128 } else { real as i128 - 1 };
    notes.into_iter().filter(|w| !note_pib(w).a().contains(&forbidden)).collect()
}

/// Tail and head sets of a stage-4 map whose domain is the given version of 𝒬_{k4}
/// and whose target has b = g mod 2^{k_2}. A missing domain keeps the basic head set,
/// an extra domain keeps the basic tail set.
pub fn note_sets(k4: u32, b: u128, kind: DomainKind, policy: NotePolicy) -> (Vec<Template>, Vec<Template>) {
    let full = domain_template(k4, DomainKind::Full);
    let (tr, hr) = note_span(b, DomainKind::Full);
    let filt = |v: Vec<Template>, real, tail| match policy {
        NotePolicy::Literal => v,
        NotePolicy::Admissible => admissible(v, real, tail),
    };
    let tails = filt(tail_set(&full, tr), tr, true);
    let heads = filt(head_set(&full, hr), hr, false);
    let dom = domain_template(k4, kind);
    let (mt, eh) = note_span(b, kind);
    match kind {
        DomainKind::Full => (tails, heads),
        DomainKind::Missing => (tail_set(&dom, mt), heads),
        DomainKind::Extra => (tails, head_set(&dom, eh)),
    }
}

/// Stage-4 exponents and good set.
#[derive(Clone, Debug)]
pub struct Stage4 {
    pub k3: u32,
    pub k4: u32,
    pub good: GoodSet,
    pub policy: NotePolicy,
}

/// One φ_τ with its note choices.
#[derive(Clone, Debug)]
pub struct Stage4Map {
    pub target: Basic,
    pub tail: Option<Template>,
    pub head: Option<Template>,
    pub pib: Pib,
    pub hat: Arc<Hat>,
}

impl Stage4 {
    pub fn new(k3: u32, k4: u32, good: GoodSet) -> Result<Self> {
        if good.kn != K2 || good.kn1 != k3 || good.kn2 != k4 {
            return Err(Error::Invalid("good set built for other exponents".into()));
        }
        StageGeometry::new(K2, k3, k4, 0)?;
        Ok(Stage4 { k3, k4, good, policy: NotePolicy::Literal })
    }

    pub fn k(&self) -> u128 {
        1 << self.k4
    }

    pub fn geometry(&self, t: &Basic) -> Result<StageGeometry> {
        StageGeometry::new(K2, self.k3, self.k4, t.g)
    }

    pub fn notes(&self, t: &Basic) -> (Vec<Template>, Vec<Template>) {
        note_sets(self.k4, t.g % N2, DomainKind::Full, self.policy)
    }

    /// φ_τ for the given indices into τ_tail × τ_head.
    pub fn build(&self, t: &Basic, choice: (usize, usize)) -> Result<Stage4Map> {
        self.build_with(t, choice, None)
    }

    fn build_with(&self, t: &Basic, choice: (usize, usize), fault: Option<u128>) -> Result<Stage4Map> {
        if t.system != System::Morse || t.k != self.k4 {
            return Err(Error::InvalidTemplate(format!("{t} is not a stage-4 target")));
        }
        let geom = self.geometry(t)?;
        let h = Arc::new(hat(&(*t).into(), &geom, Direction::MorseTarget)?);
        let k = self.k();
        let b = geom.b;
        let (tails, heads) = self.notes(t);
        let pick = |v: &[Template], i: usize| -> Result<Option<Template>> {
            if v.is_empty() {
                return Ok(None);
            }
            v.get(i).cloned().map(Some).ok_or_else(|| Error::Invalid(format!("note choice {i} of {}", v.len())))
        };
        let (tail, head) = (pick(&tails, choice.0)?, pick(&heads, choice.1)?);

        // body in τ̂ coordinates
        let pieces = &h.hat.partition.pieces;
        let body_pieces = if b != 0 { &pieces[1..pieces.len() - 1] } else { &pieces[..] };
        let mut pairs: Vec<(i128, i128)> = Vec::with_capacity(pieces.len() + self.good.count() as usize);
        for p in body_pieces {
            let (da, ra) = body_pair(p.len, p.start)?;
            pairs.push((p.start as i128 + da, p.start as i128 + ra));
        }
        // order-preserving completion inside good local blocks
        let mut used_a: std::collections::HashSet<i128> = pairs.iter().map(|p| p.0).collect();
        let mut used_b: std::collections::HashSet<i128> = pairs.iter().map(|p| p.1).collect();
        for (s, l) in self.good.runs() {
            let blk = h.hat.partition.piece_at(s).unwrap();
            if blk.start != s || blk.len != l {
                return Err(Error::NotGood(format!("good run [{s}, {}) is not a local block of τ̂ for {t}", s + l)));
            }
            let r = s as i128..(s + l) as i128;
            let src: Vec<i128> = r.clone().filter(|x| !used_a.contains(x)).collect();
            let dst: Vec<i128> = r.filter(|y| !used_b.contains(y)).collect();
            for (x, y) in src.into_iter().zip(dst) {
                pairs.push((x, y));
                used_a.insert(x);
                used_b.insert(y);
            }
        }
        if let Some(pos) = fault {
            // swap two images inside the good block containing pos
            let mut hit: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].0 / 4 == pos as i128 / 4).collect();
            hit.sort_by_key(|&i| pairs[i].0);
            if hit.len() >= 2 {
                let (i, j) = (hit[0], hit[1]);
                let tmp = pairs[i].1;
                pairs[i].1 = pairs[j].1;
                pairs[j].1 = tmp;
            }
        }
        // back to positions of τ
        for p in pairs.iter_mut() {
            p.1 = h.hat.orig[p.1 as usize] as i128;
        }
        let body_iv = if b != 0 {
            Interval::new(b as i128, (k - (N2 - b)) as i128)
        } else {
            Interval::new(0, k as i128)
        };
        let body = Pib::new(body_iv, body_iv, pairs)?;
        let q = domain_template(self.k4, DomainKind::Full);
        let tpl: Template = (*t).into();
        let note = |w: &Option<Template>| w.as_ref().map(note_pib).unwrap_or_else(Pib::empty);
        let mut pib = Pib::decomposed(Mode::Disjoint, note(&tail), body.clone(), note(&head))?;
        let lo = if b != 0 { -((N2 - b) as i128) } else { 0 };
        let d = lo - pib.i.lo;
        pib = pib.shift(d, d);
        let pib = pib.with_templates(Some(TplRef::new(q, 0)), Some(TplRef::new(tpl, 0)));
        Ok(Stage4Map { target: *t, tail, head, pib, hat: h })
    }

    /// φ for a diminished or augmented variant, by matching with φ_τ or φ_{τ_p}.
    pub fn build_variant(&self, target: &Template, choice: (usize, usize)) -> Result<Pib> {
        let base = *target.base().ok_or_else(|| Error::NonBasic(target.to_string()))?;
        let reference = match target.kind {
            Kind::Diminished { side: Side::U, .. } | Kind::Augmented { side: Side::D, .. } => base,
            Kind::Diminished { side: Side::D, j } | Kind::Augmented { side: Side::U, j } => {
                let ps = basic_predecessors(&base);
                match (base.is_zero_one(), j) {
                    (true, Some(j)) => *ps.iter().find(|p| p.pre == j).expect("p(j) of the zero/one template"),
                    _ => ps[0],
                }
            }
            _ => return Err(Error::InvalidTemplate(format!("{target} is not diminished or augmented"))),
        };
        let r = self.build(&reference, choice)?;
        transport(&r.pib, TplRef::new(target.clone(), 0))
    }

    /// Up to `cap` note choices for τ: always (0, 0), then seeded extra picks.
    pub fn choices(&self, t: &Basic, cap: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
        let (ts, hs) = self.notes(t);
        let (nt, nh) = (ts.len().max(1), hs.len().max(1));
        let mut all: Vec<(usize, usize)> = (0..nt).flat_map(|i| (0..nh).map(move |j| (i, j))).collect();
        let first = all.remove(0);
        all.shuffle(rng);
        std::iter::once(first).chain(all.into_iter().take(cap.saturating_sub(1))).collect()
    }
}

/// Pointwise φ_τ from closed forms only.
#[derive(Clone, Debug)]
pub struct LazyPhi4 {
    pub k: u128,
    pub good: GoodSet,
    pub hat: LazyHat,
    pub tail: Option<Pib>,
    pub head: Option<Pib>,
}

impl LazyPhi4 {
    pub fn new(stage: &Stage4, t: Basic, choice: (usize, usize)) -> Result<Self> {
        let hat = LazyHat::new(K2, stage.k3, t, Direction::MorseTarget)?;
        let (ts, hs) = stage.notes(&t);
        let b = hat.geom.b;
        let k = stage.k() as i128;
        let tail = ts.get(choice.0).map(|w| {
            let d = -((N2 - b) as i128);
            note_pib(w).shift(d, d)
        });
        let head = hs.get(choice.1).map(|w| {
            let d = k - (N2 - b) as i128;
            note_pib(w).shift(d, d)
        });
        Ok(LazyPhi4 { k: stage.k(), good: stage.good.clone(), hat, tail, head })
    }

    pub fn image(&self, x: i128) -> Option<i128> {
        let k = self.k as i128;
        let b = self.hat.geom.b as i128;
        if b != 0 && x < b {
            return self.tail.as_ref()?.image(x);
        }
        if b != 0 && x >= k - (N2 as i128 - b) {
            return self.head.as_ref()?.image(x);
        }
        if x < 0 || x >= k {
            return None;
        }
        let xu = x as u128;
        if self.good.contains(xu) {
            return Some(self.hat.orig(xu) as i128);
        }
        let p = self.hat.piece_at(xu);
        let (da, ra) = body_pair(p.len, p.start).ok()?;
        (x == p.start as i128 + da).then(|| self.hat.orig((p.start as i128 + ra) as u128) as i128)
    }
}


/// Seeded sample of basic targets (zero and one templates always first).
pub fn sample_targets(k4: u32, count: usize, seed: u64, exhaustive: bool) -> Vec<Basic> {
    let total = crate::templates::basic_count(System::Morse, k4);
    if exhaustive || count as u128 >= total {
        return crate::templates::enumerate_basic(System::Morse, k4).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Basic::zero(System::Morse, k4, false), Basic::zero(System::Morse, k4, true)];
    while out.len() < count {
        out.push(crate::templates::basic_by_index(System::Morse, k4, rng.gen_range(2..total)));
    }
    out
}

/// Seeded pairs of distinct entries of `targets`.
pub fn sample_pairs(targets: &[Basic], count: usize, seed: u64) -> Vec<(Basic, Basic)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = targets.len();
    if n < 2 {
        return vec![];
    }
    (0..count)
        .map(|_| {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            (targets[i], targets[j])
        })
        .collect()
}

/// Checks (i) and (ii) together with internal consistency of each map.
pub fn verify_maps(stage: &Stage4, targets: &[Basic], cap: usize, seed: u64) -> Result<Vec<Check>> {
    let k = stage.k() as i128;
    let jobs: Vec<(Basic, (usize, usize))> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        targets.iter().flat_map(|t| stage.choices(t, cap, &mut rng).into_iter().map(move |c| (*t, c))).collect()
    };
    let results: Vec<Result<([Option<String>; 4], u64)>> = par::map(&jobs, |(t, c)| {
        let m = stage.build(t, *c)?;
        let ran = m.pib.ran.as_ref().unwrap();
        // the set map: pairs with a phantom end carry no level
        let real = |y: i128| ran.level(y).is_some();
        let ends = |x: i128| x == 0 || x == k - 1;
        let i = m
            .pib
            .pairs
            .iter()
            .find(|&&(x, y)| ends(x) && real(y))
            .map(|p| format!("{t} {c:?}: bottom or top of 𝒬 mapped to a level, pair {p:?}"));
        let formal = m.pib.pairs.iter().filter(|p| ends(p.0)).count() as u64;
        let ii = m.pib.b().contains(&(t.g as i128)).then(|| format!("{t} {c:?}: global cut {} in range", t.g));
        let dec = (!m.pib.decomposition_consistent()?).then(|| format!("{t} {c:?}: notes ∗ body ∗ notes differs"));
        let src = source_mismatch(&m);
        Ok(([i, ii, dec, src], formal))
    });
    let mut fails: [Option<String>; 4] = Default::default();
    let mut formal = 0;
    for r in results {
        let (r, f) = r?;
        formal += f;
        for (f, x) in fails.iter_mut().zip(r) {
            if f.is_none() {
                *f = x;
            }
        }
    }
    let n = jobs.len() as u64;
    let [i, ii, dec, src] = fails;
    Ok(vec![
        Check::new("(i) bottom and top of 𝒬_{k_4} not in any domain", n, i).with_detail(format!(
            "{formal} maps list the bottom or top in A with a phantom image (no level is assigned)"
        )),
        Check::new("(ii) global cut not in any range", n, ii),
        Check::new("sticky-note decomposition consistent", n, dec),
        Check::new("body blocks of τ̂ project onto the stage-2 source templates", n, src),
    ])
}

/// Each body block of τ̂ must project to 𝒫_2(i), 𝒫_2^m(i) or 𝒫_2^{e}(i) as its height says.
fn source_mismatch(m: &Stage4Map) -> Option<String> {
    let parts = &m.hat.hat.partition.pieces;
    let b = m.hat.geom.b;
    let body = if b != 0 { &parts[1..parts.len() - 1] } else { &parts[..] };
    body.iter().find_map(|p| {
        let lv: Vec<Level> =
            (p.start..p.start + p.len).map(|y| pi_zeta(&m.hat.hat.levels[y as usize], K2)).collect();
        let bar = lv[lv.len().min(4) - 1].bar().unwrap();
        let ok = match p.len {
            4 => lv.iter().enumerate().all(|(r, l)| *l == Level::morse(K2, r as u128, bar)),
            3 => lv.iter().enumerate().all(|(r, l)| *l == Level::morse(K2, r as u128 + 1, bar)),
            5 => lv[..4].iter().enumerate().all(|(r, l)| *l == Level::morse(K2, r as u128, bar)) && lv[4].i() == 0,
            _ => false,
        };
        (!ok).then(|| format!("{}: block at {} of height {} reads {:?}", m.target, p.start, p.len, lv))
    })
}

/// (iii): for sampled pairs, φ_{τ1} and φ_{τ2} are defined on every good level and
/// agree after π∘ζ.
pub fn verify_good_matching(stage: &Stage4, pairs: &[(Basic, Basic)], fault: Option<usize>) -> Result<Check> {
    let good: Vec<u128> = stage.good.runs().into_iter().flat_map(|(s, l)| s..s + l).collect();
    let res: Vec<Result<Option<String>>> = par::map(&(0..pairs.len()).collect::<Vec<_>>(), |&idx| {
        let (t1, t2) = pairs[idx];
        let f = (fault == Some(idx)).then(|| good[good.len() / 2]);
        let m1 = stage.build_with(&t1, (0, 0), f)?;
        let m2 = stage.build(&t2, (0, 0))?;
        Ok(good.iter().find_map(|&c| {
            let c = c as i128;
            let img = |m: &Stage4Map| m.pib.image(c).map(|y| pi_zeta(&m.target.level_at(y as u128), K2));
            match (img(&m1), img(&m2)) {
                (Some(x), Some(y)) if x == y => None,
                (x, y) => Some(format!("({t1}, {t2}) at good position {c}: {x:?} vs {y:?}")),
            }
        }))
    });
    let mut fail = None;
    for r in res {
        if let (None, Some(f)) = (&fail, r?) {
            fail = Some(f);
        }
    }
    Ok(Check::new("(iii) good-set matching across targets", (pairs.len() * good.len()) as u64, fail))
}

/// (iv) and (v): φ_{τ^-(d)} matches φ_{τ_p^-(u)}, φ_{τ^+(u,i)} matches φ_{τ_p^+(d,i)}.
pub fn verify_variant_matching(stage: &Stage4, targets: &[Basic]) -> Result<Vec<Check>> {
    let res: Vec<Result<(Option<String>, Option<String>, u64, u64)>> = par::map(targets, |t| {
        let ps = basic_predecessors(t);
        let mut dim = None;
        let mut aug = None;
        let (mut nd, mut na) = (0, 0);
        let js: Vec<Option<bool>> = if t.is_zero_one() { vec![Some(false), Some(true)] } else { vec![None] };
        for &j in &js {
            let p = match j {
                Some(j) => *ps.iter().find(|p| p.pre == j).unwrap(),
                None => ps[0],
            };
            nd += 1;
            let lhs = stage.build_variant(&diminished(t, Side::D, j)?, (0, 0))?;
            let pj = if p.is_zero_one() { j.or(Some(p.pre)) } else { None };
            let rhs = stage.build_variant(&diminished(&p, Side::U, pj)?, (0, 0))?;
            if dim.is_none() && !lhs.matches(&rhs)? {
                dim = Some(format!("{t}: φ_{{τ^-(d)}} vs φ_{{τ_p^-(u)}} with p = {p}"));
            }
        }
        for i in [false, true] {
            let p = if t.is_zero_one() { *ps.iter().find(|p| p.pre == i).unwrap() } else { ps[0] };
            na += 1;
            let lhs = stage.build_variant(&augmented(t, Side::U, Some(i))?, (0, 0))?;
            let rhs = stage.build_variant(&augmented(&p, Side::D, Some(i))?, (0, 0))?;
            if aug.is_none() && !lhs.matches(&rhs)? {
                aug = Some(format!("{t}: φ_{{τ^+(u,{})}} vs φ_{{τ_p^+(d,{})}}", i as u8, i as u8));
            }
        }
        Ok((dim, aug, nd, na))
    });
    let (mut d, mut a, mut nd, mut na) = (None, None, 0, 0);
    for r in res {
        let (x, y, n1, n2) = r?;
        d = d.or(x);
        a = a.or(y);
        nd += n1;
        na += n2;
    }
    Ok(vec![
        Check::new("(iv) φ_{τ^-(d)} ≡ φ_{τ_p^-(u)} (diminished)", nd, d),
        Check::new("(v) φ_{τ^+(u,i)} ≡ φ_{τ_p^+(d,i)} (augmented)", na, a),
    ])
}

/// Explicit vs lazy evaluation at seeded (target, position) samples.
pub fn verify_lazy(stage: &Stage4, targets: &[Basic], samples: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per = samples.div_ceil(targets.len().max(1));
    let k = stage.k() as i128;
    let jobs: Vec<(Basic, Vec<i128>)> = targets
        .iter()
        .map(|t| (*t, (0..per).map(|_| rng.gen_range(-4..k + 4)).collect()))
        .collect();
    let res: Vec<Result<Option<String>>> = par::map(&jobs, |(t, xs)| {
        let m = stage.build(t, (0, 0))?;
        let lazy = LazyPhi4::new(stage, *t, (0, 0))?;
        Ok(xs.iter().find_map(|&x| {
            let (e, l) = (m.pib.image(x), lazy.image(x));
            (e != l).then(|| format!("{t} at {x}: explicit {e:?}, lazy {l:?}"))
        }))
    });
    let mut fail = None;
    for r in res {
        if let (None, Some(f)) = (&fail, r?) {
            fail = Some(f);
        }
    }
    Ok(Check::new("lazy evaluator agrees with the materialized maps", (per * jobs.len()) as u64, fail))
}

/// The canonical source tower this stage maps from.
pub fn source_tower(k4: u32) -> Template {
    canonical(System::Odometer, k4, 0).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::good_sets::{good_positions, ParityMode};

    fn small() -> Stage4 {
        let gs = good_positions(K2, 6, 14, ParityMode::Explicit { parity: 0, offset: 6 }, false, Direction::MorseTarget, &[])
            .unwrap();
        Stage4::new(6, 14, gs).unwrap()
    }

    #[test]
    fn note_spans() {
        assert_eq!(note_span(0, DomainKind::Full), (0, 0));
        assert_eq!(note_span(1, DomainKind::Full), (1, 3));
        assert_eq!(note_span(0, DomainKind::Missing), (3, 0));
        assert_eq!(note_span(0, DomainKind::Extra), (0, 1));
        assert_eq!(note_span(1, DomainKind::Extra), (1, 0));
        let q = domain_template(14, DomainKind::Full);
        assert!(tail_set(&q, 0).is_empty());
        for b in 1..4 {
            assert!(!admissible(tail_set(&q, b), b, true).is_empty());
            assert!(!admissible(head_set(&q, 4 - b), 4 - b, false).is_empty());
        }
        // the basic head at b = 2 carries the top of 𝒬 into the domain
        let hs = head_set(&q, 2);
        assert!(hs.len() > admissible(hs.clone(), 2, false).len());
    }

    #[test]
    fn small_stage_checks() {
        let st = small();
        let ts = sample_targets(14, 24, 3, false);
        for c in verify_maps(&st, &ts, 2, 1).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        let mut adm = st.clone();
        adm.policy = NotePolicy::Admissible;
        for c in verify_maps(&adm, &ts, 8, 1).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        let pairs: Vec<_> = ts.windows(2).map(|w| (w[0], w[1])).collect();
        assert!(verify_good_matching(&st, &pairs, None).unwrap().passed);
        assert!(!verify_good_matching(&st, &pairs, Some(3)).unwrap().passed);
        for c in verify_variant_matching(&st, &ts).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        assert!(verify_lazy(&st, &ts, 20000, 5).unwrap().passed);
    }
}
