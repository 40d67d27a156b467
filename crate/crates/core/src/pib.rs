//! Partial interval bijections [I, J, A, B, f], their concatenations and
//! reordering maps.

use crate::error::{Error, Result};
use crate::templates::Template;
use crate::towers::Level;
use rand::Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::sync::Arc;

/// Half-open integer interval [lo, hi).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: i128,
    pub hi: i128,
}

impl Interval {
    pub fn new(lo: i128, hi: i128) -> Self {
        assert!(lo <= hi, "bad interval [{lo}, {hi})");
        Interval { lo, hi }
    }

    pub fn empty() -> Self {
        Interval { lo: 0, hi: 0 }
    }

    pub fn len(&self) -> i128 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn contains(&self, x: i128) -> bool {
        self.lo <= x && x < self.hi
    }

    pub fn covers(&self, o: &Interval) -> bool {
        o.is_empty() || (self.lo <= o.lo && o.hi <= self.hi)
    }

    pub fn shift(&self, t: i128) -> Self {
        Interval { lo: self.lo + t, hi: self.hi + t }
    }

    /// Inclusive endpoints, as used in JSON exports.
    pub fn inclusive(&self) -> [i128; 2] {
        [self.lo, self.hi - 1]
    }
}

/// A template attached to an interval: coordinate x is template position x - origin.
#[derive(Clone, Debug)]
pub struct TplRef {
    pub tpl: Arc<Template>,
    pub origin: i128,
}

impl TplRef {
    pub fn new(tpl: Template, origin: i128) -> Self {
        TplRef { tpl: Arc::new(tpl), origin }
    }

    /// Level at coordinate x, None for phantom coordinates outside the template.
    pub fn level(&self, x: i128) -> Option<Level> {
        let p = x - self.origin;
        (p >= 0 && (p as u128) < self.tpl.len()).then(|| self.tpl.level_at(p as u128))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Disjoint,
    Overlapping,
}

/// A sticky-note decomposition (bottom note, body, top note).
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub mode: Mode,
    pub bottom: Pib,
    pub body: Pib,
    pub top: Pib,
}

/// Pointwise access shared by tabulated and closed-form maps.
pub trait IntervalMap {
    fn domain(&self) -> Interval;
    fn codomain(&self) -> Interval;
    fn image(&self, a: i128) -> Option<i128>;
}

#[derive(Clone, Debug)]
pub struct Pib {
    pub i: Interval,
    pub j: Interval,
    /// (a, f(a)) sorted by a
    pub pairs: Vec<(i128, i128)>,
    pub dom: Option<TplRef>,
    pub ran: Option<TplRef>,
    pub decomp: Option<Box<Decomposition>>,
}

/// Equality of the underlying quintuples; attached templates and notes are ignored.
impl PartialEq for Pib {
    fn eq(&self, o: &Self) -> bool {
        self.i == o.i && self.j == o.j && self.pairs == o.pairs
    }
}
impl Eq for Pib {}

impl IntervalMap for Pib {
    fn domain(&self) -> Interval {
        self.i
    }
    fn codomain(&self) -> Interval {
        self.j
    }
    fn image(&self, a: i128) -> Option<i128> {
        self.pairs.binary_search_by_key(&a, |p| p.0).ok().map(|k| self.pairs[k].1)
    }
}

impl Pib {
    pub fn new(i: Interval, j: Interval, mut pairs: Vec<(i128, i128)>) -> Result<Self> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!("{} mapped twice", w[0].0)));
            }
        }
        let mut bs: Vec<i128> = pairs.iter().map(|p| p.1).collect();
        bs.sort_unstable();
        if bs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("f is not injective".into()));
        }
        if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| !i.contains(a) || !j.contains(b)) {
            return Err(Error::Invalid(format!("pair ({a},{b}) outside I={i:?}, J={j:?}")));
        }
        Ok(Pib { i, j, pairs, dom: None, ran: None, decomp: None })
    }

    /// The empty map with I = J = ∅.
    pub fn empty() -> Self {
        Pib { i: Interval::empty(), j: Interval::empty(), pairs: vec![], dom: None, ran: None, decomp: None }
    }

    pub fn is_empty(&self) -> bool {
        self.i.is_empty() && self.j.is_empty()
    }

    pub fn with_templates(mut self, dom: Option<TplRef>, ran: Option<TplRef>) -> Self {
        self.dom = dom;
        self.ran = ran;
        self
    }

    pub fn a(&self) -> Vec<i128> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn b(&self) -> Vec<i128> {
        let mut v: Vec<i128> = self.pairs.iter().map(|p| p.1).collect();
        v.sort_unstable();
        v
    }

    pub fn image(&self, a: i128) -> Option<i128> {
        IntervalMap::image(self, a)
    }

    pub fn preimage(&self, b: i128) -> Option<i128> {
        self.pairs.iter().find(|p| p.1 == b).map(|p| p.0)
    }

    pub fn invert(&self) -> Pib {
        let mut pairs: Vec<(i128, i128)> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        let decomp = self.decomp.as_ref().map(|d| {
            Box::new(Decomposition {
                mode: d.mode,
                bottom: d.bottom.invert(),
                body: d.body.invert(),
                top: d.top.invert(),
            })
        });
        Pib { i: self.j, j: self.i, pairs, dom: self.ran.clone(), ran: self.dom.clone(), decomp }
    }

    pub fn shift(&self, t: i128, s: i128) -> Pib {
        let sh = |r: &Option<TplRef>, d| r.as_ref().map(|r| TplRef { tpl: r.tpl.clone(), origin: r.origin + d });
        Pib {
            i: self.i.shift(t),
            j: self.j.shift(s),
            pairs: self.pairs.iter().map(|&(a, b)| (a + t, b + s)).collect(),
            dom: sh(&self.dom, t),
            ran: sh(&self.ran, s),
            decomp: self.decomp.as_ref().map(|d| {
                Box::new(Decomposition {
                    mode: d.mode,
                    bottom: d.bottom.shift(t, s),
                    body: d.body.shift(t, s),
                    top: d.top.shift(t, s),
                })
            }),
        }
    }

    /// One map is a translate of the other.
    pub fn equivalent(&self, o: &Pib) -> bool {
        if self.i.len() != o.i.len() || self.j.len() != o.j.len() || self.pairs.len() != o.pairs.len() {
            return false;
        }
        let (t, s) = (o.i.lo - self.i.lo, o.j.lo - self.j.lo);
        self.pairs.iter().zip(&o.pairs).all(|(&(a, b), &(c, d))| a + t == c && b + s == d)
    }

    /// Both maps share I, J, A and hit identical levels of their range templates.
    pub fn matches(&self, o: &Pib) -> Result<bool> {
        let (r1, r2) = match (&self.ran, &o.ran) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::UntypedMatch),
        };
        if self.i != o.i || self.j != o.j || self.a() != o.a() {
            return Ok(false);
        }
        let phantom = |a: i128| self.dom.as_ref().is_some_and(|d| d.level(a).is_none());
        Ok(self.pairs.iter().zip(&o.pairs).all(|(&(a, b), &(_, d))| match (r1.level(b), r2.level(d)) {
            _ if phantom(a) => true,
            (Some(x), Some(y)) => x == y,
            (None, None) => b == d,
            _ => false,
        }))
    }

    /// Simple concatenation: f2 is translated to start where f1 ends.
    pub fn concat(&self, f2: &Pib) -> Pib {
        if self.is_empty() {
            return Pib { decomp: None, ..f2.clone() };
        }
        if f2.is_empty() {
            return Pib { decomp: None, ..self.clone() };
        }
        let (t, s) = (self.i.hi - f2.i.lo, self.j.hi - f2.j.lo);
        let mut pairs = self.pairs.clone();
        pairs.extend(f2.pairs.iter().map(|&(a, b)| (a + t, b + s)));
        Pib {
            i: Interval::new(self.i.lo, self.i.hi + f2.i.len()),
            j: Interval::new(self.j.lo, self.j.hi + f2.j.len()),
            pairs,
            dom: None,
            ran: None,
            decomp: None,
        }
    }

    pub fn concat_all<'a, I: IntoIterator<Item = &'a Pib>>(parts: I) -> Pib {
        parts.into_iter().fold(Pib::empty(), |acc, p| acc.concat(p))
    }

    fn join(mode: Mode, x: &Pib, y: &Pib) -> Result<Pib> {
        match mode {
            Mode::Disjoint => Ok(x.concat(y)),
            Mode::Overlapping => x.overlap_concat(y),
        }
    }

    /// Build a whole map from its three pieces and remember the decomposition.
    pub fn decomposed(mode: Mode, bottom: Pib, body: Pib, top: Pib) -> Result<Pib> {
        let whole = Pib::join(mode, &Pib::join(mode, &bottom, &body)?, &top)?;
        Ok(whole.attach(mode, bottom, body, top))
    }

    /// Store the pieces in the coordinates of `self`: bottom at the start, top at the
    /// end, body right after the bottom.
    fn attach(self, mode: Mode, bottom: Pib, body: Pib, top: Pib) -> Pib {
        let (i, j) = (self.i, self.j);
        let bottom = bottom.shift(i.lo - bottom.i.lo, j.lo - bottom.j.lo);
        let body = body.shift(bottom.i.hi - body.i.lo, bottom.j.hi - body.j.lo);
        let top = top.shift(i.hi - top.i.hi, j.hi - top.j.hi);
        Pib { decomp: Some(Box::new(Decomposition { mode, bottom, body, top })), ..self }
    }

    /// The identity `whole = bottom ⋆ body ⋆ top` for the stored decomposition.
    pub fn decomposition_consistent(&self) -> Result<bool> {
        match &self.decomp {
            None => Ok(true),
            Some(d) => {
                let w = Pib::join(d.mode, &Pib::join(d.mode, &d.bottom, &d.body)?, &d.top)?;
                Ok(w.equivalent(self))
            }
        }
    }

    pub fn bottom_note(&self) -> Option<&Pib> {
        self.decomp.as_ref().map(|d| &d.bottom)
    }

    pub fn top_note(&self) -> Option<&Pib> {
        self.decomp.as_ref().map(|d| &d.top)
    }

    /// Overlapping concatenation f1 ∗̃ f2 = f1(1) ∗ f1(2) ∗ f1(3) ∗ f2(2) ∗ f2(3),
    /// defined when f1's top note is equivalent to f2's bottom note. Pieces whose own
    /// decomposition is overlapping are joined recursively with ∗̃.
    pub fn overlap_concat(&self, f2: &Pib) -> Result<Pib> {
        let (d1, d2) = match (&self.decomp, &f2.decomp) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::OverlapMismatch("operand without a sticky-note decomposition".into())),
        };
        if !d1.top.equivalent(&d2.bottom) {
            return Err(Error::OverlapMismatch(format!(
                "top note |I|={} |A|={} vs bottom note |I|={} |A|={}",
                d1.top.i.len(),
                d1.top.pairs.len(),
                d2.bottom.i.len(),
                d2.bottom.pairs.len()
            )));
        }
        if d1.mode != d2.mode {
            return Err(Error::OverlapMismatch("operands use different decomposition modes".into()));
        }
        let m = d1.mode;
        let body = Pib::join(m, &Pib::join(m, &d1.body, &d1.top)?, &d2.body)?;
        let (bottom, top) = (d1.bottom.clone(), d2.top.clone());
        let whole = Pib::join(m, &Pib::join(m, &bottom, &body)?, &top)?;
        Ok(whole.attach(m, bottom, body, top))
    }

    /// Random map for property tests: intervals of length < `max_len` starting at `lo`.
    pub fn random<R: Rng>(rng: &mut R, max_len: i128, lo: i128) -> Pib {
        let n = rng.gen_range(0..max_len);
        let m = rng.gen_range(0..max_len);
        let i = Interval::new(lo, lo + n);
        let j = Interval::new(lo, lo + m);
        let mut bs: Vec<i128> = (j.lo..j.hi).collect();
        let mut as_: Vec<i128> = (i.lo..i.hi).collect();
        for v in [&mut bs, &mut as_] {
            for x in (1..v.len()).rev() {
                let y = rng.gen_range(0..=x);
                v.swap(x, y);
            }
        }
        let c = rng.gen_range(0..=n.min(m)) as usize;
        Pib::new(i, j, as_[..c].iter().copied().zip(bs[..c].iter().copied()).collect()).unwrap()
    }
}

impl Serialize for Pib {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("I", &self.i.inclusive())?;
        m.serialize_entry("J", &self.j.inclusive())?;
        m.serialize_entry("A", &self.a())?;
        m.serialize_entry("pairs", &self.pairs.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>())?;
        if let Some(d) = &self.decomp {
            #[derive(Serialize)]
            struct Notes<'a> {
                mode: Mode,
                bottom: &'a Pib,
                top: &'a Pib,
                body_pairs: usize,
            }
            m.serialize_entry(
                "notes",
                &Notes { mode: d.mode, bottom: &d.bottom, top: &d.top, body_pairs: d.body.pairs.len() },
            )?;
        }
        m.end()
    }
}

/// Elementary cycle q: the level at `src` moves to `dst`, the ones in between slide
/// one step towards `src`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cycle {
    pub src: i128,
    pub dst: i128,
}

impl Cycle {
    pub fn apply(&self, j: i128) -> i128 {
        let (s, d) = (self.src, self.dst);
        if j == s {
            d
        } else if s < d && s < j && j <= d {
            j - 1
        } else if d < s && d <= j && j < s {
            j + 1
        } else {
            j
        }
    }

    pub fn inverse(&self) -> Cycle {
        Cycle { src: self.dst, dst: self.src }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Perm {
    /// q_1 applied first
    Cycles(Vec<Cycle>),
    /// image of lo + idx
    Explicit(Arc<Vec<i128>>),
}

/// A reordering map [J, J, J, J, p].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReorderingMap {
    pub j: Interval,
    perm: Perm,
}

impl ReorderingMap {
    pub fn identity(j: Interval) -> Self {
        ReorderingMap { j, perm: Perm::Cycles(vec![]) }
    }

    /// p = q_n ∘ ⋯ ∘ q_1 for the cycles listed in application order.
    pub fn from_cycles(j: Interval, cycles: Vec<Cycle>) -> Result<Self> {
        if let Some(c) = cycles.iter().find(|c| !j.contains(c.src) || !j.contains(c.dst)) {
            return Err(Error::IntervalMismatch(format!("cycle {c:?} outside {j:?}")));
        }
        Ok(ReorderingMap { j, perm: Perm::Cycles(cycles) })
    }

    pub fn from_images(j: Interval, images: Vec<i128>) -> Result<Self> {
        if images.len() as i128 != j.len() {
            return Err(Error::IntervalMismatch("image list length".into()));
        }
        let mut seen = vec![false; images.len()];
        for &y in &images {
            if !j.contains(y) || std::mem::replace(&mut seen[(y - j.lo) as usize], true) {
                return Err(Error::Invalid("not a permutation".into()));
            }
        }
        Ok(ReorderingMap { j, perm: Perm::Explicit(Arc::new(images)) })
    }

    pub fn from_fn(j: Interval, f: impl Fn(i128) -> i128) -> Result<Self> {
        ReorderingMap::from_images(j, (j.lo..j.hi).map(f).collect())
    }

    pub fn cycles(&self) -> Option<&[Cycle]> {
        match &self.perm {
            Perm::Cycles(c) => Some(c),
            Perm::Explicit(_) => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.perm {
            Perm::Cycles(c) => c.is_empty(),
            Perm::Explicit(v) => v.iter().enumerate().all(|(i, &y)| y == self.j.lo + i as i128),
        }
    }

    pub fn apply(&self, x: i128) -> i128 {
        assert!(self.j.contains(x), "{x} outside {:?}", self.j);
        match &self.perm {
            Perm::Cycles(c) => c.iter().fold(x, |y, q| q.apply(y)),
            Perm::Explicit(v) => v[(x - self.j.lo) as usize],
        }
    }

    /// p(x) inside J, identity outside (the restricted form).
    pub fn apply_restricted(&self, x: i128) -> i128 {
        if self.j.contains(x) {
            self.apply(x)
        } else {
            x
        }
    }

    pub fn inverse(&self) -> ReorderingMap {
        match &self.perm {
            Perm::Cycles(c) => ReorderingMap { j: self.j, perm: Perm::Cycles(c.iter().rev().map(Cycle::inverse).collect()) },
            Perm::Explicit(v) => {
                let mut inv = vec![0; v.len()];
                for (i, &y) in v.iter().enumerate() {
                    inv[(y - self.j.lo) as usize] = self.j.lo + i as i128;
                }
                ReorderingMap { j: self.j, perm: Perm::Explicit(Arc::new(inv)) }
            }
        }
    }

    pub fn to_explicit(&self) -> ReorderingMap {
        let images = (self.j.lo..self.j.hi).map(|x| self.apply(x)).collect();
        ReorderingMap { j: self.j, perm: Perm::Explicit(Arc::new(images)) }
    }
}

/// p2 ∘ p1.
pub fn compose_reorder(p2: &ReorderingMap, p1: &ReorderingMap) -> Result<ReorderingMap> {
    if p1.j != p2.j {
        return Err(Error::IntervalMismatch(format!("{:?} vs {:?}", p1.j, p2.j)));
    }
    Ok(match (&p1.perm, &p2.perm) {
        (Perm::Cycles(a), Perm::Cycles(b)) => {
            ReorderingMap { j: p1.j, perm: Perm::Cycles(a.iter().chain(b.iter()).copied().collect()) }
        }
        _ => ReorderingMap::from_fn(p1.j, |x| p2.apply(p1.apply(x)))?,
    })
}

/// The reordered list: item j goes to position p(j).
pub fn apply_reorder<T: Clone>(p: &ReorderingMap, items: &[T]) -> Result<Vec<T>> {
    if items.len() as i128 != p.j.len() {
        return Err(Error::IntervalMismatch(format!("{} items for {:?}", items.len(), p.j)));
    }
    let mut out: Vec<Option<T>> = vec![None; items.len()];
    for (idx, it) in items.iter().enumerate() {
        out[(p.apply(p.j.lo + idx as i128) - p.j.lo) as usize] = Some(it.clone());
    }
    Ok(out.into_iter().map(|x| x.expect("permutation")).collect())
}

pub fn apply_reorder_template(p: &ReorderingMap, t: &Template) -> Result<Template> {
    Template::explicit(apply_reorder(p, &t.levels()?)?)
}

/// p̂ ∘ f̂ = [I, J, A, p(B), p ∘ f].
pub fn reorder_after(p: &ReorderingMap, f: &Pib) -> Result<Pib> {
    if p.j != f.j {
        return Err(Error::IntervalMismatch(format!("{:?} vs {:?}", p.j, f.j)));
    }
    reorder_after_restricted(p, f)
}

/// As `reorder_after`, with p acting as the identity outside its interval.
pub fn reorder_after_restricted(p: &ReorderingMap, f: &Pib) -> Result<Pib> {
    if !f.j.covers(&p.j) {
        return Err(Error::IntervalMismatch(format!("{:?} does not contain {:?}", f.j, p.j)));
    }
    let pairs = f.pairs.iter().map(|&(a, b)| (a, p.apply_restricted(b))).collect();
    let mut out = Pib::new(f.i, f.j, pairs)?;
    out.dom = f.dom.clone();
    Ok(out)
}

/// The map with the same I, J, A as `reference` whose range levels in `target` are
/// the levels `reference` hits in its own range template. Each image moves by at
/// most one position, which covers every edit a variant template makes.
pub fn transport(reference: &Pib, target: TplRef) -> Result<Pib> {
    let r = reference.ran.as_ref().ok_or(Error::UntypedMatch)?;
    let mut pairs = Vec::with_capacity(reference.pairs.len());
    for &(a, b) in &reference.pairs {
        // a phantom source point stands for no level, so the pair carries over as is
        if reference.dom.as_ref().is_some_and(|d| d.level(a).is_none()) {
            pairs.push((a, b));
            continue;
        }
        let Some(want) = r.level(b) else {
            // phantom coordinates stay where they are
            if target.level(b).is_some() {
                return Err(Error::Invalid(format!("phantom point {b} is real in {}", target.tpl)));
            }
            pairs.push((a, b));
            continue;
        };
        let c = [b, b - 1, b + 1]
            .into_iter()
            .find(|&c| reference.j.contains(c) && target.level(c) == Some(want))
            .ok_or_else(|| Error::Invalid(format!("level {want} of position {b} not found near it in {}", target.tpl)))?;
        pairs.push((a, c));
    }
    Ok(Pib::new(reference.i, reference.j, pairs)?.with_templates(reference.dom.clone(), Some(target)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i128, hi: i128) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn invert_and_equivalence() {
        let f = Pib::new(iv(0, 4), iv(0, 4), vec![(2, 1)]).unwrap();
        let g = f.invert();
        assert_eq!(g.pairs, vec![(1, 2)]);
        assert_eq!(g.invert(), f);
        assert!(f.equivalent(&f.shift(3, 5)));
        let h = Pib::new(iv(0, 4), iv(0, 4), vec![(2, 1), (3, 3)]).unwrap();
        assert!(!f.equivalent(&h));
        let id = ReorderingMap::identity(iv(0, 5));
        assert!(id.inverse().is_identity());
    }

    #[test]
    fn concat_basics() {
        let f1 = Pib::new(iv(0, 3), iv(0, 2), vec![(1, 0)]).unwrap();
        let f2 = Pib::new(iv(0, 2), iv(0, 4), vec![(0, 3)]).unwrap();
        let c = f1.concat(&f2);
        assert_eq!(c.i, iv(0, 5));
        assert_eq!(c.j, iv(0, 6));
        assert_eq!(c.pairs, vec![(1, 0), (3, 5)]);
        assert_eq!(Pib::empty().concat(&f1), f1);
        assert_eq!(f1.concat(&Pib::empty()), f1);
    }

    #[test]
    fn overlap_reduces_to_concat_with_trivial_notes() {
        let body1 = Pib::new(iv(0, 3), iv(0, 3), vec![(1, 1)]).unwrap();
        let body2 = Pib::new(iv(0, 2), iv(0, 2), vec![(0, 1)]).unwrap();
        let f1 = Pib::decomposed(Mode::Disjoint, Pib::empty(), body1.clone(), Pib::empty()).unwrap();
        let f2 = Pib::decomposed(Mode::Disjoint, Pib::empty(), body2.clone(), Pib::empty()).unwrap();
        assert_eq!(f1.overlap_concat(&f2).unwrap(), body1.concat(&body2));
        let note = Pib::new(iv(0, 2), iv(0, 2), vec![(1, 0)]).unwrap();
        let f3 = Pib::decomposed(Mode::Disjoint, note, body2, Pib::empty()).unwrap();
        assert!(matches!(f1.overlap_concat(&f3), Err(Error::OverlapMismatch(_))));
    }

    #[test]
    fn worked_reordering_example() {
        let j = iv(0, 14);
        let p1 = ReorderingMap::from_cycles(j, vec![Cycle { src: 2, dst: 9 }]).unwrap();
        let p2 = ReorderingMap::from_cycles(j, vec![Cycle { src: 5, dst: 11 }]).unwrap();
        let c: Vec<i128> = (0..14).collect();
        let r1 = apply_reorder(&p1, &c).unwrap();
        assert_eq!(r1, vec![0, 1, 3, 4, 5, 6, 7, 8, 9, 2, 10, 11, 12, 13]);
        let r2 = apply_reorder(&compose_reorder(&p2, &p1).unwrap(), &c).unwrap();
        assert_eq!(r2, vec![0, 1, 3, 4, 5, 7, 8, 9, 2, 10, 11, 6, 12, 13]);
    }
}
