//! Templates: ordered lists of levels, kept parametric (basic descriptor plus an
//! edit list) so that towers of any height can be queried position by position.

use crate::error::{Error, Result};
use crate::towers::{Level, System};
use serde::{Serialize, Serializer};
use std::fmt;
use std::sync::Arc;

/// Default materialization cap: lists longer than 2^20 levels stay parametric.
pub const DEFAULT_CAP: u128 = 1 << 20;

/// Materialization cap, overridable through `KAKUTANI_CAP` (a power-of-two exponent).
pub fn materialization_cap() -> u128 {
    std::env::var("KAKUTANI_CAP")
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .filter(|&e| e < 64)
        .map(|e| 1u128 << e)
        .unwrap_or(DEFAULT_CAP)
}

/// A basic template. Odometer: position j holds v((j - g) mod 2^k).
/// Morse: position j < g holds X_pre(2^k - g + j), position j >= g holds X_suf(j - g).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basic {
    pub system: System,
    pub k: u32,
    pub g: u128,
    pub pre: bool,
    pub suf: bool,
}

impl Basic {
    pub fn odometer(k: u32, g: u128) -> Self {
        assert!(g < 1u128 << k);
        Basic { system: System::Odometer, k, g, pre: false, suf: false }
    }

    pub fn morse(k: u32, g: u128, pre: bool, suf: bool) -> Self {
        assert!(g < 1u128 << k);
        let pre = if g == 0 { suf } else { pre };
        Basic { system: System::Morse, k, g, pre, suf }
    }

    /// 𝒫_k(bar) or 𝒬_k(0).
    pub fn zero(system: System, k: u32, bar: bool) -> Self {
        match system {
            System::Morse => Basic::morse(k, 0, bar, bar),
            System::Odometer => Basic::odometer(k, 0),
        }
    }

    pub fn height(&self) -> u128 {
        1u128 << self.k
    }

    pub fn level(&self, i: u128, bar: bool) -> Level {
        match self.system {
            System::Morse => Level::morse(self.k, i, bar),
            System::Odometer => Level::v(self.k, i),
        }
    }

    pub fn level_at(&self, j: u128) -> Level {
        let n = self.height();
        assert!(j < n, "position {j} outside basic template of height {n}");
        match self.system {
            System::Odometer => Level::v(self.k, (j + n - self.g) % n),
            System::Morse if j < self.g => Level::morse(self.k, n - self.g + j, self.pre),
            System::Morse => Level::morse(self.k, j - self.g, self.suf),
        }
    }

    pub fn is_zero_one(&self) -> bool {
        self.system == System::Morse && self.g == 0
    }

    pub fn is_top_cut(&self) -> bool {
        self.g + 1 == self.height() && self.g != 0
    }

    pub fn flipped(&self) -> Self {
        Basic { pre: !self.pre, suf: !self.suf, ..*self }
    }

    /// Level that naturally precedes `l` in its tower (None if ambiguous at the Morse bottom).
    pub fn natural_pred(&self, l: Level) -> Option<Level> {
        let n = self.height();
        match l {
            Level::O(o) => Some(Level::v(o.k, (o.i + n - 1) % n)),
            Level::M(m) if m.i > 0 => Some(Level::morse(m.k, m.i - 1, m.bar)),
            Level::M(_) => None,
        }
    }

    /// Level that naturally follows `l` (None if ambiguous at the Morse top).
    pub fn natural_succ(&self, l: Level) -> Option<Level> {
        let n = self.height();
        match l {
            Level::O(o) => Some(Level::v(o.k, (o.i + 1) % n)),
            Level::M(m) if m.i + 1 < n => Some(Level::morse(m.k, m.i + 1, m.bar)),
            Level::M(_) => None,
        }
    }

    /// Two-letter form code "pre suf" as bars; None for the odometer.
    pub fn form(&self) -> Option<String> {
        match self.system {
            System::Odometer => None,
            System::Morse => Some(format!("{}{}", self.pre as u8, self.suf as u8)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    D,
    U,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::D => "d",
            Side::U => "u",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Basic,
    Diminished { side: Side, j: Option<bool> },
    Augmented { side: Side, j: Option<bool> },
    Missing,
    Extra { j: Option<bool> },
    /// A top-cut predecessor that is not itself basic.
    Predecessor { j: bool },
    Explicit,
}

/// One edit applied to the current list: positions are in the coordinates of the
/// list as it stands when the edit is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edit {
    Remove(u128),
    Insert(u128, Level),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Repr {
    Param { base: Basic, edits: Vec<Edit> },
    Explicit(Arc<[Level]>),
}

/// Where a template position comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Base(u128),
    Inserted(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Template {
    pub system: System,
    pub k: u32,
    pub kind: Kind,
    pub repr: Repr,
}

impl From<Basic> for Template {
    fn from(b: Basic) -> Self {
        Template { system: b.system, k: b.k, kind: Kind::Basic, repr: Repr::Param { base: b, edits: vec![] } }
    }
}

impl Template {
    pub fn variant(base: Basic, kind: Kind, edits: Vec<Edit>) -> Self {
        Template { system: base.system, k: base.k, kind, repr: Repr::Param { base, edits } }
    }

    pub fn explicit(levels: Vec<Level>) -> Result<Self> {
        let first = levels.first().ok_or_else(|| Error::InvalidTemplate("empty level list".into()))?;
        let (system, k) = (first.system(), first.k());
        if levels.iter().any(|l| l.system() != system || l.k() != k) {
            return Err(Error::MixedSystems);
        }
        Ok(Template { system, k, kind: Kind::Explicit, repr: Repr::Explicit(levels.into()) })
    }

    pub fn base(&self) -> Option<&Basic> {
        match &self.repr {
            Repr::Param { base, .. } => Some(base),
            Repr::Explicit(_) => None,
        }
    }

    pub fn edits(&self) -> &[Edit] {
        match &self.repr {
            Repr::Param { edits, .. } => edits,
            Repr::Explicit(_) => &[],
        }
    }

    /// The basic descriptor when this template is basic.
    pub fn as_basic(&self) -> Option<Basic> {
        match (&self.repr, self.kind) {
            (Repr::Param { base, edits }, Kind::Basic) if edits.is_empty() => Some(*base),
            _ => None,
        }
    }

    pub fn len(&self) -> u128 {
        match &self.repr {
            Repr::Explicit(v) => v.len() as u128,
            Repr::Param { base, edits } => {
                let mut n = base.height();
                for e in edits {
                    match e {
                        Edit::Remove(_) => n -= 1,
                        Edit::Insert(..) => n += 1,
                    }
                }
                n
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Origin of position `pos`: a base position or the index of an inserting edit.
    pub fn origin(&self, pos: u128) -> Origin {
        match &self.repr {
            Repr::Explicit(_) => Origin::Base(pos),
            Repr::Param { edits, .. } => {
                let mut p = pos;
                for (idx, e) in edits.iter().enumerate().rev() {
                    match *e {
                        Edit::Insert(at, _) if p == at => return Origin::Inserted(idx),
                        Edit::Insert(at, _) if p > at => p -= 1,
                        Edit::Remove(at) if p >= at => p += 1,
                        _ => {}
                    }
                }
                Origin::Base(p)
            }
        }
    }

    /// Current position of base position `j`, or None if it was removed.
    pub fn position_of_base(&self, j: u128) -> Option<u128> {
        let mut p = j;
        for e in self.edits() {
            match *e {
                Edit::Remove(at) if p == at => return None,
                Edit::Remove(at) if p > at => p -= 1,
                Edit::Insert(at, _) if p >= at => p += 1,
                _ => {}
            }
        }
        Some(p)
    }

    pub fn level_at(&self, pos: u128) -> Level {
        assert!(pos < self.len(), "position {pos} outside template of height {}", self.len());
        match &self.repr {
            Repr::Explicit(v) => v[pos as usize],
            Repr::Param { base, edits } => match self.origin(pos) {
                Origin::Base(j) => base.level_at(j),
                Origin::Inserted(idx) => match edits[idx] {
                    Edit::Insert(_, l) => l,
                    Edit::Remove(_) => unreachable!(),
                },
            },
        }
    }

    pub fn bottom(&self) -> Level {
        self.level_at(0)
    }

    pub fn top(&self) -> Level {
        self.level_at(self.len() - 1)
    }

    /// Materialized list; errors above the cap.
    pub fn levels(&self) -> Result<Vec<Level>> {
        self.levels_capped(materialization_cap())
    }

    pub fn levels_capped(&self, cap: u128) -> Result<Vec<Level>> {
        let n = self.len();
        if n > cap {
            return Err(Error::InvalidTemplate(format!("height {n} exceeds materialization cap {cap}")));
        }
        if let Repr::Explicit(v) = &self.repr {
            return Ok(v.to_vec());
        }
        // apply the edits forward: cheaper than per-position reverse mapping
        let base = self.base().unwrap();
        let mut v: Vec<Level> = (0..base.height()).map(|j| base.level_at(j)).collect();
        for e in self.edits() {
            match *e {
                Edit::Remove(at) => {
                    v.remove(at as usize);
                }
                Edit::Insert(at, l) => v.insert(at as usize, l),
            }
        }
        Ok(v)
    }

    pub fn materialize(&self) -> Result<Template> {
        Ok(Template { repr: Repr::Explicit(self.levels()?.into()), ..self.clone() })
    }

    /// Index of the unique global cut of a basic template.
    pub fn global_cut(&self) -> Result<u128> {
        self.as_basic().map(|b| b.g).ok_or_else(|| Error::NonBasic(self.to_string()))
    }

    pub fn flip(&self) -> Result<Template> {
        if self.system != System::Morse {
            return Err(Error::Invalid("flip of an odometer template".into()));
        }
        let fl = |l: Level| l.flipped().unwrap();
        let repr = match &self.repr {
            Repr::Explicit(v) => Repr::Explicit(v.iter().map(|&l| fl(l)).collect()),
            Repr::Param { base, edits } => Repr::Param {
                base: base.flipped(),
                edits: edits
                    .iter()
                    .map(|e| match *e {
                        Edit::Insert(at, l) => Edit::Insert(at, fl(l)),
                        r => r,
                    })
                    .collect(),
            },
        };
        let kind = match self.kind {
            Kind::Diminished { side, j } => Kind::Diminished { side, j: j.map(|b| !b) },
            Kind::Augmented { side, j } => Kind::Augmented { side, j: j.map(|b| !b) },
            Kind::Extra { j } => Kind::Extra { j: j.map(|b| !b) },
            Kind::Predecessor { j } => Kind::Predecessor { j: !j },
            k => k,
        };
        Ok(Template { kind, repr, ..self.clone() })
    }

    pub fn kind_name(&self) -> String {
        let b = |j: bool| j as u8;
        let zero = self.base().is_some_and(|b| b.g == 0);
        match self.kind {
            Kind::Basic if zero => match self.system {
                System::Morse => format!("canonical({})", b(self.base().unwrap().suf)),
                System::Odometer => "canonical(0)".into(),
            },
            Kind::Basic => "basic".into(),
            Kind::Diminished { side, j: None } => format!("diminished({side})"),
            Kind::Diminished { side, j: Some(j) } => format!("diminished({side},{})", b(j)),
            Kind::Augmented { side, j: None } => format!("augmented({side})"),
            Kind::Augmented { side, j: Some(j) } => format!("augmented({side},{})", b(j)),
            Kind::Missing if zero => "missing".into(),
            Kind::Missing => "basic-missing".into(),
            Kind::Extra { j: None } if zero => "extra(e)".into(),
            Kind::Extra { j: Some(j) } if zero => format!("extra(e{})", b(j)),
            Kind::Extra { j: None } => "basic-extra".into(),
            Kind::Extra { j: Some(j) } => format!("basic-extra({})", b(j)),
            Kind::Predecessor { j } => format!("predecessor(p{})", b(j)),
            Kind::Explicit => "explicit".into(),
        }
    }
}

impl fmt::Display for Basic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Template::from(*self).fmt(f)
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sys = match self.system {
            System::Morse => "X",
            System::Odometer => "Y",
        };
        write!(f, "{sys}{}:{}", self.k, self.kind_name())?;
        if let Some(b) = self.base() {
            write!(f, "[g={}", b.g)?;
            if let Some(form) = b.form() {
                write!(f, ",{form}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl Serialize for Template {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("system", &self.system)?;
        m.serialize_entry("k", &self.k)?;
        m.serialize_entry("kind", &self.kind_name())?;
        m.serialize_entry("g", &self.base().map(|b| b.g))?;
        m.serialize_entry("form", &self.base().and_then(|b| b.form()))?;
        if let Repr::Explicit(v) = &self.repr {
            m.serialize_entry("levels", &v[..])?;
        }
        m.end()
    }
}

/// Compatibility switches for readings that differ from the literal text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TemplateOptions {
    /// Tack ū_k(1) instead of ū_k(0) onto τ_{p(1)} for a top-cut τ.
    pub literal_top_predecessor: bool,
}

/// 𝒫_k(which) for Morse, 𝒬_k(0) for the odometer.
pub fn canonical(system: System, k: u32, which: u8) -> Result<Template> {
    match (system, which) {
        (System::Morse, 0 | 1) => Ok(Basic::zero(system, k, which == 1).into()),
        (System::Odometer, 0) => Ok(Basic::zero(system, k, false).into()),
        _ => Err(Error::InvalidTemplate(format!("no canonical template {which} for {system:?}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modification {
    Missing,
    /// Odometer 𝒬^e when `None`; Morse 𝒫^{e(j)} when `Some(j)`.
    Extra(Option<bool>),
}

/// The modified canonical templates 𝒫_k^m(i), 𝒫_k^{e(j)}(i), 𝒬_k^m, 𝒬_k^e.
pub fn modified(system: System, k: u32, which: u8, m: Modification) -> Result<Template> {
    let b = canonical(system, k, which)?.as_basic().unwrap();
    match m {
        Modification::Missing => missing(&b),
        Modification::Extra(j) => extra(&b, j),
    }
}

pub fn basic_count(system: System, k: u32) -> u128 {
    let n = 1u128 << k;
    match system {
        System::Odometer => n,
        System::Morse => 2 + 4 * (n - 1),
    }
}

/// The idx-th basic template in enumeration order.
pub fn basic_by_index(system: System, k: u32, idx: u128) -> Basic {
    assert!(idx < basic_count(system, k));
    match system {
        System::Odometer => Basic::odometer(k, idx),
        System::Morse if idx < 2 => Basic::zero(system, k, idx == 1),
        System::Morse => {
            let r = idx - 2;
            let form = r % 4;
            Basic::morse(k, 1 + r / 4, form & 2 != 0, form & 1 != 0)
        }
    }
}

pub fn enumerate_basic(system: System, k: u32) -> impl Iterator<Item = Basic> {
    (0..basic_count(system, k)).map(move |i| basic_by_index(system, k, i))
}

fn pos_of_original_bottom_after_insert(b: &Basic) -> u128 {
    if b.g == 0 {
        1
    } else {
        0
    }
}

pub fn diminished(b: &Basic, side: Side, j: Option<bool>) -> Result<Template> {
    let n = b.height();
    let kind = Kind::Diminished { side, j };
    let edits = match (b.system, b.is_zero_one(), j) {
        (System::Morse, true, Some(j)) => match side {
            Side::D => vec![Edit::Remove(0), Edit::Insert(0, Level::morse(b.k, n - 1, j))],
            Side::U => vec![Edit::Remove(0), Edit::Insert(n - 1, Level::morse(b.k, 0, j))],
        },
        (System::Morse, false, None) | (System::Odometer, _, None) => match side {
            Side::D => {
                let p = b.natural_pred(b.level_at(0)).expect("bottom of a non-zero template has a predecessor");
                vec![Edit::Remove(b.g), Edit::Insert(0, p)]
            }
            Side::U => {
                let s = b.natural_succ(b.level_at(n - 1)).expect("top has a successor");
                vec![Edit::Remove(b.g), Edit::Insert(n - 1, s)]
            }
        },
        _ => return Err(Error::InvalidTemplate(format!("diminished({side},{j:?}) not defined for {b:?}"))),
    };
    Ok(Template::variant(*b, kind, edits))
}

pub fn augmented(b: &Basic, side: Side, j: Option<bool>) -> Result<Template> {
    let n = b.height();
    let extra_cut = match (b.system, j) {
        (System::Morse, Some(j)) => Level::morse(b.k, 0, j),
        (System::Odometer, None) => Level::v(b.k, 0),
        _ => return Err(Error::InvalidTemplate(format!("augmented({side},{j:?}) not defined for {b:?}"))),
    };
    let del = match side {
        Side::D => pos_of_original_bottom_after_insert(b),
        Side::U => n,
    };
    Ok(Template::variant(*b, Kind::Augmented { side, j }, vec![Edit::Insert(b.g, extra_cut), Edit::Remove(del)]))
}

pub fn missing(b: &Basic) -> Result<Template> {
    Ok(Template::variant(*b, Kind::Missing, vec![Edit::Remove(0)]))
}

pub fn extra(b: &Basic, j: Option<bool>) -> Result<Template> {
    let n = b.height();
    let top = match (b.is_zero_one(), j) {
        (true, Some(j)) => Level::morse(b.k, 0, j),
        (true, None) => {
            return Err(Error::InvalidTemplate("the zero/one template has two extra variants; choose e(0) or e(1)".into()))
        }
        (false, None) => b.natural_succ(b.level_at(n - 1)).expect("top has a successor"),
        (false, Some(_)) => return Err(Error::InvalidTemplate("e(j) only exists for the zero/one template".into())),
    };
    Ok(Template::variant(*b, Kind::Extra { j }, vec![Edit::Insert(n, top)]))
}

const JS: [bool; 2] = [false, true];

pub fn diminished_of(b: &Basic) -> Vec<Template> {
    let js: Vec<Option<bool>> = if b.is_zero_one() { JS.iter().map(|&j| Some(j)).collect() } else { vec![None] };
    let mut out = vec![];
    for side in [Side::D, Side::U] {
        for &j in &js {
            out.push(diminished(b, side, j).unwrap());
        }
    }
    out
}

pub fn augmented_of(b: &Basic) -> Vec<Template> {
    let js: Vec<Option<bool>> = match b.system {
        System::Morse => JS.iter().map(|&j| Some(j)).collect(),
        System::Odometer => vec![None],
    };
    let mut out = vec![];
    for side in [Side::D, Side::U] {
        for &j in &js {
            out.push(augmented(b, side, j).unwrap());
        }
    }
    out
}

pub fn extra_of(b: &Basic) -> Vec<Template> {
    if b.is_zero_one() {
        JS.iter().map(|&j| extra(b, Some(j)).unwrap()).collect()
    } else {
        vec![extra(b, None).unwrap()]
    }
}

/// All diminished, augmented, missing and extra variants of a basic template.
pub fn variants_of(b: &Basic) -> Vec<Template> {
    let mut out = diminished_of(b);
    out.extend(augmented_of(b));
    out.push(missing(b).unwrap());
    out.extend(extra_of(b));
    out
}

pub fn predecessors(t: &Template) -> Result<Vec<Template>> {
    predecessors_with(t, TemplateOptions::default())
}

pub fn predecessors_with(t: &Template, opts: TemplateOptions) -> Result<Vec<Template>> {
    let b = t.as_basic().ok_or_else(|| Error::NonBasic(t.to_string()))?;
    let n = b.height();
    Ok(match b.system {
        System::Odometer => vec![Basic::odometer(b.k, (b.g + 1) % n).into()],
        System::Morse if b.is_zero_one() => JS.iter().map(|&j| Basic::morse(b.k, 1, j, b.suf).into()).collect(),
        System::Morse if b.is_top_cut() => JS
            .iter()
            .map(|&j| {
                let tacked = if j && opts.literal_top_predecessor { Level::ubar(b.k, 1) } else { Level::morse(b.k, 0, j) };
                if j == b.pre && !(j && opts.literal_top_predecessor) {
                    Basic::zero(System::Morse, b.k, j).into()
                } else {
                    Template::variant(b, Kind::Predecessor { j }, vec![Edit::Remove(n - 1), Edit::Insert(0, tacked)])
                }
            })
            .collect(),
        System::Morse => vec![Basic::morse(b.k, b.g + 1, b.pre, b.suf).into()],
    })
}

pub fn successors(t: &Template) -> Result<Vec<Template>> {
    let b = t.as_basic().ok_or_else(|| Error::NonBasic(t.to_string()))?;
    let n = b.height();
    Ok(match b.system {
        System::Odometer => vec![Basic::odometer(b.k, (b.g + n - 1) % n).into()],
        System::Morse if b.is_zero_one() => JS.iter().map(|&j| Basic::morse(b.k, n - 1, b.suf, j).into()).collect(),
        System::Morse => vec![Basic::morse(b.k, b.g - 1, b.pre, b.suf).into()],
    })
}

/// The basic predecessors only (the natural ones used for matching).
pub fn basic_predecessors(b: &Basic) -> Vec<Basic> {
    predecessors(&Template::from(*b)).unwrap().iter().filter_map(|t| t.as_basic()).collect()
}

/// Levelwise projection of a block to stage k.
pub fn zeta(block: &[Level], k: u32) -> Result<Vec<Level>> {
    if let Some(f) = block.first() {
        if block.iter().any(|l| l.system() != f.system()) {
            return Err(Error::MixedSystems);
        }
    }
    block.iter().map(|l| l.project(k)).collect()
}

pub fn flip_template(t: &Template) -> Result<Template> {
    t.flip()
}

fn try_basic(levels: &[Level]) -> Option<Basic> {
    let f = *levels.first()?;
    let (system, k) = (f.system(), f.k());
    let n = 1u128 << k;
    if levels.len() as u128 != n {
        return None;
    }
    let b = match f {
        Level::O(o) => Basic::odometer(k, (n - o.i) % n),
        Level::M(m) if m.i == 0 => Basic::morse(k, 0, m.bar, m.bar),
        Level::M(m) => {
            let g = n - m.i;
            Basic::morse(k, g, m.bar, levels[g as usize].bar()?)
        }
    };
    debug_assert_eq!(b.system, system);
    levels.iter().enumerate().all(|(j, &l)| b.level_at(j as u128) == l).then_some(b)
}

fn same_levels(t: &Template, levels: &[Level]) -> bool {
    t.len() == levels.len() as u128 && levels.iter().enumerate().all(|(j, &l)| t.level_at(j as u128) == l)
}

/// Rebuild a descriptor from an explicit list of levels.
pub fn recognize(levels: &[Level]) -> Option<Template> {
    if let Some(b) = try_basic(levels) {
        return Some(b.into());
    }
    let f = *levels.first()?;
    let (system, k) = (f.system(), f.k());
    let n = 1u128 << k;
    let len = levels.len() as u128;
    if len + 1 < n || len > n + 1 || n < 2 {
        return None;
    }
    let mut seen = std::collections::HashSet::new();
    for p in [len / 2, len / 4, (3 * len) / 4] {
        let l = levels[p as usize];
        for q in [p, p + 1, p.wrapping_sub(1)] {
            if q >= n {
                continue;
            }
            let g = (q + n - l.i() % n) % n;
            let cands: Vec<Basic> = match system {
                System::Odometer => vec![Basic::odometer(k, g)],
                System::Morse => {
                    let bar = l.bar().unwrap();
                    JS.iter()
                        .map(|&o| if q < g { Basic::morse(k, g, bar, o) } else { Basic::morse(k, g, o, bar) })
                        .collect()
                }
            };
            for b in cands {
                if !seen.insert(b) {
                    continue;
                }
                let mut all = variants_of(&b);
                all.extend(predecessors(&b.into()).unwrap());
                if let Some(t) = all.into_iter().find(|t| same_levels(t, levels)) {
                    return Some(t);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u128) -> Level {
        Level::v(2, i)
    }

    fn lv(t: &Template) -> Vec<Level> {
        t.levels().unwrap()
    }

    #[test]
    fn canonical_and_modified() {
        let q = canonical(System::Odometer, 3, 0).unwrap();
        assert_eq!(lv(&q), (0..8).map(|i| Level::v(3, i)).collect::<Vec<_>>());
        let p1 = canonical(System::Morse, 2, 1).unwrap();
        assert_eq!(lv(&p1), (0..4).map(|i| Level::ubar(2, i)).collect::<Vec<_>>());
        assert_eq!(lv(&canonical(System::Morse, 0, 0).unwrap()), vec![Level::u(0, 0)]);
        assert!(canonical(System::Odometer, 2, 1).is_err());
        let qm = modified(System::Odometer, 2, 0, Modification::Missing).unwrap();
        assert_eq!(lv(&qm), vec![v(1), v(2), v(3)]);
        let pe = modified(System::Morse, 2, 0, Modification::Extra(Some(true))).unwrap();
        let mut want: Vec<Level> = (0..4).map(|i| Level::u(2, i)).collect();
        want.push(Level::ubar(2, 0));
        assert_eq!(lv(&pe), want);
        let pm = modified(System::Morse, 1, 1, Modification::Missing).unwrap();
        assert_eq!(lv(&pm), vec![Level::ubar(1, 1)]);
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_basic(System::Odometer, 2).count(), 4);
        assert_eq!(enumerate_basic(System::Morse, 2).count(), 14);
    }

    #[test]
    fn odometer_variants_examples() {
        let w = Basic::odometer(2, 1); // v3 v0 v1 v2
        assert_eq!(lv(&w.into()), vec![v(3), v(0), v(1), v(2)]);
        assert_eq!(lv(&diminished(&w, Side::D, None).unwrap()), vec![v(2), v(3), v(1), v(2)]);
        assert_eq!(lv(&diminished(&w, Side::U, None).unwrap()), vec![v(3), v(1), v(2), v(3)]);
        // ω_3: v2 v3 v0 v1
        let w3 = Basic::odometer(2, 2);
        assert_eq!(Template::from(w3).global_cut().unwrap(), 2);
        assert_eq!(lv(&augmented(&w3, Side::D, None).unwrap()), vec![v(3), v(0), v(0), v(1)]);
        assert_eq!(lv(&missing(&Basic::odometer(2, 0)).unwrap()), vec![v(1), v(2), v(3)]);
        assert_eq!(lv(&extra(&w3, None).unwrap()), vec![v(2), v(3), v(0), v(1), v(2)]);
        let p = predecessors(&w3.into()).unwrap();
        assert_eq!(p[0].global_cut().unwrap(), 3);
        assert_eq!(successors(&w3.into()).unwrap()[0].global_cut().unwrap(), 1);
    }

    #[test]
    fn morse_examples() {
        let k = 3;
        let z = Basic::zero(System::Morse, k, false);
        let d1 = diminished(&z, Side::D, Some(true)).unwrap();
        let mut want = vec![Level::ubar(k, 7)];
        want.extend((1..8).map(|i| Level::u(k, i)));
        assert_eq!(lv(&d1), want);
        assert!(extra(&z, None).is_err());
        // τ = u(1)..u(7) ū(0): top cut
        let t = Basic::morse(k, 7, false, true);
        assert_eq!(t.level_at(0), Level::u(k, 1));
        assert_eq!(t.level_at(7), Level::ubar(k, 0));
        let s = successors(&t.into()).unwrap();
        assert_eq!(s.len(), 1);
        let mut want: Vec<Level> = (2..8).map(|i| Level::u(k, i)).collect();
        want.extend([Level::ubar(k, 0), Level::ubar(k, 1)]);
        assert_eq!(lv(&s[0]), want);
        let p = predecessors(&t.into()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].as_basic(), Some(Basic::zero(System::Morse, k, false)));
        assert_eq!(p[1].bottom(), Level::ubar(k, 0));
        let lit = predecessors_with(&t.into(), TemplateOptions { literal_top_predecessor: true }).unwrap();
        assert_eq!(lit[1].bottom(), Level::ubar(k, 1));
        // zero-template successors
        let s = successors(&z.into()).unwrap();
        assert_eq!(s[0].top(), Level::u(k, 0));
        assert_eq!(s[1].top(), Level::ubar(k, 0));
        // augmented interior example: u(i+1)..u(7) u(0) ū(0)..ū(i-1)
        let i = 3;
        let t = Basic::morse(k, 8 - i, false, true);
        let a = augmented(&t, Side::D, Some(false)).unwrap();
        let mut want: Vec<Level> = ((i + 1)..8).map(|x| Level::u(k, x)).collect();
        want.push(Level::u(k, 0));
        want.extend((0..i).map(|x| Level::ubar(k, x)));
        assert_eq!(lv(&a), want);
        // diminished interior example
        let d = diminished(&t, Side::D, None).unwrap();
        let mut want: Vec<Level> = ((i - 1)..8).map(|x| Level::u(k, x)).collect();
        want.extend((1..i).map(|x| Level::ubar(k, x)));
        assert_eq!(lv(&d), want);
    }

    #[test]
    fn flips_and_zeta() {
        let z = Basic::zero(System::Morse, 3, false);
        let d1 = diminished(&z, Side::D, Some(true)).unwrap();
        let f = d1.flip().unwrap();
        for j in 0..8 {
            assert_eq!(f.level_at(j), d1.level_at(j).flipped().unwrap());
        }
        assert_eq!(f.flip().unwrap(), d1);
        let q = lv(&canonical(System::Odometer, 3, 0).unwrap());
        let zq = zeta(&q, 1).unwrap();
        assert_eq!(zq, (0..8).map(|i| Level::v(1, i % 2)).collect::<Vec<_>>());
        assert_eq!(zeta(&[Level::u(3, 5)], 1).unwrap(), vec![Level::u(3, 5).project(1).unwrap()]);
        assert_eq!(zeta(&[Level::u(3, 5), Level::v(3, 1)], 1), Err(Error::MixedSystems));
    }

    #[test]
    fn recognize_round_trip_small() {
        for sys in [System::Odometer, System::Morse] {
            for b in enumerate_basic(sys, 3) {
                assert_eq!(recognize(&lv(&b.into())), Some(b.into()));
                for t in variants_of(&b) {
                    let r = recognize(&lv(&t)).expect("recognized");
                    assert_eq!(lv(&r), lv(&t));
                }
            }
        }
    }
}
