//! Safe zones, block partitions and the two reordering maps p̂1, p̂2.
//!
//! Everything is available twice: as explicit content-based rearrangements of a
//! materialized template (used as the oracle and for stage 4), and as closed-form
//! position maps that never materialize anything (used for the larger stages).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pib::{Cycle, Interval, ReorderingMap};
use crate::templates::{Basic, Edit, Template};
use crate::towers::{Level, System};
use crate::words::tm_bit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StageGeometry {
    pub kn: u32,
    pub kn1: u32,
    pub kn2: u32,
    pub g: u128,
    pub a: u128,
    pub b: u128,
    pub c: u128,
    /// number of intermediate blocks of height 2^{k_{n+1}}
    pub big_l: u128,
    /// number of local blocks per intermediate block
    pub small_l: u128,
}

impl StageGeometry {
    pub fn new(kn: u32, kn1: u32, kn2: u32, g: u128) -> Result<Self> {
        if !(kn < kn1 && kn1 < kn2 && kn2 < 127) {
            return Err(Error::GeometryInfeasible(format!("exponents ({kn},{kn1},{kn2}) not increasing")));
        }
        let (n, m, k) = (1u128 << kn, 1u128 << kn1, 1u128 << kn2);
        if k < 2 * m * (1 + m) {
            return Err(Error::GeometryInfeasible(format!("2^{kn2} < 2·2^{kn1}(1+2^{kn1})")));
        }
        if m < 2 * n * (1 + n) {
            return Err(Error::GeometryInfeasible(format!("2^{kn1} < 2·2^{kn}(1+2^{kn})")));
        }
        if g >= k {
            return Err(Error::GeometryInfeasible(format!("cut {g} outside [0, 2^{kn2})")));
        }
        let a = g % m;
        Ok(StageGeometry { kn, kn1, kn2, g, a, b: g % n, c: a / n, big_l: k / m, small_l: m / n })
    }

    pub fn for_template(kn: u32, kn1: u32, t: &Template) -> Result<Self> {
        let base = t.base().ok_or_else(|| Error::NonBasic(t.to_string()))?;
        StageGeometry::new(kn, kn1, base.k, base.g)
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

    /// Width of each global safe zone.
    pub fn global_safe(&self) -> u128 {
        self.m() * (1 + self.m())
    }

    /// Width of each intermediate safe zone.
    pub fn inter_safe(&self) -> u128 {
        self.n() * (1 + self.n())
    }

    pub fn in_global_safe(&self, pos: u128) -> bool {
        pos < self.global_safe() || pos >= self.k() - self.global_safe()
    }

    pub fn in_inter_safe(&self, local: u128) -> bool {
        local < self.inter_safe() || local >= self.m() - self.inter_safe()
    }

    /// Intermediate blocks (aligned, position units) lying fully outside both global
    /// safe zones, as an inclusive range.
    pub fn s_range(&self) -> (u128, u128) {
        (self.m() + 1, self.big_l - self.m() - 2)
    }

    pub fn in_s_range(&self, x: u128) -> bool {
        let (lo, hi) = self.s_range();
        lo <= x && x <= hi
    }

    /// p̂1 as elementary cycles, q_1 first.
    pub fn p1_cycles(&self) -> Vec<Cycle> {
        let (a, m, l) = (self.a as i128, self.m() as i128, self.big_l as i128);
        (1..=a)
            .map(|i| {
                let s = a + (i - 1) * m;
                let top = a + (l - a + i - 1) * m - 1;
                Cycle { src: s - i + 1, dst: top }
            })
            .collect()
    }

    pub fn p1_map(&self) -> ReorderingMap {
        ReorderingMap::from_cycles(Interval::new(0, self.k() as i128), self.p1_cycles()).expect("cycles inside J")
    }

    /// One intermediate flip r_m (local cycles) for the block starting at `start`.
    pub fn flip_cycles(&self, start: u128) -> Vec<Cycle> {
        let (n, lp, s) = (self.n() as i128, self.small_l as i128, start as i128);
        (1..=n).map(|t| Cycle { src: s + t * n - (t - 1), dst: s + (lp - n + t) * n - 1 }).collect()
    }

    /// Closed form of p̂1: j − #{moved bottoms below j} + #{insertion points below j}.
    pub fn p1_forward(&self, j: u128) -> u128 {
        let (a, m, l) = (self.a, self.m(), self.big_l);
        if a == 0 || j < a {
            return j;
        }
        let top = |x: u128| a + x * m - 1;
        if (j - a).is_multiple_of(m) && (j - a) / m < a {
            let i = (j - a) / m + 1;
            return top(l - a + i - 1) - a + i;
        }
        let below_s = if j > a { a.min((j - a - 1) / m + 1) } else { 0 };
        let q = (j - a) / m;
        let tops_below = (q + a + 1).saturating_sub(l).min(a);
        j - below_s + tops_below
    }

    /// Closed form of p̂1^{-1}.
    pub fn p1_inverse(&self, y: u128) -> u128 {
        let (a, m, l) = (self.a, self.m(), self.big_l);
        if a == 0 || y < a {
            return y;
        }
        if y < a * m {
            let blk = 1 + (y - a) / (m - 1);
            return y + blk;
        }
        if y < (l - a - 1) * m {
            return y + a;
        }
        if y < (l - 1) * m + a {
            let i = 1 + (y - (l - a - 1) * m) / (m + 1);
            let s = (l - a - 1) * m + (i - 1) * (m + 1);
            return if y - s == m { a + (i - 1) * m } else { y + a - (i - 1) };
        }
        y
    }

    /// p̂2's local rearrangement inside a flipped block.
    pub fn flip_forward(&self, z: u128) -> u128 {
        let (n, lp) = (self.n(), self.small_l);
        let (t, r) = (z / n, z % n);
        if t == 0 {
            z
        } else if t <= n {
            if r == 0 {
                (lp - n + t - 1) * n + t - 1
            } else {
                z - t
            }
        } else if t < lp - n {
            z - n
        } else {
            z - n + (t - (lp - n))
        }
    }

    pub fn flip_inverse(&self, z: u128) -> u128 {
        let (n, lp) = (self.n(), self.small_l);
        if z < n {
            z
        } else if z < n * n {
            z + 1 + (z - n) / (n - 1)
        } else if z < (lp - n - 1) * n {
            z + n
        } else {
            let u = 1 + (z - (lp - n - 1) * n) / (n + 1);
            let e = z - (lp - n - 1) * n - (u - 1) * (n + 1);
            if e == n {
                u * n
            } else {
                (lp - n + u - 1) * n + e
            }
        }
    }
}

/// One local block of a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub start: u128,
    pub len: u128,
    /// index of the containing intermediate block
    pub block: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    /// (start, len) of each intermediate block
    pub blocks: Vec<(u128, u128)>,
    pub pieces: Vec<Piece>,
}

impl Partition {
    fn from_lengths(lens: &[Vec<u128>]) -> Self {
        let (mut blocks, mut pieces, mut at) = (vec![], vec![], 0);
        for (bi, ls) in lens.iter().enumerate() {
            let s = at;
            for &l in ls {
                pieces.push(Piece { start: at, len: l, block: bi as u128 });
                at += l;
            }
            blocks.push((s, at - s));
        }
        Partition { blocks, pieces }
    }

    fn lengths(&self) -> Vec<Vec<u128>> {
        let mut out = vec![vec![]; self.blocks.len()];
        for p in &self.pieces {
            out[p.block as usize].push(p.len);
        }
        out
    }

    pub fn total(&self) -> u128 {
        self.pieces.iter().map(|p| p.len).sum()
    }

    /// Blocks and pieces are consecutive, disjoint and cover [0, total).
    pub fn is_cover(&self, total: u128) -> bool {
        let mut at = 0;
        for p in &self.pieces {
            if p.start != at || p.len == 0 {
                return false;
            }
            at += p.len;
        }
        let mut at2 = 0;
        for &(s, l) in &self.blocks {
            if s != at2 {
                return false;
            }
            at2 += l;
        }
        at == total && at2 == total
    }

    pub fn piece_at(&self, pos: u128) -> Option<&Piece> {
        let k = self.pieces.partition_point(|p| p.start + p.len <= pos);
        self.pieces.get(k).filter(|p| p.start <= pos)
    }
}

/// Local and intermediate partition of the basic template with this geometry.
pub fn basic_partition(geom: &StageGeometry) -> Partition {
    let (a, b, c, n, l, lp) = (geom.a, geom.b, geom.c, geom.n(), geom.big_l, geom.small_l);
    let full = vec![n; lp as usize];
    let mut lens = vec![];
    if a == 0 {
        lens.resize(l as usize, full);
    } else {
        let mut first = vec![];
        if b != 0 {
            first.push(b);
        }
        first.extend(std::iter::repeat_n(n, c as usize));
        lens.push(first);
        lens.extend(std::iter::repeat_n(full, l as usize - 1));
        let fulls = if b != 0 { lp - c - 1 } else { lp - c };
        let mut last: Vec<u128> = std::iter::repeat_n(n, fulls as usize).collect();
        if b != 0 {
            last.push(n - b);
        }
        lens.push(last);
    }
    Partition::from_lengths(&lens)
}

/// Partition of `t`, a basic template or a variant of the geometry's basic template:
/// a removed level shrinks its block, an inserted level joins the block of the level
/// that follows it (an appended level starts a new local block exactly when it lands
/// on a local cut).
pub fn partition(t: &Template, geom: &StageGeometry) -> Result<Partition> {
    let mut part = basic_partition(geom);
    if t.base().is_none() {
        return Ok(part);
    }
    for e in t.edits() {
        let total = part.total();
        match *e {
            Edit::Remove(at) => {
                let k = part.pieces.partition_point(|p| p.start + p.len <= at);
                part.pieces[k].len -= 1;
            }
            Edit::Insert(at, _) if at == total => {
                let last = *part.pieces.last().unwrap();
                if (at + geom.n() - geom.b % geom.n()).is_multiple_of(geom.n()) && last.len == geom.n() {
                    part.pieces.push(Piece { start: at, len: 0, block: last.block });
                }
                part.pieces.last_mut().unwrap().len += 1;
            }
            Edit::Insert(at, _) => {
                let k = part.pieces.partition_point(|p| p.start + p.len <= at);
                part.pieces[k].len += 1;
            }
        }
        part.pieces.retain(|p| p.len > 0);
        let lens = part.lengths();
        part = Partition::from_lengths(&lens);
    }
    Ok(part)
}

/// A rearranged template together with its partition.
#[derive(Clone, Debug)]
pub struct Reordered {
    pub levels: Vec<Level>,
    /// new position → position in the input
    pub orig: Vec<u128>,
    pub partition: Partition,
}

type Nested = Vec<Vec<Vec<(u128, Level)>>>;

fn nest(levels: &[Level], orig: &[u128], part: &Partition) -> Nested {
    let mut out: Nested = vec![vec![]; part.blocks.len()];
    for p in &part.pieces {
        let r = p.start as usize..(p.start + p.len) as usize;
        out[p.block as usize].push(orig[r.clone()].iter().copied().zip(levels[r].iter().copied()).collect());
    }
    out
}

fn flatten(nested: Nested) -> Reordered {
    let lens: Vec<Vec<u128>> = nested.iter().map(|b| b.iter().map(|p| p.len() as u128).collect()).collect();
    let (mut levels, mut orig) = (vec![], vec![]);
    for p in nested.into_iter().flatten().flatten() {
        orig.push(p.0);
        levels.push(p.1);
    }
    Reordered { levels, orig, partition: Partition::from_lengths(&lens) }
}

/// Move the bottom level of `from` onto the top of `to`.
fn move_bottom(pieces: &mut [Vec<(u128, Level)>], from: usize, to: usize) {
    let x = pieces[from].remove(0);
    pieces[to].push(x);
}

/// The global reordering p̂1 by moving levels: the bottoms of blocks 1..a go, in
/// order, directly above the tops of blocks L-a..L-1.
pub fn global_reorder(t: &Template, geom: &StageGeometry) -> Result<(ReorderingMap, Reordered)> {
    let levels = t.levels()?;
    let part = partition(t, geom)?;
    let ident: Vec<u128> = (0..levels.len() as u128).collect();
    let mut nested = nest(&levels, &ident, &part);
    let (a, l) = (geom.a as usize, geom.big_l as usize);
    for i in 1..=a {
        let x = nested[i].first_mut().unwrap().remove(0);
        nested[i].retain(|p| !p.is_empty());
        nested[l - a + i - 1].last_mut().unwrap().push(x);
    }
    let r = flatten(nested);
    Ok((images_map(&r.orig)?, r))
}

fn images_map(orig: &[u128]) -> Result<ReorderingMap> {
    let mut img = vec![0i128; orig.len()];
    for (new, &o) in orig.iter().enumerate() {
        img[o as usize] = new as i128;
    }
    ReorderingMap::from_images(Interval::new(0, orig.len() as i128), img)
}

/// Which tower system the stage maps into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    MorseTarget,
    OdometerTarget,
}

/// Relation of an aligned block to the zero template's block at the same place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockCase {
    Same,
    Flipped,
}

/// Compare ζ (projection to k_{n+1}) of `block` with ζ of the zero template's block x.
pub fn classify_block(block: &[Level], geom: &StageGeometry, x: u128) -> Result<BlockCase> {
    let mut bar = None;
    for (r, l) in block.iter().enumerate() {
        let p = l.project(geom.kn1)?;
        if p.i() != r as u128 {
            return Err(Error::TwoCasesViolation(format!("block {x}: offset {r} projects to {p}")));
        }
        if let Some(b) = p.bar() {
            if *bar.get_or_insert(b) != b {
                return Err(Error::TwoCasesViolation(format!("block {x} mixes u and ū")));
            }
        }
    }
    match bar {
        Some(b) if b != tm_bit(x) => Ok(BlockCase::Flipped),
        _ => Ok(BlockCase::Same),
    }
}

/// The intermediate reordering p̂2 applied to p̂1(τ).
pub fn intermediate_reorder(
    r: &Reordered,
    geom: &StageGeometry,
    dir: Direction,
) -> Result<(ReorderingMap, Reordered, Vec<u128>)> {
    let m = geom.m();
    let mut nested = nest(&r.levels, &r.orig, &r.partition);
    let mut flipped = vec![];
    for (bi, &(s, len)) in r.partition.blocks.iter().enumerate() {
        if len != m || s % m != 0 || !geom.in_s_range(s / m) {
            continue;
        }
        let x = s / m;
        let case = classify_block(&r.levels[s as usize..(s + m) as usize], geom, x)?;
        if case == BlockCase::Flipped {
            if dir == Direction::OdometerTarget {
                return Err(Error::TwoCasesViolation(format!("odometer block {x} flipped")));
            }
            let (n, lp) = (geom.n() as usize, geom.small_l as usize);
            for t in 1..=n {
                move_bottom(&mut nested[bi], t, lp - n + t - 1);
            }
            flipped.push(x);
        }
    }
    let out = flatten(nested);
    // p̂2 acts on positions of p̂1(τ)
    let mut img = vec![0i128; out.orig.len()];
    let mut pos_in_r = vec![0usize; r.orig.len()];
    for (p, &o) in r.orig.iter().enumerate() {
        pos_in_r[o as usize] = p;
    }
    for (new, &o) in out.orig.iter().enumerate() {
        img[pos_in_r[o as usize]] = new as i128;
    }
    Ok((ReorderingMap::from_images(Interval::new(0, img.len() as i128), img)?, out, flipped))
}

/// τ̂ = p̂2 ∘ p̂1(τ) with both maps.
#[derive(Clone, Debug)]
pub struct Hat {
    pub geom: StageGeometry,
    pub p1: ReorderingMap,
    pub p2: ReorderingMap,
    pub hat: Reordered,
    pub flipped: Vec<u128>,
}

pub fn hat(t: &Template, geom: &StageGeometry, dir: Direction) -> Result<Hat> {
    let (p1, r1) = global_reorder(t, geom)?;
    let (p2, hat, flipped) = intermediate_reorder(&r1, geom, dir)?;
    Ok(Hat { geom: *geom, p1, p2, hat, flipped })
}

/// Closed-form flip test for aligned block x of p̂1(τ) when τ is a basic Morse template.
pub fn morse_flip(geom: &StageGeometry, t: &Basic, x: u128) -> bool {
    if t.system != System::Morse || !geom.in_s_range(x) {
        return false;
    }
    let big_g = geom.g / geom.m();
    let beta = (x + geom.big_l - big_g) % geom.big_l;
    let side = if x < big_g { t.pre } else { t.suf };
    tm_bit(beta) ^ side ^ tm_bit(x)
}

/// τ̂ without materialization: positions, pieces and levels by closed forms.
#[derive(Clone, Copy, Debug)]
pub struct LazyHat {
    pub geom: StageGeometry,
    pub base: Basic,
    pub dir: Direction,
}

impl LazyHat {
    pub fn new(kn: u32, kn1: u32, base: Basic, dir: Direction) -> Result<Self> {
        Ok(LazyHat { geom: StageGeometry::new(kn, kn1, base.k, base.g)?, base, dir })
    }

    pub fn is_flipped(&self, x: u128) -> bool {
        self.dir == Direction::MorseTarget && morse_flip(&self.geom, &self.base, x)
    }

    /// Aligned s-range block containing y, if any.
    fn middle_block(&self, y: u128) -> Option<u128> {
        let x = y / self.geom.m();
        self.geom.in_s_range(x).then_some(x)
    }

    /// (p̂2 ∘ p̂1)^{-1}(y).
    pub fn orig(&self, y: u128) -> u128 {
        let m = self.geom.m();
        let z = match self.middle_block(y) {
            Some(x) if self.is_flipped(x) => x * m + self.geom.flip_inverse(y - x * m),
            _ => y,
        };
        self.geom.p1_inverse(z)
    }

    /// p̂2 ∘ p̂1(j).
    pub fn forward(&self, j: u128) -> u128 {
        let m = self.geom.m();
        let z = self.geom.p1_forward(j);
        match self.middle_block(z) {
            Some(x) if self.is_flipped(x) => x * m + self.geom.flip_forward(z - x * m),
            _ => z,
        }
    }

    pub fn level_at(&self, y: u128) -> Level {
        self.base.level_at(self.orig(y))
    }

    /// Local block of τ̂ containing y.
    pub fn piece_at(&self, y: u128) -> Piece {
        let g = &self.geom;
        let (a, b, n, m, l, lp) = (g.a, g.b, g.n(), g.m(), g.big_l, g.small_l);
        if let Some(x) = self.middle_block(y) {
            if self.is_flipped(x) {
                let s = x * m;
                let z = y - s;
                let blk = if a == 0 { x } else { x + 1 };
                let (st, len) = if z < n {
                    (0, n)
                } else if z < n * n {
                    let t = (z - n) / (n - 1);
                    (n + t * (n - 1), n - 1)
                } else if z < (lp - n - 1) * n {
                    (z / n * n, n)
                } else {
                    let u = (z - (lp - n - 1) * n) / (n + 1);
                    ((lp - n - 1) * n + u * (n + 1), n + 1)
                };
                return Piece { start: s + st, len, block: blk };
            }
        }
        if a == 0 {
            return Piece { start: y / n * n, len: n, block: y / m };
        }
        if y < a {
            return if y < b {
                Piece { start: 0, len: b, block: 0 }
            } else {
                Piece { start: b + (y - b) / n * n, len: n, block: 0 }
            };
        }
        if y < a * m {
            let blk = 1 + (y - a) / (m - 1);
            let s = a + (blk - 1) * (m - 1);
            let e = y - s;
            return if e < n - 1 {
                Piece { start: s, len: n - 1, block: blk }
            } else {
                Piece { start: s + n - 1 + (e - (n - 1)) / n * n, len: n, block: blk }
            };
        }
        if y < (l - a - 1) * m {
            return Piece { start: y / n * n, len: n, block: y / m + 1 };
        }
        if y < (l - 1) * m + a {
            let i = 1 + (y - (l - a - 1) * m) / (m + 1);
            let s = (l - a - 1) * m + (i - 1) * (m + 1);
            let e = y - s;
            let blk = l - a - 1 + i;
            return if e < (lp - 1) * n {
                Piece { start: s + e / n * n, len: n, block: blk }
            } else {
                Piece { start: s + (lp - 1) * n, len: n + 1, block: blk }
            };
        }
        let s = (l - 1) * m + a;
        let e = y - s;
        let fulls = if b != 0 { lp - g.c - 1 } else { lp - g.c };
        if e < fulls * n {
            Piece { start: s + e / n * n, len: n, block: l }
        } else {
            Piece { start: s + fulls * n, len: n - b, block: l }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates::{enumerate_basic, missing};

    fn small() -> impl Iterator<Item = Basic> {
        enumerate_basic(System::Morse, 10).step_by(7)
    }

    #[test]
    fn chain_geometry() {
        let g = StageGeometry::new(2, 6, 14, 100).unwrap();
        assert_eq!((g.a, g.b, g.c, g.big_l, g.small_l), (36, 0, 9, 256, 16));
        assert_eq!(g.global_safe() - 1, 4159);
        assert_eq!(g.s_range(), (65, 190));
        let z = StageGeometry::new(2, 6, 14, 0).unwrap();
        assert_eq!((z.a, z.b, z.c), (0, 0, 0));
        assert!(matches!(StageGeometry::new(2, 5, 14, 0), Err(Error::GeometryInfeasible(_))));
        assert!(matches!(StageGeometry::new(2, 6, 13, 0), Err(Error::GeometryInfeasible(_))));
    }

    #[test]
    fn partitions_cover() {
        for t in enumerate_basic(System::Morse, 10) {
            let g = StageGeometry::new(1, 4, 10, t.g).unwrap();
            let p = basic_partition(&g);
            assert!(p.is_cover(1024));
            let expect = if g.a == 0 { 64 } else { 65 };
            assert_eq!(p.blocks.len(), expect);
            if g.a != 0 {
                assert_eq!(p.blocks[0].1, g.a);
            }
        }
        let b = Basic::morse(14, 102, false, true);
        let g = StageGeometry::new(2, 6, 14, 102).unwrap();
        let base = basic_partition(&g);
        let pm = partition(&missing(&b).unwrap(), &g).unwrap();
        assert_eq!(pm.pieces[0].len + 1, base.pieces[0].len);
        assert_eq!(pm.pieces[1..].iter().map(|p| p.len).collect::<Vec<_>>(), base.pieces[1..].iter().map(|p| p.len).collect::<Vec<_>>());
    }

    #[test]
    fn p1_three_ways() {
        for t in small() {
            let tpl: Template = t.into();
            let g = StageGeometry::new(1, 4, 10, t.g).unwrap();
            let (p1, r) = global_reorder(&tpl, &g).unwrap();
            let cyc = g.p1_map();
            for j in 0..1024u128 {
                let y = p1.apply(j as i128) as u128;
                assert_eq!(y, cyc.apply(j as i128) as u128, "g={} j={j}", t.g);
                assert_eq!(y, g.p1_forward(j), "g={} j={j}", t.g);
                assert_eq!(g.p1_inverse(y), j);
            }
            assert!(r.partition.is_cover(1024));
            for (bi, &(s, _)) in r.partition.blocks.iter().enumerate() {
                let x = s / g.m();
                if g.in_s_range(x) {
                    assert_eq!(s % g.m(), 0, "block {bi}");
                }
            }
            for j in 0..1024u128 {
                if !g.in_global_safe(j) {
                    assert_eq!(r.levels[j as usize], t.level_at(j + g.a));
                }
            }
        }
    }

    #[test]
    fn hat_lazy_matches_explicit() {
        let mut any_flip = false;
        for t in small() {
            let tpl: Template = t.into();
            let g = StageGeometry::new(1, 4, 10, t.g).unwrap();
            let h = hat(&tpl, &g, Direction::MorseTarget).unwrap();
            any_flip |= !h.flipped.is_empty();
            let lazy = LazyHat::new(1, 4, t, Direction::MorseTarget).unwrap();
            for x in 0..g.big_l {
                assert_eq!(h.flipped.contains(&x), lazy.is_flipped(x), "g={} x={x}", t.g);
            }
            for y in 0..1024u128 {
                assert_eq!(lazy.orig(y), h.hat.orig[y as usize], "g={} y={y}", t.g);
                assert_eq!(lazy.forward(h.hat.orig[y as usize]), y);
                assert_eq!(lazy.level_at(y), h.hat.levels[y as usize]);
                assert_eq!(&lazy.piece_at(y), h.hat.partition.piece_at(y).unwrap(), "g={} y={y}", t.g);
            }
        }
        assert!(any_flip);
    }

    #[test]
    fn flip_cycles_match_closed_form() {
        let g = StageGeometry::new(1, 4, 10, 0).unwrap();
        let p = ReorderingMap::from_cycles(Interval::new(0, 16), g.flip_cycles(0)).unwrap();
        for z in 0..16u128 {
            assert_eq!(p.apply(z as i128) as u128, g.flip_forward(z));
            assert_eq!(g.flip_inverse(g.flip_forward(z)), z);
        }
    }

    #[test]
    fn odometer_never_flips() {
        for t in enumerate_basic(System::Odometer, 10).step_by(5) {
            let g = StageGeometry::new(1, 4, 10, t.g).unwrap();
            let h = hat(&t.into(), &g, Direction::OdometerTarget).unwrap();
            assert!(h.flipped.is_empty() && h.p2.is_identity());
        }
    }
}
