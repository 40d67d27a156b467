//! Binary words, the Morse substitution and block parsing.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Thue–Morse symbol at index q: parity of the number of ones in q.
pub fn tm_bit(q: u128) -> bool {
    q.count_ones() & 1 == 1
}

/// Packed binary word. Bit i lives in `bits[i / 64]` at position `i % 64`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    bits: Vec<u64>,
    len: usize,
}

fn spread(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Word { bits: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(it: I) -> Self {
        let mut w = Word::new();
        for b in it {
            w.push(b);
        }
        w
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut w = Word::new();
        for c in s.chars() {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                c if c.is_whitespace() => {}
                c => return Err(Error::Invalid(format!("symbol {c:?} is not 0 or 1"))),
            }
        }
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.bits[i / 64] |= m;
        } else {
            self.bits[i / 64] &= !m;
        }
    }

    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(64) {
            self.bits.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, b);
    }

    /// Up to 64 bits starting at `start`, packed LSB-first.
    pub fn chunk(&self, start: usize, n: usize) -> u64 {
        debug_assert!(n <= 64 && start + n <= self.len);
        if n == 0 {
            return 0;
        }
        let (w, o) = (start / 64, start % 64);
        let mut v = self.bits[w] >> o;
        if o != 0 && w + 1 < self.bits.len() {
            v |= self.bits[w + 1] << (64 - o);
        }
        if n < 64 {
            v &= (1u64 << n) - 1;
        }
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn slice(&self, start: usize, n: usize) -> Word {
        assert!(start + n <= self.len);
        let mut out = Word::zeros(n);
        let mut i = 0;
        while i < n {
            let m = (n - i).min(64);
            out.bits[i / 64] = self.chunk(start + i, m);
            i += 64;
        }
        out
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for b in other.iter() {
            out.push(b);
        }
        out
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "Word({self})")
        } else {
            write!(f, "Word(len={})", self.len)
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// σ(0) = 01, σ(1) = 10 applied symbol-wise.
pub fn substitute(w: &Word) -> Result<Word> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut out = Word::zeros(2 * w.len);
    for (i, &x) in w.bits.iter().enumerate() {
        for half in 0..2 {
            let idx = 2 * i + half;
            if idx >= out.bits.len() {
                break;
            }
            let v = (x >> (32 * half)) as u32;
            out.bits[idx] = spread(v) | (spread(!v) << 1);
        }
    }
    // clear garbage beyond len
    let tail = out.len % 64;
    if tail != 0 {
        let last = out.bits.len() - 1;
        out.bits[last] &= (1u64 << tail) - 1;
    }
    Ok(out)
}

pub fn flip(w: &Word) -> Word {
    let mut out = w.clone();
    for x in out.bits.iter_mut() {
        *x = !*x;
    }
    let tail = out.len % 64;
    if tail != 0 {
        let last = out.bits.len() - 1;
        out.bits[last] &= (1u64 << tail) - 1;
    }
    out
}

/// u_k = σ^k(0), of length 2^k.
pub fn morse_prefix(k: u32) -> Word {
    let mut w = Word::from_bits([false]);
    for _ in 0..k {
        w = substitute(&w).expect("nonempty");
    }
    w
}

fn block_is_morse(w: &Word, start: usize, k: u32, u: &Word) -> bool {
    let n = 1usize << k;
    let bar = w.get(start) != u.get(0);
    let mut i = 0;
    while i < n {
        let m = (n - i).min(64);
        let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        let d = w.chunk(start + i, m) ^ u.chunk(i, m);
        if d != if bar { full } else { 0 } {
            return false;
        }
        i += 64;
    }
    true
}

/// All offsets o in [0, 2^k) for which every complete aligned block is u_k or ū_k.
pub fn partition_candidates(w: &Word, k: u32) -> Vec<u64> {
    let n = 1usize << k;
    let u = morse_prefix(k);
    (0..n)
        .filter(|&o| {
            let mut s = o;
            while s + n <= w.len() {
                if !block_is_morse(w, s, k, &u) {
                    return false;
                }
                s += n;
            }
            true
        })
        .map(|o| o as u64)
        .collect()
}

/// The unique alignment offset of `w` into 2^k-blocks.
pub fn parse_partition(w: &Word, k: u32) -> Result<u64> {
    let c = partition_candidates(w, k);
    if c.is_empty() {
        return Err(Error::NotMorseFactor);
    }
    if c.len() > 1 || w.len() < 3 << k {
        return Err(Error::WindowTooShort(c));
    }
    Ok(c[0])
}

/// Block-level comparison of the Morse sequence with its flip shifted left one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EveryOther {
    /// parity classes in which every comparison agrees
    pub parities: Vec<u8>,
    /// block indices i where block i equals the flip of block i+1
    pub matches: Vec<u64>,
}

pub fn every_other_match(k: u32, blocks: u32) -> Result<EveryOther> {
    if blocks < 4 {
        return Err(Error::Invalid("every_other_match needs at least 4 blocks".into()));
    }
    let n = 1usize << k;
    let depth = 32 - (blocks - 1).leading_zeros();
    let m = morse_prefix(k + depth + 1);
    let block = |i: usize| m.slice(i * n, n);
    let mut matches = vec![];
    let mut bad = [false; 2];
    for i in 0..(blocks as usize - 1) {
        if block(i) == flip(&block(i + 1)) {
            matches.push(i as u64);
        } else {
            bad[i % 2] = true;
        }
    }
    let parities = (0..2u8).filter(|&p| !bad[p as usize]).collect();
    Ok(EveryOther { parities, matches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_words() {
        assert_eq!(substitute(&Word::parse("0").unwrap()).unwrap().to_string(), "01");
        assert_eq!(substitute(&Word::parse("1").unwrap()).unwrap().to_string(), "10");
        assert_eq!(
            substitute(&Word::parse("0110").unwrap()).unwrap().to_string(),
            "01101001"
        );
        assert_eq!(substitute(&Word::new()), Err(Error::EmptyWord));
        assert_eq!(morse_prefix(0).to_string(), "0");
        assert_eq!(morse_prefix(2).to_string(), "0110");
        assert_eq!(morse_prefix(4).to_string(), "0110100110010110");
        assert_eq!(flip(&Word::parse("01101001").unwrap()).to_string(), "10010110");
        assert_eq!(flip(&Word::new()), Word::new());
    }

    #[test]
    fn long_substitution_matches_popcount() {
        let w = morse_prefix(12);
        for i in 0..w.len() {
            assert_eq!(w.get(i), tm_bit(i as u128));
        }
    }

    #[test]
    fn parse_examples() {
        let w = morse_prefix(6);
        assert_eq!(parse_partition(&w, 3), Ok(0));
        let d = w.slice(1, w.len() - 1);
        assert_eq!(partition_candidates(&d, 3), vec![7]);
        assert_eq!(parse_partition(&d, 3), Ok(7));
        let z = Word::zeros(16);
        assert_eq!(parse_partition(&z, 2), Err(Error::NotMorseFactor));
        assert!(matches!(
            parse_partition(&morse_prefix(3), 2),
            Err(Error::WindowTooShort(_))
        ));
    }

    #[test]
    fn every_other() {
        let e = every_other_match(0, 8).unwrap();
        assert_eq!(e.parities, vec![0]);
        for i in [0, 2, 4, 6] {
            assert!(e.matches.contains(&i));
        }
        assert!(!e.matches.contains(&1));
        assert_eq!(every_other_match(0, 4).unwrap().parities, vec![0]);
        for k in 1..=6 {
            assert_eq!(every_other_match(k, 8).unwrap().parities.len(), 1);
        }
    }
}
