//! Levels of the canonical towers, their order, measures and projections.

use crate::error::{Error, Result};
use crate::words::{morse_prefix, tm_bit, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::sync::OnceLock;

/// Largest stage whose prefix u_k is kept in memory for direct block comparison.
pub const DIRECT_CAP: u32 = 24;

fn cached_prefix() -> &'static Word {
    static P: OnceLock<Word> = OnceLock::new();
    P.get_or_init(|| morse_prefix(DIRECT_CAP))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum System {
    Morse,
    Odometer,
}

/// u_k(i) when `bar` is false, ū_k(i) when true.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorseLevel {
    pub k: u32,
    pub i: u128,
    pub bar: bool,
}

/// v_k(i).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OdometerLevel {
    pub k: u32,
    pub i: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    M(MorseLevel),
    O(OdometerLevel),
}

fn height(k: u32) -> u128 {
    assert!(k < 128, "stage exponent {k} exceeds 127");
    1u128 << k
}

impl MorseLevel {
    pub fn new(k: u32, i: u128, bar: bool) -> Self {
        assert!(i < height(k), "u_{k}({i}) out of range");
        MorseLevel { k, i, bar }
    }

    /// The symbol x_0 carried by this level: u_{k,i} or its flip.
    pub fn symbol(&self) -> bool {
        tm_bit(self.i) ^ self.bar
    }
}

impl OdometerLevel {
    pub fn new(k: u32, i: u128) -> Self {
        assert!(i < height(k), "v_{k}({i}) out of range");
        OdometerLevel { k, i }
    }
}

impl Level {
    pub fn u(k: u32, i: u128) -> Self {
        Level::M(MorseLevel::new(k, i, false))
    }
    pub fn ubar(k: u32, i: u128) -> Self {
        Level::M(MorseLevel::new(k, i, true))
    }
    pub fn morse(k: u32, i: u128, bar: bool) -> Self {
        Level::M(MorseLevel::new(k, i, bar))
    }
    pub fn v(k: u32, i: u128) -> Self {
        Level::O(OdometerLevel::new(k, i))
    }

    pub fn system(&self) -> System {
        match self {
            Level::M(_) => System::Morse,
            Level::O(_) => System::Odometer,
        }
    }

    pub fn k(&self) -> u32 {
        match self {
            Level::M(l) => l.k,
            Level::O(l) => l.k,
        }
    }

    pub fn i(&self) -> u128 {
        match self {
            Level::M(l) => l.i,
            Level::O(l) => l.i,
        }
    }

    pub fn bar(&self) -> Option<bool> {
        match self {
            Level::M(l) => Some(l.bar),
            Level::O(_) => None,
        }
    }

    pub fn with_i(&self, i: u128) -> Self {
        match *self {
            Level::M(l) => Level::morse(l.k, i, l.bar),
            Level::O(l) => Level::v(l.k, i),
        }
    }

    pub fn flipped(&self) -> Result<Self> {
        match *self {
            Level::M(l) => Ok(Level::morse(l.k, l.i, !l.bar)),
            Level::O(_) => Err(Error::Invalid("flip of an odometer level".into())),
        }
    }

    pub fn measure(&self) -> BigRational {
        let e = match self {
            Level::M(l) => l.k + 1,
            Level::O(l) => l.k,
        };
        BigRational::new(BigInt::from(1), BigInt::from(1) << e)
    }

    /// Next level up the same tower, or None at the top.
    pub fn advance(&self) -> Option<Self> {
        if self.i() + 1 < height(self.k()) {
            Some(self.with_i(self.i() + 1))
        } else {
            None
        }
    }

    pub fn project(&self, k: u32) -> Result<Self> {
        match self {
            Level::M(l) => project_morse(l, k).map(Level::M),
            Level::O(l) => project_odometer(l, k).map(Level::O),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::M(l) if l.bar => write!(f, "ū{}({})", l.k, l.i),
            Level::M(l) => write!(f, "u{}({})", l.k, l.i),
            Level::O(l) => write!(f, "v{}({})", l.k, l.i),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawLevel {
    sys: String,
    k: u32,
    i: u128,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    bar: Option<bool>,
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match self {
            Level::M(l) => RawLevel { sys: "M".into(), k: l.k, i: l.i, bar: Some(l.bar) },
            Level::O(l) => RawLevel { sys: "O".into(), k: l.k, i: l.i, bar: None },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = RawLevel::deserialize(d)?;
        if r.k >= 128 || r.i >= 1u128 << r.k {
            return Err(D::Error::custom("level index out of range"));
        }
        match r.sys.as_str() {
            "M" => Ok(Level::morse(r.k, r.i, r.bar.unwrap_or(false))),
            "O" => Ok(Level::v(r.k, r.i)),
            s => Err(D::Error::custom(format!("unknown system {s}"))),
        }
    }
}

/// Cylinder word of v_k(i): binary expansion of i, least significant digit first.
pub fn odometer_word(l: &OdometerLevel) -> Word {
    Word::from_bits((0..l.k).map(|j| l.i >> j & 1 == 1))
}

pub fn project_odometer(l: &OdometerLevel, k: u32) -> Result<OdometerLevel> {
    if k > l.k {
        return Err(Error::UpwardProjection { from: l.k, to: k });
    }
    Ok(OdometerLevel::new(k, l.i & (height(k) - 1)))
}

/// Projection of a Morse level to stage k. For stages within the cached prefix the
/// bar is read off by comparing the containing aligned block of u_k with u_{k'}
/// (its leading 64 symbols suffice, since the block is u_{k'} or its flip);
/// beyond the cache the Thue–Morse parity of the block index is used.
pub fn project_morse(l: &MorseLevel, k: u32) -> Result<MorseLevel> {
    if k > l.k {
        return Err(Error::UpwardProjection { from: l.k, to: k });
    }
    let q = l.i >> k;
    let flipped = if l.k <= DIRECT_CAP {
        let p = cached_prefix();
        let n = (1usize << k).min(64);
        let start = (q as usize) << k;
        let blk = p.chunk(start, n);
        let u = p.chunk(0, n);
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if blk == u {
            false
        } else if blk == !u & full {
            true
        } else {
            unreachable!("aligned block of u_k is neither u_k' nor its flip")
        }
    } else {
        tm_bit(q)
    };
    Ok(MorseLevel::new(k, l.i & (height(k) - 1), l.bar ^ flipped))
}

/// Brute-force projection oracle: cut u_k into 2^{k-k'} blocks and compare whole blocks.
pub fn project_morse_bruteforce(l: &MorseLevel, k: u32) -> Result<MorseLevel> {
    if k > l.k {
        return Err(Error::UpwardProjection { from: l.k, to: k });
    }
    let uk = morse_prefix(l.k);
    let uk2 = morse_prefix(k);
    let n = 1usize << k;
    let q = (l.i >> k) as usize;
    let blk = uk.slice(q * n, n);
    let flipped = if blk == uk2 {
        false
    } else if blk == crate::words::flip(&uk2) {
        true
    } else {
        return Err(Error::NotMorseFactor);
    };
    Ok(MorseLevel::new(k, l.i % n as u128, l.bar ^ flipped))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_words() {
        assert_eq!(odometer_word(&OdometerLevel::new(3, 1)).to_string(), "100");
        assert_eq!(odometer_word(&OdometerLevel::new(3, 0)).to_string(), "000");
        assert_eq!(odometer_word(&OdometerLevel::new(3, 5)).to_string(), "101");
    }

    #[test]
    fn projections() {
        let v = OdometerLevel::new(3, 5);
        assert_eq!(project_odometer(&v, 2).unwrap(), OdometerLevel::new(2, 1));
        assert_eq!(project_odometer(&v, 3).unwrap(), v);
        assert_eq!(project_odometer(&OdometerLevel::new(3, 4), 1).unwrap(), OdometerLevel::new(1, 0));
        assert!(project_odometer(&v, 4).is_err());
        let u = MorseLevel::new(2, 3, false);
        assert_eq!(project_morse(&u, 1).unwrap(), MorseLevel::new(1, 1, true));
        assert_eq!(project_morse(&MorseLevel::new(2, 3, true), 1).unwrap(), MorseLevel::new(1, 1, false));
        assert_eq!(project_morse(&MorseLevel::new(3, 0, false), 2).unwrap(), MorseLevel::new(2, 0, false));
        // beyond the cache the parity path is used
        let big = MorseLevel::new(40, 123_456_789_012, true);
        let p = project_morse(&big, 10).unwrap();
        assert_eq!(p.bar, true ^ tm_bit(123_456_789_012 >> 10));
    }

    #[test]
    fn measures_and_order() {
        use num_traits::One;
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(Level::u(2, 3).measure(), r(1, 8));
        assert_eq!(Level::v(3, 5).measure(), r(1, 8));
        assert_eq!(Level::u(0, 0).measure(), r(1, 2));
        assert_eq!(Level::u(2, 1).advance(), Some(Level::u(2, 2)));
        assert_eq!(Level::v(3, 7).advance(), None);
        assert_eq!(Level::ubar(2, 0).advance(), Some(Level::ubar(2, 1)));
        let total: BigRational = (0..8u128).map(|i| Level::v(3, i).measure()).sum();
        assert!(total.is_one());
    }

    #[test]
    fn json_forms() {
        let s = serde_json::to_string(&Level::ubar(2, 3)).unwrap();
        assert_eq!(s, r#"{"sys":"M","k":2,"i":3,"bar":true}"#);
        let s = serde_json::to_string(&Level::v(3, 5)).unwrap();
        assert_eq!(s, r#"{"sys":"O","k":3,"i":5}"#);
        let l: Level = serde_json::from_str(&s).unwrap();
        assert_eq!(l, Level::v(3, 5));
    }
}
