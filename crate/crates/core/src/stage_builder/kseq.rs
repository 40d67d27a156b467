//! The stage exponents k_n and the tolerances that choose them.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqMode {
    Strict,
    Min,
    Chain,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageParams {
    pub mode: SeqMode,
    /// ε_2, ε_3, … (the last entry repeats); empty outside strict mode
    #[serde(serialize_with = "crate::report::ser_rationals")]
    pub eps: Vec<BigRational>,
    /// k_0, k_1, k_2, …
    pub k: Vec<u32>,
    /// m used for the step k_n → k_{n+1}, indexed by n (None for n < 2)
    pub m: Vec<Option<u64>>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

/// Parse "0.5", "1/2" or "3".
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("cannot parse {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    Ok(BigRational::new(n, BigInt::from(10u32).pow(frac.len() as u32)))
}

impl StageParams {
    pub fn eps_at(&self, n: usize) -> Option<&BigRational> {
        if self.eps.is_empty() {
            return None;
        }
        Some(&self.eps[(n - 2).min(self.eps.len() - 1)])
    }

    pub fn mn(&self, n: usize) -> u128 {
        1u128 << self.k[n]
    }
}

/// Least m with 2(1+N)/(2(1+N)+m) < ε.
pub fn minimal_m(kn: u32, eps: &BigRational) -> u64 {
    let two_n1 = BigRational::from(BigInt::from(2) * (pow2(kn) + 1));
    let x = &two_n1 * (BigRational::one() - eps) / eps;
    (x.floor().to_integer() + BigInt::one()).max(BigInt::one()).to_u64().expect("m fits in u64")
}

/// Least k' with 2^{k'} ≥ m·N + 2(N + N²).
pub fn minimal_k(kn: u32, m: u64) -> u32 {
    let n = pow2(kn);
    let need = &n * m + BigInt::from(2) * (&n + &n * &n);
    let mut k = kn + 1;
    while pow2(k) < need {
        k += 1;
    }
    k
}

fn ineq_a(kn: u32, m: u64, eps: &BigRational) -> bool {
    let t = BigRational::from(BigInt::from(2) * (pow2(kn) + 1));
    &t / (&t + BigRational::from(BigInt::from(m))) < *eps
}

fn ineq_b(kn: u32, kn1: u32, m: u64) -> bool {
    let n = pow2(kn);
    pow2(kn1) >= &n * m + BigInt::from(2) * (&n + &n * &n)
}

/// Build k_0 … k_stages.
pub fn build_k_sequence(eps: &[BigRational], mode: SeqMode, chain: &[u32], stages: usize) -> Result<StageParams> {
    if stages < 2 {
        return Err(Error::Invalid("at least two stages are needed".into()));
    }
    let mut p = StageParams { mode, eps: vec![], k: vec![0, 0, 2], m: vec![None, None] };
    match mode {
        SeqMode::Chain => {
            let mut c = chain.to_vec();
            if c.first() == Some(&0) {
                c.drain(..c.len().min(2));
            }
            if c.first() != Some(&2) {
                return Err(Error::InfeasibleChain("the chain must start at k_2 = 2".into()));
            }
            p.k.extend(&c[1..]);
            p.k.truncate(stages + 1);
            for n in 2..p.k.len() - 1 {
                p.m.push(None);
                if p.k[n + 1] <= p.k[n] {
                    return Err(Error::InfeasibleChain(format!("k_{} = {} is not above k_{} = {}", n + 1, p.k[n + 1], n, p.k[n])));
                }
                if !ineq_b(p.k[n], p.k[n + 1], 1) {
                    return Err(Error::InfeasibleChain(format!(
                        "2^k_{} >= m·2^k_{} + 2(2^k_{} + 2^(2k_{})) fails for every m >= 1 (k_{} = {}, k_{} = {})",
                        n + 1, n, n, n, n, p.k[n], n + 1, p.k[n + 1]
                    )));
                }
            }
        }
        SeqMode::Strict | SeqMode::Min => {
            if mode == SeqMode::Strict {
                if eps.is_empty() {
                    return Err(Error::Invalid("strict mode needs ε".into()));
                }
                if let Some(e) = eps.iter().find(|e| !e.is_positive() || **e >= BigRational::one()) {
                    return Err(Error::Invalid(format!("ε = {e} is not in (0, 1)")));
                }
                p.eps = eps.to_vec();
            }
            for n in 2..stages {
                let kn = p.k[n];
                let m = match mode {
                    SeqMode::Strict => minimal_m(kn, p.eps_at(n).unwrap()),
                    _ => 1,
                };
                let k1 = minimal_k(kn, m);
                if k1 >= 128 {
                    return Err(Error::StageUnavailable(format!("k_{} = {k1} does not fit 128-bit positions", n + 1)));
                }
                p.k.push(k1);
                p.m.push(Some(m));
            }
        }
    }
    Ok(p)
}

/// Re-check the defining inequalities; returns the list of violations.
pub fn validate(p: &StageParams) -> Vec<String> {
    let mut bad = vec![];
    if p.k.len() < 3 || p.k[..3] != [0, 0, 2] {
        bad.push("k_0 = k_1 = 0, k_2 = 2 violated".to_string());
    }
    for n in 2..p.k.len().saturating_sub(1) {
        let (kn, kn1) = (p.k[n], p.k[n + 1]);
        if !ineq_b(kn, kn1, 1) {
            bad.push(format!("safe zones do not fit between k_{n} and k_{}", n + 1));
        }
        if p.mode == SeqMode::Strict {
            let m = p.m[n].unwrap_or(0);
            let e = p.eps_at(n).unwrap();
            if !ineq_a(kn, m, e) {
                bad.push(format!("tolerance inequality fails at n = {n}"));
            }
            if m > 1 && ineq_a(kn, m - 1, e) {
                bad.push(format!("m at n = {n} is not minimal"));
            }
            if !ineq_b(kn, kn1, m) {
                bad.push(format!("height inequality fails at n = {n}"));
            }
            if ineq_b(kn, kn1 - 1, m) {
                bad.push(format!("k_{} is not minimal", n + 1));
            }
        }
    }
    bad
}

/// Fraction of a height-2^{k'} tower covered by both safe zones of width 2^k(1+2^k).
pub fn safe_fraction(k: u32, k_top: u32) -> BigRational {
    let n = pow2(k);
    BigRational::new(BigInt::from(2) * (&n + &n * &n), pow2(k_top))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_half() {
        let p = build_k_sequence(&[rat(1, 2)], SeqMode::Strict, &[], 4).unwrap();
        assert_eq!(p.m[2], Some(11));
        assert_eq!(p.k[3], 7);
        assert!(validate(&p).is_empty(), "{:?}", validate(&p));
    }

    #[test]
    fn min_chain() {
        let p = build_k_sequence(&[], SeqMode::Min, &[], 6).unwrap();
        assert_eq!(p.k, vec![0, 0, 2, 6, 14, 30, 62]);
        assert!(validate(&p).is_empty());
        assert!(build_k_sequence(&[], SeqMode::Chain, &[2, 5, 14], 4).is_err());
        assert_eq!(build_k_sequence(&[], SeqMode::Chain, &[2, 6, 14], 4).unwrap().k, vec![0, 0, 2, 6, 14]);
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("3/8").unwrap(), rat(3, 8));
    }
}
