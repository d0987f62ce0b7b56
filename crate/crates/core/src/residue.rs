//! Exact arithmetic in Z/p^N with the modulus exponent carried on every value.
//!
//! Mixed-modulus arithmetic is rejected rather than silently coerced, and the
//! modulus p^N must fit in 64 bits (with square headroom provided by u128
//! multiplication).

use crate::error::{Error, Result};
use crate::fp;
use serde::{Deserialize, Serialize};

/// The modulus data (p, N) shared by a family of residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PLevel {
    pub p: u64,
    pub n: u32,
    modulus: u64,
}

impl PLevel {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        fp::check_prime(p)?;
        if n == 0 {
            return Err(Error::Config("modulus exponent must be >= 1".into()));
        }
        let mut m: u64 = 1;
        for _ in 0..n {
            m = m
                .checked_mul(p)
                .ok_or_else(|| Error::Unsupported(format!("p^N = {p}^{n} exceeds 64 bits")))?;
        }
        Ok(PLevel { p, n, modulus: m })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The level obtained by lowering the exponent to m.
    pub fn reduce_to(&self, m: u32) -> Result<PLevel> {
        if m > self.n {
            return Err(Error::Level(format!(
                "cannot raise level {} to {}",
                self.n, m
            )));
        }
        PLevel::new(self.p, m)
    }
}

/// An element of Z/p^N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueInt {
    pub value: u64,
    pub level: PLevel,
}

impl ResidueInt {
    pub fn new(value: u64, level: PLevel) -> Self {
        ResidueInt {
            value: value % level.modulus(),
            level,
        }
    }

    pub fn from_i64(value: i64, level: PLevel) -> Self {
        let m = level.modulus() as i64;
        let v = ((value % m) + m) % m;
        ResidueInt::new(v as u64, level)
    }

    pub fn zero(level: PLevel) -> Self {
        ResidueInt::new(0, level)
    }

    pub fn one(level: PLevel) -> Self {
        ResidueInt::new(1, level)
    }

    fn same_level(&self, o: &ResidueInt) -> Result<PLevel> {
        if self.level != o.level {
            return Err(Error::Level(format!(
                "mixed moduli: p^{} vs p^{}",
                self.level.n, o.level.n
            )));
        }
        Ok(self.level)
    }

    pub fn add(&self, o: &ResidueInt) -> Result<ResidueInt> {
        let l = self.same_level(o)?;
        let m = l.modulus();
        Ok(ResidueInt::new((self.value + o.value) % m, l))
    }

    pub fn sub(&self, o: &ResidueInt) -> Result<ResidueInt> {
        let l = self.same_level(o)?;
        let m = l.modulus();
        Ok(ResidueInt::new((self.value + m - o.value) % m, l))
    }

    pub fn mul(&self, o: &ResidueInt) -> Result<ResidueInt> {
        let l = self.same_level(o)?;
        let m = l.modulus() as u128;
        Ok(ResidueInt::new(
            ((self.value as u128 * o.value as u128) % m) as u64,
            l,
        ))
    }

    pub fn neg(&self) -> ResidueInt {
        let m = self.level.modulus();
        ResidueInt::new((m - self.value % m) % m, self.level)
    }

    /// p-adic valuation, capped at N (the valuation of 0).
    pub fn valuation(&self) -> u32 {
        let mut v = 0;
        let mut x = self.value;
        while v < self.level.n {
            if x % self.level.p == 0 {
                x /= self.level.p;
                v += 1;
            } else {
                break;
            }
        }
        v
    }

    pub fn is_unit(&self) -> bool {
        self.value % self.level.p != 0
    }

    /// Inverse of a unit.
    pub fn inv(&self) -> Result<ResidueInt> {
        if !self.is_unit() {
            return Err(Error::DivisionByZero);
        }
        // lift the mod-p inverse by Newton iteration
        let m = self.level.modulus() as u128;
        let mut x = fp::inv(self.level.p, self.value % self.level.p)? as u128;
        let a = self.value as u128;
        loop {
            // x <- x(2 - ax) mod p^N
            let ax = (a * x) % m;
            let two_minus = (2 + m - ax) % m;
            let nx = (x * two_minus) % m;
            if nx == x {
                break;
            }
            x = nx;
        }
        debug_assert_eq!((a * x) % m, 1);
        Ok(ResidueInt::new(x as u64, self.level))
    }

    pub fn pow(&self, mut e: u64) -> ResidueInt {
        let mut base = *self;
        let mut acc = ResidueInt::one(self.level);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same level");
            }
            base = base.mul(&base).expect("same level");
            e >>= 1;
        }
        acc
    }

    /// Reduce to a lower exponent.
    pub fn reduce_to(&self, m: u32) -> Result<ResidueInt> {
        let l = self.level.reduce_to(m)?;
        Ok(ResidueInt::new(self.value % l.modulus(), l))
    }

    /// Exact division by p^v; errors if the value is not divisible.
    /// The result lives at level N - v.
    pub fn divide_p_power(&self, v: u32) -> Result<ResidueInt> {
        if v == 0 {
            return Ok(*self);
        }
        if v >= self.level.n {
            return Err(Error::Level(format!(
                "dividing by p^{v} at level {}",
                self.level.n
            )));
        }
        let mut pv = 1u64;
        for _ in 0..v {
            pv *= self.level.p;
        }
        if self.value % pv != 0 {
            return Err(Error::Internal(format!(
                "inexact division of {} by p^{v}",
                self.value
            )));
        }
        let l = self.level.reduce_to(self.level.n - v)?;
        Ok(ResidueInt::new(self.value / pv, l))
    }

    /// Image in F_p.
    pub fn mod_p(&self) -> u64 {
        self.value % self.level.p
    }
}

/// Teichmueller lift: the unique (p-1)-th root of unity in Z/p^N congruent
/// to a mod p. Computed as the fixpoint of x -> x^p.
pub fn teichmuller(a: u64, level: PLevel) -> Result<ResidueInt> {
    let p = level.p;
    let a = a % p;
    if a == 0 {
        return Err(Error::Domain("teichmuller lift of 0".into()));
    }
    let mut x = ResidueInt::new(a, level);
    loop {
        let y = x.pow(p);
        if y == x {
            break;
        }
        x = y;
    }
    debug_assert_eq!(x.pow(p - 1), ResidueInt::one(level));
    debug_assert_eq!(x.mod_p(), a);
    Ok(x)
}

/// Discrete log of u in the group 1 + pZ/p^N with base 1 + p.
///
/// 1 + p topologically generates the principal units for p >= 3, so this is
/// always solvable; used by the constructive factorization of torus elements.
pub fn principal_unit_dlog(u: &ResidueInt) -> Result<u64> {
    principal_unit_dlog_depth(u, 1)
}

/// Discrete log of u in 1 + p^i Z/p^N with base 1 + p^i.
///
/// One p-adic digit is lifted per step: if (1+p^i)^e = u mod p^{i+j} then the
/// next digit d of e satisfies (1+p^i)^{p^j d} = 1 + d p^{i+j} mod p^{i+j+1}
/// (the cross terms are deeper since p >= 5).
pub fn principal_unit_dlog_depth(u: &ResidueInt, depth: u32) -> Result<u64> {
    let level = u.level;
    let p = level.p;
    if depth == 0 {
        return Err(Error::Domain("depth must be >= 1".into()));
    }
    if depth >= level.n {
        // the group 1 + p^depth Z/p^N is trivial
        return if u.value == 1 {
            Ok(0)
        } else {
            Err(Error::Domain(format!(
                "{} is not a principal unit at depth {depth}",
                u.value
            )))
        };
    }
    let mut pd = 1u64;
    for _ in 0..depth {
        pd *= p;
    }
    if u.value % pd != 1 {
        return Err(Error::Domain(format!(
            "{} is not a principal unit at depth {depth}",
            u.value
        )));
    }
    let base = ResidueInt::new(1 + pd, level);
    let mut e: u64 = 0;
    let mut pj: u64 = 1; // p^j
    for _ in depth..level.n {
        let r = base.pow(e).inv()?.mul(u)?;
        let diff = (r.value + level.modulus() - 1) % level.modulus();
        let c = (diff / (pj * pd)) % p;
        e += c * pj;
        pj *= p;
    }
    if base.pow(e).value != u.value {
        return Err(Error::Internal(format!(
            "principal-unit dlog failed for {} at depth {depth}",
            u.value
        )));
    }
    Ok(e)
}

/// Decompose a unit u of Z/p^N as [a0] * (1+p)^e with a0 in F_p^*.
pub fn unit_decompose(u: &ResidueInt) -> Result<(u64, u64)> {
    if !u.is_unit() {
        return Err(Error::DivisionByZero);
    }
    let a0 = u.mod_p();
    let t = teichmuller(a0, u.level)?;
    let principal = t.inv()?.mul(u)?;
    let e = principal_unit_dlog(&principal)?;
    Ok((a0, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(p: u64, n: u32) -> PLevel {
        PLevel::new(p, n).unwrap()
    }

    #[test]
    fn teichmuller_examples() {
        // frozen from the fixpoint oracle x -> x^p
        assert_eq!(teichmuller(1, lv(5, 2)).unwrap().value, 1);
        assert_eq!(teichmuller(2, lv(5, 2)).unwrap().value, 7);
        assert_eq!(teichmuller(4, lv(5, 2)).unwrap().value, 24);
        assert_eq!(teichmuller(2, lv(5, 3)).unwrap().value, 57);
        assert!(teichmuller(0, lv(5, 2)).is_err());
    }

    #[test]
    fn teichmuller_multiplicative_and_compatible() {
        for p in [5u64, 7] {
            for n in 1..=3u32 {
                let l = lv(p, n);
                for a in 1..p {
                    for b in 1..p {
                        let ta = teichmuller(a, l).unwrap();
                        let tb = teichmuller(b, l).unwrap();
                        let tab = teichmuller(a * b % p, l).unwrap();
                        assert_eq!(ta.mul(&tb).unwrap(), tab);
                    }
                    // compatibility under reduction
                    if n > 1 {
                        let hi = teichmuller(a, l).unwrap();
                        let lo = teichmuller(a, lv(p, n - 1)).unwrap();
                        assert_eq!(hi.reduce_to(n - 1).unwrap(), lo);
                    }
                    // (p-1)-th root of unity
                    assert_eq!(
                        teichmuller(a, l).unwrap().pow(p - 1),
                        ResidueInt::one(l)
                    );
                }
            }
        }
    }

    #[test]
    fn mixed_modulus_rejected() {
        let a = ResidueInt::new(3, lv(5, 2));
        let b = ResidueInt::new(3, lv(5, 3));
        assert!(a.add(&b).is_err());
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn unit_inverse_roundtrip() {
        let l = lv(5, 4);
        for v in 1..200u64 {
            if v % 5 == 0 {
                continue;
            }
            let x = ResidueInt::new(v, l);
            let y = x.inv().unwrap();
            assert_eq!(x.mul(&y).unwrap(), ResidueInt::one(l));
        }
        assert!(ResidueInt::new(10, l).inv().is_err());
    }

    #[test]
    fn dlog_and_unit_decomposition() {
        let l = lv(5, 4);
        for v in 1..300u64 {
            if v % 5 == 0 {
                continue;
            }
            let u = ResidueInt::new(v, l);
            let (a0, e) = unit_decompose(&u).unwrap();
            let t = teichmuller(a0, l).unwrap();
            let rebuilt = t.mul(&ResidueInt::new(6, l).pow(e)).unwrap();
            assert_eq!(rebuilt, u);
        }
    }

    #[test]
    fn oversized_modulus_rejected() {
        assert!(PLevel::new(5, 40).is_err());
        assert!(PLevel::new(5, 27).is_ok()); // 5^27 < 2^64
    }
}
