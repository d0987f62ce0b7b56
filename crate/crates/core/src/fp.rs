//! Scalar arithmetic in the coefficient field k.
//!
//! The default coefficient field is F_p with p a runtime parameter, p >= 5.
//! A quadratic extension F_{p^2} is provided for scalar extension of Hom
//! spaces; nothing in the hot path uses it.

use crate::error::{Error, Result};

/// Checks the standing hypothesis on the prime.
pub fn check_prime(p: u64) -> Result<()> {
    if p < 5 {
        return Err(Error::Config(format!("prime must be >= 5, got {p}")));
    }
    if !is_prime(p) {
        return Err(Error::Config(format!("{p} is not prime")));
    }
    Ok(())
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub fn add(p: u64, a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(p: u64, a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn neg(p: u64, a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mul(p: u64, a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow(p: u64, mut base: u64, mut exp: u64) -> u64 {
    base %= p;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(p, acc, base);
        }
        base = mul(p, base, base);
        exp >>= 1;
    }
    acc
}

/// Inverse in F_p. Errors on zero.
pub fn inv(p: u64, a: u64) -> Result<u64> {
    let a = a % p;
    if a == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(pow(p, a, p - 2))
}

/// Smallest generator of F_p^*.
pub fn multiplicative_generator(p: u64) -> u64 {
    'outer: for g in 2..p {
        // order of g must be p-1: check g^((p-1)/q) != 1 for prime divisors q
        let mut m = p - 1;
        let mut qs = Vec::new();
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                qs.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            qs.push(m);
        }
        for q in qs {
            if pow(p, g, (p - 1) / q) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("no generator found")
}

/// Smallest quadratic non-residue mod p (p odd).
pub fn quadratic_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| pow(p, a, (p - 1) / 2) != 1).expect("p > 2")
}

/// Element of F_{p^2} = F_p[t]/(t^2 - nu), nu the smallest non-residue.
///
/// Only used to extend scalars of Hom spaces; the representation machinery
/// itself stays over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp2 {
    pub p: u64,
    pub a: u64,
    pub b: u64,
}

impl Fp2 {
    pub fn new(p: u64, a: u64, b: u64) -> Self {
        Fp2 {
            p,
            a: a % p,
            b: b % p,
        }
    }

    pub fn from_base(p: u64, a: u64) -> Self {
        Self::new(p, a, 0)
    }

    pub fn zero(p: u64) -> Self {
        Self::new(p, 0, 0)
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, 1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn add(&self, o: &Fp2) -> Fp2 {
        Fp2::new(self.p, add(self.p, self.a, o.a), add(self.p, self.b, o.b))
    }

    pub fn mul(&self, o: &Fp2) -> Fp2 {
        let p = self.p;
        let nu = quadratic_nonresidue(p);
        // (a + bt)(c + dt) = ac + bd*nu + (ad + bc) t
        let ac = mul(p, self.a, o.a);
        let bd = mul(p, self.b, o.b);
        let ad = mul(p, self.a, o.b);
        let bc = mul(p, self.b, o.a);
        Fp2::new(p, add(p, ac, mul(p, bd, nu)), add(p, ad, bc))
    }

    pub fn pow(&self, mut e: u64) -> Fp2 {
        let mut base = *self;
        let mut acc = Fp2::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<Fp2> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // norm = a^2 - nu b^2 in F_p
        let p = self.p;
        let nu = quadratic_nonresidue(p);
        let norm = sub(p, mul(p, self.a, self.a), mul(p, nu, mul(p, self.b, self.b)));
        let ninv = inv(p, norm)?;
        Ok(Fp2::new(p, mul(p, self.a, ninv), mul(p, neg(p, self.b), ninv)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_inverse_examples() {
        assert_eq!(inv(5, 2).unwrap(), 3);
        assert_eq!(inv(5, 1).unwrap(), 1);
        assert_eq!(inv(7, 3).unwrap(), 5);
        assert!(inv(5, 0).is_err());
    }

    #[test]
    fn prime_gate() {
        assert!(check_prime(5).is_ok());
        assert!(check_prime(7).is_ok());
        assert!(check_prime(4).is_err());
        assert!(check_prime(3).is_err());
        assert!(check_prime(9).is_err());
    }

    #[test]
    fn fermat_in_fp2() {
        for p in [5u64, 7] {
            let q = p * p;
            for a in 0..p {
                for b in 0..p {
                    let x = Fp2::new(p, a, b);
                    if !x.is_zero() {
                        assert_eq!(x.pow(q - 1), Fp2::one(p));
                    }
                }
            }
        }
    }

    #[test]
    fn generators() {
        let g = multiplicative_generator(5);
        assert_eq!(pow(5, g, 4), 1);
        assert_ne!(pow(5, g, 2), 1);
    }
}
