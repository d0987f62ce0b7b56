//! 2x2 matrices over Z/p^N.
//!
//! Group elements have unit determinant. Non-unit elements (the scaled
//! elements that move along the tree, like [0 1; p 0]) are carried as plain
//! integral matrices whose determinant valuation is tracked explicitly by
//! the consumers; they are never inverted, only applied forward.

use crate::error::{Error, Result};
use crate::residue::{PLevel, ResidueInt};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: ResidueInt,
    pub b: ResidueInt,
    pub c: ResidueInt,
    pub d: ResidueInt,
}

impl Mat2 {
    pub fn new(level: PLevel, a: u64, b: u64, c: u64, d: u64) -> Self {
        Mat2 {
            a: ResidueInt::new(a, level),
            b: ResidueInt::new(b, level),
            c: ResidueInt::new(c, level),
            d: ResidueInt::new(d, level),
        }
    }

    pub fn from_i64(level: PLevel, a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 {
            a: ResidueInt::from_i64(a, level),
            b: ResidueInt::from_i64(b, level),
            c: ResidueInt::from_i64(c, level),
            d: ResidueInt::from_i64(d, level),
        }
    }

    pub fn identity(level: PLevel) -> Self {
        Mat2::new(level, 1, 0, 0, 1)
    }

    pub fn level(&self) -> PLevel {
        self.a.level
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a.value, self.b.value, self.c.value, self.d.value]
    }

    pub fn mul(&self, o: &Mat2) -> Result<Mat2> {
        let a = self.a.mul(&o.a)?.add(&self.b.mul(&o.c)?)?;
        let b = self.a.mul(&o.b)?.add(&self.b.mul(&o.d)?)?;
        let c = self.c.mul(&o.a)?.add(&self.d.mul(&o.c)?)?;
        let d = self.c.mul(&o.b)?.add(&self.d.mul(&o.d)?)?;
        Ok(Mat2 { a, b, c, d })
    }

    pub fn det(&self) -> ResidueInt {
        self.a
            .mul(&self.d)
            .and_then(|x| x.sub(&self.b.mul(&self.c).expect("same level")))
            .expect("same level")
    }

    pub fn adjugate(&self) -> Mat2 {
        Mat2 {
            a: self.d,
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.det().is_unit()
    }

    /// Inverse of an element with unit determinant.
    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if !det.is_unit() {
            return Err(Error::Domain(format!(
                "inverting non-unit matrix {:?}",
                self.entries()
            )));
        }
        let adj = self.adjugate();
        adj.scale(&det.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Result<Mat2> {
        let mut base = *self;
        let mut acc = Mat2::identity(self.level());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Reduce entries to a lower exponent.
    pub fn reduce_to(&self, n: u32) -> Result<Mat2> {
        Ok(Mat2 {
            a: self.a.reduce_to(n)?,
            b: self.b.reduce_to(n)?,
            c: self.c.reduce_to(n)?,
            d: self.d.reduce_to(n)?,
        })
    }

    /// Scale all entries by a residue.
    pub fn scale(&self, s: &ResidueInt) -> Result<Mat2> {
        Ok(Mat2 {
            a: self.a.mul(s)?,
            b: self.b.mul(s)?,
            c: self.c.mul(s)?,
            d: self.d.mul(s)?,
        })
    }

    /// Minimum p-valuation over the entries.
    pub fn content_valuation(&self) -> u32 {
        self.entries()
            .iter()
            .map(|&v| ResidueInt::new(v, self.level()).valuation())
            .min()
            .unwrap()
    }

    /// Exact division of all entries by p^v; drops the level accordingly.
    pub fn divide_p_power(&self, v: u32) -> Result<Mat2> {
        Ok(Mat2 {
            a: self.a.divide_p_power(v)?,
            b: self.b.divide_p_power(v)?,
            c: self.c.divide_p_power(v)?,
            d: self.d.divide_p_power(v)?,
        })
    }

    /// Image of the matrix mod p as plain entries.
    pub fn mod_p(&self) -> [u64; 4] {
        [
            self.a.mod_p(),
            self.b.mod_p(),
            self.c.mod_p(),
            self.d.mod_p(),
        ]
    }
}

/// Distinguished elements at a given level.
pub mod special {
    use super::*;

    /// Pi = [0 1; p 0] (normalizes the Iwahori subgroup; det = -p).
    pub fn pi(level: PLevel) -> Mat2 {
        Mat2::new(level, 0, 1, level.p, 0)
    }

    /// t = [p 0; 0 1].
    pub fn t(level: PLevel) -> Mat2 {
        Mat2::new(level, level.p, 0, 0, 1)
    }

    /// s = [0 1; 1 0].
    pub fn s(level: PLevel) -> Mat2 {
        Mat2::new(level, 0, 1, 1, 0)
    }

    /// [0 1; p^k 0]
    pub fn pi_power_like(level: PLevel, k: u32) -> Mat2 {
        let mut pk = 1u64;
        for _ in 0..k {
            pk *= level.p;
        }
        Mat2::new(level, 0, 1, pk, 0)
    }

    /// diag(1, p^k)
    pub fn diag_one_pk(level: PLevel, k: u32) -> Mat2 {
        let mut pk = 1u64;
        for _ in 0..k {
            pk *= level.p;
        }
        Mat2::new(level, 1, 0, 0, pk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(p: u64, n: u32) -> PLevel {
        PLevel::new(p, n).unwrap()
    }

    #[test]
    fn mul_inverse() {
        let l = lv(5, 3);
        let m = Mat2::new(l, 2, 3, 5, 1);
        assert!(m.is_unit());
        let mi = m.inverse().unwrap();
        assert_eq!(m.mul(&mi).unwrap(), Mat2::identity(l));
        assert_eq!(mi.mul(&m).unwrap(), Mat2::identity(l));
    }

    #[test]
    fn scaled_specials() {
        let l = lv(5, 3);
        let pi = special::pi(l);
        let t = special::t(l);
        let s = special::s(l);
        // s * Pi = t
        assert_eq!(s.mul(&pi).unwrap(), t);
        // Pi^2 = p * id
        let pi2 = pi.mul(&pi).unwrap();
        assert_eq!(pi2, Mat2::new(l, 5, 0, 0, 5));
        assert_eq!(pi.content_valuation(), 0);
        assert_eq!(pi2.content_valuation(), 1);
        assert_eq!(
            pi2.divide_p_power(1).unwrap(),
            Mat2::identity(lv(5, 2))
        );
    }
}
