//! Smooth characters of the finite torus H (Teichmueller diagonal pairs)
//! and their inflations to the congruence subgroups with upper-triangular
//! reduction.

use crate::error::{Error, Result};
use crate::fp;
use crate::mat2::Mat2;
use serde::{Deserialize, Serialize};

/// chi(diag([a],[d])) = abar^x dbar^y, exponents mod p-1. The optional
/// unramified scalar feeds central and normalizer twists; it does not enter
/// the H-evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterH {
    pub p: u64,
    pub x: u64,
    pub y: u64,
    pub scalar: u64,
}

impl CharacterH {
    pub fn new(p: u64, x: u64, y: u64) -> Self {
        CharacterH {
            p,
            x: x % (p - 1),
            y: y % (p - 1),
            scalar: 1,
        }
    }

    pub fn with_scalar(mut self, scalar: u64) -> Self {
        self.scalar = scalar % self.p;
        self
    }

    pub fn trivial(p: u64) -> Self {
        CharacterH::new(p, 0, 0)
    }

    /// alpha = a d^{-1} on the torus.
    pub fn alpha(p: u64) -> Self {
        CharacterH::new(p, 1, p - 2)
    }

    pub fn mul(&self, o: &CharacterH) -> CharacterH {
        CharacterH::new(self.p, self.x + o.x, self.y + o.y).with_scalar(fp::mul(
            self.p,
            self.scalar,
            o.scalar,
        ))
    }

    pub fn pow(&self, e: u64) -> CharacterH {
        let m = self.p - 1;
        CharacterH::new(self.p, self.x * (e % m) % m, self.y * (e % m) % m)
            .with_scalar(fp::pow(self.p, self.scalar, e))
    }

    pub fn inverse(&self) -> CharacterH {
        let m = self.p - 1;
        CharacterH::new(self.p, (m - self.x) % m, (m - self.y) % m)
            .with_scalar(fp::inv(self.p, self.scalar).expect("unit scalar"))
    }

    /// Conjugate character (swap the exponents); equals the twist by the
    /// Iwahori normalizer on inflations.
    pub fn conj(&self) -> CharacterH {
        CharacterH::new(self.p, self.y, self.x).with_scalar(self.scalar)
    }

    /// Generic iff distinct exponents.
    pub fn is_generic(&self) -> bool {
        self.x != self.y
    }

    /// Evaluate on a matrix whose reduction mod p is upper triangular: the
    /// value reads the diagonal mod p.
    pub fn eval(&self, m: &Mat2) -> Result<u64> {
        let p = self.p;
        if m.c.mod_p() != 0 {
            return Err(Error::Domain(format!(
                "character evaluated off the Iwahori shape: {:?}",
                m.entries()
            )));
        }
        let a = m.a.mod_p();
        let d = m.d.mod_p();
        if a == 0 || d == 0 {
            return Err(Error::Domain("character evaluated on a non-unit".into()));
        }
        Ok(fp::mul(p, fp::pow(p, a, self.x), fp::pow(p, d, self.y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::PLevel;

    #[test]
    fn alpha_and_conj() {
        let p = 5;
        let chi = CharacterH::new(p, 1, 0);
        assert_eq!(chi.conj(), CharacterH::new(p, 0, 1));
        assert!(chi.is_generic());
        assert!(!CharacterH::trivial(p).is_generic());
        let a = CharacterH::alpha(p);
        // alpha^(p-1) = 1
        assert_eq!(a.pow(p - 1), CharacterH::trivial(p));
    }

    #[test]
    fn eval_reads_diagonal() {
        let level = PLevel::new(5, 2).unwrap();
        let chi = CharacterH::new(5, 1, 2);
        // diag(7, 24) = diag([2],[4]): chi = 2^1 * 4^2 = 32 = 2 mod 5
        let m = Mat2::new(level, 7, 0, 0, 24);
        assert_eq!(chi.eval(&m).unwrap(), 2);
        // off-shape rejected
        assert!(chi.eval(&Mat2::new(level, 0, 1, 1, 0)).is_err());
    }
}
