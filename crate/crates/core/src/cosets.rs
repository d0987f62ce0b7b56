//! Coset transversals with closed-form normal forms, the double-coset
//! partition of the Iwahori subgroup, and the congruence-intersection
//! identity behind the eigenvector bookkeeping.

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::residue::{PLevel, ResidueInt};
use crate::subgroup::{is_member, sample_member, SubgroupId, DEFAULT_SEED};
use rand::rngs::StdRng;
use rand::SeedableRng;

/// A right-coset transversal of `small` in `big` at a level, together with
/// the normal-form map big -> (rep index, h) with m = h * rep, h in small.
pub struct Transversal {
    pub big: SubgroupId,
    pub small: SubgroupId,
    pub level: PLevel,
    pub reps: Vec<Mat2>,
}

impl Transversal {
    /// Index of the coset of m, and the subgroup part h with m = h * rep.
    pub fn normal_form(&self, m: &Mat2) -> Result<(usize, Mat2)> {
        let idx = self.rep_index(m)?;
        let h = m.mul(&self.reps[idx].inverse()?)?;
        if !is_member(&h, self.small)? {
            return Err(Error::Internal(format!(
                "normal form failed: {:?} over {} in {}",
                m.entries(),
                self.small,
                self.big
            )));
        }
        Ok((idx, h))
    }

    fn rep_index(&self, m: &Mat2) -> Result<usize> {
        let level = self.level;
        let p = level.p;
        match (self.big, self.small) {
            // small = K0(p^i) inside big = K0(p^j), j <= i: reps are the
            // lower unipotents [1 0; p^j c 1], c in Z/p^{i-j}
            (SubgroupId::Iw, SubgroupId::K0(_))
            | (SubgroupId::K0(_), SubgroupId::K0(_))
            | (SubgroupId::Iw, SubgroupId::BZp)
            | (SubgroupId::K0(_), SubgroupId::BZp) => {
                let j = self.big.parameter().max(1);
                let pj = (0..j).fold(1u64, |acc, _| acc * p);
                // m = (a b; p^j c d); coset determined by c d^{-1} mod p^{i-j}
                let c = ResidueInt::new(m.c.value / pj, level);
                let cnt = self.reps.len() as u64;
                let idx = c.mul(&m.d.inv()?)?.value % cnt;
                Ok(idx as usize)
            }
            // small = K0+(p^i) inside Iw: reps are the upper unipotents
            (SubgroupId::Iw, SubgroupId::K0Plus(i)) => {
                // m = (a b; pc d): coset determined by b a^{-1} mod p^{i-1}
                let cnt = (0..i - 1).fold(1u64, |acc, _| acc * p);
                let idx = m.b.mul(&m.a.inv()?)?.value % cnt;
                Ok(idx as usize)
            }
            // small in {Iw, K0(p^i), BZp-at-level} inside big = K: reps are
            // indexed by points of P^1(Z/p^i): unipotent cell then the
            // complementary cell
            (SubgroupId::K, SubgroupId::Iw)
            | (SubgroupId::K, SubgroupId::K0(_))
            | (SubgroupId::K, SubgroupId::BZp) => {
                let i = match self.small {
                    SubgroupId::BZp => level.n,
                    s => s.parameter(),
                };
                let pi = (0..i).fold(1u64, |acc, _| acc * p);
                // bottom row (c, d) of m: cell by whether d is a unit
                if m.d.is_unit() {
                    Ok((m.c.mul(&m.d.inv()?)?.value % pi) as usize)
                } else {
                    // c must be a unit; index by (d/p) c^{-1} mod p^{i-1}
                    if !m.c.is_unit() {
                        return Err(Error::Internal(
                            "bottom row of a K-element is not primitive".into(),
                        ));
                    }
                    let dp = ResidueInt::new(m.d.value / p, level);
                    let off = dp.mul(&m.c.inv()?)?.value % (pi / p);
                    Ok(pi as usize + off as usize)
                }
            }
            _ => Err(Error::Domain(format!(
                "unsupported coset pair {} in {}",
                self.small, self.big
            ))),
        }
    }
}

/// Exact right-coset transversal of `small` in `big` mod p^N.
///
/// The transversal property (every element in exactly one coset) is checked
/// by construction: representatives are pairwise inequivalent and the
/// normal-form map lands every sampled element on its representative.
pub fn coset_reps(big: SubgroupId, small: SubgroupId, level: PLevel) -> Result<Transversal> {
    let big = big.normalize();
    let small = small.normalize();
    let p = level.p;
    let reps: Vec<Mat2> = match (big, small) {
        (SubgroupId::Iw, SubgroupId::K0(i)) | (SubgroupId::K0(1), SubgroupId::K0(i)) => {
            lower_unipotent_reps(level, 1, i)?
        }
        (SubgroupId::K0(j), SubgroupId::K0(i)) => lower_unipotent_reps(level, j, i)?,
        (SubgroupId::Iw, SubgroupId::BZp) => lower_unipotent_reps(level, 1, level.n)?,
        (SubgroupId::K0(j), SubgroupId::BZp) => lower_unipotent_reps(level, j, level.n)?,
        (SubgroupId::Iw, SubgroupId::K0Plus(i)) => {
            if i < 1 {
                return Err(Error::Domain("K0+ parameter must be >= 1".into()));
            }
            let cnt = (0..i - 1).fold(1u64, |acc, _| acc * p);
            (0..cnt).map(|b| Mat2::new(level, 1, b, 0, 1)).collect()
        }
        (SubgroupId::K, SubgroupId::Iw) => p1_reps(level, 1),
        (SubgroupId::K, SubgroupId::K0(i)) => p1_reps(level, i),
        (SubgroupId::K, SubgroupId::BZp) => p1_reps(level, level.n),
        _ => {
            return Err(Error::Domain(format!(
                "non-nested or unsupported pair: {small} in {big}"
            )))
        }
    };
    let t = Transversal {
        big,
        small,
        level,
        reps,
    };
    verify_transversal(&t)?;
    Ok(t)
}

fn lower_unipotent_reps(level: PLevel, j: u32, i: u32) -> Result<Vec<Mat2>> {
    if i < j {
        return Err(Error::Domain("non-nested coset pair".into()));
    }
    if level.n < i {
        return Err(Error::Level(format!(
            "coset transversal needs level >= {i}"
        )));
    }
    let p = level.p;
    let pj = (0..j).fold(1u64, |acc, _| acc * p);
    let cnt = (0..i - j).fold(1u64, |acc, _| acc * p);
    Ok((0..cnt)
        .map(|c| Mat2::new(level, 1, 0, pj * c, 1))
        .collect())
}

/// Representatives of P^1(Z/p^i): the p^i unipotent-cell points then the
/// p^{i-1} points of the complementary cell.
fn p1_reps(level: PLevel, i: u32) -> Vec<Mat2> {
    let p = level.p;
    let pi = (0..i).fold(1u64, |acc, _| acc * p);
    let mut reps: Vec<Mat2> = (0..pi).map(|c| Mat2::new(level, 1, 0, c, 1)).collect();
    // bottom rows (1, p c'): w = [0 -1; 1 p c']
    for c in 0..pi / p {
        reps.push(Mat2::from_i64(level, 0, -1, 1, (p * c) as i64));
    }
    reps
}

fn verify_transversal(t: &Transversal) -> Result<()> {
    // count matches the closed-form index
    let idx = t.small.order(t.level).and_then(|s| {
        let b = t.big.order(t.level)?;
        Ok(b / s)
    })?;
    if t.reps.len() as u64 != idx {
        return Err(Error::Internal(format!(
            "transversal size {} != index {idx} for {} in {}",
            t.reps.len(),
            t.small,
            t.big
        )));
    }
    // representatives pairwise inequivalent and fixed by their own normal form
    for (k, r) in t.reps.iter().enumerate() {
        if !is_member(r, t.big)? {
            return Err(Error::Internal("representative outside big group".into()));
        }
        let (k2, h) = t.normal_form(r)?;
        if k2 != k || h != Mat2::identity(t.level) {
            return Err(Error::Internal(format!(
                "representative {k} not its own normal form"
            )));
        }
    }
    // seeded sample: normal form reconstructs each element
    let mut rng = StdRng::seed_from_u64(DEFAULT_SEED);
    for _ in 0..64 {
        let m = sample_member(&mut rng, t.big, t.level)?;
        let (idx, h) = t.normal_form(&m)?;
        let back = h.mul(&t.reps[idx])?;
        if back != m {
            return Err(Error::Internal("normal form does not reconstruct".into()));
        }
    }
    Ok(())
}

/// One class of the double-coset partition of Iw mod p^{n+1}.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DoubleCosetClass {
    /// class index i in 1..=n+1, middle element [1 0; p^i 1]
    pub i: u32,
    pub size: u64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct DoubleCosetReport {
    pub p: u64,
    pub depth: u32,
    pub classes: Vec<DoubleCosetClass>,
    pub total: u64,
    pub group_order: u64,
}

/// Partition of Iw mod p^{n+1} into the classes
/// K0(p^{n+1}) [1 0; p^i 1] B(Zp), i = 1..n+1.
///
/// Exhaustive: every Iwahori-shape matrix mod p^{n+1} is assigned the class
/// i = min(v_p(lower-left), n+1); the assignment is verified by an explicit
/// factorization k * mid * b and by checking that the factored form pins the
/// valuation (so the classes are disjoint), and the class sizes must sum to
/// the group order.
pub fn double_coset_decomp(p: u64, n: u32) -> Result<DoubleCosetReport> {
    let level = PLevel::new(p, n + 1)?;
    let m = level.modulus();
    let order = SubgroupId::Iw.order(level)?;
    let mut sizes = vec![0u64; (n + 1) as usize];
    // scan Iwahori shapes only: a, d units; b free; lower-left = p*c
    for a in (1..m).filter(|x| x % p != 0) {
        for d in (1..m).filter(|x| x % p != 0) {
            for b in 0..m {
                for c0 in 0..m / p {
                    let mat = Mat2::new(level, a, b, p * c0, d);
                    let i = class_of(&mat, n);
                    verify_class_factorization(&mat, i, n)?;
                    sizes[(i - 1) as usize] += 1;
                }
            }
        }
    }
    let total: u64 = sizes.iter().sum();
    if total != order {
        return Err(Error::violation(
            "double-coset-partition",
            format!("class sizes sum to {total}, group order {order}"),
        ));
    }
    Ok(DoubleCosetReport {
        p,
        depth: n,
        classes: sizes
            .iter()
            .enumerate()
            .map(|(k, &size)| DoubleCosetClass {
                i: k as u32 + 1,
                size,
            })
            .collect(),
        total,
        group_order: order,
    })
}

fn class_of(m: &Mat2, n: u32) -> u32 {
    m.c.valuation().min(n + 1)
}

/// Verify m = k * [1 0; p^i 1] * b with k in K0(p^{n+1}), b in B(Zp), and
/// that the product shape forces v_p(lower-left) = i (disjointness).
fn verify_class_factorization(m: &Mat2, i: u32, n: u32) -> Result<()> {
    let level = m.level();
    let p = level.p;
    let pi = (0..i.min(level.n)).fold(1u64, |acc, _| acc * p);
    if i == n + 1 {
        // class of the identity double coset: m itself must be in K0(p^{n+1})
        if !is_member(m, SubgroupId::K0(n + 1))? {
            return Err(Error::violation(
                "double-coset-partition",
                format!("matrix {:?} assigned to identity class", m.entries()),
            ));
        }
        return Ok(());
    }
    // m = (a b; u p^i d) with u a unit:
    // (a b; u p^i d) = diag(1, u a^{-1}) [1 0; p^i 1] (a b; 0 u^{-1}(ad - b u p^i))
    let u = ResidueInt::new(m.c.value / pi, level);
    if !u.is_unit() {
        return Err(Error::Internal("class index does not match valuation".into()));
    }
    let a_inv = m.a.inv()?;
    let k = Mat2::new(level, 1, 0, 0, u.mul(&a_inv)?.value);
    let mid = Mat2::new(level, 1, 0, pi, 1);
    let last_d = u
        .inv()?
        .mul(&m.a.mul(&m.d)?.sub(&m.b.mul(&u.mul(&ResidueInt::new(pi, level))?)?)?)?;
    let b = Mat2::new(level, m.a.value, m.b.value, 0, last_d.value);
    if !is_member(&k, SubgroupId::K0(n + 1))? || !is_member(&b, SubgroupId::BZp)? {
        return Err(Error::Internal("factor shapes wrong".into()));
    }
    let prod = k.mul(&mid)?.mul(&b)?;
    if prod != *m {
        return Err(Error::violation(
            "double-coset-partition",
            format!("factorization failed for {:?}", m.entries()),
        ));
    }
    // disjointness: in k*mid*b the lower-left entry is p^i * (unit), so the
    // valuation of the lower-left pins i uniquely
    if prod.c.valuation() != i {
        return Err(Error::violation(
            "double-coset-partition",
            format!("valuation invariant violated for {:?}", m.entries()),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IntersectionReport {
    pub p: u64,
    pub n: u32,
    pub exhaustive: bool,
    pub elements_checked: u64,
}

/// Verify K ∩ diag(1, p^n) Iw B(Qp) = K0(p^{n+1}).
///
/// Membership of m in the left side is decided through the first-column
/// flag: m lies in diag(1,p^n) Iw B(Qp) iff its first column is, up to a
/// scalar in Qp^*, of the form (unit, p^{n+1} * anything). For members a
/// witness (w, b) with m * diag(1,p^n) = diag(1,p^n) * w * (integral part
/// of b) is checked by exact integral multiplication at level p^{2n+1}.
/// Exhaustive over K mod p^{n+1} for n <= 1; seeded random sample beyond.
pub fn intersection_identity_check(p: u64, n: u32) -> Result<IntersectionReport> {
    let scan_level = PLevel::new(p, n + 1)?;
    let work_level = PLevel::new(p, 2 * n + 2)?;
    let m_mod = scan_level.modulus();
    let exhaustive = n <= 1 && p <= 7;
    let mut count = 0u64;

    let mut check = |mat: &Mat2| -> Result<()> {
        count += 1;
        let in_k0 = is_member(mat, SubgroupId::K0(n + 1))?;
        // flag test on the first column
        let in_lhs = mat.a.is_unit() && mat.c.valuation() >= n + 1;
        if in_k0 != in_lhs {
            return Err(Error::violation(
                "congruence-intersection",
                format!("flag test disagreement at {:?}", mat.entries()),
            ));
        }
        if in_lhs {
            // lift to the working level and verify the displayed identity
            // (a b; p^{n+1} c d) = diag(1,p^n) (a p^n b; p c d) diag(1, p^-n)
            // in its integral form m * diag(1,p^n) = diag(1,p^n) * w.
            let e = mat.entries();
            let lift = Mat2::new(work_level, e[0], e[1], e[2], e[3]);
            let pn = (0..n).fold(1u64, |acc, _| acc * p);
            let w = Mat2::new(
                work_level,
                e[0],
                (pn as u128 * e[1] as u128 % work_level.modulus() as u128) as u64,
                e[2] / pn,
                e[3],
            );
            if !is_member(&w.reduce_to(n + 1)?, SubgroupId::Iw)? {
                return Err(Error::violation(
                    "congruence-intersection",
                    format!("witness not Iwahori at {:?}", mat.entries()),
                ));
            }
            let dn = Mat2::new(work_level, 1, 0, 0, pn);
            let lhs = lift.mul(&dn)?;
            let rhs = dn.mul(&w)?;
            // equality mod p^{n+1+n} suffices: both sides are the canonical
            // lifts composed with diag(1,p^n)
            let l = lhs.reduce_to(2 * n + 1)?;
            let r = rhs.reduce_to(2 * n + 1)?;
            if l != r {
                return Err(Error::violation(
                    "congruence-intersection",
                    format!("witness identity failed at {:?}", mat.entries()),
                ));
            }
        }
        Ok(())
    };

    if exhaustive {
        for a in 0..m_mod {
            for b in 0..m_mod {
                for c in 0..m_mod {
                    for d in 0..m_mod {
                        let mat = Mat2::new(scan_level, a, b, c, d);
                        if mat.is_unit() {
                            check(&mat)?;
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = StdRng::seed_from_u64(DEFAULT_SEED);
        // both directions: generic K elements, then elements of K0(p^{n+1})
        for _ in 0..100_000 {
            let mat = sample_member(&mut rng, SubgroupId::K, scan_level)?;
            check(&mat)?;
        }
        for _ in 0..100_000 {
            let mat = sample_member(&mut rng, SubgroupId::K0(n + 1), scan_level)?;
            check(&mat)?;
        }
    }
    Ok(IntersectionReport {
        p,
        n,
        exhaustive,
        elements_checked: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(p: u64, n: u32) -> PLevel {
        PLevel::new(p, n).unwrap()
    }

    #[test]
    fn transversal_sizes() {
        // Iw / K0(p^2) at p=5: 5 reps
        let t = coset_reps(SubgroupId::Iw, SubgroupId::K0(2), lv(5, 2)).unwrap();
        assert_eq!(t.reps.len(), 5);
        // K / B(Zp) at level 1: 6 reps
        let t = coset_reps(SubgroupId::K, SubgroupId::BZp, lv(5, 1)).unwrap();
        assert_eq!(t.reps.len(), 6);
        // K / Iw at level 1: 6 reps
        let t = coset_reps(SubgroupId::K, SubgroupId::Iw, lv(5, 1)).unwrap();
        assert_eq!(t.reps.len(), 6);
    }

    #[test]
    fn transversal_is_exact_partition_small() {
        // exhaustive check at level 1: every element of K lands on exactly
        // one representative
        let level = lv(5, 1);
        let t = coset_reps(SubgroupId::K, SubgroupId::Iw, level).unwrap();
        let mut counts = vec![0u64; t.reps.len()];
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    for d in 0..5 {
                        let m = Mat2::new(level, a, b, c, d);
                        if m.is_unit() {
                            let (idx, h) = t.normal_form(&m).unwrap();
                            assert_eq!(h.mul(&t.reps[idx]).unwrap(), m);
                            counts[idx] += 1;
                        }
                    }
                }
            }
        }
        let each = SubgroupId::Iw.order(level).unwrap();
        assert!(counts.iter().all(|&c| c == each));
    }

    #[test]
    fn double_cosets_depth0() {
        let r = double_coset_decomp(5, 0).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.total, SubgroupId::Iw.order(lv(5, 1)).unwrap());
    }

    #[test]
    fn intersection_identity_depth0() {
        let r = intersection_identity_check(5, 0).unwrap();
        assert!(r.exhaustive);
    }
}
