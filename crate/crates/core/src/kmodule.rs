//! Finite-dimensional k-linear representations given by generator actions
//! of a certified congruence quotient, and the constructions between them:
//! symmetric-power weights, coset-function inductions, normalizer twists,
//! spun submodules and quotients.

use crate::charh::CharacterH;
use crate::cosets::{coset_reps, Transversal};
use crate::error::{Error, Result};
use crate::fp;
use crate::linalg::{spin_with, FpMat, Spin, Subspace};
use crate::mat2::Mat2;
use crate::residue::PLevel;
use crate::subgroup::{self, evaluate_word, SubgroupId, DEFAULT_SEED};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

/// A representation over k = F_p of (the image of) a congruence subgroup,
/// stored as one invertible matrix per canonical generator.
#[derive(Debug, Clone)]
pub struct KModule {
    pub p: u64,
    pub level: PLevel,
    pub group: SubgroupId,
    pub dim: usize,
    pub gen_names: Vec<String>,
    pub gens: Vec<Mat2>,
    pub mats: Vec<FpMat>,
    /// scalar by which the central element p acts (tree modules only)
    pub central_scalar: u64,
    pub basis_labels: Vec<String>,
    pub provenance: String,
}

impl KModule {
    pub fn new(
        level: PLevel,
        group: SubgroupId,
        gens: Vec<Mat2>,
        gen_names: Vec<String>,
        mats: Vec<FpMat>,
        provenance: impl Into<String>,
    ) -> Result<KModule> {
        let p = level.p;
        let dim = mats.first().map(|m| m.rows).unwrap_or(0);
        for m in &mats {
            if m.rows != dim || m.cols != dim {
                return Err(Error::Domain("action matrices must be square".into()));
            }
            if dim > 0 && m.inverse().is_none() {
                return Err(Error::Domain("action matrix not invertible".into()));
            }
        }
        if gens.len() != mats.len() || gens.len() != gen_names.len() {
            return Err(Error::Domain("generator/action count mismatch".into()));
        }
        Ok(KModule {
            p,
            level,
            group,
            dim,
            gen_names,
            gens,
            mats,
            central_scalar: 1,
            basis_labels: (0..dim).map(|i| format!("e{i}")).collect(),
            provenance: provenance.into(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim);
        self.basis_labels = labels;
        self
    }

    pub fn with_central_scalar(mut self, z: u64) -> Self {
        self.central_scalar = z % self.p;
        self
    }

    /// Action matrix of an arbitrary member of the group, through the
    /// constructive factorization into canonical generators.
    pub fn action_of(&self, m: &Mat2) -> Result<FpMat> {
        let m = if m.level() == self.level {
            *m
        } else {
            m.reduce_to(self.level.n)?
        };
        let word = subgroup::factor(&m, self.group)?;
        self.action_of_word(&word)
    }

    fn action_of_word(&self, word: &subgroup::Word) -> Result<FpMat> {
        let mut acc = FpMat::identity(self.p, self.dim);
        for &(idx, e) in word {
            let base = if e >= 0 {
                self.mats[idx].clone()
            } else {
                self.mats[idx]
                    .inverse()
                    .ok_or_else(|| Error::Internal("action not invertible".into()))?
            };
            let mut pw = FpMat::identity(self.p, self.dim);
            let mut b = base;
            let mut k = e.unsigned_abs();
            while k > 0 {
                if k & 1 == 1 {
                    pw = pw.matmul(&b);
                }
                b = b.matmul(&b);
                k >>= 1;
            }
            acc = acc.matmul(&pw);
        }
        Ok(acc)
    }

    /// Homomorphism-property fuzzing: for seeded random group elements
    /// m1, m2 check action(m1 m2) = action(m1) action(m2). Since each side
    /// goes through an independent factorization word, equal group elements
    /// with different words must act identically for this to pass.
    pub fn certify_action(&self, trials: u32) -> Result<()> {
        let mut rng = StdRng::seed_from_u64(DEFAULT_SEED ^ 0xace);
        for _ in 0..trials {
            let m1 = subgroup::sample_member(&mut rng, self.group, self.level)?;
            let m2 = subgroup::sample_member(&mut rng, self.group, self.level)?;
            let lhs = self.action_of(&m1.mul(&m2)?)?;
            let rhs = self.action_of(&m1)?.matmul(&self.action_of(&m2)?);
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "action is not a homomorphism at {:?} * {:?}",
                    m1.entries(),
                    m2.entries()
                )));
            }
        }
        Ok(())
    }

    /// The same module viewed over a subgroup of its group (restriction).
    pub fn restrict_to(&self, sub: SubgroupId) -> Result<KModule> {
        let gens = subgroup::generators(sub, self.level)?;
        let mats = gens
            .elements
            .iter()
            .map(|g| self.action_of(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(KModule {
            p: self.p,
            level: self.level,
            group: sub,
            dim: self.dim,
            gen_names: gens.names.iter().map(|s| s.to_string()).collect(),
            gens: gens.elements,
            mats,
            central_scalar: self.central_scalar,
            basis_labels: self.basis_labels.clone(),
            provenance: format!("{}|res({sub})", self.provenance),
        })
    }

    /// The same module with its group viewed at a higher level (inflation
    /// along the reduction map).
    pub fn view_at_level(&self, n: u32) -> Result<KModule> {
        if n < self.level.n {
            return Err(Error::Level("cannot view at a lower level".into()));
        }
        if n == self.level.n {
            return Ok(self.clone());
        }
        let level = PLevel::new(self.p, n)?;
        let gens = subgroup::generators(self.group, level)?;
        let mats = gens
            .elements
            .iter()
            .map(|g| self.action_of(&g.reduce_to(self.level.n)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(KModule {
            p: self.p,
            level,
            group: self.group,
            dim: self.dim,
            gen_names: gens.names.iter().map(|s| s.to_string()).collect(),
            gens: gens.elements,
            mats,
            central_scalar: self.central_scalar,
            basis_labels: self.basis_labels.clone(),
            provenance: self.provenance.clone(),
        })
    }

    /// Direct sum.
    pub fn direct_sum(&self, o: &KModule) -> Result<KModule> {
        if self.group != o.group || self.level != o.level {
            return Err(Error::Domain("direct sum needs matching groups".into()));
        }
        let dim = self.dim + o.dim;
        let mut mats = Vec::new();
        for (a, b) in self.mats.iter().zip(o.mats.iter()) {
            let mut m = FpMat::zeros(self.p, dim, dim);
            for i in 0..a.rows {
                for j in 0..a.cols {
                    m[(i, j)] = a[(i, j)];
                }
            }
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(self.dim + i, self.dim + j)] = b[(i, j)];
                }
            }
            mats.push(m);
        }
        let mut labels = self.basis_labels.clone();
        labels.extend(o.basis_labels.iter().map(|l| format!("{l}'")));
        Ok(KModule {
            p: self.p,
            level: self.level,
            group: self.group,
            dim,
            gen_names: self.gen_names.clone(),
            gens: self.gens.clone(),
            mats,
            central_scalar: self.central_scalar,
            basis_labels: labels,
            provenance: format!("{}(+){}", self.provenance, o.provenance),
        })
    }

    /// Dual module (transpose-inverse action).
    pub fn dual(&self) -> KModule {
        let mats = self
            .mats
            .iter()
            .map(|m| m.inverse().expect("invertible").transpose())
            .collect();
        KModule {
            p: self.p,
            level: self.level,
            group: self.group,
            dim: self.dim,
            gen_names: self.gen_names.clone(),
            gens: self.gens.clone(),
            mats,
            central_scalar: fp::inv(self.p, self.central_scalar.max(1)).unwrap_or(1),
            basis_labels: self.basis_labels.clone(),
            provenance: format!("{}^dual", self.provenance),
        }
    }
}

/// Matrix of the symmetric-power action Sym^r x det^s of a mod-p matrix on
/// the monomial basis x^i y^{r-i} (index = exponent of x):
/// (a b; c d) . x^i y^{r-i} = (ax+cy)^i (bx+dy)^{r-i} * det^s.
pub fn sym_power_matrix(p: u64, mbar: [u64; 4], r: u64, s: u64) -> FpMat {
    let [a, b, c, d] = mbar.map(|v| v % p);
    let det = fp::sub(p, fp::mul(p, a, d), fp::mul(p, b, c));
    let dets = fp::pow(p, det, s);
    let n = (r + 1) as usize;
    let mut out = FpMat::zeros(p, n, n);
    // binomial table
    let mut binom = vec![vec![0u64; n]; n];
    for i in 0..n {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = fp::add(p, binom[i - 1][j - 1], *binom[i - 1].get(j).unwrap_or(&0));
        }
    }
    for i in 0..n {
        // (ax + cy)^i: coefficient of x^u y^{i-u} is C(i,u) a^u c^{i-u}
        // (bx + dy)^{r-i}: coefficient of x^v y^{r-i-v} is C(r-i,v) b^v d^{r-i-v}
        let ri = (r as usize) - i;
        for u in 0..=i {
            let cu = fp::mul(
                p,
                binom[i][u],
                fp::mul(p, fp::pow(p, a, u as u64), fp::pow(p, c, (i - u) as u64)),
            );
            if cu == 0 {
                continue;
            }
            for v in 0..=ri {
                let cv = fp::mul(
                    p,
                    binom[ri][v],
                    fp::mul(p, fp::pow(p, b, v as u64), fp::pow(p, d, (ri - v) as u64)),
                );
                if cv == 0 {
                    continue;
                }
                let row = u + v;
                out[(row, i)] = fp::add(p, out[(row, i)], fp::mul(p, fp::mul(p, cu, cv), dets));
            }
        }
    }
    out
}

/// The irreducible weight Sym^r k^2 x det^s as a module over K at level 1.
pub fn serre_weight(p: u64, r: u64, s: u64) -> Result<KModule> {
    if r > p - 1 || s > p - 2 {
        return Err(Error::Domain(format!(
            "weight out of range: r={r}, s={s} for p={p}"
        )));
    }
    symmetric_power_module(p, r, s)
}

/// Sym^r x det^s for any r >= 0 (reducible when r > p-1), over K at level 1.
pub fn symmetric_power_module(p: u64, r: u64, s: u64) -> Result<KModule> {
    let level = PLevel::new(p, 1)?;
    let gens = subgroup::generators(SubgroupId::K, level)?;
    let mats = gens
        .elements
        .iter()
        .map(|g| sym_power_matrix(p, g.mod_p(), r, s))
        .collect::<Vec<_>>();
    let labels = (0..=r).map(|i| format!("x^{i}y^{}", r - i)).collect();
    KModule::new(
        level,
        SubgroupId::K,
        gens.elements,
        gens.names.iter().map(|s| s.to_string()).collect(),
        mats,
        format!("sym{r}det{s}"),
    )
    .map(|m| m.with_labels(labels))
}

/// What is being induced: a torus character inflated to the small subgroup,
/// or a module over the small subgroup.
pub enum InductionDatum<'a> {
    Character(&'a CharacterH),
    Module(&'a KModule),
}

impl<'a> InductionDatum<'a> {
    fn dim(&self) -> usize {
        match self {
            InductionDatum::Character(_) => 1,
            InductionDatum::Module(m) => m.dim,
        }
    }

    fn action(&self, h: &Mat2, p: u64) -> Result<FpMat> {
        match self {
            InductionDatum::Character(chi) => {
                let mut m = FpMat::zeros(p, 1, 1);
                m[(0, 0)] = chi.eval(h)?;
                Ok(m)
            }
            InductionDatum::Module(md) => md.action_of(h),
        }
    }
}

/// Coset-function model of the induction of `datum` from `small` to `big`
/// at the given level. Basis: (coset representative, datum basis vector),
/// ordered lexicographically along the transversal.
pub fn induce(
    datum: InductionDatum<'_>,
    small: SubgroupId,
    big: SubgroupId,
    level: PLevel,
) -> Result<KModule> {
    let p = level.p;
    let trans = coset_reps(big, small, level)?;
    let inner = datum.dim();
    let dim = trans.reps.len() * inner;
    let gens = subgroup::generators(big, level)?;
    let mut mats = Vec::with_capacity(gens.elements.len());
    for g in &gens.elements {
        mats.push(induction_matrix(&trans, &datum, g, inner, dim, p)?);
    }
    if let InductionDatum::Module(md) = &datum {
        if md.group != small {
            return Err(Error::Domain(
                "induction datum must live over the small subgroup".into(),
            ));
        }
    }
    let labels = (0..trans.reps.len())
        .flat_map(|c| (0..inner).map(move |j| format!("c{c}w{j}")))
        .collect();
    KModule::new(
        level,
        big,
        gens.elements,
        gens.names.iter().map(|s| s.to_string()).collect(),
        mats,
        format!("ind[{small}->{big}]"),
    )
    .map(|m| m.with_labels(labels))
}

/// One generator's matrix on the coset-function model: for each coset rep
/// r_d, write r_d g = h r_{d'} and place datum(h) in block (d, d').
fn induction_matrix(
    trans: &Transversal,
    datum: &InductionDatum<'_>,
    g: &Mat2,
    inner: usize,
    dim: usize,
    p: u64,
) -> Result<FpMat> {
    let mut out = FpMat::zeros(p, dim, dim);
    for (d, rep) in trans.reps.iter().enumerate() {
        let (dprime, h) = trans.normal_form(&rep.mul(g)?)?;
        let block = datum.action(&h, p)?;
        for i in 0..inner {
            for j in 0..inner {
                out[(d * inner + i, dprime * inner + j)] = block[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Conjugation by Pi = [0 1; p 0] on the coordinates (a, b, pc', d):
/// exact on the canonical generators (their entries are exact lifts).
pub fn pi_conjugate_exact(g: &Mat2) -> Result<Mat2> {
    let level = g.level();
    let p = level.p;
    let e = g.entries();
    if e[2] % p != 0 {
        return Err(Error::Domain(
            "Pi-conjugation needs p | lower-left entry".into(),
        ));
    }
    Ok(Mat2::new(
        level,
        e[3],
        e[2] / p,
        (e[1] as u128 * p as u128 % level.modulus() as u128) as u64,
        e[0],
    ))
}

/// Twist of a module by conjugation with Pi: same space, action precomposed
/// with m -> Pi m Pi^{-1}. Iw-modules stay Iw-modules; K0(p^i) swaps with
/// its Pi-conjugate.
pub fn twist_by_pi(m: &KModule) -> Result<KModule> {
    let new_group = match m.group {
        SubgroupId::Iw | SubgroupId::Iw1 | SubgroupId::H => m.group,
        SubgroupId::K0(i) => SubgroupId::K0Plus(i).normalize(),
        SubgroupId::K0Plus(i) => SubgroupId::K0(i).normalize(),
        other => {
            return Err(Error::Domain(format!(
                "{other} is not normalized by Pi"
            )))
        }
    };
    let gens = subgroup::generators(new_group, m.level)?;
    let mats = gens
        .elements
        .iter()
        .map(|g| m.action_of(&pi_conjugate_exact(g)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(KModule {
        p: m.p,
        level: m.level,
        group: new_group,
        dim: m.dim,
        gen_names: gens.names.iter().map(|s| s.to_string()).collect(),
        gens: gens.elements,
        mats,
        central_scalar: m.central_scalar,
        basis_labels: m.basis_labels.clone(),
        provenance: format!("{}^+", m.provenance),
    })
}

/// A linear map intertwining two modules over the same group.
#[derive(Debug, Clone)]
pub struct ModuleMap {
    pub matrix: FpMat,
}

impl ModuleMap {
    pub fn verify(&self, source: &KModule, target: &KModule) -> Result<()> {
        if source.group != target.group || source.level != target.level {
            return Err(Error::Domain("module map across different groups".into()));
        }
        for (a, b) in source.mats.iter().zip(target.mats.iter()) {
            if self.matrix.matmul(a) != b.matmul(&self.matrix) {
                return Err(Error::Domain("map does not intertwine".into()));
            }
        }
        Ok(())
    }
}

/// Smallest generator-stable subspace containing the given vectors.
pub fn spin_submodule(m: &KModule, vectors: &[Vec<u64>]) -> Spin {
    let ops: Vec<&FpMat> = m.mats.iter().collect();
    crate::linalg::spin(m.p, m.dim, vectors, &ops)
}

/// Same closure but also under the inverse actions (needed when a generator
/// has huge order and orbits would be one-sided). Generator matrices are
/// invertible so the forward closure is already a submodule for finite
/// groups; this variant exists for emphasis in proofs of stability.
pub fn spin_submodule_sym(m: &KModule, vectors: &[Vec<u64>]) -> Spin {
    let mut ops: Vec<FpMat> = m.mats.clone();
    ops.extend(m.mats.iter().map(|a| a.inverse().expect("invertible")));
    let refs: Vec<&FpMat> = ops.iter().collect();
    crate::linalg::spin(m.p, m.dim, vectors, &refs)
}

/// The module induced on a generator-stable subspace, with the inclusion map.
pub fn submodule(m: &KModule, space: &Subspace) -> Result<(KModule, ModuleMap)> {
    let d = space.dim();
    let basis = space.basis_rows();
    let mut mats = Vec::new();
    for a in &m.mats {
        let mut mat = FpMat::zeros(m.p, d, d);
        for (k, v) in basis.iter().enumerate() {
            let img = a.apply(v);
            let coords = space
                .coordinates(&img)
                .ok_or_else(|| Error::Domain("subspace is not generator-stable".into()))?;
            for (i, c) in coords.iter().enumerate() {
                mat[(i, k)] = *c;
            }
        }
        mats.push(mat);
    }
    let inclusion = {
        let mut inc = FpMat::zeros(m.p, m.dim, d);
        for (k, v) in basis.iter().enumerate() {
            for i in 0..m.dim {
                inc[(i, k)] = v[i];
            }
        }
        ModuleMap { matrix: inc }
    };
    let sub = KModule {
        p: m.p,
        level: m.level,
        group: m.group,
        dim: d,
        gen_names: m.gen_names.clone(),
        gens: m.gens.clone(),
        mats,
        central_scalar: m.central_scalar,
        basis_labels: (0..d).map(|i| format!("s{i}")).collect(),
        provenance: format!("{}|sub", m.provenance),
    };
    Ok((sub, inclusion))
}

/// Quotient by a generator-stable subspace, with the canonical surjection.
/// Quotient coordinates are the non-pivot coordinates of the reduction.
pub fn quotient(m: &KModule, space: &Subspace) -> Result<(KModule, ModuleMap)> {
    let p = m.p;
    let pivots: Vec<usize> = {
        let mat = space.to_matrix();
        let mut mm = mat.clone();
        mm.rref()
    };
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..m.dim).filter(|j| !pivot_set.contains(j)).collect();
    let d = free.len();
    // surjection: v -> residual of v restricted to free coordinates
    let project = |v: &[u64]| -> Vec<u64> {
        let r = space.reduce(v.to_vec());
        free.iter().map(|&j| r[j]).collect()
    };
    let mut proj = FpMat::zeros(p, d, m.dim);
    for j in 0..m.dim {
        let mut e = vec![0u64; m.dim];
        e[j] = 1;
        let col = project(&e);
        for i in 0..d {
            proj[(i, j)] = col[i];
        }
    }
    let mut mats = Vec::new();
    for a in &m.mats {
        // action on quotient basis e_{free[k]}
        let mut mat = FpMat::zeros(p, d, d);
        for (k, &j) in free.iter().enumerate() {
            let img = a.col(j);
            let q = project(&img);
            for i in 0..d {
                mat[(i, k)] = q[i];
            }
        }
        mats.push(mat);
    }
    // verify stability: generator images of the subspace stay inside
    for a in &m.mats {
        for v in space.basis_rows() {
            if !space.contains(&a.apply(v)) {
                return Err(Error::Domain("subspace not stable, no quotient".into()));
            }
        }
    }
    let qm = KModule {
        p,
        level: m.level,
        group: m.group,
        dim: d,
        gen_names: m.gen_names.clone(),
        gens: m.gens.clone(),
        mats,
        central_scalar: m.central_scalar,
        basis_labels: free.iter().map(|j| format!("q{j}")).collect(),
        provenance: format!("{}|quot", m.provenance),
    };
    Ok((qm, ModuleMap { matrix: proj }))
}

/// The inclusion sigma_r x det -> Sym^{p+1+r}:
/// x^{r-i} y^i -> X^{p+r-i} Y^{i+1} - X^{r+1-i} Y^{p+i}, verified K-linear
/// and injective.
pub fn weight_inclusion(p: u64, r: u64) -> Result<(KModule, KModule, ModuleMap)> {
    if r < 1 || r > p - 4 {
        return Err(Error::Domain(format!("need 1 <= r <= p-4, got r={r}")));
    }
    let source = serre_weight(p, r, 1)?;
    let target = symmetric_power_module(p, p + 1 + r, 0)?;
    let big = (p + 1 + r + 1) as usize;
    let mut mat = FpMat::zeros(p, big, (r + 1) as usize);
    for i in 0..=r {
        // source basis index = exponent of x = r - i
        let col = (r - i) as usize;
        mat[((p + r - i) as usize, col)] = 1;
        mat[((r + 1 - i) as usize, col)] = p - 1;
    }
    let map = ModuleMap { matrix: mat };
    map.verify(&source, &target)
        .map_err(|_| Error::violation("weight-inclusion", "map is not K-linear"))?;
    if map.matrix.rank() != (r + 1) as usize {
        return Err(Error::violation("weight-inclusion", "map not injective"));
    }
    Ok((source, target, map))
}

/// Versioned JSON document for a KModule; round-trips bit-exactly.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct KModuleDoc {
    pub schema_version: u32,
    pub prime: u64,
    pub level: u32,
    pub group: SubgroupId,
    pub dim: usize,
    pub gen_names: Vec<String>,
    pub gen_entries: Vec<[u64; 4]>,
    pub matrices: Vec<Vec<u64>>,
    pub central_scalar: u64,
    pub basis_labels: Vec<String>,
    pub provenance: String,
}

impl KModule {
    pub fn to_doc(&self) -> KModuleDoc {
        KModuleDoc {
            schema_version: 1,
            prime: self.p,
            level: self.level.n,
            group: self.group,
            dim: self.dim,
            gen_names: self.gen_names.clone(),
            gen_entries: self.gens.iter().map(|g| g.entries()).collect(),
            matrices: self.mats.iter().map(|m| m.data.clone()).collect(),
            central_scalar: self.central_scalar,
            basis_labels: self.basis_labels.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_doc(doc: &KModuleDoc) -> Result<KModule> {
        if doc.schema_version != 1 {
            return Err(Error::Config(format!(
                "unsupported schema version {}",
                doc.schema_version
            )));
        }
        let level = PLevel::new(doc.prime, doc.level)?;
        let gens: Vec<Mat2> = doc
            .gen_entries
            .iter()
            .map(|e| Mat2::new(level, e[0], e[1], e[2], e[3]))
            .collect();
        let mats: Vec<FpMat> = doc
            .matrices
            .iter()
            .map(|d| FpMat {
                p: doc.prime,
                rows: doc.dim,
                cols: doc.dim,
                data: d.clone(),
            })
            .collect();
        KModule::new(
            level,
            doc.group,
            gens,
            doc.gen_names.clone(),
            mats,
            doc.provenance.clone(),
        )
        .map(|m| {
            m.with_labels(doc.basis_labels.clone())
                .with_central_scalar(doc.central_scalar)
        })
    }
}

/// Seeded random vector helper used by several property checks.
pub fn random_vector(rng: &mut StdRng, p: u64, dim: usize) -> Vec<u64> {
    (0..dim).map(|_| rng.gen_range(0..p)).collect()
}

/// Run a closure-based spin directly from matrices (convenience).
pub fn spin_space(p: u64, dim: usize, seeds: &[Vec<u64>], mats: &[FpMat]) -> Spin {
    spin_with(p, dim, seeds, mats.len(), |op, v| mats[op].apply(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serre_weight_action_example() {
        // r=1, s=0, p=5: [1 1; 0 1] acts by x -> x, y -> x + y
        let w = serre_weight(5, 1, 0).unwrap();
        let level = w.level;
        let u = Mat2::new(level, 1, 1, 0, 1);
        let a = w.action_of(&u).unwrap();
        // basis: index 0 = y, index 1 = x
        // y = x^0 y^1 -> (bx + dy)^1 = x + y; x -> (ax+cy) = x
        assert_eq!(a.col(0), vec![1, 1]);
        assert_eq!(a.col(1), vec![0, 1]);
    }

    #[test]
    fn serre_weight_dims_and_range() {
        assert_eq!(serre_weight(5, 0, 0).unwrap().dim, 1);
        assert_eq!(serre_weight(5, 4, 3).unwrap().dim, 5);
        assert!(serre_weight(5, 5, 0).is_err());
        assert!(serre_weight(5, 1, 4).is_err());
    }

    #[test]
    fn induction_dimension_and_identity_case() {
        let p = 5;
        let level = PLevel::new(p, 2).unwrap();
        let chi = CharacterH::new(p, 1, 0);
        // K0(p^2) -> Iw: dim p
        let m = induce(InductionDatum::Character(&chi), SubgroupId::K0(2), SubgroupId::Iw, level)
            .unwrap();
        assert_eq!(m.dim, 5);
        m.certify_action(16).unwrap();
        // Iw -> K of chi at level 1: dim p + 1
        let level1 = PLevel::new(p, 1).unwrap();
        let m2 = induce(
            InductionDatum::Character(&chi),
            SubgroupId::Iw,
            SubgroupId::K,
            level1,
        )
        .unwrap();
        assert_eq!(m2.dim, 6);
        m2.certify_action(16).unwrap();
    }

    #[test]
    fn twist_of_character_swaps_exponents() {
        // Build the 1-dim module chi over Iw and twist: action table must
        // evaluate like the conjugate character.
        let p = 5;
        let level = PLevel::new(p, 2).unwrap();
        let chi = CharacterH::new(p, 1, 0);
        let gens = subgroup::generators(SubgroupId::Iw, level).unwrap();
        let mats = gens
            .elements
            .iter()
            .map(|g| {
                let mut m = FpMat::zeros(p, 1, 1);
                m[(0, 0)] = chi.eval(g).unwrap();
                m
            })
            .collect();
        let md = KModule::new(
            level,
            SubgroupId::Iw,
            gens.elements.clone(),
            gens.names.iter().map(|s| s.to_string()).collect(),
            mats,
            "chi(1,0)",
        )
        .unwrap();
        let tw = twist_by_pi(&md).unwrap();
        let conj = chi.conj();
        for (g, m) in tw.gens.iter().zip(tw.mats.iter()) {
            assert_eq!(m[(0, 0)], conj.eval(g).unwrap());
        }
        // double twist is the original action
        let tw2 = twist_by_pi(&tw).unwrap();
        for (g, m) in tw2.gens.iter().zip(tw2.mats.iter()) {
            assert_eq!(m[(0, 0)], chi.eval(g).unwrap());
        }
    }

    #[test]
    fn spin_of_highest_weight_is_everything() {
        // sigma_{r,s} is irreducible: spinning x^r under K gives all of it
        let w = serre_weight(5, 3, 1).unwrap();
        let mut seed = vec![0u64; w.dim];
        seed[w.dim - 1] = 1; // x^r
        let sp = spin_submodule(&w, &[seed]);
        assert_eq!(sp.dim(), w.dim);
        // spin of 0 is the zero module
        let z = spin_submodule(&w, &[vec![0; w.dim]]);
        assert_eq!(z.dim(), 0);
    }

    #[test]
    fn quotient_dimensions() {
        let w = serre_weight(5, 2, 0).unwrap();
        // M / 0 = M
        let zero = Subspace::new(5, w.dim);
        let (q, _) = quotient(&w, &zero).unwrap();
        assert_eq!(q.dim, w.dim);
        // M / M = 0
        let full = Subspace::from_rows(
            5,
            w.dim,
            (0..w.dim).map(|i| {
                let mut e = vec![0u64; w.dim];
                e[i] = 1;
                e
            }),
        );
        let (q, _) = quotient(&w, &full).unwrap();
        assert_eq!(q.dim, 0);
    }

    #[test]
    fn weight_inclusion_example() {
        // p=5, r=1: dims 2 -> 8, injective, K-linear (verified inside)
        let (src, tgt, map) = weight_inclusion(5, 1).unwrap();
        assert_eq!(src.dim, 2);
        assert_eq!(tgt.dim, 8);
        // image of x^r = X^{p+r} Y - X^{r+1} Y^p: column of x^1=index 1
        let col: Vec<u64> = (0..tgt.dim).map(|i| map.matrix[(i, 1)]).collect();
        let mut expect = vec![0u64; 8];
        expect[6] = 1; // X^{p+r} Y^{1}: index 6 = p+r
        expect[2] = 4; // -X^{r+1} Y^{p}: index 2 = r+1
        assert_eq!(col, expect);
    }

    #[test]
    fn serialization_roundtrip() {
        let w = serre_weight(5, 2, 1).unwrap();
        let doc = w.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let doc2: KModuleDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(doc, doc2);
        let w2 = KModule::from_doc(&doc2).unwrap();
        assert_eq!(w.mats, w2.mats);
        assert_eq!(w.gens, w2.gens);
    }
}
