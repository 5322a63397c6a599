//! Fixed data, seeds, and the mutation formulas.
//!
//! Coordinates: a vector of `N` is written in the initial basis `e_1..e_n`; a
//! vector of `M°` is written in the initial basis `f_1..f_n` of `M°`, so its
//! `j`-th coordinate is `<d_j e_j, m>`. The pairing is then
//! `<n, m> = sum_i n_i m_i / d_i`. A seed is the unimodular matrix whose
//! columns are its basis vectors.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{cokernel_invariants, smith_normal_form, IntegerMatrix, RationalMatrix};

/// The mutation-independent data: skew form, symmetrizers, frozen set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedData {
    skew: RationalMatrix,
    d: Vec<BigInt>,
    frozen: Vec<bool>,
}

impl FixedData {
    pub fn new(skew: RationalMatrix, d: Vec<BigInt>, frozen: &[usize]) -> Result<Self> {
        let n = skew.rows();
        if skew.cols() != n {
            return Err(Error::InvalidFixedData("skew form is not square".into()));
        }
        if !skew.is_skew_symmetric() {
            return Err(Error::InvalidFixedData("skew form is not skew-symmetric".into()));
        }
        if d.len() != n {
            return Err(Error::InvalidFixedData(format!(
                "expected {n} symmetrizers, got {}",
                d.len()
            )));
        }
        if d.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidFixedData("symmetrizers must be positive".into()));
        }
        if n > 0 && !d.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one() {
            return Err(Error::InvalidFixedData("gcd of the symmetrizers must be 1".into()));
        }
        let mut mask = vec![false; n];
        for &i in frozen {
            if i >= n {
                return Err(Error::IndexOutOfRange(i));
            }
            mask[i] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if mask[i] && mask[j] {
                    continue;
                }
                let e = skew.get(i, j) * BigRational::from_integer(d[j].clone());
                if !e.is_integer() {
                    return Err(Error::InvalidFixedData(format!(
                        "epsilon entry ({}, {}) = {e} is not an integer",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(FixedData {
            skew,
            d,
            frozen: mask,
        })
    }

    /// Fixed data realizing a given exchange matrix at the root: the skew form
    /// is `eps_ij / d_j`.
    pub fn from_epsilon(eps: &IntegerMatrix, d: Vec<BigInt>, frozen: &[usize]) -> Result<Self> {
        check_symmetrizable(eps, &d)?;
        let n = eps.rows();
        let mut skew = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                skew.set(
                    i,
                    j,
                    BigRational::new(eps.get(i, j).clone(), d[j].clone()),
                );
            }
        }
        Self::new(skew, d, frozen)
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn skew(&self) -> &RationalMatrix {
        &self.skew
    }

    pub fn d(&self) -> &[BigInt] {
        &self.d
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn frozen_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.frozen[i]).collect()
    }

    pub fn unfrozen_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| !self.frozen[i]).collect()
    }

    pub fn has_frozen(&self) -> bool {
        self.frozen.iter().any(|&f| f)
    }
}

/// Checks `d_i eps_ij = -d_j eps_ji` for all `i, j`.
pub fn check_symmetrizable(eps: &IntegerMatrix, d: &[BigInt]) -> Result<()> {
    let n = eps.rows();
    if eps.cols() != n || d.len() != n {
        return Err(Error::Dimension("epsilon must be n x n with n symmetrizers".into()));
    }
    if d.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidFixedData("symmetrizers must be positive".into()));
    }
    for i in 0..n {
        for j in i..n {
            if &d[i] * eps.get(i, j) != -(&d[j] * eps.get(j, i)) {
                return Err(Error::NotSymmetrizable);
            }
        }
    }
    Ok(())
}

/// Mutation of an exchange matrix at `k`.
pub fn mutate_epsilon(eps: &IntegerMatrix, d: &[BigInt], k: usize) -> Result<IntegerMatrix> {
    check_symmetrizable(eps, d)?;
    let n = eps.rows();
    if k >= n {
        return Err(Error::IndexOutOfRange(k));
    }
    let mut out = eps.clone();
    for i in 0..n {
        for j in 0..n {
            if i == k || j == k {
                out.set(i, j, -eps.get(i, j));
                continue;
            }
            let (a, b) = (eps.get(i, k), eps.get(k, j));
            if (a * b).is_positive() {
                out.set(i, j, eps.get(i, j) + a.abs() * b);
            }
        }
    }
    Ok(out)
}

fn positive_part(x: &BigInt) -> BigInt {
    if x.is_positive() {
        x.clone()
    } else {
        BigInt::zero()
    }
}

fn negative_part(x: &BigInt) -> BigInt {
    if x.is_negative() {
        x.clone()
    } else {
        BigInt::zero()
    }
}

fn rational_to_int(r: BigRational, what: &'static str) -> Result<BigInt> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(Error::Internal(format!("{what} is not integral: {r}")))
    }
}

/// A seed: a basis of `N` compatible with the fixed data.
#[derive(Clone, Debug)]
pub struct Seed {
    fixed: Arc<FixedData>,
    basis: IntegerMatrix,
    basis_inv: IntegerMatrix,
    path: Vec<usize>,
    epsilon_q: RationalMatrix,
    epsilon: IntegerMatrix,
}

impl PartialEq for Seed {
    fn eq(&self, other: &Self) -> bool {
        self.fixed == other.fixed && self.basis == other.basis
    }
}

impl Eq for Seed {}

impl Seed {
    pub fn root(fixed: Arc<FixedData>) -> Self {
        let n = fixed.rank();
        Self::build(fixed, IntegerMatrix::identity(n), IntegerMatrix::identity(n), Vec::new())
            .expect("identity basis is valid")
    }

    /// A seed with an explicit basis, checking every seed invariant.
    pub fn from_basis(fixed: Arc<FixedData>, basis: IntegerMatrix, path: Vec<usize>) -> Result<Self> {
        let n = fixed.rank();
        if basis.rows() != n || basis.cols() != n {
            return Err(Error::InvalidSeed(format!("basis must be {n}x{n}")));
        }
        let inv = basis
            .inverse_unimodular()
            .ok_or_else(|| Error::InvalidSeed("basis is not unimodular".into()))?;
        let unfrozen = fixed.unfrozen_indices();
        for &j in &unfrozen {
            for i in fixed.frozen_indices() {
                if !basis.get(i, j).is_zero() {
                    return Err(Error::InvalidSeed(format!(
                        "unfrozen basis vector {} leaves the unfrozen sublattice",
                        j + 1
                    )));
                }
            }
        }
        if !basis.select_rows(&unfrozen).select_columns(&unfrozen).is_unimodular() {
            return Err(Error::InvalidSeed(
                "unfrozen basis vectors do not span the unfrozen sublattice".into(),
            ));
        }
        // {d_i e_i} is a basis of N° iff D^-1 B D is integral (it is then unimodular).
        for i in 0..n {
            for j in 0..n {
                if !(basis.get(i, j) * &fixed.d[j]).is_multiple_of(&fixed.d[i]) {
                    return Err(Error::InvalidSeed(
                        "the vectors d_i e_i do not form a basis of N°".into(),
                    ));
                }
            }
        }
        Self::build(fixed, basis, inv, path)
    }

    fn build(
        fixed: Arc<FixedData>,
        basis: IntegerMatrix,
        basis_inv: IntegerMatrix,
        path: Vec<usize>,
    ) -> Result<Self> {
        let n = fixed.rank();
        let cur = current_skew(&fixed.skew, &basis);
        let mut epsilon_q = RationalMatrix::zeros(n, n);
        let mut epsilon = IntegerMatrix::zeros(n, n);
        let mut frozen_block_integral = true;
        for i in 0..n {
            for j in 0..n {
                let e = cur.get(i, j) * BigRational::from_integer(fixed.d[j].clone());
                if e.is_integer() {
                    epsilon.set(i, j, e.to_integer());
                } else if fixed.frozen[i] && fixed.frozen[j] {
                    frozen_block_integral = false;
                } else {
                    return Err(Error::InvalidFixedData(format!(
                        "epsilon entry ({}, {}) = {e} is not an integer",
                        i + 1,
                        j + 1
                    )));
                }
                epsilon_q.set(i, j, e);
            }
        }
        if !frozen_block_integral {
            // A rational frozen block is inert; the integer matrix carries zeros there.
            for i in fixed.frozen_indices() {
                for j in fixed.frozen_indices() {
                    epsilon.set(i, j, BigInt::zero());
                }
            }
        }
        Ok(Seed {
            fixed,
            basis,
            basis_inv,
            path,
            epsilon_q,
            epsilon,
        })
    }

    pub fn fixed(&self) -> &Arc<FixedData> {
        &self.fixed
    }

    pub fn rank(&self) -> usize {
        self.fixed.rank()
    }

    pub fn d(&self) -> &[BigInt] {
        &self.fixed.d
    }

    pub fn basis(&self) -> &IntegerMatrix {
        &self.basis
    }

    pub fn basis_inverse(&self) -> &IntegerMatrix {
        &self.basis_inv
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub fn unfrozen_indices(&self) -> Vec<usize> {
        self.fixed.unfrozen_indices()
    }

    /// `eps_ij = {e_i, e_j} d_j` in the current basis. Entries of the
    /// frozen-by-frozen block are zero when that block is not integral; see
    /// [`Seed::epsilon_rational`] for the exact values.
    pub fn epsilon(&self) -> &IntegerMatrix {
        &self.epsilon
    }

    pub fn epsilon_rational(&self) -> &RationalMatrix {
        &self.epsilon_q
    }

    /// Basis vector `e_i` in initial coordinates.
    pub fn e(&self, i: usize) -> Vec<BigInt> {
        self.basis.column(i)
    }

    /// `f_i = e_i^* / d_i` in initial `M°` coordinates.
    pub fn f(&self, i: usize) -> Vec<BigInt> {
        let d = &self.fixed.d;
        (0..self.rank())
            .map(|j| self.basis_inv.get(i, j) * &d[j] / &d[i])
            .collect()
    }

    /// `v_k = {e_k, .}` in initial `M°` coordinates.
    pub fn v(&self, k: usize) -> Result<Vec<BigInt>> {
        self.check_index(k)?;
        let n = self.rank();
        let s = &self.fixed.skew;
        (0..n)
            .map(|j| {
                let mut acc = BigRational::zero();
                for i in 0..n {
                    let b = self.basis.get(i, k);
                    if !b.is_zero() {
                        acc += s.get(i, j) * BigRational::from_integer(b.clone());
                    }
                }
                acc *= BigRational::from_integer(self.fixed.d[j].clone());
                if acc.is_integer() {
                    Ok(acc.to_integer())
                } else {
                    Err(Error::InvalidFixedData(format!(
                        "v_{} is not in M°",
                        k + 1
                    )))
                }
            })
            .collect()
    }

    /// Converts current `f`-coordinates of an element of `M°` to initial ones.
    pub fn m_from_current(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let n = self.rank();
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in self.f(i).into_iter().enumerate() {
                out[j] += c * o;
            }
        }
        out
    }

    /// `<n, m>` for `n` in `N` and `m` in `M°`, both in initial coordinates.
    pub fn pairing(&self, n: &[BigInt], m: &[BigInt]) -> BigRational {
        n.iter()
            .zip(m)
            .zip(&self.fixed.d)
            .map(|((a, b), d)| BigRational::new(a * b, d.clone()))
            .sum()
    }

    /// `<d_k e_k, m>`, an integer for `m` in `M°`.
    pub fn pairing_dk_ek(&self, k: usize, m: &[BigInt]) -> Result<BigInt> {
        let dk = &self.fixed.d[k];
        let n: Vec<BigInt> = self.e(k).into_iter().map(|x| x * dk).collect();
        rational_to_int(self.pairing(&n, m), "<d_k e_k, m>")
    }

    /// `{a, b}` for `a, b` in `N` (initial coordinates).
    pub fn skew_pair(&self, a: &[BigInt], b: &[BigInt]) -> BigRational {
        let s = &self.fixed.skew;
        let mut acc = BigRational::zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    acc += s.get(i, j) * BigRational::from_integer(x * y);
                }
            }
        }
        acc
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.rank() {
            Err(Error::IndexOutOfRange(k))
        } else {
            Ok(())
        }
    }

    fn check_unfrozen(&self, k: usize) -> Result<()> {
        self.check_index(k)?;
        if self.fixed.frozen[k] {
            Err(Error::FrozenIndex(k))
        } else {
            Ok(())
        }
    }

    /// Seed mutation: `e_k' = -e_k`, `e_i' = e_i + [eps_ik]_+ e_k`.
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        self.check_unfrozen(k)?;
        let n = self.rank();
        let mut basis = self.basis.clone();
        let ek = self.basis.column(k);
        for i in 0..n {
            if i == k {
                for (r, x) in ek.iter().enumerate() {
                    basis.set(r, k, -x);
                }
                continue;
            }
            let c = positive_part(self.epsilon.get(i, k));
            if c.is_zero() {
                continue;
            }
            for (r, x) in ek.iter().enumerate() {
                let v = basis.get(r, i) + &c * x;
                basis.set(r, i, v);
            }
        }
        // The inverse changes by the inverse elementary operations.
        let mut inv = self.basis_inv.clone();
        for j in 0..n {
            let mut row_k = inv.get(k, j).clone();
            for i in 0..n {
                if i != k {
                    let c = positive_part(self.epsilon.get(i, k));
                    if !c.is_zero() {
                        row_k -= c * self.basis_inv.get(i, j);
                    }
                }
            }
            inv.set(k, j, -row_k);
        }
        let mut path = self.path.clone();
        path.push(k);
        let seed = Self::build(self.fixed.clone(), basis, inv, path)?;
        debug_assert_eq!(
            &seed.basis * &seed.basis_inv,
            IntegerMatrix::identity(n)
        );
        Ok(seed)
    }

    /// Mutates along a path of indices.
    pub fn mutate_path(&self, path: &[usize]) -> Result<Seed> {
        let mut s = self.clone();
        for &k in path {
            s = s.mutate(k)?;
        }
        Ok(s)
    }

    /// `mu_k^t(n) = n + [{n, d_k e_k}]_+ e_k` on `N`.
    pub fn tropical_mutation_a(&self, k: usize, n: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_unfrozen(k)?;
        self.check_len(n)?;
        let dk = &self.fixed.d[k];
        let ek = self.e(k);
        let dkek: Vec<BigInt> = ek.iter().map(|x| x * dk).collect();
        let r = rational_to_int(self.skew_pair(n, &dkek), "{n, d_k e_k}")?;
        let c = positive_part(&r);
        Ok(n.iter().zip(&ek).map(|(a, b)| a + &c * b).collect())
    }

    /// `mu_k^t(m) = m + [<d_k e_k, m>]_- v_k` on `M°`.
    pub fn tropical_mutation_x(&self, k: usize, m: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_unfrozen(k)?;
        self.check_len(m)?;
        let c = negative_part(&self.pairing_dk_ek(k, m)?);
        let vk = self.v(k)?;
        Ok(m.iter().zip(&vk).map(|(a, b)| a + &c * b).collect())
    }

    fn check_len(&self, v: &[BigInt]) -> Result<()> {
        if v.len() != self.rank() {
            Err(Error::Dimension(format!(
                "vector of length {} for rank {}",
                v.len(),
                self.rank()
            )))
        } else {
            Ok(())
        }
    }

    /// Skew form in the current basis, `B^T S B`.
    pub fn current_skew(&self) -> RationalMatrix {
        current_skew(&self.fixed.skew, &self.basis)
    }
}

fn current_skew(skew: &RationalMatrix, basis: &IntegerMatrix) -> RationalMatrix {
    let b = basis.to_rational();
    b.transpose()
        .checked_mul(skew)
        .and_then(|x| x.checked_mul(&b))
        .expect("square matrices of equal size")
}

/// Checks that tropical mutation carries the fans of `s` to the fans of
/// `mu_k(s)`, including the sign flip on the `k`-th ray.
pub fn fan_mutation_consistency(s: &Seed, k: usize) -> Result<bool> {
    let t = s.mutate(k)?;
    let neg = |v: Vec<BigInt>| -> Vec<BigInt> { v.into_iter().map(|x| -x).collect() };
    for i in s.unfrozen_indices() {
        let image = s.tropical_mutation_a(k, &s.e(i))?;
        let expected = if i == k { neg(t.e(k)) } else { t.e(i) };
        if image != expected {
            return Ok(false);
        }
        let image = s.tropical_mutation_x(k, &neg(s.v(i)?))?;
        let expected = neg(t.v(i)?);
        let image = if i == k { neg(image) } else { image };
        if image != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A seed over the doubled lattice `N ⊕ M°` with principal coefficients.
#[derive(Clone, Debug)]
pub struct PrincipalSeed {
    pub seed: Seed,
}

/// The principal-coefficient double of `s`, built with `s` as the root.
///
/// The skew form on `N ⊕ M°` in the basis `(e_i, 0), (0, f_a)` is
/// `[[S, D^-1], [-D^-1, 0]]`, with symmetrizers `d` repeated and the second
/// copy frozen.
pub fn principal_double(s: &Seed) -> Result<PrincipalSeed> {
    let n = s.rank();
    let d = s.d();
    let cur = s.current_skew();
    let mut skew = RationalMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            skew.set(i, j, cur.get(i, j).clone());
        }
        let inv = BigRational::new(BigInt::one(), d[i].clone());
        skew.set(i, n + i, inv.clone());
        skew.set(n + i, i, -inv);
    }
    let mut dd = d.to_vec();
    dd.extend_from_slice(d);
    let mut frozen = s.fixed().frozen_indices();
    frozen.extend(n..2 * n);
    let fixed = FixedData::new(skew, dd, &frozen)?;
    Ok(PrincipalSeed {
        seed: Seed::root(Arc::new(fixed)),
    })
}

/// Matrix of `p^*: N -> M°` in the bases `(e_i)`, `(f_i)`: column `j` holds
/// the coordinates of `p^*(e_j)`, so entry `(i, j)` is `eps_ji`.
pub fn p_star_matrix(s: &Seed) -> Result<IntegerMatrix> {
    if s.fixed().has_frozen() {
        return Err(Error::Unsupported(
            "p* is only determined when there are no frozen variables".into(),
        ));
    }
    Ok(s.epsilon().transpose())
}

fn check_picard_assumptions(s: &Seed) -> Result<()> {
    if s.fixed().has_frozen() {
        return Err(Error::Assumption("there are no frozen variables".into()));
    }
    let eps = s.epsilon();
    if let Some(i) = (0..eps.rows()).find(|&i| eps.row(i).iter().all(Zero::is_zero)) {
        return Err(Error::Assumption(format!(
            "epsilon has no zero row (row {} is zero)",
            i + 1
        )));
    }
    Ok(())
}

/// Invariant factors of `coker(p^*)`, the Picard group.
pub fn picard_invariants(s: &Seed) -> Result<Vec<BigInt>> {
    check_picard_assumptions(s)?;
    Ok(cokernel_invariants(&p_star_matrix(s)?))
}

/// Class of the character `m` (current `f`-coordinates) in
/// `M° / p^*(N)`, written against the invariant factors returned by
/// [`picard_invariants`]: torsion coordinates reduced into `[0, s_i)`,
/// free coordinates as integers.
pub fn line_bundle_class(s: &Seed, m: &[BigInt]) -> Result<Vec<BigInt>> {
    check_picard_assumptions(s)?;
    let p = p_star_matrix(s)?;
    let snf = smith_normal_form(&p);
    let c = snf.u_inv.mul_vec(m)?;
    let diag = snf.diagonal();
    let mut out = Vec::new();
    for (i, ci) in c.into_iter().enumerate() {
        if i < snf.rank {
            if !diag[i].is_one() {
                out.push(ci.mod_floor(&diag[i]));
            }
        } else {
            out.push(ci);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardReport {
    pub invariants: Vec<BigInt>,
    pub torsion_free: bool,
    pub factoriality: String,
}

pub fn picard_report(s: &Seed) -> Result<PicardReport> {
    let invariants = picard_invariants(s)?;
    let torsion_free = invariants.iter().all(Zero::is_zero);
    let factoriality = if torsion_free {
        "implied by torsion-free Picard group"
    } else {
        "not guaranteed"
    };
    Ok(PicardReport {
        invariants,
        torsion_free,
        factoriality: factoriality.into(),
    })
}

/// Splits a nonzero integer vector into its divisibility index and the
/// primitive vector with first nonzero entry positive, plus the sign.
fn primitive_direction(v: &[BigInt]) -> Option<(Vec<BigInt>, BigInt)> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return None;
    }
    let lead_neg = v.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative);
    let g = if lead_neg { -g } else { g };
    Some((v.iter().map(|x| x / &g).collect(), g))
}

/// gcd over `Q` of `1 + t^a` and `1 + t^b`, as coefficients from degree 0.
fn binomial_gcd(a: usize, b: usize) -> Vec<BigRational> {
    let poly = |e: usize| {
        let mut p = vec![BigRational::zero(); e + 1];
        p[0] = BigRational::one();
        p[e] += BigRational::one();
        p
    };
    let (mut x, mut y) = (poly(a), poly(b));
    while !(y.len() == 1 && y[0].is_zero()) && !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let c = &r[dr] / &lead;
        for (i, bi) in b.iter().enumerate() {
            let v = &c * bi;
            r[dr - db + i] -= v;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    if r.is_empty() {
        vec![BigRational::zero()]
    } else {
        r
    }
}

/// Whether the exchange polynomials at unfrozen indices are pairwise coprime.
///
/// `P_k` is `1 + z^{v_k}` up to a monomial. Two such binomials share a factor
/// only if `v_k, v_l` are proportional, `v = c u` with `u` primitive, and then
/// exactly when `gcd(1 + t^|c_k|, 1 + t^|c_l|)` is not constant.
pub fn is_coprime_seed(s: &Seed) -> bool {
    let eps = s.epsilon();
    let dirs: Vec<Option<(Vec<BigInt>, BigInt)>> = s
        .unfrozen_indices()
        .into_iter()
        .map(|k| primitive_direction(&eps.row(k)))
        .collect();
    for a in 0..dirs.len() {
        for b in a + 1..dirs.len() {
            let (Some((u, c)), Some((w, e))) = (&dirs[a], &dirs[b]) else {
                continue;
            };
            if u != w {
                continue;
            }
            use num_traits::ToPrimitive;
            let (Some(c), Some(e)) = (c.abs().to_usize(), e.abs().to_usize()) else {
                return false;
            };
            if binomial_gcd(c, e).len() > 1 {
                return false;
            }
        }
    }
    true
}

/// Sufficient condition for total coprimality: the unfrozen rows of `eps`
/// have full rank. `false` means unknown.
pub fn totally_coprime_sufficient(s: &Seed) -> bool {
    let rows = s.unfrozen_indices();
    s.epsilon().select_rows(&rows).rank() == rows.len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanRay {
    pub index: usize,
    /// Primitive generator of the ray.
    pub direction: Vec<BigInt>,
    /// Divisibility index of the generating vector.
    pub multiplicity: BigInt,
    /// Other indices whose ray has the same direction.
    pub coincides_with: Vec<usize>,
}

fn mark_coincidences(rays: &mut [FanRay]) {
    for a in 0..rays.len() {
        let same: Vec<usize> = rays
            .iter()
            .filter(|r| r.index != rays[a].index && r.direction == rays[a].direction)
            .map(|r| r.index)
            .collect();
        rays[a].coincides_with = same;
    }
}

/// Rays `R_{>=0} d_i e_i` for unfrozen `i`, in initial coordinates of `N`.
pub fn fan_rays_a(s: &Seed) -> Vec<FanRay> {
    let mut rays: Vec<FanRay> = s
        .unfrozen_indices()
        .into_iter()
        .map(|i| FanRay {
            index: i,
            direction: s.e(i),
            multiplicity: BigInt::one(),
            coincides_with: Vec::new(),
        })
        .collect();
    mark_coincidences(&mut rays);
    rays
}

/// Rays `-R_{>=0} d_i v_i` for unfrozen `i`, in initial dual coordinates of
/// `M`, with multiplicity `ind(d_i v_i)`.
///
/// Since `<d_i v_i, e_j> = -eps_ji`, the index is the gcd of column `i` of
/// `eps`.
pub fn fan_rays_x(s: &Seed) -> Result<Vec<FanRay>> {
    let n = s.rank();
    let sk = s.fixed().skew();
    let eps = s.epsilon();
    let mut rays = Vec::new();
    for i in s.unfrozen_indices() {
        let di = BigRational::from_integer(s.d()[i].clone());
        // -d_i v_i (e_j^0) = d_i {e_j^0, e_i}
        let vec: Result<Vec<BigInt>> = (0..n)
            .map(|j| {
                let mut acc = BigRational::zero();
                for r in 0..n {
                    let b = s.basis().get(r, i);
                    if !b.is_zero() {
                        acc += sk.get(j, r) * BigRational::from_integer(b.clone());
                    }
                }
                rational_to_int(acc * &di, "-d_i v_i")
            })
            .collect();
        let vec = vec?;
        let g = eps.column(i).iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(Error::Assumption(format!(
                "epsilon has no zero row (v_{} = 0)",
                i + 1
            )));
        }
        let h = vec.iter().fold(BigInt::zero(), |h, x| h.gcd(x));
        rays.push(FanRay {
            index: i,
            direction: vec.iter().map(|x| x / &h).collect(),
            multiplicity: g,
            coincides_with: Vec::new(),
        });
    }
    mark_coincidences(&mut rays);
    Ok(rays)
}
