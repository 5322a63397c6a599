//! Rank-two seeds from vectors in `Z^2`, smooth complete fans, toric blowups,
//! and the symmetric form on `K`.
//!
//! A seed whose skew form has rank two is the same thing as primitive vectors
//! `w_i` in `N/K ≅ Z^2` with `{e_i, e_j} = w_i ∧ w_j`. The fan with rays `w_i`,
//! blown up at one general point of the boundary divisor for each `i`, gives a
//! surface `Y` with boundary `D`, and `K` is identified with the classes in
//! `Pic(Y)` orthogonal to every component of `D`.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Rank2Failure, Result};
use crate::lattice::{kernel_basis, smith_normal_form, solve_integer, IntegerMatrix, RationalMatrix};
use crate::seed::{FixedData, Seed};

pub type V2 = [BigInt; 2];

pub fn v2(x: i64, y: i64) -> V2 {
    [BigInt::from(x), BigInt::from(y)]
}

/// `u ∧ w = u_x w_y - u_y w_x`.
pub fn det2(u: &V2, w: &V2) -> BigInt {
    &u[0] * &w[1] - &u[1] * &w[0]
}

fn gcd2(u: &V2) -> BigInt {
    u[0].gcd(&u[1])
}

fn is_primitive(u: &V2) -> bool {
    gcd2(u).is_one()
}

fn primitive(u: &V2) -> Result<V2> {
    let g = gcd2(u);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok([&u[0] / &g, &u[1] / &g])
}

/// Vectors `w_i` in `Z^2` with weights `nu_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank2Data {
    pub w: Vec<V2>,
    pub nu: Vec<BigInt>,
}

impl Rank2Data {
    pub fn new(w: Vec<V2>, nu: Vec<BigInt>) -> Result<Self> {
        if w.len() != nu.len() {
            return Err(Rank2Failure::LengthMismatch.into());
        }
        for (i, u) in w.iter().enumerate() {
            if !is_primitive(u) {
                return Err(Rank2Failure::NonPrimitiveVector(i).into());
            }
        }
        if let Some(i) = nu.iter().position(|x| !x.is_positive()) {
            return Err(Rank2Failure::NonPositiveWeight(i).into());
        }
        let mut g = BigInt::zero();
        for a in 0..w.len() {
            for b in a + 1..w.len() {
                g = g.gcd(&det2(&w[a], &w[b]));
            }
        }
        if !g.is_one() {
            return Err(Rank2Failure::NotGenerating.into());
        }
        Ok(Rank2Data { w, nu })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(w: &[(i64, i64)], nu: &[i64]) -> Result<Self> {
        Self::new(
            w.iter().map(|&(x, y)| v2(x, y)).collect(),
            nu.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `gcd(nu_i)`.
    pub fn nu_gcd(&self) -> BigInt {
        self.nu.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn all_weights_one(&self) -> bool {
        self.nu.iter().all(One::is_one)
    }
}

/// Seed with `{e_i, e_j} = nu (w_i ∧ w_j)`, `d_i = nu_i / nu`, no frozen
/// indices.
pub fn build_seed(data: &Rank2Data) -> Result<Seed> {
    let n = data.len();
    let nu = data.nu_gcd();
    let d: Vec<BigInt> = data.nu.iter().map(|x| x / &nu).collect();
    let mut skew = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            skew.set(i, j, BigRational::from_integer(&nu * det2(&data.w[i], &data.w[j])));
        }
    }
    Ok(Seed::root(Arc::new(FixedData::new(skew, d, &[])?)))
}

/// Recovers vectors `w_i` from a seed whose skew form has rank two and
/// induces a unimodular form on `N/K`.
pub fn seed_to_rank2(s: &Seed) -> Result<Rank2Data> {
    let n = s.rank();
    if s.fixed().has_frozen() {
        return Err(Rank2Failure::FrozenVariables.into());
    }
    if let Some(i) = s.d().iter().position(|x| !x.is_one()) {
        return Err(Rank2Failure::NonUnitSymmetrizer(i).into());
    }
    let eps = s.epsilon();
    let r = eps.rank();
    if r != 2 {
        return Err(Rank2Failure::RankNotTwo(r).into());
    }
    let k = kernel_basis(eps);
    let mut kmat = IntegerMatrix::zeros(k.len(), n);
    for (a, row) in k.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            kmat.set(a, j, x.clone());
        }
    }
    // K = U [I 0] V, so the top rows of V span K and the bottom two rows lift
    // a basis of N/K; coordinates in N/K are the last two columns of V^-1.
    let snf = smith_normal_form(&kmat);
    let lift = [snf.v.row(n - 2), snf.v.row(n - 1)];
    let mut omega = BigInt::zero();
    for i in 0..n {
        for j in 0..n {
            omega += &lift[0][i] * eps.get(i, j) * &lift[1][j];
        }
    }
    if !omega.abs().is_one() {
        return Err(Rank2Failure::NonUnimodular(omega.to_string()).into());
    }
    let flip = omega.is_negative();
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let x = snf.v_inv.get(i, n - 2).clone();
        let y = snf.v_inv.get(i, n - 1).clone();
        let u = if flip { [x, -y] } else { [x, y] };
        if !is_primitive(&u) {
            return Err(Rank2Failure::NonPrimitiveImage(i).into());
        }
        w.push(u);
    }
    Rank2Data::new(w, vec![BigInt::one(); n])
}

/// Images of the basis vectors of `s` in `N/K`, where `data` describes the
/// root of `s`: `w_i' = sum_j B_ji w_j`.
pub fn mutated_data(data: &Rank2Data, s: &Seed) -> Result<Rank2Data> {
    let n = data.len();
    let b = s.basis();
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut u = [BigInt::zero(), BigInt::zero()];
        for j in 0..n {
            let c = b.get(j, i);
            if !c.is_zero() {
                u[0] += c * &data.w[j][0];
                u[1] += c * &data.w[j][1];
            }
        }
        if !is_primitive(&u) {
            return Err(Rank2Failure::NonPrimitiveImage(i).into());
        }
        w.push(u);
    }
    Rank2Data::new(w, data.nu.clone())
}

/// Upper half-plane (including the positive x-axis) first.
fn half(u: &V2) -> u8 {
    if u[1].is_positive() || (u[1].is_zero() && u[0].is_positive()) {
        0
    } else {
        1
    }
}

fn angle_cmp(a: &V2, b: &V2) -> Ordering {
    half(a)
        .cmp(&half(b))
        .then_with(|| BigInt::zero().cmp(&det2(a, b)))
}

/// A complete smooth fan: primitive rays in counterclockwise order with every
/// consecutive pair a lattice basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan2D {
    rays: Vec<V2>,
}

impl Fan2D {
    pub fn new(rays: Vec<V2>) -> Result<Self> {
        let r = rays.len();
        if r < 3 {
            return Err(Error::MalformedFan("a complete fan needs at least 3 rays".into()));
        }
        for i in 0..r {
            let d = det2(&rays[i], &rays[(i + 1) % r]);
            if !d.is_one() {
                return Err(Error::MalformedFan(format!(
                    "rays {} and {} have determinant {d}",
                    i + 1,
                    (i + 1) % r + 1
                )));
            }
        }
        // Each step turns by less than a half-turn; winding once means
        // exactly one wrap past the positive x-axis.
        let wraps = (0..r)
            .filter(|&i| angle_cmp(&rays[(i + 1) % r], &rays[i]) == Ordering::Less)
            .count();
        if wraps != 1 {
            return Err(Error::MalformedFan("rays wind around more than once".into()));
        }
        Ok(Fan2D { rays })
    }

    pub fn rays(&self) -> &[V2] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn position(&self, u: &V2) -> Option<usize> {
        self.rays.iter().position(|r| r == u)
    }
}

/// The documented completion: sort by angle and drop duplicates; split every
/// gap of at least a half-turn with the quarter-turn of its first ray; then
/// subdivide every cone of determinant `m > 1` by the Hirzebruch-Jung step
/// `v = (w + p u) / m`.
pub fn complete_smooth_fan(rays: &[V2]) -> Result<Fan2D> {
    if rays.is_empty() {
        return Err(Error::MalformedFan("no rays".into()));
    }
    let mut rs: Vec<V2> = rays.iter().map(primitive).collect::<Result<_>>()?;
    rs.sort_by(angle_cmp);
    rs.dedup();

    let mut i = 0;
    while i < rs.len() {
        let j = (i + 1) % rs.len();
        if !det2(&rs[i], &rs[j]).is_positive() {
            let u = &rs[i];
            let rot = [-u[1].clone(), u[0].clone()];
            rs.insert(i + 1, rot);
            continue;
        }
        i += 1;
    }

    let mut i = 0;
    while i < rs.len() {
        let j = (i + 1) % rs.len();
        let m = det2(&rs[i], &rs[j]);
        if m > BigInt::one() {
            let v = hirzebruch_jung_step(&rs[i], &rs[j], &m)?;
            rs.insert(i + 1, v);
        }
        i += 1;
    }
    Fan2D::new(rs)
}

/// The primitive `v` in the cone `(u, w)` with `det(u, v) = 1` and
/// `det(v, w) < det(u, w)`.
fn hirzebruch_jung_step(u: &V2, w: &V2, m: &BigInt) -> Result<V2> {
    // l(u) = 1 for l = (a, b) from the extended gcd.
    let eg = u[0].extended_gcd(&u[1]);
    let (a, b) = if eg.gcd.is_negative() {
        (-eg.x, -eg.y)
    } else {
        (eg.x, eg.y)
    };
    let lw = &a * &w[0] + &b * &w[1];
    let p = (-lw).mod_floor(m);
    let num = [&w[0] + &p * &u[0], &w[1] + &p * &u[1]];
    if !num[0].is_multiple_of(m) || !num[1].is_multiple_of(m) {
        return Err(Error::Internal("Hirzebruch-Jung step".into()));
    }
    Ok([&num[0] / m, &num[1] / m])
}

/// Star subdivision inserting `u_i + u_{i+1}` into every cone; another smooth
/// completion of the same rays.
pub fn star_subdivision(fan: &Fan2D) -> Fan2D {
    let r = fan.len();
    let mut out = Vec::with_capacity(2 * r);
    for i in 0..r {
        let (u, w) = (&fan.rays[i], &fan.rays[(i + 1) % r]);
        out.push(u.clone());
        out.push([&u[0] + &w[0], &u[1] + &w[1]]);
    }
    Fan2D::new(out).expect("subdividing a smooth complete fan")
}

/// `a_i` with `u_{i-1} + u_{i+1} = -a_i u_i`; `a_i` is the self-intersection
/// of the `i`-th boundary divisor.
pub fn self_intersections(fan: &Fan2D) -> Result<Vec<BigInt>> {
    let r = fan.len();
    (0..r)
        .map(|i| {
            let (p, u, q) = (&fan.rays[(i + r - 1) % r], &fan.rays[i], &fan.rays[(i + 1) % r]);
            let s = [&p[0] + &q[0], &p[1] + &q[1]];
            let (num, den) = if !u[0].is_zero() { (&s[0], &u[0]) } else { (&s[1], &u[1]) };
            if !num.is_multiple_of(den) {
                return Err(Error::MalformedFan(format!("no relation at ray {}", i + 1)));
            }
            let a = -(num / den);
            if s[0] != -(&a * &u[0]) || s[1] != -(&a * &u[1]) {
                return Err(Error::MalformedFan(format!("no relation at ray {}", i + 1)));
            }
            Ok(a)
        })
        .collect()
}

/// A toric surface blown up at distinct general points of its boundary.
///
/// Classes are written in the generating set `D_1..D_r, E_1..E_c` (toric
/// divisors, then exceptional curves); the intersection form on it is
/// `diag(Q, -I)`, which descends to `Pic(Y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupSurface {
    fan: Fan2D,
    self_ints: Vec<BigInt>,
    /// Ray index of each center, in center order.
    centers: Vec<usize>,
    form: IntegerMatrix,
}

impl BlowupSurface {
    pub fn new(fan: Fan2D, assignments: &[(usize, BigInt)]) -> Result<Self> {
        let r = fan.len();
        let self_ints = self_intersections(&fan)?;
        let mut centers = Vec::with_capacity(assignments.len());
        for (ray, nu) in assignments {
            if *ray >= r {
                return Err(Error::IndexOutOfRange(*ray));
            }
            if !nu.is_one() {
                return Err(Error::Unsupported(format!(
                    "blowup with weight {nu}: the resulting surface is singular"
                )));
            }
            centers.push(*ray);
        }
        let c = centers.len();
        let mut form = IntegerMatrix::zeros(r + c, r + c);
        for i in 0..r {
            form.set(i, i, self_ints[i].clone());
            let j = (i + 1) % r;
            form.set(i, j, BigInt::one());
            form.set(j, i, BigInt::one());
        }
        for e in 0..c {
            form.set(r + e, r + e, BigInt::from(-1));
        }
        Ok(BlowupSurface {
            fan,
            self_ints,
            centers,
            form,
        })
    }

    pub fn fan(&self) -> &Fan2D {
        &self.fan
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn picard_rank(&self) -> usize {
        self.fan.len() + self.centers.len() - 2
    }

    pub fn form(&self) -> &IntegerMatrix {
        &self.form
    }

    /// The toric block `Q` of the form.
    pub fn toric_form(&self) -> IntegerMatrix {
        let r: Vec<usize> = (0..self.fan.len()).collect();
        self.form.select_rows(&r).select_columns(&r)
    }

    pub fn dim(&self) -> usize {
        self.form.rows()
    }

    pub fn intersect(&self, a: &[BigInt], b: &[BigInt]) -> Result<BigInt> {
        let fb = self.form.mul_vec(b)?;
        Ok(a.iter().zip(&fb).map(|(x, y)| x * y).sum())
    }

    /// Toric linear relations `(<m, u_j>)_j` for `m` in the standard basis,
    /// padded with zero exceptional coordinates.
    pub fn relations(&self) -> Vec<Vec<BigInt>> {
        (0..2)
            .map(|a| {
                let mut v: Vec<BigInt> = self.fan.rays.iter().map(|u| u[a].clone()).collect();
                v.extend(std::iter::repeat_n(BigInt::zero(), self.centers.len()));
                v
            })
            .collect()
    }

    /// Proper transform of the `j`-th boundary divisor:
    /// `D_j - sum of E over centers on ray j`.
    pub fn boundary_class(&self, j: usize) -> Vec<BigInt> {
        let r = self.fan.len();
        let mut v = vec![BigInt::zero(); self.dim()];
        v[j] = BigInt::one();
        for (e, &ray) in self.centers.iter().enumerate() {
            if ray == j {
                v[r + e] = BigInt::from(-1);
            }
        }
        v
    }

    /// `a_j - #(centers on ray j)`.
    pub fn boundary_self_intersections(&self) -> Vec<BigInt> {
        (0..self.fan.len())
            .map(|j| {
                let c = self.centers.iter().filter(|&&r| r == j).count();
                &self.self_ints[j] - BigInt::from(c)
            })
            .collect()
    }
}

/// Convenience wrapper matching the usual operation name.
pub fn blowup_surface(fan: &Fan2D, assignments: &[(usize, BigInt)]) -> Result<BlowupSurface> {
    BlowupSurface::new(fan.clone(), assignments)
}

/// The surface attached to rank-two data, using the given completion (which
/// must contain every `w_i` as a ray). Center `i` lies on the ray of `w_i`.
pub fn surface_with_fan(data: &Rank2Data, fan: &Fan2D) -> Result<BlowupSurface> {
    let mut assignments = Vec::with_capacity(data.len());
    for (i, u) in data.w.iter().enumerate() {
        let ray = fan.position(u).ok_or_else(|| {
            Error::MalformedFan(format!("w_{} is not a ray of the fan", i + 1))
        })?;
        assignments.push((ray, data.nu[i].clone()));
    }
    BlowupSurface::new(fan.clone(), &assignments)
}

pub fn surface(data: &Rank2Data) -> Result<BlowupSurface> {
    surface_with_fan(data, &complete_smooth_fan(&data.w)?)
}

/// `sum_i a_i e_i -> pi^* C - sum_i a_i E_i`, where `C` is the divisor class
/// with `C . D_j = sum of a_i over i with w_i on ray j`. Checks that the
/// result is orthogonal to every boundary component.
pub fn k_to_dperp(data: &Rank2Data, y: &BlowupSurface, a: &[BigInt]) -> Result<Vec<BigInt>> {
    let n = data.len();
    if a.len() != n || y.centers().len() != n {
        return Err(Error::Dimension("a must have one entry per vector".into()));
    }
    let sum = data
        .w
        .iter()
        .zip(a)
        .fold([BigInt::zero(), BigInt::zero()], |acc, (u, c)| {
            [&acc[0] + c * &u[0], &acc[1] + c * &u[1]]
        });
    if !sum[0].is_zero() || !sum[1].is_zero() {
        return Err(Error::NotInKernel(format!("sum a_i w_i = ({}, {})", sum[0], sum[1])));
    }
    let r = y.fan().len();
    let mut c = vec![BigInt::zero(); r];
    for (e, &ray) in y.centers().iter().enumerate() {
        c[ray] += &a[e];
    }
    let x = solve_integer(&y.toric_form(), &c)?
        .ok_or_else(|| Error::Internal("no divisor class with the required degrees".into()))?;
    let mut class = x;
    class.extend(a.iter().map(|t| -t));
    for j in 0..r {
        if !y.intersect(&class, &y.boundary_class(j))?.is_zero() {
            return Err(Error::Internal(format!(
                "class is not orthogonal to boundary component {}",
                j + 1
            )));
        }
    }
    Ok(class)
}

/// A basis of `K` with the Gram matrix of the symmetric form on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KGram {
    pub k_basis: Vec<Vec<BigInt>>,
    pub gram: IntegerMatrix,
}

pub fn gram_on(data: &Rank2Data, y: &BlowupSurface, basis: &[Vec<BigInt>]) -> Result<IntegerMatrix> {
    let classes: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|a| k_to_dperp(data, y, a))
        .collect::<Result<_>>()?;
    let m = basis.len();
    let mut g = IntegerMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            g.set(i, j, y.intersect(&classes[i], &classes[j])?);
        }
    }
    Ok(g)
}

fn require_unit_weights(data: &Rank2Data) -> Result<()> {
    if data.all_weights_one() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "the symmetric form needs all weights equal to 1; weighted blowups give a singular surface"
                .into(),
        ))
    }
}

/// Kernel of the exchange matrix of `build_seed(data)` in Hermite form.
pub fn k_basis(data: &Rank2Data) -> Result<Vec<Vec<BigInt>>> {
    Ok(kernel_basis(build_seed(data)?.epsilon()))
}

pub fn symmetric_form(data: &Rank2Data) -> Result<KGram> {
    require_unit_weights(data)?;
    let y = surface(data)?;
    let k_basis = k_basis(data)?;
    let gram = gram_on(data, &y, &k_basis)?;
    Ok(KGram { k_basis, gram })
}

/// Gram matrix on the fixed root `K`-basis after mutating along `path`
/// (0-based indices).
pub fn mutated_gram(data: &Rank2Data, path: &[usize]) -> Result<IntegerMatrix> {
    require_unit_weights(data)?;
    let root = build_seed(data)?;
    let s = root.mutate_path(path)?;
    let new = mutated_data(data, &s)?;
    let basis: Vec<Vec<BigInt>> = k_basis(data)?
        .iter()
        .map(|a| s.basis_inverse().mul_vec(a))
        .collect::<Result<_>>()?;
    gram_on(&new, &surface(&new)?, &basis)
}

/// Whether the Gram matrix after mutating along `path` equals the original.
pub fn invariance_check(data: &Rank2Data, path: &[usize]) -> Result<bool> {
    Ok(mutated_gram(data, path)? == symmetric_form(data)?.gram)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Definiteness {
    /// `K = 0`.
    ZeroRank,
    NegativeDefinite,
    /// Negative semidefinite with a nonzero radical (includes the zero form).
    NegativeSemidefiniteDegenerate,
    /// No negative directions and some positive ones.
    PositiveSemidefinite,
    Indefinite,
}

impl Definiteness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Definiteness::ZeroRank => "zero_rank",
            Definiteness::NegativeDefinite => "negative_definite",
            Definiteness::NegativeSemidefiniteDegenerate => "negative_semidefinite_degenerate",
            Definiteness::PositiveSemidefinite => "positive_semidefinite",
            Definiteness::Indefinite => "indefinite",
        }
    }
}

/// Numbers of positive, negative and zero squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Inertia by congruence diagonalization over `Q`. Pivot on a nonzero
/// diagonal entry when there is one; otherwise replace row/column `i` by the
/// sum of rows/columns `i` and `j` for an off-diagonal `A_ij != 0`, which makes
/// the diagonal entry `2 A_ij`.
pub fn inertia(g: &IntegerMatrix) -> Result<Inertia> {
    let n = g.rows();
    if g.cols() != n || g.transpose() != *g {
        return Err(Error::Dimension("Gram matrix must be square and symmetric".into()));
    }
    let mut a: Vec<Vec<BigRational>> = g
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut res = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    let mut k = 0;
    while k < n {
        if let Some(p) = (k..n).find(|&i| !a[i][i].is_zero()) {
            a.swap(k, p);
            for row in a.iter_mut() {
                row.swap(k, p);
            }
            let piv = a[k][k].clone();
            if piv.is_positive() {
                res.positive += 1;
            } else {
                res.negative += 1;
            }
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &piv;
                for j in k..n {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                }
            }
            for i in k + 1..n {
                a[k][i] = BigRational::zero();
                a[i][k] = BigRational::zero();
            }
            k += 1;
            continue;
        }
        let off = (k..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero());
        match off {
            Some((i, j)) => {
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][i] += v;
                }
            }
            None => {
                res.zero += n - k;
                break;
            }
        }
    }
    Ok(res)
}

pub fn classify_definiteness(g: &IntegerMatrix) -> Result<Definiteness> {
    if g.rows() == 0 {
        return Ok(Definiteness::ZeroRank);
    }
    let i = inertia(g)?;
    Ok(match (i.positive > 0, i.negative > 0, i.zero > 0) {
        (true, true, _) => Definiteness::Indefinite,
        (false, true, false) => Definiteness::NegativeDefinite,
        (false, _, true) => Definiteness::NegativeSemidefiniteDegenerate,
        (true, false, _) => Definiteness::PositiveSemidefinite,
        (false, false, false) => unreachable!("nonempty matrix has some inertia"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgReport {
    pub classification: Definiteness,
    pub inertia: Option<Inertia>,
    pub fg_conjecture_possible: bool,
    pub rationale: String,
}

pub fn fg_failure_flag(data: &Rank2Data) -> Result<FgReport> {
    let g = symmetric_form(data)?;
    let classification = classify_definiteness(&g.gram)?;
    let inertia = if g.gram.rows() == 0 {
        None
    } else {
        Some(inertia(&g.gram)?)
    };
    let possible = matches!(
        classification,
        Definiteness::NegativeDefinite | Definiteness::ZeroRank
    );
    let rationale = if possible {
        "the form on K is negative definite (or K = 0), so the generic fibre can be affine"
    } else {
        "the form on K is not negative definite, so the generic fibre is not affine and the full Fock-Goncharov conjecture fails"
    };
    Ok(FgReport {
        classification,
        inertia,
        fg_conjecture_possible: possible,
        rationale: rationale.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonFgReport {
    pub boundary_self_intersections: Option<Vec<BigInt>>,
    pub all_minus_two: Option<bool>,
    pub non_noetherian_principal: Option<bool>,
    pub status: String,
}

pub fn non_fg_flag(data: &Rank2Data) -> Result<NonFgReport> {
    if !data.all_weights_one() {
        return Ok(NonFgReport {
            boundary_self_intersections: None,
            all_minus_two: None,
            non_noetherian_principal: None,
            status: "outside checker: weights above 1 need weighted blowups, and the resulting surface is singular"
                .into(),
        });
    }
    let y = surface(data)?;
    let b = y.boundary_self_intersections();
    let all = b.iter().all(|x| *x == BigInt::from(-2));
    let status = if all {
        "every boundary component is a (-2)-curve: the upper cluster algebra with principal or general coefficients is not finitely generated"
    } else {
        "some boundary component is not a (-2)-curve: no conclusion"
    };
    Ok(NonFgReport {
        boundary_self_intersections: Some(b),
        all_minus_two: Some(all),
        non_noetherian_principal: Some(all),
        status: status.into(),
    })
}

/// Everything the `rank2` command reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank2Report {
    pub data: Rank2Data,
    pub epsilon: IntegerMatrix,
    pub d: Vec<BigInt>,
    pub k_basis: Vec<Vec<BigInt>>,
    pub fan: Option<Vec<V2>>,
    pub fan_self_intersections: Option<Vec<BigInt>>,
    pub gram: Option<IntegerMatrix>,
    pub fg: Option<FgReport>,
    pub non_fg: NonFgReport,
    pub invariance_checked_paths: Vec<(Vec<usize>, bool)>,
    pub is_coprime_seed: bool,
}

pub fn rank2_report(data: &Rank2Data, paths: &[Vec<usize>]) -> Result<Rank2Report> {
    let seed = build_seed(data)?;
    let k_basis = kernel_basis(seed.epsilon());
    let non_fg = non_fg_flag(data)?;
    let (fan, selfs, gram, fg, checked) = if data.all_weights_one() {
        let y = surface(data)?;
        let gram = gram_on(data, &y, &k_basis)?;
        let fg = fg_failure_flag(data)?;
        let checked = paths
            .iter()
            .map(|p| Ok((p.clone(), mutated_gram(data, p)? == gram)))
            .collect::<Result<Vec<_>>>()?;
        (
            Some(y.fan().rays().to_vec()),
            Some(self_intersections(y.fan())?),
            Some(gram),
            Some(fg),
            checked,
        )
    } else {
        (None, None, None, None, Vec::new())
    };
    Ok(Rank2Report {
        data: data.clone(),
        epsilon: seed.epsilon().clone(),
        d: seed.d().to_vec(),
        k_basis,
        fan,
        fan_self_intersections: selfs,
        gram,
        fg,
        non_fg,
        invariance_checked_paths: checked,
        is_coprime_seed: crate::seed::is_coprime_seed(&seed),
    })
}
