//! Cluster mutations as pullbacks of functions on seed tori.
//!
//! A-side expressions are functions on `T_{N°}`: exponents are elements of
//! `M°` in initial `f`-coordinates, so the root cluster variables are
//! `A_i = z^{f_i}`. X-side expressions are functions on `T_M`: exponents are
//! elements of `N` in initial `e`-coordinates, so `X_i = z^{e_i}`.
//!
//! `pullback_*(s, k, .)` pulls a function on the torus of `mu_k(s)` back to the
//! torus of `s`. `transport_*(s, k, .)` is its inverse, taking a function on
//! the torus of `s` to the torus of `mu_k(s)`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laurent::{Exponent, LaurentPolynomial, RationalExpression};
use crate::seed::Seed;

fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or(Error::Overflow("exponent conversion")))
        .collect()
}

/// Applies `z^m -> z^m (1 + z^w)^{-c(m)}` to a polynomial, returning
/// `(numerator, power)` with the result equal to `numerator / (1 + z^w)^power`.
fn substitute_poly(
    p: &LaurentPolynomial,
    w: &[i64],
    c: &dyn Fn(&Exponent) -> Result<i64>,
) -> Result<(LaurentPolynomial, i64)> {
    let exps: Vec<(Exponent, BigInt, i64)> = p
        .terms()
        .map(|(e, coef)| Ok((e.clone(), coef.clone(), c(e)?)))
        .collect::<Result<_>>()?;
    let power = exps.iter().map(|t| t.2).max().unwrap_or(0).max(0);
    let mut num = LaurentPolynomial::zero(p.nvars());
    for (e, coef, ce) in exps {
        let factor = LaurentPolynomial::binomial_power(w, power - ce)?;
        num = num.checked_add(&factor.mul_term(&e, &coef)?)?;
    }
    Ok((num, power))
}

fn substitute(
    expr: &RationalExpression,
    w: &[i64],
    c: &dyn Fn(&Exponent) -> Result<i64>,
) -> Result<RationalExpression> {
    let (num, pn) = substitute_poly(expr.numerator(), w, c)?;
    let (den, pd) = substitute_poly(expr.denominator(), w, c)?;
    let common = pn.min(pd);
    let num = num.checked_mul(&LaurentPolynomial::binomial_power(w, pd - common)?)?;
    let den = den.checked_mul(&LaurentPolynomial::binomial_power(w, pn - common)?)?;
    RationalExpression::new(num, den)
}

fn check_vars(s: &Seed, expr: &RationalExpression) -> Result<()> {
    if expr.nvars() != s.rank() {
        return Err(Error::Dimension(format!(
            "expression in {} variables for rank {}",
            expr.nvars(),
            s.rank()
        )));
    }
    Ok(())
}

fn check_unfrozen(s: &Seed, k: usize) -> Result<()> {
    if k >= s.rank() {
        return Err(Error::IndexOutOfRange(k));
    }
    if s.fixed().is_frozen(k) {
        return Err(Error::FrozenIndex(k));
    }
    Ok(())
}

fn a_data(s: &Seed, k: usize) -> Result<(Vec<i64>, impl Fn(&Exponent) -> Result<i64> + '_)> {
    check_unfrozen(s, k)?;
    let vk = to_i64_vec(&s.v(k)?)?;
    let pair = move |e: &Exponent| -> Result<i64> {
        let m: Vec<BigInt> = e.0.iter().map(|&x| BigInt::from(x)).collect();
        s.pairing_dk_ek(k, &m)?
            .to_i64()
            .ok_or(Error::Overflow("pairing"))
    };
    Ok((vk, pair))
}

fn x_data(s: &Seed, k: usize) -> Result<(Vec<i64>, impl Fn(&Exponent) -> Result<i64> + '_)> {
    check_unfrozen(s, k)?;
    let ek = s.e(k);
    let dk = s.d()[k].clone();
    let dkek: Vec<BigInt> = ek.iter().map(|x| x * &dk).collect();
    let w = to_i64_vec(&ek)?;
    let bracket = move |e: &Exponent| -> Result<i64> {
        let n: Vec<BigInt> = e.0.iter().map(|&x| BigInt::from(x)).collect();
        let r = s.skew_pair(&n, &dkek);
        if !r.is_integer() {
            return Err(Error::Internal(format!("[n, e_k] = {r} is not integral")));
        }
        r.to_integer().to_i64().ok_or(Error::Overflow("pairing"))
    };
    Ok((w, bracket))
}

/// `mu_k^* z^m = z^m (1 + z^{v_k})^{-<d_k e_k, m>}`.
pub fn pullback_a(s: &Seed, k: usize, expr: &RationalExpression) -> Result<RationalExpression> {
    check_vars(s, expr)?;
    let (w, c) = a_data(s, k)?;
    substitute(expr, &w, &c)
}

/// Inverse of [`pullback_a`]: `z^m -> z^m (1 + z^{v_k})^{<d_k e_k, m>}`.
pub fn transport_a(s: &Seed, k: usize, expr: &RationalExpression) -> Result<RationalExpression> {
    check_vars(s, expr)?;
    let (w, c) = a_data(s, k)?;
    substitute(expr, &w, &|e| c(e).map(|x| -x))
}

/// `mu_k^* z^n = z^n (1 + z^{e_k})^{-[n, e_k]}` with `[n, e_k] = {n, d_k e_k}`.
pub fn pullback_x(s: &Seed, k: usize, expr: &RationalExpression) -> Result<RationalExpression> {
    check_vars(s, expr)?;
    let (w, c) = x_data(s, k)?;
    substitute(expr, &w, &c)
}

/// Inverse of [`pullback_x`].
pub fn transport_x(s: &Seed, k: usize, expr: &RationalExpression) -> Result<RationalExpression> {
    check_vars(s, expr)?;
    let (w, c) = x_data(s, k)?;
    substitute(expr, &w, &|e| c(e).map(|x| -x))
}

/// The character `z^v` as an expression.
pub fn character(v: &[BigInt]) -> Result<RationalExpression> {
    Ok(RationalExpression::from_polynomial(LaurentPolynomial::monomial(
        Exponent(to_i64_vec(v)?),
        BigInt::from(1),
    )))
}

/// `m - <d_k e_k, m> v_k`, the linear map that pulling back twice at `k`
/// induces on characters of `T_{N°}`.
pub fn double_mutation_map(s: &Seed, k: usize, m: &[BigInt]) -> Result<Vec<BigInt>> {
    let c = s.pairing_dk_ek(k, m)?;
    let vk = s.v(k)?;
    if c.is_zero() {
        return Ok(m.to_vec());
    }
    Ok(m.iter().zip(&vk).map(|(a, b)| a - &c * b).collect())
}
