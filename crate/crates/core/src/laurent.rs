//! Sparse Laurent polynomials with big-integer coefficients, and fractions of
//! them.
//!
//! Terms are ordered graded-lexicographically: first by total degree, then
//! lexicographically by exponent vector. Display lists terms from largest to
//! smallest, e.g. `3*x1^2*x2^-1 + 1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exponent vector. Ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(pub Vec<i64>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn degree(&self) -> i128 {
        self.0.iter().map(|&x| x as i128).sum()
    }

    pub fn checked_add(&self, other: &Exponent) -> Result<Exponent> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow("exponent addition")))
            .collect::<Result<Vec<_>>>()
            .map(Exponent)
    }

    pub fn checked_sub(&self, other: &Exponent) -> Result<Exponent> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b).ok_or(Error::Overflow("exponent subtraction")))
            .collect::<Result<Vec<_>>>()
            .map(Exponent)
    }

    pub fn checked_scale(&self, c: i64) -> Result<Exponent> {
        self.0
            .iter()
            .map(|a| a.checked_mul(c).ok_or(Error::Overflow("exponent scaling")))
            .collect::<Result<Vec<_>>>()
            .map(Exponent)
    }

    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A Laurent polynomial in `nvars` variables; no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LaurentPolynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero(nvars: usize) -> Self {
        LaurentPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Self::monomial(Exponent::zero(nvars), c)
    }

    pub fn monomial(exp: Exponent, coeff: BigInt) -> Self {
        let nvars = exp.0.len();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPolynomial { nvars, terms }
    }

    /// `x_i` (0-based `i`).
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(Exponent(e), BigInt::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<i64>, BigInt)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!(
                    "exponent of length {} in {nvars} variables",
                    e.len()
                )));
            }
            p.add_term(Exponent(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Exponent, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// The single monomial, if the polynomial is `c * x^e`.
    pub fn as_monomial(&self) -> Option<(&Exponent, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn max_abs_exponent(&self) -> u64 {
        self.terms.keys().map(Exponent::max_abs).max().unwrap_or(0)
    }

    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            Err(Error::Dimension(format!(
                "{} variables against {}",
                self.nvars, other.nvars
            )))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.checked_add(e2)?, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplies by `c * x^e`.
    pub fn mul_term(&self, e: &Exponent, c: &BigInt) -> Result<Self> {
        if c.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        let terms = self
            .terms
            .iter()
            .map(|(e1, c1)| Ok((e1.checked_add(e)?, c1 * c)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(LaurentPolynomial {
            nvars: self.nvars,
            terms,
        })
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `(1 + x^v)^a` for `a >= 0`.
    pub fn binomial_power(v: &[i64], a: i64) -> Result<Self> {
        if a < 0 {
            return Err(Error::NegativePower(a));
        }
        let n = v.len();
        let v = Exponent(v.to_vec());
        let mut out = Self::zero(n);
        let mut binom = BigInt::one();
        for j in 0..=a {
            out.add_term(v.checked_scale(j)?, binom.clone());
            binom = binom * BigInt::from(a - j) / BigInt::from(j + 1);
        }
        Ok(out)
    }

    /// `r` with `q * r = self`, or `None` when no Laurent polynomial works.
    ///
    /// Division by leading terms in graded-lex order. Any exact quotient has
    /// its exponents inside the box `[min p - min q, max p - max q]`
    /// (coordinatewise), which bounds the loop and rejects non-divisible input.
    pub fn exact_divide(&self, q: &Self) -> Result<Option<Self>> {
        self.check_same(q)?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(Self::zero(self.nvars)));
        }
        let n = self.nvars;
        let (plo, phi) = self.exponent_box();
        let (qlo, qhi) = q.exponent_box();
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for i in 0..n {
            let l = plo[i] as i128 - qlo[i] as i128;
            let h = phi[i] as i128 - qhi[i] as i128;
            if l > h {
                return Ok(None);
            }
            lo.push(l);
            hi.push(h);
        }
        let (qe, qc) = q.leading_term().map(|(e, c)| (e.clone(), c.clone())).expect("nonzero");
        let mut rem = self.clone();
        let mut quot = Self::zero(n);
        while let Some((re, rc)) = rem.leading_term() {
            let (quo, r) = rc.div_rem(&qc);
            if !r.is_zero() {
                return Ok(None);
            }
            let te = re.checked_sub(&qe)?;
            if te
                .0
                .iter()
                .enumerate()
                .any(|(i, &x)| (x as i128) < lo[i] || (x as i128) > hi[i])
            {
                return Ok(None);
            }
            let sub = q.mul_term(&te, &quo)?;
            rem = rem.checked_sub(&sub)?;
            quot.add_term(te, quo);
        }
        Ok(Some(quot))
    }

    fn exponent_box(&self) -> (Vec<i64>, Vec<i64>) {
        let n = self.nvars;
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        for e in self.terms.keys() {
            for i in 0..n {
                lo[i] = lo[i].min(e.0[i]);
                hi[i] = hi[i].max(e.0[i]);
            }
        }
        (lo, hi)
    }

    /// Parses the canonical text form in `nvars` variables `x1..xn`.
    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        let err = |m: &str| Error::Parse(format!("{m} in {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty polynomial"));
        }
        // Split into signed terms; a '-' right after '^' belongs to an exponent.
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && prev != Some('^') {
                if !cur.is_empty() {
                    pieces.push((neg, std::mem::take(&mut cur)));
                } else if prev.is_some() {
                    return Err(err("dangling sign"));
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
            prev = Some(ch);
        }
        if cur.is_empty() {
            return Err(err("trailing sign"));
        }
        pieces.push((neg, cur));

        let mut p = Self::zero(nvars);
        for (neg, body) in pieces {
            let mut coeff = BigInt::one();
            let mut exp = vec![0i64; nvars];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(err("empty factor"));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, power) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.parse::<i64>().map_err(|_| err("bad exponent"))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| err("bad variable index"))?;
                    if idx == 0 || idx > nvars {
                        return Err(err("variable index out of range"));
                    }
                    exp[idx - 1] = exp[idx - 1]
                        .checked_add(power)
                        .ok_or(Error::Overflow("parsed exponent"))?;
                } else {
                    let c: BigInt = factor.parse().map_err(|_| err("bad coefficient"))?;
                    coeff *= c;
                }
            }
            if neg {
                coeff = -coeff;
            }
            p.add_term(Exponent(exp), coeff);
        }
        Ok(p)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, e: &Exponent, c: &BigInt) -> fmt::Result {
    let vars: Vec<String> = e
        .0
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| {
            if x == 1 {
                format!("x{}", i + 1)
            } else {
                format!("x{}^{}", i + 1, x)
            }
        })
        .collect();
    if vars.is_empty() {
        return write!(f, "{c}");
    }
    if !c.is_one() {
        write!(f, "{c}*")?;
    }
    write!(f, "{}", vars.join("*"))
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let abs = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write_monomial(f, e, &abs)?;
        }
        Ok(())
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.checked_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.checked_sub(rhs).expect("variable count mismatch")
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.checked_mul(rhs).expect("variable count mismatch or exponent overflow")
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

/// A fraction of Laurent polynomials. Never reduced automatically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalExpression {
    num: LaurentPolynomial,
    den: LaurentPolynomial,
}

impl RationalExpression {
    pub fn new(num: LaurentPolynomial, den: LaurentPolynomial) -> Result<Self> {
        num.check_same(&den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RationalExpression { num, den })
    }

    pub fn from_polynomial(p: LaurentPolynomial) -> Self {
        let den = LaurentPolynomial::one(p.nvars);
        RationalExpression { num: p, den }
    }

    pub fn numerator(&self) -> &LaurentPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPolynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        Ok(RationalExpression {
            num: self.num.checked_mul(&other.num)?,
            den: self.den.checked_mul(&other.den)?,
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let num = self
            .num
            .checked_mul(&other.den)?
            .checked_add(&other.num.checked_mul(&self.den)?)?;
        Ok(RationalExpression {
            num,
            den: self.den.checked_mul(&other.den)?,
        })
    }

    /// `self / other`.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RationalExpression {
            num: self.num.checked_mul(&other.den)?,
            den: self.den.checked_mul(&other.num)?,
        })
    }

    /// Exact equality as rational functions.
    pub fn equals(&self, other: &Self) -> Result<bool> {
        Ok(self.num.checked_mul(&other.den)? == other.num.checked_mul(&self.den)?)
    }

    /// The Laurent polynomial this fraction equals, if any.
    pub fn to_laurent(&self) -> Result<Option<LaurentPolynomial>> {
        self.num.exact_divide(&self.den)
    }
}

impl fmt::Display for RationalExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPolynomial::one(self.den.nvars) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str, n: usize) -> LaurentPolynomial {
        LaurentPolynomial::parse(s, n).unwrap()
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&p("1 + x1", 1) * &p("1 - x1", 1), p("1 - x1^2", 1));
        let q = p("3*x1^2*x2^-1 + 1", 2);
        assert_eq!(&q + &LaurentPolynomial::zero(2), q);
        assert_eq!(&p("x1^-1 + 1", 1) * &p("x1", 1), p("1 + x1", 1));
        assert!(matches!(
            p("x1", 1).checked_add(&p("x1", 2)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn binomial_powers() {
        assert_eq!(LaurentPolynomial::binomial_power(&[1, 0], 2).unwrap(), p("1 + 2*x1 + x1^2", 2));
        assert_eq!(LaurentPolynomial::binomial_power(&[1, 0], 0).unwrap(), LaurentPolynomial::one(2));
        assert_eq!(
            LaurentPolynomial::binomial_power(&[0, 1], 3).unwrap(),
            p("1 + 3*x2 + 3*x2^2 + x2^3", 2)
        );
        assert_eq!(LaurentPolynomial::binomial_power(&[0, 0], 3).unwrap(), p("8", 2));
        assert_eq!(LaurentPolynomial::binomial_power(&[1], -1), Err(Error::NegativePower(-1)));
    }

    #[test]
    fn division_examples() {
        let a = p("1 + x1", 2);
        assert_eq!(a.pow(2).unwrap().exact_divide(&a).unwrap(), Some(a.clone()));
        assert_eq!(p("1 + x1 + x2", 2).exact_divide(&a).unwrap(), None);
        assert_eq!(
            p("x1 + x1*x2 + x1^2", 2).exact_divide(&p("x1", 2)).unwrap(),
            Some(p("1 + x2 + x1", 2))
        );
        assert_eq!(a.exact_divide(&LaurentPolynomial::zero(2)), Err(Error::DivisionByZero));
        assert_eq!(p("2*x1", 1).exact_divide(&p("4", 1)).unwrap(), None);
        assert_eq!(p("1 + x1^3", 1).exact_divide(&p("1 + x1", 1)).unwrap(), Some(p("1 - x1 + x1^2", 1)));
    }

    #[test]
    fn display_and_order() {
        let q = p("1 + 3*x1^2*x2^-1", 2);
        assert_eq!(q.to_string(), "3*x1^2*x2^-1 + 1");
        assert_eq!(p("-x1 - 2", 1).to_string(), "-x1 - 2");
        assert_eq!(LaurentPolynomial::zero(3).to_string(), "0");
        assert!(LaurentPolynomial::parse("x3", 2).is_err());
        assert!(LaurentPolynomial::parse("1 +", 2).is_err());
    }

    #[test]
    fn rational_expressions() {
        let a = RationalExpression::new(p("1 + x2", 2), p("x1", 2)).unwrap();
        assert_eq!(a.to_laurent().unwrap(), Some(p("x1^-1 + x1^-1*x2", 2)));
        assert!(RationalExpression::new(p("1", 2), LaurentPolynomial::zero(2)).is_err());
        let half = RationalExpression::new(p("x1", 1), p("2*x1", 1)).unwrap();
        assert_eq!(half.to_laurent().unwrap(), None);
        let b = RationalExpression::new(p("2 + 2*x2", 2), p("2*x1", 2)).unwrap();
        assert!(a.equals(&b).unwrap());
        assert_eq!(a.to_string(), "(x2 + 1) / (x1)");
    }

    fn poly(nvars: usize) -> impl Strategy<Value = LaurentPolynomial> {
        prop::collection::vec((prop::collection::vec(-3i64..4, nvars), -5i64..6), 0..6).prop_map(
            move |ts| {
                LaurentPolynomial::from_terms(nvars, ts.into_iter().map(|(e, c)| (e, BigInt::from(c))))
                    .unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(a in poly(2), b in poly(2), c in poly(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn divide_product(a in poly(3), b in poly(3)) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).exact_divide(&b).unwrap(), Some(a));
        }

        #[test]
        fn division_is_verified(a in poly(2), b in poly(2)) {
            prop_assume!(!b.is_zero());
            if let Some(q) = a.exact_divide(&b).unwrap() {
                prop_assert_eq!(&q * &b, a);
            }
        }

        #[test]
        fn text_round_trip(a in poly(3)) {
            prop_assert_eq!(LaurentPolynomial::parse(&a.to_string(), 3).unwrap(), a);
        }
    }
}
