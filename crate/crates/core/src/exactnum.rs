//! Exact arithmetic in `Q` and in real quadratic fields `Q(sqrt d)`.
//!
//! A [`QuadExt`] is `a + b*sqrt(d)` with arbitrary-precision rational `a`, `b`
//! and a square-free `d >= 2`. Pure rationals are stored with `d = 0`. Values
//! carrying two different nonzero discriminants cannot be combined; the
//! `try_*` methods report [`Error::DiscMismatch`], the operator impls panic.
//! Code that accepts external input validates the field once at the boundary
//! (see [`common_disc`]) and then uses the operators freely.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    rat: BigRational,
    surd: BigRational,
    disc: u64,
}

pub fn is_square_free(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn check_disc(d: u64) -> Result<()> {
    if d == 0 || is_square_free(d) {
        Ok(())
    } else {
        Err(Error::BadDiscriminant(d))
    }
}

/// The single nonzero discriminant shared by `values`, or 0 if all are rational.
pub fn common_disc<'a, I: IntoIterator<Item = &'a QuadExt>>(values: I) -> Result<u64> {
    let mut d = 0u64;
    for v in values {
        if v.disc != 0 {
            if d == 0 {
                d = v.disc;
            } else if d != v.disc {
                return Err(Error::DiscMismatch { left: d, right: v.disc });
            }
        }
    }
    Ok(d)
}

fn join_disc(x: u64, y: u64) -> Result<u64> {
    match (x, y) {
        (0, d) | (d, 0) => Ok(d),
        (a, b) if a == b => Ok(a),
        (a, b) => Err(Error::DiscMismatch { left: a, right: b }),
    }
}

impl QuadExt {
    /// Builds `rat + surd*sqrt(disc)` in canonical form.
    pub fn new(rat: BigRational, surd: BigRational, disc: u64) -> Result<Self> {
        check_disc(disc)?;
        if disc == 0 && !surd.is_zero() {
            return Err(Error::BadDiscriminant(0));
        }
        Ok(Self::canonical(rat, surd, disc))
    }

    fn canonical(rat: BigRational, surd: BigRational, disc: u64) -> Self {
        if surd.is_zero() {
            QuadExt { rat, surd, disc: 0 }
        } else {
            QuadExt { rat, surd, disc }
        }
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(r: BigRational) -> Self {
        QuadExt { rat: r, surd: BigRational::zero(), disc: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q`. Panics if `q == 0`.
    pub fn frac(p: i64, q: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `sqrt(d)`; `d` must be square-free and at least 2.
    pub fn sqrt(d: u64) -> Result<Self> {
        if !is_square_free(d) {
            return Err(Error::BadDiscriminant(d));
        }
        Ok(QuadExt { rat: BigRational::zero(), surd: BigRational::one(), disc: d })
    }

    /// `(p/q)*sqrt(d)`.
    pub fn surd_frac(p: i64, q: i64, d: u64) -> Result<Self> {
        let coef = Self::frac(p, q);
        Ok(Self::sqrt(d)? * coef)
    }

    pub fn rat(&self) -> &BigRational {
        &self.rat
    }

    pub fn surd(&self) -> &BigRational {
        &self.surd
    }

    pub fn disc(&self) -> u64 {
        self.disc
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.surd.is_zero() && self.rat.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    /// True iff the value is a rational integer.
    pub fn is_rational_integer(&self) -> bool {
        self.surd.is_zero() && self.rat.is_integer()
    }

    /// The integer value, when the number is a rational integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.is_rational_integer() {
            Some(self.rat.to_integer())
        } else {
            None
        }
    }

    /// Exact sign under the embedding `sqrt(d) > 0`.
    pub fn signum(&self) -> Ordering {
        let sa = sign_of(&self.rat);
        let sb = sign_of(&self.surd);
        match (sa, sb) {
            (_, Ordering::Equal) => sa,
            (Ordering::Equal, _) => sb,
            _ if sa == sb => sa,
            _ => {
                let a2 = &self.rat * &self.rat;
                let b2d = &self.surd * &self.surd * BigRational::from_integer(BigInt::from(self.disc));
                // a^2 = b^2 d is impossible for square-free d > 1 unless both vanish
                if a2 > b2d {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    pub fn conjugate(&self) -> Self {
        QuadExt { rat: self.rat.clone(), surd: -self.surd.clone(), disc: self.disc }
    }

    /// Field norm `a^2 - d b^2`, always rational.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat
            - &self.surd * &self.surd * BigRational::from_integer(BigInt::from(self.disc))
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let d = join_disc(self.disc, other.disc)?;
        Ok(Self::canonical(&self.rat + &other.rat, &self.surd + &other.surd, d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let d = join_disc(self.disc, other.disc)?;
        Ok(Self::canonical(&self.rat - &other.rat, &self.surd - &other.surd, d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let d = join_disc(self.disc, other.disc)?;
        if self.surd.is_zero() {
            return Ok(Self::canonical(&self.rat * &other.rat, &self.rat * &other.surd, d));
        }
        if other.surd.is_zero() {
            return Ok(Self::canonical(&self.rat * &other.rat, &self.surd * &other.rat, d));
        }
        let dd = BigRational::from_integer(BigInt::from(d));
        let rat = &self.rat * &other.rat + &self.surd * &other.surd * dd;
        let surd = &self.rat * &other.surd + &other.rat * &self.surd;
        Ok(Self::canonical(rat, surd, d))
    }

    /// Multiplicative inverse via the conjugate.
    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::canonical(&self.rat / &n, -(&self.surd / &n), self.disc))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.try_inv()?)
    }

    /// Exact comparison; fails only on mixed fields.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(self.try_sub(other)?.signum())
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.surd.is_zero() {
            a
        } else {
            a + self.surd.to_f64().unwrap_or(f64::NAN) * (self.disc as f64).sqrt()
        }
    }
}

fn sign_of(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

impl Default for QuadExt {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigInt> for QuadExt {
    fn from(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }
}

impl From<BigRational> for QuadExt {
    fn from(r: BigRational) -> Self {
        Self::rational(r)
    }
}

impl PartialOrd for QuadExt {
    /// `None` when the operands live in different fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

macro_rules! forward_binop {
    ($Trait:ident, $method:ident, $try:ident) => {
        impl<'a, 'b> $Trait<&'b QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &'b QuadExt) -> QuadExt {
                match self.$try(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{}", e),
                }
            }
        }
        impl $Trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $Trait<&'b QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &'b QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
        impl<'a> $Trait<QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { rat: -self.rat, surd: -self.surd, disc: self.disc }
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -(self.clone())
    }
}

impl std::iter::Sum for QuadExt {
    fn sum<I: Iterator<Item = QuadExt>>(iter: I) -> Self {
        iter.fold(QuadExt::zero(), |acc, x| acc + x)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadExt {
    /// `p/q`, `r/s*sqrt(d)` or `p/q+r/s*sqrt(d)`; unit coefficients print as
    /// bare `sqrt(d)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return f.write_str(&fmt_rational(&self.rat));
        }
        let coef = self.surd.abs();
        let surd_txt = if coef.is_one() {
            format!("sqrt({})", self.disc)
        } else {
            format!("{}*sqrt({})", fmt_rational(&coef), self.disc)
        };
        let sign = if self.surd.is_negative() { "-" } else { "+" };
        if self.rat.is_zero() {
            if self.surd.is_negative() {
                write!(f, "-{}", surd_txt)
            } else {
                f.write_str(&surd_txt)
            }
        } else {
            write!(f, "{}{}{}", fmt_rational(&self.rat), sign, surd_txt)
        }
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct TextParser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> TextParser<'a> {
    fn err(&self, reason: &str) -> Error {
        Error::NumberParse { input: self.src.to_string(), reason: reason.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        self.src[start..self.pos].parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }

    fn sqrt_call(&mut self) -> Result<u64> {
        if !self.src[self.pos..].starts_with("sqrt(") {
            return Err(self.err("expected sqrt("));
        }
        self.pos += 5;
        let d = self.integer()?;
        if !self.eat(b')') {
            return Err(self.err("expected )"));
        }
        d.to_u64().ok_or_else(|| self.err("discriminant too large"))
    }

    /// One signed term: a rational, `coef*sqrt(d)` or `sqrt(d)`.
    fn term(&mut self) -> Result<(BigRational, Option<u64>)> {
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let (coef, disc) = if self.peek() == Some(b's') {
            (BigRational::one(), Some(self.sqrt_call()?))
        } else {
            let num = self.integer()?;
            let den = if self.eat(b'/') { self.integer()? } else { BigInt::one() };
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            let r = BigRational::new(num, den);
            if self.eat(b'*') {
                (r, Some(self.sqrt_call()?))
            } else {
                (r, None)
            }
        };
        Ok((if negative { -coef } else { coef }, disc))
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = TextParser { src: &cleaned, bytes: cleaned.as_bytes(), pos: 0 };
        if cleaned.is_empty() {
            return Err(p.err("empty"));
        }
        let mut rat: Option<BigRational> = None;
        let mut surd: Option<(BigRational, u64)> = None;
        while p.pos < cleaned.len() {
            if p.pos > 0 && !matches!(p.peek(), Some(b'+') | Some(b'-')) {
                return Err(p.err("expected + or - between terms"));
            }
            match p.term()? {
                (r, None) => {
                    if rat.replace(r).is_some() {
                        return Err(p.err("more than one rational term"));
                    }
                }
                (c, Some(d)) => {
                    if surd.replace((c, d)).is_some() {
                        return Err(p.err("more than one surd term"));
                    }
                }
            }
        }
        let rat = rat.unwrap_or_else(BigRational::zero);
        match surd {
            None => Ok(QuadExt::rational(rat)),
            Some((c, d)) => {
                if !is_square_free(d) {
                    return Err(Error::BadDiscriminant(d));
                }
                QuadExt::new(rat, c, d)
            }
        }
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `cos(pi/m)` as an exact value, when it lies in a quadratic field.
pub fn cos_pi_over(m: u32) -> Option<QuadExt> {
    match m {
        2 => Some(QuadExt::zero()),
        3 => Some(QuadExt::frac(1, 2)),
        4 => QuadExt::surd_frac(1, 2, 2).ok(),
        5 => Some(QuadExt::frac(1, 4) + QuadExt::surd_frac(1, 4, 5).ok()?),
        6 => QuadExt::surd_frac(1, 2, 3).ok(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadExt {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(q("1+sqrt(3)") + q("1-sqrt(3)"), q("2"));
        // 2/sqrt(3) + 4/sqrt(3) = 6/sqrt(3) = 2 sqrt(3)
        let sum = q("2/3*sqrt(3)") + q("4/3*sqrt(3)");
        assert_eq!(sum.rat(), &BigRational::zero());
        assert_eq!(sum.surd(), &BigRational::from_integer(2.into()));
        assert_eq!(sum.disc(), 3);
        let x = q("5/7-3/2*sqrt(5)");
        assert_eq!(&x + &QuadExt::zero(), x);
    }

    #[test]
    fn conjugate_sum_normalizes_disc() {
        let s = q("1+sqrt(3)") + q("1-sqrt(3)");
        assert_eq!(s.disc(), 0);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(q("1+sqrt(3)") * q("1-sqrt(3)"), q("-2"));
        assert_eq!(q("2/3*sqrt(3)") * q("2*sqrt(3)"), q("4"));
        let four_over_root3 = q("4/3*sqrt(3)");
        assert_eq!(&four_over_root3 * &four_over_root3, q("16/3"));
    }

    #[test]
    fn mismatch_is_reported() {
        let e = q("sqrt(2)").try_add(&q("sqrt(3)")).unwrap_err();
        assert_eq!(e, Error::DiscMismatch { left: 2, right: 3 });
        assert!(q("sqrt(2)").try_mul(&q("sqrt(3)")).is_err());
        assert!(q("sqrt(2)").partial_cmp(&q("sqrt(3)")).is_none());
        // a rational mixes with anything
        assert!(q("1/2").try_add(&q("sqrt(3)")).is_ok());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(q("sqrt(3)").try_inv().unwrap(), q("1/3*sqrt(3)"));
        assert_eq!(q("2").try_inv().unwrap(), q("1/2"));
        assert_eq!(q("1+sqrt(3)").try_inv().unwrap(), q("-1/2+1/2*sqrt(3)"));
        assert_eq!(QuadExt::zero().try_inv().unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn compare_examples() {
        assert_eq!(q("2/3*sqrt(3)").try_cmp(&q("1")).unwrap(), Ordering::Greater);
        assert_eq!(q("1").try_cmp(&q("1")).unwrap(), Ordering::Equal);
        assert_eq!(q("1/2*sqrt(2)").try_cmp(&q("1")).unwrap(), Ordering::Less);
        assert_eq!(q("3-2*sqrt(2)").signum(), Ordering::Greater);
        assert_eq!(q("-3+2*sqrt(2)").signum(), Ordering::Less);
        assert_eq!(q("1-sqrt(2)").signum(), Ordering::Less);
    }

    #[test]
    fn integrality_examples() {
        assert!(!q("16/3").is_rational_integer());
        let two = q("2");
        let prod = [q("2/3*sqrt(3)"), q("1"), q("2*sqrt(3)"), q("1")]
            .iter()
            .fold(QuadExt::one(), |acc, g| acc * (&two * g));
        assert_eq!(prod, q("64"));
        assert!(prod.is_rational_integer());
        assert!(QuadExt::zero().is_rational_integer());
        assert!(!q("2*sqrt(3)").is_rational_integer());
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "-7", "2/3", "sqrt(3)", "-sqrt(3)", "2/3*sqrt(3)", "1/2-5/4*sqrt(5)", "-3+sqrt(6)"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("1*sqrt(2)").to_string(), "sqrt(2)");
        assert_eq!(q("sqrt(2)+1").to_string(), "1+sqrt(2)");
        assert_eq!(q("4/6").to_string(), "2/3");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "abc", "1/0", "1+2", "sqrt(4)", "sqrt(3)+sqrt(3)", "2*", "1 2x"] {
            assert!(bad.parse::<QuadExt>().is_err(), "{bad}");
        }
        assert_eq!("sqrt(1)".parse::<QuadExt>().unwrap_err(), Error::BadDiscriminant(1));
    }

    #[test]
    fn square_free() {
        assert!(is_square_free(2));
        assert!(is_square_free(30));
        assert!(!is_square_free(12));
        assert!(!is_square_free(1));
        assert!(QuadExt::new(BigRational::zero(), BigRational::one(), 8).is_err());
    }

    #[test]
    fn cos_table() {
        assert_eq!(cos_pi_over(3).unwrap(), q("1/2"));
        assert_eq!(cos_pi_over(4).unwrap(), q("1/2*sqrt(2)"));
        assert_eq!(cos_pi_over(5).unwrap(), q("1/4+1/4*sqrt(5)"));
        assert_eq!(cos_pi_over(6).unwrap(), q("1/2*sqrt(3)"));
        assert!(cos_pi_over(7).is_none());
        for m in 3..=6 {
            let c = cos_pi_over(m).unwrap().to_f64();
            assert!((c - (std::f64::consts::PI / m as f64).cos()).abs() < 1e-15);
        }
    }
}
