//! Exact rational scalar.
//!
//! Values that fit in machine words stay inline; everything else spills to
//! `BigInt`. The representation is canonical, so derived `Eq`/`Hash` are
//! structural.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

// Small: numerator in (i64::MIN, i64::MAX], denominator in [1, i64::MAX].
// Big is used only when the reduced value does not fit Small.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(BigInt, BigInt),
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
            return gcd_u64(a as u64, b as u64) as u128;
        }
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Euclid on magnitudes. Much cheaper than a binary gcd when one side is
// small, which is the common case for cross-term reduction.
fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    let mut x: BigUint = a.magnitude().clone();
    let mut y: BigUint = b.magnitude().clone();
    if x < y {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        if y.is_zero() {
            return BigInt::from(x);
        }
        if let Some(ys) = y.to_u64() {
            let r = (&x % ys).to_u64().expect("remainder below u64 divisor");
            return BigInt::from(gcd_u64(ys, r));
        }
        let r = &x % &y;
        x = y;
        y = r;
    }
}

fn fits_small(n: &BigInt) -> Option<i64> {
    n.to_i64().filter(|&v| v != i64::MIN)
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_canonical_big(n.into(), BigInt::one())
    }

    /// `n/d` for machine integers. Panics when `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_i128(n as i128, d as i128)
    }

    pub fn try_new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Parse {
                input: format!("{}/{}", num, den),
            });
        }
        Ok(Self::from_big(num, den))
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            // |n|, |d| < 2^127 on every call site, so negation is safe.
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Self::zero();
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g != 1 {
            n /= g;
            d /= g;
        }
        if n > i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128 {
            Rational(Repr::Small(n as i64, d as i64))
        } else {
            Rational(Repr::Big(BigInt::from(n), BigInt::from(d)))
        }
    }

    fn from_big(mut n: BigInt, mut d: BigInt) -> Self {
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        if n.is_zero() {
            return Self::zero();
        }
        let g = gcd_big(&n, &d);
        if !g.is_one() {
            n /= &g;
            d /= &g;
        }
        Self::from_canonical_big(n, d)
    }

    // Caller guarantees d > 0 and gcd(n, d) = 1.
    fn from_canonical_big(n: BigInt, d: BigInt) -> Self {
        match (fits_small(&n), fits_small(&d)) {
            (Some(a), Some(b)) => Rational(Repr::Small(a, b)),
            _ => Rational(Repr::Big(n, d)),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(n, _) => n.clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(_, d) => d.clone(),
        }
    }

    fn big_parts(&self) -> (std::borrow::Cow<'_, BigInt>, std::borrow::Cow<'_, BigInt>) {
        use std::borrow::Cow;
        match &self.0 {
            Repr::Small(n, d) => (Cow::Owned(BigInt::from(*n)), Cow::Owned(BigInt::from(*d))),
            Repr::Big(n, d) => (Cow::Borrowed(n), Cow::Borrowed(d)),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(_, d) => d.is_one(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(n, _) => match n.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Panics on zero.
    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                Self::from_i128(*d as i128, *n as i128)
            }
            Repr::Big(n, d) => {
                if n.is_negative() {
                    Self::from_canonical_big(-d, -n)
                } else {
                    Self::from_canonical_big(d.clone(), n.clone())
                }
            }
        }
    }

    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(n.div_euclid(*d)),
            Repr::Big(n, d) => n.div_floor(d),
        }
    }

    pub fn ceil(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => {
                let q = n.div_euclid(*d);
                BigInt::from(if n.rem_euclid(*d) == 0 { q } else { q + 1 })
            }
            Repr::Big(n, d) => {
                let (q, r) = n.div_mod_floor(d);
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Bit length of numerator plus denominator; a cheap growth measure.
    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small(n, d) => {
                (64 - n.unsigned_abs().leading_zeros() as u64) + (64 - d.leading_zeros() as u64)
            }
            Repr::Big(n, d) => n.bits() + d.bits(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(n, d) => {
                let nb = n.bits() as i64;
                let db = d.bits() as i64;
                // Bring both operands into f64 range before dividing.
                let shift = nb.max(db) - 1000;
                if shift > 0 {
                    let ns = n >> shift as usize;
                    let ds = d >> shift as usize;
                    if ds.is_zero() {
                        return if n.is_negative() {
                            f64::NEG_INFINITY
                        } else {
                            f64::INFINITY
                        };
                    }
                    ns.to_f64().unwrap_or(0.0) / ds.to_f64().unwrap_or(1.0)
                } else {
                    n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)
                }
            }
        }
    }

    /// Decimal rendering with `digits` fractional digits, rounded half away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let (n, d) = self.big_parts();
        let neg = n.is_negative();
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = n.magnitude() * scale.magnitude() * 2u32 + d.magnitude();
        let q = scaled / (d.magnitude() * 2u32);
        let mut s = q.to_string();
        if digits > 0 {
            if s.len() <= digits {
                s = "0".repeat(digits + 1 - s.len()) + &s;
            }
            s.insert(s.len() - digits, '.');
        }
        if neg && !q.is_zero() {
            s.insert(0, '-');
        }
        s
    }

    /// Exact decimal when the expansion terminates, `p/q` otherwise.
    pub fn to_pretty(&self) -> String {
        let mut d = self.denom();
        let (two, five) = (BigInt::from(2), BigInt::from(5));
        let (mut t, mut f) = (0usize, 0usize);
        while d.is_even() {
            d /= &two;
            t += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            f += 1;
        }
        if !d.is_one() {
            return self.to_string();
        }
        self.to_decimal(t.max(f))
    }

    /// Parses a fraction `p/q`, an integer, or a finite decimal with optional exponent.
    pub fn parse(input: &str) -> Result<Self> {
        let err = || Error::Parse {
            input: input.to_string(),
        };
        let s = input.trim();
        if s.is_empty() {
            return Err(err());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_int(p.trim()).ok_or_else(err)?;
            let q = q.trim();
            if q.starts_with(['+', '-']) {
                return Err(err());
            }
            let q = parse_int(q).ok_or_else(err)?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Self::from_big(p, q));
        }
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = s[i + 1..].parse().map_err(|_| err())?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (neg, body) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err());
        }
        if exp.unsigned_abs() > 100_000 {
            return Err(err());
        }
        let digits = format!("{}{}", int_part, frac_part);
        let mut num: BigInt = digits.parse().map_err(|_| err())?;
        if neg {
            num = -num;
        }
        let e = exp - frac_part.len() as i64;
        let ten = BigInt::from(10);
        if e >= 0 {
            Ok(Self::from_big(
                num * num_traits::pow(ten, e as usize),
                BigInt::one(),
            ))
        } else {
            Ok(Self::from_big(num, num_traits::pow(ten, (-e) as usize)))
        }
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn add_big(an: &BigInt, ad: &BigInt, bn: &BigInt, bd: &BigInt) -> Rational {
    let g = gcd_big(ad, bd);
    if g.is_one() {
        return Rational::from_canonical_big(an * bd + bn * ad, ad * bd);
    }
    let adg = ad / &g;
    let bdg = bd / &g;
    let t = an * &bdg + bn * &adg;
    if t.is_zero() {
        return Rational::zero();
    }
    let g2 = gcd_big(&t, &g);
    if g2.is_one() {
        Rational::from_canonical_big(t, adg * bd)
    } else {
        Rational::from_canonical_big(t / &g2, adg * (bd / g2))
    }
}

fn mul_big(an: &BigInt, ad: &BigInt, bn: &BigInt, bd: &BigInt) -> Rational {
    if an.is_zero() || bn.is_zero() {
        return Rational::zero();
    }
    let g1 = gcd_big(an, bd);
    let g2 = gcd_big(bn, ad);
    let num = (an / &g1) * (bn / &g2);
    let den = (ad / &g2) * (bd / &g1);
    Rational::from_canonical_big(num, den)
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                let (an, ad, bn, bd) = (*an as i128, *ad as i128, *bn as i128, *bd as i128);
                if ad == bd {
                    Rational::from_i128(an + bn, ad)
                } else {
                    Rational::from_i128(an * bd + bn * ad, ad * bd)
                }
            }
            _ => {
                let (an, ad) = self.big_parts();
                let (bn, bd) = rhs.big_parts();
                add_big(&an, &ad, &bn, &bd)
            }
        }
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                Rational::from_i128(*an as i128 * *bn as i128, *ad as i128 * *bd as i128)
            }
            _ => {
                let (an, ad) = self.big_parts();
                let (bn, bd) = rhs.big_parts();
                mul_big(&an, &ad, &bn, &bd)
            }
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-*n, *d)),
            Repr::Big(n, d) => Rational::from_canonical_big(-n, d.clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        self + &(-rhs)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a Rational) -> Rational {
        self * &rhs.recip()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
        impl $tr<i64> for Rational {
            type Output = Rational;
            fn $method(self, rhs: i64) -> Rational {
                (&self).$method(&Rational::from(rhs))
            }
        }
        impl<'a> $tr<i64> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: i64) -> Rational {
                self.$method(&Rational::from(rhs))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| &acc + x)
    }
}

impl Sum<Rational> for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| &acc + &x)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
            }
            _ => {
                let (sa, sb) = (self.signum(), other.signum());
                if sa != sb {
                    return sa.cmp(&sb);
                }
                let (an, ad) = self.big_parts();
                let (bn, bd) = other.big_parts();
                (&*an * &*bd).cmp(&(&*bn * &*ad))
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_i128(v as i128, 1)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational(Repr::Small(v as i64, 1))
    }
}

impl From<u32> for Rational {
    fn from(v: u32) -> Self {
        Rational(Repr::Small(v as i64, 1))
    }
}

impl From<u64> for Rational {
    fn from(v: u64) -> Self {
        Rational::from_i128(v as i128, 1)
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        Rational::from_i128(v as i128, 1)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_integer(v)
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Rational::parse(s)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{}", n),
            Repr::Small(n, d) => write!(f, "{}/{}", n, d),
            Repr::Big(n, d) if d.is_one() => write!(f, "{}", n),
            Repr::Big(n, d) => write!(f, "{}/{}", n, d),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational as \"p/q\", a decimal string, or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        Rational::parse(v).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(Rational::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        Ok(Rational::from(v))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

/// Shorthand for exact literals in code and tests: `q("101.3")`, `q("1/3")`.
/// Panics on malformed input.
pub fn q(s: &str) -> Rational {
    Rational::parse(s).unwrap_or_else(|e| panic!("{}", e))
}
