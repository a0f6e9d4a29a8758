//! Exact rational scalars, dense vectors and `<=` constraint rows.
//!
//! [`Rational`] keeps values that fit into machine words in an inline
//! representation and only falls back to heap-allocated big integers when an
//! operation overflows. The representation is canonical: a value is stored
//! inline whenever it fits, so structural equality and hashing agree with
//! numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::iter::Sum;
use std::num::NonZeroU64;
use std::ops::{Add, AddAssign, Deref, Div, Index, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// An exact rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Numerator and denominator; the denominator never exceeds `i64::MAX`.
    Small(i64, NonZeroU64),
    Big(Box<BigRational>),
}

const ONE_U64: NonZeroU64 = match NonZeroU64::new(1) {
    Some(v) => v,
    None => unreachable!(),
};

/// `rat(p, q)`: the canonical value of `p / q`.
pub fn rat(p: i64, q: i64) -> Result<Rational, ArithError> {
    Rational::new(p, q)
}

impl Rational {
    pub fn new(p: i64, q: i64) -> Result<Self, ArithError> {
        if q == 0 {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Self::from_i128(p as i128, q as i128))
    }

    pub fn zero() -> Self {
        Rational(Repr::Small(0, ONE_U64))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, ONE_U64))
    }

    pub fn from_integer(v: i64) -> Self {
        Rational(Repr::Small(v, ONE_U64))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        match v.to_i64() {
            Some(small) => Self::from_integer(small),
            None => Rational(Repr::Big(Box::new(BigRational::from_integer(v)))),
        }
    }

    pub fn from_big(v: BigRational) -> Self {
        // BigRational constructors already reduce and fix the sign.
        match (v.numer().to_i64(), v.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, NonZeroU64::new(d as u64).unwrap())),
            _ => Rational(Repr::Big(Box::new(v))),
        }
    }

    /// Canonicalizes `num / den` for a nonzero `den`.
    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        if num == 0 {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            // Both values were produced from at most 126-bit magnitudes, so
            // negation cannot overflow.
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, NonZeroU64::new(d as u64).unwrap())),
            _ => Rational(Repr::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(d.get())),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(d.get()),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Numerator and denominator when both fit into `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(n, d) => Some((*n, d.get() as i64)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => d.get() == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn signum(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Self::from_integer(n.div_floor(&(d.get() as i64))),
            Repr::Big(b) => Self::from_big(b.floor()),
        }
    }

    pub fn ceil(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Self::from_integer(n.div_ceil(&(d.get() as i64))),
            Repr::Big(b) => Self::from_big(b.ceil()),
        }
    }

    /// Integer value if this is an integer that fits into `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, d) if d.get() == 1 => Some(*n),
            _ => None,
        }
    }

    /// Lossy conversion, for progress output only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / d.get() as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(match &self.0 {
            Repr::Small(n, d) => Self::from_i128(d.get() as i128, *n as i128),
            Repr::Big(b) => Self::from_big(b.recip()),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self * &rhs.recip()?)
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b.get() == 1 && d.get() == 1 {
                    if let Some(s) = a.checked_add(*c) {
                        return Self::from_integer(s);
                    }
                }
                let (a, b, c, d) = (*a as i128, b.get() as i128, *c as i128, d.get() as i128);
                if b == d {
                    Self::from_i128(a + c, b)
                } else {
                    Self::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Self::from_big(self.to_big() + rhs.to_big()),
        }
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *a == 0 || *c == 0 {
                    return Self::zero();
                }
                if b.get() == 1 && d.get() == 1 {
                    if let Some(p) = a.checked_mul(*c) {
                        return Self::from_integer(p);
                    }
                }
                Self::from_i128(*a as i128 * *c as i128, b.get() as i128 * d.get() as i128)
            }
            _ => Self::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Self::from_integer(v as i64)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Self::from_big(v)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * d.get() as i128).cmp(&(*c as i128 * b.get() as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational(Repr::Small(m, *d)),
                None => Rational::from_big(-self.to_big()),
            },
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        self.add_ref(rhs)
    }
}

impl Sub<&Rational> for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self.add_ref(&-rhs)
    }
}

impl Mul<&Rational> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        self.mul_ref(rhs)
    }
}

/// Panics on division by zero, like the primitive integer types.
impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational { (&self).$m(&rhs) }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational { (&self).$m(rhs) }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = self.add_ref(rhs);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = self.add_ref(&rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = self.mul_ref(rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, d) if d.get() == 1 => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let parse = |p: &str| p.trim().parse::<BigInt>().map_err(|_| ArithError::Parse(s.to_string()));
        match t.split_once('/') {
            None => Ok(Self::from_bigint(parse(t)?)),
            Some((p, q)) => {
                let (p, q) = (parse(p)?, parse(q)?);
                if q.is_zero() {
                    return Err(ArithError::ZeroDenominator);
                }
                Ok(Self::from_big(BigRational::new(p, q)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a string \"p/q\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::from_integer(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational::from_bigint(BigInt::from(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denom()))
}

/// A fixed-length vector of rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatVector(Vec<Rational>);

impl RatVector {
    pub fn zeros(n: usize) -> Self {
        RatVector(vec![Rational::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RatVector(v.iter().map(|&x| Rational::from_integer(x)).collect())
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    /// Exact inner product.
    pub fn dot(&self, other: &RatVector) -> Result<Rational, ArithError> {
        check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    /// Inner product with an integer vector; avoids gcd work when every
    /// coefficient is a word-sized integer.
    pub fn dot_int(&self, z: &[i64]) -> Result<Rational, ArithError> {
        check_len(self.len(), z.len())?;
        let mut acc: i128 = 0;
        for (a, &x) in self.0.iter().zip(z) {
            let term = match a.as_small() {
                Some((n, 1)) => (n as i128).checked_mul(x as i128),
                _ => None,
            };
            match term.and_then(|t| acc.checked_add(t)) {
                Some(v) => acc = v,
                None => return Ok(self.dot(&RatVector::from_ints(z)).expect("lengths checked")),
            }
        }
        Ok(match i64::try_from(acc) {
            Ok(v) => Rational::from_integer(v),
            Err(_) => Rational::from_bigint(BigInt::from(acc)),
        })
    }

    /// Integer entries, if every entry is an integer fitting into `i64`.
    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.0.iter().map(Rational::to_i64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }
}

fn check_len(expected: usize, found: usize) -> Result<(), ArithError> {
    if expected == found {
        Ok(())
    } else {
        Err(ArithError::LengthMismatch { expected, found })
    }
}

/// Free function form of [`RatVector::dot`].
pub fn dot(a: &RatVector, x: &RatVector) -> Result<Rational, ArithError> {
    a.dot(x)
}

impl From<Vec<Rational>> for RatVector {
    fn from(v: Vec<Rational>) -> Self {
        RatVector(v)
    }
}

impl FromIterator<Rational> for RatVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RatVector(iter.into_iter().collect())
    }
}

impl Deref for RatVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a RatVector {
    type Item = &'a Rational;
    type IntoIter = std::slice::Iter<'a, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// The inequality `<a, x> <= b`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Row {
    pub a: RatVector,
    pub b: Rational,
}

impl Row {
    pub fn new(a: RatVector, b: Rational) -> Self {
        Row { a, b }
    }

    pub fn from_ints(a: &[i64], b: i64) -> Self {
        Row { a: RatVector::from_ints(a), b: Rational::from_integer(b) }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `b - <a, x>`; nonnegative iff `x` satisfies the row.
    pub fn slack(&self, x: &RatVector) -> Result<Rational, ArithError> {
        Ok(&self.b - self.a.dot(x)?)
    }

    pub fn is_satisfied_by(&self, x: &RatVector) -> Result<bool, ArithError> {
        Ok(!self.slack(x)?.is_negative())
    }

    pub fn is_satisfied_by_int(&self, z: &[i64]) -> Result<bool, ArithError> {
        Ok(self.a.dot_int(z)? <= self.b)
    }
}

impl fmt::Debug for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} <= {}", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        rat(p, q).unwrap()
    }

    #[test]
    fn rat_canonicalizes() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(2, 4).to_string(), "1/2");
        assert_eq!(r(3, -6).to_string(), "-1/2");
        assert_eq!(r(0, 7).to_string(), "0");
        assert_eq!(r(0, 7).denom(), BigInt::from(1));
        assert_eq!(rat(1, 0), Err(ArithError::ZeroDenominator));
    }

    #[test]
    fn dot_examples() {
        let v = |xs: &[Rational]| RatVector::from(xs.to_vec());
        assert_eq!(dot(&RatVector::from_ints(&[1, 2]), &RatVector::from_ints(&[3, 4])).unwrap(), r(11, 1));
        assert_eq!(dot(&v(&[r(1, 2), r(1, 3)]), &RatVector::from_ints(&[2, 3])).unwrap(), r(2, 1));
        assert!(dot(&RatVector::from_ints(&[5, -3]), &RatVector::zeros(2)).unwrap().is_zero());
        assert!(matches!(
            dot(&RatVector::zeros(2), &RatVector::zeros(3)),
            Err(ArithError::LengthMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rational::from_integer(i64::MAX);
        let sum = &big + &big;
        assert_eq!(sum.to_string(), "18446744073709551614");
        assert_eq!(&sum - &big, big);
        assert!((&sum - &big).as_small().is_some());
        let min = Rational::from_integer(i64::MIN);
        assert_eq!((-&min).to_string(), "9223372036854775808");
        let tiny = r(1, i64::MAX);
        let prod = &tiny * &tiny;
        assert_eq!(&prod * &Rational::from_integer(i64::MAX), tiny);
    }

    #[test]
    fn parse_and_serde() {
        assert_eq!("5/2".parse::<Rational>().unwrap(), r(5, 2));
        assert_eq!(" -10/4 ".parse::<Rational>().unwrap(), r(-5, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        let v: Vec<Rational> = serde_json::from_str(r#"[3, "-7/21", "99999999999999999999"]"#).unwrap();
        assert_eq!(v[1], r(-1, 3));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["3","-1/3","99999999999999999999"]"#);
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(r(10, 3).floor(), r(3, 1));
        assert_eq!(r(10, 3).ceil(), r(4, 1));
        assert_eq!(r(-10, 3).floor(), r(-4, 1));
        assert_eq!(r(-10, 3).ceil(), r(-3, 1));
        assert_eq!(r(6, 3).ceil(), r(2, 1));
    }

    #[test]
    fn dot_int_matches_dot() {
        let a = RatVector::from(vec![r(1, 2), r(3, 1), r(-2, 1)]);
        let z = [4, -1, 7];
        assert_eq!(a.dot_int(&z).unwrap(), a.dot(&RatVector::from_ints(&z)).unwrap());
        let b = RatVector::from_ints(&[i64::MAX, i64::MAX]);
        assert_eq!(b.dot_int(&[i64::MAX, i64::MAX]).unwrap(), b.dot(&b).unwrap());
    }

    fn any_rational() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-1000i64..1000, 1i64..1000).prop_map(|(p, q)| r(p, q)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(p, q)| r(p, q)),
        ]
    }

    proptest! {
        #[test]
        fn lowest_terms(p in any::<i64>(), q in any::<i64>().prop_filter("nonzero", |q| *q != 0)) {
            let x = r(p, q);
            let (n, d) = (x.numer(), x.denom());
            prop_assert!(d > BigInt::zero());
            prop_assert!(n.gcd(&d).is_one());
            prop_assert_eq!(BigRational::new(BigInt::from(p), BigInt::from(q)), BigRational::new(n, d));
        }

        #[test]
        fn distributive(a in any_rational(), b in any_rational(), c in any_rational()) {
            prop_assert_eq!((&a + &b) * &c, &a * &c + &b * &c);
        }

        #[test]
        fn matches_bigrational(a in any_rational(), b in any_rational()) {
            prop_assert_eq!((&a + &b).to_big(), a.to_big() + b.to_big());
            prop_assert_eq!((&a - &b).to_big(), a.to_big() - b.to_big());
            prop_assert_eq!((&a * &b).to_big(), a.to_big() * b.to_big());
            prop_assert_eq!(a.cmp(&b), a.to_big().cmp(&b.to_big()));
            let text = a.to_string();
            prop_assert_eq!(text.parse::<Rational>().unwrap(), a);
        }
    }
}
