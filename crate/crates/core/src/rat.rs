//! Exact rational scalars.
//!
//! Every correctness-bearing quantity in this crate is a [`Rat`]: an
//! arbitrary-precision rational kept in lowest terms with a positive
//! denominator. [`Value`] extends it with a minus-infinity sentinel used by
//! valuation tables to mark infeasible bundles.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Finite exact rational. Always in lowest terms, denominator > 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Largest integer ≤ self.
    pub fn floor(&self) -> Rat {
        Rat(self.0.floor())
    }

    /// Smallest integer ≥ self.
    pub fn ceil(&self) -> Rat {
        Rat(self.0.ceil())
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "division by zero");
        Rat(self.0.recip())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Integer value if this rational is an integer fitting in i64.
    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

// Debug defers to Display; rationals are noisy enough already.
impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{input}`: {reason}")]
pub struct ParseRatError {
    pub input: String,
    pub reason: String,
}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `p/q` or a bare integer. Unicode minus is normalized.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('\u{2212}', "-");
        let err = |reason: &str| ParseRatError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let parse_int = |t: &str| BigInt::from_str(t.trim()).map_err(|_| err("not an integer"));
        match norm.split_once('/') {
            None => Ok(Rat(BigRational::from_integer(parse_int(&norm)?))),
            Some((p, q)) => {
                let numer = parse_int(p)?;
                let denom = parse_int(q)?;
                if denom.is_zero() {
                    return Err(err("zero denominator"));
                }
                Ok(Rat(BigRational::new(numer, denom)))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // Integers that fit in i64 go out as JSON numbers, everything else
        // as a "p/q" string (lowest terms, positive denominator).
        if let Some(n) = self.to_i64() {
            serializer.serialize_i64(n)
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match v {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rat::from_int(i))
                } else {
                    Err(D::Error::custom(format!(
                        "non-integer number {n}: write exact rationals as \"p/q\" strings"
                    )))
                }
            }
            serde_json::Value::String(s) => Rat::from_str(&s).map_err(D::Error::custom),
            other => Err(D::Error::custom(format!(
                "expected integer or \"p/q\" string, found {other}"
            ))),
        }
    }
}

/// A rational extended with minus infinity. Used for valuation values where
/// −∞ marks an infeasible bundle of trades.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Value {
    NegInf,
    Fin(Rat),
}

impl Value {
    pub fn zero() -> Self {
        Value::Fin(Rat::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Fin(_))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Value::Fin(r) => Some(r),
            Value::NegInf => None,
        }
    }

    pub fn expect_finite(&self) -> &Rat {
        self.finite().expect("value is minus infinity")
    }
}

impl From<Rat> for Value {
    fn from(r: Rat) -> Self {
        Value::Fin(r)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Fin(Rat::from_int(n))
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::NegInf, Value::NegInf) => Ordering::Equal,
            (Value::NegInf, Value::Fin(_)) => Ordering::Less,
            (Value::Fin(_), Value::NegInf) => Ordering::Greater,
            (Value::Fin(a), Value::Fin(b)) => a.cmp(b),
        }
    }
}

// −∞ absorbs addition with any finite value (footnote-style infeasibility).
impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Fin(a), Value::Fin(b)) => Value::Fin(a + b),
            _ => Value::NegInf,
        }
    }
}

impl Add<&Rat> for Value {
    type Output = Value;
    fn add(self, rhs: &Rat) -> Value {
        match self {
            Value::Fin(a) => Value::Fin(a + rhs),
            Value::NegInf => Value::NegInf,
        }
    }
}

impl Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::NegInf => write!(f, "-inf"),
            Value::Fin(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Value {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('\u{2212}', "-");
        if norm == "-inf" {
            Ok(Value::NegInf)
        } else {
            Rat::from_str(&norm).map(Value::Fin)
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::NegInf => serializer.serialize_str("-inf"),
            Value::Fin(r) => r.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match v {
            serde_json::Value::String(s) => Value::from_str(&s).map_err(D::Error::custom),
            other => serde_json::from_value::<Rat>(other)
                .map(Value::Fin)
                .map_err(D::Error::custom),
        }
    }
}

/// Shorthand for tests and builders: `rat(1, 2)` is 1/2.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_display() {
        assert_eq!(rat(2, 4).to_string(), "1/2");
        assert_eq!(rat(-2, 4).to_string(), "-1/2");
        assert_eq!(rat(3, -6).to_string(), "-1/2");
        assert_eq!(rat(4, 2).to_string(), "2");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "-7", "1/2", "-3/4", "22/7"] {
            let r: Rat = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!("\u{2212}1/2".parse::<Rat>().unwrap(), rat(-1, 2));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("a/b".parse::<Rat>().is_err());
    }

    #[test]
    fn exact_arithmetic() {
        let a = rat(1, 3);
        let b = rat(1, 6);
        assert_eq!((a.clone() + b.clone()) - b.clone(), a);
        assert_eq!(a.clone() * b.clone(), rat(1, 18));
        assert_eq!(a / b, rat(2, 1));
    }

    #[test]
    fn neg_inf_ordering_and_absorption() {
        let inf = Value::NegInf;
        let z = Value::zero();
        assert!(inf < z);
        assert!(inf < Value::from(-1_000_000));
        assert_eq!(inf.clone() + z, Value::NegInf);
        assert_eq!(Value::from(3) + Value::from(4), Value::from(7));
    }

    #[test]
    fn value_parsing() {
        assert_eq!("-inf".parse::<Value>().unwrap(), Value::NegInf);
        assert_eq!("\u{2212}inf".parse::<Value>().unwrap(), Value::NegInf);
        assert_eq!("-1/2".parse::<Value>().unwrap(), Value::Fin(rat(-1, 2)));
    }

    #[test]
    fn serde_forms() {
        assert_eq!(serde_json::to_string(&rat(1, 2)).unwrap(), "\"1/2\"");
        assert_eq!(serde_json::to_string(&rat(5, 1)).unwrap(), "5");
        assert_eq!(serde_json::from_str::<Rat>("\"3/9\"").unwrap(), rat(1, 3));
        assert_eq!(serde_json::from_str::<Rat>("-4").unwrap(), rat(-4, 1));
        assert!(serde_json::from_str::<Rat>("0.5").is_err());
        assert_eq!(
            serde_json::from_str::<Value>("\"-inf\"").unwrap(),
            Value::NegInf
        );
        assert_eq!(serde_json::to_string(&Value::NegInf).unwrap(), "\"-inf\"");
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(rat(1, 2).floor(), rat(0, 1));
        assert_eq!(rat(1, 2).ceil(), rat(1, 1));
        assert_eq!(rat(-1, 2).floor(), rat(-1, 1));
        assert_eq!(rat(-1, 2).ceil(), rat(0, 1));
        assert_eq!(rat(3, 1).floor(), rat(3, 1));
    }
}
