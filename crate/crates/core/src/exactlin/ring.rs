use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Every coefficient is stored as an exact rational. Over the integers and
/// prime fields the denominator is always one.
pub type Scalar = BigRational;

/// Coefficient ring. All supported rings are commutative and hereditary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integers,
    Rationals,
    PrimeField(u64),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
fn int(x: BigInt) -> Scalar {
    Scalar::from_integer(x)
}

impl Ring {
    pub fn prime_field(p: u64) -> Result<Ring> {
        if is_prime(p) {
            Ok(Ring::PrimeField(p))
        } else {
            Err(Error::InvalidRing(format!("{p} is not prime")))
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Ring::Integers)
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    pub fn from_i64(&self, x: i64) -> Scalar {
        self.reduce_int(BigInt::from(x))
    }

    fn reduce_int(&self, x: BigInt) -> Scalar {
        match self {
            Ring::PrimeField(p) => int(x.mod_floor(&BigInt::from(*p))),
            _ => int(x),
        }
    }

    /// Maps an arbitrary rational into the ring, failing when it has no image.
    pub fn element(&self, x: &BigRational) -> Result<Scalar> {
        match self {
            Ring::Rationals => Ok(x.clone()),
            Ring::Integers => {
                if x.is_integer() {
                    Ok(x.clone())
                } else {
                    Err(Error::InvalidRing(format!("{x} is not an integer")))
                }
            }
            Ring::PrimeField(p) => {
                let p = BigInt::from(*p);
                let den = x.denom().mod_floor(&p);
                if den.is_zero() {
                    return Err(Error::InvalidRing(format!("{x} has no image mod {p}")));
                }
                let inv = mod_inverse(&den, &p);
                Ok(int((x.numer() * inv).mod_floor(&p)))
            }
        }
    }

    /// Whether `x` is already a canonical element of this ring.
    pub fn contains(&self, x: &Scalar) -> bool {
        match self {
            Ring::Rationals => true,
            Ring::Integers => x.is_integer(),
            Ring::PrimeField(p) => {
                x.is_integer() && !x.numer().is_negative() && x.numer() < &BigInt::from(*p)
            }
        }
    }

    #[inline]
    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Ring::Integers => int(a.numer() + b.numer()),
            Ring::Rationals => a + b,
            Ring::PrimeField(_) => self.reduce_int(a.numer() + b.numer()),
        }
    }

    #[inline]
    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Ring::Integers => int(a.numer() - b.numer()),
            Ring::Rationals => a - b,
            Ring::PrimeField(_) => self.reduce_int(a.numer() - b.numer()),
        }
    }

    #[inline]
    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Ring::Integers => int(a.numer() * b.numer()),
            Ring::Rationals => a * b,
            Ring::PrimeField(_) => self.reduce_int(a.numer() * b.numer()),
        }
    }

    #[inline]
    pub fn neg(&self, a: &Scalar) -> Scalar {
        match self {
            Ring::PrimeField(_) => self.reduce_int(-a.numer()),
            _ => -a,
        }
    }

    /// `acc += a * b`
    #[inline]
    pub fn add_mul_assign(&self, acc: &mut Scalar, a: &Scalar, b: &Scalar) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *acc = self.add(acc, &self.mul(a, b));
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        match self {
            Ring::Integers => a.numer().abs().is_one(),
            _ => !a.is_zero(),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if !self.is_unit(a) {
            return None;
        }
        match self {
            Ring::Integers => Some(a.clone()),
            Ring::Rationals => Some(a.recip()),
            Ring::PrimeField(p) => {
                let p = BigInt::from(*p);
                Some(int(mod_inverse(a.numer(), &p)))
            }
        }
    }

    /// Division with remainder. Over a field the remainder is always zero;
    /// over the integers `|r| < |b|`.
    pub fn div_rem(&self, a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        match self {
            Ring::Integers => {
                let (q, r) = a.numer().div_rem(b.numer());
                (int(q), int(r))
            }
            _ => {
                let inv = self.inv(b).expect("division by zero");
                (self.mul(a, &inv), Scalar::zero())
            }
        }
    }

    /// Floor-style quotient used to reduce entries into `[0, |b|)` over the
    /// integers; exact division over a field.
    pub fn div_floor(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Ring::Integers => int(a.numer().div_floor(b.numer())),
            _ => self.div_rem(a, b).0,
        }
    }

    pub fn exact_div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if b.is_zero() {
            return if a.is_zero() {
                Some(Scalar::zero())
            } else {
                None
            };
        }
        let (q, r) = self.div_rem(a, b);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, d: &Scalar, a: &Scalar) -> bool {
        self.exact_div(a, d).is_some()
    }

    /// The unit `u` making `u * a` the canonical associate of `a`
    /// (nonnegative over the integers, one over a field).
    pub fn normalizing_unit(&self, a: &Scalar) -> Scalar {
        match self {
            Ring::Integers => {
                if a.is_negative() {
                    -Scalar::one()
                } else {
                    Scalar::one()
                }
            }
            _ => {
                if a.is_zero() {
                    Scalar::one()
                } else {
                    self.inv(a).unwrap()
                }
            }
        }
    }

    /// Reduces `a` modulo the ideal `(m)`. A zero modulus leaves `a` alone.
    pub fn reduce_mod(&self, a: &Scalar, m: &Scalar) -> Scalar {
        if m.is_zero() {
            return a.clone();
        }
        match self {
            Ring::Integers => int(a.numer().mod_floor(&m.numer().abs())),
            _ => Scalar::zero(),
        }
    }

    /// Strict "smaller pivot" order: absolute value over the integers and
    /// rationals, canonical representative over a prime field.
    pub fn pivot_less(&self, a: &Scalar, b: &Scalar) -> bool {
        match self {
            Ring::Integers | Ring::PrimeField(_) => a.numer().magnitude() < b.numer().magnitude(),
            Ring::Rationals => a.abs() < b.abs(),
        }
    }

    /// Whether a pivot of this size can never be beaten.
    pub fn is_minimal_pivot(&self, a: &Scalar) -> bool {
        match self {
            Ring::Integers | Ring::PrimeField(_) => a.numer().magnitude().is_one(),
            Ring::Rationals => a.abs().is_one(),
        }
    }

    /// Small random element, used for randomized section choices and probes.
    pub fn random_small<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        self.from_i64(rng.random_range(-bound..=bound))
    }

    /// Image of an integer-valued scalar under the canonical map from Z.
    pub fn from_integer_scalar(&self, x: &Scalar) -> Result<Scalar> {
        self.element(x)
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    e.x.mod_floor(p)
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ring> {
        match s.trim() {
            "Z" | "z" | "ZZ" => Ok(Ring::Integers),
            "Q" | "q" | "QQ" => Ok(Ring::Rationals),
            other => {
                let digits = other
                    .strip_prefix('F')
                    .or_else(|| other.strip_prefix('f'))
                    .ok_or_else(|| Error::InvalidRing(format!("unknown ring `{other}`")))?;
                let p: u64 = digits
                    .parse()
                    .map_err(|_| Error::InvalidRing(format!("unknown ring `{other}`")))?;
                Ring::prime_field(p)
            }
        }
    }
}

impl Serialize for Ring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Ring, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// JSON encoding of scalars: integers that fit in an `i64` are plain
/// numbers, everything else is a decimal string (`"-12"`, `"3/4"`).
pub mod scalar_json {
    use super::*;
    use serde_json::Value;

    pub fn to_value(x: &Scalar) -> Value {
        if x.is_integer() {
            if let Some(v) = x.numer().to_i64() {
                return Value::from(v);
            }
        }
        Value::String(x.to_string())
    }

    pub fn from_value(v: &Value) -> Result<Scalar> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Scalar::from_integer(BigInt::from(i)))
                } else if let Some(u) = n.as_u64() {
                    Ok(Scalar::from_integer(BigInt::from(u)))
                } else {
                    Err(Error::Format(format!("non-integral number {n}")))
                }
            }
            Value::String(s) => parse_scalar(s),
            other => Err(Error::Format(format!("expected a scalar, found {other}"))),
        }
    }

    pub fn parse_scalar(s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Format(format!("malformed scalar `{s}`"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Scalar::new(n, d))
        } else {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Scalar::from_integer(n))
        }
    }
}
