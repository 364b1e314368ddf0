//! Exact rationals with a machine-word fast path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// An exact rational number. Values fitting `i64/i64` are stored inline; the
/// representation is canonical, so derived equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Q {
    Small(Ratio<i64>),
    Big(BigRational),
}

fn shrink(b: BigRational) -> Q {
    match (b.numer().to_i64(), b.denom().to_i64()) {
        (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Q::Small(Ratio::new_raw(n, d)),
        _ => Q::Big(b),
    }
}

impl Q {
    pub fn zero() -> Q {
        Q::Small(Ratio::zero())
    }

    pub fn one() -> Q {
        Q::Small(Ratio::one())
    }

    pub fn from_int(n: i64) -> Q {
        if n == i64::MIN {
            Q::Big(BigRational::from_integer(BigInt::from(n)))
        } else {
            Q::Small(Ratio::from_integer(n))
        }
    }

    pub fn new(n: i64, d: i64) -> Q {
        Q::from_big(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big(b: BigRational) -> Q {
        shrink(b)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Q::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(r) => r.is_zero(),
            Q::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(r) if r.is_one())
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(r) => r.is_integer(),
            Q::Big(b) => b.is_integer(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Q::Small(r) if r.is_integer() => Some(*r.numer()),
            _ => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(r) => r.is_negative(),
            Q::Big(b) => b.is_negative(),
        }
    }

    pub fn inv(&self) -> Q {
        Q::one() / self.clone()
    }

    /// Residue modulo a prime `p`; `None` when `p` divides the denominator.
    pub fn mod_p(&self, p: u64) -> Option<u64> {
        let b = self.to_big();
        let pb = BigInt::from(p);
        let m = |x: &BigInt| -> u64 {
            let r = x % &pb;
            let r = if r.is_negative() { r + &pb } else { r };
            r.to_u64().unwrap()
        };
        let n = m(b.numer());
        let d = m(b.denom());
        if d == 0 {
            return None;
        }
        Some(mulmod(n, powmod(d, p - 2, p), p))
    }
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident, $op:tt) => {
        impl $tr for Q {
            type Output = Q;
            fn $m(self, o: Q) -> Q {
                if let (Q::Small(a), Q::Small(b)) = (&self, &o) {
                    if let Some(r) = a.$checked(b) {
                        if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                            return Q::Small(r);
                        }
                    }
                }
                shrink(self.to_big() $op o.to_big())
            }
        }
        impl<'a> $tr<&'a Q> for &'a Q {
            type Output = Q;
            fn $m(self, o: &Q) -> Q {
                if let (Q::Small(a), Q::Small(b)) = (self, o) {
                    if let Some(r) = a.$checked(b) {
                        if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                            return Q::Small(r);
                        }
                    }
                }
                shrink(self.to_big() $op o.to_big())
            }
        }
    };
}

binop!(Add, add, checked_add, +);
binop!(Sub, sub, checked_sub, -);
binop!(Mul, mul, checked_mul, *);
binop!(Div, div, checked_div, /);

impl AddAssign for Q {
    fn add_assign(&mut self, o: Q) {
        *self = &*self + &o;
    }
}

impl SubAssign for Q {
    fn sub_assign(&mut self, o: Q) {
        *self = &*self - &o;
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(r) => Q::Small(-r),
            Q::Big(b) => shrink(-b),
        }
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        match (self, o) {
            (Q::Small(a), Q::Small(b)) => {
                let l = *a.numer() as i128 * *b.denom() as i128;
                let r = *b.numer() as i128 * *a.denom() as i128;
                l.cmp(&r)
            }
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::from_int(n)
    }
}

impl Default for Q {
    fn default() -> Q {
        Q::zero()
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(r) => write!(f, "{}", r),
            Q::Big(b) => write!(f, "{}", b),
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("not a rational number: {0:?}")]
pub struct ParseQError(pub String);

impl FromStr for Q {
    type Err = ParseQError;
    fn from_str(s: &str) -> Result<Q, ParseQError> {
        let err = || ParseQError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(shrink(BigRational::new(n, d)))
    }
}

impl serde::Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Q {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Q::from_int)
                .ok_or_else(|| serde::de::Error::custom(format!("non-integer number {n}; write rationals as \"p/q\""))),
            other => Err(serde::de::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}
