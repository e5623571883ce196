//! Exact coefficient fields with involution.
//!
//! Three base fields are supported: the rationals, the gaussian rationals
//! `Q(i)`, and prime fields `GF(p)`. The involution is either the identity
//! or (on the gaussian rationals) coefficient conjugation. A field spec is
//! positive definite exactly for `(rationals, identity)` and
//! `(gaussian rationals, conjugation)`.

mod laurent;
mod poly;
mod ratfun;

pub use laurent::LaurentPoly;
pub use poly::Poly;
pub use ratfun::RationalFunction;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("conjugation is only defined on the gaussian rationals")]
    InvalidInvolution,
    #[error("unknown field selector {0:?} (expected \"q\", \"qi\" or \"gf:<p>\")")]
    UnknownSelector(String),
    #[error("cannot parse scalar literal {literal:?} for field {field}: {reason}")]
    BadLiteral {
        literal: String,
        field: String,
        reason: String,
    },
}

// ---- Field specification ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    GaussianRationals,
    PrimeField(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Involution {
    Identity,
    Conjugation,
}

/// An exact coefficient field together with its involution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    kind: FieldKind,
    involution: Involution,
}

impl FieldSpec {
    pub fn new(kind: FieldKind, involution: Involution) -> Result<FieldSpec, ScalarError> {
        if involution == Involution::Conjugation && kind != FieldKind::GaussianRationals {
            return Err(ScalarError::InvalidInvolution);
        }
        if let FieldKind::PrimeField(p) = kind {
            if !is_prime(p) {
                return Err(ScalarError::NotPrime(p));
            }
        }
        Ok(FieldSpec { kind, involution })
    }

    /// The rationals with the identity involution.
    pub fn rationals() -> FieldSpec {
        FieldSpec {
            kind: FieldKind::Rationals,
            involution: Involution::Identity,
        }
    }

    /// The gaussian rationals with conjugation.
    pub fn gaussian_rationals() -> FieldSpec {
        FieldSpec {
            kind: FieldKind::GaussianRationals,
            involution: Involution::Conjugation,
        }
    }

    /// `GF(p)` with the identity involution.
    pub fn prime_field(p: u64) -> Result<FieldSpec, ScalarError> {
        FieldSpec::new(FieldKind::PrimeField(p), Involution::Identity)
    }

    /// Parses a field selector: `"q"`, `"qi"` or `"gf:<p>"`.
    pub fn parse_selector(s: &str) -> Result<FieldSpec, ScalarError> {
        match s {
            "q" => Ok(FieldSpec::rationals()),
            "qi" => Ok(FieldSpec::gaussian_rationals()),
            _ => {
                if let Some(p) = s.strip_prefix("gf:") {
                    let p: u64 = p
                        .parse()
                        .map_err(|_| ScalarError::UnknownSelector(s.to_string()))?;
                    FieldSpec::prime_field(p)
                } else {
                    Err(ScalarError::UnknownSelector(s.to_string()))
                }
            }
        }
    }

    pub fn selector(&self) -> String {
        match self.kind {
            FieldKind::Rationals => "q".to_string(),
            FieldKind::GaussianRationals => "qi".to_string(),
            FieldKind::PrimeField(p) => format!("gf:{p}"),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn involution(&self) -> Involution {
        self.involution
    }

    /// True exactly for `(rationals, identity)` and
    /// `(gaussian rationals, conjugation)`.
    pub fn positive_definite(&self) -> bool {
        matches!(
            (self.kind, self.involution),
            (FieldKind::Rationals, Involution::Identity)
                | (FieldKind::GaussianRationals, Involution::Conjugation)
        )
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.involution) {
            (FieldKind::Rationals, _) => write!(f, "Q"),
            (FieldKind::GaussianRationals, Involution::Conjugation) => write!(f, "Q(i)"),
            (FieldKind::GaussianRationals, Involution::Identity) => write!(f, "Q(i) [id]"),
            (FieldKind::PrimeField(p), _) => write!(f, "GF({p})"),
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---- Scalars ----

#[derive(Clone, Debug, PartialEq, Eq)]
enum Value {
    Rat(BigRational),
    Gauss(BigRational, BigRational),
    Mod(u64),
}

/// An exact field element, tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    spec: FieldSpec,
    value: Value,
}

impl Scalar {
    pub fn zero(spec: FieldSpec) -> Scalar {
        Scalar::from_i64(spec, 0)
    }

    pub fn one(spec: FieldSpec) -> Scalar {
        Scalar::from_i64(spec, 1)
    }

    pub fn from_i64(spec: FieldSpec, n: i64) -> Scalar {
        let value = match spec.kind {
            FieldKind::Rationals => Value::Rat(BigRational::from_integer(n.into())),
            FieldKind::GaussianRationals => Value::Gauss(
                BigRational::from_integer(n.into()),
                BigRational::zero(),
            ),
            FieldKind::PrimeField(p) => Value::Mod((n.rem_euclid(p as i64)) as u64 % p),
        };
        Scalar { spec, value }
    }

    pub fn from_ratio(spec: FieldSpec, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        match spec.kind {
            FieldKind::Rationals => Scalar {
                spec,
                value: Value::Rat(BigRational::new(num.into(), den.into())),
            },
            FieldKind::GaussianRationals => Scalar {
                spec,
                value: Value::Gauss(BigRational::new(num.into(), den.into()), BigRational::zero()),
            },
            FieldKind::PrimeField(_) => {
                let d = Scalar::from_i64(spec, den);
                Scalar::from_i64(spec, num) * d.inv().expect("den nonzero mod p")
            }
        }
    }

    /// Gaussian rational `re + im·i`.
    pub fn gauss(spec: FieldSpec, re: (i64, i64), im: (i64, i64)) -> Scalar {
        assert_eq!(spec.kind, FieldKind::GaussianRationals);
        Scalar {
            spec,
            value: Value::Gauss(
                BigRational::new(re.0.into(), re.1.into()),
                BigRational::new(im.0.into(), im.1.into()),
            ),
        }
    }

    /// The imaginary unit of the gaussian rationals.
    pub fn i(spec: FieldSpec) -> Scalar {
        Scalar::gauss(spec, (0, 1), (1, 1))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rat(r) => r.is_zero(),
            Value::Gauss(re, im) => re.is_zero() && im.is_zero(),
            Value::Mod(k) => *k == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Scalar::one(self.spec)
    }

    fn check_same_field(&self, other: &Scalar) {
        assert_eq!(
            self.spec, other.spec,
            "scalar field mismatch: {} vs {}",
            self.spec, other.spec
        );
    }

    /// Applies the field's declared involution.
    pub fn star(&self) -> Scalar {
        match (&self.value, self.spec.involution) {
            (Value::Gauss(re, im), Involution::Conjugation) => Scalar {
                spec: self.spec,
                value: Value::Gauss(re.clone(), -im.clone()),
            },
            _ => self.clone(),
        }
    }

    /// Multiplicative inverse; `Err` on zero.
    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let value = match &self.value {
            Value::Rat(r) => Value::Rat(r.recip()),
            Value::Gauss(re, im) => {
                let norm = re * re + im * im;
                Value::Gauss(re / &norm, -(im / &norm))
            }
            Value::Mod(k) => {
                let p = match self.spec.kind {
                    FieldKind::PrimeField(p) => p,
                    _ => unreachable!(),
                };
                Value::Mod(pow_mod(*k, p - 2, p))
            }
        };
        Ok(Scalar {
            spec: self.spec,
            value,
        })
    }

    /// Parses a scalar literal: `"a/b"` for rationals, `"a/b+c/di"` (with
    /// optional parts) for gaussian rationals, `"k"` for prime fields.
    pub fn parse(spec: FieldSpec, s: &str) -> Result<Scalar, ScalarError> {
        let bad = |reason: &str| ScalarError::BadLiteral {
            literal: s.to_string(),
            field: spec.to_string(),
            reason: reason.to_string(),
        };
        let s = s.trim();
        if s.is_empty() {
            return Err(bad("empty literal"));
        }
        match spec.kind {
            FieldKind::Rationals => {
                let r = BigRational::from_str(s).map_err(|e| bad(&e.to_string()))?;
                Ok(Scalar {
                    spec,
                    value: Value::Rat(r),
                })
            }
            FieldKind::PrimeField(p) => {
                let k: i64 = s.parse().map_err(|_| bad("expected an integer"))?;
                Ok(Scalar {
                    spec,
                    value: Value::Mod(k.rem_euclid(p as i64) as u64 % p),
                })
            }
            FieldKind::GaussianRationals => {
                let parse_rat = |t: &str| -> Result<BigRational, ScalarError> {
                    let t = t.strip_prefix('+').unwrap_or(t);
                    match t {
                        "" => Ok(BigRational::one()),
                        "-" => Ok(-BigRational::one()),
                        _ => BigRational::from_str(t).map_err(|e| bad(&e.to_string())),
                    }
                };
                match s.strip_suffix('i') {
                    None => Ok(Scalar {
                        spec,
                        value: Value::Gauss(parse_rat(s)?, BigRational::zero()),
                    }),
                    Some(t) => {
                        // Last sign not in first position splits re from im.
                        let bytes = t.as_bytes();
                        let split = (1..bytes.len()).rev().find(|&i| {
                            (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/'
                        });
                        match split {
                            Some(i) => Ok(Scalar {
                                spec,
                                value: Value::Gauss(parse_rat(&t[..i])?, parse_rat(&t[i..])?),
                            }),
                            None => Ok(Scalar {
                                spec,
                                value: Value::Gauss(BigRational::zero(), parse_rat(t)?),
                            }),
                        }
                    }
                }
            }
        }
    }

    /// True when the canonical display needs parentheses inside a product.
    pub(crate) fn is_composite_display(&self) -> bool {
        match &self.value {
            Value::Gauss(_, im) => !im.is_zero(),
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rat(r) => write!(f, "{r}"),
            Value::Mod(k) => write!(f, "{k}"),
            Value::Gauss(re, im) => {
                if im.is_zero() {
                    write!(f, "{re}")
                } else if re.is_zero() {
                    write!(f, "{im}i")
                } else if im.is_negative() {
                    write!(f, "{re}-{}i", -im)
                } else {
                    write!(f, "{re}+{im}i")
                }
            }
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check_same_field(rhs);
        let value = match (&self.value, &rhs.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a + b),
            (Value::Gauss(a, b), Value::Gauss(c, d)) => Value::Gauss(a + c, b + d),
            (Value::Mod(a), Value::Mod(b)) => {
                let p = match self.spec.kind {
                    FieldKind::PrimeField(p) => p,
                    _ => unreachable!(),
                };
                Value::Mod(((*a as u128 + *b as u128) % p as u128) as u64)
            }
            _ => unreachable!("same spec implies same representation"),
        };
        Scalar {
            spec: self.spec,
            value,
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check_same_field(rhs);
        let value = match (&self.value, &rhs.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a * b),
            (Value::Gauss(a, b), Value::Gauss(c, d)) => {
                Value::Gauss(a * c - b * d, a * d + b * c)
            }
            (Value::Mod(a), Value::Mod(b)) => {
                let p = match self.spec.kind {
                    FieldKind::PrimeField(p) => p,
                    _ => unreachable!(),
                };
                Value::Mod(mul_mod(*a, *b, p))
            }
            _ => unreachable!("same spec implies same representation"),
        };
        Scalar {
            spec: self.spec,
            value,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let value = match &self.value {
            Value::Rat(a) => Value::Rat(-a),
            Value::Gauss(a, b) => Value::Gauss(-a, -b),
            Value::Mod(a) => {
                let p = match self.spec.kind {
                    FieldKind::PrimeField(p) => p,
                    _ => unreachable!(),
                };
                Value::Mod((p - a) % p)
            }
        };
        Scalar {
            spec: self.spec,
            value,
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Exact integer helper for rank-style counts.
pub fn big_int(n: i64) -> BigInt {
    n.into()
}
