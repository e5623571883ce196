//! Laurent polynomials `K[x, x^-1]` with the involution `x -> x^-1`
//! extended over the coefficient involution.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{FieldSpec, Scalar};

/// A Laurent polynomial: a finite map from integer exponents to nonzero
/// coefficients. The empty map is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    spec: FieldSpec,
    terms: BTreeMap<i64, Scalar>,
}

impl LaurentPoly {
    pub fn zero(spec: FieldSpec) -> LaurentPoly {
        LaurentPoly {
            spec,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(spec: FieldSpec) -> LaurentPoly {
        LaurentPoly::monomial(spec, 0, Scalar::one(spec))
    }

    /// The generator `x`.
    pub fn x(spec: FieldSpec) -> LaurentPoly {
        LaurentPoly::monomial(spec, 1, Scalar::one(spec))
    }

    pub fn monomial(spec: FieldSpec, exp: i64, coeff: Scalar) -> LaurentPoly {
        assert_eq!(coeff.spec(), spec, "scalar field mismatch");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { spec, terms }
    }

    pub fn from_terms(spec: FieldSpec, terms: &[(i64, i64)]) -> LaurentPoly {
        let mut out = LaurentPoly::zero(spec);
        for (exp, c) in terms {
            out = &out + &LaurentPoly::monomial(spec, *exp, Scalar::from_i64(spec, *c));
        }
        out
    }

    pub fn from_scalar(coeff: Scalar) -> LaurentPoly {
        LaurentPoly::monomial(coeff.spec(), 0, coeff)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0).is_one()
    }

    pub fn coeff(&self, exp: i64) -> Scalar {
        self.terms
            .get(&exp)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.spec))
    }

    /// Exponent-coefficient pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn scalar_mul(&self, c: &Scalar) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(self.spec);
        }
        LaurentPoly {
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (*e, a * c))
                .collect(),
        }
    }

    /// The involution: coefficient at `n` becomes the conjugate of the input
    /// coefficient at `-n`.
    pub fn star(&self) -> LaurentPoly {
        LaurentPoly {
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (-*e, c.star()))
                .collect(),
        }
    }

    fn insert_add(terms: &mut BTreeMap<i64, Scalar>, exp: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match terms.remove(&exp) {
            None => {
                terms.insert(exp, c);
            }
            Some(existing) => {
                let sum = &existing + &c;
                if !sum.is_zero() {
                    terms.insert(exp, sum);
                }
            }
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.spec, rhs.spec, "laurent field mismatch");
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            LaurentPoly::insert_add(&mut terms, *e, c.clone());
        }
        LaurentPoly {
            spec: self.spec,
            terms,
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            spec: self.spec,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.spec, rhs.spec, "laurent field mismatch");
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                LaurentPoly::insert_add(&mut terms, ea + eb, ca * cb);
            }
        }
        LaurentPoly {
            spec: self.spec,
            terms,
        }
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, c) in &self.terms {
            let cs = c.to_string();
            let (sign, mag) = match cs.strip_prefix('-') {
                Some(rest) if !c.is_composite_display() => ("-", rest.to_string()),
                _ => ("+", cs),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{sign}")?;
            }
            let coeff_part = if c.is_composite_display() {
                format!("({mag})")
            } else {
                mag
            };
            match exp {
                0 => write!(f, "{coeff_part}")?,
                _ => {
                    if coeff_part != "1" {
                        write!(f, "{coeff_part}")?;
                    }
                    if *exp == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{exp}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn star_swaps_exponents() {
        let x = LaurentPoly::x(q());
        let xinv = LaurentPoly::monomial(q(), -1, Scalar::one(q()));
        assert_eq!(x.star(), xinv);

        // 2 + 3x -> 2 + 3x^-1
        let p = LaurentPoly::from_terms(q(), &[(0, 2), (1, 3)]);
        assert_eq!(p.star(), LaurentPoly::from_terms(q(), &[(0, 2), (-1, 3)]));
    }

    #[test]
    fn star_conjugates_coefficients() {
        let qi = FieldSpec::gaussian_rationals();
        let p = LaurentPoly::monomial(qi, 2, Scalar::i(qi));
        let s = p.star();
        assert_eq!(s.coeff(-2), -Scalar::i(qi));
    }

    #[test]
    fn star_is_involutive() {
        let p = LaurentPoly::from_terms(q(), &[(-2, 5), (0, 1), (3, -7)]);
        assert_eq!(p.star().star(), p);
    }

    #[test]
    fn arithmetic_cancels_to_zero() {
        let p = LaurentPoly::from_terms(q(), &[(1, 1), (-1, 2)]);
        assert!((&p - &p).is_zero());
        let product = &p * &LaurentPoly::zero(q());
        assert!(product.is_zero());
    }

    #[test]
    fn multiplication_adds_exponents() {
        let x = LaurentPoly::x(q());
        let xinv = x.star();
        assert!((&x * &xinv).is_one());
        let p = LaurentPoly::from_terms(q(), &[(0, 1), (1, 1)]); // 1 + x
        let sq = &p * &p;
        assert_eq!(sq, LaurentPoly::from_terms(q(), &[(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn display_format() {
        let p = LaurentPoly::from_terms(q(), &[(-1, 3), (0, 2)]);
        assert_eq!(p.to_string(), "3x^-1+2");
        assert_eq!(LaurentPoly::x(q()).to_string(), "x");
        assert_eq!(LaurentPoly::zero(q()).to_string(), "0");
        let p = LaurentPoly::from_terms(q(), &[(0, 1), (2, -1)]);
        assert_eq!(p.to_string(), "1-x^2");
    }
}
