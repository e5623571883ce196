//! Rational functions `K(x)` in canonical reduced form: monic denominator,
//! coprime numerator and denominator. The involution substitutes
//! `x -> x^-1`, conjugates coefficients, and clears negative powers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{FieldSpec, LaurentPoly, Poly, Scalar, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Builds `num/den` in canonical form; `Err` on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Result<RationalFunction, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        assert_eq!(num.spec(), den.spec(), "rational function field mismatch");
        Ok(RationalFunction::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> RationalFunction {
        let spec = num.spec();
        if num.is_zero() {
            return RationalFunction {
                num,
                den: Poly::one(spec),
            };
        }
        let g = num.gcd(&den);
        let (num, num_r) = num.div_rem(&g);
        debug_assert!(num_r.is_zero());
        let (den, den_r) = den.div_rem(&g);
        debug_assert!(den_r.is_zero());
        let lc_inv = den
            .leading_coeff()
            .expect("nonzero denominator")
            .inv()
            .expect("leading coefficient is nonzero");
        RationalFunction {
            num: num.scalar_mul(&lc_inv),
            den: den.scalar_mul(&lc_inv),
        }
    }

    pub fn zero(spec: FieldSpec) -> RationalFunction {
        RationalFunction {
            num: Poly::zero(spec),
            den: Poly::one(spec),
        }
    }

    pub fn one(spec: FieldSpec) -> RationalFunction {
        RationalFunction {
            num: Poly::one(spec),
            den: Poly::one(spec),
        }
    }

    pub fn x(spec: FieldSpec) -> RationalFunction {
        RationalFunction {
            num: Poly::x(spec),
            den: Poly::one(spec),
        }
    }

    pub fn from_scalar(c: Scalar) -> RationalFunction {
        let spec = c.spec();
        RationalFunction {
            num: Poly::from_scalar(c),
            den: Poly::one(spec),
        }
    }

    pub fn from_poly(p: Poly) -> RationalFunction {
        let spec = p.spec();
        RationalFunction {
            num: p,
            den: Poly::one(spec),
        }
    }

    pub fn from_i64(spec: FieldSpec, num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_i64(spec, num), Poly::from_i64(spec, den))
            .expect("nonzero denominator")
    }

    /// Embeds a Laurent polynomial by clearing negative powers.
    pub fn from_laurent(p: &LaurentPoly) -> RationalFunction {
        let spec = p.spec();
        let (Some(lo), Some(hi)) = (p.min_exp(), p.max_exp()) else {
            return RationalFunction::zero(spec);
        };
        let shift = (-lo).max(0) as usize;
        let mut coeffs = vec![Scalar::zero(spec); (hi + shift as i64) as usize + 1];
        for (e, c) in p.terms() {
            coeffs[(e + shift as i64) as usize] = c.clone();
        }
        RationalFunction::reduce(
            Poly::from_coeffs(spec, coeffs),
            Poly::one(spec).shift(shift),
        )
    }

    pub fn spec(&self) -> FieldSpec {
        self.num.spec()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Total polynomial degree, the pivoting complexity measure.
    pub fn complexity(&self) -> usize {
        self.num.degree().unwrap_or(0) + self.den.degree().unwrap_or(0)
    }

    pub fn inv(&self) -> Result<RationalFunction, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(RationalFunction::reduce(self.den.clone(), self.num.clone()))
    }

    /// The involution `x -> x^-1` with coefficient conjugation, normalized
    /// back to a polynomial fraction.
    pub fn star(&self) -> RationalFunction {
        if self.is_zero() {
            return self.clone();
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let rev_num = self.num.conj().reversed();
        let rev_den = self.den.conj().reversed();
        if dd >= dn {
            RationalFunction::reduce(rev_num.shift(dd - dn), rev_den)
        } else {
            RationalFunction::reduce(rev_num, rev_den.shift(dn - dd))
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::reduce(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: RationalFunction) -> RationalFunction {
        &self + &rhs
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: RationalFunction) -> RationalFunction {
        &self - &rhs
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        &self * &rhs
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            let s = p.to_string();
            let terms = p.coeffs().iter().filter(|c| !c.is_zero()).count();
            if terms > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn canonical_form_is_reduced_and_monic() {
        // (2x^2 - 2) / (4x - 4) = (x + 1) / 2
        let r = RationalFunction::from_i64(q(), &[-2, 0, 2], &[-4, 4]);
        assert_eq!(r.denominator(), &Poly::one(q()));
        assert_eq!(r.numerator(), &Poly::from_coeffs(
            q(),
            vec![Scalar::from_ratio(q(), 1, 2), Scalar::from_ratio(q(), 1, 2)],
        ));
    }

    #[test]
    fn star_of_x_is_one_over_x() {
        let x = RationalFunction::x(q());
        let s = x.star();
        assert_eq!(s, RationalFunction::from_i64(q(), &[1], &[0, 1]));
        assert_eq!(s.to_string(), "1/x");
        assert_eq!(s.star(), x);
    }

    #[test]
    fn star_gaussian_example() {
        // star((x+i)/1) = (1 - i x)/x
        let qi = FieldSpec::gaussian_rationals();
        let num = Poly::from_coeffs(qi, vec![Scalar::i(qi), Scalar::one(qi)]);
        let r = RationalFunction::from_poly(num);
        let s = r.star();
        let expected = RationalFunction::new(
            Poly::from_coeffs(qi, vec![Scalar::one(qi), -Scalar::i(qi)]),
            Poly::x(qi),
        )
        .unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn inv_swaps_parts() {
        // inv((x+1)/(x-1)) = (x-1)/(x+1)
        let r = RationalFunction::from_i64(q(), &[1, 1], &[-1, 1]);
        assert_eq!(r.inv().unwrap(), RationalFunction::from_i64(q(), &[-1, 1], &[1, 1]));
        assert!(RationalFunction::zero(q()).inv().is_err());
    }

    #[test]
    fn display_matches_reference_format() {
        let r = RationalFunction::from_i64(q(), &[1, 1], &[-1, 1]);
        assert_eq!(r.to_string(), "(x+1)/(x-1)");
    }

    #[test]
    fn from_laurent_clears_negative_powers() {
        let p = LaurentPoly::from_terms(q(), &[(-1, 3), (0, 2)]);
        let r = RationalFunction::from_laurent(&p);
        // (3 + 2x)/x
        assert_eq!(r, RationalFunction::from_i64(q(), &[3, 2], &[0, 1]));
        assert_eq!(
            RationalFunction::from_laurent(&LaurentPoly::zero(q())),
            RationalFunction::zero(q())
        );
        assert_eq!(
            RationalFunction::from_laurent(&LaurentPoly::x(q())),
            RationalFunction::x(q())
        );
    }

    #[test]
    fn cross_multiplication_equality() {
        let a = RationalFunction::from_i64(q(), &[1, 2], &[3, 1]);
        let b = RationalFunction::from_i64(q(), &[2, 4], &[6, 2]);
        assert_eq!(a, b);
        let lhs = a.numerator() * b.denominator();
        let rhs = b.numerator() * a.denominator();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gf2_symmetry_failure_ingredient() {
        // Over GF(2): 1 + x * star(x) = 1 + 1 = 0.
        let g2 = FieldSpec::prime_field(2).unwrap();
        let x = RationalFunction::x(g2);
        let s = &RationalFunction::one(g2) + &(&x * &x.star());
        assert!(s.is_zero());
    }
}
