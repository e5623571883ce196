//! Dense univariate polynomials over [`Scalar`], the building block for
//! rational functions. Coefficients are stored ascending with no trailing
//! zeros; display is by descending degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{FieldSpec, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    spec: FieldSpec,
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn zero(spec: FieldSpec) -> Poly {
        Poly {
            spec,
            coeffs: Vec::new(),
        }
    }

    pub fn one(spec: FieldSpec) -> Poly {
        Poly::from_coeffs(spec, vec![Scalar::one(spec)])
    }

    pub fn x(spec: FieldSpec) -> Poly {
        Poly::from_coeffs(spec, vec![Scalar::zero(spec), Scalar::one(spec)])
    }

    /// Builds from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(spec: FieldSpec, mut coeffs: Vec<Scalar>) -> Poly {
        for c in &coeffs {
            assert_eq!(c.spec(), spec, "scalar field mismatch");
        }
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { spec, coeffs }
    }

    pub fn from_i64(spec: FieldSpec, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(
            spec,
            coeffs.iter().map(|c| Scalar::from_i64(spec, *c)).collect(),
        )
    }

    pub fn from_scalar(c: Scalar) -> Poly {
        let spec = c.spec();
        Poly::from_coeffs(spec, vec![c])
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.spec))
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.spec);
        }
        Poly {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Scalar::zero(self.spec); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly {
            spec: self.spec,
            coeffs,
        }
    }

    /// Applies the coefficient involution term-wise.
    pub fn conj(&self) -> Poly {
        Poly {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(Scalar::star).collect(),
        }
    }

    /// Coefficient reversal: `x^deg * p(1/x)`.
    pub fn reversed(&self) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Poly::from_coeffs(self.spec, coeffs)
    }

    /// Scales to leading coefficient 1. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => self.scalar_mul(&lc.inv().expect("leading coefficient is nonzero")),
        }
    }

    /// Euclidean division: `self = q * divisor + r` with
    /// `deg r < deg divisor`. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let d_deg = divisor.degree().unwrap();
        let Some(s_deg) = self.degree() else {
            return (Poly::zero(self.spec), Poly::zero(self.spec));
        };
        if s_deg < d_deg {
            return (Poly::zero(self.spec), self.clone());
        }
        let lc_inv = divisor
            .leading_coeff()
            .unwrap()
            .inv()
            .expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Scalar::zero(self.spec); s_deg - d_deg + 1];
        for i in (0..quot.len()).rev() {
            let lead = rem[i + d_deg].clone();
            if lead.is_zero() {
                continue;
            }
            let q = &lead * &lc_inv;
            for (j, dj) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(dj * &q);
            }
            quot[i] = q;
        }
        (
            Poly::from_coeffs(self.spec, quot),
            Poly::from_coeffs(self.spec, rem),
        )
    }

    /// Monic greatest common divisor by the Euclidean algorithm. Remainders
    /// are renormalized to monic at every step to keep coefficient growth
    /// in check.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.spec, rhs.spec, "polynomial field mismatch");
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect();
        Poly::from_coeffs(self.spec, coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.spec, rhs.spec, "polynomial field mismatch");
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.spec);
        }
        let mut coeffs =
            vec![Scalar::zero(self.spec); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Poly::from_coeffs(self.spec, coeffs)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
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
            match i {
                0 => write!(f, "{coeff_part}")?,
                _ => {
                    if coeff_part != "1" {
                        write!(f, "{coeff_part}")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
