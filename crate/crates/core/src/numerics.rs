//! Exact scalar arithmetic: arbitrary-precision rationals and integer
//! polynomials in a single parameter `n`.
//!
//! Every number in this crate is one of these two kinds; there is no
//! floating point anywhere. Rationals are backed by `num-rational`, which
//! already maintains the canonical form we need (fully reduced, positive
//! denominator) and prints/parses the `p/q` notation used in all solver
//! output.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision integer.
pub type Int = BigInt;

/// Arbitrary-precision rational in canonical form.
pub type Rational = BigRational;

/// Integer literal helper, mostly for tests and fixtures.
pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

/// Rational literal helper.
pub fn rat(v: i64) -> Rational {
    BigRational::from_integer(int(v))
}

/// Fractional literal helper. Panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    BigRational::new(int(num), int(den))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericsError {
    #[error("the zero polynomial has no eventual sign")]
    ZeroPolynomial,
}

/// Integer polynomial in the parameter `n`, stored densely by degree.
///
/// Invariant: the coefficient vector never has a trailing (leading-degree)
/// zero, so equal polynomials compare equal structurally. The zero
/// polynomial is the empty vector and reports degree 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Int>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Int) -> Self {
        Polynomial::from_coeffs(vec![c])
    }

    /// Builds `c · n^degree`.
    pub fn monomial(c: Int, degree: usize) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Int::zero(); degree + 1];
        coeffs[degree] = c;
        Polynomial { coeffs }
    }

    /// Builds a polynomial from coefficients ordered by ascending degree,
    /// trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Int>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// Coefficients by ascending degree; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the convention that the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of `n^k` (zero when `k` exceeds the degree).
    pub fn coeff(&self, k: usize) -> Int {
        self.coeffs.get(k).cloned().unwrap_or_else(Int::zero)
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading(&self) -> Int {
        self.coeffs.last().cloned().unwrap_or_else(Int::zero)
    }

    /// The polynomial with the `n^k` monomial removed.
    pub fn without_degree(&self, k: usize) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        if k < coeffs.len() {
            coeffs[k] = Int::zero();
        }
        Polynomial::from_coeffs(coeffs)
    }

    /// Number of nonzero monomials.
    pub fn monomial_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Evaluates at an integer point (Horner).
    pub fn eval(&self, n: &Int) -> Int {
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_u64(&self, n: u64) -> Int {
        self.eval(&Int::from(n))
    }

    /// The falling factorial `(n - shift)(n - shift - 1)…` with `w` factors;
    /// the empty product (`w = 0`) is the constant 1.
    pub fn falling_factorial(w: usize, shift: usize) -> Polynomial {
        let mut acc = Polynomial::constant(Int::one());
        for i in 0..w {
            let factor = Polynomial::from_coeffs(vec![-int((shift + i) as i64), Int::one()]);
            acc = &acc * &factor;
        }
        acc
    }

    /// Smallest `N >= 1` such that for every integer `n >= N` the value
    /// `p(n)` is nonzero with the sign of the leading coefficient. Uses the
    /// classical root bound `1 + ceil(max |c_i| / |c_deg|)` over the
    /// non-leading coefficients.
    pub fn sign_stability_bound(&self) -> Result<u64, NumericsError> {
        if self.is_zero() {
            return Err(NumericsError::ZeroPolynomial);
        }
        let lead = self.leading().abs();
        let max_low = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(Signed::abs)
            .max();
        let bound = match max_low {
            None => Int::one(),
            Some(m) => {
                // 1 + ceil(m / lead), computed exactly on integers.
                Int::one() + (&m + &lead - Int::one()) / &lead
            }
        };
        Ok(bound
            .to_u64()
            .expect("sign stability bound exceeds u64 range"))
    }

    /// Scales every coefficient by an integer.
    pub fn scale(&self, k: &Int) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut coeffs = vec![Int::zero(); self.coeffs.len().max(rhs.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Int::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        *self = &*self + rhs;
    }
}

impl fmt::Display for Polynomial {
    /// Canonical text form, highest degree first: `2n^2 - n + 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if deg == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                if deg == 1 {
                    write!(f, "n")?;
                } else {
                    write!(f, "n^{deg}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
