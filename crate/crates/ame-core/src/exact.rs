//! Exact scalar arithmetic used alongside floating point amplitudes.
//!
//! Amplitudes arising from the closed-form constructions in this crate are
//! always of the form `sqrt(r) * exp(2*pi*i * p/q)` with `r` a nonnegative
//! rational and `p/q` a rational fraction of a full turn. [`ExactForm`]
//! captures that shape losslessly. It is closed under multiplication,
//! conjugation, and rescaling of the radicand, which covers every operation
//! the constructors and composers perform on individual amplitudes.
//!
//! [`GaussianRational`] provides exact arithmetic over `Q(i)` for the matrix
//! pencil computations, where amplitudes with quarter-turn phases and
//! perfect-square radicands embed exactly.

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Parses a rational from the string form `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Ok(r) = t.parse::<BigRational>() {
        return Ok(r);
    }
    // `Ratio`'s FromStr rejects a bare integer denominator of 1 only when the
    // string is malformed; fall through to an integer parse for plain "p".
    t.parse::<BigInt>()
        .map(BigRational::from)
        .map_err(|_| Error::Parse(format!("cannot parse rational from {t:?}")))
}

/// Formats a rational as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Converts a rational to the nearest f64.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Splitting into numerator and denominator keeps the conversion accurate
    // for every value this crate produces (small fractions).
    let num = bigint_to_f64(r.numer());
    let den = bigint_to_f64(r.denom());
    num / den
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact square root of a nonnegative rational if it is a perfect square.
pub fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Rational in `[0, 1)` representing a fraction of a full turn.
fn normalize_phase(p: BigRational) -> BigRational {
    let f = p.floor();
    p - f
}

/// An amplitude in the closed form `sqrt(radicand) * exp(2*pi*i * phase)`.
///
/// `radicand` is nonnegative and `phase` is kept reduced in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactForm {
    radicand: BigRational,
    phase: BigRational,
}

impl ExactForm {
    /// Builds the form `sqrt(radicand) * exp(2*pi*i * phase)`.
    pub fn new(radicand: BigRational, phase: BigRational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::Parse(format!(
                "radicand {radicand} is negative; move the sign into the phase"
            )));
        }
        let phase = if radicand.is_zero() {
            BigRational::zero()
        } else {
            normalize_phase(phase)
        };
        Ok(ExactForm { radicand, phase })
    }

    /// Positive square root of a nonnegative rational.
    pub fn positive_sqrt(radicand: BigRational) -> Result<Self> {
        Self::new(radicand, BigRational::zero())
    }

    /// Square root of a nonnegative rational times `exp(2*pi*i * num/den)`.
    pub fn root_of_unity(radicand: BigRational, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("phase denominator must be nonzero".into()));
        }
        Self::new(
            radicand,
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        )
    }

    /// The radicand `r` with `|value|^2 = r`.
    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    /// Phase as a fraction of a full turn, in `[0, 1)`.
    pub fn phase(&self) -> &BigRational {
        &self.phase
    }

    /// Squared modulus, which is exactly the radicand.
    pub fn squared_modulus(&self) -> &BigRational {
        &self.radicand
    }

    /// Nearest floating point value of the represented complex number.
    pub fn value(&self) -> Complex64 {
        let modulus = rational_to_f64(&self.radicand).sqrt();
        let angle = 2.0 * std::f64::consts::PI * rational_to_f64(&self.phase);
        Complex64::from_polar(modulus, angle)
    }

    /// Product of two exact forms.
    pub fn mul(&self, other: &ExactForm) -> ExactForm {
        let radicand = &self.radicand * &other.radicand;
        let phase = if radicand.is_zero() {
            BigRational::zero()
        } else {
            normalize_phase(&self.phase + &other.phase)
        };
        ExactForm { radicand, phase }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> ExactForm {
        let phase = if self.phase.is_zero() {
            BigRational::zero()
        } else {
            normalize_phase(-self.phase.clone())
        };
        ExactForm {
            radicand: self.radicand.clone(),
            phase,
        }
    }

    /// Multiplies the represented value by `sqrt(factor)` for `factor > 0`.
    pub fn scale_radicand(&self, factor: &BigRational) -> Result<ExactForm> {
        if factor.is_negative() {
            return Err(Error::Parse(format!(
                "radicand scale factor {factor} must be nonnegative"
            )));
        }
        ExactForm::new(&self.radicand * factor, self.phase.clone())
    }

    /// The exact value as an element of `Q(i)` when the phase is a quarter
    /// turn multiple and the radicand is a perfect square.
    pub fn as_gaussian(&self) -> Option<GaussianRational> {
        let root = exact_sqrt(&self.radicand)?;
        if self.radicand.is_zero() {
            return Some(GaussianRational::zero());
        }
        let four = BigRational::from(BigInt::from(4));
        let quarters = &self.phase * &four;
        if !quarters.is_integer() {
            return None;
        }
        let q: BigInt = quarters.to_integer() % BigInt::from(4);
        let zero = BigRational::zero();
        Some(match q.try_into().unwrap_or(0u8) {
            0 => GaussianRational::new(root, zero),
            1 => GaussianRational::new(zero, root),
            2 => GaussianRational::new(-root, zero),
            _ => GaussianRational::new(zero, -root),
        })
    }
}

/// An element of `Q(i)`: `re + i*im` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        GaussianRational::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Self) -> Self {
        GaussianRational::new(&self.re - &other.re, &self.im - &other.im)
    }

    pub fn mul(&self, other: &Self) -> Self {
        GaussianRational::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    pub fn neg(&self) -> Self {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(GaussianRational::new(
            &self.re / &norm,
            -(&self.im / &norm),
        ))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}
