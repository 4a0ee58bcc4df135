//! Exact rational scalars and piecewise polynomials on [-1, 1].
//!
//! Everything downstream (tails, truncated means, slice volumes) is built on
//! the types here, so the contracts are strict:
//!
//! * `Rational` is an arbitrary-precision fraction, always in lowest terms
//!   with a positive denominator. Arithmetic never rounds.
//! * `Polynomial` stores coefficients in ascending degree with a trimmed
//!   leading coefficient and a hard degree cap ([`DEGREE_CAP`]).
//! * `PiecewisePoly` covers exactly [-1, 1] with strictly increasing rational
//!   breakpoints. Value continuity is checked on construction; evaluation at
//!   an interior breakpoint uses the right-hand piece (left-hand at t = 1).
//!
//! Exactness implies determinism: results are identical across runs and
//! thread counts.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Maximum polynomial degree. Bounds big-integer coefficient growth; the
/// Irwin-Hall construction for n uniforms produces degree-n pieces, so this
/// is also the exact-mode cap on n.
pub const DEGREE_CAP: usize = 64;

/// Shorthand for small literal fractions.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for small literal integers.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Parses "p/q", an integer, or an exact decimal ("0.25" -> 1/4).
/// Decimals are read as fractions over powers of ten, never through floats.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = |why: &str| Error::Parse(format!("bad rational {s:?}: {why}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err("numerator"))?;
        let d: BigInt = den.trim().parse().map_err(|_| err("denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| err("integer part"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("fractional part"));
        }
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|_| err("fractional part"))?;
        let abs = int_part.abs() * &scale + frac_part;
        let signed = if neg { -abs } else { abs };
        return Ok(Rational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| err("integer"))?;
    Ok(Rational::from_integer(n))
}

/// Nearest double. num-rational's conversion is correctly rounded even for
/// operands far outside the double range (verified by tests).
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational image of a finite double (doubles are dyadic rationals).
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::OutOfDomain {
        what: "float",
        value: format!("{x}"),
        domain: "finite doubles",
    })
}

/// ln(r) for positive r, robust when r over/underflows the double range:
/// works from the bit length of numerator and denominator.
pub fn rational_ln(r: &Rational) -> Result<f64> {
    if !r.is_positive() {
        return Err(Error::OutOfDomain {
            what: "log argument",
            value: format!("{r}"),
            domain: "(0, inf)",
        });
    }
    fn big_ln(x: &BigInt) -> f64 {
        let bits = x.bits();
        if bits <= 1023 {
            x.to_f64().unwrap().ln()
        } else {
            let shift = bits - 53;
            let top: BigInt = x >> shift;
            top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
        }
    }
    Ok(big_ln(r.numer()) - big_ln(r.denom()))
}

/// r^(1/n) for r >= 0 as a double: float seed, then one Newton-style
/// refinement through exact arithmetic (the correction factor r / seed^n is
/// formed as a rational, so the result is accurate to a couple of ulp even
/// when r is far from 1).
pub fn rational_nth_root(r: &Rational, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            what: "root order",
            value: "0".into(),
            domain: "n >= 1",
        });
    }
    if r.is_negative() {
        return Err(Error::OutOfDomain {
            what: "radicand",
            value: format!("{r}"),
            domain: "[0, inf)",
        });
    }
    if r.is_zero() {
        return Ok(0.0);
    }
    if n == 1 {
        return Ok(to_f64(r));
    }
    let seed = (rational_ln(r)? / f64::from(n)).exp();
    if !seed.is_finite() || seed == 0.0 {
        return Ok(seed);
    }
    let seed_rat = from_f64(seed)?;
    let correction = r / pow_rational(&seed_rat, n);
    let delta = to_f64(&(correction - Rational::one()));
    Ok(seed * (delta.ln_1p() / f64::from(n)).exp())
}

fn pow_rational(r: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    let mut base = r.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Uniform rational grid start, start+step, ..., not exceeding end.
pub fn rational_grid(start: &Rational, end: &Rational, step: &Rational) -> Vec<Rational> {
    let mut points = Vec::new();
    let mut t = start.clone();
    while t <= *end {
        points.push(t.clone());
        t += step;
    }
    points
}

/// Dense univariate polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    /// Ascending degree; empty means the zero polynomial.
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() > DEGREE_CAP + 1 {
            return Err(Error::CapExceeded {
                what: "polynomial degree",
                value: coeffs.len() - 1,
                cap: DEGREE_CAP,
            });
        }
        Ok(Polynomial { coeffs })
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c]).expect("degree 0 is under the cap")
    }

    /// Convenience for tests and closed forms: coefficients as (num, den).
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        Polynomial::new(pairs.iter().map(|&(n, d)| rat(n, d)).collect())
            .expect("literal coefficient lists stay under the cap")
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation; exact.
    pub fn evaluate(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Horner evaluation with double coefficients (float fallbacks only).
    pub fn evaluate_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0f64;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + to_f64(c);
        }
        acc
    }

    /// Trim trailing zeros without the cap check, for operations that
    /// cannot raise the degree (add, sub, scale, antiderivative by one).
    fn trimmed(mut coeffs: Vec<Rational>) -> Polynomial {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Polynomial::trimmed(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&rat_int(-1)))
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        Polynomial::trimmed(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero());
        }
        let deg = self.degree() + other.degree();
        if deg > DEGREE_CAP {
            return Err(Error::CapExceeded {
                what: "polynomial degree",
                value: deg,
                cap: DEGREE_CAP,
            });
        }
        let mut out = vec![Rational::zero(); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn pow(&self, e: u32) -> Result<Polynomial> {
        let mut acc = Polynomial::constant(Rational::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_int(i as i64))
            .collect();
        Polynomial::new(coeffs).expect("differentiation lowers the degree")
    }

    /// Antiderivative with zero constant term. Exempt from the degree cap:
    /// integrating a cap-degree polynomial is legitimate and raises the
    /// degree by exactly one, unlike the unbounded growth `mul`/`pow` guard
    /// against.
    pub fn antiderivative(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / rat_int(i as i64 + 1));
        }
        Polynomial::trimmed(coeffs)
    }
}

/// Piecewise polynomial on [-1, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePoly {
    breakpoints: Vec<Rational>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePoly {
    /// Checked constructor: breakpoints strictly increasing from -1 to 1,
    /// one piece per interval, and value continuity at interior breakpoints.
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Polynomial>) -> Result<Self> {
        let f = Self::new_unchecked_continuity(breakpoints, pieces)?;
        for k in 1..f.breakpoints.len() - 1 {
            let b = &f.breakpoints[k];
            let left = f.pieces[k - 1].evaluate(b);
            let right = f.pieces[k].evaluate(b);
            if left != right {
                return Err(Error::InvalidHalfspace(format!(
                    "piecewise polynomial discontinuous at breakpoint {b}: {left} vs {right}"
                )));
            }
        }
        Ok(f)
    }

    /// Constructor for results that are legitimately discontinuous
    /// (derivatives of splines have jump discontinuities at the knots).
    pub fn new_unchecked_continuity(
        breakpoints: Vec<Rational>,
        pieces: Vec<Polynomial>,
    ) -> Result<Self> {
        let bad = |why: String| Error::InvalidHalfspace(why);
        if breakpoints.len() < 2 || pieces.len() + 1 != breakpoints.len() {
            return Err(bad(format!(
                "need k+1 breakpoints for k pieces, got {} and {}",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if *breakpoints.first().unwrap() != rat_int(-1) || *breakpoints.last().unwrap() != rat_int(1)
        {
            return Err(bad("breakpoints must span [-1, 1]".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("breakpoints must be strictly increasing".into()));
        }
        Ok(PiecewisePoly {
            breakpoints,
            pieces,
        })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    /// Index of the piece evaluated at t: right-hand piece at interior
    /// breakpoints, left-hand piece at t = 1.
    pub fn piece_index(&self, t: &Rational) -> Result<usize> {
        if t < self.breakpoints.first().unwrap() || t > self.breakpoints.last().unwrap() {
            return Err(Error::OutOfDomain {
                what: "t",
                value: format!("{t}"),
                domain: "[-1, 1]",
            });
        }
        if *t == rat_int(1) {
            return Ok(self.pieces.len() - 1);
        }
        // partition_point: first index where breakpoint > t, minus one.
        let idx = self.breakpoints.partition_point(|b| b <= t);
        Ok(idx - 1)
    }

    pub fn evaluate(&self, t: &Rational) -> Result<Rational> {
        Ok(self.pieces[self.piece_index(t)?].evaluate(t))
    }

    /// Piecewise derivative. Continuity of the result is not asserted.
    pub fn derivative(&self) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Polynomial::derivative).collect(),
        }
    }

    /// Continuous antiderivative F with F(-1) = 0, built piece by piece with
    /// accumulated constants.
    pub fn antiderivative(&self) -> Result<PiecewisePoly> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut accumulated = Rational::zero();
        for (k, piece) in self.pieces.iter().enumerate() {
            let raw = piece.antiderivative();
            let shift = &accumulated - raw.evaluate(&self.breakpoints[k]);
            let adjusted = raw.add(&Polynomial::constant(shift));
            accumulated = adjusted.evaluate(&self.breakpoints[k + 1]);
            pieces.push(adjusted);
        }
        PiecewisePoly::new(self.breakpoints.clone(), pieces)
    }

    /// Exact integral over [t, 1], computed piecewise via antiderivatives.
    pub fn integrate_tail(&self, t: &Rational) -> Result<Rational> {
        let start = self.piece_index(t)?;
        let mut total = Rational::zero();
        for k in start..self.pieces.len() {
            let lo = if k == start { t } else { &self.breakpoints[k] };
            let hi = &self.breakpoints[k + 1];
            let anti = self.pieces[k].antiderivative();
            total += anti.evaluate(hi) - anti.evaluate(lo);
        }
        Ok(total)
    }
}
