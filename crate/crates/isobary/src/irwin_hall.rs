//! Distribution of X = (1/n) Σ U_i for U_i uniform on [-1, 1].
//!
//! The tail p_X(t) = P(X > t) is a degree-n spline with breakpoints at
//! t = -1 + 2k/n. Writing S = n(X+1)/2 (a standard Irwin-Hall variable, the
//! sum of n uniforms on [0, 1]) and s = n(1+t)/2,
//!
//!   p_X(t) = 1 - F_S(s),   F_S(s) = (1/n!) Σ_k (-1)^k C(n,k) (s-k)_+^n,
//!
//! which this module materializes piece by piece in exact rational
//! arithmetic. On top of the tail sit the truncated mean
//! m_X(t) = E[X | X > t] = t + (∫_t^1 p_X)/p_X(t), the derived quantity
//! D(t) = (m_X(t) - t)·m_X(t)/(1 - m_X(t)^2), and the diagonal gap
//! f(t) = (1/n)·ln p_X(t) - (1/2)·ln(1 - m_X(t)^2), whose strict negativity
//! on (-1, 1) is the diagonal inequality p_X(t)^{1/n} < sqrt(1 - m_X(t)^2).
//!
//! Two evaluation paths exist. The exact rational path (n up to
//! [`EXACT_N_CAP`]) is the reference. The float path ([`tail_f64`], n up to
//! [`FLOAT_N_CAP`]) uses compensated summation and a symmetry reduction so
//! the inclusion-exclusion sum is always taken at s <= n/2; it is validated
//! against the exact path on their overlap and, like any float
//! inclusion-exclusion, degrades near t = 0 for large n where the
//! alternating terms dwarf the result.

use crate::compensated::Neumaier;
use crate::error::{Error, Result};
use crate::exactnum::{
    rat, rat_int, rational_ln, rational_nth_root, to_f64, PiecewisePoly, Polynomial, Rational,
    DEGREE_CAP,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Exact construction cap; the pieces have degree n, so this is the
/// polynomial degree cap.
pub const EXACT_N_CAP: u32 = DEGREE_CAP as u32;

/// Float tail evaluation cap.
pub const FLOAT_N_CAP: u32 = 200;

pub fn factorial(n: u32) -> BigInt {
    (1..=u64::from(n)).map(BigInt::from).product()
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Exact corner-slice tail (n(1-t)/2)^n / n!, valid for t >= 1 - 2/n where
/// the slice {x : mean(x) >= t} is a simplex corner of the cube.
pub fn exact_corner_tail(n: u32, t: &Rational) -> Rational {
    let base = rat_int(i64::from(n)) * (rat_int(1) - t) / rat_int(2);
    let mut acc = Rational::one();
    for _ in 0..n {
        acc *= &base;
    }
    acc / Rational::from_integer(factorial(n))
}

/// Tail, truncated mean, and derived functionals for one fixed n.
/// Immutable after construction; all queries are read-only.
#[derive(Debug, Clone)]
pub struct IrwinHallTail {
    n: u32,
    /// p_X as a spline on [-1, 1].
    tail: PiecewisePoly,
    /// t -> ∫_t^1 p_X, same breakpoints.
    tail_integral: PiecewisePoly,
    /// p_X' (discontinuity allowed at the knots for n = 1).
    tail_derivative: PiecewisePoly,
    /// Density of X, i.e. -p_X'.
    density: PiecewisePoly,
}

impl IrwinHallTail {
    pub fn build(n: u32) -> Result<Self> {
        if !(1..=EXACT_N_CAP).contains(&n) {
            return Err(Error::OutOfDomain {
                what: "n",
                value: n.to_string(),
                domain: "1..=64 (exact mode)",
            });
        }
        let n_fact = Rational::from_integer(factorial(n));
        let breakpoints: Vec<Rational> = (0..=n)
            .map(|k| rat_int(-1) + rat(2 * i64::from(k), i64::from(n)))
            .collect();

        // s(t) = n(1+t)/2; piece k subtracts one more signed CDF term.
        let half_n = rat(i64::from(n), 2);
        let mut pieces = Vec::with_capacity(n as usize);
        let mut cdf = Polynomial::zero();
        for k in 0..n {
            let affine = Polynomial::new(vec![&half_n - rat_int(i64::from(k)), half_n.clone()])?;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let coeff = Rational::from_integer(binomial(n, k) * BigInt::from(sign)) / &n_fact;
            cdf = cdf.add(&affine.pow(n)?.scale(&coeff));
            pieces.push(Polynomial::constant(Rational::one()).sub(&cdf));
        }
        let tail = PiecewisePoly::new(breakpoints, pieces)?;

        // Spot-check the construction with exact identities.
        debug_checks(n, &tail)?;

        let anti = tail.antiderivative()?;
        let total = anti.evaluate(&rat_int(1))?;
        let integral_pieces = anti
            .pieces()
            .iter()
            .map(|p| Polynomial::constant(total.clone()).sub(p))
            .collect();
        let tail_integral = PiecewisePoly::new(tail.breakpoints().to_vec(), integral_pieces)?;
        let tail_derivative = tail.derivative();
        let density = PiecewisePoly::new_unchecked_continuity(
            tail.breakpoints().to_vec(),
            tail_derivative
                .pieces()
                .iter()
                .map(|p| p.scale(&rat_int(-1)))
                .collect(),
        )?;
        Ok(IrwinHallTail {
            n,
            tail,
            tail_integral,
            tail_derivative,
            density,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn tail_poly(&self) -> &PiecewisePoly {
        &self.tail
    }

    pub fn tail_integral_poly(&self) -> &PiecewisePoly {
        &self.tail_integral
    }

    pub fn density_poly(&self) -> &PiecewisePoly {
        &self.density
    }

    /// p_X(t), exact.
    pub fn tail(&self, t: &Rational) -> Result<Rational> {
        self.tail.evaluate(t)
    }

    /// ∫_t^1 p_X, exact.
    pub fn tail_integral(&self, t: &Rational) -> Result<Rational> {
        self.tail_integral.evaluate(t)
    }

    /// p_X'(t), exact (right-hand piece at knots).
    pub fn tail_derivative(&self, t: &Rational) -> Result<Rational> {
        self.tail_derivative.evaluate(t)
    }

    /// Density of X at t, i.e. -p_X'(t).
    pub fn density(&self, t: &Rational) -> Result<Rational> {
        self.density.evaluate(t)
    }

    /// m_X(t) = E[X | X > t] = t + (∫_t^1 p_X)/p_X(t). Exact; t = 1 is out
    /// of domain because the tail vanishes there.
    pub fn truncated_mean(&self, t: &Rational) -> Result<Rational> {
        let p = self.tail(t)?;
        if p.is_zero() {
            return Err(Error::OutOfDomain {
                what: "t",
                value: format!("{t}"),
                domain: "[-1, 1) (tail must be positive)",
            });
        }
        Ok(t + self.tail_integral(t)? / p)
    }

    /// m_X'(t) by the quotient rule on the cached pieces:
    /// m' = 1 + (I'·p - I·p')/p² with I' read off the differentiated
    /// integral spline (not substituted as -p), so the log-derivative
    /// identity test below is not vacuous.
    pub fn truncated_mean_derivative(&self, t: &Rational) -> Result<Rational> {
        let p = self.tail(t)?;
        if p.is_zero() {
            return Err(Error::OutOfDomain {
                what: "t",
                value: format!("{t}"),
                domain: "[-1, 1)",
            });
        }
        let i = self.tail_integral(t)?;
        let i_prime = self.tail_integral.derivative().evaluate(t)?;
        let p_prime = self.tail_derivative(t)?;
        Ok(rat_int(1) + (i_prime * &p - i * p_prime) / (&p * &p))
    }

    /// D(t) = (m_X(t) - t)·m_X(t)/(1 - m_X(t)^2), exact.
    pub fn derived_quantity(&self, t: &Rational) -> Result<Rational> {
        let m = self.truncated_mean(t)?;
        let m2 = &m * &m;
        Ok((&m - t) * &m / (rat_int(1) - m2))
    }

    /// f(t) = (1/n)·ln p_X(t) - (1/2)·ln(1 - m_X(t)^2).
    ///
    /// All arithmetic is exact rational until the final logarithms. Both
    /// 1 - p and 1 - m² are formed exactly before conversion, and ln1p is
    /// used on whichever side is close to 1: converting p itself to a double
    /// near t = -1 would round 1 - p away entirely (it is below 2^-53 for
    /// n >= 6 at the default grid inset) and falsely report a zero gap.
    pub fn diag_gap(&self, t: &Rational) -> Result<f64> {
        if *t <= rat_int(-1) || *t >= rat_int(1) {
            return Err(Error::OutOfDomain {
                what: "t",
                value: format!("{t}"),
                domain: "(-1, 1)",
            });
        }
        let p = self.tail(t)?;
        let m = self.truncated_mean(t)?;
        let one = Rational::one();
        let half = rat(1, 2);

        let ln_p = if p >= half {
            let q = &one - &p; // exact 1 - p
            (-to_f64(&q)).ln_1p()
        } else {
            let pf = to_f64(&p);
            if pf > 0.0 {
                pf.ln()
            } else {
                rational_ln(&p)?
            }
        };

        let m2 = &m * &m;
        let r = &one - &m2; // exact 1 - m²
        let ln_r = if m2 <= half {
            (-to_f64(&m2)).ln_1p()
        } else {
            let rf = to_f64(&r);
            if rf > 0.0 {
                rf.ln()
            } else {
                rational_ln(&r)?
            }
        };

        Ok(ln_p / f64::from(self.n) - ln_r / 2.0)
    }

    /// p_X(t)^{1/n} as a double, accurate to a few ulp.
    pub fn root_tail(&self, t: &Rational) -> Result<f64> {
        rational_nth_root(&self.tail(t)?, self.n)
    }
}

fn debug_checks(n: u32, tail: &PiecewisePoly) -> Result<()> {
    let checks = [
        (rat_int(-1), rat_int(1)),
        (rat_int(1), rat_int(0)),
        (rat_int(0), rat(1, 2)),
    ];
    for (t, expect) in checks {
        let got = tail.evaluate(&t)?;
        if got != expect {
            return Err(Error::InvalidHalfspace(format!(
                "tail construction failed self-check at t = {t} for n = {n}: {got}"
            )));
        }
    }
    let quarter = rat(1, 4);
    let sym = tail.evaluate(&quarter)? + tail.evaluate(&-quarter)?;
    if sym != rat_int(1) {
        return Err(Error::InvalidHalfspace(format!(
            "tail symmetry self-check failed for n = {n}"
        )));
    }
    Ok(())
}

/// Float tail evaluation for n up to [`FLOAT_N_CAP`].
///
/// Folds to the half-line s <= n/2 via p_X(t) = F_S(n(1-t)/2) for t >= 0 and
/// p_X(t) = 1 - F_S(n(1+t)/2) for t < 0, then runs the alternating
/// inclusion-exclusion sum under compensated summation. Terms come from
/// direct products for n <= 30 and from exp/ln otherwise (n! overflows a
/// double past n = 170).
pub fn tail_f64(n: u32, t: f64) -> Result<f64> {
    if !(1..=FLOAT_N_CAP).contains(&n) {
        return Err(Error::OutOfDomain {
            what: "n",
            value: n.to_string(),
            domain: "1..=200 (float mode)",
        });
    }
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.to_string(),
            domain: "[-1, 1]",
        });
    }
    if t >= 1.0 {
        return Ok(0.0);
    }
    if t <= -1.0 {
        return Ok(1.0);
    }
    let nf = f64::from(n);
    Ok(if t >= 0.0 {
        irwin_cdf_f64(n, nf * (1.0 - t) / 2.0)
    } else {
        1.0 - irwin_cdf_f64(n, nf * (1.0 + t) / 2.0)
    })
}

/// F_S(s) for S the sum of n uniforms on [0, 1], with 0 <= s <= n/2.
fn irwin_cdf_f64(n: u32, s: f64) -> f64 {
    let kmax = (s.floor() as u32).min(n);
    let mut acc = Neumaier::new();
    if n <= 30 {
        let n_fact: f64 = (1..=n).map(f64::from).product();
        let mut binom = 1.0f64;
        for j in 0..=kmax {
            let base = s - f64::from(j);
            if base > 0.0 {
                let term = binom * base.powi(n as i32) / n_fact;
                acc.add(if j % 2 == 0 { term } else { -term });
            }
            binom = binom * f64::from(n - j) / f64::from(j + 1);
        }
    } else {
        let ln_fact: Vec<f64> = std::iter::once(0.0)
            .chain((1..=n).scan(0.0f64, |cum, k| {
                *cum += f64::from(k).ln();
                Some(*cum)
            }))
            .collect();
        let nf = f64::from(n);
        for j in 0..=kmax {
            let base = s - f64::from(j);
            if base > 0.0 {
                let ln_binom = ln_fact[n as usize] - ln_fact[j as usize] - ln_fact[(n - j) as usize];
                let term = (ln_binom + nf * base.ln() - ln_fact[n as usize]).exp();
                acc.add(if j % 2 == 0 { term } else { -term });
            }
        }
    }
    acc.total().clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational_grid;

    #[test]
    fn build_n1_closed_form() {
        let d = IrwinHallTail::build(1).unwrap();
        assert_eq!(d.tail_poly().pieces().len(), 1);
        assert_eq!(
            d.tail_poly().pieces()[0],
            Polynomial::from_pairs(&[(1, 2), (-1, 2)])
        );
    }

    #[test]
    fn build_n2_upper_piece_is_corner_formula() {
        let d = IrwinHallTail::build(2).unwrap();
        assert_eq!(
            d.tail_poly().pieces()[1],
            Polynomial::from_pairs(&[(1, 2), (-1, 1), (1, 2)])
        );
    }

    #[test]
    fn build_n3_tail_value() {
        let d = IrwinHallTail::build(3).unwrap();
        assert_eq!(d.tail(&rat(1, 3)).unwrap(), rat(1, 6));
    }

    #[test]
    fn build_rejects_out_of_range() {
        assert!(IrwinHallTail::build(0).is_err());
        assert!(IrwinHallTail::build(EXACT_N_CAP + 1).is_err());
    }

    #[test]
    fn breakpoints_match_construction() {
        let d = IrwinHallTail::build(4).unwrap();
        let expect: Vec<Rational> = (0..=4).map(|k| rat_int(-1) + rat(2 * k, 4)).collect();
        assert_eq!(d.tail_poly().breakpoints(), &expect[..]);
    }

    #[test]
    fn truncated_mean_examples() {
        let d1 = IrwinHallTail::build(1).unwrap();
        for t in rational_grid(&rat(-7, 8), &rat(7, 8), &rat(1, 8)) {
            let expect = (rat_int(1) + &t) / rat_int(2);
            assert_eq!(d1.truncated_mean(&t).unwrap(), expect);
        }
        let d2 = IrwinHallTail::build(2).unwrap();
        assert_eq!(d2.truncated_mean(&rat_int(0)).unwrap(), rat(1, 3));
        for n in 1..=6 {
            let d = IrwinHallTail::build(n).unwrap();
            assert_eq!(d.truncated_mean(&rat_int(-1)).unwrap(), rat_int(0));
        }
        assert!(d2.truncated_mean(&rat_int(1)).is_err());
    }

    #[test]
    fn derived_quantity_examples() {
        let d1 = IrwinHallTail::build(1).unwrap();
        for t in rational_grid(&rat(-7, 8), &rat(7, 8), &rat(1, 8)) {
            let expect = (rat_int(1) + &t) / (rat_int(3) + &t);
            assert_eq!(d1.derived_quantity(&t).unwrap(), expect);
        }
        assert_eq!(d1.derived_quantity(&rat_int(0)).unwrap(), rat(1, 3));
        let d2 = IrwinHallTail::build(2).unwrap();
        assert_eq!(d2.derived_quantity(&rat_int(0)).unwrap(), rat(1, 8));
    }

    #[test]
    fn diag_gap_frozen_values() {
        let d1 = IrwinHallTail::build(1).unwrap();
        let g = d1.diag_gap(&rat_int(0)).unwrap();
        assert!((g - (-0.5493061443340549)).abs() < 1e-14, "{g}");

        // n=2, t=1/2: p = 1/8, m = 2/3, gap = (1/2)ln(1/8) - (1/2)ln(5/9).
        let d2 = IrwinHallTail::build(2).unwrap();
        assert_eq!(d2.truncated_mean(&rat(1, 2)).unwrap(), rat(2, 3));
        let g2 = d2.diag_gap(&rat(1, 2)).unwrap();
        let expect = 0.5 * (1f64 / 8.0).ln() - 0.5 * (5f64 / 9.0).ln();
        assert!((g2 - expect).abs() < 1e-14, "{g2} vs {expect}");
        assert!(d2.diag_gap(&rat_int(1)).is_err());
        assert!(d2.diag_gap(&rat_int(-1)).is_err());
    }

    #[test]
    fn diag_gap_strictly_negative_at_extreme_inset() {
        // Near t = -1 the gap is ~ -(1-p)/n, far below double epsilon of the
        // naive ln(p) path; the ln1p path must keep it strictly negative.
        for n in [6, 12, 20, 40, 64] {
            let d = IrwinHallTail::build(n).unwrap();
            let t = rat_int(-1) + rat(1, 512);
            let g = d.diag_gap(&t).unwrap();
            assert!(g < 0.0, "n={n} gap={g:e}");
        }
    }

    #[test]
    fn exact_corner_formula_on_top_pieces() {
        for n in 2..=10u32 {
            let d = IrwinHallTail::build(n).unwrap();
            let lo = rat_int(1) - rat(1, i64::from(n));
            for t in rational_grid(&lo, &rat_int(1), &rat(1, 4 * i64::from(n))) {
                assert_eq!(
                    d.tail(&t).unwrap(),
                    exact_corner_tail(n, &t),
                    "n={n} t={t}"
                );
            }
        }
    }

    #[test]
    fn one_minus_identity_spot() {
        for n in [2u32, 3, 5, 10] {
            let d = IrwinHallTail::build(n).unwrap();
            for t in [rat(1, 2), rat(3, 7), rat(255, 512)] {
                let p = d.tail(&t).unwrap();
                let lhs = d.truncated_mean(&-t.clone()).unwrap() * (rat_int(1) - &p);
                let rhs = &p * d.truncated_mean(&t).unwrap();
                assert_eq!(lhs, rhs, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn log_derivative_identity_spot() {
        for n in [1u32, 2, 3, 7] {
            let d = IrwinHallTail::build(n).unwrap();
            for t in [rat(-3, 8), rat(1, 8), rat(3, 8)] {
                let m = d.truncated_mean(&t).unwrap();
                let m_prime = d.truncated_mean_derivative(&t).unwrap();
                let p = d.tail(&t).unwrap();
                let p_prime = d.tail_derivative(&t).unwrap();
                assert_eq!(m_prime * p, -(m - &t) * p_prime, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        for n in [1u32, 2, 5] {
            let d = IrwinHallTail::build(n).unwrap();
            assert_eq!(
                d.density_poly().integrate_tail(&rat_int(-1)).unwrap(),
                rat_int(1)
            );
        }
    }

    #[test]
    fn float_tail_matches_exact_on_overlap() {
        for n in [1u32, 2, 3, 5, 8, 13, 20] {
            let d = IrwinHallTail::build(n).unwrap();
            for t in rational_grid(&rat(-15, 16), &rat(15, 16), &rat(1, 16)) {
                let exact = to_f64(&d.tail(&t).unwrap());
                let approx = tail_f64(n, to_f64(&t)).unwrap();
                assert!(
                    (exact - approx).abs() < 1e-11,
                    "n={n} t={t} exact={exact} float={approx}"
                );
            }
        }
    }

    #[test]
    fn float_tail_large_n_in_validated_zone() {
        // Exact path reaches n = 64; spot-check the float path there and
        // sanity-check n = 200 in the tails where the sum is benign.
        let d = IrwinHallTail::build(64).unwrap();
        for t in [rat(-1, 2), rat(-1, 4), rat(1, 4), rat(1, 2), rat(7, 8)] {
            let exact = to_f64(&d.tail(&t).unwrap());
            let approx = tail_f64(64, to_f64(&t)).unwrap();
            let scale = exact.abs().max(1e-30);
            assert!(
                ((exact - approx) / scale).abs() < 1e-9,
                "t={t} exact={exact:e} float={approx:e}"
            );
        }
        let p = tail_f64(200, 0.5).unwrap();
        let chernoff = (-3.0f64 * 200.0 * 0.25 / 2.0).exp();
        assert!(p > 0.0 && p < chernoff, "p={p:e} chernoff={chernoff:e}");
        assert_eq!(tail_f64(200, 1.0).unwrap(), 0.0);
        assert_eq!(tail_f64(200, -1.0).unwrap(), 1.0);
        assert!(tail_f64(201, 0.0).is_err());
    }

    #[test]
    fn root_tail_monotone_decreasing_spot() {
        let d = IrwinHallTail::build(7).unwrap();
        let mut last = f64::INFINITY;
        for t in rational_grid(&rat(-7, 8), &rat(7, 8), &rat(1, 8)) {
            let r = d.root_tail(&t).unwrap();
            assert!(r < last);
            last = r;
        }
    }
}
