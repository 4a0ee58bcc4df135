//! Closed-form bound evaluators: the five region bounds on the derived
//! quantity D(t) = (m_X(t) - t)·m_X(t)/(1 - m_X(t)^2), their combination,
//! concavity-based bounds on the truncated mean, and the volume envelopes
//! (tail envelopes in t, product envelopes in the barycenter x).
//!
//! Everything here is a pure formula with an explicit domain. Transcendental
//! constants are evaluated in double precision; callers comparing bounds
//! against exact quantities should allow a 1e-12 relative margin, except for
//! the purely algebraic bounds (regions 2-4 at rational parameters, the
//! combined bound, the corner formula, the half-mean bound) which are exact.

use crate::error::{Error, Result};
use crate::exactnum::{from_f64, rat, rat_int, rational_nth_root, to_f64, Rational};
use crate::irwin_hall::{exact_corner_tail, factorial, IrwinHallTail};
use num_traits::{Signed, Zero};

/// Parameters for the five-region decomposition of (-1, 1). The regions are
/// cut at -α/√(3n), 0, β/√(3n), and γ.
#[derive(Debug, Clone, Copy)]
pub struct RegionParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: u32,
}

impl RegionParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition {
                condition: "n >= 1".to_string(),
            });
        }
        let root_3n = (3.0 * f64::from(n)).sqrt();
        if !(alpha > 0.0 && alpha <= root_3n) {
            return Err(Error::Precondition {
                condition: format!("0 < alpha <= sqrt(3n) = {root_3n}, got {alpha}"),
            });
        }
        if !(beta > 0.0 && beta <= root_3n) {
            return Err(Error::Precondition {
                condition: format!("0 < beta <= sqrt(3n) = {root_3n}, got {beta}"),
            });
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Precondition {
                condition: format!("0 < gamma <= 1, got {gamma}"),
            });
        }
        Ok(RegionParams {
            alpha,
            beta,
            gamma,
            n,
        })
    }

    /// Which region contains t, by exact rational comparison. The cut points
    /// -α/√(3n) and β/√(3n) are compared through squares so the
    /// classification needs no square roots; α, β, γ enter as the exact
    /// dyadic values the doubles denote.
    pub fn region_of(&self, t: &Rational) -> Result<u8> {
        if *t <= rat_int(-1) || *t >= rat_int(1) {
            return Err(Error::OutOfDomain {
                what: "t",
                value: format!("{t}"),
                domain: "(-1, 1)",
            });
        }
        let three_n_t2 = rat_int(3 * i64::from(self.n)) * t * t;
        let alpha_sq = square_of(self.alpha);
        let beta_sq = square_of(self.beta);
        let gamma = from_f64(self.gamma).expect("gamma is finite by construction");
        Ok(if t.is_negative() && three_n_t2 >= alpha_sq {
            1
        } else if *t <= Rational::zero() {
            2
        } else if three_n_t2 <= beta_sq {
            3
        } else if *t <= gamma {
            4
        } else {
            5
        })
    }
}

fn square_of(x: f64) -> Rational {
    let r = from_f64(x).expect("region parameters are finite by construction");
    &r * &r
}

/// One of the five per-region upper bounds for D(t).
///
///   1: α⁶ / ((α²-2)²(e^{α²/2}-1)(3n-1)),  needs α > √2
///   2: (1+α)/(3n-1)
///   3: (1+β)/(3n-(1+β)²),                 needs β < √(3n)-1
///   4: (8/3) / (((4+3γ²)(1-γ²)-16/β²)·n), needs 16/β² < (4+3γ²)(1-γ²)
///   5: 1 / (((1+2/e)-(1-2/e)/γ²)·n - 2/γ²), needs that denominator > 0
pub fn region_bound(which: u8, p: &RegionParams) -> Result<f64> {
    let n = f64::from(p.n);
    let RegionParams {
        alpha,
        beta,
        gamma,
        ..
    } = *p;
    let value = match which {
        1 => {
            if alpha * alpha <= 2.0 {
                return Err(Error::Precondition {
                    condition: format!("region 1 needs alpha > sqrt(2), got {alpha}"),
                });
            }
            let a2 = alpha * alpha;
            a2.powi(3) / ((a2 - 2.0).powi(2) * ((a2 / 2.0).exp() - 1.0)) / (3.0 * n - 1.0)
        }
        2 => (1.0 + alpha) / (3.0 * n - 1.0),
        3 => {
            let b1 = 1.0 + beta;
            if b1 * b1 >= 3.0 * n {
                return Err(Error::Precondition {
                    condition: format!("region 3 needs beta < sqrt(3n) - 1, got {beta}"),
                });
            }
            b1 / (3.0 * n - b1 * b1)
        }
        4 => {
            let g2 = gamma * gamma;
            let shoulder = (4.0 + 3.0 * g2) * (1.0 - g2);
            let hole = 16.0 / (beta * beta);
            if hole >= shoulder {
                return Err(Error::Precondition {
                    condition: format!(
                        "region 4 needs 16/beta^2 < (4+3*gamma^2)(1-gamma^2): {hole} >= {shoulder}"
                    ),
                });
            }
            (8.0 / 3.0) / ((shoulder - hole) * n)
        }
        5 => {
            let g2 = gamma * gamma;
            let two_over_e = 2.0 / std::f64::consts::E;
            let denom = ((1.0 + two_over_e) - (1.0 - two_over_e) / g2) * n - 2.0 / g2;
            if denom <= 0.0 {
                return Err(Error::Precondition {
                    condition: format!("region 5 needs a positive denominator, got {denom}"),
                });
            }
            1.0 / denom
        }
        _ => {
            return Err(Error::OutOfDomain {
                what: "region index",
                value: which.to_string(),
                domain: "1..=5",
            })
        }
    };
    Ok(value)
}

/// The single combined bound 3/(2n-15) for D(t) on all of (-1, 1), n >= 12.
/// Returned exactly so it can sit on the right side of rational comparisons.
pub fn combined_bound(n: u32) -> Result<Rational> {
    if n < 12 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: n.to_string(),
            domain: "n >= 12",
        });
    }
    Ok(rat(3, 2 * i64::from(n) - 15))
}

/// Concavity-based upper bound on m_X(t):
/// t·(1 + τ/(n - (n+1)τ)) with τ = p_X(t)^{1/n}, valid for 0 < t < 1 and
/// τ < n/(n+1).
pub fn concave_mean_bound(d: &IrwinHallTail, t: &Rational) -> Result<f64> {
    if *t <= Rational::zero() || *t >= rat_int(1) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: format!("{t}"),
            domain: "(0, 1)",
        });
    }
    let n = f64::from(d.n());
    let tau = d.root_tail(t)?;
    if tau >= n / (n + 1.0) {
        return Err(Error::Precondition {
            condition: format!(
                "root tail {tau} must stay below n/(n+1) = {}",
                n / (n + 1.0)
            ),
        });
    }
    Ok(to_f64(t) * (1.0 + tau / (n - (n + 1.0) * tau)))
}

/// Companion bound on D(t) itself:
/// t² / ((1/τ - 1)(1-t²)n - 2), valid when that denominator is positive.
pub fn derived_concave_bound(d: &IrwinHallTail, t: &Rational) -> Result<f64> {
    if *t <= Rational::zero() || *t >= rat_int(1) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: format!("{t}"),
            domain: "(0, 1)",
        });
    }
    let n = f64::from(d.n());
    let tau = d.root_tail(t)?;
    let tf = to_f64(t);
    let denom = (1.0 / tau - 1.0) * (1.0 - tf * tf) * n - 2.0;
    if denom <= 0.0 {
        return Err(Error::Precondition {
            condition: format!(
                "needs (1/root_tail - 1)(1-t^2)n > 2, denominator came out {denom}"
            ),
        });
    }
    Ok(tf * tf / denom)
}

/// Exact corner-formula envelope (n(1-t)/2)^n / n!: an upper bound for
/// p_X(t) everywhere on [-1, 1], with equality on the last piece.
pub fn corner_formula_bound(n: u32, t: &Rational) -> Result<Rational> {
    if *t < rat_int(-1) || *t > rat_int(1) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: format!("{t}"),
            domain: "[-1, 1]",
        });
    }
    Ok(exact_corner_tail(n, t))
}

/// Float relaxation (e(1-t)/2)^n of the corner formula.
pub fn corner_e_form_bound(n: u32, t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.to_string(),
            domain: "[-1, 1]",
        });
    }
    Ok((std::f64::consts::E * (1.0 - t) / 2.0).powi(n as i32))
}

/// Sub-Gaussian tail envelope e^{-3nt²/2}, valid for 0 < t <= 1.
pub fn chernoff_bound(n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.to_string(),
            domain: "(0, 1]",
        });
    }
    Ok((-1.5 * f64::from(n) * t * t).exp())
}

/// The exponential-moment envelope the sub-Gaussian bound relaxes:
/// e^{-3nt²}·(sinh(3t)/(3t))^n, valid for 0 < t <= 1. Sits strictly between
/// p_X(t) and the sub-Gaussian envelope.
pub fn mgf_bound(n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.to_string(),
            domain: "(0, 1]",
        });
    }
    let mu = 3.0 * t;
    let nf = f64::from(n);
    Ok((nf * ((mu.sinh() / mu).ln() - mu * t)).exp())
}

/// Standard-deviation bound on the truncated mean: t + 1/√(3n), valid for
/// 0 <= t < 1.
pub fn sd_mean_bound(n: u32, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.to_string(),
            domain: "[0, 1)",
        });
    }
    Ok(t + 1.0 / (3.0 * f64::from(n)).sqrt())
}

/// Exact affine bound on the truncated mean: m_X(t) <= (1+t)/2, with
/// equality for n = 1.
pub fn half_mean_bound(t: &Rational) -> Rational {
    (rat_int(1) + t) / rat_int(2)
}

/// Conjectured volume envelope 2^n · Π √(1-x_i²) for bodies in [-1,1]^n
/// with barycenter x. Returns an absolute volume, not a fraction.
pub fn conjectured_volume_bound(x: &[f64]) -> Result<f64> {
    check_open_cube(x)?;
    Ok(x.iter().map(|&xi| 2.0 * (1.0 - xi * xi).sqrt()).product())
}

/// Symmetrization volume envelope 4^n · Π (1-|x_i|), from the Milman-Pajor
/// inequality applied to the body intersected with its reflection.
pub fn milman_pajor_volume_bound(x: &[f64]) -> Result<f64> {
    check_open_cube(x)?;
    Ok(x.iter().map(|&xi| 4.0 * (1.0 - xi.abs())).product())
}

/// Sharper product envelope e^n · Π (1-|x_i|); the constant e is optimal
/// for the corner-simplex family.
pub fn e_product_volume_bound(x: &[f64]) -> Result<f64> {
    check_open_cube(x)?;
    Ok(x.iter()
        .map(|&xi| std::f64::consts::E * (1.0 - xi.abs()))
        .product())
}

fn check_open_cube(x: &[f64]) -> Result<()> {
    if x.is_empty() || x.iter().any(|xi| xi.abs() >= 1.0 || xi.is_nan()) {
        return Err(Error::OutOfDomain {
            what: "x",
            value: format!("{x:?}"),
            domain: "open cube (-1,1)^n, n >= 1",
        });
    }
    Ok(())
}

/// Volume bound for subsets K of the standard simplex {x >= 0, Σx <= 1}
/// with barycenter x: ((n+1)^n/n!) · [(1-Σx)·Πx]^{n/(n+1)}.
pub fn simplex_volume_bound(x: &[f64]) -> Result<f64> {
    let (product, slack, _) = open_simplex_parts(x)?;
    let n = x.len() as f64;
    Ok(prefactor(x.len()) * (slack * product).powf(n / (n + 1.0)))
}

/// Strengthened form with the largest barycentric coordinate in the
/// denominator: ((n+1)^n/n!) · (1-Σx)·Πx / max{x_1..x_n, 1-Σx}.
pub fn simplex_volume_bound_strong(x: &[f64]) -> Result<f64> {
    let (product, slack, max_coord) = open_simplex_parts(x)?;
    Ok(prefactor(x.len()) * slack * product / max_coord.max(slack))
}

fn prefactor(n: usize) -> f64 {
    let n_fact: f64 = (1..=n).map(|i| i as f64).product();
    ((n as f64) + 1.0).powi(n as i32) / n_fact
}

fn open_simplex_parts(x: &[f64]) -> Result<(f64, f64, f64)> {
    let sum: f64 = x.iter().sum();
    if x.is_empty() || x.iter().any(|&xi| xi <= 0.0) || sum >= 1.0 {
        return Err(Error::OutOfDomain {
            what: "x",
            value: format!("{x:?}"),
            domain: "open simplex: all x_i > 0 and sum < 1",
        });
    }
    let product: f64 = x.iter().product();
    let max_coord = x.iter().cloned().fold(0.0, f64::max);
    Ok((product, 1.0 - sum, max_coord))
}

/// Sharpness ratio of the e-product envelope along the corner-simplex
/// family, normalized by the offset: vol^{1/n}/(1-t) = n/(n!)^{1/n},
/// independent of t. Increases to e from below.
pub fn corner_ratio_offset(n: u32) -> Result<f64> {
    let root = rational_nth_root(&Rational::from_integer(factorial(n)), n)?;
    Ok(f64::from(n) / root)
}

/// Same ratio normalized by the barycenter coordinate instead:
/// vol^{1/n}/(1-s) = (n+1)/(n!)^{1/n}. Crosses e from below... never:
/// it also increases to e, one harmonic step ahead of the offset form.
pub fn corner_ratio_barycenter(n: u32) -> Result<f64> {
    let root = rational_nth_root(&Rational::from_integer(factorial(n)), n)?;
    Ok((f64::from(n) + 1.0) / root)
}

/// All tail-side envelopes evaluated at one (n, t), with the exact tail and
/// mean alongside for comparison. Envelopes whose domain excludes t are
/// None. Volume envelopes are evaluated at the diagonal barycenter
/// m_X(t)·1_n and bound the absolute volume 2^n·p_X(t).
#[derive(Debug, Clone)]
pub struct TailEnvelope {
    pub n: u32,
    pub tail: Rational,
    pub mean: Rational,
    pub corner_formula: Rational,
    pub corner_e_form: f64,
    pub chernoff: Option<f64>,
    pub mgf: Option<f64>,
    pub sd_mean: Option<f64>,
    pub half_mean: Rational,
    pub conjectured_volume: f64,
    pub milman_pajor_volume: f64,
    pub e_product_volume: f64,
}

pub fn envelope_bounds(d: &IrwinHallTail, t: &Rational) -> Result<TailEnvelope> {
    let n = d.n();
    let tf = to_f64(t);
    let tail = d.tail(t)?;
    let mean = d.truncated_mean(t)?;
    let mf = to_f64(&mean);
    let diag: Vec<f64> = vec![mf; n as usize];
    Ok(TailEnvelope {
        n,
        tail,
        mean: mean.clone(),
        corner_formula: corner_formula_bound(n, t)?,
        corner_e_form: corner_e_form_bound(n, tf)?,
        chernoff: (tf > 0.0).then(|| chernoff_bound(n, tf)).transpose()?,
        mgf: (tf > 0.0).then(|| mgf_bound(n, tf)).transpose()?,
        sd_mean: (tf >= 0.0).then(|| sd_mean_bound(n, tf)).transpose()?,
        half_mean: half_mean_bound(t),
        conjectured_volume: conjectured_volume_bound(&diag)?,
        milman_pajor_volume: milman_pajor_volume_bound(&diag)?,
        e_product_volume: e_product_volume_bound(&diag)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational_grid;

    fn params(alpha: f64, beta: f64, gamma: f64, n: u32) -> RegionParams {
        RegionParams::new(alpha, beta, gamma, n).unwrap()
    }

    #[test]
    fn region_two_closed_form() {
        let h2 = region_bound(2, &params(2.0, 3.0, 0.5, 12)).unwrap();
        assert!((h2 - 3.0 / 35.0).abs() < 1e-15);
        // alpha = 2 - 1/n makes the bound exactly 1/n.
        for n in [12u32, 20, 100] {
            let nf = f64::from(n);
            let h = region_bound(2, &params(2.0 - 1.0 / nf, 3.0, 0.5, n)).unwrap();
            assert!((h - 1.0 / nf).abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn region_four_closed_forms() {
        for n in [12u32, 20, 100] {
            let nf = f64::from(n);
            let a = region_bound(4, &params(2.0, 3.0, 0.5, n)).unwrap();
            assert!((a - 384.0 / (257.0 * nf)).abs() < 1e-15, "n={n}");
        }
        // beta = 8 requires sqrt(3n) >= 8, so n >= 22.
        for n in [22u32, 50, 100] {
            let nf = f64::from(n);
            let b = region_bound(4, &params(2.0, 8.0, 2.0 / 3.0, n)).unwrap();
            assert!((b - 288.0 / (293.0 * nf)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn region_one_and_five_closed_forms() {
        let e = std::f64::consts::E;
        for n in [12u32, 50] {
            let nf = f64::from(n);
            let h1 = region_bound(1, &params(2.0, 3.0, 0.5, n)).unwrap();
            assert!((h1 - 16.0 / ((e * e - 1.0) * (3.0 * nf - 1.0))).abs() < 1e-15);
            let h5 = region_bound(5, &params(2.0, 3.0, 0.5, n)).unwrap();
            assert!((h5 - 1.0 / ((10.0 / e - 3.0) * nf - 8.0)).abs() < 1e-12);
        }
        let h3 = region_bound(3, &params(2.0, 3.0, 0.5, 12)).unwrap();
        assert!((h3 - 4.0 / 20.0).abs() < 1e-15);
    }

    #[test]
    fn region_preconditions() {
        assert!(region_bound(1, &params(1.2, 3.0, 0.5, 12)).is_err());
        assert!(region_bound(3, &params(2.0, 5.0, 0.5, 12)).is_err());
        assert!(region_bound(4, &params(2.0, 2.0, 0.5, 12)).is_err());
        assert!(region_bound(5, &params(2.0, 3.0, 0.4, 12)).is_err());
        assert!(region_bound(6, &params(2.0, 3.0, 0.5, 12)).is_err());
        assert!(RegionParams::new(7.0, 3.0, 0.5, 12).is_err());
        assert!(RegionParams::new(2.0, 3.0, 0.0, 12).is_err());
        assert!(RegionParams::new(2.0, 3.0, 1.5, 12).is_err());
    }

    #[test]
    fn regions_positive_and_decreasing_in_n() {
        for which in 1..=5u8 {
            let mut last = f64::INFINITY;
            for n in 12..=40 {
                let h = region_bound(which, &params(2.0, 3.0, 0.5, n)).unwrap();
                assert!(h > 0.0 && h < last, "region {which} n={n}");
                last = h;
            }
        }
    }

    #[test]
    fn region_classification() {
        let p = params(2.0, 3.0, 0.5, 12);
        let cases = [
            (rat(-1, 2), 1),
            (rat(-1, 3), 1),
            (rat(-1, 4), 2),
            (rat_int(0), 2),
            (rat(1, 4), 3),
            (rat(1, 2), 3),
            (rat(3, 5), 5),
        ];
        for (t, expect) in cases {
            assert_eq!(p.region_of(&t).unwrap(), expect, "t={t}");
        }
        // With beta/sqrt(3n) = gamma the fourth region is empty; widen n and
        // it opens up.
        let p = params(2.0, 3.0, 0.5, 27);
        assert_eq!(p.region_of(&rat(2, 5)).unwrap(), 4);
        assert!(p.region_of(&rat_int(1)).is_err());
    }

    #[test]
    fn combined_bound_examples() {
        assert_eq!(combined_bound(12).unwrap(), rat(1, 3));
        assert_eq!(combined_bound(20).unwrap(), rat(3, 25));
        assert!(combined_bound(11).is_err());
        let mut last = rat_int(1);
        for n in 12..60 {
            let c = combined_bound(n).unwrap();
            assert!(c > Rational::zero() && c < last);
            last = c;
        }
    }

    #[test]
    fn region_five_crosses_combined_late() {
        // With gamma = 2, beta = 3 the fifth region bound exceeds the
        // combined bound until n = 248; the regions only jointly imply a
        // constant-over-n bound, not this particular one, below that.
        for (n, expect_below) in [(247u32, false), (248, true), (400, true)] {
            let h5 = region_bound(5, &params(2.0, 3.0, 0.5, n)).unwrap();
            let c = to_f64(&combined_bound(n).unwrap());
            assert_eq!(h5 <= c, expect_below, "n={n} h5={h5} combined={c}");
        }
    }

    #[test]
    fn concave_mean_bound_example() {
        let d = IrwinHallTail::build(2).unwrap();
        let bound = concave_mean_bound(&d, &rat(1, 2)).unwrap();
        // tau = 8^{-1/2} gives t(1 + 1/(4sqrt(2)-3)) at t = 1/2.
        let expect = 0.5 * (1.0 + 1.0 / (4.0 * 2f64.sqrt() - 3.0));
        assert!((bound - expect).abs() < 1e-15);
        assert!(to_f64(&d.truncated_mean(&rat(1, 2)).unwrap()) < bound);

        assert!(concave_mean_bound(&d, &rat_int(0)).is_err());
        // Close to t = 0 the root tail sits above n/(n+1): at n = 2,
        // t = 1/32, p = 961/2048 and sqrt(p) > 2/3.
        assert!(concave_mean_bound(&d, &rat(1, 32)).is_err());
    }

    #[test]
    fn derived_concave_bound_dominates_exact() {
        let d = IrwinHallTail::build(20).unwrap();
        let t = rat(1, 2);
        let bound = derived_concave_bound(&d, &t).unwrap();
        let exact = to_f64(&d.derived_quantity(&t).unwrap());
        assert!(exact < bound, "exact={exact} bound={bound}");
        assert!(bound.is_finite() && bound > 0.0);
    }

    #[test]
    fn corner_formula_tight_on_last_piece() {
        let d = IrwinHallTail::build(3).unwrap();
        let b = corner_formula_bound(3, &rat(1, 3)).unwrap();
        assert_eq!(b, rat(1, 6));
        assert_eq!(b, d.tail(&rat(1, 3)).unwrap());
        // Strict inequality off the last piece.
        assert!(corner_formula_bound(3, &rat_int(0)).unwrap() > d.tail(&rat_int(0)).unwrap());
    }

    #[test]
    fn tail_envelopes_dominate() {
        for n in [2u32, 5, 12] {
            let d = IrwinHallTail::build(n).unwrap();
            for t in rational_grid(&rat(1, 8), &rat(7, 8), &rat(1, 8)) {
                let env = envelope_bounds(&d, &t).unwrap();
                let p = to_f64(&env.tail);
                let m = to_f64(&env.mean);
                assert!(env.corner_formula >= env.tail);
                assert!(env.corner_e_form > to_f64(&env.corner_formula) * (1.0 - 1e-12));
                let ch = env.chernoff.unwrap();
                let mg = env.mgf.unwrap();
                assert!(p < mg && mg < ch, "n={n} t={t} p={p} mgf={mg} ch={ch}");
                assert!(env.sd_mean.unwrap() >= m);
                assert!(env.half_mean >= env.mean);
                let vol = 2f64.powi(n as i32) * p;
                assert!(vol < env.conjectured_volume);
                assert!(vol < env.e_product_volume);
                assert!(env.e_product_volume < env.milman_pajor_volume);
            }
        }
    }

    #[test]
    fn conjectured_bound_at_off_diagonal_point() {
        let b = conjectured_volume_bound(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((b - 32.0 / 9.0).abs() < 1e-14);
        // The diagonal slice at t = 0 has this barycenter and volume 2.
        assert!(2.0 < b);
        assert!(conjectured_volume_bound(&[1.0, 0.0]).is_err());
        assert!(conjectured_volume_bound(&[]).is_err());
    }

    #[test]
    fn simplex_bounds_scaled_copy() {
        // K = λS has barycenter λ/(n+1)·1_n and volume λ^n/n!; the strong
        // bound is tight on this family, the weak one only at λ = 1.
        let n = 2usize;
        for lambda in [0.5f64, 0.75, 1.0 - 1e-9] {
            let x = vec![lambda / (n as f64 + 1.0); n];
            let vol = lambda.powi(n as i32) / 2.0;
            let weak = simplex_volume_bound(&x).unwrap();
            let strong = simplex_volume_bound_strong(&x).unwrap();
            assert!((strong - vol).abs() < 1e-9, "lambda={lambda}");
            assert!(weak >= strong - 1e-12);
        }
        assert!(simplex_volume_bound(&[0.5, 0.5]).is_err());
        assert!(simplex_volume_bound(&[0.2, -0.1]).is_err());
    }

    #[test]
    fn corner_ratios() {
        let r4 = corner_ratio_offset(4).unwrap();
        assert!((r4 - 4.0 / 24f64.powf(0.25)).abs() < 1e-12);
        assert!((r4 - 1.807).abs() < 5e-4);

        // The barycenter-normalized ratio runs exactly (n+1)/n ahead.
        for n in [3u32, 10, 50] {
            let a = corner_ratio_offset(n).unwrap();
            let b = corner_ratio_barycenter(n).unwrap();
            assert!((b / a - (f64::from(n) + 1.0) / f64::from(n)).abs() < 1e-12);
        }

        // Both increase toward e; the barycenter form crosses 2.6 by n = 50,
        // the offset form only at n = 69.
        assert!(corner_ratio_offset(50).unwrap() < 2.6);
        assert!(corner_ratio_barycenter(50).unwrap() > 2.6);
        assert!(corner_ratio_offset(68).unwrap() < 2.6);
        assert!(corner_ratio_offset(69).unwrap() > 2.6);
        let mut last = 0.0;
        for n in 1..=80 {
            let r = corner_ratio_offset(n).unwrap();
            assert!(r > last && r < std::f64::consts::E);
            last = r;
        }
    }
}
