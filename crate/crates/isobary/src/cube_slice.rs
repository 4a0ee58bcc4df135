//! Exact volume fraction and barycenter of cube-halfspace intersections
//! [-1,1]^n ∩ {⟨θ,u⟩ >= c}.
//!
//! After dropping zero weights, flipping signs so every weight is positive,
//! and mapping to the unit cube, the slice becomes {ξ ∈ [0,1]^k : Σ a_i ξ_i
//! <= e}, whose volume is the classical inclusion-exclusion sum over subsets
//!
//!   vol = (1/(k! Π a_i)) Σ_J (-1)^{|J|} ((e - a_J)_+)^k,   a_J = Σ_{i∈J} a_i,
//!
//! and whose coordinate moments come from the same enumeration one power
//! higher. Everything is scaled by a common denominator so the sums run in
//! big integers; the scale factor cancels in both outputs.
//!
//! The same enumeration with compensated double summation backs a float path
//! for dimensions past the exact cap.

use crate::compensated::Neumaier;
use crate::error::{Error, Result};
use crate::exactnum::{from_f64, rat, rat_int, to_f64, Rational};
use crate::irwin_hall::{factorial, IrwinHallTail};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exact-mode dimension cap: the subset enumeration is 2^n.
pub const EXACT_SLICE_CAP: usize = 12;

/// Float-mode dimension cap.
pub const FLOAT_SLICE_CAP: usize = 25;

/// Closed halfspace {u : ⟨θ,u⟩ >= c}. The rational form is unnormalized
/// ((θ,c) and (λθ,λc) with λ > 0 denote the same halfspace); the float form
/// carries a unit direction vector.
#[derive(Debug, Clone)]
pub enum Halfspace {
    Exact {
        direction: Vec<Rational>,
        offset: Rational,
    },
    Float {
        direction: Vec<f64>,
        offset: f64,
    },
}

impl Halfspace {
    pub fn exact(direction: Vec<Rational>, offset: Rational) -> Result<Self> {
        if direction.is_empty() || direction.iter().all(Zero::is_zero) {
            return Err(Error::InvalidHalfspace(
                "direction must be nonzero".to_string(),
            ));
        }
        Ok(Halfspace::Exact { direction, offset })
    }

    /// Float direction must be a unit vector; tolerance 1e-14 on the norm.
    pub fn from_floats(direction: Vec<f64>, offset: f64) -> Result<Self> {
        if direction.is_empty() || direction.iter().any(|d| !d.is_finite()) || !offset.is_finite()
        {
            return Err(Error::InvalidHalfspace(
                "direction and offset must be finite and nonempty".to_string(),
            ));
        }
        let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidHalfspace(format!(
                "direction norm {norm} is not 1 within 1e-14"
            )));
        }
        Ok(Halfspace::Float { direction, offset })
    }

    pub fn dimension(&self) -> usize {
        match self {
            Halfspace::Exact { direction, .. } => direction.len(),
            Halfspace::Float { direction, .. } => direction.len(),
        }
    }

    /// Rational view. Float coordinates are binary fractions, so the
    /// conversion is lossless: the exact path then computes the true
    /// stats of exactly the halfspace the doubles denote. Finiteness is a
    /// constructor invariant, so the conversions cannot fail.
    fn exact_view(&self) -> (Vec<Rational>, Rational) {
        match self {
            Halfspace::Exact { direction, offset } => (direction.clone(), offset.clone()),
            Halfspace::Float { direction, offset } => (
                direction
                    .iter()
                    .map(|&d| from_f64(d).expect("finite by construction"))
                    .collect(),
                from_f64(*offset).expect("finite by construction"),
            ),
        }
    }

    fn float_view(&self) -> (Vec<f64>, f64) {
        match self {
            Halfspace::Exact { direction, offset } => (
                direction.iter().map(to_f64).collect(),
                to_f64(offset),
            ),
            Halfspace::Float { direction, offset } => (direction.clone(), *offset),
        }
    }
}

/// Exact slice statistics: volume as a fraction of 2^n, and the barycenter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceStats {
    pub volume_fraction: Rational,
    pub barycenter: Vec<Rational>,
}

/// Float counterpart, for dimensions past the exact cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceStatsF {
    pub volume_fraction: f64,
    pub barycenter: Vec<f64>,
}

/// Exact volume fraction and barycenter of [-1,1]^n ∩ {⟨θ,u⟩ >= c}.
/// The empty slice is an error; the full cube returns (1, 0^n).
pub fn slice_stats(h: &Halfspace) -> Result<SliceStats> {
    let n = h.dimension();
    if n > EXACT_SLICE_CAP {
        return Err(Error::CapExceeded {
            what: "slice dimension (exact mode)",
            value: n,
            cap: EXACT_SLICE_CAP,
        });
    }
    let (direction, offset) = h.exact_view();

    // Zero weights factor out; record signs so every active weight is
    // positive and flip the affected barycenter coordinates at the end.
    let active: Vec<usize> = (0..n).filter(|&j| !direction[j].is_zero()).collect();
    if active.is_empty() {
        return Err(Error::InvalidHalfspace(
            "direction must be nonzero".to_string(),
        ));
    }
    let weights: Vec<Rational> = active.iter().map(|&j| direction[j].abs()).collect();
    let sigma: Rational = weights.iter().sum();
    let e = (&sigma - &offset) / rat_int(2);

    if e <= Rational::zero() {
        return Err(Error::EmptySlice);
    }
    if e >= sigma {
        return Ok(SliceStats {
            volume_fraction: Rational::one(),
            barycenter: vec![Rational::zero(); n],
        });
    }

    // Clear denominators: the formulas are homogeneous of degree zero in
    // (weights, e) jointly, so the common scale cancels.
    let mut scale = e.denom().clone();
    for w in &weights {
        scale = scale.lcm(w.denom());
    }
    let scale = Rational::from_integer(scale);
    let a: Vec<BigInt> = weights.iter().map(|w| (w * &scale).to_integer()).collect();
    let e_int = (&e * &scale).to_integer();

    let k = active.len();
    let sums = enumerate_exact(&a, &e_int, k);

    let k_fact = Rational::from_integer(factorial(k as u32));
    let prod_a: BigInt = a.iter().product();
    let fraction = Rational::from_integer(sums.s1.clone())
        / (&k_fact * Rational::from_integer(prod_a));
    debug_assert!(fraction > Rational::zero() && fraction < Rational::one());

    let mut barycenter = vec![Rational::zero(); n];
    let kp1 = BigInt::from(k + 1);
    for (slot, &j) in active.iter().enumerate() {
        let numer = BigInt::from(2) * (&sums.s2 + &kp1 * &a[slot] * &sums.t[slot]);
        let denom = &kp1 * &a[slot] * &sums.s1;
        let unit = rat_int(1) - Rational::new(numer, denom);
        barycenter[j] = if direction[j].is_negative() { -unit } else { unit };
    }
    Ok(SliceStats {
        volume_fraction: fraction,
        barycenter,
    })
}

struct ExactSums {
    /// Σ_J (-1)^{|J|} ((E - A_J)_+)^k
    s1: BigInt,
    /// Same, one power higher.
    s2: BigInt,
    /// Per-coordinate restriction of s1 to subsets containing j.
    t: Vec<BigInt>,
}

fn enumerate_exact(a: &[BigInt], e: &BigInt, k: usize) -> ExactSums {
    let mut sums = ExactSums {
        s1: BigInt::zero(),
        s2: BigInt::zero(),
        t: vec![BigInt::zero(); k],
    };
    let mut members = Vec::with_capacity(k);
    recurse_exact(a, e, k, 0, &BigInt::zero(), false, &mut members, &mut sums);
    sums
}

#[allow(clippy::too_many_arguments)]
fn recurse_exact(
    a: &[BigInt],
    e: &BigInt,
    k: usize,
    index: usize,
    partial: &BigInt,
    odd: bool,
    members: &mut Vec<usize>,
    sums: &mut ExactSums,
) {
    // Weights are positive, so once the partial subset sum reaches e every
    // superset contributes a clipped zero.
    if partial >= e {
        return;
    }
    if index == k {
        let d = e - partial;
        let dk = num_traits::Pow::pow(&d, k as u32);
        let dk1 = &dk * &d;
        if odd {
            sums.s1 -= &dk;
            sums.s2 -= &dk1;
            for &j in members.iter() {
                sums.t[j] -= &dk;
            }
        } else {
            sums.s1 += &dk;
            sums.s2 += &dk1;
            for &j in members.iter() {
                sums.t[j] += &dk;
            }
        }
        return;
    }
    recurse_exact(a, e, k, index + 1, partial, odd, members, sums);
    members.push(index);
    let with = partial + &a[index];
    recurse_exact(a, e, k, index + 1, &with, !odd, members, sums);
    members.pop();
}

/// Float slice statistics by the same enumeration in compensated doubles.
/// Trustworthy where cross-validated against the exact path; past the exact
/// cap it inherits the usual alternating-sum cancellation.
pub fn slice_stats_f64(h: &Halfspace) -> Result<SliceStatsF> {
    let n = h.dimension();
    if n > FLOAT_SLICE_CAP {
        return Err(Error::CapExceeded {
            what: "slice dimension (float mode)",
            value: n,
            cap: FLOAT_SLICE_CAP,
        });
    }
    let (direction, offset) = h.float_view();
    let active: Vec<usize> = (0..n).filter(|&j| direction[j] != 0.0).collect();
    if active.is_empty() {
        return Err(Error::InvalidHalfspace(
            "direction must be nonzero".to_string(),
        ));
    }
    let a: Vec<f64> = active.iter().map(|&j| direction[j].abs()).collect();
    let sigma: f64 = a.iter().sum();
    let e = (sigma - offset) / 2.0;
    if e <= 0.0 {
        return Err(Error::EmptySlice);
    }
    if e >= sigma {
        return Ok(SliceStatsF {
            volume_fraction: 1.0,
            barycenter: vec![0.0; n],
        });
    }

    let k = active.len();
    let mut s1 = Neumaier::new();
    let mut s2 = Neumaier::new();
    let mut t = vec![Neumaier::new(); k];
    let mut members = Vec::with_capacity(k);
    recurse_f64(&a, e, k, 0, 0.0, false, &mut members, &mut s1, &mut s2, &mut t);

    let k_fact: f64 = (1..=k).map(|i| i as f64).product();
    let prod_a: f64 = a.iter().product();
    let s1 = s1.total();
    let fraction = s1 / (k_fact * prod_a);

    let mut barycenter = vec![0.0; n];
    for (slot, &j) in active.iter().enumerate() {
        let unit =
            1.0 - 2.0 * (s2.total() + (k as f64 + 1.0) * a[slot] * t[slot].total())
                / ((k as f64 + 1.0) * a[slot] * s1);
        barycenter[j] = if direction[j] < 0.0 { -unit } else { unit };
    }
    Ok(SliceStatsF {
        volume_fraction: fraction,
        barycenter,
    })
}

#[allow(clippy::too_many_arguments)]
fn recurse_f64(
    a: &[f64],
    e: f64,
    k: usize,
    index: usize,
    partial: f64,
    odd: bool,
    members: &mut Vec<usize>,
    s1: &mut Neumaier,
    s2: &mut Neumaier,
    t: &mut [Neumaier],
) {
    if partial >= e {
        return;
    }
    if index == k {
        let d = e - partial;
        let dk = d.powi(k as i32);
        let sign = if odd { -1.0 } else { 1.0 };
        s1.add(sign * dk);
        s2.add(sign * dk * d);
        for &j in members.iter() {
            t[j].add(sign * dk);
        }
        return;
    }
    recurse_f64(a, e, k, index + 1, partial, odd, members, s1, s2, t);
    members.push(index);
    recurse_f64(a, e, k, index + 1, partial + a[index], !odd, members, s1, s2, t);
    members.pop();
}

/// The simplex corner K_{n,t} = [-1,1]^n ∩ {mean(u) >= t} for t past the
/// second-to-last breakpoint: fraction n^n (1-t)^n / (n! 2^n), barycenter
/// ((nt+1)/(n+1))·1_n, both closed-form.
pub fn simplex_slice(n: u32, t: &Rational) -> Result<SliceStats> {
    let lo = rat_int(1) - rat(2, i64::from(n));
    if *t <= lo || *t >= rat_int(1) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: format!("{t}"),
            domain: "(1 - 2/n, 1)",
        });
    }
    let base = rat(i64::from(n), 2) * (rat_int(1) - t);
    let mut fraction = Rational::one() / Rational::from_integer(factorial(n));
    for _ in 0..n {
        fraction *= &base;
    }
    let s = (rat_int(i64::from(n)) * t + rat_int(1)) / rat_int(i64::from(n) + 1);
    Ok(SliceStats {
        volume_fraction: fraction,
        barycenter: vec![s; n as usize],
    })
}

/// The diagonal slice {mean(u) >= t}: fraction p_X(t) and barycenter
/// m_X(t)·1_n, read from the distribution of the coordinate mean. Bridges
/// the slice geometry to the one-dimensional tail functions.
pub fn diagonal_slice(n: u32, t: &Rational) -> Result<SliceStats> {
    if *t < rat_int(-1) || *t >= rat_int(1) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: format!("{t}"),
            domain: "[-1, 1)",
        });
    }
    let dist = IrwinHallTail::build(n)?;
    let m = dist.truncated_mean(t)?;
    Ok(SliceStats {
        volume_fraction: dist.tail(t)?,
        barycenter: vec![m; n as usize],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational_grid;

    fn ones(n: usize) -> Vec<Rational> {
        vec![rat_int(1); n]
    }

    #[test]
    fn axis_slice() {
        let h = Halfspace::exact(vec![rat_int(1), rat_int(0), rat_int(0)], rat(1, 2)).unwrap();
        let s = slice_stats(&h).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 4));
        assert_eq!(s.barycenter, vec![rat(3, 4), rat_int(0), rat_int(0)]);
    }

    #[test]
    fn diagonal_through_center() {
        let h = Halfspace::exact(ones(2), rat_int(0)).unwrap();
        let s = slice_stats(&h).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 2));
        assert_eq!(s.barycenter, vec![rat(1, 3), rat(1, 3)]);
    }

    #[test]
    fn mean_at_least_three_quarters() {
        // mean(u) >= 3/4 is the halfspace u1 + u2 >= 3/2.
        let h = Halfspace::exact(ones(2), rat(3, 2)).unwrap();
        let s = slice_stats(&h).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 32));
        assert_eq!(s.barycenter, vec![rat(5, 6), rat(5, 6)]);
    }

    #[test]
    fn simplex_corner_examples() {
        let s = simplex_slice(2, &rat(3, 4)).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 32));
        assert_eq!(s.barycenter, vec![rat(5, 6), rat(5, 6)]);

        let s = simplex_slice(3, &rat(5, 6)).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 384));
        assert_eq!(s.barycenter, vec![rat(7, 8); 3]);

        let s = simplex_slice(1, &rat(1, 2)).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 4));
        assert_eq!(s.barycenter, vec![rat(3, 4)]);

        assert!(simplex_slice(3, &rat(1, 3)).is_err());
        assert!(simplex_slice(3, &rat_int(1)).is_err());
    }

    #[test]
    fn simplex_agrees_with_enumeration() {
        for n in 1..=6u32 {
            let lo = rat_int(1) - rat(2, i64::from(n));
            let t = (&lo + rat_int(1)) / rat_int(2) + rat(1, 64);
            let expect = simplex_slice(n, &t).unwrap();
            let h = Halfspace::exact(ones(n as usize), rat_int(i64::from(n)) * &t).unwrap();
            assert_eq!(slice_stats(&h).unwrap(), expect, "n={n}");
        }
    }

    #[test]
    fn diagonal_slice_examples() {
        let s = diagonal_slice(2, &rat_int(0)).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 2));
        assert_eq!(s.barycenter, vec![rat(1, 3); 2]);

        for n in [1u32, 3, 7] {
            let s = diagonal_slice(n, &rat_int(-1)).unwrap();
            assert_eq!(s.volume_fraction, rat_int(1));
            assert_eq!(s.barycenter, vec![rat_int(0); n as usize]);
        }

        let s = diagonal_slice(3, &rat(1, 3)).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 6));
        assert!(diagonal_slice(3, &rat_int(1)).is_err());
    }

    #[test]
    fn enumeration_matches_diagonal_formula() {
        for n in 1..=8u32 {
            for t in rational_grid(&rat(-7, 8), &rat(7, 8), &rat(1, 4)) {
                let expect = diagonal_slice(n, &t).unwrap();
                let h =
                    Halfspace::exact(ones(n as usize), rat_int(i64::from(n)) * &t).unwrap();
                assert_eq!(slice_stats(&h).unwrap(), expect, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn complement_volumes_and_moments_balance() {
        // The two closed halfspace slices overlap only in a measure-zero
        // slab, so fractions add to 1 and moments add to the cube's (zero).
        let cases = [
            (vec![rat(2, 3), rat(-1, 5), rat(1, 2)], rat(1, 4)),
            (vec![rat_int(1), rat(1, 7), rat(3, 4)], rat(-1, 3)),
            (vec![rat(5, 8), rat(5, 8), rat(1, 8), rat(7, 8)], rat(1, 2)),
        ];
        for (dir, c) in cases {
            let flipped: Vec<Rational> = dir.iter().map(|d| -d).collect();
            let a = slice_stats(&Halfspace::exact(dir, c.clone()).unwrap()).unwrap();
            let b = slice_stats(&Halfspace::exact(flipped, -c).unwrap()).unwrap();
            assert_eq!(&a.volume_fraction + &b.volume_fraction, rat_int(1));
            for j in 0..a.barycenter.len() {
                let lhs = &a.volume_fraction * &a.barycenter[j];
                let rhs = &b.volume_fraction * &b.barycenter[j];
                assert_eq!(lhs, -rhs, "coordinate {j}");
            }
        }
    }

    #[test]
    fn permutation_and_sign_equivariance() {
        let dir = vec![rat(1, 2), rat(1, 3), rat(1, 5)];
        let c = rat(1, 7);
        let base = slice_stats(&Halfspace::exact(dir.clone(), c.clone()).unwrap()).unwrap();

        let permuted = vec![dir[2].clone(), dir[0].clone(), dir[1].clone()];
        let p = slice_stats(&Halfspace::exact(permuted, c.clone()).unwrap()).unwrap();
        assert_eq!(p.volume_fraction, base.volume_fraction);
        assert_eq!(
            p.barycenter,
            vec![
                base.barycenter[2].clone(),
                base.barycenter[0].clone(),
                base.barycenter[1].clone()
            ]
        );

        let mut negated = dir.clone();
        negated[1] = -negated[1].clone();
        let s = slice_stats(&Halfspace::exact(negated, c).unwrap()).unwrap();
        assert_eq!(s.volume_fraction, base.volume_fraction);
        assert_eq!(s.barycenter[0], base.barycenter[0]);
        assert_eq!(s.barycenter[1], -base.barycenter[1].clone());
        assert_eq!(s.barycenter[2], base.barycenter[2]);
    }

    #[test]
    fn scale_invariance() {
        let dir = vec![rat(1, 3), rat(2, 7)];
        let c = rat(1, 5);
        let scaled: Vec<Rational> = dir.iter().map(|d| d * rat_int(6)).collect();
        let a = slice_stats(&Halfspace::exact(dir, c.clone()).unwrap()).unwrap();
        let b = slice_stats(&Halfspace::exact(scaled, c * rat_int(6)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_weights_center_their_coordinates() {
        let h = Halfspace::exact(vec![rat_int(0), rat(1, 2), rat_int(0)], rat(1, 8)).unwrap();
        let s = slice_stats(&h).unwrap();
        assert_eq!(s.barycenter[0], rat_int(0));
        assert_eq!(s.barycenter[2], rat_int(0));
        assert_eq!(s.volume_fraction, rat(3, 8));
        assert_eq!(s.barycenter[1], rat(5, 8));
    }

    #[test]
    fn empty_and_full_slices() {
        let h = Halfspace::exact(ones(2), rat_int(2)).unwrap();
        assert!(matches!(slice_stats(&h), Err(Error::EmptySlice)));
        let h = Halfspace::exact(ones(2), rat_int(3)).unwrap();
        assert!(matches!(slice_stats(&h), Err(Error::EmptySlice)));

        let h = Halfspace::exact(ones(2), rat_int(-2)).unwrap();
        let s = slice_stats(&h).unwrap();
        assert_eq!(s.volume_fraction, rat_int(1));
        assert_eq!(s.barycenter, vec![rat_int(0); 2]);
    }

    #[test]
    fn dimension_caps() {
        let h = Halfspace::exact(ones(13), rat_int(0)).unwrap();
        assert!(matches!(slice_stats(&h), Err(Error::CapExceeded { .. })));
        let h = Halfspace::exact(ones(26), rat_int(0)).unwrap();
        assert!(matches!(
            slice_stats_f64(&h),
            Err(Error::CapExceeded { .. })
        ));
        let h = Halfspace::exact(ones(12), rat_int(0)).unwrap();
        assert!(slice_stats(&h).is_ok());
    }

    #[test]
    fn float_constructor_demands_unit_norm() {
        assert!(Halfspace::from_floats(vec![1.0, 1.0], 0.0).is_err());
        let inv = 0.5f64.sqrt();
        assert!(Halfspace::from_floats(vec![inv, inv], 0.0).is_ok());
        assert!(Halfspace::from_floats(vec![f64::NAN], 0.0).is_err());
        assert!(Halfspace::from_floats(vec![], 0.0).is_err());
    }

    #[test]
    fn float_halfspace_through_exact_path() {
        // Doubles convert losslessly to dyadic rationals, so the exact path
        // accepts float halfspaces; 1/sqrt(2) coordinates land within a few
        // ulp of the ideal diagonal, and c = 0 is exact.
        let inv = 0.5f64.sqrt();
        let h = Halfspace::from_floats(vec![inv, inv], 0.0).unwrap();
        let s = slice_stats(&h).unwrap();
        assert_eq!(s.volume_fraction, rat(1, 2));
        assert_eq!(s.barycenter, vec![rat(1, 3); 2]);
    }

    #[test]
    fn float_path_matches_exact() {
        let cases = [
            (vec![rat(2, 3), rat(-1, 5), rat(1, 2)], rat(1, 4)),
            (vec![rat(5, 8), rat(5, 8), rat(1, 8), rat(7, 8)], rat(-1, 2)),
            (ones(10), rat(7, 3)),
        ];
        for (dir, c) in cases {
            let h = Halfspace::exact(dir, c).unwrap();
            let exact = slice_stats(&h).unwrap();
            let approx = slice_stats_f64(&h).unwrap();
            assert!(
                (to_f64(&exact.volume_fraction) - approx.volume_fraction).abs() < 1e-12
            );
            for j in 0..exact.barycenter.len() {
                assert!(
                    (to_f64(&exact.barycenter[j]) - approx.barycenter[j]).abs() < 1e-12,
                    "coordinate {j}"
                );
            }
        }
    }

    #[test]
    fn repeated_weights_are_fine() {
        // Coincident subset sums exercise the clipped terms at exact ties.
        let h = Halfspace::exact(ones(4), rat_int(2)).unwrap();
        let s = slice_stats(&h).unwrap();
        let expect = diagonal_slice(4, &rat(1, 2)).unwrap();
        assert_eq!(s, expect);
    }
}
