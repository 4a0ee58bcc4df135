//! Inversion of the slice-barycenter map: given a target x in the open
//! cube, find the halfspace {u : ⟨θ,u⟩ >= c} whose cube slice has
//! barycenter exactly x.
//!
//! The problem splits into a well-conditioned scalar part and a
//! direction part. For fixed unit θ, the projected barycenter
//! ⟨θ, b(θ,c)⟩ is increasing in c and sweeps (0, Σ|θ_i|), so c is
//! recovered by bisection against g = ⟨θ,x⟩. That reduction pins the
//! residual b(θ, c(θ)) - x into the tangent space of the sphere at θ,
//! matching the n-1 remaining degrees of freedom; a damped Gauss-Newton
//! step in an orthonormal tangent basis closes the loop. Every barycenter
//! evaluated along the way is an exact rational computation on the dyadic
//! halfspace the current doubles denote.
//!
//! Diagonal targets m·1_n bypass all of this: m_X is piecewise rational,
//! so the offset solves exactly at breakpoints and on the last piece, and
//! by high-precision bisection inside a single piece otherwise.

use crate::cube_slice::{slice_stats, Halfspace, SliceStats};
use crate::error::{Error, Result};
use crate::exactnum::{from_f64, rat, rat_int, to_f64, Rational};
use crate::irwin_hall::IrwinHallTail;
use num_traits::Zero;

/// Residual tolerance for a successful solve.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Inner bisection tolerance on the offset c.
const C_TOL: f64 = 1e-13;
/// Finite-difference step in tangent directions.
const FD_STEP: f64 = 1e-6;
/// Agreement tolerance between multistart solutions.
const AGREEMENT_TOL: f64 = 1e-8;
const MAX_OUTER: u32 = 100;

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Unit-direction halfspace achieving the target barycenter.
    pub halfspace: Halfspace,
    /// Euclidean norm of b(slice) - x at the returned halfspace.
    pub residual: f64,
    /// Outer iterations used by the start that produced the result.
    pub iterations: u32,
    /// Whether every converged start landed on the same (θ, c).
    pub multistart_agreement: bool,
}

/// Full solve with 2n+1 starts: the radial direction plus per-coordinate
/// nudges of the target. All converged starts must agree for the
/// `multistart_agreement` flag; the radial start's solution is returned.
pub fn solve(x: &[f64]) -> Result<SolveResult> {
    validate_target(x)?;
    let n = x.len();
    let mut starts = vec![normalize_or_none(x)];
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut nudged = x.to_vec();
            nudged[j] += 0.5 * sign;
            starts.push(normalize_or_none(&nudged));
        }
    }

    let mut successes: Vec<(Vec<f64>, f64, f64, u32)> = Vec::new();
    let mut best_failure: Option<(u32, f64)> = None;
    for theta0 in starts.into_iter().flatten() {
        match gauss_newton(x, theta0) {
            Ok(run) => successes.push(run),
            Err(Error::NoConvergence {
                iterations,
                residual,
            }) => {
                if best_failure.is_none_or(|(_, r)| residual < r) {
                    best_failure = Some((iterations, residual));
                }
            }
            Err(other) => return Err(other),
        }
    }

    let Some((theta, c, residual, iterations)) = successes.first().cloned() else {
        let (iterations, residual) = best_failure.unwrap_or((0, f64::INFINITY));
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    };
    let agreement = successes.iter().all(|(th, cc, _, _)| {
        (cc - c).abs() < AGREEMENT_TOL
            && th
                .iter()
                .zip(&theta)
                .all(|(a, b)| (a - b).abs() < AGREEMENT_TOL)
    });
    Ok(SolveResult {
        halfspace: Halfspace::from_floats(theta, c)?,
        residual,
        iterations,
        multistart_agreement: agreement,
    })
}

/// Single-start solve from the radial direction; for grid sweeps where the
/// uniqueness cross-check would dominate the runtime.
pub fn solve_single(x: &[f64]) -> Result<SolveResult> {
    validate_target(x)?;
    let theta0 = normalize_or_none(x).expect("nonzero by validation");
    let (theta, c, residual, iterations) = gauss_newton(x, theta0)?;
    Ok(SolveResult {
        halfspace: Halfspace::from_floats(theta, c)?,
        residual,
        iterations,
        multistart_agreement: true,
    })
}

fn validate_target(x: &[f64]) -> Result<()> {
    if x.is_empty() || x.len() > crate::cube_slice::EXACT_SLICE_CAP {
        return Err(Error::OutOfDomain {
            what: "dimension",
            value: x.len().to_string(),
            domain: "1..=12",
        });
    }
    if x.iter().any(|xi| xi.abs() >= 1.0 || xi.is_nan()) {
        return Err(Error::TargetOutOfRange(format!(
            "target must lie in the open cube, got {x:?}"
        )));
    }
    if x.iter().all(|&xi| xi == 0.0) {
        return Err(Error::TargetOutOfRange(
            "target 0 is the barycenter of the whole cube, not of a proper slice".to_string(),
        ));
    }
    Ok(())
}

fn normalize_or_none(v: &[f64]) -> Option<Vec<f64>> {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    (norm > 1e-12).then(|| v.iter().map(|a| a / norm).collect())
}

/// Exact barycenter of the slice the dyadic (θ, c) denotes, as doubles.
fn barycenter_of(theta: &[f64], c: f64) -> Result<Vec<f64>> {
    let direction = theta
        .iter()
        .map(|&d| from_f64(d))
        .collect::<Result<Vec<Rational>>>()?;
    let h = Halfspace::Exact {
        direction,
        offset: from_f64(c)?,
    };
    let SliceStats { barycenter, .. } = slice_stats(&h)?;
    Ok(barycenter.iter().map(to_f64).collect())
}

/// Solve ⟨θ, b(θ,c)⟩ = g for c by bisection and return the barycenter
/// there. The projection is 0 at c = -Σ|θ| (whole cube) and approaches
/// Σ|θ| as the slice shrinks to a corner, so g in (0, Σ|θ|) brackets.
fn solve_offset(theta: &[f64], g: f64) -> Result<(f64, Vec<f64>)> {
    let sigma: f64 = theta.iter().map(|t| t.abs()).sum();
    if !(g > 0.0 && g < sigma) {
        return Err(Error::TargetOutOfRange(format!(
            "projected target {g} outside (0, {sigma})"
        )));
    }
    let proj = |c: f64| -> Result<f64> {
        match barycenter_of(theta, c) {
            Ok(b) => Ok(theta.iter().zip(&b).map(|(t, bi)| t * bi).sum()),
            // Past the exact corner the slice is empty; report saturation
            // so bisection pulls back in.
            Err(Error::EmptySlice) => Ok(sigma),
            Err(e) => Err(e),
        }
    };
    let (mut lo, mut hi) = (-sigma, sigma);
    while hi - lo > C_TOL {
        let mid = 0.5 * (lo + hi);
        if proj(mid)? < g {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let b = barycenter_of(theta, c)?;
    Ok((c, b))
}

fn residual_norm(b: &[f64], x: &[f64]) -> f64 {
    b.iter()
        .zip(x)
        .map(|(bi, xi)| (bi - xi) * (bi - xi))
        .sum::<f64>()
        .sqrt()
}

/// Orthonormal basis of the tangent space at unit θ, by Gram-Schmidt over
/// the coordinate directions least aligned with θ.
fn tangent_basis(theta: &[f64]) -> Vec<Vec<f64>> {
    let n = theta.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| theta[a].abs().partial_cmp(&theta[b].abs()).unwrap());
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for &j in order.iter().take(n - 1) {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        let along: f64 = v.iter().zip(theta).map(|(a, b)| a * b).sum();
        for (vi, ti) in v.iter_mut().zip(theta) {
            *vi -= along * ti;
        }
        for prev in &basis {
            let along: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
            for (vi, pi) in v.iter_mut().zip(prev) {
                *vi -= along * pi;
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        basis.push(v);
    }
    basis
}

/// Solve the (n-1)-dimensional normal equations (JᵀJ)δ = -Jᵀr by Gaussian
/// elimination with partial pivoting.
fn normal_step(jac: &[Vec<f64>], r: &[f64]) -> Option<Vec<f64>> {
    let k = jac.len();
    let mut a = vec![vec![0.0f64; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = jac[i].iter().zip(&jac[j]).map(|(p, q)| p * q).sum();
        }
        a[i][k] = -jac[i].iter().zip(r).map(|(p, q)| p * q).sum::<f64>();
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            let (pivot_rows, rest) = a.split_at_mut(row);
            for (rj, pj) in rest[0].iter_mut().zip(&pivot_rows[col]).skip(col) {
                *rj -= f * pj;
            }
        }
    }
    let mut delta = vec![0.0f64; k];
    for col in (0..k).rev() {
        let mut acc = a[col][k];
        for j in col + 1..k {
            acc -= a[col][j] * delta[j];
        }
        delta[col] = acc / a[col][col];
    }
    Some(delta)
}

/// One damped Gauss-Newton run from a unit start direction. Returns
/// (θ, c, residual, iterations) on convergence.
fn gauss_newton(x: &[f64], mut theta: Vec<f64>) -> Result<(Vec<f64>, f64, f64, u32)> {
    let n = x.len();
    let eval = |theta: &[f64]| -> Result<(f64, Vec<f64>)> {
        let g: f64 = theta.iter().zip(x).map(|(t, xi)| t * xi).sum();
        solve_offset(theta, g)
    };

    // A start whose projection ⟨θ₀,x⟩ falls outside (0, Σ|θ₀|) cannot
    // bracket the inner solve; report it as a failed start so multistart
    // moves on. Radial starts are always feasible inside the open cube.
    let (mut c, mut b) = match eval(&theta) {
        Ok(v) => v,
        Err(Error::TargetOutOfRange(_)) => {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: f64::INFINITY,
            })
        }
        Err(e) => return Err(e),
    };
    let mut res = residual_norm(&b, x);
    for iter in 0..MAX_OUTER {
        if res < RESIDUAL_TOL {
            return Ok((theta, c, res, iter));
        }
        if n == 1 {
            // The scalar case has no direction freedom; the inner solve
            // either met the tolerance already or never will.
            break;
        }
        let basis = tangent_basis(&theta);
        let r: Vec<f64> = b.iter().zip(x).map(|(bi, xi)| bi - xi).collect();
        let mut jac = Vec::with_capacity(n - 1);
        let mut linearized = true;
        for v in &basis {
            let bumped: Vec<f64> = theta
                .iter()
                .zip(v)
                .map(|(t, vi)| t + FD_STEP * vi)
                .collect();
            let bumped = normalize_or_none(&bumped).expect("near-unit vector");
            match eval(&bumped) {
                Ok((_, bb)) => jac.push(
                    bb.iter()
                        .zip(&b)
                        .map(|(p, q)| (p - q) / FD_STEP)
                        .collect::<Vec<f64>>(),
                ),
                // The bump left the feasible cone; no Jacobian here.
                Err(Error::TargetOutOfRange(_)) => {
                    linearized = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !linearized {
            break;
        }
        let Some(mut delta) = normal_step(&jac, &r) else {
            break;
        };

        // Halve the step until the residual improves.
        let mut improved = false;
        for _ in 0..25 {
            let mut cand = theta.clone();
            for (v, d) in basis.iter().zip(&delta) {
                for (ci, vi) in cand.iter_mut().zip(v) {
                    *ci += d * vi;
                }
            }
            let Some(cand) = normalize_or_none(&cand) else {
                break;
            };
            match eval(&cand) {
                Ok((cc, bb)) => {
                    let rr = residual_norm(&bb, x);
                    if rr < res {
                        theta = cand;
                        c = cc;
                        b = bb;
                        res = rr;
                        improved = true;
                        break;
                    }
                }
                Err(Error::TargetOutOfRange(_)) => {}
                Err(e) => return Err(e),
            }
            for d in delta.iter_mut() {
                *d *= 0.5;
            }
        }
        if !improved {
            break;
        }
    }
    if res < RESIDUAL_TOL {
        return Ok((theta, c, res, MAX_OUTER));
    }
    Err(Error::NoConvergence {
        iterations: MAX_OUTER,
        residual: res,
    })
}

/// Offset t of the diagonal slice {mean(u) >= t} with barycenter m·1_n,
/// for 0 < m < 1; for negative m the complementary orientation
/// {mean(u) <= t} is the matching slice and the returned t is the
/// reflection -t of the positive solve. Exact where the piece equation is
/// rational (breakpoints, the last piece, and low-degree pieces); elsewhere
/// a dyadic t with |m_X(t) - m| < 1e-14.
pub fn solve_diagonal(n: u32, m: &Rational) -> Result<Rational> {
    if *m <= rat_int(-1) || *m >= rat_int(1) || m.is_zero() {
        return Err(Error::TargetOutOfRange(format!(
            "diagonal target must lie in (-1, 1) excluding 0, got {m}"
        )));
    }
    if m < &Rational::zero() {
        return Ok(-solve_diagonal_positive(n, &-m.clone())?);
    }
    solve_diagonal_positive(n, m)
}

fn solve_diagonal_positive(n: u32, m: &Rational) -> Result<Rational> {
    let d = IrwinHallTail::build(n)?;

    // Last piece first: m_X(t) = (nt+1)/(n+1) there, so the inverse is
    // closed-form. It applies when m >= m_X at the last breakpoint.
    let last_lo = rat_int(1) - rat(2, i64::from(n));
    if *m >= d.truncated_mean(&last_lo)? {
        let t = (rat_int(i64::from(n) + 1) * m - rat_int(1)) / rat_int(i64::from(n));
        debug_assert_eq!(d.truncated_mean(&t)?, *m);
        return Ok(t);
    }

    // Exact hit at a breakpoint, or locate the enclosing piece.
    let breakpoints = d.tail_poly().breakpoints().to_vec();
    let mut piece = None;
    for k in 0..breakpoints.len() - 1 {
        let at_k = d.truncated_mean(&breakpoints[k])?;
        if at_k == *m {
            return Ok(breakpoints[k].clone());
        }
        let at_next = d.truncated_mean(&breakpoints[k + 1])?;
        if at_k < *m && *m < at_next {
            piece = Some(k);
            break;
        }
    }
    let k = piece.expect("m_X is continuous and increasing onto [0, 1)");

    // Bisect within the piece on exact rationals, then round the midpoint
    // to a double once the bracket is far below the output tolerance.
    let (mut lo, mut hi) = (breakpoints[k].clone(), breakpoints[k + 1].clone());
    let width_floor = rat(1, 1i64 << 56);
    while &hi - &lo > width_floor {
        let mid = (&lo + &hi) / rat_int(2);
        if d.truncated_mean(&mid)? < *m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = from_f64(to_f64(&((&lo + &hi) / rat_int(2))))?;
    let achieved = d.truncated_mean(&t)?;
    let err = to_f64(&(achieved - m)).abs();
    if err >= 1e-14 {
        return Err(Error::NoConvergence {
            iterations: 56,
            residual: err,
        });
    }
    Ok(t)
}
