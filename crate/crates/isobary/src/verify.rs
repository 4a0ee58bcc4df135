//! Grid scans that turn the library's inequalities and identities into
//! reports. Assertive scans cover proven facts and fail loudly on any
//! violation; conjectured behavior runs report-only so the suite records
//! evidence without gating on open questions.
//!
//! Every scan is deterministic: work is parallel over n, results are
//! merged back in grid order, and all evaluation inputs are immutable.

use crate::bounds::{
    chernoff_bound, combined_bound, concave_mean_bound, conjectured_volume_bound,
    e_product_volume_bound, half_mean_bound, mgf_bound, region_bound, sd_mean_bound, RegionParams,
};
use crate::cube_slice::slice_stats;
use crate::error::{Error, Result};
use crate::exactnum::{rat, rat_int, to_f64, Rational};
use crate::irwin_hall::{exact_corner_tail, IrwinHallTail};
use crate::mc::estimate_slice;
use crate::report::{GridSpec, Row, ScanBuilder, ScanReport, Violation};
use crate::solver::solve_single;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::ops::RangeInclusive;

/// Floating-point comparisons pass with margins down to this floor;
/// exact rational comparisons never use it.
pub const FLOAT_MARGIN_FLOOR: f64 = -1e-12;

fn precondition(condition: String) -> Error {
    Error::Precondition { condition }
}

/// Uniform rational grid over an open interval of t values.
#[derive(Clone, Debug)]
pub struct Grid {
    pub start: Rational,
    pub end: Rational,
    pub step: Rational,
}

impl Grid {
    /// Step 1/256 inset half a step from each endpoint: 512 points with
    /// odd numerators over 512, so no point collides with a spline
    /// breakpoint for any n below the exact cap.
    pub fn default_grid() -> Grid {
        Grid::with_step(rat(1, 256)).expect("default step is valid")
    }

    /// Symmetric grid over (-1, 1) inset half a step from the endpoints.
    pub fn with_step(step: Rational) -> Result<Grid> {
        if step <= Rational::zero() || step >= rat_int(1) {
            return Err(precondition(format!(
                "grid step must lie in (0, 1), got {step}"
            )));
        }
        let inset = &step / rat_int(2);
        Ok(Grid {
            start: rat_int(-1) + &inset,
            end: rat_int(1) - &inset,
            step,
        })
    }

    pub fn points(&self) -> Result<Vec<Rational>> {
        if self.step <= Rational::zero() {
            return Err(precondition("grid step must be positive".into()));
        }
        if self.start <= rat_int(-1) || self.end >= rat_int(1) || self.start > self.end {
            return Err(precondition(format!(
                "grid [{}, {}] must lie inside (-1, 1)",
                self.start, self.end
            )));
        }
        let mut pts = Vec::new();
        let mut t = self.start.clone();
        while t <= self.end {
            pts.push(t.clone());
            t += &self.step;
        }
        Ok(pts)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            start: self.start.to_string(),
            end: self.end.to_string(),
            step: self.step.to_string(),
        }
    }
}

fn range_bounds(r: &RangeInclusive<u32>) -> (u32, u32) {
    (*r.start(), *r.end())
}

/// Diagonal-slice gap scan: (1/n)·ln p - (1/2)·ln(1-m²) must be strictly
/// negative at every interior point. The worst point is where the gap is
/// closest to zero.
pub fn scan_diag(n_range: RangeInclusive<u32>, grid: &Grid) -> Result<ScanReport> {
    let pts = grid.points()?;
    let (lo, hi) = range_bounds(&n_range);
    let per_n: Vec<(u32, Vec<Row>)> = n_range
        .collect::<Vec<u32>>()
        .par_iter()
        .map(|&n| -> Result<(u32, Vec<Row>)> {
            let d = IrwinHallTail::build(n)?;
            let rows = pts
                .iter()
                .map(|t| -> Result<Row> {
                    let gap = d.diag_gap(t)?;
                    Ok(Row {
                        n,
                        t: t.to_string(),
                        value: gap,
                        bound: 0.0,
                        margin: -gap,
                        pass: gap < 0.0,
                    })
                })
                .collect::<Result<Vec<Row>>>()?;
            Ok((n, rows))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut b = ScanBuilder::new("diag", lo, hi, grid.spec(), true);
    for (_, rows) in per_n {
        for row in rows {
            b.add_row(row);
        }
    }
    b.note(
        "margin is |gap|; the minimum sits at the left end of the grid where the gap vanishes \
         toward t = -1",
    );
    b.note(
        "a pass for every n in range extends to products of slices across those dimensions by \
         tensorization, at this grid resolution",
    );
    Ok(b.finish())
}

/// Scan of factor·n·D(t) < 1 where D = (m-t)·m/(1-m²). Factor 1 is the
/// proven inequality and is assertive; factor 2 is conjectured and runs
/// report-only.
pub fn scan_derived(n_range: RangeInclusive<u32>, grid: &Grid, factor: u32) -> Result<ScanReport> {
    if factor != 1 && factor != 2 {
        return Err(precondition(format!(
            "derived-scan factor must be 1 or 2, got {factor}"
        )));
    }
    let pts = grid.points()?;
    let (lo, hi) = range_bounds(&n_range);
    let one = rat_int(1);
    let per_n: Vec<(u32, Vec<Row>)> = n_range
        .collect::<Vec<u32>>()
        .par_iter()
        .map(|&n| -> Result<(u32, Vec<Row>)> {
            let d = IrwinHallTail::build(n)?;
            let scale = rat_int(i64::from(factor) * i64::from(n));
            let rows = pts
                .iter()
                .map(|t| -> Result<Row> {
                    let value = &scale * d.derived_quantity(t)?;
                    let vf = to_f64(&value);
                    Ok(Row {
                        n,
                        t: t.to_string(),
                        value: vf,
                        bound: 1.0,
                        margin: 1.0 - vf,
                        pass: value < one,
                    })
                })
                .collect::<Result<Vec<Row>>>()?;
            Ok((n, rows))
        })
        .collect::<Result<Vec<_>>>()?;

    let name = if factor == 1 { "derived" } else { "conjecture" };
    let mut b = ScanBuilder::new(name, lo, hi, grid.spec(), factor == 1);
    for (n, rows) in per_n {
        let sup = rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
        b.note(format!("n={n}: sup of {factor}*n*D on grid = {sup}"));
        for row in rows {
            b.add_row(row);
        }
    }
    if factor == 2 {
        b.note("factor-2 scan is report-only: the strict inequality is conjectured, not proven");
    }
    Ok(b.finish())
}

/// Five-region bound scan: classify each grid point by the (α, β, γ)
/// partition of (-1, 1), check exact D(t) against that region's closed-form
/// bound, and check D(t) < 3/(2n-15) globally as an exact side condition.
pub fn scan_regions(
    alpha: f64,
    beta: f64,
    gamma: f64,
    n_range: RangeInclusive<u32>,
    grid: &Grid,
) -> Result<ScanReport> {
    let pts = grid.points()?;
    let (lo, hi) = range_bounds(&n_range);
    if lo < 12 {
        return Err(precondition(format!(
            "region scan needs n >= 12 for the combined bound, got {lo}"
        )));
    }
    type PerN = (u32, Vec<Row>, Vec<Violation>, [u64; 5], f64);
    let per_n: Vec<PerN> = n_range
        .collect::<Vec<u32>>()
        .par_iter()
        .map(|&n| -> Result<PerN> {
            let params = RegionParams::new(alpha, beta, gamma, n)?;
            let d = IrwinHallTail::build(n)?;
            let combined = combined_bound(n)?;
            let combined_f = to_f64(&combined);
            let mut rows = Vec::with_capacity(pts.len());
            let mut extra = Vec::new();
            let mut counts = [0u64; 5];
            let mut combined_min = f64::INFINITY;
            for t in &pts {
                let region = params.region_of(t)?;
                counts[usize::from(region) - 1] += 1;
                let h = region_bound(region, &params)?;
                let dq = d.derived_quantity(t)?;
                let df = to_f64(&dq);
                rows.push(Row {
                    n,
                    t: t.to_string(),
                    value: df,
                    bound: h,
                    margin: h - df,
                    pass: df < h,
                });
                combined_min = combined_min.min(combined_f - df);
                if dq >= combined {
                    extra.push(Violation {
                        n,
                        t: format!("{t} (combined)"),
                        value: df,
                        bound: combined_f,
                        margin: combined_f - df,
                    });
                }
            }
            Ok((n, rows, extra, counts, combined_min))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut b = ScanBuilder::new("regions", lo, hi, grid.spec(), true);
    b.note(format!("region parameters alpha={alpha}, beta={beta}, gamma={gamma}"));
    let mut empty_regions: BTreeMap<u8, Vec<u32>> = BTreeMap::new();
    let mut combined_worst = (f64::INFINITY, 0u32);
    for (n, rows, extra, counts, combined_min) in per_n {
        for row in rows {
            b.add_row(row);
        }
        for v in extra {
            b.add_violation(v);
        }
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                empty_regions.entry(i as u8 + 1).or_default().push(n);
            }
        }
        if combined_min < combined_worst.0 {
            combined_worst = (combined_min, n);
        }
    }
    for (region, ns) in empty_regions {
        b.note(format!(
            "region {region} contains no grid points for n in {:?} (its boundaries coincide or \
             cross at these n)",
            ns
        ));
    }
    b.note(format!(
        "combined bound 3/(2n-15): min margin {} at n={}",
        combined_worst.0, combined_worst.1
    ));
    Ok(b.finish())
}

/// The four asymptotic inequalities behind the dimension threshold, with
/// fixed parameter choices; returns the smallest n0 such that all four
/// hold for every n from n0 up to the horizon.
pub fn find_n0(horizon: u32) -> Result<(u32, ScanReport)> {
    const LABELS: [&str; 4] = [
        "h1(2-1/n,n) < 1/n",
        "h3(sqrt3,n) < 1/n",
        "3/(1+64/n) > (4+2sqrt3)/3",
        "h5(2/3,n) < 1/n",
    ];
    if horizon < 2 {
        return Err(precondition("horizon must be at least 2".into()));
    }
    let margins = |n: u32| -> [Option<f64>; 4] {
        let nf = f64::from(n);
        let m1 = RegionParams::new(2.0 - 1.0 / nf, 1.0, 0.5, n)
            .and_then(|p| region_bound(1, &p))
            .ok()
            .map(|h| 1.0 / nf - h);
        let m2 = RegionParams::new(2.0, 3f64.sqrt(), 0.5, n)
            .and_then(|p| region_bound(3, &p))
            .ok()
            .map(|h| 1.0 / nf - h);
        let m3 = Some(3.0 / (1.0 + 64.0 / nf) - (4.0 + 2.0 * 3f64.sqrt()) / 3.0);
        let m4 = RegionParams::new(2.0, 1.0, 2.0 / 3.0, n)
            .and_then(|p| region_bound(5, &p))
            .ok()
            .map(|h| 1.0 / nf - h);
        [m1, m2, m3, m4]
    };

    let grid = GridSpec {
        start: "1".into(),
        end: horizon.to_string(),
        step: "1".into(),
    };
    let mut b = ScanBuilder::new("n0", 1, horizon, grid, true);
    let mut last_fail = [1u32; 4];
    let mut prev = [false; 4];
    for n in 1..=horizon {
        let ms = margins(n);
        for (i, m) in ms.iter().enumerate() {
            let holds = m.is_some_and(|x| x > 0.0);
            if !holds {
                last_fail[i] = n;
            }
            // Rows only at status changes keep the point list proportional
            // to the number of crossings, not the horizon.
            if n > 1 && holds != prev[i] {
                b.add_row(Row {
                    n,
                    t: LABELS[i].to_string(),
                    value: m.unwrap_or(f64::NEG_INFINITY),
                    bound: 0.0,
                    margin: m.unwrap_or(f64::NEG_INFINITY),
                    pass: holds,
                });
            }
            prev[i] = holds;
        }
    }
    let n0 = last_fail.iter().copied().max().unwrap() + 1;
    for (i, lf) in last_fail.iter().enumerate() {
        if *lf == horizon {
            b.add_violation(Violation {
                n: horizon,
                t: LABELS[i].to_string(),
                value: f64::NEG_INFINITY,
                bound: 0.0,
                margin: f64::NEG_INFINITY,
            });
            b.note(format!("{} still fails at the horizon {horizon}", LABELS[i]));
        } else {
            b.note(format!("{} holds for all n >= {}", LABELS[i], lf + 1));
        }
    }
    if n0 <= horizon {
        b.note(format!(
            "all four inequalities hold jointly for every n in {n0}..={horizon}"
        ));
    }
    b.note("rows are restricted to n where an inequality changes status");
    Ok((n0, b.finish()))
}

/// Exact identities and envelope inequalities on one grid pass.
///
/// Exact rational checks: tail symmetry p(t) + p(-t) = 1; moment symmetry
/// m(-t)p(-t) = m(t)p(t); the derivative identity m'·p = density·(m - t);
/// the corner tail formula as an upper envelope everywhere with equality
/// on the last piece; m(t) <= (1+t)/2 with equality only at n = 1; m
/// strictly increasing along the grid. Float checks with the margin floor:
/// the Gaussian-style tail bound, the transform bound sandwiched between
/// the tail and the Gaussian bound, the mean-plus-deviation bound, the
/// concave root mean bound, and concavity of p^{1/n} via second
/// differences.
pub fn scan_identities(n_range: RangeInclusive<u32>, grid: &Grid) -> Result<ScanReport> {
    let pts = grid.points()?;
    let (lo, hi) = range_bounds(&n_range);
    type SubMin = BTreeMap<&'static str, (f64, u32, String)>;
    type PerN = (u32, Vec<Row>, Vec<Violation>, SubMin);
    let per_n: Vec<PerN> = n_range
        .collect::<Vec<u32>>()
        .par_iter()
        .map(|&n| -> Result<PerN> {
            let d = IrwinHallTail::build(n)?;
            let last_piece = rat_int(1) - rat(2, i64::from(n));
            let mut rows = Vec::with_capacity(pts.len());
            let mut extra = Vec::new();
            let mut submin: SubMin = BTreeMap::new();
            let mut prev_mean: Option<Rational> = None;
            let mut roots = Vec::with_capacity(pts.len());
            for t in &pts {
                let tf = to_f64(t);
                let p = d.tail(t)?;
                let p_neg = d.tail(&-t.clone())?;
                let m = d.truncated_mean(t)?;
                let m_neg = d.truncated_mean(&-t.clone())?;
                let m_prime = d.truncated_mean_derivative(t)?;
                let dens = d.density(t)?;
                let corner = exact_corner_tail(n, t);
                let pf = to_f64(&p);
                let mf = to_f64(&m);

                let mut exact_ok = true;
                let mut fail = |name: &str, extra: &mut Vec<Violation>, ok: bool| {
                    if !ok {
                        exact_ok = false;
                        extra.push(Violation {
                            n,
                            t: format!("{t} ({name})"),
                            value: f64::NAN,
                            bound: f64::NAN,
                            margin: -1.0,
                        });
                    }
                };
                fail("tail symmetry", &mut extra, &p + &p_neg == rat_int(1));
                fail(
                    "moment symmetry",
                    &mut extra,
                    &m_neg * &p_neg == &m * &p,
                );
                fail(
                    "derivative identity",
                    &mut extra,
                    &m_prime * &p == &dens * (&m - t),
                );
                fail("corner envelope", &mut extra, p <= corner);
                if *t >= last_piece {
                    fail("corner equality", &mut extra, p == corner);
                }
                let half = half_mean_bound(t);
                if n == 1 {
                    fail("half-mean equality", &mut extra, m == half);
                } else {
                    fail("half-mean strict", &mut extra, m < half);
                }
                if let Some(pm) = &prev_mean {
                    fail("mean increasing", &mut extra, &m > pm);
                }
                prev_mean = Some(m.clone());

                // Float envelope margins; the smallest becomes the row.
                let mut candidates: Vec<(&'static str, f64, f64)> = Vec::new();
                candidates.push(("corner envelope", pf, to_f64(&corner)));
                if tf > 0.0 {
                    let ch = chernoff_bound(n, tf)?;
                    let mg = mgf_bound(n, tf)?;
                    candidates.push(("gaussian tail bound", pf, ch));
                    candidates.push(("transform tail bound", pf, mg));
                    candidates.push(("transform below gaussian", mg, ch));
                    match concave_mean_bound(&d, t) {
                        Ok(cb) => candidates.push(("concave mean bound", mf, cb)),
                        Err(Error::Precondition { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                if tf >= 0.0 {
                    candidates.push(("deviation mean bound", mf, sd_mean_bound(n, tf)?));
                }
                candidates.push(("half-mean bound", mf, to_f64(&half)));

                let mut worst: (&'static str, f64, f64, f64) =
                    ("none", 0.0, 0.0, f64::INFINITY);
                for (name, value, bound) in candidates {
                    let margin = bound - value;
                    if margin < worst.3 {
                        worst = (name, value, bound, margin);
                    }
                    let e = submin.entry(name).or_insert((f64::INFINITY, n, String::new()));
                    if margin < e.0 {
                        *e = (margin, n, t.to_string());
                    }
                }
                rows.push(Row {
                    n,
                    t: t.to_string(),
                    value: worst.1,
                    bound: worst.2,
                    margin: worst.3,
                    pass: exact_ok && worst.3 > FLOAT_MARGIN_FLOOR,
                });
                roots.push(d.root_tail(t)?);
            }
            // Concavity of p^{1/n}: interior second differences must not be
            // positive beyond float noise.
            for w in roots.windows(3).zip(pts.windows(3)) {
                let (r, ts) = w;
                let second = r[0] - 2.0 * r[1] + r[2];
                let margin = -second;
                let e = submin
                    .entry("root concavity")
                    .or_insert((f64::INFINITY, n, String::new()));
                if margin < e.0 {
                    *e = (margin, n, ts[1].to_string());
                }
                if margin <= FLOAT_MARGIN_FLOOR {
                    extra.push(Violation {
                        n,
                        t: format!("{} (root concavity)", ts[1]),
                        value: second,
                        bound: 0.0,
                        margin,
                    });
                }
            }
            Ok((n, rows, extra, submin))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut b = ScanBuilder::new("identities", lo, hi, grid.spec(), true);
    let mut merged: SubMin = BTreeMap::new();
    for (_, rows, extra, submin) in per_n {
        for row in rows {
            b.add_row(row);
        }
        for v in extra {
            b.add_violation(v);
        }
        for (name, (margin, n, t)) in submin {
            let e = merged.entry(name).or_insert((f64::INFINITY, n, t.clone()));
            if margin < e.0 {
                *e = (margin, n, t);
            }
        }
    }
    b.note(
        "rows carry the smallest float margin at each point; exact identity failures appear \
         only as violations",
    );
    for (name, (margin, n, t)) in merged {
        b.note(format!("{name}: min margin {margin} at n={n}, t={t}"));
    }
    Ok(b.finish())
}

/// Nondecreasing index tuples of length `slots` over `0..levels`.
fn multisets(levels: usize, slots: usize) -> Vec<Vec<usize>> {
    fn rec(levels: usize, slots: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == slots {
            out.push(cur.clone());
            return;
        }
        for v in start..levels {
            cur.push(v);
            rec(levels, slots, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(levels, slots, 0, &mut Vec::with_capacity(slots), &mut out);
    out
}

/// Volume-bound scan over a coarse barycenter grid: for each target x,
/// solve for the matching halfspace, compute the exact slice volume, and
/// assert vol < prod 2*sqrt(1-x_i^2) and vol < prod e*(1-|x_i|). The ratio
/// vol / prod sqrt(1-x_i^2) and its coordinate-wise monotonicity are
/// reported without assertion.
///
/// Both the volume and the bounds are invariant under coordinate
/// permutations and sign flips, so only sorted positive representatives
/// are solved; counts in the notes record the full grid coverage.
pub fn scan_hp(ns: &[u32], levels: &[f64]) -> Result<ScanReport> {
    if ns.is_empty() || levels.is_empty() {
        return Err(precondition("hp scan needs dimensions and levels".into()));
    }
    let mut levels = levels.to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if levels[0] <= 0.0 || *levels.last().unwrap() >= 1.0 {
        return Err(precondition(format!(
            "levels must lie in (0, 1), got {levels:?}"
        )));
    }
    let level_label = levels
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join("|");
    let grid = GridSpec {
        start: format!("-{}", levels.last().unwrap()),
        end: levels.last().unwrap().to_string(),
        step: format!("levels {level_label} up to sign and permutation"),
    };
    let (lo, hi) = (
        *ns.iter().min().unwrap(),
        *ns.iter().max().unwrap(),
    );
    let mut b = ScanBuilder::new("hp", lo, hi, grid, true);
    let mut mono_checked = 0u64;
    let mut mono_violations: Vec<String> = Vec::new();
    let mut e_bound_min = (f64::INFINITY, 0u32, String::new());
    for &n in ns {
        let reps = multisets(levels.len(), n as usize);
        let mut ratios: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut skipped = 0u64;
        for rep in &reps {
            let x: Vec<f64> = rep.iter().map(|&i| levels[i]).collect();
            let label = x
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join("|");
            let solved = match solve_single(&x) {
                Ok(s) => s,
                Err(Error::NoConvergence { residual, .. }) => {
                    skipped += 1;
                    b.note(format!(
                        "n={n} x={label}: solver did not converge (residual {residual:e}); \
                         point skipped"
                    ));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let stats = slice_stats(&solved.halfspace)?;
            let vol = to_f64(&stats.volume_fraction) * 2f64.powi(n as i32);
            let bound = conjectured_volume_bound(&x)?;
            let e_bound = e_product_volume_bound(&x)?;
            b.add_row(Row {
                n,
                t: label.clone(),
                value: vol,
                bound,
                margin: bound - vol,
                pass: vol < bound,
            });
            if vol >= e_bound {
                b.add_violation(Violation {
                    n,
                    t: format!("{label} (e-product bound)"),
                    value: vol,
                    bound: e_bound,
                    margin: e_bound - vol,
                });
            }
            if e_bound - vol < e_bound_min.0 {
                e_bound_min = (e_bound - vol, n, label.clone());
            }
            let root_prod: f64 = x.iter().map(|xi| (1.0 - xi * xi).sqrt()).product();
            ratios.insert(rep.clone(), vol / root_prod);
        }
        // Lowering any single |x_i| by one level should not lower the ratio.
        for (rep, ratio) in &ratios {
            for slot in 0..rep.len() {
                if rep[slot] == 0 || (slot > 0 && rep[slot - 1] == rep[slot]) {
                    continue;
                }
                let mut lowered = rep.clone();
                lowered[slot] -= 1;
                lowered.sort_unstable();
                if let Some(lr) = ratios.get(&lowered) {
                    mono_checked += 1;
                    if *lr < ratio - 1e-9 {
                        let show = |r: &[usize]| {
                            r.iter()
                                .map(|&i| levels[i].to_string())
                                .collect::<Vec<_>>()
                                .join("|")
                        };
                        mono_violations.push(format!(
                            "n={n}: ratio({}) = {} < ratio({}) = {}",
                            show(&lowered),
                            lr,
                            show(rep),
                            ratio
                        ));
                    }
                }
            }
        }
        let full = (2 * levels.len() as u64).pow(n);
        b.note(format!(
            "n={n}: {} representatives cover the {} sign/permutation-equivalent grid points{}",
            reps.len() - skipped as usize,
            full,
            if skipped > 0 {
                format!(" ({skipped} skipped)")
            } else {
                String::new()
            }
        ));
    }
    b.note(format!(
        "e-product bound: min margin {} at n={}, x={}",
        e_bound_min.0, e_bound_min.1, e_bound_min.2
    ));
    if mono_violations.is_empty() {
        b.note(format!(
            "ratio monotonicity (report-only): no violations across {mono_checked} comparable \
             pairs"
        ));
    } else {
        b.note(format!(
            "ratio monotonicity (report-only): {} violations across {mono_checked} pairs",
            mono_violations.len()
        ));
        for v in mono_violations.into_iter().take(20) {
            b.note(v);
        }
    }
    Ok(b.finish())
}

/// Behavior of the tail as the dimension grows. The peakedness direction
/// is asserted: for t > 0 the tail strictly decreases with n, for t < 0 it
/// strictly increases, at t = 0 it stays 1/2. The n-th root of the tail
/// and the truncated mean are only reported, with direction counts.
pub fn scan_monotone(n_max: u32, grid: &Grid) -> Result<ScanReport> {
    if n_max < 2 {
        return Err(precondition("monotone scan needs n_max >= 2".into()));
    }
    let pts = grid.points()?;
    let tails = (1..=n_max)
        .map(IrwinHallTail::build)
        .collect::<Result<Vec<_>>>()?;
    let mut b = ScanBuilder::new("monotone", 1, n_max, grid.spec(), true);
    let mut root_bad = 0u64;
    let mut root_worst = (f64::INFINITY, 0u32, String::new());
    let mut mean_up = 0u64;
    let mut mean_down = 0u64;
    let mut mean_down_example: Option<String> = None;
    let mut comparisons = 0u64;
    for t in &pts {
        for n in 1..n_max {
            let (a, bb) = (&tails[(n - 1) as usize], &tails[n as usize]);
            let p1 = a.tail(t)?;
            let p2 = bb.tail(t)?;
            let (pass, margin) = match t.cmp(&Rational::zero()) {
                std::cmp::Ordering::Greater => (p2 < p1, to_f64(&(&p1 - &p2))),
                std::cmp::Ordering::Less => (p2 > p1, to_f64(&(&p2 - &p1))),
                std::cmp::Ordering::Equal => (p1 == p2, 0.0),
            };
            b.add_row(Row {
                n,
                t: t.to_string(),
                value: to_f64(&p2),
                bound: to_f64(&p1),
                margin,
                pass,
            });
            comparisons += 1;

            let r1 = a.root_tail(t)?;
            let r2 = bb.root_tail(t)?;
            if r2 - r1 < FLOAT_MARGIN_FLOOR {
                root_bad += 1;
            }
            if r2 - r1 < root_worst.0 {
                root_worst = (r2 - r1, n, t.to_string());
            }
            let m1 = a.truncated_mean(t)?;
            let m2 = bb.truncated_mean(t)?;
            if m2 >= m1 {
                mean_up += 1;
            } else {
                mean_down += 1;
                if mean_down_example.is_none() {
                    mean_down_example = Some(format!("t={t}: m drops from {m1} to {m2} at n={n}->{}", n + 1));
                }
            }
        }
    }
    b.note(format!(
        "peakedness asserted over {comparisons} adjacent-n comparisons"
    ));
    b.note(format!(
        "p^(1/n) nondecreasing in n (report-only): {root_bad} violations; smallest increment {} \
         at n={}, t={}",
        root_worst.0, root_worst.1, root_worst.2
    ));
    b.note(format!(
        "truncated mean vs n (report-only): rose in {mean_up} comparisons, fell in {mean_down}{}",
        mean_down_example
            .map(|e| format!("; first fall: {e}"))
            .unwrap_or_default()
    ));
    Ok(b.finish())
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(seed: u64, k: u64) -> u64 {
    let mut z = seed.wrapping_add(k.wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

fn unit(seed: u64, k: u64) -> f64 {
    (mix(seed, k) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Randomized exact-vs-sampled comparisons. Each case draws a random unit
/// direction in 2..=6 dimensions and an offset away from the degenerate
/// ends, computes the exact volume and barycenter, and estimates both by
/// sampling. A case passes when every statistic sits within 3 standard
/// errors; up to `allowed` cases may exceed that (3-sigma events are
/// expected at this count), and the verdict fails only beyond the budget.
pub fn scan_mc_check(count: u32, samples: u64, seed: u64, allowed: u32) -> Result<ScanReport> {
    if count == 0 {
        return Err(precondition("mc-check needs at least one case".into()));
    }
    let grid = GridSpec {
        start: "0".into(),
        end: (count - 1).to_string(),
        step: "1".into(),
    };
    let mut b = ScanBuilder::new("mc-check", 2, 6, grid, true);
    let mut rows = Vec::with_capacity(count as usize);
    for i in 0..u64::from(count) {
        let n = 2 + (i % 5) as usize;
        let base = i * 128;
        let mut dir: Vec<f64>;
        let mut attempt = 0;
        loop {
            dir = (0..n)
                .map(|j| 2.0 * unit(seed, base + attempt * 8 + j as u64) - 1.0)
                .collect();
            let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            if norm > 0.3 {
                for d in dir.iter_mut() {
                    *d /= norm;
                }
                break;
            }
            attempt += 1;
        }
        let sigma: f64 = dir.iter().map(|d| d.abs()).sum();
        let c = sigma * (1.1 * unit(seed, base + 64) - 0.5);
        let h = crate::cube_slice::Halfspace::from_floats(dir, c)?;
        let exact = slice_stats(&h)?;
        let est = estimate_slice(&h, samples, mix(seed, base + 96))?;

        let p = to_f64(&exact.volume_fraction);
        let se_true = (p * (1.0 - p) / samples as f64).sqrt();
        let mut worst = (est.volume.mean - p).abs() / se_true;
        if let Some(bary) = &est.barycenter {
            for (j, mean) in bary.mean.iter().enumerate() {
                let se = bary.std_error[j];
                let err = (mean - to_f64(&exact.barycenter[j])).abs();
                let sig = if se > 0.0 {
                    err / se
                } else if err == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(sig);
            }
        }
        rows.push(Row {
            n: n as u32,
            t: i.to_string(),
            value: worst,
            bound: 3.0,
            margin: 3.0 - worst,
            pass: worst <= 3.0,
        });
    }
    let outliers: Vec<Row> = rows.iter().filter(|r| !r.pass).cloned().collect();
    for mut row in rows {
        // Individual 3-sigma excursions inside the budget are expected;
        // they stay visible per row but only break the verdict in bulk.
        let hard_fail = !row.pass && outliers.len() as u32 > allowed;
        if !hard_fail {
            row.pass = true;
        }
        b.add_row(row);
    }
    b.note(format!(
        "{} of {count} cases beyond 3 sigma ({allowed} allowed)",
        outliers.len()
    ));
    for r in &outliers {
        b.note(format!(
            "case {} (n={}): worst statistic at {} sigma",
            r.t, r.n, r.value
        ));
    }
    Ok(b.finish())
}
