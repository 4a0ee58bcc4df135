//! Randomized invariants: parser round trips, symmetry equivariance of
//! slice statistics, complement balance, tail reflection identities, and
//! the diagonal inverse. Everything here is checked in exact arithmetic
//! except the inverse, whose contract is a float tolerance.

use isobary::cube_slice::{slice_stats, Halfspace};
use isobary::exactnum::{parse_rational, rat, rat_int, to_f64, Rational};
use isobary::irwin_hall::{exact_corner_tail, IrwinHallTail};
use isobary::solver::solve_diagonal;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_nonzero() -> impl Strategy<Value = Rational> {
    (1i64..=3, 1i64..=3, any::<bool>())
        .prop_map(|(a, b, neg)| if neg { rat(-a, b) } else { rat(a, b) })
}

/// Weights, an offset numerator (over 16, as a fraction of the weight mass),
/// a permutation, and a sign mask, all with a shared dimension.
fn slice_case() -> impl Strategy<Value = (Vec<Rational>, i64, Vec<usize>, Vec<bool>)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            proptest::collection::vec(small_nonzero(), n),
            -15i64..=15,
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            proptest::collection::vec(any::<bool>(), n),
        )
    })
}

fn open_unit() -> impl Strategy<Value = Rational> {
    (2i64..=24).prop_flat_map(|d| (-(d - 1)..=(d - 1)).prop_map(move |a| rat(a, d)))
}

fn decimal_string(m: i64, e: u32) -> String {
    let digits = m.unsigned_abs().to_string();
    let padded = format!("{digits:0>width$}", width = e as usize + 1);
    let split = padded.len() - e as usize;
    let mut s = String::new();
    if m < 0 {
        s.push('-');
    }
    s.push_str(&padded[..split]);
    if e > 0 {
        s.push('.');
        s.push_str(&padded[split..]);
    }
    s
}

proptest! {
    #[test]
    fn printed_rationals_parse_back(a in any::<i64>(), b in any::<i64>().prop_filter("nonzero", |b| *b != 0)) {
        let r = rat(a, b);
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn exact_decimals_parse_to_power_of_ten_fractions(m in -1_000_000_000_000i64..=1_000_000_000_000, e in 0u32..=9) {
        let parsed = parse_rational(&decimal_string(m, e)).unwrap();
        prop_assert_eq!(parsed, rat(m, 10i64.pow(e)));
    }

    #[test]
    fn tail_reflection_and_corner_envelope(n in 1u32..=8, t in open_unit()) {
        let d = IrwinHallTail::build(n).unwrap();
        let p = d.tail(&t).unwrap();
        let p_reflected = d.tail(&(-t.clone())).unwrap();
        prop_assert_eq!(&p + &p_reflected, rat_int(1));

        let moment = d.truncated_mean(&t).unwrap() * &p;
        let reflected_moment = d.truncated_mean(&(-t.clone())).unwrap() * &p_reflected;
        prop_assert_eq!(&moment, &reflected_moment);

        let corner = exact_corner_tail(n, &t);
        prop_assert!(p <= corner);
        if t >= rat(n as i64 - 2, n as i64) {
            prop_assert_eq!(p, corner);
        }
    }

    #[test]
    fn diagonal_inverse_round_trips(n in 1u32..=5, a in 1i64..=63) {
        let m = rat(a, 64);
        let t = solve_diagonal(n, &m).unwrap();
        let d = IrwinHallTail::build(n).unwrap();
        let err = (d.truncated_mean(&t).unwrap() - &m).abs();
        prop_assert!(to_f64(&err) < 1e-14, "inverse error {} at n={}, m={}", to_f64(&err), n, m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slice_stats_respect_cube_symmetries((w, k, perm, flips) in slice_case()) {
        let sigma: Rational = w.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| a + b);
        let c = rat(k, 16) * &sigma;
        let n = w.len();
        let base = slice_stats(&Halfspace::exact(w.clone(), c.clone()).unwrap()).unwrap();

        // Permuting the weights permutes the barycenter and keeps the volume.
        let wp: Vec<Rational> = perm.iter().map(|&i| w[i].clone()).collect();
        let permuted = slice_stats(&Halfspace::exact(wp, c.clone()).unwrap()).unwrap();
        prop_assert_eq!(&permuted.volume_fraction, &base.volume_fraction);
        for (j, &i) in perm.iter().enumerate() {
            prop_assert_eq!(&permuted.barycenter[j], &base.barycenter[i]);
        }

        // Flipping weight signs reflects those barycenter coordinates.
        let wf: Vec<Rational> = w
            .iter()
            .zip(&flips)
            .map(|(x, &f)| if f { -x.clone() } else { x.clone() })
            .collect();
        let flipped = slice_stats(&Halfspace::exact(wf, c.clone()).unwrap()).unwrap();
        prop_assert_eq!(&flipped.volume_fraction, &base.volume_fraction);
        for (i, &flip) in flips.iter().enumerate() {
            let expected = if flip {
                -base.barycenter[i].clone()
            } else {
                base.barycenter[i].clone()
            };
            prop_assert_eq!(&flipped.barycenter[i], &expected);
        }

        // The complementary halfspace balances volume and mass exactly.
        let neg: Vec<Rational> = w.iter().map(|x| -x.clone()).collect();
        let comp = slice_stats(&Halfspace::exact(neg, -c.clone()).unwrap()).unwrap();
        prop_assert_eq!(&base.volume_fraction + &comp.volume_fraction, rat_int(1));
        for i in 0..n {
            let balance = &base.volume_fraction * &base.barycenter[i]
                + &comp.volume_fraction * &comp.barycenter[i];
            prop_assert_eq!(balance, Rational::zero());
        }
    }
}
