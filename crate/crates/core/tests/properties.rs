//! Property-based invariants over randomized inputs.

use focuslab_core::{automaton, lattice::LatticeField, measures, tightbinding, wigner, Complex};
use proptest::prelude::*;

fn arb_field(max_width: usize) -> impl Strategy<Value = LatticeField> {
    (
        -8i64..8,
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..max_width),
    )
        .prop_map(|(offset, pairs)| {
            let amps = pairs
                .into_iter()
                .map(|(re, im)| Complex::new(re, im))
                .collect::<Vec<_>>();
            LatticeField::new(offset, amps)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tb_propagation_conserves_norm(field in arb_field(12), t in 0.0f64..30.0) {
        let before = field.norm_sqr();
        let after = tightbinding::propagate(&field, 1.0, t).norm_sqr();
        prop_assert!((before - after).abs() < 1e-12 * before.max(1.0));
    }

    #[test]
    fn automaton_step_is_linear(a in arb_field(8), b in arb_field(8),
                                ca in -2.0f64..2.0, cb in -2.0f64..2.0,
                                delta in -0.2f64..0.2) {
        let (lo_a, hi_a) = a.support();
        let (lo_b, hi_b) = b.support();
        let lo = lo_a.min(lo_b) - 1;
        let hi = hi_a.max(hi_b) + 1;
        let combo = LatticeField::new(
            lo,
            (lo..=hi).map(|n| a.amp(n) * ca + b.amp(n) * cb).collect(),
        );
        let lhs = automaton::step(&combo, delta);
        let sa = automaton::step(&a, delta);
        let sb = automaton::step(&b, delta);
        for n in lo - 1..=hi + 1 {
            let rhs = sa.amp(n) * ca + sb.amp(n) * cb;
            prop_assert!((lhs.amp(n) - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn automaton_growth_bound(field in arb_field(10), delta in -0.3f64..0.3, steps in 1usize..12) {
        let mut f = field;
        let mut prev_max = f.amplitudes().iter().map(|a| a.norm()).fold(0.0f64, f64::max);
        for _ in 0..steps {
            f = automaton::step(&f, delta);
            let m = f.amplitudes().iter().map(|a| a.norm()).fold(0.0f64, f64::max);
            prop_assert!(m <= (1.0 + 2.0 * delta.abs()) * prev_max * (1.0 + 1e-12));
            prev_max = m;
        }
    }

    #[test]
    fn kernel_even_in_displacement(tau in 0u32..25, d in 0i64..25, delta in -0.15f64..0.15) {
        let d = d.min(tau as i64);
        prop_assert_eq!(
            automaton::kernel(tau, d, delta),
            automaton::kernel(tau, -d, delta)
        );
    }

    #[test]
    fn permanence_monotone_and_bounded(field in arb_field(12), n0 in 0u32..20) {
        let w0 = measures::permanence(&field, n0);
        let w1 = measures::permanence(&field, n0 + 1);
        prop_assert!(w0 <= w1 + 1e-15);
        prop_assert!(w0 >= 0.0);
        prop_assert!(w1 <= field.norm_sqr() + 1e-12);
    }

    #[test]
    fn wigner_real_and_periodic(field in arb_field(9), k in -1.5f64..1.5) {
        let ks = [k, k + std::f64::consts::PI];
        let grid = wigner::discrete_wigner(&field, &ks).unwrap();
        prop_assert!(grid.max_imag_residue < 1e-12 * field.norm_sqr().max(1.0) * 2.0);
        for r in 0..grid.n_rows() {
            prop_assert!((grid.values[r][0] - grid.values[r][1]).abs()
                < 1e-11 * field.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn wigner_even_in_k_for_real_fields(width in 1usize..9, k in 0.01f64..1.5) {
        let amps: Vec<Complex> = (0..width).map(|i| Complex::new(1.0 / (i + 1) as f64, 0.0)).collect();
        let field = LatticeField::new(-(width as i64) / 2, amps);
        let grid = wigner::discrete_wigner(&field, &[k, -k]).unwrap();
        for r in 0..grid.n_rows() {
            prop_assert!((grid.values[r][0] - grid.values[r][1]).abs() < 1e-12);
        }
    }

    #[test]
    fn detector_invariant_under_positive_rescale(scale in 0.01f64..100.0) {
        let times = measures::uniform_grid(21.0, 120);
        let mut series = measures::measure_series(5, 1, 1.0, &times);
        let a = measures::detect_focusing(&series).unwrap();
        for v in &mut series.values {
            *v *= scale;
        }
        let b = measures::detect_focusing(&series).unwrap();
        prop_assert_eq!(a.focusing, b.focusing);
        prop_assert!((a.normalized_peak - b.normalized_peak).abs() < 1e-9);
    }
}
