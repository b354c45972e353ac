use proptest::prelude::*;

use g2thermo::analytic::linear_fit;
use g2thermo::maxwell::{fornberg_weights, savgol};
use g2thermo::models::{build_model, ModelSpec};
use g2thermo::quadrature::cumulative_integral;
use g2thermo::special::erfcx;

fn sorted_axis(gaps: Vec<f64>) -> Vec<f64> {
    let mut x = vec![0.0];
    for g in gaps {
        x.push(x.last().unwrap() + g);
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cumulative_simpson_is_exact_for_quadratics(
        gaps in prop::collection::vec(0.05f64..0.5, 2..30),
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
        anchor_frac in 0.0f64..1.0,
    ) {
        let x = sorted_axis(gaps);
        let anchor = ((x.len() - 1) as f64 * anchor_frac).round() as usize;
        let y: Vec<f64> = x.iter().map(|t| a + b * t + c * t * t).collect();
        let prim = |t: f64| a * t + b * t * t / 2.0 + c * t * t * t / 3.0;
        let r = cumulative_integral(&x, &y, anchor).unwrap();
        let scale = 1.0 + prim(*x.last().unwrap()).abs();
        for (j, v) in r.values.iter().enumerate() {
            prop_assert!((v - (prim(x[j]) - prim(x[anchor]))).abs() < 1e-12 * scale * x.len() as f64);
            prop_assert!(r.err[j] >= 0.0);
        }
        prop_assert_eq!(r.err[anchor], 0.0);
    }

    #[test]
    fn fornberg_differentiates_polynomials_exactly(
        gaps in prop::collection::vec(0.1f64..1.0, 3..6),
        coeffs in prop::collection::vec(-2.0f64..2.0, 3),
        z_frac in 0.0f64..1.0,
    ) {
        let x = sorted_axis(gaps);
        let z = x.last().unwrap() * z_frac;
        let p = |t: f64| coeffs[0] + coeffs[1] * t + coeffs[2] * t * t;
        let y: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        let d1: f64 = fornberg_weights(z, &x, 1).iter().zip(&y).map(|(w, v)| w * v).sum();
        let d2: f64 = fornberg_weights(z, &x, 2).iter().zip(&y).map(|(w, v)| w * v).sum();
        prop_assert!((d1 - (coeffs[1] + 2.0 * coeffs[2] * z)).abs() < 1e-9);
        prop_assert!((d2 - 2.0 * coeffs[2]).abs() < 1e-8);
    }

    #[test]
    fn savgol_keeps_low_order_polynomials(
        coeffs in prop::collection::vec(-2.0f64..2.0, 3),
        len in 9usize..40,
    ) {
        let y: Vec<f64> = (0..len)
            .map(|i| {
                let t = i as f64 * 0.1;
                coeffs[0] + coeffs[1] * t + coeffs[2] * t * t
            })
            .collect();
        let s = savgol(&y, 7, 2).unwrap();
        for (a, b) in s.iter().zip(&y) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_fit_recovers_noiseless_lines(
        slope in -5.0f64..5.0, intercept in -5.0f64..5.0,
        xs in prop::collection::btree_set(-1000i32..1000, 2..20),
    ) {
        let x: Vec<f64> = xs.into_iter().map(|v| v as f64 / 100.0).collect();
        let y: Vec<f64> = x.iter().map(|t| slope * t + intercept).collect();
        let fit = linear_fit(&x, &y).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!((fit.intercept - intercept).abs() < 1e-9);
    }

    #[test]
    fn erfcx_matches_its_definition(x in -3.0f64..20.0) {
        let direct = (x * x).exp() * libm::erfc(x);
        prop_assert!((erfcx(x) / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_models_are_hermitian(
        family in 0usize..3,
        sites in 2usize..5,
        c in -4.0f64..4.0,
        hop in 0.1f64..2.0,
    ) {
        let spec = match family {
            0 => ModelSpec::tfim(sites, hop, c),
            1 => ModelSpec::fermi_hubbard(sites, hop, c, sites / 2, sites.div_ceil(2)),
            _ => ModelSpec::bose_hubbard(sites, hop, c, sites),
        };
        let ops = build_model(&spec).unwrap();
        let h = ops.hamiltonian_at(c, 0.0).unwrap();
        prop_assert!(h.max_hermitian_deviation() < 1e-12);
    }
}
