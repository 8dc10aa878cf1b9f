mod common;

use common::{kernel, kernel_with_map, probes, uniform_kernel_on};
use graphonlab::cutdist::{coupling_cut_norm, cut_distance, Coupling, DistanceNorm, DistanceOptions};
use graphonlab::cutnorm::Variant;
use graphonlab::homdensity::hom_density;
use graphonlab::structure::{equivalent, purify, r_metrics, row_distance};
use graphonlab::{pullback, MPMap};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn purified_rows_are_distinct((k, phi) in kernel_with_map(5, 0.0, 1.0)) {
        let w = pullback(&k, &phi).unwrap();
        let p = purify(&w, TOL).unwrap();
        let m = p.pure.parts();
        for i in 0..m {
            for j in 0..i {
                prop_assert!(row_distance(&p.pure, i, j) > TOL);
            }
        }
        prop_assert_eq!(purify(&p.pure, TOL).unwrap().pure, p.pure.clone());
        let c = Coupling::new(
            (0..w.parts())
                .map(|i| (0..m).map(|a| if p.quotient_map.map()[i] == a { w.weights()[i] } else { 0.0 }).collect())
                .collect(),
        )
        .unwrap();
        prop_assert_eq!(coupling_cut_norm(&w, &p.pure, &c, DistanceNorm::Cut(Variant::One)).unwrap(), 0.0);
    }

    #[test]
    fn equivalence_is_reflexive_symmetric_and_consistent((k, phi) in kernel_with_map(4, 0.0, 1.0)) {
        let w = pullback(&k, &phi).unwrap();
        prop_assert!(equivalent(&k, &k, TOL).unwrap().is_equivalent());
        prop_assert!(equivalent(&k, &w, TOL).unwrap().is_equivalent());
        prop_assert!(equivalent(&w, &k, TOL).unwrap().is_equivalent());
        for f in probes() {
            prop_assert!((hom_density(&f, &k).unwrap() - hom_density(&f, &w).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn equivalent_uniform_kernels_are_at_cut_distance_zero(
        (k, map) in (1usize..5, 1usize..3).prop_flat_map(|(m, factor)| {
            (uniform_kernel_on(m, 0.0, 1.0), Just((0..m * factor).map(|j| j / factor).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let n = map.len();
        let phi = MPMap::new(vec![1.0 / n as f64; n], k.weights().to_vec(), map).unwrap();
        let w = pullback(&k, &phi).unwrap();
        prop_assert!(equivalent(&k, &w, TOL).unwrap().is_equivalent());
        let d = cut_distance(&k, &w, &DistanceOptions { m: Some(n), ..Default::default() }).unwrap();
        prop_assert!(d.upper <= 1e-9, "{:?}", d);
    }

    #[test]
    fn row_metrics_are_pseudometrics(k in kernel(6, -1.0, 1.0)) {
        let (r, rr) = r_metrics(&k);
        for d in [&r, &rr] {
            let m = d.len();
            for i in 0..m {
                prop_assert_eq!(d[i][i], 0.0);
                for j in 0..m {
                    prop_assert!((d[i][j] - d[j][i]).abs() <= 1e-12);
                    for l in 0..m {
                        prop_assert!(d[i][l] <= d[i][j] + d[j][l] + 1e-12);
                    }
                }
            }
        }
    }
}
