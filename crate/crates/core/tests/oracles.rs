mod common;

use common::{as_point, depth_at, max_depth, ratio, rng, sampled_min_mass, IntCloud};
use rand::Rng;

use transversal_core::depth::{self, HalfSpaceSide, Location, WeightedPointCloud};
use transversal_core::rational::{int, rat, Rational};

fn witness_attains(cloud: &WeightedPointCloud, x: &[Rational], value: &depth::DepthValue) -> bool {
    let u = value.witness_direction.as_ref().expect("exact modes report a direction");
    let a: Rational = u.iter().zip(x).map(|(c, p)| c * p).sum();
    depth::halfspace_mass(cloud, u, &a, HalfSpaceSide::Upper).unwrap() == value.value
}

#[test]
fn planar_point_depth_matches_brute_force() {
    let mut r = rng(101);
    for _ in 0..60 {
        let atoms = r.random_range(1..=12);
        let ic = IntCloud::random(&mut r, atoms, 6, 5);
        let cloud = ic.to_cloud();
        let total = ic.total();
        for _ in 0..20 {
            let q = r.random_range(1..=4);
            let x = [r.random_range(-8 * q..=8 * q), r.random_range(-8 * q..=8 * q)];
            let p = as_point(x, q);
            let got = depth::tukey_depth(&cloud, &p).unwrap();
            assert_eq!(got.value, ratio(depth_at(&ic, x, q), total), "cloud {ic:?} point {p:?}");
            assert!(!got.approximate);
            assert!(witness_attains(&cloud, &p, &got));
        }
        for (p, w) in ic.pts.iter().zip(&ic.wts) {
            let at = depth::tukey_depth(&cloud, &as_point(*p, 1)).unwrap().value;
            assert!(at >= ratio(*w, total));
        }
    }
}

#[test]
fn collinear_and_repeated_atoms() {
    let ic = IntCloud { pts: vec![[0, 0], [1, 1], [2, 2], [2, 2], [3, 3]], wts: vec![1, 1, 1, 1, 1] };
    let cloud = ic.to_cloud();
    for (x, q) in [([1, 1], 1), ([2, 2], 1), ([3, 2], 2), ([1, 0], 1)] {
        assert_eq!(depth::tukey_depth(&cloud, &as_point(x, q)).unwrap().value, ratio(depth_at(&ic, x, q), 5));
    }
}

#[test]
fn measure_depth_matches_arrangement_maximum() {
    let mut r = rng(202);
    for _ in 0..40 {
        let atoms = r.random_range(1..=8);
        let ic = IntCloud::random(&mut r, atoms, 5, 4);
        let cloud = ic.to_cloud();
        let (value, point) = depth::depth_of_measure(&cloud).unwrap();
        assert_eq!(value.value, ratio(max_depth(&ic), ic.total()), "cloud {ic:?}");
        assert_eq!(depth::tukey_depth(&cloud, &point).unwrap().value, value.value);
        assert!(value.value >= rat(1, 3));
    }
}

#[test]
fn sampled_directions_never_undercut_exact_depth() {
    let mut r = rng(303);
    for _ in 0..20 {
        let ic = IntCloud::random(&mut r, 10, 9, 3);
        let cloud = ic.to_cloud();
        for _ in 0..10 {
            let x = [r.random_range(-30..=30), r.random_range(-30..=30)];
            let exact = depth::tukey_depth(&cloud, &as_point(x, 3)).unwrap().value;
            assert!(ratio(sampled_min_mass(&ic, x, 3, 1000), ic.total()) >= exact);
        }
    }
}

#[test]
fn region_agrees_with_pointwise_depth_on_a_grid() {
    let mut r = rng(404);
    for _ in 0..8 {
        let ic = IntCloud::random(&mut r, 9, 6, 3);
        let cloud = ic.to_cloud();
        let total = ic.total();
        let (top, _) = depth::max_depth_region(&cloud).unwrap();
        for tau in [rat(1, 5), rat(1, 3), top.clone()] {
            let region = depth::depth_region(&cloud, &tau).unwrap();
            let mut checked = 0;
            // 33 x 33 probes at spacing 1/4 over [-8, 8]^2.
            for i in -32..=32 {
                for j in -32..=32 {
                    if (i + j) % 2 != 0 {
                        continue;
                    }
                    let p = as_point([i, j], 4);
                    let loc = region.locate(&p);
                    if loc == Location::Boundary {
                        continue;
                    }
                    let deep = ratio(depth_at(&ic, [i, j], 4), total) >= tau;
                    assert_eq!(loc == Location::Inside, deep, "tau {tau} probe {p:?} region {region:?}");
                    checked += 1;
                }
            }
            assert!(checked >= 1000);
        }
    }
}

#[test]
fn line_depth_is_the_weighted_median() {
    let mut r = rng(505);
    for _ in 0..50 {
        let k = r.random_range(1..=9);
        let xs: Vec<i64> = (0..k).map(|_| r.random_range(-10..=10)).collect();
        let ws: Vec<i64> = (0..k).map(|_| r.random_range(1..=4)).collect();
        let total: i64 = ws.iter().sum();
        let cloud = WeightedPointCloud::normalized(
            1,
            xs.iter().zip(&ws).map(|(&x, &w)| depth::Atom { point: vec![int(x)], weight: rat(w, total) }).collect(),
        )
        .unwrap();
        for probe in -22..=22 {
            let left: i64 = xs.iter().zip(&ws).filter(|(&x, _)| 2 * x <= probe).map(|(_, w)| w).sum();
            let right: i64 = xs.iter().zip(&ws).filter(|(&x, _)| 2 * x >= probe).map(|(_, w)| w).sum();
            let got = depth::tukey_depth(&cloud, &[rat(probe, 2)]).unwrap().value;
            assert_eq!(got, rat(left.min(right), total));
        }
    }
}

#[test]
fn space_depth_is_dominated_and_attained() {
    let mut r = rng(606);
    for _ in 0..15 {
        let k = r.random_range(4..=9);
        let pts: Vec<Vec<i64>> = (0..k).map(|_| (0..3).map(|_| r.random_range(-5..=5)).collect()).collect();
        let cloud = WeightedPointCloud::uniform(pts.iter().map(|p| p.iter().map(|&c| int(c)).collect()).collect()).unwrap();
        for _ in 0..5 {
            let x: Vec<Rational> = (0..3).map(|_| rat(r.random_range(-6..=6), 2)).collect();
            let got = depth::tukey_depth(&cloud, &x).unwrap();
            assert!(witness_attains(&cloud, &x, &got));
            for _ in 0..300 {
                let u: Vec<Rational> = (0..3).map(|_| int(r.random_range(-50..=50))).collect();
                if u.iter().all(|c| *c == int(0)) {
                    continue;
                }
                let a: Rational = u.iter().zip(&x).map(|(c, p)| c * p).sum();
                assert!(depth::halfspace_mass(&cloud, &u, &a, HalfSpaceSide::Upper).unwrap() >= got.value);
            }
        }
    }
}

#[test]
fn tetrahedron_center_has_depth_one_quarter() {
    let pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let cloud = WeightedPointCloud::uniform(pts.iter().map(|p| p.iter().map(|&c| int(c)).collect()).collect()).unwrap();
    let v = depth::tukey_depth(&cloud, &[rat(1, 4), rat(1, 4), rat(1, 4)]).unwrap();
    assert_eq!(v.value, rat(1, 4));
    assert_eq!(depth::tukey_depth(&cloud, &[int(2), int(2), int(2)]).unwrap().value, int(0));
}
