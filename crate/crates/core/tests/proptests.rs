use proptest::prelude::*;

use uniform_textures::analysis::{enumerate_pairs, kabsch_align, DissimilarityMatrix};
use uniform_textures::geometry::Point;
use uniform_textures::raster::{overlay, Primitive, Pyramid, Raster};
use uniform_textures::reparam::{paper_params, savgol_smooth, sigmoid_eval, sigmoid_inverse, SigmoidParams};

fn binary_raster() -> impl Strategy<Value = Raster> {
    (1usize..40, 1usize..40).prop_flat_map(|(w, h)| {
        proptest::collection::vec(prop::bool::ANY, w * h)
            .prop_map(move |bits| Raster::from_vec(w, h, bits.into_iter().map(|b| b as u8 as f64).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_is_a_fraction(r in binary_raster()) {
        let d = r.density();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, r.covered_count() as f64 / r.len() as f64);
    }

    #[test]
    fn pyramid_top_is_the_density(r in binary_raster()) {
        let p = Pyramid::build(&r);
        prop_assert!((p.top() - r.density()).abs() < 1e-12);
        for level in p.levels() {
            prop_assert!(level.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn overlay_is_bounded_by_max_and_sum(a in binary_raster(), seed in any::<u64>()) {
        let (w, h) = a.dims();
        let b = Raster::from_fn(w, h, |x, y| (x as u64 * 31 + y as u64 * 17).wrapping_add(seed).is_multiple_of(3) as u8 as f64).unwrap();
        let u = overlay(&a, &b).unwrap();
        prop_assert!(u.density() >= a.density().max(b.density()) - 1e-12);
        prop_assert!(u.density() <= (a.density() + b.density()).min(1.0) + 1e-12);
    }

    #[test]
    fn drawing_only_adds_ink(x in 0.0f64..32.0, y in 0.0f64..32.0, x1 in 0.0f64..32.0, y1 in 0.0f64..32.0, w in 0.5f64..6.0) {
        let mut r = Raster::new(32, 32).unwrap();
        r.draw(&Primitive::disc(Point::new(5.0, 5.0), 4.0));
        let before = r.covered_count();
        let added = r.draw(&Primitive::segment(Point::new(x, y), Point::new(x1, y1), w));
        prop_assert_eq!(r.covered_count(), before + added);
        prop_assert_eq!(r.draw(&Primitive::segment(Point::new(x, y), Point::new(x1, y1), w)), 0);
    }

    #[test]
    fn sigmoid_inverts(a in 0.05f64..0.95, b in 1.01f64..4.0, y in 0.0f64..=1.0) {
        let p = SigmoidParams::new(a, b).unwrap();
        let x = sigmoid_inverse(&p, y).unwrap();
        prop_assert!((sigmoid_eval(&p, x).unwrap() - y).abs() < 1e-9);
    }

    #[test]
    fn sigmoid_is_monotone(x0 in 0.0f64..=1.0, x1 in 0.0f64..=1.0, t in 0usize..3) {
        let p = paper_params(["stipple", "hatch", "triangle"][t]).unwrap();
        let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        prop_assert!(sigmoid_eval(&p, lo).unwrap() <= sigmoid_eval(&p, hi).unwrap());
    }

    #[test]
    fn pair_order_is_a_permutation(n in 1usize..30, seed in any::<u64>()) {
        let pairs = enumerate_pairs(n, seed).unwrap();
        prop_assert_eq!(pairs.len(), n * (n + 1) / 2);
        let mut canon: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
        canon.sort();
        canon.dedup();
        prop_assert_eq!(canon.len(), pairs.len());
    }

    #[test]
    fn point_distances_make_a_metric_matrix(pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..12)) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|(x, y)| vec![x, y]).collect();
        let m = DissimilarityMatrix::from_points(&pts, "p").unwrap();
        let n = pts.len();
        for i in 0..n {
            prop_assert_eq!(m.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                for k in 0..n {
                    prop_assert!(m.get(i, k) <= m.get(i, j) + m.get(j, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn kabsch_undoes_rigid_motions(
        pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..15),
        th in 0.0f64..std::f64::consts::TAU, tx in -3.0f64..3.0, ty in -3.0f64..3.0,
    ) {
        let a: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
        let b: Vec<Vec<f64>> = a.iter().map(|p| vec![th.cos() * p[0] - th.sin() * p[1] + tx, th.sin() * p[0] + th.cos() * p[1] + ty]).collect();
        let al = kabsch_align(&a, &b, false).unwrap();
        prop_assert!(al.rmsd < 1e-8, "rmsd {}", al.rmsd);
    }

    #[test]
    fn savgol_keeps_lines(slope in -3.0f64..3.0, icpt in -2.0f64..2.0, half in 1usize..5, degree in 1usize..3) {
        let window = 2 * half + 1;
        prop_assume!(degree < window);
        let pts: Vec<[f64; 2]> = (0..20).map(|i| [i as f64, icpt + slope * i as f64]).collect();
        let out = savgol_smooth(&pts, window, degree).unwrap();
        // mirrored edges bend a line, so only full windows are checked
        for i in half..20 - half {
            prop_assert!((pts[i][0] - out[i][0]).abs() < 1e-9 && (pts[i][1] - out[i][1]).abs() < 1e-9);
        }
    }
}
