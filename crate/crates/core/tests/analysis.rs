mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uniform_textures::analysis::{
    enumerate_pairs, indscal, ingest_ratings, kabsch_align, mds, mds_with, pair_count, read_ratings_csv, scree,
    screen_participants, write_ratings_csv, DissimilarityMatrix, IndscalOptions, MdsInit, MdsOptions,
    ScreeningThresholds,
};

fn random_config(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect()).collect()
}

#[test]
fn screening_flags_the_random_participant() {
    let (_, pos) = common::planted_series();
    let keys = common::series_keys("stipple", 21);
    let records = common::simulate_ratings(&keys, &pos, 20, 0.5, Some(13), 3);
    let data = ingest_ratings(&records, &keys).unwrap();
    assert_eq!(data.participants.len(), 20);
    assert_eq!(data.accepted_records, 20 * pair_count(21));
    let report = screen_participants(&data, ScreeningThresholds::default());
    assert_eq!(report.flagged(), vec!["p13"]);
    let random = report.entries.iter().find(|e| e.participant == "p13").unwrap();
    assert!(random.self_pair_statistic > 2.0 || random.correlation.unwrap() < 0.2);
}

#[test]
fn ratings_csv_round_trip() {
    let keys = common::series_keys("triangle", 5);
    let pos: Vec<[f64; 2]> = (0..5).map(|i| [i as f64, 0.0]).collect();
    let records = common::simulate_ratings(&keys, &pos, 2, 0.3, None, 1);
    let mut buf = Vec::new();
    write_ratings_csv(&mut buf, &records).unwrap();
    assert_eq!(read_ratings_csv(buf.as_slice()).unwrap(), records);
}

#[test]
fn mds_recovers_planted_configurations() {
    let line: Vec<Vec<f64>> = [0.0, 1.0, 2.5, 4.0, 7.0].iter().map(|&x| vec![x]).collect();
    let plane = random_config(5, 2, 4);
    for planted in [line, plane] {
        let dim = planted[0].len();
        let delta = DissimilarityMatrix::from_points(&planted, "planted").unwrap();
        let e = mds(&delta, dim).unwrap();
        assert!(e.stress1 < 1e-6, "dim {dim}: stress {}", e.stress1);
        for i in 0..5 {
            for j in 0..5 {
                let d: f64 = e.points[i].iter().zip(&e.points[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                assert!((d - delta.get(i, j)).abs() < 1e-4, "dim {dim}: ({i}, {j})");
            }
        }
    }
}

#[test]
fn scree_has_an_elbow_at_the_true_dimension() {
    let planted = random_config(15, 2, 8);
    let delta = DissimilarityMatrix::from_points(&planted, "planted").unwrap();
    let s = scree(&delta, 4).unwrap();
    assert_eq!(s.len(), 4);
    assert!(s[0] > 0.05, "1D should not fit: {s:?}");
    assert!(s[1] < 1e-4 && s[2] < 1e-4 && s[3] < 1e-4, "{s:?}");
}

#[test]
fn random_starts_agree_after_alignment() {
    let planted = random_config(12, 2, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let delta = DissimilarityMatrix::from_fn(12, "noisy", |i, j| {
        let d: f64 = planted[i].iter().zip(&planted[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        d * rng.random_range(0.95..1.05)
    })
    .unwrap();
    let runs: Vec<_> = (0..4)
        .map(|s| mds_with(&delta, 2, MdsOptions { init: MdsInit::Random(s), ..MdsOptions::default() }).unwrap())
        .collect();
    let best = runs.iter().map(|r| r.stress1).fold(f64::INFINITY, f64::min);
    for r in runs.iter().filter(|r| r.stress1 < best + 1e-6) {
        let a = kabsch_align(&r.points, &runs.iter().find(|r| r.stress1 < best + 1e-6).unwrap().points, true).unwrap();
        assert!(a.rmsd < 1e-3, "rmsd {}", a.rmsd);
    }
    for r in &runs {
        assert!(r.stress_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
}

#[test]
fn indscal_recovers_opposite_axis_weights() {
    let planted = random_config(10, 2, 6);
    let groups = [[2.0, 0.5], [0.5, 2.0]];
    let deltas: Vec<DissimilarityMatrix> = (0..6)
        .map(|k| {
            let w = groups[k % 2];
            let pts: Vec<Vec<f64>> = planted.iter().map(|p| vec![w[0] * p[0], w[1] * p[1]]).collect();
            DissimilarityMatrix::from_points(&pts, format!("p{k}")).unwrap()
        })
        .collect();
    let e = indscal(&deltas, 2, IndscalOptions::default()).unwrap();
    assert!(e.stress1 < 0.05, "stress {}", e.stress1);
    let w = e.weights.as_ref().unwrap();
    assert_eq!(w.len(), 6);
    let ratio: Vec<f64> = w.iter().map(|c| c[0] / c[1]).collect();
    let (a, b) = (ratio[0], ratio[1]);
    assert!((a > 2.0 && b < 0.5) || (a < 0.5 && b > 2.0), "ratios {ratio:?}");
    for k in 2..6 {
        let same = if k % 2 == 0 { a } else { b };
        assert!((ratio[k] / same - 1.0).abs() < 0.05, "ratios {ratio:?}");
    }
    assert!(e.stress_history.windows(2).all(|h| h[1] <= h[0] * (1.0 + 1e-12)));
}

fn rotate(p: &[Vec<f64>], th: f64, mirror: bool) -> Vec<Vec<f64>> {
    p.iter()
        .map(|v| {
            let y = if mirror { -v[1] } else { v[1] };
            vec![th.cos() * v[0] - th.sin() * y + 2.0, th.sin() * v[0] + th.cos() * y - 1.0]
        })
        .collect()
}

#[test]
fn kabsch_beats_every_grid_angle() {
    let a = random_config(9, 2, 30);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let b: Vec<Vec<f64>> =
        rotate(&a, 1.1, false).into_iter().map(|v| v.iter().map(|x| x + rng.random_range(-0.2..0.2)).collect()).collect();
    let al = kabsch_align(&a, &b, false).unwrap();
    let mean = |p: &[Vec<f64>], k: usize| p.iter().map(|v| v[k]).sum::<f64>() / p.len() as f64;
    let (ca, cb) = ([mean(&a, 0), mean(&a, 1)], [mean(&b, 0), mean(&b, 1)]);
    for k in 0..3600 {
        let th = k as f64 * std::f64::consts::TAU / 3600.0;
        let ss: f64 = a
            .iter()
            .zip(&b)
            .map(|(p, q)| {
                let (x, y) = (p[0] - ca[0], p[1] - ca[1]);
                (th.cos() * x - th.sin() * y - q[0] + cb[0]).powi(2) + (th.sin() * x + th.cos() * y - q[1] + cb[1]).powi(2)
            })
            .sum();
        assert!(al.rmsd <= (ss / 9.0).sqrt() + 1e-12);
    }
}

#[test]
fn kabsch_handles_mirror_images() {
    let a = random_config(8, 2, 40);
    let b = rotate(&a, 0.7, true);
    let proper = kabsch_align(&a, &b, false).unwrap();
    let any = kabsch_align(&a, &b, true).unwrap();
    assert!(!proper.reflected && proper.rmsd > 0.1);
    assert!(any.reflected && any.rmsd < 1e-10);
    for (p, q) in a.iter().zip(&b) {
        let m = any.apply(p);
        assert!((m[0] - q[0]).abs() < 1e-9 && (m[1] - q[1]).abs() < 1e-9);
    }
}

#[test]
fn pair_order_covers_every_pair_once() {
    let pairs = enumerate_pairs(21, 42).unwrap();
    let mut seen = std::collections::HashSet::new();
    for &(i, j) in &pairs {
        assert!(i < 21 && j < 21);
        assert!(seen.insert((i.min(j), i.max(j))));
    }
    assert_eq!(seen.len(), 231);
    assert_eq!(pairs, enumerate_pairs(21, 42).unwrap());
    assert_ne!(pairs, enumerate_pairs(21, 43).unwrap());
}
