use nalgebra::{DMatrix, DVector};

use uniform_textures::reparam::{
    density_at, fit_curve, fit_sigmoid, levels_from_embedding, paper_levels, paper_params, savgol_coefficients,
    savgol_smooth_with, sigmoid_eval, sigmoid_levels, uniform_levels, uniform_sample, EdgeMode, LabeledEmbedding,
    PerceptualCurve, Projection,
};

// weights from the normal equations (A^T A) c = A^T y, evaluated at `offset`
fn normal_equation_weights(window: usize, degree: usize, offset: f64) -> Vec<f64> {
    let half = (window / 2) as f64;
    let a = DMatrix::from_fn(window, degree + 1, |j, p| (j as f64 - half).powi(p as i32));
    let chol = (a.transpose() * &a).cholesky().unwrap();
    let basis = DVector::from_fn(degree + 1, |p, _| offset.powi(p as i32));
    (a * chol.solve(&basis)).iter().copied().collect()
}

#[test]
fn savgol_weights_match_normal_equations() {
    for window in [3, 5, 7, 9, 11] {
        for degree in 0..window.min(5) {
            for offset in [0.0, 1.0, -2.0, 0.5] {
                let ours = savgol_coefficients(window, degree, offset).unwrap();
                let oracle = normal_equation_weights(window, degree, offset);
                for (a, b) in ours.iter().zip(&oracle) {
                    assert!((a - b).abs() < 1e-9, "w{window} d{degree} o{offset}: {ours:?} vs {oracle:?}");
                }
            }
        }
    }
}

#[test]
fn savgol_classic_tables() {
    let c = savgol_coefficients(7, 3, 0.0).unwrap();
    let table = [-2.0, 3.0, 6.0, 7.0, 6.0, 3.0, -2.0];
    for (x, t) in c.iter().zip(table) {
        assert!((x - t / 21.0).abs() < 1e-12);
    }
    let moving_average = savgol_coefficients(5, 1, 0.0).unwrap();
    assert!(moving_average.iter().all(|v| (v - 0.2).abs() < 1e-12));
}

#[test]
fn interp_edges_reproduce_polynomials_everywhere() {
    let pts: Vec<[f64; 2]> = (0..15).map(|i| {
        let u = i as f64;
        [2.0 - u + 0.1 * u * u, 0.01 * u * u * u - u]
    }).collect();
    let out = savgol_smooth_with(&pts, 7, 3, EdgeMode::Interp).unwrap();
    for (p, q) in pts.iter().zip(&out) {
        assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9);
    }
}

fn wobbly(n: usize) -> LabeledEmbedding {
    LabeledEmbedding::new(
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                [s * 3.0, (s * 2.5).sin() + 0.08 * ((i * 7919) % 11) as f64 / 11.0]
            })
            .collect(),
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    )
    .unwrap()
}

#[test]
fn window_search_picks_the_smallest_error() {
    let emb = wobbly(21);
    let searched = fit_curve(&emb, 3, None).unwrap();
    let mut best: Option<(usize, f64)> = None;
    for w in (5..=21).step_by(2) {
        if let Ok(f) = fit_curve(&emb, 3, Some(w)) {
            let better = best.is_none_or(|(_, e)| f.sse < e - 1e-12);
            if better {
                best = Some((w, f.sse));
            }
        }
    }
    let (w, e) = best.unwrap();
    assert_eq!(searched.window, w);
    assert!((searched.sse - e).abs() < 1e-12);
    for &(win, err) in &searched.window_errors {
        if let Some(err) = err {
            assert!(err >= searched.sse - 1e-12, "window {win}");
        }
    }
}

#[test]
fn uniform_samples_on_a_circle_have_equal_chords() {
    let n = 25;
    let emb = LabeledEmbedding::new(
        (0..n).map(|i| {
            let a = i as f64 / (n - 1) as f64 * std::f64::consts::PI;
            [a.cos(), a.sin()]
        }).collect(),
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    )
    .unwrap();
    let fit = fit_curve(&emb, 3, Some(7)).unwrap();
    assert!((fit.curve.length - std::f64::consts::PI).abs() < 1e-3);
    let s = uniform_sample(&fit.curve, 12).unwrap();
    let chords: Vec<f64> = s.windows(2).map(|w| ((w[1].1[0] - w[0].1[0]).powi(2) + (w[1].1[1] - w[0].1[1]).powi(2)).sqrt()).collect();
    let expected = 2.0 * (std::f64::consts::PI / 24.0).sin();
    for c in chords {
        assert!((c - expected).abs() < 1e-3, "{c} vs {expected}");
    }
    let levels = uniform_levels(&fit.curve, 3).unwrap();
    for (l, e) in levels.iter().zip([0.25, 0.5, 0.75]) {
        assert!((l - e).abs() < 2e-3);
    }
}

#[test]
fn density_interpolates_between_projections() {
    let proj = |t: f64, density: f64| Projection { t, density, point: [t, 0.0], dist2: 0.0 };
    let curve = PerceptualCurve {
        polyline: vec![[0.0, 0.0], [2.0, 0.0]],
        arclen: vec![0.0, 2.0],
        length: 2.0,
        projections: vec![proj(0.0, 0.1), proj(1.0, 0.3), proj(2.0, 0.9)],
    };
    assert!((density_at(&curve, 0.5) - 0.20).abs() < 1e-12);
    assert!((density_at(&curve, 1.25) - 0.45).abs() < 1e-12);
    assert_eq!(density_at(&curve, -1.0), 0.1);
    assert_eq!(density_at(&curve, 5.0), 0.9);
}

#[test]
fn density_lambda_example() {
    let proj = |t: f64, density: f64| Projection { t, density, point: [t, 0.0], dist2: 0.0 };
    let curve = PerceptualCurve {
        polyline: vec![[0.0, 0.0], [1.0, 0.0]],
        arclen: vec![0.0, 1.0],
        length: 1.0,
        projections: vec![proj(0.2, 0.10), proj(0.6, 0.50)],
    };
    // lambda = (0.6 - 0.3) / (0.6 - 0.2) = 0.75
    assert!((density_at(&curve, 0.3) - 0.20).abs() < 1e-12);
    assert_eq!(density_at(&curve, 0.2), 0.10);
}

#[test]
fn published_levels_follow_published_sigmoids() {
    for t in ["stipple", "hatch", "triangle"] {
        let p = paper_params(t).unwrap();
        let table = paper_levels(t).unwrap();
        let ours = sigmoid_levels(&p, 5).unwrap();
        for (a, b) in ours.iter().zip(table) {
            assert!((a - b).abs() <= 0.05, "{t}: {ours:?} vs {table:?}");
        }
    }
}

#[test]
fn sigmoid_through_curve_samples() {
    // an embedding placed on the stipple sigmoid: the fit should come back
    let p = paper_params("stipple").unwrap();
    let n = 41;
    let ys: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let xs: Vec<f64> = ys.iter().map(|&y| uniform_textures::reparam::sigmoid_inverse(&p, y).unwrap()).collect();
    let emb = LabeledEmbedding::new(xs.iter().map(|&x| [x, 0.0]).collect(), ys.clone()).unwrap();
    let r = levels_from_embedding(&emb, 2, Some(5), 5, false).unwrap();
    assert!((r.sigmoid.a - p.a).abs() < 0.02 && (r.sigmoid.b - p.b).abs() < 0.05, "{:?}", r.sigmoid);
    for (k, l) in r.levels.iter().enumerate() {
        let want = sigmoid_eval(&p, (k + 1) as f64 / 6.0).unwrap();
        assert!((l - want).abs() < 0.01, "level {k}: {l} vs {want}");
    }
    let direct = fit_sigmoid(&xs.iter().zip(&ys).map(|(&x, &y)| (x, y)).collect::<Vec<_>>()).unwrap();
    assert!((direct.a - p.a).abs() < 1e-6);
}
