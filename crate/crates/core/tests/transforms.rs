use std::f64::consts::PI;

use lcvmark::image::CoeffGrid;
use lcvmark::transforms::pyramid::{lp_decompose, lp_reconstruct};
use lcvmark::transforms::{
    ct_decompose_grid, ct_reconstruct, dct2, dfb_decompose, dfb_reconstruct, idct2, SubbandSet, DIRECTIONS,
};
use proptest::prelude::*;

fn rel_rms(a: &CoeffGrid, b: &CoeffGrid) -> f64 {
    let err: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).powi(2)).sum();
    let energy: f64 = a.values().iter().map(|x| x * x).sum();
    (err / energy.max(f64::MIN_POSITIVE)).sqrt()
}

fn energy(g: &CoeffGrid) -> f64 {
    g.values().iter().map(|v| v * v).sum()
}

fn grid(side_w: usize, side_h: usize, values: Vec<f64>) -> CoeffGrid {
    CoeffGrid::new(side_w, side_h, values).unwrap()
}

/// `(width, height)` multiples of 4 and matching random samples.
fn random_image() -> impl Strategy<Value = CoeffGrid> {
    (2usize..10, 2usize..10).prop_flat_map(|(w4, h4)| {
        let (w, h) = (4 * w4, 4 * h4);
        prop::collection::vec(-300.0f64..300.0, w * h).prop_map(move |v| grid(w, h, v))
    })
}

fn random_block(side: usize) -> impl Strategy<Value = CoeffGrid> {
    prop::collection::vec(-1000.0f64..1000.0, side * side).prop_map(move |v| grid(side, side, v))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dct_round_trip_and_parseval(block in prop_oneof![random_block(4), random_block(8), random_block(16)]) {
        let coeffs = dct2(&block).unwrap();
        prop_assert!(rel_rms(&block, &idct2(&coeffs).unwrap()) <= 1e-10);
        prop_assert!(rel_rms(&coeffs, &dct2(&idct2(&coeffs).unwrap()).unwrap()) <= 1e-10);
        prop_assert!((energy(&block) - energy(&coeffs)).abs() <= 1e-10 * energy(&block));
    }

    #[test]
    fn pyramid_reconstructs(x in random_image()) {
        let (a, d) = lp_decompose(&x).unwrap();
        prop_assert_eq!((a.width(), a.height()), (x.width() / 2, x.height() / 2));
        prop_assert_eq!((d.width(), d.height()), (x.width(), x.height()));
        prop_assert!(rel_rms(&x, &lp_reconstruct(&a, &d).unwrap()) <= 1e-6);
    }

    #[test]
    fn directional_bank_reconstructs(x in random_image()) {
        let bands = dfb_decompose(&x).unwrap();
        let samples: usize = bands.iter().map(|b| b.width() * b.height()).sum();
        prop_assert_eq!(samples, x.width() * x.height());
        prop_assert!(rel_rms(&x, &dfb_reconstruct(&bands).unwrap()) <= 1e-6);
    }

    #[test]
    fn contourlet_reconstructs(x in random_image()) {
        prop_assert!(rel_rms(&x, &ct_reconstruct(&ct_decompose_grid(&x).unwrap()).unwrap()) <= 1e-6);
    }

    #[test]
    fn contourlet_is_linear(x in random_image(), k in -3.0f64..3.0) {
        let y = CoeffGrid::from_fn(x.width(), x.height(), |r, c| ((r * 7 + c * 13) % 19) as f64 - 9.0);
        let sum = x.zip_with(&y.map(|v| k * v), |a, b| a + b).unwrap();
        let (sx, sy, ss) = (
            ct_decompose_grid(&x).unwrap(),
            ct_decompose_grid(&y).unwrap(),
            ct_decompose_grid(&sum).unwrap(),
        );
        let combined = SubbandSet {
            approximate: sx.approximate.zip_with(&sy.approximate.map(|v| k * v), |a, b| a + b).unwrap(),
            details: std::array::from_fn(|i| sx.details[i].zip_with(&sy.details[i].map(|v| k * v), |a, b| a + b).unwrap()),
        };
        prop_assert!(rel_rms(&ss.approximate, &combined.approximate) <= 1e-10);
        for i in 0..DIRECTIONS {
            prop_assert!(rel_rms(&ss.details[i], &combined.details[i]) <= 1e-10);
        }
        let lhs = ct_reconstruct(&combined).unwrap();
        let rhs = ct_reconstruct(&sx).unwrap().zip_with(&ct_reconstruct(&sy).unwrap().map(|v| k * v), |a, b| a + b).unwrap();
        prop_assert!(rel_rms(&rhs, &lhs) <= 1e-8);
    }
}

#[test]
fn dct_closed_forms() {
    let c = dct2(&CoeffGrid::filled(4, 4, 8.0)).unwrap();
    assert!((c.get(0, 0) - 32.0).abs() < 1e-12);
    assert!(c.values().iter().skip(1).all(|v| v.abs() < 1e-12));
    let mut dc = CoeffGrid::zeros(4, 4);
    dc.set(0, 0, 32.0);
    assert!(idct2(&dc).unwrap().values().iter().all(|v| (v - 8.0).abs() < 1e-12));
    assert!(idct2(&CoeffGrid::zeros(4, 4)).unwrap().values().iter().all(|&v| v == 0.0));
}

#[test]
fn constant_input_has_empty_bandpass() {
    let (a, d) = lp_decompose(&CoeffGrid::filled(32, 24, 77.0)).unwrap();
    assert!(d.rms() < 1e-10);
    assert!(a.values().iter().all(|v| (v - 77.0).abs() < 1e-10));
}

/// Squared magnitude of the 2-D DFT, by direct summation.
fn power_spectrum(x: &CoeffGrid) -> Vec<Vec<f64>> {
    let (w, h) = (x.width(), x.height());
    let mut rows = vec![vec![(0.0, 0.0); w]; h];
    for (r, row) in rows.iter_mut().enumerate() {
        for (k, out) in row.iter_mut().enumerate() {
            *out = (0..w).fold((0.0, 0.0), |(re, im), c| {
                let t = -2.0 * PI * (k * c) as f64 / w as f64;
                (re + x.get(r, c) * t.cos(), im + x.get(r, c) * t.sin())
            });
        }
    }
    (0..h)
        .map(|l| {
            (0..w)
                .map(|k| {
                    let (re, im) = (0..h).fold((0.0, 0.0), |(re, im), r| {
                        let t = -2.0 * PI * (l * r) as f64 / h as f64;
                        let (a, b) = rows[r][k];
                        (re + a * t.cos() - b * t.sin(), im + a * t.sin() + b * t.cos())
                    });
                    re * re + im * im
                })
                .collect()
        })
        .collect()
}

/// Orientation in degrees, in `[0, 180)`, of the strongest non-DC frequency:
/// angle of `(w_row, w_col)` measured from the column-frequency axis.
fn peak_angle(x: &CoeffGrid) -> f64 {
    let p = power_spectrum(x);
    let (w, h) = (x.width() as isize, x.height() as isize);
    let signed = |k: usize, n: isize| if (k as isize) < n / 2 { k as isize } else { k as isize - n };
    let mut best = (f64::NEG_INFINITY, 0.0);
    for (l, row) in p.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let (fr, fc) = (signed(l, h) as f64 / h as f64, signed(k, w) as f64 / w as f64);
            if (fr, fc) == (0.0, 0.0) || v <= best.0 {
                continue;
            }
            best = (v, fr.atan2(fc).to_degrees().rem_euclid(180.0));
        }
    }
    best.1
}

fn wedge(angle: f64) -> usize {
    (angle / 45.0) as usize % DIRECTIONS
}

#[test]
fn synthesis_impulse_responses_occupy_distinct_wedges() {
    let side = 64;
    let mut wedges = Vec::new();
    for k in 0..DIRECTIONS {
        let mut bands: [CoeffGrid; DIRECTIONS] = std::array::from_fn(|_| CoeffGrid::zeros(side / 2, side / 2));
        bands[k].set(side / 4, side / 4, 1.0);
        let response = dfb_reconstruct(&bands).unwrap();
        let angle = peak_angle(&response);
        assert_eq!(wedge(angle), k, "subband {k} peaks at {angle:.1} deg");
        wedges.push(wedge(angle));
    }
    wedges.sort();
    wedges.dedup();
    assert_eq!(wedges.len(), DIRECTIONS);
}

#[test]
fn analysis_impulse_responses_occupy_distinct_wedges() {
    // Equivalent analysis filter of one interior coefficient per subband,
    // assembled column by column from unit impulses.
    let side = 32;
    let centre = side / 4;
    let mut filters: [CoeffGrid; DIRECTIONS] = std::array::from_fn(|_| CoeffGrid::zeros(side, side));
    for r in 0..side {
        for c in 0..side {
            let mut x = CoeffGrid::zeros(side, side);
            x.set(r, c, 1.0);
            let bands = dfb_decompose(&x).unwrap();
            for (f, b) in filters.iter_mut().zip(&bands) {
                f.set(r, c, b.get(centre, centre));
            }
        }
    }
    let wedges: Vec<usize> = filters
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let angle = peak_angle(f);
            assert_eq!(wedge(angle), k, "subband {k} peaks at {angle:.1} deg");
            wedge(angle)
        })
        .collect();
    let mut distinct = wedges.clone();
    distinct.sort();
    distinct.dedup();
    assert_eq!(distinct.len(), DIRECTIONS, "wedges {wedges:?}");
}
