mod common;

use rand::Rng;
use wecsf::wavelet::{dwt_multilevel, max_levels, wavelet_energy_map};
use wecsf::RasterPlane;

fn rms(a: &RasterPlane, b: &RasterPlane) -> f64 {
    let s: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).powi(2)).sum();
    (s / a.len() as f64).sqrt()
}

#[test]
fn energy_map_matches_pixelwise_oracle() {
    let mut rng = common::rng(32);
    for (w, h, levels) in [(32, 32, 3), (32, 32, 5), (37, 29, 4), (64, 20, 2)] {
        let p = common::random_plane(&mut rng, w, h);
        let pyr = dwt_multilevel(&p, levels).unwrap();
        for approx in [true, false] {
            let e = wavelet_energy_map(&pyr, approx).plane;
            let oracle = common::energy_map(&pyr, approx);
            for (a, b) in e.data().iter().zip(oracle.data()) {
                assert!((a - b).abs() <= 1e-9, "{w}x{h} L{levels}: {a} vs {b}");
            }
            assert!(e.data().iter().all(|&v| v >= 0.0));
        }
    }
}

#[test]
fn synthesis_reconstructs_odd_and_even_sizes() {
    let mut rng = common::rng(5);
    for _ in 0..60 {
        let w = rng.gen_range(2..=90);
        let h = rng.gen_range(2..=90);
        let p = common::random_plane(&mut rng, w, h);
        let levels = rng.gen_range(1..=max_levels(w, h).unwrap());
        let pyr = dwt_multilevel(&p, levels).unwrap();
        assert!(rms(&common::reconstruct(&pyr), &p) <= 1e-9);
        let e_in: f64 = p.data().iter().map(|v| v * v).sum();
        let e_out: f64 = pyr.subbands().flat_map(|b| b.data()).map(|v| v * v).sum();
        assert!((e_in - e_out).abs() <= 1e-9 * e_in);
    }
}

#[test]
fn single_level_matches_brute_force_filters() {
    let mut rng = common::rng(77);
    let p = common::random_plane(&mut rng, 10, 6);
    let pyr = dwt_multilevel(&p, 1).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let lo = [r, r];
    let hi = [r, -r];
    // convolve with the 2x2 separable kernel, stride 2
    let band = |fx: [f64; 2], fy: [f64; 2], x: usize, y: usize| -> f64 {
        let mut s = 0.0;
        for (j, wy) in fy.iter().enumerate() {
            for (i, wx) in fx.iter().enumerate() {
                s += wy * wx * p.get(2 * x + i, 2 * y + j);
            }
        }
        s
    };
    let d = &pyr.details[0];
    for y in 0..3 {
        for x in 0..5 {
            assert!((pyr.approximation.get(x, y) - band(lo, lo, x, y)).abs() < 1e-12);
            assert!((d.horizontal.get(x, y) - band(hi, lo, x, y)).abs() < 1e-12);
            assert!((d.vertical.get(x, y) - band(lo, hi, x, y)).abs() < 1e-12);
            assert!((d.diagonal.get(x, y) - band(hi, hi, x, y)).abs() < 1e-12);
        }
    }
}
