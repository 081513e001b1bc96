use proptest::prelude::*;
use sparse_lms::signal::sample_variance;
use sparse_lms::{gen_ar1_input, gen_gaussian_noise, gen_sparse_system, regressor_at, RngStream, Signal};

fn lag1_autocorrelation(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let cov: f64 = xs.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    cov / var
}

#[test]
fn sparse_placement_is_uniform_and_signs_balanced() {
    let draws = 10_000;
    let mut hits = [0usize; 16];
    let (mut sum, mut count) = (0.0, 0usize);
    for stream in 0..draws {
        let w = gen_sparse_system(16, 4, &mut RngStream::new(2024, stream)).unwrap();
        assert_eq!(w.iter().filter(|&&t| t != 0.0).count(), 4);
        for (i, &t) in w.iter().enumerate() {
            if t != 0.0 {
                assert!(t == 1.0 || t == -1.0);
                hits[i] += 1;
                sum += t;
                count += 1;
            }
        }
    }
    for (i, &h) in hits.iter().enumerate() {
        let freq = h as f64 / draws as f64;
        assert!((freq - 0.25).abs() <= 0.02, "position {i}: {freq}");
    }
    assert!((sum / count as f64).abs() <= 0.05);
}

#[test]
fn ar1_correlation_matches_coefficient() {
    let x = gen_ar1_input(10_000, 0.8, 1e-3, &mut RngStream::new(77, 0)).unwrap();
    assert!((sample_variance(&x) - 1.0).abs() <= 1e-12);
    let r = lag1_autocorrelation(&x);
    assert!((r - 0.8).abs() <= 0.05, "lag-1 autocorrelation {r}");
}

#[test]
fn ar1_keeps_sample_mean() {
    // Rescaling only: the sign pattern, and so the mean's sign, survives.
    let a = gen_ar1_input(2000, 0.8, 1e-3, &mut RngStream::new(3, 3)).unwrap();
    let mut rng = RngStream::new(3, 3);
    let mut raw = Vec::new();
    let mut prev = 0.0;
    use rand_distr::{Distribution, Normal};
    let drive = Normal::new(0.0, 1e-3f64.sqrt()).unwrap();
    for _ in 0..2000 {
        prev = 0.8 * prev + drive.sample(&mut rng);
        raw.push(prev);
    }
    let scale = a[0] / raw[0];
    for (x, r) in a.iter().zip(&raw) {
        assert!((x - scale * r).abs() <= 1e-12 * scale.abs().max(1.0));
    }
}

#[test]
fn noise_moments() {
    let n = gen_gaussian_noise(100_000, 1e-2, &mut RngStream::new(5, 1)).unwrap();
    let mean = n.iter().sum::<f64>() / n.len() as f64;
    assert!((sample_variance(&n) - 0.01).abs() <= 0.0005);
    assert!(mean.abs() <= 0.001);
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let draw = |seed, stream| {
        let mut rng = RngStream::new(seed, stream);
        let w = gen_sparse_system(16, 8, &mut rng).unwrap();
        let x = gen_ar1_input(500, 0.8, 1e-3, &mut rng).unwrap();
        let n = gen_gaussian_noise(500, 1e-2, &mut rng).unwrap();
        (w, x, n)
    };
    assert_eq!(draw(1, 4), draw(1, 4));
    assert_ne!(draw(1, 4).1, draw(1, 5).1);
    assert_ne!(draw(1, 4).1, draw(2, 4).1);
}

#[test]
fn independent_streams_are_uncorrelated() {
    let a = gen_gaussian_noise(50_000, 1.0, &mut RngStream::new(8, 0)).unwrap();
    let b = gen_gaussian_noise(50_000, 1.0, &mut RngStream::new(8, 1)).unwrap();
    let corr = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>() / 50_000.0;
    // 4 sigma for N = 50 000
    assert!(corr.abs() < 4.0 / (50_000f64).sqrt());
}

proptest! {
    #[test]
    fn sparse_system_structure(n_taps in 1usize..64, frac in 0.0..1.0f64, seed: u64, stream: u64) {
        let k = 1 + ((n_taps - 1) as f64 * frac) as usize;
        let w = gen_sparse_system(n_taps, k, &mut RngStream::new(seed, stream)).unwrap();
        prop_assert_eq!(w.len(), n_taps);
        prop_assert_eq!(w.iter().filter(|&&t| t != 0.0).count(), k);
        prop_assert!(w.iter().all(|&t| t == 0.0 || t == 1.0 || t == -1.0));
    }

    #[test]
    fn ar1_variance_is_exactly_one(len in 2usize..3000, coeff in -0.99..0.99f64, seed: u64) {
        let x = gen_ar1_input(len, coeff, 1e-3, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert!((sample_variance(&x) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn regressor_windows_overlap(xs in prop::collection::vec(-10.0..10.0f64, 1..200), n in 1usize..20, pick in 0.0..1.0f64) {
        let x = Signal::new(xs.clone()).unwrap();
        let k = ((xs.len() - 1) as f64 * pick) as usize;
        let now = regressor_at(&x, k, n).unwrap();
        prop_assert_eq!(now.len(), n);
        prop_assert_eq!(now[0], xs[k]);
        if k >= 1 {
            let before = regressor_at(&x, k - 1, n).unwrap();
            prop_assert_eq!(&now[1..], &before[..n - 1]);
        }
        if k + 1 >= n {
            let literal: Vec<f64> = xs[k + 1 - n..=k].iter().rev().copied().collect();
            prop_assert_eq!(now.as_slice(), literal.as_slice());
        }
    }
}
