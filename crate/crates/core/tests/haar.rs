use infoflux::state::{haar_orthogonal_pair, haar_orthogonal_qubit_pair, sample_stream};

const DRAWS: usize = 100_000;

#[test]
fn qubit_polar_cosine_is_uniform() {
    let mut rng = sample_stream(11, 0);
    let mut cosines: Vec<f64> = (0..DRAWS)
        .map(|_| {
            let (psi, _) = haar_orthogonal_qubit_pair(&mut rng);
            2.0 * psi.probability(0) - 1.0
        })
        .collect();
    cosines.sort_by(f64::total_cmp);
    let n = DRAWS as f64;
    let ks = cosines
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = (x + 1.0) / 2.0;
            (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max);
    // Asymptotic 1% critical value of the one-sample Kolmogorov-Smirnov test.
    let critical = 1.628 / n.sqrt();
    assert!(ks < critical, "KS statistic {ks} >= {critical}");
}

#[test]
fn qubit_overlap_with_zero_averages_one_half() {
    let mut rng = sample_stream(12, 0);
    let mean = (0..DRAWS)
        .map(|_| haar_orthogonal_qubit_pair(&mut rng).0.probability(0))
        .sum::<f64>()
        / DRAWS as f64;
    assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
}

#[test]
fn four_qubit_pairs_are_uniform_and_orthogonal() {
    let mut rng = sample_stream(13, 0);
    let draws = 20_000;
    let (mut first, mut second) = (0.0, 0.0);
    for _ in 0..draws {
        let (a, b) = haar_orthogonal_pair(4, &mut rng).unwrap();
        assert!(a.overlap(&b).norm() < 1e-12);
        first += a.probability(0);
        second += b.probability(0);
    }
    let (first, second) = (first / draws as f64, second / draws as f64);
    assert!((first - 1.0 / 16.0).abs() < 0.01, "{first}");
    assert!((second - 1.0 / 16.0).abs() < 0.01, "{second}");
}

#[test]
fn every_supported_size_gives_orthonormal_pairs() {
    for n_s in 1..=4 {
        for index in 0..2_000 {
            let (a, b) = haar_orthogonal_pair(n_s, &mut sample_stream(5, index)).unwrap();
            assert!(a.overlap(&b).norm() < 1e-12);
            assert!((a.overlap(&a).re - 1.0).abs() < 1e-12);
            assert!((b.overlap(&b).re - 1.0).abs() < 1e-12);
        }
    }
    assert!(haar_orthogonal_pair(0, &mut sample_stream(0, 0)).is_err());
    assert!(haar_orthogonal_pair(5, &mut sample_stream(0, 0)).is_err());
}

#[test]
fn distinct_streams_differ() {
    let a = haar_orthogonal_pair(2, &mut sample_stream(1, 0)).unwrap();
    let b = haar_orthogonal_pair(2, &mut sample_stream(1, 1)).unwrap();
    let c = haar_orthogonal_pair(2, &mut sample_stream(2, 0)).unwrap();
    assert_ne!(a, b);
    assert_ne!(a, c);
}
