use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_decay::iceberg::*;
use spectral_decay::io::{ravel, unravel};

/// `R(t) = (1/N) sum_x f(x - t) conj(f(x))` by the double loop.
fn direct_correlation(f: &[Complex64], side: usize, dim: usize) -> Vec<Complex64> {
    let n = f.len();
    (0..n)
        .map(|t| {
            let tc = unravel(t, side, dim);
            let sum: Complex64 = (0..n)
                .map(|x| {
                    let xc = unravel(x, side, dim);
                    let y: Vec<usize> = xc.iter().zip(&tc).map(|(a, b)| (a + side - b) % side).collect();
                    f[ravel(&y, side)] * f[x].conj()
                })
                .sum();
            sum / n as f64
        })
        .collect()
}

fn random_values(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), if complex { rng.random_range(-1.0..1.0) } else { 0.0 }))
        .collect()
}

fn thue_morse(len: usize) -> Vec<f64> {
    (0..len).map(|i: usize| if i.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 }).collect()
}

#[test]
fn morse_lift_is_thue_morse_up_to_two_to_the_twenty() {
    let tower = build_tower(&TowerSpec::new(1, 2, vec![2; 19])).unwrap();
    let rot = morse_rotations(&tower).unwrap();
    let f = CylindricFunction::from_real(&tower, 1, &[1.0, -1.0]).unwrap();
    let levels = lift_levels(&f, &tower, &rot, 20).unwrap();
    for (i, values) in levels.iter().enumerate() {
        let want = thue_morse(1 << (i + 1));
        assert!(values.iter().zip(&want).all(|(v, w)| v.re == *w && v.im == 0.0), "length 2^{}", i + 1);
    }
}

#[test]
fn fft_matches_direct_correlation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (dim, side) in [(1usize, 8usize), (1, 96), (1, 4096), (2, 8), (2, 12), (2, 64)] {
        for complex in [false, true] {
            let f = random_values(&mut rng, side.pow(dim as u32), complex);
            let fast = circular_correlation(&f, side, dim);
            let scale = fast[0].re;
            if side.pow(dim as u32) > 1024 {
                // Spot-check lags against the direct sum.
                for &t in &[0usize, 1, 7, side / 2, side - 1, 1234 % side.pow(dim as u32)] {
                    let tc = unravel(t, side, dim);
                    let want: Complex64 = (0..f.len())
                        .map(|x| {
                            let xc = unravel(x, side, dim);
                            let y: Vec<usize> = xc.iter().zip(&tc).map(|(a, b)| (a + side - b) % side).collect();
                            f[ravel(&y, side)] * f[x].conj()
                        })
                        .sum::<Complex64>()
                        / f.len() as f64;
                    assert!((fast[t] - want).norm() <= 1e-12 * scale, "d={dim} h={side} t={t}");
                }
            } else {
                let slow = direct_correlation(&f, side, dim);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() <= 1e-12 * scale, "d={dim} h={side}");
                }
            }
        }
    }
}

#[test]
fn descent_preserves_counting_measure() {
    for (dim, base, factors) in [(1, 3, vec![4, 5]), (2, 2, vec![3, 2]), (1, 6, vec![2, 7])] {
        let tower = build_tower(&TowerSpec::new(dim, base, factors)).unwrap();
        for seed in 0..3 {
            let rot = sample_rotations(&tower, seed);
            for n in 1..tower.levels() {
                let h = tower.height(n) as usize;
                let side = tower.height(n + 1) as usize;
                let mut counts = vec![0usize; tower.points(n)];
                for idx in 0..tower.points(n + 1) {
                    let x: Vec<u64> = unravel(idx, side, dim).into_iter().map(|c| c as u64).collect();
                    let y: Vec<usize> = descend(&tower, &rot, n, &x).into_iter().map(|c| c as usize).collect();
                    counts[ravel(&y, h)] += 1;
                }
                assert!(counts.iter().all(|&c| c == tower.coset_count(n)), "d={dim} level {n}");
            }
        }
    }
}

#[test]
fn two_dimensional_cosets() {
    let tower = build_tower(&TowerSpec::new(2, 2, vec![2])).unwrap();
    assert_eq!(tower.cosets(1), vec![vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]]);
}

#[test]
fn alpha_is_uniform_by_chi_square() {
    // Tower (5, 20): level-1 slots take values in [0, 5).
    let tower = build_tower(&TowerSpec::new(1, 5, vec![4])).unwrap();
    let seeds = 10_000u64;
    let mut counts = [0f64; 5];
    let mut pairs = Vec::with_capacity(seeds as usize);
    for seed in 0..seeds {
        let rot = sample_rotations(&tower, seed);
        counts[rot.alpha(1, 0)[0] as usize] += 1.0;
        pairs.push((rot.alpha(1, 0)[0] as f64, rot.alpha(1, 3)[0] as f64));
    }
    let expected = seeds as f64 / 5.0;
    let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
    // 99% quantile of chi-square with 4 degrees of freedom.
    assert!(chi2 < 13.277, "chi2 = {chi2}");

    let n = pairs.len() as f64;
    let (mx, my) = (pairs.iter().map(|p| p.0).sum::<f64>() / n, pairs.iter().map(|p| p.1).sum::<f64>() / n);
    let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
    let sx = (pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n).sqrt();
    let sy = (pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n).sqrt();
    assert!((cov / (sx * sy)).abs() < 0.05);
}

#[test]
fn coset_support_keeps_full_marginals_on_its_lattice() {
    let tower = build_tower(&TowerSpec::new(1, 8, vec![4])).unwrap();
    let mut counts = [0usize; 8];
    for seed in 0..4000 {
        counts[sample_rotations_with(&tower, seed, AlphaSupport::Coset).alpha(1, 2)[0] as usize] += 1;
    }
    for (v, c) in counts.iter().enumerate() {
        assert_eq!(*c > 0, v % 2 == 0, "value {v}");
    }
}

#[test]
fn explicit_out_of_range_is_rejected_through_json() {
    let doc = r#"{"tower":{"dimension":1,"base":2,"factors":[2]},
                  "rotations":{"provenance":{"kind":"explicit"},"values":[[[0],[2]]]}}"#;
    let parsed: IcebergDocument = serde_json::from_str(doc).unwrap();
    assert!(parsed.load().is_err());
}

fn small_case() -> impl Strategy<Value = (usize, u64, Vec<u64>, u64)> {
    prop_oneof![
        (Just(1usize), 2u64..6, proptest::collection::vec(2u64..4, 1..3), any::<u64>()),
        (Just(2usize), 2u64..4, proptest::collection::vec(2u64..3, 1..2), any::<u64>()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn correlation_invariants((dim, base, factors, seed) in small_case()) {
        let tower = build_tower(&TowerSpec::new(dim, base, factors)).unwrap();
        let top = tower.levels();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f0 = random_values(&mut rng, tower.points(1), seed % 2 == 0);
        let f = CylindricFunction::new(&tower, 1, f0).unwrap();
        let lifted = lift(&f, &tower, &sample_rotations(&tower, seed), top).unwrap();
        let r = correlation(&tower, top, &lifted).unwrap();
        let mean_sq = lifted.iter().map(|v| v.norm_sqr()).sum::<f64>() / lifted.len() as f64;
        prop_assert!((r.norm0() - mean_sq).abs() <= 1e-12 * mean_sq.max(1.0));
        prop_assert!(r.values()[0].im == 0.0 || r.values()[0].im.abs() <= 1e-15 * mean_sq);
        for v in r.values() {
            prop_assert!(v.norm() <= r.norm0() * (1.0 + 1e-12));
        }
        let s = spectral_density(&tower, top, &lifted).unwrap();
        prop_assert!(s.weights().iter().all(|&w| w >= -1e-10 * r.norm0()));
        prop_assert!((s.total() - r.norm0()).abs() <= 1e-10);
        for (a, b) in s.reconstruct().iter().zip(r.values()) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn correlation_is_shift_equivariant((dim, base, factors, seed) in small_case()) {
        let tower = build_tower(&TowerSpec::new(dim, base, factors)).unwrap();
        let level = tower.levels();
        let side = tower.height(level);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_values(&mut rng, tower.points(level), true);
        let base_corr = correlation(&tower, level, &f).unwrap();
        for s in 0..tower.points(level) {
            let shift: Vec<i64> = unravel(s, side as usize, dim).into_iter().map(|c| c as i64).collect();
            let shifted: Vec<Complex64> = (0..f.len())
                .map(|x| {
                    let xc: Vec<u64> = unravel(x, side as usize, dim).into_iter().map(|c| c as u64).collect();
                    let y: Vec<usize> = shift_at_level(&xc, &shift, side).into_iter().map(|c| c as usize).collect();
                    f[ravel(&y, side as usize)]
                })
                .collect();
            let c = correlation(&tower, level, &shifted).unwrap();
            for (a, b) in c.values().iter().zip(base_corr.values()) {
                prop_assert!((a - b).norm() <= 1e-12 * base_corr.norm0().max(1e-300));
            }
        }
    }

    #[test]
    fn rotations_round_trip_and_stay_in_range((dim, base, factors, seed) in small_case()) {
        let tower = build_tower(&TowerSpec::new(dim, base, factors)).unwrap();
        for support in [AlphaSupport::Full, AlphaSupport::Coset] {
            let rot = sample_rotations_with(&tower, seed, support);
            rot.validate(&tower).unwrap();
            let doc = IcebergDocument::new(&tower, rot.clone());
            let back: IcebergDocument = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
            prop_assert_eq!(back.load().unwrap().1, rot);
        }
    }
}
