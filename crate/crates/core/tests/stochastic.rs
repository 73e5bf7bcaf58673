use odf_core::expsim::{rms, simulate_path_noise, simulate_scan, ScanModel};
use odf_core::PathNoiseModel;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

#[test]
fn slow_band_carries_most_variance() {
    let rate = 100.0;
    for seed in 0..10 {
        let model = PathNoiseModel {
            fast_amplitude: 0.0,
            seed,
            ..Default::default()
        };
        let series = simulate_path_noise(&model, 400.0, rate).unwrap().p_up;
        let n = series.len();
        let mut buf: Vec<Complex<f64>> = series.iter().map(|&v| Complex::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let (mut below, mut total) = (0.0, 0.0);
        for (k, c) in buf.iter().enumerate().skip(1) {
            let f = k.min(n - k) as f64 * rate / n as f64;
            let power = c.norm_sqr();
            total += power;
            if f <= model.slow_cutoff {
                below += power;
            }
        }
        let frac = below / total;
        assert!(frac >= 0.8, "seed {seed}: {frac}");
    }
}

#[test]
fn path_noise_bytes_are_reproducible() {
    let m = PathNoiseModel::default();
    let a = simulate_path_noise(&m, 50.0, 100.0).unwrap();
    let b = simulate_path_noise(&m, 50.0, 100.0).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.p_up), bits(&b.p_up));
    assert!((rms(&a.p_up) - m.target_rms).abs() < 1e-20);
}

#[test]
fn scans_are_parallel_safe() {
    let model = ScanModel::Precession {
        j_bar: 1.64e3,
        gamma: 100.0,
        tau: 500e-6,
    };
    let grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.16).collect();
    let serial = simulate_scan(&model, &grid, 500, 99).unwrap();
    let halves: Vec<_> = std::thread::scope(|s| {
        let lo = s.spawn(|| simulate_scan(&model, &grid, 500, 99).unwrap());
        let hi = s.spawn(|| simulate_scan(&model, &grid, 500, 99).unwrap());
        vec![lo.join().unwrap(), hi.join().unwrap()]
    });
    assert!(halves.iter().all(|d| *d == serial));
}
