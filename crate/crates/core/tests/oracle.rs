use afc_core::oracle::{
    backward_protocol, empirical_gamma, fourier_sum, simulate_backward_retrieval, simulate_storage,
    AtomGrid, InputPulse,
};
use afc_core::response::{compensation_params, gaussian_response_closed};
use afc_core::retrieval::gamma_closed;
use afc_core::{CombSpec, Complex64, Error, LineShape};

fn gaussian_comb(b: f64) -> CombSpec {
    CombSpec::new(LineShape::gaussian(1.0).unwrap(), LineShape::gaussian(b).unwrap(), 0.15)
        .unwrap()
        .0
}

fn peak_in(x: &[Complex64], t: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    x.iter()
        .zip(t)
        .filter(|(_, t)| **t >= lo && **t <= hi)
        .map(|(v, t)| (*t, v.norm()))
        .fold((0.0, 0.0), |best, c| if c.1 > best.1 { c } else { best })
}

#[test]
fn vacuum_passes_the_pulse_untouched() {
    let atoms = AtomGrid::vacuum(100).unwrap();
    let pulse = InputPulse::new(1.0, 5.0).unwrap();
    let rec = simulate_storage(&atoms, &pulse, 0.05, 20.0).unwrap();
    assert_eq!(rec.input, rec.transmitted);
    assert!(rec.coherences.is_empty());
    let ret = simulate_backward_retrieval(&atoms, &rec, 30.0).unwrap();
    assert!(ret.retrieved.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn single_line_center_transmission() {
    let atoms = AtomGrid::line(&LineShape::gaussian(0.5).unwrap(), 0.005, 100, 2.0).unwrap();
    let pulse = InputPulse::new(2.0, 5.0).unwrap();
    let dt = 0.02f64.min(atoms.max_step());
    let rec = simulate_storage(&atoms, &pulse, dt, 80.0).unwrap();
    let t_in = fourier_sum(&rec.times, &rec.input, dt, 0.0, 0.0);
    let t_out = fourier_sum(&rec.times, &rec.transmitted, dt, 0.0, 0.0);
    let t = (t_out / t_in).norm_sqr();
    assert!((t / (-2f64).exp() - 1.0).abs() < 0.02, "{t}");
}

#[test]
fn comb_transmission_follows_the_coarse_grained_depth() {
    let comb = gaussian_comb(0.015);
    assert!((comb.finesse() - 10.0).abs() < 1e-12);
    let atoms = AtomGrid::comb(&comb, 8, 200, 2.0).unwrap();
    let pulse = InputPulse::new(2.0, 5.0).unwrap();
    // stop well before the first revival so only the prompt pulse is seen
    let rec = simulate_storage(&atoms, &pulse, 0.02, 25.0).unwrap();
    for i in -20..=20 {
        let w = i as f64 * 0.05;
        let t_in = fourier_sum(&rec.times, &rec.input, 0.02, w, 0.0);
        let t_out = fourier_sum(&rec.times, &rec.transmitted, 0.02, w, 0.0);
        let expected = (-2.0 * gaussian_response_closed(w).0).exp();
        let got = (t_out / t_in).norm_sqr();
        assert!((got / expected - 1.0).abs() < 0.03, "ω = {w}: {got} vs {expected}");
    }
}

#[test]
fn forward_bursts_revive_with_the_tooth_weighting() {
    let comb = gaussian_comb(0.015);
    let t_rev = comb.revival_time();
    let atoms = AtomGrid::comb(&comb, 8, 100, 0.02).unwrap();
    let pulse = InputPulse::new(2.0, 5.0).unwrap();
    let dt = 0.02;
    let rec = simulate_storage(&atoms, &pulse, dt, 2.0 * t_rev + 15.0).unwrap();
    let (t1, a1) = peak_in(&rec.transmitted, &rec.times, 5.0 + 0.5 * t_rev, 5.0 + 1.5 * t_rev);
    let (t2, a2) = peak_in(&rec.transmitted, &rec.times, 5.0 + 1.5 * t_rev, 5.0 + 2.5 * t_rev);
    assert!((t1 - (5.0 + t_rev)).abs() <= dt, "{t1}");
    assert!((t2 - (5.0 + 2.0 * t_rev)).abs() <= dt, "{t2}");
    let expected = comb.tooth.fourier(2.0 * t_rev).re / comb.tooth.fourier(t_rev).re;
    assert!((a2 / a1 / expected - 1.0).abs() < 0.05, "{} vs {expected}", a2 / a1);
}

#[test]
fn narrowband_retrieval_matches_the_center_efficiency() {
    let comb = CombSpec::new(
        LineShape::rectangular(1.0).unwrap(),
        LineShape::gaussian(1.0 / 320.0).unwrap(),
        1.0 / 32.0,
    )
    .unwrap()
    .0;
    let pulse = InputPulse::new(0.1, 3.0 * 27.8).unwrap();
    let atoms = AtomGrid::comb(&comb, 8, 200, 5.0).unwrap();
    let dt = 0.2f64.min(atoms.max_step());
    let t1 = pulse.center + 3.0 * pulse.duration() + 1.0;
    let (_, _, budget) = backward_protocol(&atoms, &pulse, dt, t1, comb.revival_time() + 2.0 * pulse.center).unwrap();
    let expected = gamma_closed(5.0, 0.0).norm_sqr() * comb.dephasing().norm_sqr();
    assert!((budget.efficiency() / expected - 1.0).abs() < 0.02, "{}", budget.efficiency());
    assert!(budget.closure() < 1e-3);
}

#[test]
fn tooth_width_sweep_follows_the_finesse_law() {
    let pulse = InputPulse::new(2.0, 5.0).unwrap();
    let run = |b: f64| {
        let comb = gaussian_comb(b);
        let atoms = AtomGrid::comb(&comb, 8, 200, 2.0).unwrap();
        let t = comb.revival_time();
        let (_, _, budget) = backward_protocol(&atoms, &pulse, 0.02, 0.5 * (10.0 + t), t + 15.0).unwrap();
        (budget.retrieved, comb.dephasing().norm_sqr())
    };
    let (e1, k1) = run(0.015);
    let (e2, k2) = run(0.03);
    assert!(((e2 / e1) / (k2 / k1) - 1.0).abs() < 0.02);
}

#[test]
fn compensated_comb_has_a_flat_retrieval_phase() {
    let comb = CombSpec::new(
        LineShape::rectangular(1.0).unwrap(),
        LineShape::gaussian(1.0 / 160.0).unwrap(),
        1.0 / 16.0,
    )
    .unwrap()
    .0;
    let design = compensation_params(0.01);
    let pulse = InputPulse::new(0.4, 15.0).unwrap();
    let omegas: Vec<f64> = (-30..=30).map(|i| i as f64 * 0.01).collect();
    let max_phase = |atoms: AtomGrid| {
        let t = comb.revival_time();
        let dt = 0.04f64.min(atoms.max_step());
        let (rec, ret, budget) = backward_protocol(&atoms, &pulse, dt, 0.5 * (30.0 + t), t + 40.0).unwrap();
        assert!(budget.closure() < 1e-3);
        let g = empirical_gamma(&atoms, &rec, &ret, comb.dephasing(), &omegas).unwrap();
        g.gamma.iter().map(|z| z.expect("probe covers the band").arg().abs()).fold(0.0, f64::max)
    };
    let mafc = max_phase(AtomGrid::mafc(&comb, &design, 8, 0.3, 200, 5.0).unwrap());
    let afc = max_phase(AtomGrid::comb(&comb, 8, 200, 5.0).unwrap());
    assert!(mafc <= 0.05, "{mafc}");
    assert!(afc > 5.0 * mafc, "{afc}");
}

#[test]
fn parallel_runs_agree_bitwise() {
    let comb = gaussian_comb(0.015);
    let atoms = AtomGrid::comb(&comb, 8, 100, 2.0).unwrap();
    let pulse = InputPulse::new(2.0, 5.0).unwrap();
    let t = comb.revival_time();
    let go = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| backward_protocol(&atoms, &pulse, 0.02, 25.0, t + 10.0).unwrap())
    };
    let (r1, q1, b1) = go(1);
    let (r4, q4, b4) = go(4);
    assert_eq!(r1, r4);
    assert_eq!(q1, q4);
    assert_eq!(b1, b4);
}

#[test]
fn invalid_protocols_are_rejected() {
    let comb = gaussian_comb(0.015);
    let atoms = AtomGrid::comb(&comb, 8, 100, 1.0).unwrap();
    let pulse = InputPulse::new(2.0, 5.0).unwrap();
    assert!(matches!(simulate_storage(&atoms, &pulse, 1.0, 20.0), Err(Error::Stability(_))));
    let early = simulate_storage(&atoms, &pulse, 0.02, 6.0).unwrap();
    assert!(matches!(simulate_backward_retrieval(&atoms, &early, 50.0), Err(Error::Protocol(_))));
    let late = simulate_storage(&atoms, &pulse, 0.02, comb.revival_time() + 1.0).unwrap();
    assert!(matches!(simulate_backward_retrieval(&atoms, &late, 80.0), Err(Error::Protocol(_))));
    let ok = simulate_storage(&atoms, &pulse, 0.02, 20.0).unwrap();
    assert!(matches!(simulate_backward_retrieval(&atoms, &ok, 20.0), Err(Error::Protocol(_))));
    assert!(AtomGrid::comb(&comb, 8, 50, 1.0).is_err());
}
