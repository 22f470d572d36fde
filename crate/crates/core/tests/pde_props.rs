use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relayfront::asymptotics::{run_algorithm, AlgorithmOptions};
use relayfront::hysteresis::{Sign, SimpleConfiguration, ThresholdDensity};
use relayfront::pde::{
    check_invariants, detect_steady_fronts, gaussian_tail_diagnostic, integrate, run,
    simulate_original, ModelParams, SystemState, U0Profile, Variables,
};
use relayfront::trace::Trace;

fn random_params(rng: &mut ChaCha8Rng, m: usize, t_end: f64) -> ModelParams {
    let x_lo = rng.gen_range(0.01..0.05);
    let x_hi = rng.gen_range(0.2..0.35);
    let d = 10f64.powf(rng.gen_range(-4.0..(3e-3f64).log10()));
    let mut p = ModelParams::with_defaults(x_lo, x_hi, d, t_end).unwrap();
    p.m = m;
    p.dt_max = relayfront::pde::default_dt_max(x_lo, x_hi, m, d);
    p.w0 = rng.gen_range(-0.9..0.9) * x_hi;
    p.v0 = rng.gen_range(0.0..0.2);
    if rng.gen_bool(0.5) {
        let f = rng.gen_range(x_lo + 0.01..x_hi - 0.01);
        let sign = if rng.gen_bool(0.5) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        p.r0 = SimpleConfiguration::from_fronts(x_lo, x_hi, vec![f], sign).unwrap();
    }
    p
}

fn sup_distance_from_uniform(density: &ThresholdDensity, level: f64) -> f64 {
    density
        .values()
        .iter()
        .map(|u| (u - level).abs())
        .fold(0.0, f64::max)
}

fn event_near(trace: &Trace, t0: f64, t1: f64) -> bool {
    trace.events.iter().any(|e| e.t >= t0 && e.t <= t1)
}

#[test]
fn transformed_and_original_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let p = random_params(&mut rng, 200, 10.0);
        let a = integrate(&p).unwrap();
        let b = simulate_original(&p).unwrap();
        let tol = 10.0 * (p.dt_max + (p.x_hi - p.x_lo).powi(2) / (p.m * p.m) as f64);
        assert_eq!(a.rows.len(), b.rows.len());
        for (i, (ra, rb)) in a.rows.iter().zip(&b.rows).enumerate() {
            assert_eq!(ra.t, rb.t);
            assert!(
                (ra.v - rb.v).abs() <= tol && (ra.w - rb.w).abs() <= tol,
                "t={} {:?} vs {:?}",
                ra.t,
                ra,
                rb
            );
            let lo = a.rows[i.saturating_sub(1)].t;
            let hi = a.rows.get(i + 1).map_or(ra.t, |r| r.t);
            if !event_near(&a, lo, hi) && !event_near(&b, lo, hi) {
                let (ca, cb) = (&ra.config, &rb.config);
                assert_eq!(
                    (ca.rightmost(), ca.fronts().len()),
                    (cb.rightmost(), cb.fronts().len()),
                    "t={}",
                    ra.t
                );
                assert!(ca
                    .fronts()
                    .iter()
                    .zip(cb.fronts())
                    .all(|(x, y)| (x - y).abs() <= tol));
            }
        }
    }
}

#[test]
fn theorem_bounds_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let p = random_params(&mut rng, 200, 10.0);
        let tr = integrate(&p).unwrap();
        let rep = check_invariants(&tr, &p);
        assert!(rep.ok(), "{:?}", rep.violations);
    }
    let mut p = ModelParams::with_defaults(0.01, 0.25, 1e-3, 10.0).unwrap();
    p.m = 200;
    let tr = integrate(&p).unwrap();
    for r in &tr.rows {
        assert!(r.v <= p.v0 * (-r.t / 4.0).exp() * (1.0 + 1e-6));
    }
}

#[test]
fn event_log_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_params(&mut rng, 150, 8.0);
    let a = integrate(&p).unwrap();
    let b = integrate(&p).unwrap();
    assert!(!a.events.is_empty());
    assert_eq!(a.events.len(), b.events.len());
    for (x, y) in a.events.iter().zip(&b.events) {
        assert_eq!(
            (x.kind, x.t.to_bits(), x.x.to_bits()),
            (y.kind, y.t.to_bits(), y.x.to_bits())
        );
    }
}

#[test]
fn without_nutrient_density_flattens() {
    let mut p = ModelParams::with_defaults(0.01, 0.25, 1e-3, 20.0).unwrap();
    p.v0 = 0.0;
    p.w0 = 0.0;
    p.m = 100;
    p.dt_max = 1e-2;
    p.snapshot_times = vec![1.0, 4.0, 20.0];
    let (tr, state) = run(&p, Variables::Transformed).unwrap();
    assert!(tr.rows.iter().all(|r| r.w == 0.0 && r.v == 0.0));
    let level = 1.0 / (p.x_hi - p.x_lo);
    let dist: Vec<f64> = tr
        .snapshots
        .iter()
        .map(|s| s.u.iter().map(|u| (u - level).abs()).fold(0.0, f64::max))
        .collect();
    assert!(dist.windows(2).all(|w| w[1] < w[0]), "{dist:?}");
    assert!((state.total_mass() - 1.0).abs() < 1e-10 * p.t_end);

    let (_, orig) = run(&p, Variables::Original).unwrap();
    assert_eq!(orig.nutrients, Some((0.0, 0.0)));
    assert!(sup_distance_from_uniform(&orig.density, level) < dist[0]);
}

#[test]
fn balanced_configuration_keeps_nutrients_symmetric() {
    let (x_lo, x_hi) = (0.01, 0.25);
    let mut p = ModelParams::with_defaults(x_lo, x_hi, 1e-3, 5.0).unwrap();
    p.u0 = U0Profile::Uniform;
    p.w0 = 0.0;
    p.m = 100;
    p.r0 = SimpleConfiguration::from_fronts(x_lo, x_hi, vec![0.5 * (x_lo + x_hi)], Sign::Plus)
        .unwrap();
    let tr = simulate_original(&p).unwrap();
    for r in &tr.rows {
        // f_1 - f_{-1} = 2 w v
        assert!(
            (2.0 * r.w * r.v).abs() < 1e-12,
            "t={} w={} v={}",
            r.t,
            r.w,
            r.v
        );
    }
}

#[test]
fn gaussian_diagnostic_behaves() {
    let (x_lo, x_hi, d, t) = (0.01, 0.25, 1e-3, 2.0);
    let p = ModelParams::with_defaults(x_lo, x_hi, d, 4.0).unwrap();
    let mut state = SystemState::initial(&p, Variables::Transformed).unwrap();
    state.t = t;
    let kernel = |m: usize| {
        ThresholdDensity::from_fn(x_lo, x_hi, m, |x| {
            (-(x_hi - x).powi(2) / (4.0 * d * t)).exp() / (std::f64::consts::PI * d * t).sqrt()
        })
        .unwrap()
    };
    let mut errs = Vec::new();
    for m in [100, 200, 400] {
        let mut pm = p.clone();
        pm.m = m;
        state.density = kernel(m);
        let (diag, in_window) = gaussian_tail_diagnostic(&state, &pm).unwrap();
        assert!(in_window);
        errs.push(diag);
    }
    assert!(errs[0] < 1e-3, "{errs:?}");
    assert!(
        errs[2] < errs[1] / 3.0 && errs[1] < errs[0] / 3.0,
        "{errs:?}"
    );

    state.density = ThresholdDensity::from_fn(x_lo, x_hi, 400, |_| 1.0 / (x_hi - x_lo)).unwrap();
    assert!(gaussian_tail_diagnostic(&state, &p).unwrap().0 > 0.1);

    state.t = 0.1;
    assert!(!gaussian_tail_diagnostic(&state, &p).unwrap().1);

    let mut q = p.clone();
    q.v0 = 0.0;
    q.w0 = 0.0;
    q.m = 100;
    let mut diags = Vec::new();
    for t_end in [2.0, 8.0, 30.0] {
        q.t_end = t_end;
        q.sample_dt = t_end / 10.0;
        let (_, s) = run(&q, Variables::Transformed).unwrap();
        diags.push(gaussian_tail_diagnostic(&s, &q).unwrap().0);
    }
    assert!(diags.windows(2).all(|w| w[1] > w[0]), "{diags:?}");
}

#[test]
fn grid_refinement_contracts() {
    let sched = run_algorithm(0.01, 0.25, 1e4, 3, &AlgorithmOptions::default()).unwrap();
    let t_end = sched.records[2].s_half_n;
    let fronts: Vec<Vec<(f64, f64)>> = [100, 200, 400]
        .iter()
        .map(|&m| {
            let mut p = ModelParams::with_defaults(0.01, 0.25, 1e-3, t_end).unwrap();
            p.m = m;
            p.dt_max = relayfront::pde::default_dt_max(0.01, 0.25, m, 1e-3);
            detect_steady_fronts(&integrate(&p).unwrap()).unwrap()
        })
        .collect();
    for n in 0..2 {
        let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs().max((a.1 - b.1).abs());
        let d1 = dist(fronts[0][n], fronts[1][n]);
        let d2 = dist(fronts[1][n], fronts[2][n]);
        eprintln!("front {}: changes {d1:e} then {d2:e}", n + 1);
        assert!(d2 < 4.0 * d1, "front {}: {d1:e} then {d2:e}", n + 1);
    }
}
