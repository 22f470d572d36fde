//! Full schedule for x_lo = 0.01, x_hi = 0.25 against 40-digit reference values.

use relayfront::asymptotics::{run_algorithm, AlgorithmOptions, Case, StopReason};

// (case, s_tilde, s_n, y_n)
const REFERENCE: [(Case, f64, f64, f64); 10] = [
    (
        Case::A,
        2.1972245773362196,
        2.1972245773362196,
        0.4769362762044699,
    ),
    (
        Case::A,
        9.1308211313282778623,
        9.1308211313282778623,
        0.82953020516752596389,
    ),
    (
        Case::A,
        24.028662703132157031,
        24.028662703132157031,
        1.067311769627473398,
    ),
    (
        Case::A,
        53.33792984605065106,
        53.33792984605065106,
        1.2601972093263661702,
    ),
    (
        Case::A,
        108.35371231310494355,
        108.35371231310494355,
        1.4248039202135258631,
    ),
    (
        Case::A,
        209.35316294085097186,
        209.35316294085097186,
        1.5703733261220822697,
    ),
    (
        Case::B,
        395.12927126958273368,
        426.59523800861656015,
        1.6366106981721957102,
    ),
    (
        Case::B,
        743.99217621660806762,
        883.74113019605530251,
        1.6643917311154131274,
    ),
    (
        Case::B,
        1408.2217818530231025,
        1829.3230402948282082,
        1.678890641170792476,
    ),
    (
        Case::B,
        2690.0161963455886005,
        3784.7577857179244731,
        1.6864565937880105132,
    ),
];

#[test]
fn matches_high_precision_reference() {
    let start = std::time::Instant::now();
    let s = run_algorithm(0.01, 0.25, 1e4, 10, &AlgorithmOptions::default()).unwrap();
    eprintln!("schedule in {:?}", start.elapsed());
    assert_eq!(s.stop, StopReason::IndexLimit);
    assert_eq!(s.records.len(), 10);
    for (r, &(case, st, sn, yn)) in s.records.iter().zip(REFERENCE.iter()) {
        eprintln!(
            "n={} {} s~ {:.3e} s {:.3e} y {:.3e} res {:.1e}",
            r.n,
            r.case,
            (r.s_tilde - st).abs() / st,
            (r.s_n - sn).abs() / sn,
            (r.y_n - yn).abs() / yn,
            r.residual
        );
        assert_eq!(r.case, case, "n = {}", r.n);
        assert!((r.s_tilde - st).abs() < 1e-10 * st, "s_tilde_{}", r.n);
        assert!((r.s_n - sn).abs() < 1e-9 * sn, "s_{}", r.n);
        assert!((r.y_n - yn).abs() < 1e-9 * yn, "y_{}", r.n);
        assert!(r.residual.abs() < 1e-9);
        assert!(r.min_margin > -1e-9);
    }
    for w in s.records.windows(2) {
        assert!(w[1].s_n > w[0].s_n);
        assert!(w[1].s_half_n > w[0].s_n && w[1].s_half_n < w[1].s_tilde);
    }
}

#[test]
fn horizon_truncates_schedule() {
    let s = run_algorithm(0.01, 0.25, 100.0, 10, &AlgorithmOptions::default()).unwrap();
    assert_eq!(s.records.len(), 4);
    assert!(matches!(s.stop, StopReason::Horizon { n: 5, .. }));
}
