#![no_main]

use libfuzzer_sys::fuzz_target;
use relayfront::harness::{read_convergence_csv, write_convergence_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(report) = read_convergence_csv(data) {
        let mut buf = Vec::new();
        write_convergence_csv(&report, &mut buf).unwrap();
        let back = read_convergence_csv(buf.as_slice()).unwrap();
        assert_eq!(back.rows.len(), report.rows.len());
        assert!(back.rows.iter().zip(&report.rows).all(|(a, b)| a.same_as(b)));
    }
});
