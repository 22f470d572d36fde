#![no_main]

use libfuzzer_sys::fuzz_target;
use relayfront::asymptotics::io::{read_predictions_csv, read_schedule_csv, write_schedule_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_schedule_csv(data) {
        let mut buf = Vec::new();
        write_schedule_csv(&rows, &mut buf).unwrap();
        let back = read_schedule_csv(buf.as_slice()).unwrap();
        assert!(back.iter().zip(&rows).all(|(a, b)| a.same_as(b)) && back.len() == rows.len());
    }
    let _ = read_predictions_csv(data);
});
