#![no_main]

use libfuzzer_sys::fuzz_target;
use relayfront::trace::read_trace_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_trace_csv(0.01, 0.25, data);
});
