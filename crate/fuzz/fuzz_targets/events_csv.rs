#![no_main]

use libfuzzer_sys::fuzz_target;
use relayfront::trace::read_events_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_events_csv(data);
});
