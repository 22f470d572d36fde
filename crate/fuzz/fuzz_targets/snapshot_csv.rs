#![no_main]

use libfuzzer_sys::fuzz_target;
use relayfront::trace::read_snapshot_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_snapshot_csv(1.0, data);
});
