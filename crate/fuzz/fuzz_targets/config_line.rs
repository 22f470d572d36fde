#![no_main]

use libfuzzer_sys::fuzz_target;
use relayfront::hysteresis::{parse_config_line, SimpleConfiguration};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    let _ = parse_config_line(line);
    if let Ok(c) = SimpleConfiguration::from_line(0.01, 0.25, line) {
        let back = SimpleConfiguration::from_line(0.01, 0.25, &c.to_line()).unwrap();
        assert_eq!(back, c);
    }
});
