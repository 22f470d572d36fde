#![no_main]

use libfuzzer_sys::fuzz_target;
use relayfront::harness::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::parse(text) {
        // Accessors must fail cleanly, never panic.
        let _ = cfg.validate();
        let _ = cfg.d_list();
        let _ = cfg.tiers();
        assert_eq!(RunConfig::parse(&cfg.to_text()).ok().as_ref(), Some(&cfg));
    }
});
