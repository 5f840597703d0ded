#![no_main]

use active_walk::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        // anything accepted must survive a write/read cycle unchanged
        let again = parse_config(&serde_json::to_string(&cfg.to_json()).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
});
