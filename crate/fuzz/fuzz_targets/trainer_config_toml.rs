#![no_main]

use libfuzzer_sys::fuzz_target;
use rl_presolve::trainer::TrainerConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = TrainerConfig::from_toml(text) else { return };
    let back = TrainerConfig::from_toml(&cfg.to_toml()).expect("serialized config parses");
    assert_eq!(back, cfg);
});
