#![no_main]

use libfuzzer_sys::fuzz_target;
use rl_presolve::instancegen::Family;

// Input is `family\nparams`.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (name, params) = text.split_once('\n').unwrap_or((text, ""));
    if let Ok(f) = Family::parse(name, params) {
        f.validate().expect("parsed family is valid");
    }
});
