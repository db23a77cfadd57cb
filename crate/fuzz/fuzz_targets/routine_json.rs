#![no_main]

use libfuzzer_sys::fuzz_target;
use rl_presolve::harness::Routine;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(r) = Routine::from_json(text) else { return };
    let back = Routine::from_json(&r.to_json()).expect("serialized routine parses");
    assert_eq!(back, r);
    let _ = r.effective_max_iterations();
});
