#![no_main]

use libfuzzer_sys::fuzz_target;
use rl_presolve::env::trace;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(records) = trace::read_str(text) else { return };
    let mut out = Vec::new();
    trace::write(&mut out, &records).unwrap();
    let back = trace::read_str(std::str::from_utf8(&out).unwrap()).expect("written trace parses");
    assert_eq!(back, records);
});
