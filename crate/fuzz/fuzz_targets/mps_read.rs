#![no_main]

use libfuzzer_sys::fuzz_target;
use rl_presolve::mps;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(lp) = mps::read_str(text) else { return };
    lp.check_consistency().expect("parsed problem is consistent");
    // Whatever parses must survive a write/read cycle unchanged in shape.
    let back = mps::read_str(&mps::write_string(&lp)).expect("written MPS parses");
    assert_eq!(back.num_rows(), lp.num_rows());
    assert_eq!(back.num_cols(), lp.num_cols());
    assert_eq!(back.nnz(), lp.nnz());
});
