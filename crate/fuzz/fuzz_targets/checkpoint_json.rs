#![no_main]

use libfuzzer_sys::fuzz_target;
use rl_presolve::policy::Checkpoint;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(ck) = Checkpoint::from_json(text) else { return };
    // A validated checkpoint must be usable without panicking.
    let obs = vec![0.0; ck.agent.actor.input_dim()];
    if let Ok(d) = ck.agent.distribution(&obs) {
        let _ = d.greedy(ck.agent.sequence_cap());
    }
});
