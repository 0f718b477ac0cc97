#![no_main]

use libfuzzer_sys::fuzz_target;
use pdcontact::pdsolver::read_history_csv;

fuzz_target!(|data: &[u8]| {
    let _ = read_history_csv(data);
});
