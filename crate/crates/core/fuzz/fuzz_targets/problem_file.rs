#![no_main]

use libfuzzer_sys::fuzz_target;
use pdcontact::fem::{parse_problem, problem_to_bytes};

fuzz_target!(|data: &[u8]| {
    let Ok(p) = parse_problem(data) else { return };
    let back = parse_problem(&problem_to_bytes(&p, None).unwrap()).unwrap();
    assert_eq!(back.k(), p.k());
    assert_eq!(back.p(), p.p());
    assert_eq!(back.contact(), p.contact());
});
