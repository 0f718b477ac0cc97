#![no_main]

use libfuzzer_sys::fuzz_target;
use pdcontact::linalg::{read_matrix_market_str, write_matrix_market_to};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(a) = read_matrix_market_str(text) else { return };
    // whatever parses must survive a write/read cycle unchanged
    let mut buf = Vec::new();
    write_matrix_market_to(&a, &mut buf).unwrap();
    let back = read_matrix_market_str(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back, a);
});
