#![no_main]

use libfuzzer_sys::fuzz_target;
use pdcontact::verify::SoclcpManifest;

fuzz_target!(|data: &[u8]| {
    let _ = SoclcpManifest::parse(data);
});
