#![no_main]

use libfuzzer_sys::fuzz_target;
use pdcontact::pdsolver::SolutionFile;

fuzz_target!(|data: &[u8]| {
    let Ok(f) = SolutionFile::parse(data) else { return };
    let back = SolutionFile::parse(&f.to_bytes().unwrap()).unwrap();
    assert_eq!(back.du, f.du);
    assert_eq!(back.r, f.r);
});
