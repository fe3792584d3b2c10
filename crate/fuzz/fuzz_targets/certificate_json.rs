#![no_main]

use davlab_core::construction::certificate::compute_digest;
use davlab_core::construction::{verify_document, CoverCertificate};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cert) = CoverCertificate::from_json(text) else {
        return;
    };
    let again = CoverCertificate::from_json(&cert.to_json()).expect("canonical output parses");
    assert_eq!(again, cert);
    let _ = compute_digest(&cert);
    if cert.params.p <= 100 && cert.params.k_total <= 8 {
        let _ = verify_document(&cert, None);
    }
});
