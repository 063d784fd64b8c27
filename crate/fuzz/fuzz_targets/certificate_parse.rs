//! Fuzzes the untrusted-certificate entry point: arbitrary bytes must never
//! panic the parser, and anything it accepts must survive an emit/parse
//! round trip unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cert) = conecert::certificate::parse_certificate(data) {
        let bytes = conecert::certificate::emit_json(&cert);
        let again = conecert::certificate::parse_certificate(&bytes)
            .expect("emitted certificates always reparse");
        assert_eq!(again, cert, "emit/parse must be idempotent");
        let csv = conecert::certificate::emit_csv(&cert);
        let lines = csv.iter().filter(|&&c| c == b'\n').count();
        assert_eq!(lines, cert.nodes.len() + 1, "one csv row per node plus header");
    }
});
