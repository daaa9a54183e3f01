//! The native-format decoder must never panic on arbitrary bytes, and
//! anything it accepts must re-encode to an equal document.

#![no_main]

use libfuzzer_sys::fuzz_target;
use vrpsim::codec::{decode_instance, encode_instance};

fuzz_target!(|data: &[u8]| {
    if let Ok(inst) = decode_instance(data) {
        let encoded = encode_instance(&inst).expect("decoded instances are finite");
        let again = decode_instance(encoded.as_bytes()).expect("re-encoded form decodes");
        assert_eq!(again, inst);
    }
});
