//! The Solomon parser must reject malformed input with an error, never
//! panic, and anything it accepts must survive validation and the codec.

#![no_main]

use libfuzzer_sys::fuzz_target;
use vrpsim::benchmark::{parse_benchmark, BenchmarkFormat};

fuzz_target!(|data: &[u8]| {
    if let Ok(inst) = parse_benchmark(BenchmarkFormat::Solomon, data) {
        let _ = vrpsim::validate_instance(&inst);
        if let Ok(encoded) = vrpsim::codec::encode_instance(&inst) {
            let decoded = vrpsim::codec::decode_instance(encoded.as_bytes())
                .expect("accepted instances round-trip");
            assert_eq!(decoded, inst);
        }
    }
});
