#![no_main]

use libfuzzer_sys::fuzz_target;
use vrpsim::benchmark::{parse_benchmark, BenchmarkFormat};

fuzz_target!(|data: &[u8]| {
    if let Ok(inst) = parse_benchmark(BenchmarkFormat::LiLim, data) {
        let _ = vrpsim::validate_instance(&inst);
    }
});
