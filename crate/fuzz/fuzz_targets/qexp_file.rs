//! Series files: anything that parses must serialize, and the serialized
//! form must be the fixed point of parse-then-write.

#![no_main]

use galrep::format::{parse_qexp, write_qexp};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(series) = parse_qexp(text) else {
        return;
    };
    // The parser caps cyclotomic orders below the writer's limit, so a
    // parsed series always serializes.
    let canonical = write_qexp(&series).expect("parsed series serializes");
    let reparsed = parse_qexp(&canonical).expect("canonical text parses");
    assert_eq!(
        write_qexp(&reparsed).expect("canonical series serializes"),
        canonical,
        "canonical form is not write-stable"
    );
});
