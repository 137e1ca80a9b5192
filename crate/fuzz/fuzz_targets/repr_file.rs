//! Representation files: parse, canonicalize, and require the canonical
//! form to be a fixed point.

#![no_main]

use galrep::format::{parse_repr, write_repr};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(source) = parse_repr(text) else {
        return;
    };
    let canonical = write_repr(&source).expect("parsed source serializes");
    let reparsed = parse_repr(&canonical).expect("canonical text parses");
    assert_eq!(
        write_repr(&reparsed).expect("canonical source serializes"),
        canonical,
        "canonical form is not write-stable"
    );
});
