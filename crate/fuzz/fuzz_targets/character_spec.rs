//! Character specs: parse, write the canonical spelling, and require that
//! spelling to reparse to the same character and respell identically.

#![no_main]

use galrep::format::{parse_character_spec, write_character_spec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(chi) = parse_character_spec(text) else {
        return;
    };
    let canonical = write_character_spec(&chi);
    let reparsed = parse_character_spec(&canonical).expect("canonical spec parses");
    assert_eq!(reparsed, chi, "canonical spec changed the character");
    assert_eq!(
        write_character_spec(&reparsed),
        canonical,
        "canonical spec is not write-stable"
    );
});
