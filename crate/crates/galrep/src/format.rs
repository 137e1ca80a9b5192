//! Line-oriented text formats for series files, representation files, and
//! character specs.
//!
//! Both file formats share the same skeleton: a fixed sequence of
//! `key: value` header lines, then one data line per index. Lines that are
//! blank or whose first non-space character is `#` are skipped anywhere;
//! everything else must appear exactly where the grammar expects it, in
//! order, with no unknown keys and no trailing content. Writers emit the
//! canonical form, and parsing what a writer produced gives back an equal
//! value.
//!
//! A character spec is a single token usable both in file headers and on
//! the command line: `modulus; m^e,m^e,...` lists one image per generator
//! of the unit group, the image being the `e`-th power of a root of unity
//! of order `m`. `1;` and `2;` have empty lists.
//!
//! Parsers are meant to face untrusted bytes, so sizes are capped: numbers
//! at [`MAX_DIGITS`] digits, cyclotomic orders in files at
//! [`MAX_FILE_ORDER`], eigenvalue table spans at [`MAX_TABLE_SPAN`], and
//! nothing is preallocated from header-declared counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::arith::primes;
use crate::arith::{CycloElement, FieldDescriptor, Rational};
use crate::characters::{char_make, DirichletCharacter};
use crate::error::{Error, Result};
use crate::qexp::{Coefficients, QExpansion};
use crate::repr::{EigenTable, EigenformData, ReducibleData, ReprSource};

/// Largest cyclotomic order accepted in a file.
pub const MAX_FILE_ORDER: u64 = 4096;

/// Largest digit count accepted for one integer token.
pub const MAX_DIGITS: usize = 4096;

/// Largest `primes-to` declaration accepted in an eigenform file.
pub const MAX_TABLE_SPAN: u64 = 1 << 20;

/// Cursor over content lines: 1-based numbering, comments and blank lines
/// skipped, one line of lookahead for optional keys.
struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    peeked: Option<(usize, &'a str)>,
    // Number of the last raw line consumed; missing-line errors point one
    // past it, where the absent content should have been.
    consumed: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        Lines {
            iter: text.lines().enumerate(),
            peeked: None,
            consumed: 0,
        }
    }

    fn end_position(&self) -> usize {
        self.consumed + 1
    }

    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        if let Some(held) = self.peeked.take() {
            return Some(held);
        }
        for (i, raw) in self.iter.by_ref() {
            self.consumed = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((i + 1, line));
        }
        None
    }

    fn peek_content(&mut self) -> Option<(usize, &'a str)> {
        if self.peeked.is_none() {
            self.peeked = self.next_content();
        }
        self.peeked
    }

    /// The value of the next line, which must carry exactly `key`.
    fn expect_key(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (line, content) = match self.next_content() {
            Some(found) => found,
            None => {
                return Err(Error::parse(
                    self.end_position(),
                    format!("missing '{key}' line"),
                ))
            }
        };
        match split_key(content) {
            Some((k, v)) if k == key => Ok((line, v)),
            Some((k, _)) => Err(Error::parse(
                line,
                format!("expected key '{key}', found '{k}'"),
            )),
            None => Err(Error::parse(line, format!("expected '{key}: ...'"))),
        }
    }

    /// The value of the next line if it carries `key`; the line is left in
    /// place otherwise.
    fn take_key(&mut self, key: &str) -> Option<(usize, &'a str)> {
        let (line, content) = self.peek_content()?;
        match split_key(content) {
            Some((k, v)) if k == key => {
                self.peeked = None;
                Some((line, v))
            }
            _ => None,
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        match self.peek_content() {
            None => Ok(()),
            Some((line, content)) => Err(Error::parse(
                line,
                format!("unexpected content '{content}'"),
            )),
        }
    }
}

fn split_key(content: &str) -> Option<(&str, &str)> {
    let (k, v) = content.split_once(':')?;
    Some((k.trim_end(), v.trim()))
}

fn parse_u64(tok: &str, line: usize, what: &str) -> Result<u64> {
    let tok = tok.trim();
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(line, format!("{what}: expected an integer, got '{tok}'")));
    }
    if tok.len() > MAX_DIGITS {
        return Err(Error::parse(line, format!("{what}: integer too long")));
    }
    tok.parse::<u64>()
        .map_err(|_| Error::parse(line, format!("{what}: {tok} does not fit in 64 bits")))
}

fn parse_bigint(tok: &str, line: usize, what: &str) -> Result<BigInt> {
    let tok = tok.trim();
    let digits = tok.strip_prefix('-').unwrap_or(tok);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(line, format!("{what}: expected an integer, got '{tok}'")));
    }
    if digits.len() > MAX_DIGITS {
        return Err(Error::parse(line, format!("{what}: integer too long")));
    }
    Ok(tok.parse::<BigInt>().expect("checked digit string"))
}

fn parse_rational(tok: &str, line: usize) -> Result<Rational> {
    let tok = tok.trim();
    let (num, den) = tok
        .split_once('/')
        .ok_or_else(|| Error::parse(line, format!("expected 'num/den', got '{tok}'")))?;
    let num = parse_bigint(num, line, "numerator")?;
    let den = parse_bigint(den, line, "denominator")?;
    if den <= BigInt::from(0) {
        return Err(Error::parse(line, "denominator must be positive"));
    }
    Ok(Rational::new(num, den))
}

/// The bracketed list inside `[...]`, split on commas; empty for `[]`.
fn bracket_items(tok: &str, line: usize) -> Result<Vec<&str>> {
    let inner = tok
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::parse(line, format!("expected '[...]', got '{tok}'")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').collect())
}

fn parse_cyclo_value(tok: &str, line: usize) -> Result<CycloElement> {
    let tok = tok.trim();
    let (list, order) = tok
        .rsplit_once('@')
        .ok_or_else(|| Error::parse(line, format!("expected '[...]@m', got '{tok}'")))?;
    let order = parse_u64(order, line, "cyclotomic order")?;
    if order == 0 {
        return Err(Error::parse(line, "cyclotomic order must be positive"));
    }
    if order > MAX_FILE_ORDER {
        return Err(Error::parse(
            line,
            format!("cyclotomic order {order} exceeds the file cap {MAX_FILE_ORDER}"),
        ));
    }
    let coeffs = bracket_items(list, line)?
        .iter()
        .map(|item| parse_rational(item, line))
        .collect::<Result<Vec<_>>>()?;
    CycloElement::from_coeffs(order, coeffs)
        .map_err(|e| Error::parse(line, format!("bad cyclotomic value: {e}")))
}

fn parse_field_value(tok: &str, line: usize, desc: &FieldDescriptor) -> Result<crate::arith::FieldElement> {
    let coords = bracket_items(tok.trim(), line)?
        .iter()
        .map(|item| parse_u64(item, line, "coordinate"))
        .collect::<Result<Vec<_>>>()?;
    desc.element(coords)
        .map_err(|e| Error::parse(line, format!("bad field element: {e}")))
}

/// `5 1` or `5 2 [2,4,1]`: characteristic, degree, and for extensions the
/// monic modulus polynomial by ascending power.
fn parse_field_descriptor(tok: &str, line: usize) -> Result<FieldDescriptor> {
    let mut parts = tok.split_whitespace();
    let ell = parse_u64(
        parts.next().ok_or_else(|| Error::parse(line, "missing characteristic"))?,
        line,
        "characteristic",
    )?;
    let degree = parse_u64(
        parts.next().ok_or_else(|| Error::parse(line, "missing degree"))?,
        line,
        "degree",
    )?;
    let modulus = parts.next();
    if parts.next().is_some() {
        return Err(Error::parse(line, "trailing tokens after field description"));
    }
    match (degree, modulus) {
        (0, _) => Err(Error::parse(line, "degree must be positive")),
        (1, None) => FieldDescriptor::prime_field(ell)
            .map_err(|e| Error::parse(line, format!("bad field: {e}"))),
        (1, Some(_)) => Err(Error::parse(line, "degree 1 takes no modulus polynomial")),
        (_, None) => Err(Error::parse(line, "extension fields need a modulus polynomial")),
        (_, Some(m)) => {
            let coeffs = bracket_items(m, line)?
                .iter()
                .map(|item| parse_u64(item, line, "modulus coefficient"))
                .collect::<Result<Vec<_>>>()?;
            if coeffs.len() as u64 != degree + 1 {
                return Err(Error::parse(
                    line,
                    format!("modulus polynomial needs {} coefficients", degree + 1),
                ));
            }
            FieldDescriptor::with_modulus(ell, &coeffs)
                .map_err(|e| Error::parse(line, format!("bad field: {e}")))
        }
    }
}

fn write_field_descriptor(desc: &FieldDescriptor) -> String {
    match desc.modulus() {
        None => format!("{} 1", desc.ell()),
        Some(m) => {
            let coeffs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
            format!("{} {} [{}]", desc.ell(), desc.degree(), coeffs.join(","))
        }
    }
}

fn parse_character_at(tok: &str, line: usize) -> Result<DirichletCharacter> {
    let (modulus, images) = tok
        .split_once(';')
        .ok_or_else(|| Error::parse(line, format!("expected 'modulus; images', got '{tok}'")))?;
    let modulus = parse_u64(modulus, line, "character modulus")?;
    let images = images.trim();
    let mut pairs = Vec::new();
    if !images.is_empty() {
        for item in images.split(',') {
            let (m, e) = item
                .trim()
                .split_once('^')
                .ok_or_else(|| Error::parse(line, format!("expected 'm^e', got '{item}'")))?;
            pairs.push((
                parse_u64(m, line, "image order")?,
                parse_u64(e, line, "image exponent")?,
            ));
        }
    }
    char_make(modulus, &pairs)
}

/// Parse a standalone character spec such as `5; 4^1` or `1;`.
pub fn parse_character_spec(tok: &str) -> Result<DirichletCharacter> {
    parse_character_at(tok.trim(), 1)
}

/// Canonical spec for a character: `modulus; m^e,...` by generator order.
pub fn write_character_spec(chi: &DirichletCharacter) -> String {
    let images: Vec<String> = chi
        .images()
        .iter()
        .map(|(m, e)| format!("{m}^{e}"))
        .collect();
    if images.is_empty() {
        format!("{};", chi.modulus())
    } else {
        format!("{}; {}", chi.modulus(), images.join(","))
    }
}

enum DomainSpec {
    Rational,
    Cyclo(u64),
    Field(FieldDescriptor),
}

fn parse_domain(tok: &str, line: usize) -> Result<DomainSpec> {
    let tok = tok.trim();
    if tok == "rational" {
        return Ok(DomainSpec::Rational);
    }
    if let Some(rest) = tok.strip_prefix("cyclotomic ") {
        let order = parse_u64(rest, line, "cyclotomic order")?;
        if order == 0 || order > MAX_FILE_ORDER {
            return Err(Error::parse(
                line,
                format!("cyclotomic order must be in 1..={MAX_FILE_ORDER}"),
            ));
        }
        return Ok(DomainSpec::Cyclo(order));
    }
    if let Some(rest) = tok.strip_prefix("field ") {
        return Ok(DomainSpec::Field(parse_field_descriptor(rest, line)?));
    }
    Err(Error::parse(line, format!("unknown domain '{tok}'")))
}

/// Read one `index: value` data line and check the index is the expected
/// one.
fn data_line<'a>(lines: &mut Lines<'a>, expected: u64, what: &str) -> Result<(usize, &'a str)> {
    let (line, content) = match lines.next_content() {
        Some(found) => found,
        None => {
            return Err(Error::parse(
                lines.end_position(),
                format!("missing {what} line for index {expected}"),
            ))
        }
    };
    let (idx, value) = split_key(content)
        .ok_or_else(|| Error::parse(line, format!("expected '{expected}: ...'")))?;
    let idx = parse_u64(idx, line, "index")?;
    if idx != expected {
        return Err(Error::parse(
            line,
            format!("indices must ascend without gaps: expected {expected}, found {idx}"),
        ));
    }
    Ok((line, value))
}

/// Parse a series file.
pub fn parse_qexp(text: &str) -> Result<QExpansion> {
    let mut lines = Lines::new(text);
    let (line, v) = lines.expect_key("format")?;
    if v != "qexp-v1" {
        return Err(Error::parse(line, format!("unsupported format '{v}'")));
    }
    let (line, v) = lines.expect_key("domain")?;
    let domain = parse_domain(v, line)?;
    let (line, v) = lines.expect_key("weight")?;
    let weight = parse_u64(v, line, "weight")?;
    let (line, v) = lines.expect_key("level")?;
    let level = parse_u64(v, line, "level")?;
    let (line, v) = lines.expect_key("character")?;
    let character = parse_character_at(v, line)?;
    let (line, v) = lines.expect_key("precision")?;
    let precision = parse_u64(v, line, "precision")?;
    let mixed = match lines.take_key("mixed") {
        None => false,
        Some((line, v)) => match v {
            "1" => true,
            "0" => false,
            _ => return Err(Error::parse(line, "mixed must be 0 or 1")),
        },
    };
    let coeffs = match &domain {
        DomainSpec::Rational => {
            let mut v = Vec::new();
            for n in 0..precision {
                let (line, tok) = data_line(&mut lines, n, "coefficient")?;
                v.push(parse_rational(tok, line)?);
            }
            Coefficients::Rational(v)
        }
        DomainSpec::Cyclo(order) => {
            let mut v = Vec::new();
            for n in 0..precision {
                let (line, tok) = data_line(&mut lines, n, "coefficient")?;
                v.push(parse_cyclo_value(tok, line)?);
            }
            Coefficients::Cyclo {
                order: *order,
                coeffs: v,
            }
        }
        DomainSpec::Field(desc) => {
            let mut v = Vec::new();
            for n in 0..precision {
                let (line, tok) = data_line(&mut lines, n, "coefficient")?;
                v.push(parse_field_value(tok, line, desc)?);
            }
            Coefficients::Field {
                desc: desc.clone(),
                coeffs: v,
            }
        }
    };
    lines.expect_end()?;
    let mut q = QExpansion::new(coeffs, weight, level, character)?;
    q.set_mixed_weight(mixed);
    Ok(q)
}

/// Write a series file in canonical form.
///
/// Fails only when the series cannot be represented: a cyclotomic ambient
/// order beyond [`MAX_FILE_ORDER`].
pub fn write_qexp(q: &QExpansion) -> Result<String> {
    let domain = match q.coefficients() {
        Coefficients::Rational(_) => "rational".to_string(),
        Coefficients::Cyclo { order, .. } => {
            if *order > MAX_FILE_ORDER {
                return Err(Error::OrderTooLarge {
                    order: *order,
                    max: MAX_FILE_ORDER,
                });
            }
            format!("cyclotomic {order}")
        }
        Coefficients::Field { desc, .. } => format!("field {}", write_field_descriptor(desc)),
    };
    let mut out = String::new();
    let _ = writeln!(out, "format: qexp-v1");
    let _ = writeln!(out, "domain: {domain}");
    let _ = writeln!(out, "weight: {}", q.weight());
    let _ = writeln!(out, "level: {}", q.level());
    let _ = writeln!(out, "character: {}", write_character_spec(q.character()));
    let _ = writeln!(out, "precision: {}", q.precision());
    if q.is_mixed_weight() {
        let _ = writeln!(out, "mixed: 1");
    }
    for i in 0..q.coefficients().len() {
        let rendered = q.coefficients().render(i).expect("index below length");
        let _ = writeln!(out, "{i}: {rendered}");
    }
    Ok(out)
}

/// Parse a representation file.
pub fn parse_repr(text: &str) -> Result<ReprSource> {
    let mut lines = Lines::new(text);
    let (line, v) = lines.expect_key("format")?;
    if v != "repr-v1" {
        return Err(Error::parse(line, format!("unsupported format '{v}'")));
    }
    let (line, kind) = lines.expect_key("kind")?;
    match kind {
        "eigenform" => parse_eigenform(&mut lines),
        "reducible" => parse_reducible(&mut lines),
        other => Err(Error::parse(line, format!("unknown kind '{other}'"))),
    }
}

fn parse_eigenform(lines: &mut Lines<'_>) -> Result<ReprSource> {
    let (line, v) = lines.expect_key("weight")?;
    let weight = parse_u64(v, line, "weight")?;
    let (line, v) = lines.expect_key("level")?;
    let level = parse_u64(v, line, "level")?;
    let (line, v) = lines.expect_key("character")?;
    let character = parse_character_at(v, line)?;
    let (line, table_kind) = lines.expect_key("table")?;
    enum Kind {
        Exact(u64),
        Reduced(FieldDescriptor),
    }
    let kind = match table_kind {
        "exact" => {
            let (line, v) = lines.expect_key("embedding-order")?;
            let min_order = parse_u64(v, line, "embedding order")?;
            if min_order == 0 {
                return Err(Error::parse(line, "embedding order must be positive"));
            }
            Kind::Exact(min_order)
        }
        "reduced" => {
            let (line, v) = lines.expect_key("field")?;
            Kind::Reduced(parse_field_descriptor(v, line)?)
        }
        other => return Err(Error::parse(line, format!("unknown table kind '{other}'"))),
    };
    let (line, v) = lines.expect_key("primes-to")?;
    let primes_to = parse_u64(v, line, "primes-to")?;
    if primes_to > MAX_TABLE_SPAN {
        return Err(Error::parse(
            line,
            format!("primes-to {primes_to} exceeds the cap {MAX_TABLE_SPAN}"),
        ));
    }
    let table = match kind {
        Kind::Exact(min_order) => {
            let mut map = BTreeMap::new();
            read_table(lines, &mut map, |tok, line| parse_cyclo_value(tok, line))?;
            check_coverage(&map, primes_to)?;
            EigenTable::Exact { min_order, map }
        }
        Kind::Reduced(desc) => {
            let mut map = BTreeMap::new();
            read_table(lines, &mut map, |tok, line| {
                parse_field_value(tok, line, &desc)
            })?;
            check_coverage(&map, primes_to)?;
            EigenTable::Reduced { desc, map }
        }
    };
    lines.expect_end()?;
    Ok(ReprSource::Eigenform(EigenformData::new(
        level, weight, character, table,
    )?))
}

/// Read ascending `p: value` lines until the input ends.
fn read_table<T>(
    lines: &mut Lines<'_>,
    map: &mut BTreeMap<u64, T>,
    mut value: impl FnMut(&str, usize) -> Result<T>,
) -> Result<()> {
    let mut last = 0u64;
    while let Some((line, content)) = lines.next_content() {
        let (p, tok) = split_key(content)
            .ok_or_else(|| Error::parse(line, "expected 'p: value'"))?;
        let p = parse_u64(p, line, "prime")?;
        if p <= last {
            return Err(Error::parse(
                line,
                format!("primes must strictly ascend: {p} after {last}"),
            ));
        }
        last = p;
        map.insert(p, value(tok, line)?);
    }
    Ok(())
}

/// Every prime up to the declared span must be present.
fn check_coverage<T>(map: &BTreeMap<u64, T>, primes_to: u64) -> Result<()> {
    for p in primes::primes_up_to(primes_to) {
        if !map.contains_key(&p) {
            return Err(Error::parse(
                0,
                format!("table declares primes-to: {primes_to} but has no entry for {p}"),
            ));
        }
    }
    Ok(())
}

fn parse_reducible(lines: &mut Lines<'_>) -> Result<ReprSource> {
    let (line, v) = lines.expect_key("ell")?;
    let ell = parse_u64(v, line, "ell")?;
    let (line, v) = lines.expect_key("psi")?;
    let psi = parse_character_at(v, line)?;
    let (line, v) = lines.expect_key("phi")?;
    let phi = parse_character_at(v, line)?;
    let (line, v) = lines.expect_key("a")?;
    let a = parse_u64(v, line, "a")?;
    let a_line = line;
    let (line, v) = lines.expect_key("b")?;
    let b = parse_u64(v, line, "b")?;
    let b_line = line;
    lines.expect_end()?;
    // Files must carry the normalised exponents, not representatives.
    let span = ell.saturating_sub(1).max(1);
    if a >= span {
        return Err(Error::parse(
            a_line,
            format!("exponent a must lie in 0..={}", span - 1),
        ));
    }
    if b >= span {
        return Err(Error::parse(
            b_line,
            format!("exponent b must lie in 0..={}", span - 1),
        ));
    }
    Ok(ReprSource::Reducible(ReducibleData::new(
        psi, phi, a, b, ell,
    )?))
}

/// Write a representation file in canonical form.
///
/// Fails only when an exact table holds a value of order beyond
/// [`MAX_FILE_ORDER`].
pub fn write_repr(src: &ReprSource) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "format: repr-v1");
    match src {
        ReprSource::Reducible(data) => {
            let _ = writeln!(out, "kind: reducible");
            let _ = writeln!(out, "ell: {}", data.ell());
            let _ = writeln!(out, "psi: {}", write_character_spec(data.psi()));
            let _ = writeln!(out, "phi: {}", write_character_spec(data.phi()));
            let _ = writeln!(out, "a: {}", data.a());
            let _ = writeln!(out, "b: {}", data.b());
        }
        ReprSource::Eigenform(data) => {
            let _ = writeln!(out, "kind: eigenform");
            let _ = writeln!(out, "weight: {}", data.weight());
            let _ = writeln!(out, "level: {}", data.level());
            let _ = writeln!(out, "character: {}", write_character_spec(data.character()));
            match data.table() {
                EigenTable::Exact { min_order, map } => {
                    let _ = writeln!(out, "table: exact");
                    let _ = writeln!(out, "embedding-order: {min_order}");
                    let _ = writeln!(out, "primes-to: {}", covered_span(map.keys().copied()));
                    for (p, v) in map {
                        if v.order() > MAX_FILE_ORDER {
                            return Err(Error::OrderTooLarge {
                                order: v.order(),
                                max: MAX_FILE_ORDER,
                            });
                        }
                        let coeffs: Vec<String> = v
                            .coeffs()
                            .iter()
                            .map(|r| format!("{}/{}", r.numer(), r.denom()))
                            .collect();
                        let _ = writeln!(out, "{p}: [{}]@{}", coeffs.join(","), v.order());
                    }
                }
                EigenTable::Reduced { desc, map } => {
                    let _ = writeln!(out, "table: reduced");
                    let _ = writeln!(out, "field: {}", write_field_descriptor(desc));
                    let _ = writeln!(out, "primes-to: {}", covered_span(map.keys().copied()));
                    for (p, v) in map {
                        let coords: Vec<String> =
                            v.coords().iter().map(|c| c.to_string()).collect();
                        let _ = writeln!(out, "{p}: [{}]", coords.join(","));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Largest `P` such that every prime `<= P` appears among the keys.
fn covered_span(keys: impl Iterator<Item = u64>) -> u64 {
    let keys: std::collections::BTreeSet<u64> = keys.collect();
    let mut span = 1u64;
    let mut n = 2u64;
    loop {
        if primes::is_prime(n) {
            if !keys.contains(&n) {
                return span;
            }
            span = n;
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{embedding_make, rat, rat_int};
    use crate::eisenstein::{delta_qexp, eisenstein_qexp, EisensteinSpec};
    use crate::repr::frob_charpoly;

    fn triv() -> DirichletCharacter {
        DirichletCharacter::trivial(1).unwrap()
    }

    #[test]
    fn character_specs_round_trip() {
        for spec in ["1;", "4; 2^1", "5; 4^1", "8; 2^1,1^0", "12; 1^0,2^1"] {
            let chi = parse_character_spec(spec).unwrap();
            assert_eq!(write_character_spec(&chi), spec);
        }
        // Non-canonical image pairs normalise: (2, 0) is the trivial
        // image, written 1^0. Whitespace normalises too.
        let chi = parse_character_spec(" 8;2^1 , 2^0 ").unwrap();
        assert_eq!(write_character_spec(&chi), "8; 2^1,1^0");
        assert!(parse_character_spec("8; 2^1").is_err());
        assert!(parse_character_spec("five; 4^1").is_err());
        assert!(parse_character_spec("5: 4^1").is_err());
    }

    #[test]
    fn rational_series_files_round_trip() {
        let q = delta_qexp(10).unwrap();
        let text = write_qexp(&q).unwrap();
        let back = parse_qexp(&text).unwrap();
        assert_eq!(back, q);
        assert_eq!(write_qexp(&back).unwrap(), text);
        assert!(text.starts_with("format: qexp-v1\ndomain: rational\nweight: 12\n"));
        assert!(text.contains("2: -24/1\n"));
    }

    #[test]
    fn cyclotomic_series_files_round_trip() {
        let quartic = char_make(5, &[(4, 1)]).unwrap();
        let spec = EisensteinSpec::new(3, triv(), quartic, 1, None).unwrap();
        let q = eisenstein_qexp(&spec, 6).unwrap();
        let text = write_qexp(&q).unwrap();
        let back = parse_qexp(&text).unwrap();
        assert_eq!(back, q);
        assert_eq!(write_qexp(&back).unwrap(), text);
        assert!(text.contains("domain: cyclotomic 4\n"));
        assert!(text.contains("character: 5; 4^1\n"));
    }

    #[test]
    fn field_series_files_round_trip() {
        let emb = embedding_make(1, 691).unwrap();
        let q = delta_qexp(8).unwrap().reduce_mod_lambda(&emb).unwrap();
        let text = write_qexp(&q).unwrap();
        let back = parse_qexp(&text).unwrap();
        assert_eq!(back, q);
        assert!(text.contains("domain: field 691 1\n"));
        assert!(text.contains("2: [667]\n"));
        // An extension field serializes its modulus polynomial.
        let emb2 = embedding_make(4, 3).unwrap();
        let chi = char_make(5, &[(4, 1)]).unwrap();
        let spec = EisensteinSpec::new(3, triv(), chi, 1, None).unwrap();
        let f = eisenstein_qexp(&spec, 5)
            .unwrap()
            .reduce_mod_lambda(&emb2)
            .unwrap();
        let text2 = write_qexp(&f).unwrap();
        assert!(text2.contains("domain: field 3 2 ["));
        assert_eq!(parse_qexp(&text2).unwrap(), f);
    }

    #[test]
    fn mixed_marker_survives_the_trip() {
        let e4 = eisenstein_qexp(&EisensteinSpec::new(4, triv(), triv(), 1, None).unwrap(), 5)
            .unwrap();
        let e6 = eisenstein_qexp(&EisensteinSpec::new(6, triv(), triv(), 1, None).unwrap(), 5)
            .unwrap();
        let sum = e4.add_mixed(&e6).unwrap();
        assert!(sum.is_mixed_weight());
        let text = write_qexp(&sum).unwrap();
        assert!(text.contains("mixed: 1\n"));
        let back = parse_qexp(&text).unwrap();
        assert!(back.is_mixed_weight());
        assert_eq!(back, sum);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a series\n\nformat: qexp-v1\n# domain next\ndomain: rational\n\
                    weight: 2\nlevel: 1\ncharacter: 1;\nprecision: 2\n# data\n0: 0/1\n1: 1/1\n";
        let q = parse_qexp(text).unwrap();
        assert_eq!(q.precision(), 2);
        assert_eq!(q.weight(), 2);
    }

    #[test]
    fn qexp_grammar_violations() {
        let good = "format: qexp-v1\ndomain: rational\nweight: 2\nlevel: 1\n\
                    character: 1;\nprecision: 2\n0: 0/1\n1: 1/1\n";
        assert!(parse_qexp(good).is_ok());
        for (bad, why) in [
            (good.replace("qexp-v1", "qexp-v2"), "version"),
            (good.replace("weight:", "weigth:"), "unknown key"),
            (good.replace("1: 1/1", "2: 1/1"), "index gap"),
            (good.replace("precision: 2", "precision: 3"), "missing line"),
            (format!("{good}2: 4/1\n"), "trailing line"),
            (good.replace("0: 0/1", "0: 0"), "bare integer"),
            (good.replace("0: 0/1", "0: 1/0"), "zero denominator"),
            (good.replace("0: 0/1", "0: 1/-2"), "negative denominator"),
        ] {
            assert!(parse_qexp(&bad).is_err(), "expected failure: {why}");
        }
        // Duplicated optional key counts as trailing content.
        let doubled = good.replace("precision: 2\n", "precision: 2\nmixed: 1\nmixed: 1\n");
        assert!(parse_qexp(&doubled).is_err());
    }

    #[test]
    fn oversized_numbers_are_rejected() {
        let huge = "1".repeat(MAX_DIGITS + 1);
        let text = format!(
            "format: qexp-v1\ndomain: rational\nweight: 2\nlevel: 1\n\
             character: 1;\nprecision: 1\n0: {huge}/1\n"
        );
        assert!(matches!(parse_qexp(&text), Err(Error::Parse { .. })));
        // At the cap it still parses.
        let big = "1".repeat(MAX_DIGITS);
        let text = format!(
            "format: qexp-v1\ndomain: rational\nweight: 2\nlevel: 1\n\
             character: 1;\nprecision: 1\n0: {big}/1\n"
        );
        assert!(parse_qexp(&text).is_ok());
    }

    #[test]
    fn reducible_files_round_trip() {
        let chi = char_make(5, &[(4, 1)]).unwrap();
        let data = ReducibleData::new(chi, triv(), 0, 3, 5).unwrap();
        let src = ReprSource::Reducible(data);
        let text = write_repr(&src).unwrap();
        let expected = "format: repr-v1\nkind: reducible\nell: 5\npsi: 5; 4^1\n\
                        phi: 1;\na: 0\nb: 3\n";
        assert_eq!(text, expected);
        match parse_repr(&text).unwrap() {
            ReprSource::Reducible(d) => {
                assert_eq!(d.ell(), 5);
                assert_eq!((d.a(), d.b()), (0, 3));
                assert_eq!(d.psi().modulus(), 5);
            }
            other => panic!("wrong kind: {other:?}"),
        }
    }

    #[test]
    fn reducible_files_demand_normalised_exponents() {
        let text = "format: repr-v1\nkind: reducible\nell: 5\npsi: 1;\nphi: 1;\na: 4\nb: 0\n";
        assert!(matches!(parse_repr(text), Err(Error::Parse { .. })));
        let text2 = "format: repr-v1\nkind: reducible\nell: 2\npsi: 1;\nphi: 1;\na: 0\nb: 1\n";
        assert!(matches!(parse_repr(text2), Err(Error::Parse { .. })));
    }

    #[test]
    fn exact_eigenform_files_round_trip() {
        let mut map = BTreeMap::new();
        for (p, ap) in [(2i64, -24i64), (3, 252), (5, 4830), (7, -16744)] {
            map.insert(p as u64, CycloElement::rational(rat_int(ap)));
        }
        let table = EigenTable::Exact { min_order: 1, map };
        let src = ReprSource::Eigenform(EigenformData::new(1, 12, triv(), table).unwrap());
        let text = write_repr(&src).unwrap();
        assert!(text.contains("table: exact\nembedding-order: 1\nprimes-to: 7\n"));
        assert!(text.contains("2: [-24/1]@1\n"));
        let back = parse_repr(&text).unwrap();
        assert_eq!(write_repr(&back).unwrap(), text);
        // The reparsed source extracts the same Frobenius data.
        let emb = embedding_make(1, 691).unwrap();
        assert_eq!(
            frob_charpoly(&back, 2, &emb).unwrap(),
            frob_charpoly(&src, 2, &emb).unwrap()
        );
    }

    #[test]
    fn reduced_eigenform_files_round_trip() {
        let desc = crate::arith::ext_field_make(3, 2).unwrap();
        let mut map = BTreeMap::new();
        map.insert(2, desc.element(vec![1, 2]).unwrap());
        map.insert(3, desc.element(vec![0, 1]).unwrap());
        let chi = char_make(4, &[(2, 1)]).unwrap();
        let table = EigenTable::Reduced { desc, map };
        let src = ReprSource::Eigenform(EigenformData::new(4, 3, chi, table).unwrap());
        let text = write_repr(&src).unwrap();
        assert!(text.contains("table: reduced\nfield: 3 2 ["));
        assert!(text.contains("primes-to: 3\n"));
        assert!(text.contains("2: [1,2]\n"));
        let back = parse_repr(&text).unwrap();
        assert_eq!(write_repr(&back).unwrap(), text);
    }

    #[test]
    fn coverage_gaps_are_rejected() {
        let text = "format: repr-v1\nkind: eigenform\nweight: 12\nlevel: 1\ncharacter: 1;\n\
                    table: exact\nembedding-order: 1\nprimes-to: 5\n2: [-24/1]@1\n5: [4830/1]@1\n";
        match parse_repr(text) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("no entry for 3")),
            other => panic!("expected a coverage error, got {other:?}"),
        }
        // Descending primes are caught before coverage.
        let text2 = "format: repr-v1\nkind: eigenform\nweight: 12\nlevel: 1\ncharacter: 1;\n\
                     table: exact\nembedding-order: 1\nprimes-to: 1\n3: [252/1]@1\n2: [-24/1]@1\n";
        assert!(matches!(parse_repr(text2), Err(Error::Parse { .. })));
    }

    #[test]
    fn the_span_cap_is_enforced() {
        let text = format!(
            "format: repr-v1\nkind: eigenform\nweight: 12\nlevel: 1\ncharacter: 1;\n\
             table: exact\nembedding-order: 1\nprimes-to: {}\n",
            MAX_TABLE_SPAN + 1
        );
        assert!(matches!(parse_repr(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn non_prime_table_keys_are_rejected() {
        let text = "format: repr-v1\nkind: eigenform\nweight: 12\nlevel: 1\ncharacter: 1;\n\
                    table: exact\nembedding-order: 1\nprimes-to: 1\n4: [1/1]@1\n";
        assert!(matches!(parse_repr(text), Err(Error::NotPrime(4))));
    }

    #[test]
    fn scaled_coefficients_keep_exact_denominators() {
        // A file holding E4 retains 1/120 exactly.
        let spec = EisensteinSpec::new(4, triv(), triv(), 1, None).unwrap();
        let q = eisenstein_qexp(&spec, 3).unwrap();
        let text = write_qexp(&q).unwrap();
        assert!(text.contains("0: 1/120\n"));
        let back = parse_qexp(&text).unwrap();
        assert_eq!(
            back.coefficients().render(0).unwrap(),
            q.coefficients().render(0).unwrap()
        );
        // Unreduced fractions normalise on the way in.
        let toy = "format: qexp-v1\ndomain: rational\nweight: 2\nlevel: 1\n\
                   character: 1;\nprecision: 1\n0: 2/4\n";
        let q2 = parse_qexp(toy).unwrap();
        assert_eq!(q2.coefficients().render(0).unwrap(), "1/2");
        let _ = rat(1, 2);
    }
}
