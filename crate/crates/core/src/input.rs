//! Text input for lattices.
//!
//! Accepted forms:
//! - `fixture:NAME`
//! - `R:[c1,c2,...]`, a classical form of rank R in the coefficient order of
//!   [`ClassicalForm`], turned into a lattice by [`form_to_lattice`]
//! - a Gram matrix, either bracketed (`[[2,1],[1,2]]`) or one row per line
//!   (or per `;`) with entries separated by spaces or commas
//!
//! `#` starts a comment running to the end of the line.

use num_bigint::BigInt;

use crate::data::fixture;
use crate::error::{Error, Result};
use crate::lattice::{form_to_lattice, ClassicalForm, GramLattice};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn strip_comments(text: &str) -> String {
    text.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join("\n")
}

fn line_of(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].matches('\n').count() + 1
}

fn parse_ints(text: &str, offset: usize, full: &str) -> Result<Vec<BigInt>> {
    let mut out = Vec::new();
    let mut pos = offset;
    for tok in text.split(|c: char| c == ',' || c.is_whitespace()) {
        if !tok.is_empty() {
            let v = tok.parse::<BigInt>().map_err(|_| parse_err(line_of(full, pos), format!("not an integer: {tok:?}")))?;
            out.push(v);
        }
        pos += tok.len() + 1;
    }
    Ok(out)
}

fn gram_from_rows(rows: Vec<(usize, Vec<BigInt>)>) -> Result<GramLattice> {
    let n = rows.len();
    if n == 0 {
        return Err(parse_err(1, "empty input"));
    }
    for (line, r) in &rows {
        if r.len() != n {
            return Err(parse_err(*line, format!("row has {} entries, expected {n}", r.len())));
        }
    }
    let last = rows.last().map_or(1, |r| r.0);
    GramLattice::new(rows.into_iter().map(|r| r.1).collect()).map_err(|e| parse_err(last, e.to_string()))
}

fn parse_bracketed(text: &str) -> Result<GramLattice> {
    let inner_start = text.find('[').unwrap() + 1;
    let inner_end = text.rfind(']').ok_or_else(|| parse_err(line_of(text, text.len()), "missing closing ']'"))?;
    let mut rows = Vec::new();
    let mut i = inner_start;
    let bytes = text.as_bytes();
    while i < inner_end {
        match bytes[i] {
            b'[' => {
                let close = text[i..inner_end].find(']').ok_or_else(|| parse_err(line_of(text, i), "unclosed row"))? + i;
                rows.push((line_of(text, i), parse_ints(&text[i + 1..close], i + 1, text)?));
                i = close + 1;
            }
            b',' | b' ' | b'\n' | b'\t' | b'\r' => i += 1,
            _ => return Err(parse_err(line_of(text, i), format!("unexpected {:?}", bytes[i] as char))),
        }
    }
    if !text[inner_end + 1..].trim().is_empty() {
        return Err(parse_err(line_of(text, inner_end + 1), "trailing input"));
    }
    gram_from_rows(rows)
}

/// Parses one lattice from `text`.
pub fn parse_lattice(text: &str) -> Result<GramLattice> {
    let clean = strip_comments(text);
    let t = clean.trim();
    if let Some(name) = t.strip_prefix("fixture:") {
        return fixture(name.trim());
    }
    if let Some((head, rest)) = t.split_once(':') {
        let rank: usize = head.trim().parse().map_err(|_| parse_err(1, format!("bad rank {head:?}")))?;
        let body = rest.trim();
        let body = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| parse_err(line_of(&clean, clean.len()), "expected [coefficients]"))?;
        let coeffs = parse_ints(body, clean.find('[').unwrap_or(0), &clean)?;
        let form = ClassicalForm::new(rank, &coeffs).map_err(|e| parse_err(1, e.to_string()))?;
        return form_to_lattice(&form).map_err(|e| parse_err(1, e.to_string()));
    }
    if t.starts_with('[') {
        return parse_bracketed(&clean);
    }
    let mut rows = Vec::new();
    let mut offset = 0;
    for (ln, line) in clean.lines().enumerate() {
        for part in line.split(';') {
            if !part.trim().is_empty() {
                rows.push((ln + 1, parse_ints(part, offset, &clean)?));
            }
        }
        offset += line.len() + 1;
    }
    gram_from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_spellings() {
        let a = parse_lattice("[[2,1],[1,2]]").unwrap();
        let b = parse_lattice("2 1\n1 2\n").unwrap();
        let c = parse_lattice("2,1; 1,2").unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert_eq!(parse_lattice("3:[1,1,9,0,0,1]").unwrap().discriminant(), BigInt::from(54));
        assert_eq!(parse_lattice("fixture:L1").unwrap().discriminant(), BigInt::from(729));
        assert_eq!(parse_lattice("# comment\n[[1,0],\n [0,1]]  # trailing\n").unwrap().rank(), 2);
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(parse_lattice("2 1\n1 x"), Err(Error::Parse { line: 2, msg: "not an integer: \"x\"".into() }));
        assert!(matches!(parse_lattice("1 2\n3 4 5"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_lattice("[[1,0],\n[0,1]"), Err(Error::Parse { .. })));
        assert!(matches!(parse_lattice("2 1\n1 -3"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_lattice("fixture:nope"), Err(Error::UnknownFixture(_))));
        assert!(matches!(parse_lattice("3:[2,2,2,2,2,2]"), Err(Error::Parse { .. })));
    }
}
