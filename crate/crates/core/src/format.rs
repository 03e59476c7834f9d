//! Text formats for arrays: the NDA header format (whitespace-tolerant,
//! diffable) and the raw symbol-string shorthand for 1-dimensional arrays
//! over small digit alphabets.
//!
//! NDA grammar, as a token stream:
//!
//! ```text
//! NDA 1
//! dims <d>
//! <n_1> ... <n_d>
//! alphabet <sigma>
//! <v_0> <v_1> ... row-major ...
//! ```

use crate::array::{Alphabet, NdArray, Symbol};
use crate::error::{Error, Result};

struct Tokens<'a> {
    iter: std::iter::Peekable<std::vec::IntoIter<(usize, usize, &'a str)>>,
    last: (usize, usize),
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut toks = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            for (tok_no, tok) in line.split_whitespace().enumerate() {
                toks.push((line_no + 1, tok_no + 1, tok));
            }
        }
        Tokens { iter: toks.into_iter().peekable(), last: (1, 0) }
    }

    fn next(&mut self, expect: &str) -> Result<(usize, usize, &'a str)> {
        match self.iter.next() {
            Some(t) => {
                self.last = (t.0, t.1);
                Ok(t)
            }
            None => Err(Error::Parse {
                line: self.last.0,
                offset: self.last.1 + 1,
                msg: format!("unexpected end of input, expected {expect}"),
            }),
        }
    }

    fn next_literal(&mut self, lit: &str) -> Result<()> {
        let (line, offset, tok) = self.next(lit)?;
        if tok != lit {
            return Err(Error::Parse {
                line,
                offset,
                msg: format!("expected {lit:?}, found {tok:?}"),
            });
        }
        Ok(())
    }

    fn next_number(&mut self, what: &str) -> Result<(usize, usize, u64)> {
        let (line, offset, tok) = self.next(what)?;
        tok.parse::<u64>().map(|v| (line, offset, v)).map_err(|_| Error::Parse {
            line,
            offset,
            msg: format!("expected {what} (a non-negative integer), found {tok:?}"),
        })
    }

    fn rest_is_empty(&mut self) -> Option<(usize, usize, &'a str)> {
        self.iter.next()
    }
}

/// Parses the NDA text format.
pub fn parse_nda(text: &str) -> Result<NdArray> {
    let mut tokens = Tokens::new(text);
    tokens.next_literal("NDA")?;
    let (line, offset, version) = tokens.next_number("format version")?;
    if version != 1 {
        return Err(Error::Parse { line, offset, msg: format!("unsupported NDA version {version}") });
    }
    tokens.next_literal("dims")?;
    let (line, offset, d) = tokens.next_number("dimension count")?;
    if d == 0 || d > 16 {
        return Err(Error::Parse { line, offset, msg: format!("dimension count {d} out of range 1..=16") });
    }
    let mut dims = Vec::with_capacity(d as usize);
    for _ in 0..d {
        let (line, offset, n) = tokens.next_number("side length")?;
        if n == 0 {
            return Err(Error::Parse { line, offset, msg: "side lengths must be positive".into() });
        }
        dims.push(n as usize);
    }
    tokens.next_literal("alphabet")?;
    let (line, offset, sigma) = tokens.next_number("alphabet size")?;
    let alphabet = Alphabet::new(sigma as u32)
        .map_err(|e| Error::Parse { line, offset, msg: e.to_string() })?;
    let expected: usize = dims.iter().product();
    let mut values = Vec::with_capacity(expected);
    for _ in 0..expected {
        match tokens.next("value") {
            Ok((line, offset, tok)) => {
                let v = tok.parse::<u64>().map_err(|_| Error::Parse {
                    line,
                    offset,
                    msg: format!("expected a value, found {tok:?}"),
                })?;
                if v >= sigma {
                    return Err(Error::Parse {
                        line,
                        offset,
                        msg: format!("symbol {v} out of range for alphabet of size {sigma}"),
                    });
                }
                values.push(v as Symbol);
            }
            Err(_) => {
                return Err(Error::Parse {
                    line: tokens.last.0,
                    offset: tokens.last.1,
                    msg: format!("expected {expected} values, found {}", values.len()),
                });
            }
        }
    }
    if let Some((line, offset, tok)) = tokens.rest_is_empty() {
        return Err(Error::Parse {
            line,
            offset,
            msg: format!("expected {expected} values, found more (first extra token {tok:?})"),
        });
    }
    NdArray::new(dims, alphabet, values)
        .map_err(|e| Error::Parse { line: 1, offset: 1, msg: e.to_string() })
}

/// Serializes to the canonical NDA layout: header lines, then one line per
/// row (run of the last axis).
pub fn serialize_nda(array: &NdArray) -> String {
    let mut out = String::new();
    out.push_str("NDA 1\n");
    out.push_str(&format!("dims {}\n", array.ndim()));
    let dims: Vec<String> = array.dims().iter().map(|n| n.to_string()).collect();
    out.push_str(&dims.join(" "));
    out.push('\n');
    out.push_str(&format!("alphabet {}\n", array.alphabet().size()));
    let row = *array.dims().last().expect("at least one dimension");
    for (i, chunk) in array.values().chunks(row).enumerate() {
        let _ = i;
        let vals: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&vals.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the raw shorthand: a single line of digit symbols, one per cell,
/// for 1-dimensional arrays over alphabets of size at most 10.
pub fn parse_raw_1d(text: &str, alphabet: Alphabet) -> Result<NdArray> {
    if alphabet.size() > 10 {
        return Err(Error::usage("raw strings support digit alphabets of size at most 10"));
    }
    let line = text.trim();
    if line.is_empty() {
        return Err(Error::Parse { line: 1, offset: 1, msg: "empty raw string".into() });
    }
    let mut values = Vec::with_capacity(line.len());
    for (i, ch) in line.chars().enumerate() {
        let v = ch.to_digit(10).ok_or_else(|| Error::Parse {
            line: 1,
            offset: i + 1,
            msg: format!("non-digit symbol {ch:?}"),
        })?;
        if v >= alphabet.size() {
            return Err(Error::Parse {
                line: 1,
                offset: i + 1,
                msg: format!("symbol {v} out of range for alphabet of size {}", alphabet.size()),
            });
        }
        values.push(v as Symbol);
    }
    NdArray::new(vec![values.len()], alphabet, values)
}

/// Parses either format: NDA when the text starts with the `NDA` magic,
/// otherwise the raw shorthand with the given alphabet (binary when absent).
pub fn parse_array(text: &str, raw_alphabet: Option<Alphabet>) -> Result<NdArray> {
    if text.trim_start().starts_with("NDA") {
        parse_nda(text)
    } else {
        parse_raw_1d(text, raw_alphabet.unwrap_or_else(Alphabet::binary))
    }
}
