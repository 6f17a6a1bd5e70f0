//! Line-oriented text formats.
//!
//! Blank lines and lines whose first non-blank character is `#` are
//! ignored everywhere. (A `#` inside a line is part of a jet variable name,
//! so trailing comments are not supported.)
//!
//! ```text
//! ring x y z          map S T             frame n=2
//! ideal               x -> x              A:
//! x*z - y^2 + 1       y -> y + x*t        1, 0, 0
//! end                 end                 ...
//!                                         B:
//!                                         ...
//!                                         C:
//!                                         ...
//!                                         end
//! ```
//!
//! A certificate is a `forward` line followed by a map block, then a
//! `backward` line followed by a map block.

use std::fmt::Write as _;

use thiserror::Error;

use crate::morphism::{CotangentFrame, MorphismError, RingMap};
use crate::poly::{parse, PolyError, Polynomial, Variable};
use crate::presentation::{Presentation, PresentationError};

#[derive(Debug, Clone, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Poly { line: usize, source: PolyError },
    #[error("unexpected end of input: {0}")]
    Eof(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

/// Non-comment lines with their 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines { inner: it.peekable() }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        self.inner.next().ok_or_else(|| FormatError::Eof(format!("expected {what}")))
    }

    fn peek(&mut self) -> Option<&(usize, &'a str)> {
        self.inner.peek()
    }

    fn expect(&mut self, keyword: &str) -> Result<usize, FormatError> {
        let (line, text) = self.next(&format!("'{keyword}'"))?;
        if text != keyword {
            return Err(syntax(line, format!("expected '{keyword}', found '{text}'")));
        }
        Ok(line)
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        match self.inner.next() {
            Some((line, text)) => Err(syntax(line, format!("unexpected '{text}' after 'end'"))),
            None => Ok(()),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

fn poly_at(line: usize) -> impl Fn(PolyError) -> FormatError {
    move |source| FormatError::Poly { line, source }
}

/// Splits `keyword rest` and checks the keyword.
fn header<'a>(line: usize, text: &'a str, keyword: &str) -> Result<&'a str, FormatError> {
    match text.split_once(char::is_whitespace) {
        Some((k, rest)) if k == keyword => Ok(rest.trim()),
        _ if text == keyword => Ok(""),
        _ => Err(syntax(line, format!("expected '{keyword} ...', found '{text}'"))),
    }
}

fn read_variety(lines: &mut Lines<'_>, name: &str) -> Result<Presentation, FormatError> {
    let (line, text) = lines.next("'ring'")?;
    let names: Vec<&str> = header(line, text, "ring")?.split_whitespace().collect();
    let vars = names
        .iter()
        .map(|n| Variable::parse(n))
        .collect::<Result<Vec<_>, _>>()
        .map_err(poly_at(line))?;
    let ctx = crate::poly::Context::new(vars).map_err(poly_at(line))?;
    lines.expect("ideal")?;
    let mut gens = Vec::new();
    loop {
        let (line, text) = lines.next("'end'")?;
        if text == "end" {
            break;
        }
        gens.push(parse(text, &ctx).map_err(poly_at(line))?);
    }
    Ok(Presentation::new(name, ctx, gens)?)
}

/// Parses a variety file; `name` labels the resulting presentation.
pub fn parse_variety(text: &str, name: &str) -> Result<Presentation, FormatError> {
    let mut lines = Lines::new(text);
    let v = read_variety(&mut lines, name)?;
    lines.finish()?;
    Ok(v)
}

pub fn write_variety(v: &Presentation) -> String {
    let mut out = String::from("ring");
    for var in v.context().vars() {
        let _ = write!(out, " {var}");
    }
    out.push_str("\nideal\n");
    for g in v.generators() {
        let _ = writeln!(out, "{g}");
    }
    out.push_str("end\n");
    out
}

fn read_map(lines: &mut Lines<'_>, source: &Presentation, target: &Presentation) -> Result<RingMap, FormatError> {
    let (line, text) = lines.next("'map'")?;
    let names: Vec<&str> = header(line, text, "map")?.split_whitespace().collect();
    if names.len() != 2 {
        return Err(syntax(line, "expected 'map <source> <target>'"));
    }
    let mut pairs: Vec<(Variable, Polynomial)> = Vec::new();
    loop {
        let (line, text) = lines.next("'end'")?;
        if text == "end" {
            break;
        }
        let (var, expr) = text
            .split_once("->")
            .ok_or_else(|| syntax(line, format!("expected 'variable -> expression', found '{text}'")))?;
        let var = Variable::parse(var.trim()).map_err(poly_at(line))?;
        let image = parse(expr.trim(), target.context()).map_err(poly_at(line))?;
        if !source.context().contains(&var) {
            return Err(syntax(line, format!("{var} is not a variable of the source ring [{}]", source.context())));
        }
        if pairs.iter().any(|(v, _)| *v == var) {
            return Err(syntax(line, format!("second image for {var}")));
        }
        pairs.push((var, image));
    }
    Ok(RingMap::from_pairs(source.clone(), target.clone(), &pairs)?)
}

/// Parses a map block between two given presentations. The names in the
/// header are informational; variables are checked against `source` and
/// expressions parsed in `target`.
pub fn parse_map(text: &str, source: &Presentation, target: &Presentation) -> Result<RingMap, FormatError> {
    let mut lines = Lines::new(text);
    let m = read_map(&mut lines, source, target)?;
    lines.finish()?;
    Ok(m)
}

pub fn write_map(map: &RingMap) -> String {
    format!("{map}\n")
}

/// Parses a certificate into its unverified forward and backward maps.
pub fn parse_certificate(
    text: &str,
    source: &Presentation,
    target: &Presentation,
) -> Result<(RingMap, RingMap), FormatError> {
    let mut lines = Lines::new(text);
    lines.expect("forward")?;
    let fwd = read_map(&mut lines, source, target)?;
    lines.expect("backward")?;
    let bwd = read_map(&mut lines, target, source)?;
    lines.finish()?;
    Ok((fwd, bwd))
}

pub fn write_certificate(forward: &RingMap, backward: &RingMap) -> String {
    format!("forward\n{forward}\nbackward\n{backward}\n")
}

fn read_matrix(
    lines: &mut Lines<'_>,
    label: &str,
    rows: usize,
    cols: usize,
    v: &Presentation,
) -> Result<Vec<Vec<Polynomial>>, FormatError> {
    lines.expect(label)?;
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        let (line, text) = lines.next(&format!("a row of {label}"))?;
        if text.ends_with(':') || text == "end" {
            return Err(syntax(line, format!("{label} has fewer than {rows} rows")));
        }
        let row = if cols == 0 && text == "-" {
            Vec::new()
        } else {
            text.split(',')
                .map(|e| parse(e.trim(), v.context()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(poly_at(line))?
        };
        if row.len() != cols {
            return Err(syntax(line, format!("{label} row has {} entries, expected {cols}", row.len())));
        }
        out.push(row);
    }
    if let Some(&(line, text)) = lines.peek() {
        if !text.ends_with(':') && text != "end" {
            return Err(syntax(line, format!("{label} has more than {rows} rows")));
        }
    }
    Ok(out)
}

/// Parses a frame for `v`: `A` is n×N, `B` is N×n and `C` is N×r, where
/// `N` and `r` are the numbers of variables and generators of `v`. An
/// empty row (when `r = 0`) is written `-`.
pub fn parse_frame(text: &str, v: &Presentation) -> Result<CotangentFrame, FormatError> {
    let mut lines = Lines::new(text);
    let (line, head) = lines.next("'frame n=<n>'")?;
    let n: usize = header(line, head, "frame")?
        .strip_prefix("n=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| syntax(line, "expected 'frame n=<n>'"))?;
    let (big_n, r) = (v.num_vars(), v.generators().len());
    let a = read_matrix(&mut lines, "A:", n, big_n, v)?;
    let b = read_matrix(&mut lines, "B:", big_n, n, v)?;
    let c = read_matrix(&mut lines, "C:", big_n, r, v)?;
    lines.expect("end")?;
    lines.finish()?;
    Ok(CotangentFrame { n, a, b, c })
}

pub fn write_frame(frame: &CotangentFrame) -> String {
    let mut out = format!("frame n={}\n", frame.n);
    for (label, m) in [("A:", &frame.a), ("B:", &frame.b), ("C:", &frame.c)] {
        out.push_str(label);
        out.push('\n');
        for row in m {
            if row.is_empty() {
                out.push_str("-\n");
            } else {
                let entries: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                let _ = writeln!(out, "{}", entries.join(", "));
            }
        }
    }
    out.push_str("end\n");
    out
}
