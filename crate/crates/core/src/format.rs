//! Byte-stable text output: `%.12g` numbers and LF-terminated CSV.

use std::io::{self, Write};

/// Formats `x` like C's `printf("%.12g", x)`.
pub fn g12(x: f64) -> String {
    const PREC: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // rounding to PREC significant digits fixes the decimal exponent
    let sci = format!("{:.*e}", (PREC - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= PREC {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    } else {
        let decimals = (PREC - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Minimal CSV writer: header first, one row per call, `\n` line endings.
pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
}

/// A single CSV cell.
pub enum Cell<'a> {
    Num(f64),
    Int(u64),
    Text(&'a str),
}

impl From<f64> for Cell<'_> {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell<'_> {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl<'a> From<&'a str> for Cell<'a> {
    fn from(x: &'a str) -> Self {
        Cell::Text(x)
    }
}

impl<'a> From<&'a String> for Cell<'a> {
    fn from(x: &'a String) -> Self {
        Cell::Text(x)
    }
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out, columns: header.len() })
    }

    pub fn row(&mut self, cells: &[Cell<'_>]) -> io::Result<()> {
        debug_assert_eq!(cells.len(), self.columns);
        let line: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::Num(x) => g12(*x),
                Cell::Int(n) => n.to_string(),
                Cell::Text(t) => (*t).to_string(),
            })
            .collect();
        writeln!(self.out, "{}", line.join(","))
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
