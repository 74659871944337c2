//! Numeric CSV with a fixed format: 17 significant digits, LF endings.

use std::fmt::Write as _;
use std::path::Path;

pub enum Cell {
    Int(i64),
    Float(f64),
    Text(&'static str),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&'static str> for Cell {
    fn from(v: &'static str) -> Self {
        Cell::Text(v)
    }
}

/// `{:.16e}` prints 17 significant digits, enough to round-trip.
pub fn float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

pub struct Table {
    text: String,
    width: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Table { text, width: header.len() }
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = Cell>) {
        let mut n = 0;
        for (i, c) in cells.into_iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match c {
                Cell::Int(v) => write!(self.text, "{v}").unwrap(),
                Cell::Float(v) => self.text.push_str(&float(v)),
                Cell::Text(s) => self.text.push_str(s),
            }
            n += 1;
        }
        assert_eq!(n, self.width, "row width differs from header");
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, &self.text)
    }
}

#[macro_export]
macro_rules! cells {
    ($($v:expr),* $(,)?) => { [$($crate::csv::Cell::from($v)),*] };
}
