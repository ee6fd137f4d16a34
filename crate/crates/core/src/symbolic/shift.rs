use crate::error::{Error, Result};

/// A finite window of a bi-infinite symbol sequence around index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftPoint {
    symbols: Vec<u8>,
    origin: usize,
}

impl ShiftPoint {
    pub fn new(symbols: Vec<u8>, origin: usize) -> Result<Self> {
        if origin >= symbols.len() {
            return Err(Error::InvalidArgument(format!(
                "origin {origin} outside a window of length {}",
                symbols.len()
            )));
        }
        Ok(Self { symbols, origin })
    }

    /// Symbol at index `i` relative to the origin, if inside the window.
    pub fn get(&self, i: i64) -> Option<u8> {
        let j = self.origin as i64 + i;
        (j >= 0).then(|| self.symbols.get(j as usize).copied()).flatten()
    }

    /// Largest h such that indices -h..=h are all inside the window.
    pub fn half_width(&self) -> usize {
        self.origin.min(self.symbols.len() - 1 - self.origin)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn origin(&self) -> usize {
        self.origin
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftDistance {
    Exact(f64),
    /// The windows agreed up to their common edge; the true distance is at most this.
    UpperBound(f64),
}

impl ShiftDistance {
    pub fn value(self) -> f64 {
        match self {
            Self::Exact(v) | Self::UpperBound(v) => v,
        }
    }
}

/// `2^{-m}` with `m = sup{n >= 0 : x_i = y_i for |i| <= n}`, and 2 when the
/// origins already differ.
pub fn shift_distance(x: &ShiftPoint, y: &ShiftPoint) -> ShiftDistance {
    let h = x.half_width().min(y.half_width()) as i64;
    for n in 0..=h {
        if x.get(n) != y.get(n) || x.get(-n) != y.get(-n) {
            return ShiftDistance::Exact(2f64.powi(-(n as i32 - 1)));
        }
    }
    ShiftDistance::UpperBound(2f64.powi(-(h as i32)))
}

/// Length of the longest symmetric agreement `m` as an exponent, for
/// sequences given by closures; `None` means agreement up to `cap`.
pub(crate) fn agreement<F, G>(x: F, y: G, cap: usize) -> Option<i64>
where
    F: Fn(i64) -> u8,
    G: Fn(i64) -> u8,
{
    for n in 0..=cap as i64 {
        if x(n) != y(n) || x(-n) != y(-n) {
            return Some(n - 1);
        }
    }
    None
}
