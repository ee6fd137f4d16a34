use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::shift::ShiftPoint;
use crate::cocycle::PeriodicWord;
use crate::error::{Error, Result};

/// A rational number p/q with q > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    pub p: i64,
    pub q: i64,
}

impl Rational {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q <= 0 {
            return Err(Error::InvalidArgument(format!("denominator must be positive in {p}/{q}")));
        }
        Ok(Self { p, q })
    }

    pub fn zero() -> Self {
        Self { p: 0, q: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected p/q, got {s:?}"));
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        Self::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)
    }
}

/// `F_k / F_{k+1}` for k = 1..=count: 1/2, 2/3, 3/5, 5/8, ...
pub fn golden_convergents(count: usize) -> Vec<Rational> {
    let (mut a, mut b) = (1i64, 2i64);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(Rational { p: a, q: b });
        let next = a + b;
        a = b;
        b = next;
    }
    out
}

/// `s_i = ⌊(i+1)γ + φ⌋ - ⌊iγ + φ⌋`, in exact integer arithmetic.
pub fn sturmian_symbol(gamma: Rational, phi: Rational, i: i64) -> u8 {
    let den = gamma.q as i128 * phi.q as i128;
    let at = |k: i64| -> i128 {
        let num = k as i128 * gamma.p as i128 * phi.q as i128 + phi.p as i128 * gamma.q as i128;
        num.div_euclid(den)
    };
    (at(i + 1) - at(i)) as u8
}

/// Window `s_{-origin} ... s_{length-origin-1}` of the rotation word with
/// slope `gamma` and phase `phi`.
pub fn sturmian_word(gamma: Rational, phi: Rational, length: usize, origin: usize) -> Result<ShiftPoint> {
    if !(0..gamma.q).contains(&gamma.p) || !(0..phi.q).contains(&phi.p) {
        return Err(Error::InvalidArgument(format!(
            "slope {gamma} and phase {phi} must lie in [0, 1)"
        )));
    }
    let symbols = (0..length as i64)
        .map(|j| sturmian_symbol(gamma, phi, j - origin as i64))
        .collect();
    ShiftPoint::new(symbols, origin)
}

/// Periodic rotation word with slope `convergents[k]` and phase 0.
pub fn periodic_approximant(convergents: &[Rational], k: usize) -> Result<PeriodicWord> {
    let c = *convergents
        .get(k)
        .ok_or_else(|| Error::InvalidArgument(format!("convergent index {k} out of range")))?;
    PeriodicWord::new(
        (0..c.q)
            .map(|i| sturmian_symbol(c, Rational::zero(), i) as usize)
            .collect(),
    )
}

/// Whether the counts of 1 in any two factors of equal length (up to
/// `max_len`) differ by at most one.
pub fn is_balanced(word: &[u8], max_len: usize) -> bool {
    let mut prefix = vec![0i64; word.len() + 1];
    for (i, &s) in word.iter().enumerate() {
        prefix[i + 1] = prefix[i] + s as i64;
    }
    for len in 1..=max_len.min(word.len()) {
        let counts = (0..=word.len() - len).map(|i| prefix[i + len] - prefix[i]);
        let (lo, hi) = counts.fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c), hi.max(c)));
        if hi - lo > 1 {
            return false;
        }
    }
    true
}

/// All factors of length 1..=max_len of the rotation language of a slope.
#[derive(Debug, Clone)]
pub struct FactorDictionary {
    by_len: Vec<HashSet<Vec<u8>>>,
}

impl FactorDictionary {
    /// Built from the periodic word of the first convergent with denominator
    /// above `max_len`; for such a convergent the length-ℓ factors agree with
    /// those of the limiting slope, ℓ + 1 of them.
    pub fn new(convergents: &[Rational], max_len: usize) -> Result<Self> {
        let c = *convergents
            .iter()
            .find(|c| c.q as usize > max_len)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "no convergent has denominator above {max_len}; supply more convergents"
                ))
            })?;
        let q = c.q as usize;
        let cycle: Vec<u8> = (0..c.q).map(|i| sturmian_symbol(c, Rational::zero(), i)).collect();
        let mut by_len = vec![HashSet::new(); max_len + 1];
        for (len, set) in by_len.iter_mut().enumerate().skip(1) {
            for start in 0..q {
                set.insert((0..len).map(|j| cycle[(start + j) % q]).collect::<Vec<u8>>());
            }
            if set.len() != len + 1 {
                return Err(Error::Invariant(format!(
                    "{} factors of length {len}, expected {}",
                    set.len(),
                    len + 1
                )));
            }
        }
        Ok(Self { by_len })
    }

    pub fn max_len(&self) -> usize {
        self.by_len.len() - 1
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        w.is_empty() || self.by_len.get(w.len()).is_some_and(|s| s.contains(w))
    }

    /// Factors of one length, sorted.
    pub fn factors(&self, len: usize) -> Vec<Vec<u8>> {
        let mut v: Vec<Vec<u8>> = self.by_len.get(len).map_or_else(Vec::new, |s| s.iter().cloned().collect());
        v.sort();
        v
    }
}
