use rayon::prelude::*;

use super::shift::agreement;
use super::sturmian::{FactorDictionary, Rational};
use crate::cocycle::PeriodicWord;
use crate::error::{Error, Result};

/// Fewest convergents accepted as a stand-in for an irrational slope.
pub const MIN_CONVERGENTS: usize = 8;

/// A minimal invariant set of the shift.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitClosure {
    /// Finite union of periodic orbits over the symbols `0..alphabet`.
    Periodic { orbits: Vec<PeriodicWord>, alphabet: usize },
    /// Orbit closure of a rotation word over {0, 1}; the slope is given by
    /// its continued-fraction convergents.
    Sturmian { convergents: Vec<Rational> },
}

impl OrbitClosure {
    pub fn periodic(orbits: Vec<PeriodicWord>, alphabet: usize) -> Result<Self> {
        if orbits.is_empty() {
            return Err(Error::InvalidArgument("periodic orbit set is empty".into()));
        }
        if alphabet < 1 {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        if let Some(s) = orbits.iter().flat_map(|o| o.cycle()).find(|&&s| s >= alphabet) {
            return Err(Error::InvalidArgument(format!("symbol {s} outside alphabet of size {alphabet}")));
        }
        Ok(Self::Periodic { orbits, alphabet })
    }

    pub fn sturmian(convergents: Vec<Rational>) -> Result<Self> {
        if convergents.len() < MIN_CONVERGENTS {
            return Err(Error::InvalidArgument(format!(
                "need at least {MIN_CONVERGENTS} convergents, got {}",
                convergents.len()
            )));
        }
        if let Some(c) = convergents.iter().find(|c| c.p <= 0 || c.p >= c.q) {
            return Err(Error::InvalidArgument(format!("convergent {c} outside (0, 1)")));
        }
        if convergents.windows(2).any(|w| w[1].q <= w[0].q) {
            return Err(Error::InvalidArgument("convergent denominators must increase".into()));
        }
        Ok(Self::Sturmian { convergents })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonResult {
    pub n: usize,
    pub value: f64,
    pub orbit: PeriodicWord,
    /// False when `value` is only an upper bound.
    pub exact: bool,
    pub candidates_checked: u64,
}

/// `ε(Z, n) = min_{k ≤ n} inf_{T^k y = y} max_{i < k} dist(T^i y, Z)`.
///
/// Periodic sets are searched exhaustively over necklaces; ties go to the
/// smaller period, then the lexicographically smaller cycle. For Sturmian
/// sets the candidates are the language factors of length at most `n` read
/// as cycles, so the value is an upper bound.
pub fn epsilon_of_n(z: &OrbitClosure, n: usize, search_budget: u64) -> Result<EpsilonResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    match z {
        OrbitClosure::Periodic { orbits, alphabet } => periodic_epsilon(orbits, *alphabet, n, search_budget),
        OrbitClosure::Sturmian { convergents } => sturmian_epsilon(convergents, n),
    }
}

/// Whether `w` is the lexicographically least rotation of itself and not a
/// proper power.
fn is_necklace(w: &[usize]) -> bool {
    let k = w.len();
    (1..k).all(|s| {
        let rot = w[s..].iter().chain(&w[..s]);
        match rot.cmp(w.iter()) {
            std::cmp::Ordering::Greater => true,
            // equal rotation means a proper power
            _ => false,
        }
    })
}

fn words(alphabet: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (alphabet as u64).pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut w = vec![0; k];
        for slot in w.iter_mut().rev() {
            *slot = (idx % alphabet as u64) as usize;
            idx /= alphabet as u64;
        }
        w
    })
}

fn exponent_distance(m: Option<i64>) -> f64 {
    m.map_or(0.0, |m| 2f64.powi(-(m as i32)))
}

/// Largest per-phase distance of the cycle `y` to the orbits, stopping
/// early once it reaches `stop_at`.
fn cycle_distance(y: &[usize], orbits: &[PeriodicWord], n: usize, stop_at: f64) -> f64 {
    let k = y.len() as i64;
    let mut worst = 0.0f64;
    for i in 0..k {
        let mut best = f64::INFINITY;
        for z in orbits {
            let r = z.period() as i64;
            let cap = (2 * n).max(y.len() + z.period());
            for j in 0..r {
                let m = agreement(
                    |t| y[(i + t).rem_euclid(k) as usize] as u8,
                    |t| z.symbol(j + t) as u8,
                    cap,
                );
                best = best.min(exponent_distance(m));
                if best == 0.0 {
                    break;
                }
            }
        }
        worst = worst.max(best);
        if worst >= stop_at {
            break;
        }
    }
    worst
}

fn periodic_epsilon(orbits: &[PeriodicWord], alphabet: usize, n: usize, budget: u64) -> Result<EpsilonResult> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut checked = 0u64;
    let mut exhausted = false;
    'periods: for k in 1..=n {
        let cands: Vec<Vec<usize>> = words(alphabet, k).filter(|w| is_necklace(w)).collect();
        let remaining = budget.saturating_sub(checked) as usize;
        let (cands, cut) = if cands.len() > remaining {
            (&cands[..remaining], true)
        } else {
            (&cands[..], false)
        };
        let stop_at = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        let values: Vec<f64> = cands
            .par_iter()
            .map(|w| cycle_distance(w, orbits, n, stop_at))
            .collect();
        checked += cands.len() as u64;
        for (w, v) in cands.iter().zip(values) {
            if best.as_ref().map_or(true, |b| v < b.0) {
                best = Some((v, w.clone()));
            }
        }
        if cut {
            exhausted = true;
            break 'periods;
        }
        if best.as_ref().is_some_and(|b| b.0 == 0.0) {
            break;
        }
    }
    let (value, cycle) = best.ok_or_else(|| Error::BudgetExceeded {
        limit: budget,
        depth: 1,
        feasible: 0,
    })?;
    Ok(EpsilonResult {
        n,
        value,
        orbit: PeriodicWord::new(cycle)?,
        exact: !exhausted,
        candidates_checked: checked,
    })
}

/// `dist(T^i y, Z)` for a cycle against a factor dictionary; windows that
/// are still factors at the dictionary's length give an upper bound.
pub(crate) fn dictionary_distance(y: &[u8], dict: &FactorDictionary) -> f64 {
    let k = y.len() as i64;
    let max_half = (dict.max_len() - 1) / 2;
    let mut worst = 0.0f64;
    for i in 0..k {
        let mut m: i64 = -1;
        for h in 0..=max_half as i64 {
            let win: Vec<u8> = (-h..=h).map(|t| y[(i + t).rem_euclid(k) as usize]).collect();
            if !dict.contains(&win) {
                break;
            }
            m = h;
        }
        worst = worst.max(2f64.powi(-(m as i32)));
    }
    worst
}

fn rotate_min(w: &[u8]) -> Vec<u8> {
    (0..w.len())
        .map(|s| w[s..].iter().chain(&w[..s]).copied().collect::<Vec<u8>>())
        .min()
        .unwrap_or_default()
}

fn sturmian_epsilon(convergents: &[Rational], n: usize) -> Result<EpsilonResult> {
    let dict = FactorDictionary::new(convergents, 4 * n + 1)?;
    let mut cands: Vec<Vec<u8>> = Vec::new();
    for k in 1..=n {
        let mut seen: Vec<Vec<u8>> = dict.factors(k).iter().map(|f| rotate_min(f)).collect();
        seen.sort();
        seen.dedup();
        cands.extend(seen);
    }
    let values: Vec<f64> = cands.par_iter().map(|c| dictionary_distance(c, &dict)).collect();
    let mut best = 0usize;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    Ok(EpsilonResult {
        n,
        value: values[best],
        orbit: PeriodicWord::new(cands[best].iter().map(|&s| s as usize).collect())?,
        exact: false,
        candidates_checked: cands.len() as u64,
    })
}
