use crate::bounds::{MatrixSet, Word};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, spectral_radius};

/// Number of powers in the Gelfand trace.
const TRACE_LEN: usize = 8;

/// `ρ(A_w)^{1/|w|}`, a lower bound for the joint spectral radius, with a
/// Gelfand-formula cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundCertificate {
    pub word: Word,
    pub value: f64,
    /// True when the product is nilpotent, so the bound says nothing.
    pub vacuous: bool,
    /// `‖A_w^k‖^{1/(k|w|)}` for k = 1..=8.
    pub gelfand_trace: Vec<f64>,
    /// Whether `|trace_k - value|` is non-increasing in k (to 1e-12 relative).
    pub trace_monotone: bool,
}

pub fn certify_lower(set: &MatrixSet, w: &Word) -> Result<LowerBoundCertificate> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("certificate needs a nonempty word".into()));
    }
    let product = set.product(w)?;
    let len = w.len() as f64;
    let rho = spectral_radius(&product)?;
    let value = if rho > 0.0 { rho.powf(1.0 / len) } else { 0.0 };
    let mut power = product.clone();
    let mut gelfand_trace = Vec::with_capacity(TRACE_LEN);
    for k in 1..=TRACE_LEN {
        if k > 1 {
            power = &product * &power;
        }
        let nrm = spectral_norm(&power);
        gelfand_trace.push(if nrm > 0.0 { nrm.powf(1.0 / (k as f64 * len)) } else { 0.0 });
    }
    let gaps: Vec<f64> = gelfand_trace.iter().map(|t| (t - value).abs()).collect();
    let trace_monotone = gaps
        .windows(2)
        .all(|g| g[1] <= g[0] + 1e-12 * value.max(1.0));
    Ok(LowerBoundCertificate {
        word: w.clone(),
        value,
        vacuous: rho <= 1e-12 * product.max_abs().max(f64::MIN_POSITIVE) || rho == 0.0,
        gelfand_trace,
        trace_monotone,
    })
}
