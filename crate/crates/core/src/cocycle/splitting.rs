use super::PeriodicWord;
use crate::bounds::fit::linear_fit;
use crate::bounds::MatrixSet;
use crate::error::{Error, Result};
use crate::linalg::{
    grassmann_distance, min_angle_sine, projection_from_pair, singular_values, spectral_norm, svd, ComplexMatrix,
    ProjectionPair, Subspace,
};

/// Exponent slopes below this magnitude (per symbol) count as zero.
pub const THETA_THRESHOLD: f64 = 0.02 * std::f64::consts::LN_2;

/// Distances at or below this count as exact agreement in the Cauchy fit.
const CAUCHY_EXACT: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectedDimension {
    pub p: usize,
    /// Slope estimates of `Σ_{i<=ℓ} log σ_i(A(x,n))` in n, for ℓ = 1..=d.
    pub theta: Vec<f64>,
}

/// Counts the leading cumulative exponents that vanish.
///
/// Fits `Σ_{i<=ℓ} log σ_i(A(x,n))` against n over n = r, 2r, ... <= horizon.
/// A slope whose magnitude falls in `[threshold, 2 threshold)` is ambiguous.
pub fn detect_p(set: &MatrixSet, x: &PeriodicWord, horizon: usize) -> Result<DetectedDimension> {
    x.check(set)?;
    let r = x.period();
    if horizon < 4 * r {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is shorter than four periods ({})",
            4 * r
        )));
    }
    let d = set.dim();
    let block = x.cocycle(set, r);
    let mut prod = ComplexMatrix::identity(d);
    let mut ns = Vec::new();
    let mut sums: Vec<Vec<f64>> = vec![Vec::new(); d];
    let mut n = 0;
    while n + r <= horizon {
        n += r;
        prod = &block * &prod;
        let s = singular_values(&prod);
        ns.push(n as f64);
        let mut acc = 0.0;
        for (l, sv) in s.iter().enumerate() {
            acc += sv.ln();
            sums[l].push(acc);
        }
    }
    let theta: Vec<f64> = sums
        .iter()
        .map(|ys| {
            if ys.iter().any(|y| !y.is_finite()) {
                f64::NEG_INFINITY
            } else {
                linear_fit(&ns, ys).0
            }
        })
        .collect();
    for (l, &t) in theta.iter().enumerate() {
        if t.abs() >= THETA_THRESHOLD && t.abs() < 2.0 * THETA_THRESHOLD {
            return Err(Error::Ambiguous { index: l + 1, slope: t });
        }
    }
    let p = theta.iter().filter(|t| t.abs() < THETA_THRESHOLD).count();
    Ok(DetectedDimension { p, theta })
}

/// Finite-horizon splitting at one point.
#[derive(Debug, Clone)]
pub struct SplittingResult {
    pub p: usize,
    pub horizon: usize,
    pub v: Subspace,
    pub w: Subspace,
    pub projection: ProjectionPair,
    /// Sine of the smallest principal angle between `v` and `w`.
    pub angle_sine: f64,
}

/// `V_n(x) = A(T^{-n}x, n) U`, with `U` the top-p right singular subspace of `A(T^{-n}x, 2n)`.
pub fn fast_subspace(set: &MatrixSet, x: &PeriodicWord, p: usize, n: usize) -> Result<Subspace> {
    let d = set.dim();
    if p > d {
        return Err(Error::InvalidArgument(format!("p = {p} exceeds dimension {d}")));
    }
    if p == 0 {
        return Ok(Subspace::zero(d));
    }
    let past = x.shift(-(n as i64));
    let long = past.cocycle(set, 2 * n);
    let top = Subspace::from_orthonormal(d, svd(&long).top_right(p))?;
    top.image(&past.cocycle(set, n))
}

/// Bottom-(d-p) right singular subspace of `A(x, n)`.
fn slow_subspace(set: &MatrixSet, x: &PeriodicWord, p: usize, n: usize) -> Result<Subspace> {
    let d = set.dim();
    Subspace::from_orthonormal(d, svd(&x.cocycle(set, n)).bottom_right(p))
}

/// Splitting `V_n(x) ⊕ W_n(x)` and its projection.
pub fn finite_splitting(set: &MatrixSet, x: &PeriodicWord, p: usize, n: usize) -> Result<SplittingResult> {
    x.check(set)?;
    if n == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let v = fast_subspace(set, x, p, n)?;
    let w = slow_subspace(set, x, p, n)?;
    let angle_sine = min_angle_sine(&v, &w)?;
    if angle_sine < 1e-8 {
        return Err(Error::DegenerateSplitting(format!(
            "principal angle sine {angle_sine:e} at horizon {n}"
        )));
    }
    let projection = projection_from_pair(&v, &w)?;
    Ok(SplittingResult {
        p,
        horizon: n,
        v,
        w,
        projection,
        angle_sine,
    })
}

/// Splittings at `T^k x` for k = 0..r.
pub fn splitting_along_orbit(set: &MatrixSet, x: &PeriodicWord, p: usize, n: usize) -> Result<Vec<SplittingResult>> {
    (0..x.period())
        .map(|k| finite_splitting(set, &x.shift(k as i64), p, n))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CauchyFit {
    /// Every consecutive distance is at or below 1e-14.
    Exact,
    Geometric { xi: f64, c: f64, r_squared: f64 },
}

#[derive(Debug, Clone)]
pub struct SplittingDiagnostics {
    /// `max_k d_Gr(A(T^k x) V_n(T^k x), V_{n+1}(T^{k+1} x))`.
    pub invariance_residual: f64,
    /// Same with horizon n on both sides.
    pub invariance_residual_fixed: f64,
    /// Per-phase values of `invariance_residual`.
    pub invariance_residuals: Vec<f64>,
    /// `max_k ‖A(T^k x) P_n(T^k x) - P(V_{n+1}, W_{n-1})(T^{k+1} x) A(T^k x)‖`.
    pub commutation_residual: f64,
    /// `max ‖A(T^k x, m) P_n(T^k x) - P_n(T^{k+m} x) A(T^k x, m)‖` over phases k and 1 <= m <= r.
    pub commutation_residual_fixed: f64,
    /// `min σ_p(A(T^k x, m) B_V)` over phases and 1 <= m <= n_max; `None` when p = 0.
    pub delta_hat: Option<f64>,
    /// `(m, max_k σ_1(A(T^k x, m) B_W))` for m = r, 2r, ... <= n_max.
    pub slow_growth: Vec<(usize, f64)>,
    /// Fitted contraction per symbol on W; `None` when W = {0}.
    pub xi_hat: Option<f64>,
    pub c_hat: Option<f64>,
    pub contraction_fit_r2: Option<f64>,
    /// `(m, d_Gr(V_m, V_{m+r}))` at phase 0 for m = 1..=n_max.
    pub cauchy: Vec<(usize, f64)>,
    pub cauchy_fit: CauchyFit,
    pub min_angle_sine: f64,
}

fn geometric_fit(points: &[(usize, f64)]) -> Option<(f64, f64, f64)> {
    let pos: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(m, g)| (m as f64, g.ln()))
        .collect();
    if pos.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = pos.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pos.iter().map(|p| p.1).collect();
    let (slope, _, r2) = linear_fit(&xs, &ys);
    let xi = slope.exp();
    let c = points
        .iter()
        .map(|&(m, g)| g / xi.powi(m as i32))
        .fold(0.0, f64::max);
    Some((xi, c, r2))
}

/// Diagnostics for the splitting of `result` along the orbit of `x`.
pub fn splitting_residuals(
    set: &MatrixSet,
    x: &PeriodicWord,
    result: &SplittingResult,
    n_max: usize,
) -> Result<SplittingDiagnostics> {
    let p = result.p;
    let n = result.horizon;
    if n < 2 {
        return Err(Error::InvalidArgument("diagnostics need horizon at least 2".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let r = x.period();
    let here = splitting_along_orbit(set, x, p, n)?;
    let longer = splitting_along_orbit(set, x, p, n + 1)?;
    let shorter = splitting_along_orbit(set, x, p, n - 1)?;

    let mut invariance_residuals = Vec::with_capacity(r);
    let mut fixed = 0.0f64;
    let mut commutation = 0.0f64;
    let mut commutation_fixed = 0.0f64;
    for k in 0..r {
        let next = (k + 1) % r;
        let a = set.matrix(x.symbol(k as i64));
        if p > 0 {
            let pushed = here[k].v.image(a)?;
            invariance_residuals.push(grassmann_distance(&pushed, &longer[next].v)?);
            fixed = fixed.max(grassmann_distance(&pushed, &here[next].v)?);
        } else {
            invariance_residuals.push(0.0);
        }
        let mixed = projection_from_pair(&longer[next].v, &shorter[next].w)?;
        let lhs = a * &here[k].projection.p;
        let rhs = &mixed.p * a;
        commutation = commutation.max(spectral_norm(&lhs.sub(&rhs)));
        let phase = x.shift(k as i64);
        for m in 1..=r {
            let block = phase.cocycle(set, m);
            let target = &here[(k + m) % r].projection.p;
            let diff = (&block * &here[k].projection.p).sub(&(target * &block));
            commutation_fixed = commutation_fixed.max(spectral_norm(&diff));
        }
    }
    let invariance_residual = invariance_residuals.iter().copied().fold(0.0, f64::max);

    let mut delta_hat: Option<f64> = None;
    let mut slow_growth = Vec::new();
    for (k, split) in here.iter().enumerate() {
        let phase = x.shift(k as i64);
        let mut prod = ComplexMatrix::identity(set.dim());
        for m in 1..=n_max {
            prod = set.matrix(phase.symbol(m as i64 - 1)) * &prod;
            if let Some(bv) = split.v.basis_matrix() {
                let s = *singular_values(&(&prod * &bv)).get(p - 1).expect("p columns");
                delta_hat = Some(delta_hat.map_or(s, |d: f64| d.min(s)));
            }
            if m % r == 0 {
                if let Some(bw) = split.w.basis_matrix() {
                    let g = spectral_norm(&(&prod * &bw));
                    match slow_growth.iter_mut().find(|e: &&mut (usize, f64)| e.0 == m) {
                        Some(e) => e.1 = e.1.max(g),
                        None => slow_growth.push((m, g)),
                    }
                }
            }
        }
    }
    let (xi_hat, c_hat, contraction_fit_r2) = if p == set.dim() {
        (None, None, None)
    } else {
        match geometric_fit(&slow_growth) {
            Some((xi, c, r2)) => (Some(xi), Some(c), Some(r2)),
            None => (Some(0.0), Some(0.0), Some(1.0)),
        }
    };

    let mut cauchy = Vec::with_capacity(n_max);
    for m in 1..=n_max {
        let a = fast_subspace(set, x, p, m)?;
        let b = fast_subspace(set, x, p, m + r)?;
        cauchy.push((m, grassmann_distance(&a, &b)?));
    }
    let significant: Vec<(usize, f64)> = cauchy.iter().copied().filter(|c| c.1 > CAUCHY_EXACT).collect();
    let cauchy_fit = if significant.len() < 3 {
        CauchyFit::Exact
    } else {
        let (xi, c, r_squared) = geometric_fit(&significant).expect("at least three points");
        CauchyFit::Geometric { xi, c, r_squared }
    };

    Ok(SplittingDiagnostics {
        invariance_residual,
        invariance_residual_fixed: fixed,
        invariance_residuals,
        commutation_residual: commutation,
        commutation_residual_fixed: commutation_fixed,
        delta_hat,
        slow_growth,
        xi_hat,
        c_hat,
        contraction_fit_r2,
        cauchy,
        cauchy_fit,
        min_angle_sine: here.iter().map(|s| s.angle_sine).fold(f64::INFINITY, f64::min),
    })
}
