use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PeriodicWord, SplittingResult};
use crate::bounds::fit::linear_fit;
use crate::bounds::MatrixSet;
use crate::error::{Error, Result};
use crate::extremal::{maximize_ratio, operator_norm, NormSpec};
use crate::linalg::{ComplexMatrix, ProjectionPair};

/// Absolute slack allowed on the cone inequalities.
const CONE_TOL: f64 = 1e-9;

/// Cones `c(x, θ) = {v : θ |||P(x)v||| >= |||Q(x)v|||}` along a periodic orbit.
#[derive(Debug, Clone)]
pub struct ConeParams {
    pub theta: f64,
    /// Projection at orbit position k, indexed modulo the length.
    pub projections: Vec<ProjectionPair>,
    pub norm: NormSpec,
}

impl ConeParams {
    pub fn new(theta: f64, projections: Vec<ProjectionPair>, norm: NormSpec) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidArgument(format!("cone aperture must be positive, got {theta}")));
        }
        if projections.is_empty() {
            return Err(Error::InvalidArgument("cone needs at least one projection".into()));
        }
        Ok(Self {
            theta,
            projections,
            norm,
        })
    }

    pub fn from_splittings(theta: f64, splits: &[SplittingResult], norm: NormSpec) -> Result<Self> {
        Self::new(theta, splits.iter().map(|s| s.projection.clone()).collect(), norm)
    }

    fn at(&self, position: usize) -> &ProjectionPair {
        &self.projections[position % self.projections.len()]
    }

    /// `|||Q v||| / |||P v|||` at `position`.
    pub fn aperture(&self, position: usize, v: &[Complex64]) -> f64 {
        let pp = self.at(position);
        let pv = self.norm.eval(&pp.p.apply(v));
        let qv = self.norm.eval(&pp.complement().apply(v));
        if pv > 0.0 {
            qv / pv
        } else if qv == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeMembership {
    pub member: bool,
    /// `θ |||Pv||| - |||Qv|||`.
    pub margin: f64,
}

pub fn cone_contains(params: &ConeParams, position: usize, v: &[Complex64]) -> ConeMembership {
    let pp = params.at(position);
    let pv = params.norm.eval(&pp.p.apply(v));
    let qv = params.norm.eval(&pp.complement().apply(v));
    let margin = params.theta * pv - qv;
    ConeMembership {
        member: margin >= 0.0,
        margin,
    }
}

/// Fitted constants of the cone estimates along an orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeConstants {
    /// Contraction per symbol on W in the working norm.
    pub xi: f64,
    /// `sup_{w in W} |||A(T^k x, m) w||| / |||w||| <= c ξ^m`.
    pub c: f64,
    /// `max_k |||Q(T^k x)|||`.
    pub m_hat: f64,
    /// `2 c m_hat`.
    pub k1: f64,
    pub fit_r2: f64,
}

impl ConeConstants {
    /// Multiplies `c` and `k1` by `factor`.
    pub fn inflated(self, factor: f64) -> Self {
        Self {
            c: self.c * factor,
            k1: self.k1 * factor,
            ..self
        }
    }
}

/// Fits ξ and C in the working norm from growth on W over m = 1..=n_max and
/// every orbit phase, and measures `sup |||Q|||`.
pub fn fit_cone_constants(
    set: &MatrixSet,
    x: &PeriodicWord,
    splits: &[SplittingResult],
    norm: &NormSpec,
    n_max: usize,
) -> Result<ConeConstants> {
    if splits.len() != x.period() {
        return Err(Error::InvalidArgument("need one splitting per orbit phase".into()));
    }
    let mut m_hat = 0.0f64;
    for s in splits {
        m_hat = m_hat.max(operator_norm(&s.projection.complement(), norm)?);
    }
    let q = set.dim() - splits[0].p;
    if q == 0 {
        return Ok(ConeConstants {
            xi: 0.0,
            c: 0.0,
            m_hat,
            k1: 0.0,
            fit_r2: 1.0,
        });
    }
    let mut growth = vec![0.0f64; n_max];
    for (k, s) in splits.iter().enumerate() {
        let phase = x.shift(k as i64);
        let bw = s.w.basis_matrix().expect("nonzero slow space");
        let mut prod = ComplexMatrix::identity(set.dim());
        for m in 1..=n_max {
            prod = set.matrix(phase.symbol(m as i64 - 1)) * &prod;
            let image = &prod * &bw;
            let g = maximize_ratio(q, &[], |c| {
                let den = norm.eval(&bw.apply(c));
                if den > 0.0 {
                    norm.eval(&image.apply(c)) / den
                } else {
                    0.0
                }
            });
            growth[m - 1] = growth[m - 1].max(g);
        }
    }
    let pts: Vec<(f64, f64)> = growth
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > 0.0)
        .map(|(i, &g)| ((i + 1) as f64, g.ln()))
        .collect();
    let (xi, fit_r2) = if pts.len() >= 2 {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let (slope, _, r2) = linear_fit(&xs, &ys);
        (slope.exp(), r2)
    } else {
        (0.0, 1.0)
    };
    let c = if xi > 0.0 {
        growth
            .iter()
            .enumerate()
            .map(|(i, &g)| g / xi.powi(i as i32 + 1))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(ConeConstants {
        xi,
        c,
        m_hat,
        k1: 2.0 * c * m_hat,
        fit_r2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeCounterexample {
    pub position: usize,
    pub block: usize,
    pub vector: Vec<Complex64>,
    pub kind: String,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConePropagationReport {
    pub passed: bool,
    pub vectors: usize,
    pub blocks_checked: usize,
    /// Minimum of `K ξ^N a - a'` over all blocks; negative means a violation.
    pub worst_aperture_slack: f64,
    /// Minimum of `|||A v||| - (1 - a - K ξ^N a)|||v|||` over all blocks.
    pub worst_norm_slack: f64,
    /// Largest observed ratio `a' / a` for vectors with positive aperture.
    pub max_aperture_ratio: f64,
    /// Largest observed `1 - |||A v||| / |||v|||`.
    pub worst_norm_loss: f64,
    pub counterexample: Option<ConeCounterexample>,
}

fn start_vectors(params: &ConeParams) -> Vec<Vec<Complex64>> {
    let pp = params.at(0);
    let mut out = Vec::new();
    let phases = [0.0, 0.5, 1.0, 1.5].map(|t: f64| Complex64::from_polar(1.0, t * std::f64::consts::PI));
    for b in pp.v.basis() {
        out.push(b.clone());
        let nb = params.norm.eval(b);
        for c in pp.w.basis() {
            let t = params.theta * nb / params.norm.eval(c);
            for ph in phases {
                for scale in [1.0, 0.5] {
                    out.push(b.iter().zip(c).map(|(x, y)| x + ph * y * t * scale).collect());
                }
            }
        }
    }
    out
}

/// Pushes boundary and interior cone vectors through `n`-step blocks.
///
/// With `a` the aperture at the start of a block and `a'` after it, checks
/// `a' <= K ξ^N a` and `|||A v||| >= (1 - a - K ξ^N a)|||v|||` with
/// `K = constants.k1` and `ξ = constants.xi`. `laps` full returns to the
/// starting phase are made.
pub fn cone_propagation_check(
    set: &MatrixSet,
    x: &PeriodicWord,
    params: &ConeParams,
    constants: &ConeConstants,
    n: usize,
    laps: usize,
) -> Result<ConePropagationReport> {
    if n == 0 || laps == 0 {
        return Err(Error::InvalidArgument("block length and laps must be positive".into()));
    }
    if params.theta > 1.0 {
        return Err(Error::InvalidArgument("cone aperture must not exceed 1".into()));
    }
    let r = x.period();
    let g = gcd(r, n);
    let blocks = laps * (r / g);
    let shrink = constants.k1 * constants.xi.powi(n as i32);
    let mut report = ConePropagationReport {
        passed: true,
        vectors: 0,
        blocks_checked: 0,
        worst_aperture_slack: f64::INFINITY,
        worst_norm_slack: f64::INFINITY,
        max_aperture_ratio: 0.0,
        worst_norm_loss: f64::NEG_INFINITY,
        counterexample: None,
    };
    let starts = start_vectors(params);
    report.vectors = starts.len();
    for v0 in starts {
        let m0 = cone_contains(params, 0, &v0);
        if m0.margin < -CONE_TOL {
            return Err(Error::Invariant(format!("start vector outside the cone, margin {}", m0.margin)));
        }
        let mut v = v0;
        let mut pos = 0usize;
        for b in 0..blocks {
            let a = params.aperture(pos, &v);
            let before = params.norm.eval(&v);
            let block = x.shift(pos as i64).cocycle(set, n);
            let w = block.apply(&v);
            let after = params.norm.eval(&w);
            let next = (pos + n) % r;
            let a_next = params.aperture(next, &w);
            let ap_slack = shrink * a - a_next;
            let norm_slack = after - (1.0 - a - shrink * a) * before;
            report.blocks_checked += 1;
            report.worst_aperture_slack = report.worst_aperture_slack.min(ap_slack);
            report.worst_norm_slack = report.worst_norm_slack.min(norm_slack / before);
            report.worst_norm_loss = report.worst_norm_loss.max(1.0 - after / before);
            if a > 1e-300 {
                report.max_aperture_ratio = report.max_aperture_ratio.max(a_next / a);
            }
            let violation = if ap_slack < -CONE_TOL {
                Some(("aperture", ap_slack))
            } else if norm_slack < -CONE_TOL * before {
                Some(("norm", norm_slack))
            } else {
                None
            };
            if let Some((kind, slack)) = violation {
                if report.counterexample.is_none() {
                    report.counterexample = Some(ConeCounterexample {
                        position: pos,
                        block: b,
                        vector: v.clone(),
                        kind: kind.into(),
                        slack,
                    });
                }
                report.passed = false;
            }
            v = w.iter().map(|z| z / after).collect();
            pos = next;
        }
    }
    Ok(report)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    /// Whether `|||P_x - P_y||| <= θ < 1/5` held, so the check ran.
    pub applicable: bool,
    pub projection_distance: f64,
    pub checked: usize,
    pub violations: usize,
    /// Smallest `3θ |||P_y v||| - |||Q_y v|||` over samples.
    pub worst_margin: f64,
}

/// Samples `v` in `c(x, θ)` and checks each lies in `c(y, 3θ)`.
pub fn cone_containment_check(
    norm: &NormSpec,
    px: &ProjectionPair,
    py: &ProjectionPair,
    theta: f64,
    samples: usize,
    seed: u64,
) -> Result<ContainmentReport> {
    let dist = operator_norm(&px.p.sub(&py.p), norm)?;
    let applicable = dist <= theta && theta < 0.2;
    let mut report = ContainmentReport {
        applicable,
        projection_distance: dist,
        checked: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
    };
    if !applicable || px.v.dim() == 0 {
        return Ok(report);
    }
    let d = px.p.rows();
    let qx = px.complement();
    let qy = py.complement();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for i in 0..samples {
        let mut p = vec![Complex64::new(0.0, 0.0); d];
        for b in px.v.basis() {
            let c = gauss(&mut rng);
            for (x, y) in p.iter_mut().zip(b) {
                *x += c * y;
            }
        }
        let mut q = vec![Complex64::new(0.0, 0.0); d];
        for b in px.w.basis() {
            let c = gauss(&mut rng);
            for (x, y) in q.iter_mut().zip(b) {
                *x += c * y;
            }
        }
        let u = if i % 4 == 0 { 1.0 } else { rng.gen_range(0.0..1.0) };
        let qn = norm.eval(&qx.apply(&q));
        let pn = norm.eval(&px.p.apply(&p));
        let s = if qn > 0.0 { u * theta * pn / qn } else { 0.0 };
        let v: Vec<Complex64> = p.iter().zip(&q).map(|(a, b)| a + b * s).collect();
        let margin = 3.0 * theta * norm.eval(&py.p.apply(&v)) - norm.eval(&qy.apply(&v));
        report.checked += 1;
        report.worst_margin = report.worst_margin.min(margin / norm.eval(&v));
        if margin < -CONE_TOL * norm.eval(&v) {
            report.violations += 1;
        }
    }
    Ok(report)
}
