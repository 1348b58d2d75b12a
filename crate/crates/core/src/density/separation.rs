//! Separation certificates (λ, M, τ) for mixtures of affine images of one base.

use serde::Serialize;

use super::{AffineMap, MixtureModel, RadialProfile};
use crate::error::{Error, Result};

/// Geometry data (λ, M, τ): at most M of the pulled-back balls
/// `T_kj(B_λ)` meet any one `T_ij(B_λ)`.
///
/// Only [`certify`] and its relatives produce a verified certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationCertificate {
    lambda: f64,
    m: usize,
    tau: f64,
    verified: bool,
}

impl SeparationCertificate {
    pub fn new(lambda: f64, m: usize, tau: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::input(format!("lambda must be positive, got {lambda}")));
        }
        if m == 0 {
            return Err(Error::input("M must be >= 1"));
        }
        if !(tau >= 1.0 && tau.is_finite()) {
            return Err(Error::input(format!("tau must be >= 1, got {tau}")));
        }
        Ok(SeparationCertificate { lambda, m, tau, verified: false })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }
}

/// A mixture rewritten as `f_i = law of A_i W + b_i` for one base W.
#[derive(Debug, Clone)]
pub struct CommonBase {
    pub profile: RadialProfile,
    pub maps: Vec<AffineMap>,
    /// max_i τ(A_i)
    pub tau: f64,
}

/// Expresses every component through one base profile.
///
/// Same-family profiles with different scales are rescaled to the reference
/// scale √(s_min·s_max), absorbing the ratio into each A_i. Equal-σ Gaussian
/// translates therefore get base N(0, σ²I), A_i = I and τ = 1.
pub fn common_base(model: &MixtureModel) -> Result<CommonBase> {
    let pairs: Vec<(RadialProfile, AffineMap)> =
        model.components().iter().map(|c| c.as_pushforward()).collect();
    let first = &pairs[0].0;
    if pairs.iter().any(|(p, _)| !p.same_family(first)) {
        return Err(Error::unsupported("components do not share a common base profile"));
    }
    let (profile, maps) = match first.scale() {
        Some(_) => {
            let scales: Vec<f64> = pairs.iter().map(|(p, _)| p.scale().unwrap()).collect();
            let lo = scales.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = scales.iter().copied().fold(0.0, f64::max);
            let s_ref = if lo == hi { lo } else { (lo * hi).sqrt() };
            let maps = pairs
                .iter()
                .zip(&scales)
                .map(|((_, m), s)| if *s == s_ref { Ok(m.clone()) } else { m.scaled(s / s_ref) })
                .collect::<Result<Vec<_>>>()?;
            (first.with_scale(s_ref), maps)
        }
        None => (first.clone(), pairs.into_iter().map(|(_, m)| m).collect()),
    };
    let tau = maps.iter().map(|m| m.tau()).fold(1.0, f64::max);
    Ok(CommonBase { profile, maps, tau })
}

const SPACING_SLACK: f64 = 1e-12;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// origins[j][i] = T_ij(0) = A_i⁻¹(b_j − b_i).
fn relative_origins(maps: &[AffineMap]) -> Vec<Vec<Vec<f64>>> {
    (0..maps.len())
        .map(|j| maps.iter().map(|mi| mi.relative_origin(&maps[j])).collect())
        .collect()
}

/// Largest, over (i, j), number of k with |T_ij(0) − T_kj(0)| < 2λτ.
fn max_overlap(origins: &[Vec<Vec<f64>>], lambda: f64, tau: f64) -> usize {
    let thr = 2.0 * lambda * tau * (1.0 - SPACING_SLACK);
    let mut worst = 0;
    for row in origins {
        for oi in row {
            let count = row.iter().filter(|ok| dist(oi, ok) < thr).count();
            worst = worst.max(count);
        }
    }
    worst
}

/// Checks a certificate with the sufficient ball test: `T_ij(B_λ)` lies in
/// the ball of radius λτ around `T_ij(0)`, so images whose centers are at
/// least 2λτ apart cannot meet.
pub fn verify_separation(model: &MixtureModel, cert: &SeparationCertificate) -> Result<bool> {
    let base = common_base(model)?;
    if cert.tau < base.tau * (1.0 - SPACING_SLACK) {
        return Ok(false);
    }
    let origins = relative_origins(&base.maps);
    Ok(max_overlap(&origins, cert.lambda, cert.tau) <= cert.m)
}

/// Returns the certificate marked verified iff [`verify_separation`] accepts it.
pub fn certify(model: &MixtureModel, cert: SeparationCertificate) -> Result<SeparationCertificate> {
    let ok = verify_separation(model, &cert)?;
    Ok(SeparationCertificate { verified: ok, ..cert })
}

/// The largest λ certified with M = 1 at the model's own τ.
pub fn auto_certificate(model: &MixtureModel) -> Result<SeparationCertificate> {
    let base = common_base(model)?;
    let origins = relative_origins(&base.maps);
    let n = base.maps.len();
    let mut min_d = f64::INFINITY;
    for row in &origins {
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    min_d = min_d.min(dist(&row[i], &row[k]));
                }
            }
        }
    }
    if n == 1 {
        return Err(Error::input("a single component has no separation scale; pass lambda explicitly"));
    }
    if !(min_d > 0.0) {
        return Err(Error::input("coincident components cannot be certified with M = 1"));
    }
    certify(model, SeparationCertificate::new(min_d / (2.0 * base.tau), 1, base.tau)?)
}

/// The smallest M certified for a given λ at the model's own τ.
pub fn minimal_certificate(model: &MixtureModel, lambda: f64) -> Result<SeparationCertificate> {
    let base = common_base(model)?;
    let origins = relative_origins(&base.maps);
    let m = max_overlap(&origins, lambda, base.tau).max(1);
    certify(model, SeparationCertificate::new(lambda, m, base.tau)?)
}
