//! Tail probabilities 𝒯(t) = P(|W| > t) and log-concave tail bounds.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::density::{gaussian_tail, RadialProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    Gaussian,
    LogConcaveGeneric,
    StronglyLogConcave,
}

/// A tail model for W in R^d.
///
/// * `Gaussian`: W ~ N(0, σ²I), exact tail.
/// * `LogConcaveGeneric`: log-concave W with coordinate variance σ². The tail
///   is exact when a profile is attached, otherwise the deviation bound of
///   [`log_concave_tail`].
/// * `StronglyLogConcave`: W with −ln ψ at least as convex as the standard
///   Gaussian. The stored profile is kept for checking; [`TailModel::tail`]
///   uses the standard Gaussian tail that dominates it.
#[derive(Debug, Clone)]
pub struct TailModel {
    kind: TailKind,
    dim: usize,
    sigma: f64,
    profile: Option<RadialProfile>,
}

impl TailModel {
    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        check(dim, sigma)?;
        Ok(TailModel { kind: TailKind::Gaussian, dim, sigma, profile: None })
    }

    pub fn log_concave(dim: usize, coord_sigma: f64) -> Result<Self> {
        check(dim, coord_sigma)?;
        Ok(TailModel { kind: TailKind::LogConcaveGeneric, dim, sigma: coord_sigma, profile: None })
    }

    pub fn strongly_log_concave(profile: RadialProfile, dim: usize) -> Result<Self> {
        profile.check_dim(dim)?;
        check(dim, 1.0)?;
        Ok(TailModel { kind: TailKind::StronglyLogConcave, dim, sigma: 1.0, profile: Some(profile) })
    }

    /// Exact-tail model for a base profile.
    pub fn for_profile(profile: &RadialProfile, dim: usize) -> Result<Self> {
        profile.check_dim(dim)?;
        match profile {
            RadialProfile::Gaussian { sigma } => TailModel::gaussian(dim, *sigma),
            _ => Ok(TailModel {
                kind: TailKind::LogConcaveGeneric,
                dim,
                sigma: f64::NAN,
                profile: Some(profile.clone()),
            }),
        }
    }

    pub fn kind(&self) -> TailKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// 𝒯(t) in [0, 1], non-increasing in t.
    pub fn tail(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::input(format!("tail threshold must be >= 0, got {t}")));
        }
        match (self.kind, &self.profile) {
            (TailKind::Gaussian, _) => gaussian_tail(self.dim, t / self.sigma),
            (TailKind::LogConcaveGeneric, Some(p)) => p.tail(self.dim, t),
            (TailKind::LogConcaveGeneric, None) => log_concave_tail_for(self.dim, self.sigma, t),
            (TailKind::StronglyLogConcave, _) => gaussian_tail(self.dim, t),
        }
    }

    /// The stored (not substituted) tail of a strongly log-concave model.
    pub fn stored_tail(&self, t: f64) -> Result<f64> {
        match &self.profile {
            Some(p) => p.tail(self.dim, t),
            None => self.tail(t),
        }
    }
}

fn check(dim: usize, sigma: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::input("dimension must be >= 1"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::input(format!("sigma must be positive, got {sigma}")));
    }
    Ok(())
}

/// Chebyshev anchor: P(|W| > √(2dσ²)) ≤ E|W|²/(2dσ²) = ½.
pub fn chebyshev_anchor(dim: usize, sigma: f64) -> (f64, f64) {
    ((2.0 * dim as f64 * sigma * sigma).sqrt(), 0.5)
}

/// Constants (C, c) of P(|W| > t) ≤ C e^{−ct}: C = 2^{−1/2},
/// c = ln 2 / (2√(2dσ²)).
pub fn log_concave_constants(dim: usize, sigma: f64) -> (f64, f64) {
    let (t0, _) = chebyshev_anchor(dim, sigma);
    (std::f64::consts::FRAC_1_SQRT_2, LN_2 / (2.0 * t0))
}

/// One step of the log-concave tail inequality:
/// P(|W| > r t₀) ≤ P(|W| > t₀)^{(r+1)/2} for r ≥ 1.
pub fn ls93_step(p0: f64, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::input(format!("the tail inequality needs r >= 1, got {r}")));
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::input(format!("p0 must be a probability, got {p0}")));
    }
    Ok(p0.powf(0.5 * (r + 1.0)))
}

/// Tail bound from an anchor P(|W| > t₀) ≤ p₀ ≤ ½:
/// `p₀^{(t/t₀ + 1)/2}` for t ≥ t₀ and 1 below the anchor.
///
/// With the Chebyshev anchor this equals `min(1, C e^{−ct})` for t ≥ t₀.
/// Below t₀ the inequality gives nothing, so the value is 1 (in particular
/// at t = 0).
pub fn log_concave_tail(t: f64, t0: f64, p0: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::input(format!("t must be >= 0, got {t}")));
    }
    if !(t0 > 0.0) {
        return Err(Error::input(format!("anchor t0 must be positive, got {t0}")));
    }
    if !(p0 > 0.0 && p0 <= 0.5) {
        return Err(Error::input(format!("anchor probability must lie in (0, 1/2], got {p0}")));
    }
    if t < t0 {
        return Ok(1.0);
    }
    Ok(ls93_step(p0, t / t0)?.min(1.0))
}

/// [`log_concave_tail`] at the Chebyshev anchor for coordinate variance σ².
pub fn log_concave_tail_for(dim: usize, sigma: f64, t: f64) -> Result<f64> {
    let (t0, p0) = chebyshev_anchor(dim, sigma);
    log_concave_tail(t, t0, p0)
}

/// Whether the stored tail of a strongly log-concave model lies below the
/// standard Gaussian tail at t.
pub fn strong_lc_tail_dominates(tail: &TailModel, t: f64) -> Result<bool> {
    if tail.kind() != TailKind::StronglyLogConcave {
        return Err(Error::input("tail dominance is defined for strongly log-concave models only"));
    }
    let own = tail.stored_tail(t)?;
    let reference = gaussian_tail(tail.dim(), t)?;
    Ok(own <= reference * (1.0 + 1e-12) + 1e-300)
}
